import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fbtransducer.errors import InvalidParameter, NumericalBranch
from fbtransducer.gaussian_ent import (CovarianceMatrix2Mode, apply_channel, entanglement_report, inseparability,
                                       min_symplectic_eigenvalue, partial_transpose, tmss_covariance)


@pytest.mark.parametrize("r", [0.0, 0.3, 1.0, 2.5, 5.0, 10.0])
def test_tmss_inseparability(r):
    assert inseparability(tmss_covariance(r)) == pytest.approx(math.exp(-2 * r), abs=1e-12)
    assert min_symplectic_eigenvalue(tmss_covariance(r)) == pytest.approx(0.5, abs=1e-12)


def test_bona_fide():
    assert tmss_covariance(1.0).is_bona_fide()
    assert not CovarianceMatrix2Mode(np.eye(4) * 0.2).is_bona_fide()


def test_partial_transpose_is_involution():
    c = tmss_covariance(0.7)
    assert np.allclose(partial_transpose(partial_transpose(c)).matrix, c.matrix)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 2.0))
def test_large_squeezing_matches_witness(t, v):
    g = math.sqrt(t)
    rep = entanglement_report(10.0, g, v)
    assert abs(rep["I"] - rep["W_T"]) < 1e-3
    assert rep["verdict"] == ("entangled" if rep["I"] < 1 else "separable")


@pytest.mark.parametrize("gx,gy,vx,vy", [(0.9, 0.9, 0.3, 0.1), (0.5, 0.8, 0.05, 0.7), (1.3, 0.4, 0.02, 0.2)])
def test_dual_channel_identity(gx, gy, vx, vy):
    # both halves through the same channel. Exact only as r -> infinity: the residual
    # shrinks like e^{-2r}/sqrt(vx vy), or only like e^{-r} when one noise is zero
    cov = tmss_covariance(20.0)
    for mode in (1, 2):
        cov = apply_channel(cov, mode, gx, gy, vx, vy)
    assert inseparability(cov) == pytest.approx(2 * math.sqrt(vx * vy), abs=1e-9)


def test_vacua_stay_separable():
    rng = np.random.default_rng(3)
    for _ in range(50):
        gx, gy = rng.uniform(0, 2, 2)
        vx, vy = rng.uniform(0, 1, 2) + np.abs(1 - gx * gy) / 2
        assert inseparability(apply_channel(tmss_covariance(0.0), 2, gx, gy, vx, vy)) >= 1 - 1e-12


def test_inseparability_decreases_towards_witness():
    g, v = math.sqrt(0.8), 0.2
    vals = [entanglement_report(r, g, v)["I"] for r in (2.0, 5.0, 10.0)]
    assert vals[0] >= vals[1] >= vals[2]
    assert vals[2] == pytest.approx(entanglement_report(10.0, g, v)["W_T"], abs=1e-6)


def test_input_errors():
    with pytest.raises(InvalidParameter):
        tmss_covariance(-1)
    with pytest.raises(InvalidParameter):
        apply_channel(tmss_covariance(1), 3, 1, 1, 0, 0)
    with pytest.raises(InvalidParameter):
        CovarianceMatrix2Mode(np.arange(16.0).reshape(4, 4))


def test_unphysical_matrix_reports_branch():
    bad = CovarianceMatrix2Mode(np.array([[1, 0, 5, 0], [0, 1, 0, 5], [5, 0, 1, 0], [0, 5, 0, 1.0]]))
    with pytest.raises(NumericalBranch):
        inseparability(bad)
