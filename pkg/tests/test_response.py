import math

import numpy as np
import pytest

from fbtransducer.params import ReducedParams, derive_effective
from fbtransducer.response import (default_grid, ideal_transmission, matched_detuning, optimal_detunings,
                                   susceptibilities, transmission_spectrum)


@pytest.mark.parametrize("beta", [0.1, 1.0, 10.0])
def test_unit_transmission_on_resonance_at_cmp_one(beta):
    r = ReducedParams(cl=1e4, beta=beta)
    assert ideal_transmission(r, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert optimal_detunings(r) == [0.0]


@pytest.mark.parametrize("cmp", [5.0, 10.0])
def test_split_peaks(cmp):
    r = ReducedParams(cl=1e4, cmp=cmp)
    gp = derive_effective(r).gamma_prime
    w = 0.5 * gp * math.sqrt(cmp - 1)
    assert optimal_detunings(r) == pytest.approx([-w, w])
    assert ideal_transmission(r, w) == pytest.approx(1.0, abs=1e-9)
    assert ideal_transmission(r, 0.0) < 1.0
    assert matched_detuning(r) == pytest.approx(w)


def test_transmission_bounded_by_one():
    for beta in (0.1, 1, 10):
        for cmp in (0.5, 1, 10):
            r = ReducedParams(cl=1e4, beta=beta, cmp=cmp)
            assert ideal_transmission(r, default_grid(r)).max() <= 1 + 1e-12


def test_no_unity_point_falls_back_to_maximum():
    r = ReducedParams(cl=1e4, beta=0.1, cmp=10)
    with pytest.warns(UserWarning):
        d = matched_detuning(r)
    grid = default_grid(r, n=20001)
    assert ideal_transmission(r, d) >= ideal_transmission(r, grid).max() - 1e-9


def test_undressed_limit():
    r = ReducedParams(cl=10, cmp=0.0)
    chi = susceptibilities(r, np.array([0.0, 3.0]))
    assert np.allclose(chi.chi_b_em, chi.chi_b)
    assert np.allclose(chi.chi_cross, 0)


def test_spectrum_series_metadata():
    s = transmission_spectrum(ReducedParams(cl=1e3))
    assert s.omega.shape == s.values.shape
    assert s.meta["quantity"] == "T_inf"
