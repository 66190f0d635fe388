import math

import numpy as np
import pytest

from fbtransducer.errors import GridMismatch, GridTooCoarse, InvalidParameter
from fbtransducer.wigner import (fidelity, gaussian_state, grid_for_noise, negativity, propagate, wigner_cat,
                                 wigner_fock)


@pytest.fixture(scope="module")
def states():
    return {"0": wigner_fock(0), "1": wigner_fock(1), "2": wigner_fock(2), "cat": wigner_cat(2.0)}


def test_normalisation_and_peak(states):
    for w in states.values():
        assert w.integrate() == pytest.approx(1.0, abs=1e-6)
    v = states["0"]
    assert v.values[v.ny // 2, v.nx // 2] == pytest.approx(1 / math.pi)


def test_pure_state_self_fidelity(states):
    for w in states.values():
        assert fidelity(w, w) == pytest.approx(1.0, abs=1e-6)


def test_fock_one_negativity(states):
    # int |W| - 1 for |1>: 4 e^{-1/2} - 2
    assert negativity(states["1"]) == pytest.approx(4 * math.exp(-0.5) - 2, abs=1e-4)
    assert negativity(states["0"]) == 0.0


def test_odd_cat_near_zero_amplitude():
    w = wigner_cat(1e-3, "odd")
    assert fidelity(w, wigner_fock(1)) == pytest.approx(1.0, abs=1e-5)


def test_identity_channel(states):
    w = states["2"]
    assert np.array_equal(propagate(w, 1.0, 0.0).values, w.values)


def test_vacuum_through_gaussian_channel():
    # vacuum with gain g and noise v becomes a Gaussian of variance g^2/2 + v
    out = propagate(wigner_fock(0), math.sqrt(0.8), 0.3)
    ref = gaussian_state(0.8 * 0.5 + 0.3)
    assert np.max(np.abs(out.values - ref.values)) < 1e-5


def test_vacuum_fidelity_closed_form():
    for t, v in [(0.9, 0.1), (1.0, 0.5), (0.5, 0.25)]:
        f = fidelity(wigner_fock(0), propagate(wigner_fock(0), math.sqrt(t), v))
        assert f == pytest.approx(1 / (0.5 + 0.5 * t + v), abs=1e-5)


def test_phase_rotation_of_cat():
    w = wigner_cat(2.0)
    rot = propagate(w, 1.0, 0.0, phase=math.pi)
    assert np.max(np.abs(rot.values - w.values)) < 1e-4


def test_negativity_vanishes_at_vacuum_noise(states):
    for w in states.values():
        assert negativity(propagate(w, 0.9, 0.5 + 1e-3)) == 0.0


def test_errors(states):
    with pytest.raises(InvalidParameter):
        wigner_fock(21)
    with pytest.raises(InvalidParameter):
        wigner_cat(7.0)
    with pytest.raises(GridTooCoarse):
        propagate(states["2"], 1.0, 8.0)
    with pytest.raises(GridTooCoarse):
        wigner_fock(2, extent=8, npts=9)
    with pytest.raises(GridMismatch):
        fidelity(states["0"], wigner_fock(0, npts=257))


def test_wider_grid_holds_large_noise():
    e, n = grid_for_noise(8.0)
    assert n % 2 == 1 and e > 8
    w = wigner_fock(2, e, n)
    assert propagate(w, 1.0, 8.0).integrate() == pytest.approx(1.0, abs=1e-4)
