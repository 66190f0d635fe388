import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fbtransducer.errors import CriticalCoupling
from fbtransducer.noise import (find_crossing, noise_budget, noise_sweep, optical_loss_density, quadrature_noise,
                                sideband_density, transfer_witness, tv_trace, witness_map)
from fbtransducer.params import ReducedParams, derive_effective, preset_reduced


def test_gold_square_budget():
    b = noise_budget(preset_reduced("gold_square"))
    assert b.t_ac == pytest.approx(0.88198, abs=1e-5)
    assert b.v_total == pytest.approx(0.14459, abs=1e-5)
    assert b.v_total == pytest.approx(b.v_opt + b.v_mech + b.v_mw + b.v_det)


def test_lossless_budget_is_mechanical_only():
    r = ReducedParams(cl=1e4, nbar=1e3)
    b = noise_budget(r)
    assert b.v_opt == b.v_det == 0.0
    assert b.v_mech == pytest.approx((2 * r.nbar + 1) / (2 * (1 + 4 * r.cl)) * 1.0)


def test_loss_density_minimum_is_vacuum():
    assert optical_loss_density(1.0, 0.5) == pytest.approx(0.5)
    assert optical_loss_density(3.0, 1.0) > 0.5


@pytest.mark.parametrize("q", ["X", "Y"])
def test_sideband_density_of_thermal_input(q):
    assert sideband_density(2.0, 2.0, q) == pytest.approx(2.0)
    assert sideband_density(0.1, 2.5, q) == pytest.approx(1.3)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.55, 1.0), st.floats(0.05, 1.0), st.floats(0.2, 1.0), st.floats(1.0, 1e6), st.floats(0, 1e3))
def test_quadrature_path_matches_budget(el, em, ed, cl, nbar):
    r = ReducedParams(cl=cl, eta_l=el, eta_m=em, eta_d=ed, nbar=nbar)
    b = noise_budget(r)
    for q in "XY":
        assert quadrature_noise(r, b.omega, q) == pytest.approx(b.v_total, rel=1e-9, abs=1e-14)


def test_witness_definitions():
    w = transfer_witness(0.5, 0.5, 0.3, 0.3)
    assert w.w_t == pytest.approx(0.6 / 1.25)
    assert w.w_t_floor == pytest.approx(0.75 / 1.25)
    assert w.w_t_min == pytest.approx(w.w_t_floor ** 2)
    assert w.vq_floor == pytest.approx(0.75 ** 2 / 4)
    # a channel sitting on the uncertainty floor reaches w_t_floor, not w_t_min
    v = math.sqrt(w.vq_floor)
    assert transfer_witness(0.5, 0.5, v, v).w_t == pytest.approx(w.w_t_floor)
    with pytest.raises(ValueError):
        transfer_witness(1, 1, -0.1, 0.1)


def test_identity_and_vacuum_channels():
    assert transfer_witness(1, 1, 0, 0).w_t == 0
    # replace the input with vacuum: g = 0, V = 1/2
    assert transfer_witness(0, 0, 0.5, 0.5).w_t == pytest.approx(1.0)


def test_tv_trace_flags_critical_point():
    rows = tv_trace(ReducedParams(cl=1e4, nbar=1), "eta_l", samples=[0.9, 0.5, 0.3])
    assert [r["flag"] for r in rows] == ["", "critical_coupling", ""]
    assert math.isnan(rows[1]["W_T"])
    assert all(r["tick"] for r in rows)


def test_tv_trace_axis_check():
    with pytest.raises(ValueError):
        tv_trace(ReducedParams(cl=1), "nbar")


def test_crossing_and_map():
    base = ReducedParams(cl=1e7, nbar=1e3)
    x = find_crossing(base, "eta_d", "W_T", 1.0, 0.05, 0.99)
    assert x == pytest.approx(0.2, abs=1e-3)
    m = witness_map(base, [0.5, 0.9, 1.0], [0.5, 1.0])
    assert np.isnan(m[0]).all() and np.all(m[1:] < 1)


def test_noise_sweep_rows():
    rows = noise_sweep(preset_reduced("gold_square"), [1.0, 10.0])
    assert rows[1]["cl_over_nbar"] == 10.0
    assert rows[1]["V_total"] == pytest.approx(noise_budget(preset_reduced("gold_square")).v_total)
    assert rows[0]["V_mech"] > rows[1]["V_mech"]
