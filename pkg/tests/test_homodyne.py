import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fbtransducer.homodyne import (PulseSpec, homodyne_couplings, light_gains, photocurrent_spectrum_pulse,
                                   rectangular_duration, rectangular_modeshape, vacuum_channels, vacuum_spectrum,
                                   vacuum_total)
from fbtransducer.params import ReducedParams, preset_reduced


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-2, 1e7), st.floats(0, 50), st.floats(0.05, 20), st.floats(0.05, 20), st.floats(-50, 50))
def test_light_sum_rule(cl, cmp, beta, h, x):
    r = ReducedParams(cl=cl, cmp=cmp, beta=beta)
    e = homodyne_couplings(r, h)
    T = light_gains(r, x * e.gamma_prime, h).transmissions()
    assert abs(T["T_aa"] + T["T_ba"] + T["T_ca"] - 1) < 1e-10


def test_gains_ignore_cavity_losses():
    r = preset_reduced("fig6")
    lossy = r.with_(eta_l=0.8, eta_m=0.7, eta_d=0.6)
    d = np.linspace(-3e3, 3e3, 7)
    assert np.allclose(light_gains(r, d, 2.0).t_ca, light_gains(lossy, d, 2.0).t_ca)


@pytest.mark.parametrize("h", [0.01, 0.3, 1.0, 2.0, 4.0, 50.0])
def test_three_forms_agree(h):
    r = preset_reduced("fig6")
    d = np.linspace(-5, 5, 101) * homodyne_couplings(r, h).gamma_prime
    g = vacuum_total(r, d, h)
    assert np.allclose(vacuum_total(r, d, h, "h0"), g, atol=1e-12)
    assert np.allclose(vacuum_total(r, d, h, "hinf"), g, atol=1e-12)
    assert np.allclose(vacuum_channels(r, d, h)["total"], g, atol=1e-12)


def test_small_gain_limit():
    # h -> 0 without electromechanics: 1/2 + 8 C (1/2 + nbar + C) L with L a Lorentzian of width Gamma
    r = ReducedParams(cl=2.0, cmp=0.0, nbar=3.0)
    h = 1e-9
    d = np.linspace(-3, 3, 13)
    lor = 1 / (1 + 4 * d ** 2)
    ref = 0.5 + 8 * r.cl * (0.5 + r.nbar + r.cl) * lor
    assert np.allclose(vacuum_total(r, d, h), ref, rtol=1e-6)


def test_large_gain_limit():
    r = ReducedParams(cl=2.0, cmp=0.0, nbar=3.0)
    h = 1e9
    gp = homodyne_couplings(r, h).gamma_prime
    d = np.linspace(-3, 3, 13) * gp
    ref = 0.5 - 0.5 / (1 + 4 * d ** 2 / gp ** 2)
    assert np.allclose(vacuum_total(r, d, h), ref, atol=1e-6)


def test_squashing_needs_gain_above_one():
    r = preset_reduced("fig6")
    d = np.linspace(-5, 5, 2001) * homodyne_couplings(r, 4.0).gamma_prime
    assert vacuum_spectrum(r, d, 1.0)["total"].values.min() >= 0.5
    assert vacuum_spectrum(r, d, 2.0)["total"].values.min() < 0.499


def test_pulse_spectrum():
    r = preset_reduced("fig6")
    e = homodyne_couplings(r, 1.0)
    d = np.linspace(-3, 3, 601) * e.gamma_prime
    vac = photocurrent_spectrum_pulse(r, d, PulseSpec(0.0, 0.5))
    sq = photocurrent_spectrum_pulse(r, d, PulseSpec(0.0, 0.1))
    assert np.allclose(vac.values, 0.5 + 0.5 * r.nbar * light_gains(r, d, 1.0).transmissions()["T_ba"])
    i0 = np.argmin(np.abs(d))
    assert sq.values[i0] < vac.values[i0]
    assert sq.values[0] == pytest.approx(vac.values[0], abs=1e-3)


def test_rectangular_pulse_width():
    t = rectangular_duration(2.0)
    w = np.linspace(-3, 3, 60001)
    x2 = rectangular_modeshape(w, 0.0, t, 1e9) ** 2
    above = w[x2 >= 0.5 * x2.max()]
    assert above.max() - above.min() == pytest.approx(2.0, abs=1e-3)


def test_broad_pulse_warns():
    r = preset_reduced("fig6")
    with pytest.warns(UserWarning):
        photocurrent_spectrum_pulse(r, None, PulseSpec(0.0, 0.2, duration=1e-6))
    with pytest.raises(ValueError):
        PulseSpec(0.0, -1.0)
