"""What the feedback photocurrent reveals: input-to-light gains and homodyne spectra.

Frequencies are detunings ``delta`` from the upper mechanical sideband, so the
photocurrent frequency is Omega + delta. The derivation assumes a perfectly
overcoupled optical cavity; the gains here are therefore evaluated with
eta_L = 1 whatever the record says, and ignore eta_M and eta_d. C_M' and beta
are held fixed when the feedback gain h changes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .params import ReducedParams, derive_effective
from .response import SpectrumSeries, default_grid, ideal_gain, susceptibilities

# half-maximum point of sinc^2 (normalised sinc), in units of its argument
_SINC2_HALF = brentq(lambda x: np.sinc(x) ** 2 - 0.5, 0.1, 0.9, xtol=1e-15)


@dataclass(frozen=True)
class LightGains:
    t_aa: complex
    t_ba: complex
    t_ca: complex

    def transmissions(self):
        return {"T_aa": np.abs(self.t_aa) ** 2, "T_ba": np.abs(self.t_ba) ** 2,
                "T_ca": np.abs(self.t_ca) ** 2}


def homodyne_couplings(r: ReducedParams, h=None):
    """Effective couplings of the homodyne derivation (eta_L = 1) at gain ``h``."""
    h = r.h_gain if h is None else h
    return derive_effective(r.with_(eta_l=1.0, h_gain=float(h)))


def light_gains(r: ReducedParams, delta, h=None) -> LightGains:
    e = homodyne_couplings(r, h)
    chi = susceptibilities(r, delta, e)
    gx = e.gamma_prime * chi.chi_b_em
    return LightGains(
        t_aa=1 - e.eta_om * gx,
        t_ba=math.sqrt(e.eta_om * e.eta_b) * gx,
        t_ca=math.sqrt(e.eta_om) * ideal_gain(r, delta, e),
    )


# -- pulse input, h = 1 ------------------------------------------------------

@dataclass(frozen=True)
class PulseSpec:
    delta_p: float          # pulse centre, detuning from the upper sideband
    b_theta_var: float      # <B_theta^2> of the pulse quadrature; 1/2 for vacuum or coherent
    duration: float | None = None   # rectangular pulse length; None -> FWHM of Gamma'/10
    shape: np.ndarray | None = None  # explicit x(omega) samples, overrides the rectangle

    def __post_init__(self):
        if self.b_theta_var < 0:
            raise ValueError("b_theta_var must be >= 0")
        if self.duration is not None and not self.duration > 0:
            raise ValueError("duration must be > 0")


def rectangular_duration(fwhm: float) -> float:
    """Length of a rectangular pulse whose power spectrum has the given FWHM (rad/time)."""
    return 4 * math.pi * _SINC2_HALF / fwhm


def rectangular_modeshape(delta, delta_p, duration, omega):
    """x(omega) of a rectangular pulse, including the small mirror term at -omega_p."""
    w = omega + np.asarray(delta, dtype=float)
    wp = omega + delta_p
    return 0.5 * np.abs(np.sinc(duration * (w - wp) / (2 * math.pi))
                        + np.sinc(duration * (w + wp) / (2 * math.pi)))


def photocurrent_spectrum_pulse(r: ReducedParams, grid=None, pulse: PulseSpec | None = None) -> SpectrumSeries:
    """Single-sided photocurrent spectrum at unit gain with a pulse in the optical input."""
    e = homodyne_couplings(r, 1.0)
    w = default_grid(r, e) if grid is None else np.asarray(grid, dtype=float)
    pulse = PulseSpec(0.0, 0.5) if pulse is None else pulse
    T = light_gains(r, w, 1.0).transmissions()
    if pulse.shape is not None:
        x = np.asarray(pulse.shape, dtype=float)
        if x.shape != w.shape:
            raise ValueError("pulse shape must be sampled on the grid")
        dur = None
    else:
        dur = pulse.duration or rectangular_duration(e.gamma_prime / 10)
        fwhm = 4 * math.pi * _SINC2_HALF / dur
        if fwhm > 0.25 * min(e.gamma_prime, e.kappa_m):
            warnings.warn("pulse is not narrow compared with the transfer bandwidth", stacklevel=2)
        x = rectangular_modeshape(w, pulse.delta_p, dur, e.omega)
    t_aa_p = float(light_gains(r, pulse.delta_p, 1.0).transmissions()["T_aa"])
    s = 0.5 + 0.5 * r.nbar * T["T_ba"] + t_aa_p * x * (pulse.b_theta_var - 0.5)
    return SpectrumSeries(w, s, meta={"quantity": "S[Y_L,out]", "h": 1.0, "T_aa(delta_p)": t_aa_p,
                                      "delta_p": pulse.delta_p, "b_theta_var": pulse.b_theta_var,
                                      "duration": dur})


# -- vacuum input, arbitrary gain -------------------------------------------

def vacuum_channels(r: ReducedParams, delta, h=None) -> dict:
    """Per-source contributions to the symmetrised vacuum spectrum at positive frequency."""
    h = r.h_gain if h is None else float(h)
    e = homodyne_couplings(r, h)
    T = light_gains(r, delta, h).transmissions()
    eb = e.eta_b
    opt = ((1 + h * h) / (8 * h * h) * (T["T_aa"] + 1)
           - (1 - h * h) / (8 * h * h) * (2 - T["T_ba"] / eb - T["T_ca"]))
    mech = (2 * r.nbar + 1) * T["T_ba"] / (4 * h)
    mw = T["T_ca"] / (4 * h)
    return {"optical": opt, "mechanical": mech, "microwave": mw, "total": opt + mech + mw}


def vacuum_total(r: ReducedParams, delta, h=None, form="general"):
    """Total symmetrised vacuum spectrum in one of three algebraically equal forms.

    ``general`` is the direct sum; ``h0`` stays accurate as h -> 0 and ``hinf``
    as h -> infinity.
    """
    h = r.h_gain if h is None else float(h)
    e = homodyne_couplings(r, h)
    d = np.asarray(delta, dtype=float)
    tinf = np.abs(ideal_gain(r, d, e)) ** 2
    # (1+u^2) T_inf / C_M' written without the division so C_M' = 0 works
    gx2 = np.abs(e.gamma_prime * susceptibilities(r, d, e).chi_b_em) ** 2
    cl, nb = r.cl, r.nbar
    if form == "general":
        T = light_gains(r, d, h).transmissions()
        eb = e.eta_b
        return (0.25 + T["T_aa"] / 4 + T["T_ca"] / (4 * h)
                + (1 - eb - h * h + eb * h * (h + 4 * nb + 2)) / (8 * h * h * eb) * T["T_ba"])
    if form == "h0":
        eb = e.eta_b
        return (0.5 + ((4 * cl + 1) * eb - 1) / 4 * tinf
                + (4 * cl * (0.5 + nb + cl) - 2 * h * cl * (1 + 2 * h * cl)) * eb ** 2 * gx2 / 2)
    if form == "hinf":
        eo2 = e.eta_om ** 2
        return (0.5 - (1 - 1 / h) * e.eta_om * tinf / 4 - eo2 * gx2 / 8
                + ((0.5 + nb + cl) / h - 0.5) / (h * cl) * eo2 * gx2 / 8)
    raise ValueError("form must be 'general', 'h0' or 'hinf'")


def vacuum_spectrum(r: ReducedParams, grid=None, h=None) -> dict:
    """Optical, mechanical, microwave and total vacuum spectra as SpectrumSeries."""
    h = r.h_gain if h is None else float(h)
    e = homodyne_couplings(r, h)
    w = default_grid(r, e) if grid is None else np.asarray(grid, dtype=float)
    parts = vacuum_channels(r, w, h)
    meta = {"h": h, "gamma_prime": e.gamma_prime, "kappa_m": e.kappa_m,
            "frequency": "detuning from upper mechanical sideband"}
    return {k: SpectrumSeries(w, v, meta={**meta, "channel": k}) for k, v in parts.items()}


def lorentzian(delta, width):
    """Unit-peak Lorentzian with full width ``width``."""
    return 1.0 / (1.0 + (2 * np.asarray(delta, dtype=float) / width) ** 2)
