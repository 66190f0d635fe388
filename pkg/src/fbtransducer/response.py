"""Susceptibilities and the ideal (infinite optomechanical cooperativity) gain.

All frequencies here are detunings ``delta`` from the upper mechanical
sideband: the mechanical susceptibility is sampled at Omega + delta and the
microwave one at delta. Rates use the units of ``derive_effective``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .params import EffectiveCouplings, ReducedParams, derive_effective


@dataclass(frozen=True)
class Susceptibilities:
    chi_b: complex        # chi_b(Omega + delta)
    chi_c: complex        # chi_c(delta)
    chi_b_em: complex     # chi_b,EM(Omega + delta)
    chi_c_em: complex     # chi_c,EM(delta)
    chi_cross: complex    # chi_<->(delta)


@dataclass
class SpectrumSeries:
    omega: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.values = np.asarray(self.values)
        if self.omega.ndim != 1 or self.values.shape[0] != self.omega.shape[0]:
            raise ValueError("values must have one sample per omega")
        if self.omega.size > 1 and not np.all(np.diff(self.omega) > 0):
            raise ValueError("omega grid must be strictly increasing")


def _eff(r, eff):
    return derive_effective(r) if eff is None else eff


def susceptibilities(r: ReducedParams, delta, eff: EffectiveCouplings | None = None) -> Susceptibilities:
    e = _eff(r, eff)
    d = np.asarray(delta, dtype=float)
    chi_b = 1.0 / (e.gamma_prime / 2 - 1j * d)
    chi_c = 1.0 / (e.kappa_m / 2 - 1j * d)
    g2 = e.g_m ** 2
    dress = 1.0 + g2 * chi_b * chi_c
    return Susceptibilities(
        chi_b=chi_b,
        chi_c=chi_c,
        chi_b_em=chi_b / dress,
        chi_c_em=chi_c / dress,
        chi_cross=e.g_m * chi_b * chi_c / dress,
    )


def ideal_gain(r: ReducedParams, delta, eff: EffectiveCouplings | None = None):
    """t_inf(delta); |t_inf|^2 is the ideal transmission."""
    e = _eff(r, eff)
    d = np.asarray(delta, dtype=float)
    cm = r.cmp
    return -2.0 * math.sqrt(cm) / (cm + (1 - 2j * d / e.gamma_prime) * (1 - 2j * d / e.kappa_m))


def ideal_transmission(r, delta, eff=None):
    return np.abs(ideal_gain(r, delta, eff)) ** 2


def optimal_detunings(r: ReducedParams, eff: EffectiveCouplings | None = None,
                      beta_tol=1e-9, t_tol=1e-9) -> list[float]:
    """Detunings with unit ideal transmission, by the two closed-form constructions."""
    e = _eff(r, eff)
    cands = []
    if abs(r.cmp - 1.0) < 1e-12:
        cands = [0.0]
    elif abs(r.beta - 1.0) < beta_tol and r.cmp > 1.0:
        w = 0.5 * e.gamma_prime * math.sqrt(r.cmp - 1.0)
        cands = [-w, w]
    return [w for w in cands if abs(ideal_transmission(r, w, e) - 1.0) < t_tol]


def matched_detuning(r: ReducedParams, eff: EffectiveCouplings | None = None) -> float:
    """Operating detuning for 'matched transfer'.

    Zero when it is optimal, otherwise the positive closed-form solution. When
    no unity point exists the transmission maximum is used instead.
    """
    e = _eff(r, eff)
    opts = optimal_detunings(r, e)
    if opts:
        return 0.0 if 0.0 in opts else max(opts)
    warnings.warn("no unit-transmission detuning; using the transmission maximum", stacklevel=2)
    span = max(e.gamma_prime, e.kappa_m, 2 * e.g_m) * 5
    res = minimize_scalar(lambda w: -ideal_transmission(r, w, e), bounds=(0.0, span),
                          method="bounded", options={"xatol": 1e-12 * span})
    return float(res.x) if -res.fun > ideal_transmission(r, 0.0, e) else 0.0


def default_grid(r: ReducedParams, eff: EffectiveCouplings | None = None, n=2001):
    e = _eff(r, eff)
    span = max(5 * e.gamma_prime, 5 * e.kappa_m, 3 * e.g_m)
    return np.linspace(-span, span, n)


def transmission_spectrum(r: ReducedParams, grid=None, eff=None) -> SpectrumSeries:
    e = _eff(r, eff)
    w = default_grid(r, e) if grid is None else np.asarray(grid, dtype=float)
    return SpectrumSeries(w, ideal_transmission(r, w, e),
                          meta={"quantity": "T_inf", "beta": r.beta, "cmp": r.cmp,
                                "gamma_prime": e.gamma_prime, "kappa_m": e.kappa_m,
                                "frequency": "detuning from upper mechanical sideband"})
