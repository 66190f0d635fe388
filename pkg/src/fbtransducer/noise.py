"""Added-noise budget, quantum transfer witness and T-V traces.

Variances use the convention vacuum = 1/2 per quadrature. A narrowband input
pulse at detuning delta sees an added variance equal to the noise spectrum
sampled at delta.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import CriticalCoupling
from .forward import forward_gains
from .params import EffectiveCouplings, ReducedParams, derive_effective
from .response import ideal_transmission, matched_detuning

LOSS_AXES = ("eta_l", "eta_m", "eta_d")


@dataclass(frozen=True)
class NoiseBudget:
    v_opt: float
    v_mech: float
    v_mw: float
    v_det: float
    v_total: float
    omega: float
    t_ac: float   # transmission |t_ac|^2 at omega

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class WitnessReport:
    w_t: float
    w_t_min: float     # forbidden-region expression |gXgY-1|^2/(|gXgY|+1)^2
    w_t_floor: float   # square root of the above, the bound implied by vq_floor
    vq_floor: float    # uncertainty floor |1-gXgY|^2/4 on vX*vY
    g_x: float
    g_y: float
    v_x_add: float
    v_y_add: float

    def to_dict(self):
        return asdict(self)


def optical_loss_density(lam, h):
    """Mean quadrature variance of the squeezed loss mode, >= 1/2."""
    x = 2.0 * h * lam
    return 0.25 * (x + 1.0 / x)


def noise_budget(r: ReducedParams, delta=None, eff: EffectiveCouplings | None = None) -> NoiseBudget:
    e = derive_effective(r) if eff is None else eff
    if delta is None:
        delta = matched_detuning(r, e)
    tinf = float(ideal_transmission(r, delta, e))
    em, h = r.eta_m, r.h_gain
    v_opt = em * e.eta_ol * optical_loss_density(e.lambda_l, h) * tinf if e.eta_ol > 0 else 0.0
    v_mech = 0.5 * em * e.eta_b * (2 * r.nbar + 1) * tinf
    v_mw = 0.5 * (1 - em * tinf)
    if r.eta_d < 1:
        v_det = em * e.eta_om / (2 * r.eta_l - 1) ** 2 * (1 - r.eta_d) / r.eta_d * h / 4 * tinf
    else:
        v_det = 0.0
    return NoiseBudget(v_opt, v_mech, v_mw, v_det, v_opt + v_mech + v_mw + v_det,
                       float(delta), em * e.eta_om * tinf)


def added_variance(r: ReducedParams, delta=None, eff=None) -> float:
    """Added variance per quadrature for a pulse narrow compared to the transfer bandwidth."""
    return noise_budget(r, delta, eff).v_total


# -- quadrature-resolved path -----------------------------------------------
# Each input reaches the microwave sideband through the frequency components
# at -Omega and +Omega. The sideband quadratures are
#   X+ = 1/2 [X(w-O) + X(w+O) - iY(w-O) + iY(w+O)]
#   Y+ = 1/2 [Y(w-O) + Y(w+O) + iX(w-O) - iX(w+O)]
# Only intra-sideband pairs (w-O with w'+O) survive at high Q'. For phase
# insensitive inputs the density of both is (S_X + S_Y)/2.

_SIDEBAND_TERMS = {
    "X": (("X", -1, 0.5), ("X", +1, 0.5), ("Y", -1, -0.5j), ("Y", +1, 0.5j)),
    "Y": (("Y", -1, 0.5), ("Y", +1, 0.5), ("X", -1, 0.5j), ("X", +1, -0.5j)),
}


def sideband_density(sx: float, sy: float, quadrature: str) -> float:
    """Spectral density of the +Omega sideband quadrature of a stationary input.

    ``sx``/``sy`` are the flat quadrature densities of the input, which has no
    X-Y correlation.
    """
    dens = {"X": sx, "Y": sy}
    total = 0j
    # <Q+(w) Q+(-w)>: a component at w - O pairs with the one at -w + O, whose
    # coefficient in Q+(-w) equals the +O entry of the table
    for qa, sa, ca in _SIDEBAND_TERMS[quadrature]:
        for qb, sb, cb in _SIDEBAND_TERMS[quadrature]:
            if qa == qb and sa == -sb:
                total += ca * cb * dens[qa]
    return float(total.real)


def quadrature_noise(r: ReducedParams, delta, quadrature="X", eff=None) -> float:
    """Added noise in one output quadrature, summed channel by channel from the gains."""
    e = derive_effective(r) if eff is None else eff
    g = forward_gains(r, delta, e)
    T = {k: float(v) for k, v in g.transmissions().items()}
    x = 2.0 * r.h_gain * e.lambda_l
    s_loss = sideband_density(0.5 / x, 0.5 * x, quadrature) if x > 0 else 0.0
    s_mech = sideband_density(r.nbar + 0.5, r.nbar + 0.5, quadrature)
    s_vac = sideband_density(0.5, 0.5, quadrature)
    # the detection vacuum enters as one real quadrature at both sidebands
    s_det = 0.5
    return (T["T_alc"] * s_loss + T["T_bc"] * s_mech
            + (T["T_cc"] + T["T_clc"]) * s_vac + T["T_vc"] * s_det)


# -- witness -----------------------------------------------------------------

def transfer_witness(g_x: float, g_y: float, v_x_add: float, v_y_add: float) -> WitnessReport:
    if v_x_add < 0 or v_y_add < 0:
        raise ValueError("added variances must be non-negative")
    gg = abs(g_x * g_y)
    w = math.sqrt(4 * v_x_add * v_y_add) / (gg + 1)
    diff = abs(g_x * g_y - 1)
    return WitnessReport(
        w_t=w,
        w_t_min=diff ** 2 / (gg + 1) ** 2,
        w_t_floor=diff / (gg + 1),
        vq_floor=diff ** 2 / 4,
        g_x=g_x, g_y=g_y, v_x_add=v_x_add, v_y_add=v_y_add,
    )


def witness_from_budget(b: NoiseBudget) -> WitnessReport:
    g = math.sqrt(b.t_ac)
    return transfer_witness(g, g, b.v_total, b.v_total)


def evaluate_point(r: ReducedParams) -> dict:
    """T_ac, V_add and W_T at matched transfer."""
    b = noise_budget(r)
    w = witness_from_budget(b)
    return {"T_ac": b.t_ac, "V_add": b.v_total, "W_T": w.w_t, "budget": b}


# -- sweeps ------------------------------------------------------------------

def tv_trace(base: ReducedParams, axis: str, samples=None, n=91, low=0.1):
    """Parametric (T_ac, V_add, W_T) curve sweeping one efficiency down from its base."""
    if axis not in LOSS_AXES:
        raise ValueError(f"axis must be one of {LOSS_AXES}")
    if samples is None:
        samples = np.linspace(getattr(base, axis), low, n)
    rows = []
    for v in samples:
        v = float(v)
        tick = abs(v * 10 - round(v * 10)) < 1e-9
        try:
            p = evaluate_point(base.with_(**{axis: v}))
        except CriticalCoupling:
            rows.append({"loss_value": v, "T_ac": math.nan, "V_add": math.nan,
                         "W_T": math.nan, "tick": tick, "flag": "critical_coupling"})
            continue
        rows.append({"loss_value": v, "T_ac": p["T_ac"], "V_add": p["V_add"],
                     "W_T": p["W_T"], "tick": tick, "flag": ""})
    return rows


def find_crossing(base: ReducedParams, axis: str, quantity: str, level: float,
                  lo: float, hi: float) -> float:
    """Efficiency at which ``quantity`` ('W_T' or 'V_add') equals ``level``."""
    def f(v):
        return evaluate_point(base.with_(**{axis: v}))[quantity] - level
    return brentq(f, lo, hi, xtol=1e-12)


def witness_map(base: ReducedParams, eta_l_values, eta_m_values):
    """W_T over a grid of optical and microwave extraction efficiencies (rows: eta_l)."""
    out = np.full((len(eta_l_values), len(eta_m_values)), np.nan)
    for i, el in enumerate(eta_l_values):
        for j, em in enumerate(eta_m_values):
            try:
                out[i, j] = evaluate_point(base.with_(eta_l=float(el), eta_m=float(em)))["W_T"]
            except CriticalCoupling:
                pass
    return out


def noise_sweep(base: ReducedParams, ratios):
    """Noise components versus C_L / nbar at fixed nbar."""
    rows = []
    for x in ratios:
        b = noise_budget(base.with_(cl=float(x) * base.nbar))
        rows.append({"cl_over_nbar": float(x), "V_opt": b.v_opt, "V_mech": b.v_mech,
                     "V_mw": b.v_mw, "V_det": b.v_det, "V_total": b.v_total, "T_ac": b.t_ac})
    return rows
