"""Optical-to-microwave transfer gains including coupling and detection losses."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import EffectiveCouplings, ReducedParams, derive_effective
from .response import ideal_gain, susceptibilities

CHANNELS = ("t_ac", "t_alc", "t_bc", "t_cc", "t_clc", "t_vc")


@dataclass(frozen=True)
class TransferGains:
    t_ac: complex   # transferred optical input a_in^T
    t_alc: complex  # optical loss port a_l^T
    t_bc: complex   # mechanical bath
    t_cc: complex   # microwave input (reflection)
    t_clc: complex  # microwave loss port
    t_vc: complex   # detection vacuum Y_L,v (classical noise channel)

    def transmissions(self) -> dict:
        return {name.replace("t_", "T_"): np.abs(getattr(self, name)) ** 2 for name in CHANNELS}


def forward_gains(r: ReducedParams, delta, eff: EffectiveCouplings | None = None) -> TransferGains:
    e = derive_effective(r) if eff is None else eff
    tinf = ideal_gain(r, delta, e)
    chi = susceptibilities(r, delta, e)
    em = r.eta_m
    # sigma/(2 eta_L - 1) == 1/|2 eta_L - 1|
    vac = e.eps * math.sqrt(r.h_gain / 2) / abs(2 * r.eta_l - 1) if r.eta_d < 1 else 0.0
    return TransferGains(
        t_ac=math.sqrt(em * e.eta_om) * tinf,
        t_alc=math.sqrt(em * e.eta_ol) * tinf,
        t_bc=1j * math.sqrt(em * e.eta_b) * tinf,
        t_cc=1 - em * e.kappa_m * chi.chi_c_em,
        t_clc=-math.sqrt(em * (1 - em)) * e.kappa_m * chi.chi_c_em,
        t_vc=-1j * math.sqrt(em * e.eta_om) * vac * tinf,
    )


def sum_rule_residual(g: TransferGains, sigma: int):
    """Commutator check sigma*T_ac + T_alc + T_bc + T_cc + T_clc - 1.

    t_vc is left out on purpose: the detection vacuum enters only through a
    single commuting quadrature and carries no commutator weight.
    """
    T = g.transmissions()
    return sigma * T["T_ac"] + T["T_alc"] + T["T_bc"] + T["T_cc"] + T["T_clc"] - 1.0


def max_transmission(r: ReducedParams) -> float:
    """High-cooperativity limit of T_ac at matched transfer."""
    if r.eta_l == 0:
        return 0.0
    return r.eta_m * abs(2 * r.eta_l - 1)
