"""Microwave-to-optical transfer with coherent optical feedback.

Only the no-squeezing reverse configuration s = 1 is public. The forward
cooperativity ratio of the loop is then h = s * eta_d, which sets the
effective couplings used for t_aa, t_ba and t_ca. Cavity coupling losses are
outside the model: eta_L = eta_M = 1 is required.

``delta`` is the detuning of the optical output from the upper mechanical
sideband; the microwave input is sampled at the same ``delta`` about its
cavity resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .homodyne import homodyne_couplings, light_gains
from .params import ReducedParams

INPUTS = ("X_in", "Y_in", "X_v", "Y_v", "b_in", "c_in")


@dataclass(frozen=True)
class ReverseChannel:
    s_ratio: float
    delta: float
    coefficients: dict = field(default_factory=dict)
    noise: float = 0.0

    def magnitudes(self):
        return {k: abs(v) for k, v in self.coefficients.items()}


def gain_ratios(c1: float, c2: float, eta_d: float):
    """Forward ratio h and reverse ratio s of a loop with cooperativities C_1, C_2."""
    return math.sqrt(eta_d * c2 / c1), math.sqrt(c2 / (eta_d * c1))


def _check_scope(r: ReducedParams):
    if r.eta_l != 1.0 or r.eta_m != 1.0:
        raise InvalidParameter("reverse transfer is modelled for eta_l = eta_m = 1 only")
    if not r.eta_d > 0:
        raise InvalidParameter("eta_d must be > 0")


def _gains(r: ReducedParams, delta, s=1.0):
    g = light_gains(r, delta, s * r.eta_d)
    return g.t_aa, g.t_ba, g.t_ca


def loop_phase(r: ReducedParams, delta):
    """e^{i omega tau} at optical frequency Omega + delta; tau is a quarter mechanical period."""
    e = homodyne_couplings(r, r.eta_d)
    return np.exp(1j * (e.omega + np.asarray(delta, dtype=float)) * e.tau)


def reverse_coefficients(r: ReducedParams, delta) -> dict:
    """Prefactors of each input in the optical output (quadratures for the optical ports)."""
    _check_scope(r)
    ed = r.eta_d
    ta, tb, tc = _gains(r, delta)
    ph = loop_phase(r, delta)
    rt2 = math.sqrt(2)
    return {
        "X_in": ph * math.sqrt(ed) * (ed - 1 + ta) / (ed * rt2),
        "Y_in": 1j * ph * math.sqrt(ed) * ta / rt2,
        "X_v": -ph * math.sqrt(1 - ed) / rt2,
        "Y_v": -1j * ph * math.sqrt(1 - ed) * ta / rt2,
        "b_in": tb,
        "c_in": -1j * tc,
    }


def reverse_added_noise(r: ReducedParams, delta) -> float:
    """Added noise per quadrature: optical, mechanical and feedback-loss parts."""
    _check_scope(r)
    ed = r.eta_d
    e = homodyne_couplings(r, ed)
    ta, tb, _ = _gains(r, delta)
    tb2 = np.abs(tb) ** 2
    return (0.5 * np.abs(ta) ** 2 + (r.nbar + 0.5) * tb2
            + (1 - ed) / (4 * ed) * e.eta_om * tb2 / e.eta_b)


def reverse_channel(r: ReducedParams, delta=0.0) -> ReverseChannel:
    d = float(delta)
    c = {k: complex(v) for k, v in reverse_coefficients(r, d).items()}
    return ReverseChannel(1.0, d, c, float(reverse_added_noise(r, d)))


def high_cooperativity_limit(eta_d: float) -> float:
    return (1.0 / eta_d - 1.0) / 4.0


def exchanged_noise(t_self, t_bath, eta_om, eta_b, eta_d, nbar):
    """Noise expression shared by both directions once a and c are exchanged."""
    tb2 = np.abs(t_bath) ** 2
    return 0.5 * np.abs(t_self) ** 2 + (nbar + 0.5) * tb2 + (1 - eta_d) / (4 * eta_d) * eta_om * tb2 / eta_b


# -- sideband-resolved decomposition ----------------------------------------
# The output sideband quadrature at Omega is
#   Q_theta(delta) = [e^{-i theta} a_out(Omega+delta) + e^{i theta} a_out(Omega-delta)^dag] / sqrt(2).
# A quadrature input with prefactors (p, q) contributes (p - i q)/sqrt(2) to
# a(Omega+delta) and (p + i q)/sqrt(2) to a(-Omega-delta)^dag. Only annihilation
# parts pick up vacuum fluctuations; thermal ports add nbar to both parts.

def quadrature_output_noise(r: ReducedParams, delta, quadrature="X") -> float:
    """Output noise of one quadrature minus the transferred microwave vacuum, port by port."""
    d = float(delta)
    rot = {"X": 1.0, "Y": -1j}[quadrature]   # e^{-i theta}
    cp = reverse_coefficients(r, d)
    cm = reverse_coefficients(r, -d)
    total = 0.0
    for port in ("in", "v"):
        p, q = complex(cp["X_" + port]), complex(cp["Y_" + port])
        pm, qm = complex(cm["X_" + port]), complex(cm["Y_" + port])
        w_plus = rot * (p - 1j * q) / 2
        w_minus = np.conj(rot) * np.conj(pm + 1j * qm) / 2
        total += abs(w_plus) ** 2 + abs(w_minus) ** 2
    w_plus = rot * complex(cp["b_in"]) / math.sqrt(2)
    w_minus = np.conj(rot) * np.conj(complex(cm["b_in"])) / math.sqrt(2)
    total += (r.nbar + 1) * abs(w_plus) ** 2 + r.nbar * abs(w_minus) ** 2
    return float(total)


def bogoliubov_form(r: ReducedParams, delta, s=1.0) -> dict:
    """(annihilation, creation) prefactors of each port for reverse ratio ``s``.

    Written in the Bogoliubov modes matched to ``s``; the feedback gain is h = s*eta_d.
    """
    _check_scope(r)
    ed = r.eta_d
    ta, tb, tc = _gains(r, delta, s)
    ph = loop_phase(r, delta)
    return {
        "a1": (ph * math.sqrt(ed) * (ed - 1 + (1 + ed) * ta) / (2 * ed),
               ph * math.sqrt(ed) * (1 - ed) * (ta - 1) / (2 * ed)),
        "v": (-ph * math.sqrt(1 - ed) * (ta + 1) / 2, ph * math.sqrt(1 - ed) * (ta - 1) / 2),
        "b": (tb, 0.0),
        "c": (-1j * tc, 0.0),
    }


def commutator_norm(r: ReducedParams, delta, s=1.0):
    """[a_out, a_out^dag] weight; equals 1 for a properly normalised output."""
    return sum(np.abs(a) ** 2 - np.abs(b) ** 2 for a, b in bogoliubov_form(r, delta, s).values())


def light_gain_norm(r: ReducedParams, delta, s=1.0):
    ta, tb, tc = _gains(r, delta, s)
    return np.abs(ta) ** 2 + np.abs(tb) ** 2 + np.abs(tc) ** 2
