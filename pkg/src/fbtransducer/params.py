"""Parameter records, unit handling and the feedback-dressed effective couplings.

Two parameterisations are supported. ``PhysicalParams`` stores angular rates in
rad/s. ``ReducedParams`` stores the dimensionless set every formula actually
depends on; in reduced mode all rates are measured in units of the bare
mechanical damping Gamma (so Gamma = 1 and Omega = quality).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, fields, replace

from .errors import CriticalCoupling, InvalidParameter, UnknownPreset

TWO_PI = 2.0 * math.pi
CRITICAL_TOL = 1e-9
# regime thresholds below which a RegimeWarning is raised (formulas still evaluate)
MIN_QUALITY = 10.0


class RegimeWarning(UserWarning):
    """Parameters outside the high-Q / sideband-resolved validity regime."""


def _check_eff(name, value):
    if not (0.0 <= value <= 1.0):
        raise InvalidParameter(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class PhysicalParams:
    omega: float      # mechanical angular frequency, rad/s
    gamma: float      # bare mechanical energy decay rate, rad/s
    kappa_l: float    # optical cavity decay rate, rad/s
    kappa_m: float    # microwave cavity decay rate, rad/s
    g_l: float        # boosted optomechanical coupling, rad/s
    g_m: float        # boosted electromechanical coupling, rad/s
    nbar: float = 0.0
    eta_l: float = 1.0
    eta_m: float = 1.0
    eta_d: float = 1.0
    h_gain: float = 1.0

    def __post_init__(self):
        for name in ("omega", "gamma", "kappa_l", "kappa_m", "g_l"):
            if not getattr(self, name) > 0:
                raise InvalidParameter(f"{name} must be > 0")
        if self.g_m < 0:
            raise InvalidParameter("g_m must be >= 0")
        if self.nbar < 0:
            raise InvalidParameter("nbar must be >= 0")
        if not self.h_gain > 0:
            raise InvalidParameter("h_gain must be > 0")
        for name in ("eta_l", "eta_m", "eta_d"):
            _check_eff(name, getattr(self, name))
        if self.omega / self.gamma < MIN_QUALITY:
            warnings.warn("mechanical Q = Omega/Gamma below 10", RegimeWarning, stacklevel=2)
        if self.kappa_m >= self.omega:
            warnings.warn("microwave cavity not sideband resolved (kappa_m >= Omega)",
                          RegimeWarning, stacklevel=2)

    @classmethod
    def from_hz(cls, **kw):
        """Build from ordinary frequencies; keys ending in ``_hz`` are multiplied by 2*pi."""
        out = {}
        for k, v in kw.items():
            if k.endswith("_hz"):
                out[k[:-3]] = TWO_PI * float(v)
            else:
                out[k] = v
        return cls(**out)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ReducedParams:
    cl: float              # optomechanical cooperativity C_L
    cmp: float = 1.0       # dressed electromechanical cooperativity C_M'
    beta: float = 1.0      # linewidth ratio Gamma'/kappa_M
    eta_l: float = 1.0
    eta_m: float = 1.0
    eta_d: float = 1.0
    nbar: float = 0.0
    h_gain: float = 1.0
    quality: float = 1e7   # bare mechanical Q = Omega/Gamma; only sets Omega and tau

    def __post_init__(self):
        if not self.cl > 0:
            raise InvalidParameter("cl must be > 0")
        if self.cmp < 0:
            raise InvalidParameter("cmp must be >= 0")
        if not self.beta > 0:
            raise InvalidParameter("beta must be > 0")
        if self.nbar < 0:
            raise InvalidParameter("nbar must be >= 0")
        if not self.h_gain > 0:
            raise InvalidParameter("h_gain must be > 0")
        if not self.quality > 0:
            raise InvalidParameter("quality must be > 0")
        for name in ("eta_l", "eta_m", "eta_d"):
            _check_eff(name, getattr(self, name))

    def with_(self, **kw) -> "ReducedParams":
        return replace(self, **kw)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class EffectiveCouplings:
    lambda_l: float
    sigma: int
    g_sym: float
    gamma_prime: float   # units of Gamma (reduced) or rad/s (physical)
    eta_b: float
    eta_om: float
    eta_ol: float
    eps: float
    tau: float           # quarter-cycle delay pi/(2 Omega)
    q_prime: float       # Omega / Gamma'
    kappa_m: float
    g_m: float
    omega: float

    @property
    def two_mode_squeezing(self) -> bool:
        # undercoupled branch: the transferred operator is a creation operator
        return self.sigma < 0

    def to_dict(self):
        return asdict(self)


def lambda_factor(eta_l, tol=CRITICAL_TOL):
    if abs(eta_l - 0.5) < tol:
        raise CriticalCoupling(
            f"eta_l = {eta_l} is within {tol} of 1/2; the symmetrising feedback gain diverges")
    return eta_l / abs(2.0 * eta_l - 1.0)


def _effective(cl, cmp, beta, eta_l, eta_d, h, gamma, omega, tol):
    lam = lambda_factor(eta_l, tol)
    sigma = 1 if eta_l > 0.5 else -1
    denom = 1.0 + 4.0 * h * lam * cl
    gp = gamma * denom
    kappa_m = gp / beta
    return EffectiveCouplings(
        lambda_l=lam,
        sigma=sigma,
        g_sym=8.0 * cl * math.sqrt(eta_l) / abs(2.0 * eta_l - 1.0),
        gamma_prime=gp,
        eta_b=1.0 / denom,
        eta_om=4.0 * h * eta_l * cl / denom,
        eta_ol=4.0 * h * cl * (lam - sigma * eta_l) / denom,
        eps=math.sqrt((1.0 - eta_d) / eta_d) if eta_d > 0 else math.inf,
        tau=math.pi / (2.0 * omega),
        q_prime=omega / gp,
        kappa_m=kappa_m,
        g_m=0.5 * math.sqrt(cmp * gp * kappa_m),
        omega=omega,
    )


def derive_effective(p, tol=CRITICAL_TOL) -> EffectiveCouplings:
    """Feedback-dressed quantities for either parameterisation.

    Reduced input gives rates in units of Gamma; physical input gives rad/s.
    """
    if isinstance(p, PhysicalParams):
        r = to_reduced(p, tol=tol)
        return _effective(r.cl, r.cmp, r.beta, r.eta_l, r.eta_d, r.h_gain,
                          p.gamma, p.omega, tol)
    if isinstance(p, ReducedParams):
        return _effective(p.cl, p.cmp, p.beta, p.eta_l, p.eta_d, p.h_gain,
                          1.0, p.quality, tol)
    raise TypeError(f"expected PhysicalParams or ReducedParams, got {type(p).__name__}")


def to_reduced(p: PhysicalParams, tol=CRITICAL_TOL) -> ReducedParams:
    cl = 4.0 * p.g_l ** 2 / (p.gamma * p.kappa_l)
    lam = lambda_factor(p.eta_l, tol)
    gp = p.gamma * (1.0 + 4.0 * p.h_gain * lam * cl)
    return ReducedParams(
        cl=cl,
        cmp=4.0 * p.g_m ** 2 / (gp * p.kappa_m),
        beta=gp / p.kappa_m,
        eta_l=p.eta_l, eta_m=p.eta_m, eta_d=p.eta_d,
        nbar=p.nbar, h_gain=p.h_gain,
        quality=p.omega / p.gamma,
    )


def to_physical(r: ReducedParams, omega: float, kappa_l: float, tol=CRITICAL_TOL) -> PhysicalParams:
    """Inverse of ``to_reduced`` given the two rates the reduced form forgets."""
    gamma = omega / r.quality
    lam = lambda_factor(r.eta_l, tol)
    gp = gamma * (1.0 + 4.0 * r.h_gain * lam * r.cl)
    kappa_m = gp / r.beta
    return PhysicalParams(
        omega=omega, gamma=gamma, kappa_l=kappa_l, kappa_m=kappa_m,
        g_l=0.5 * math.sqrt(r.cl * gamma * kappa_l),
        g_m=0.5 * math.sqrt(r.cmp * gp * kappa_m),
        nbar=r.nbar, eta_l=r.eta_l, eta_m=r.eta_m, eta_d=r.eta_d, h_gain=r.h_gain,
    )


# -- presets -----------------------------------------------------------------

OMEGA_LAB = TWO_PI * 1e6       # 1 MHz mechanical mode
KAPPA_L_LAB = TWO_PI * 10e6    # bad optical cavity, kappa_L = 10 Omega (not used by any formula)

_PRESETS = {
    # eta_l, eta_m, eta_d, nbar, C_L, C_M', beta, Q
    "gold_square": dict(eta_l=0.95, eta_m=0.98, eta_d=0.85, nbar=1e3, cl=1e4, cmp=1.0, beta=1.0, quality=1e7),
    "gold_star": dict(eta_l=0.98, eta_m=0.98, eta_d=0.96, nbar=1e3, cl=1e5, cmp=1.0, beta=1.0, quality=1e8),
    "fig6": dict(eta_l=1.0, eta_m=1.0, eta_d=1.0, nbar=100.0, cl=500.0, cmp=1.0, beta=1.0, quality=1e7),
    "fig2_grid": dict(eta_l=1.0, eta_m=1.0, eta_d=1.0, nbar=0.0, cl=1e4, cmp=1.0, beta=1.0, quality=1e7),
    # C_L / nbar = 10 with lossless couplings: the fidelity benchmark
    "unit_efficiency": dict(eta_l=1.0, eta_m=1.0, eta_d=1.0, nbar=1e3, cl=1e4, cmp=1.0, beta=1.0, quality=1e7),
    # coherent-feedback loop, lossless cavities, realistic detection
    "reverse_demo": dict(eta_l=1.0, eta_m=1.0, eta_d=0.85, nbar=1e3, cl=1e5, cmp=1.0, beta=1.0, quality=1e7),
}

# Values of the figure grid behind the transmission panels.
FIG2_BETAS = (0.1, 1.0, 10.0)
FIG2_CMPS = (0.5, 1.0, 10.0)


def preset_names():
    return sorted(_PRESETS)


def preset_reduced(name: str) -> ReducedParams:
    try:
        return ReducedParams(**_PRESETS[name])
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {preset_names()}") from None


def preset(name: str) -> PhysicalParams:
    """Lab-unit parameter set for a named figure configuration."""
    return to_physical(preset_reduced(name), OMEGA_LAB, KAPPA_L_LAB)
