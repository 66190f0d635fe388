"""Monte Carlo check of the analytic microwave output spectrum.

The electromechanical pair is integrated as a classical linear SDE in the
frame rotating at the sideband, using Euler-Maruyama. The mechanics is driven
by the pre-reduced feedback drive: independent complex white noises for the
thermal bath, the transferred optical input, the optical loss port and the
detection vacuum. For a linear system with Gaussian inputs the symmetrised
spectra of this classical model coincide with the quantum ones.

A complex white noise of per-quadrature density s has E|dW|^2 = s dt. Time is
in units of 1/Gamma (the reduced-parameter unit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import welch

from .errors import InvalidParameter, TooFewSegments, UnstableStep
from .forward import forward_gains
from .noise import noise_budget, optical_loss_density
from .params import ReducedParams, derive_effective
from .response import SpectrumSeries

STABILITY_BOUND = 0.05
MIN_SEGMENTS = 8
BLOCK = 4096


@dataclass(frozen=True)
class SimConfig:
    params: ReducedParams
    seed: int = 0
    dt: float | None = None        # None -> dt_factor / max rate
    dt_factor: float = 0.02
    nperseg: int = 2048
    n_segments: int = 4096         # Welch segments summed over chains
    chains: int = 64               # independent realisations run side by side
    burn_in: float = 20.0          # in units of 1/min(Gamma', kappa_M)
    keep_internal: bool = False    # also store b and c (memory heavy)

    def rates(self):
        e = derive_effective(self.params)
        return e.gamma_prime, e.kappa_m, e.g_m

    def step(self) -> float:
        gp, km, gm = self.rates()
        return self.dt if self.dt is not None else self.dt_factor / max(gp, km, 2 * gm)

    def steps_per_chain(self) -> int:
        per_chain = math.ceil(self.n_segments / self.chains)
        # Welch with 50% overlap gives 2N/nperseg - 1 segments
        return (per_chain + 1) * self.nperseg // 2

    def burn_steps(self) -> int:
        gp, km, _ = self.rates()
        return int(math.ceil(self.burn_in / min(gp, km) / self.step()))

    @property
    def duration(self) -> float:
        return self.steps_per_chain() * self.step()

    def validate(self):
        gp, km, gm = self.rates()
        if self.step() * max(gp, km, 2 * gm) >= STABILITY_BOUND:
            raise UnstableStep(f"dt * max rate must be < {STABILITY_BOUND}")
        if self.duration < 50 / min(gp, km):
            raise InvalidParameter("duration must be at least 50 / min(Gamma', kappa_M)")
        if self.chains < 1 or self.nperseg < 16:
            raise InvalidParameter("need at least one chain and nperseg >= 16")
        p = self.params
        if p.eta_l <= 0.5:
            raise InvalidParameter("the oracle covers the overcoupled branch eta_l > 1/2 only")
        if p.h_gain != 1.0:
            raise InvalidParameter("the oracle assumes unit feedback gain (vacuum transferred mode)")


@dataclass
class TraceBundle:
    dt: float
    c_out: np.ndarray               # shape (steps, chains)
    b: np.ndarray | None = None
    c: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


def drive_densities(r: ReducedParams) -> dict:
    """(weight, density) of each noise entering sqrt(Gamma') b_drv."""
    e = derive_effective(r)
    det = e.eta_om * (e.eps ** 2) * r.h_gain / (2 * (2 * r.eta_l - 1) ** 2) if r.eta_d < 1 else 0.0
    return {
        "bath": (e.eta_b, r.nbar + 0.5),
        "optical": (e.eta_om, 0.5),
        "optical_loss": (e.eta_ol, optical_loss_density(e.lambda_l, r.h_gain) if e.eta_ol > 0 else 0.0),
        "detection": (det, 0.5),
    }


def steady_mechanical_variance(r: ReducedParams) -> float:
    """Symmetrised <|b|^2> of the undriven-by-microwave mechanics (g_M = 0)."""
    return sum(w * s for w, s in drive_densities(r).values())


def _cnoise(rng, shape, var):
    """Complex Gaussian samples with E|z|^2 = var."""
    z = rng.standard_normal(shape + (2,))
    return math.sqrt(var / 2) * (z[..., 0] + 1j * z[..., 1])


def simulate(cfg: SimConfig, b0=0.0, c0=0.0, zero_noise=False) -> TraceBundle:
    cfg.validate()
    r = cfg.params
    gp, km, gm = cfg.rates()
    dt = cfg.step()
    drive = drive_densities(r)
    rng = np.random.default_rng(cfg.seed)
    n_burn, n_keep = cfg.burn_steps(), cfg.steps_per_chain()
    total = n_burn + n_keep
    m = cfg.chains
    em = r.eta_m
    a_in, a_loss = math.sqrt(em * km), math.sqrt((1 - em) * km)
    scale = math.sqrt(2 * (steady_mechanical_variance(r) + 1.0))

    b = np.full(m, b0, dtype=complex)
    c = np.full(m, c0, dtype=complex)
    out = np.empty((n_keep, m), dtype=complex)
    keep_b = np.empty((n_keep, m), dtype=complex) if cfg.keep_internal else None
    keep_c = np.empty((n_keep, m), dtype=complex) if cfg.keep_internal else None
    decay_b, decay_c = 1 - gp * dt / 2, 1 - km * dt / 2
    igdt = 1j * gm * dt
    sq_gp = math.sqrt(gp)

    k = 0
    while k < total:
        n = min(BLOCK, total - k)
        if zero_noise:
            db = np.zeros((n, m), complex)
            dc_in = np.zeros((n, m), complex)
            dc_loss = np.zeros((n, m), complex)
        else:
            # independent drive components, drawn in a fixed order for reproducibility
            db = sum(math.sqrt(w) * _cnoise(rng, (n, m), s * dt) for w, s in drive.values())
            dc_in = _cnoise(rng, (n, m), 0.5 * dt)
            dc_loss = _cnoise(rng, (n, m), 0.5 * dt)
        for j in range(n):
            idx = k + j - n_burn
            c_prev = c
            b, c = (decay_b * b + igdt * c + sq_gp * db[j],
                    decay_c * c + igdt * b + a_in * dc_in[j] + a_loss * dc_loss[j])
            if idx >= 0:
                # the cavity field is taken at the step midpoint; with this choice the
                # discrete bare-cavity reflection is exactly all-pass
                out[idx] = dc_in[j] / dt - a_in * 0.5 * (c_prev + c)
                if keep_b is not None:
                    keep_b[idx] = b
                    keep_c[idx] = c
        k += n
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(c))) \
                or max(np.abs(b).max(), np.abs(c).max()) > 1e6 * max(scale, abs(b0), abs(c0), 1.0):
            raise UnstableStep("trajectory diverged; reduce dt")
    return TraceBundle(dt, out, keep_b, keep_c,
                       meta={"seed": cfg.seed, "chains": m, "steps": n_keep, "burn_in_steps": n_burn})


def welch_psd(trace: TraceBundle, quadrature: str = "avg", cfg: SimConfig | None = None) -> SpectrumSeries:
    """Two-sided Hann/50%-overlap PSD of an output quadrature, vacuum = 1/2.

    ``quadrature`` is 'X', 'Y' or 'avg' (mean of both). Frequencies are
    angular detunings.
    """
    nperseg = cfg.nperseg if cfg is not None else 2048
    n = trace.c_out.shape[0]
    per_chain = 2 * n // nperseg - 1 if n >= nperseg else 0
    n_seg = per_chain * trace.c_out.shape[1]
    if n_seg < MIN_SEGMENTS:
        raise TooFewSegments(f"{n_seg} Welch segments; need at least {MIN_SEGMENTS}")
    quads = {"X": [np.real], "Y": [np.imag], "avg": [np.real, np.imag]}[quadrature]
    fs = 1.0 / trace.dt
    acc = 0.0
    for q in quads:
        x = math.sqrt(2) * q(trace.c_out)
        f, p = welch(x, fs=fs, window="hann", nperseg=nperseg, noverlap=nperseg // 2,
                     return_onesided=False, scaling="density", detrend=False, axis=0)
        acc = acc + p.mean(axis=1)
    psd = acc / len(quads)
    order = np.argsort(f)
    return SpectrumSeries(2 * math.pi * f[order], psd[order],
                          meta={"segments": n_seg, "quadrature": quadrature, "nperseg": nperseg})


def analytic_output_spectrum(r: ReducedParams, grid) -> SpectrumSeries:
    """Added noise plus the transferred optical vacuum, S^noise + T_ac/2."""
    e = derive_effective(r)
    vals = []
    for d in np.asarray(grid, dtype=float):
        b = noise_budget(r, d, e)
        vals.append(b.v_total + 0.5 * b.t_ac)
    return SpectrumSeries(grid, np.array(vals), meta={"quantity": "S[X_M,out]"})


def channel_sum_spectrum(r: ReducedParams, grid) -> np.ndarray:
    """Same spectrum summed from the transfer gains (cross-check for the above)."""
    e = derive_effective(r)
    g = forward_gains(r, np.asarray(grid, dtype=float), e)
    T = g.transmissions()
    dens = drive_densities(r)
    return (0.5 * T["T_ac"] + dens["optical_loss"][1] * T["T_alc"] + (r.nbar + 0.5) * T["T_bc"]
            + 0.5 * (T["T_cc"] + T["T_clc"] + T["T_vc"]))


@dataclass(frozen=True)
class DeviationReport:
    max_rel: float
    rms_rel: float
    band: tuple
    tolerance: float
    passed: bool
    points: int

    def to_dict(self):
        return {"max_rel": self.max_rel, "rms_rel": self.rms_rel, "band": list(self.band),
                "tolerance": self.tolerance, "passed": self.passed, "points": self.points}


def compare(analytic: SpectrumSeries, mc: SpectrumSeries, band, tolerance=0.05) -> DeviationReport:
    """Relative deviation of ``mc`` from ``analytic`` (interpolated) over ``band``; RMS is tested."""
    lo, hi = band
    sel = (mc.omega >= lo) & (mc.omega <= hi)
    if not np.any(sel):
        raise ValueError("no Monte Carlo samples inside the band")
    ref = np.interp(mc.omega[sel], analytic.omega, np.real(analytic.values))
    rel = (np.real(mc.values[sel]) - ref) / ref
    rms = float(np.sqrt(np.mean(rel ** 2)))
    return DeviationReport(float(np.max(np.abs(rel))), rms, (float(lo), float(hi)),
                           tolerance, rms <= tolerance, int(sel.sum()))


def validate(r: ReducedParams, seed=0, band_kappas=3.0, tolerance=0.05, **cfg_kw):
    """Simulate, estimate and compare; returns (report, mc, analytic)."""
    cfg = SimConfig(r, seed=seed, **cfg_kw)
    tr = simulate(cfg)
    mc = welch_psd(tr, "avg", cfg)
    km = derive_effective(r).kappa_m
    band = (-band_kappas * km, band_kappas * km)
    sel = (mc.omega >= band[0]) & (mc.omega <= band[1])
    an = analytic_output_spectrum(r, mc.omega[sel])
    return compare(an, mc, band, tolerance), mc, an
