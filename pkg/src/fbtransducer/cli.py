"""Command-line scenario runner.

Every subcommand resolves a parameter set (preset, then JSON config, then
numeric flags), writes its tables and reports into ``--out`` and finishes
with a run manifest. Failures print a JSON error object to stderr and exit
with status 2.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

import numpy as np

from . import params as P
from .errors import InvalidParameter, TransducerError
from .io import RunManifest, figure, save_svg, write_csv, write_json

FORMATS = ("csv", "json", "svg", "all")

# default preset per command
DEFAULT_PRESET = {
    "transmission": "fig2_grid",
    "noise-sweep": "gold_square",
    "fidelity": "unit_efficiency",
    "negativity": "gold_square",
    "tv-diagram": "gold_square",
    "witness-map": "gold_square",
    "homodyne-gains": "fig6",
    "homodyne-spectrum": "fig6",
    "reverse": "reverse_demo",
    "entanglement": "gold_square",
    "oracle-validate": "fig6",
    "presets": None,
}


class Run:
    """Output bookkeeping for one command invocation."""

    def __init__(self, args, r):
        self.args = args
        self.r = r
        self.out = args.out
        os.makedirs(self.out, exist_ok=True)
        fmt = args.format
        self.want = {"csv": fmt in ("csv", "all"), "json": fmt in ("json", "all", "csv"),
                     "svg": fmt in ("svg", "all")}
        self.manifest = RunManifest(args.command, r.to_dict() if r is not None else {},
                                    seed=getattr(args, "seed", None))

    def path(self, name):
        return os.path.join(self.out, name)

    def csv(self, name, header, rows):
        if self.want["csv"]:
            self.manifest.add(write_csv(self.path(name), header, rows))

    def json(self, name, obj):
        if self.want["json"]:
            self.manifest.add(write_json(self.path(name), obj))

    def svg(self, name, draw):
        if self.want["svg"]:
            plt = figure()
            fig, ax = plt.subplots(figsize=(6, 4))
            draw(ax)
            fig.tight_layout()
            self.manifest.add(save_svg(fig, self.path(name)))

    def finish(self, summary):
        path = self.manifest.write(self.out)
        print(json.dumps({"command": self.args.command, "manifest": path, **summary},
                         sort_keys=True, default=float))
        return 0


# -- parameter resolution ----------------------------------------------------

def resolve_params(args) -> P.ReducedParams:
    cfg = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    name = args.preset or cfg.get("preset") or DEFAULT_PRESET[args.command]
    base = P.preset_reduced(name).to_dict()
    extra = set(cfg.get("params", {})) - set(P.ReducedParams.field_names())
    if extra:
        raise InvalidParameter(f"unknown parameter(s) in config: {sorted(extra)}")
    base.update(cfg.get("params", {}))
    for f in P.ReducedParams.field_names():
        v = getattr(args, f, None)
        if v is not None:
            base[f] = v
    args.options = {k: v for k, v in cfg.items() if k not in ("preset", "params")}
    args.preset_name = name
    return P.ReducedParams(**base)


def option(args, key, default):
    """Command option from the flag, else the config file, else ``default``."""
    v = getattr(args, key, None)
    if v is not None:
        return v
    return args.options.get(key, default)


# -- commands ----------------------------------------------------------------

def cmd_transmission(args, run: Run):
    from .params import derive_effective
    from .response import default_grid, ideal_transmission, optimal_detunings

    def curve(r):
        e = derive_effective(r)
        grid = np.union1d(default_grid(r, e), optimal_detunings(r, e))
        return e, grid, ideal_transmission(r, grid, e)

    if option(args, "grid", False):
        rows, peaks = [], []
        for beta in P.FIG2_BETAS:
            for cmp in P.FIG2_CMPS:
                r = run.r.with_(beta=beta, cmp=cmp)
                e, w, t = curve(r)
                rows += [(beta, cmp, d, d / e.gamma_prime, v) for d, v in zip(w, t)]
                peaks.append({"beta": beta, "cmp": cmp, "T_max": float(t.max()),
                              "optimal_detunings": optimal_detunings(r, e)})
        run.csv("transmission_grid.csv", ["beta", "cmp", "delta", "delta_over_gamma_prime", "T_inf"], rows)
        run.json("transmission.json", {"params": run.r.to_dict(), "panels": peaks})
        return run.finish({"panels": len(peaks)})
    e, w, t = curve(run.r)
    run.csv("transmission.csv", ["delta", "delta_over_gamma_prime", "T_inf"],
            zip(w, w / e.gamma_prime, t))
    opts = optimal_detunings(run.r, e)
    k = int(np.argmax(t))
    report = {"params": run.r.to_dict(), "gamma_prime": e.gamma_prime, "kappa_m": e.kappa_m,
              "T_max": float(t[k]), "delta_at_max": float(w[k]), "optimal_detunings": opts,
              "optimal_over_gamma_prime": [o / e.gamma_prime for o in opts]}
    run.json("transmission.json", report)

    def draw(ax):
        ax.plot(w / e.gamma_prime, t)
        ax.set_xlabel("detuning / Gamma'")
        ax.set_ylabel("T_inf")
    run.svg("transmission.svg", draw)
    return run.finish({"T_max": report["T_max"]})


def cmd_noise_sweep(args, run: Run):
    from .noise import noise_budget, noise_sweep
    lo, hi, n = option(args, "ratio_range", [-2.0, 3.0, 101])
    rows = noise_sweep(run.r, np.logspace(lo, hi, int(n)))
    keys = ["cl_over_nbar", "V_opt", "V_mech", "V_mw", "V_det", "V_total", "T_ac"]
    run.csv("noise_sweep.csv", keys, ([row[k] for k in keys] for row in rows))
    b = noise_budget(run.r)
    report = {"params": run.r.to_dict(), "budget": b.to_dict(), "vacuum_ratio": 0.5 / b.v_total}
    run.json("noise_sweep.json", report)

    def draw(ax):
        x = [row["cl_over_nbar"] for row in rows]
        for k in keys[1:6]:
            ax.loglog(x, [max(row[k], 1e-12) for row in rows], label=k)
        ax.axhline(0.5, ls=":", c="k")
        ax.set_xlabel("C_L / nbar")
        ax.legend(fontsize=7)
    run.svg("noise_sweep.svg", draw)
    return run.finish({"vacuum_ratio": report["vacuum_ratio"], "v_total": b.v_total})


STATES = ("fock0", "fock1", "fock2", "cat2")


def _states(npts, v_add=0.0):
    from .wigner import grid_for_noise, wigner_cat, wigner_fock
    ext, n = grid_for_noise(v_add, npts=npts)
    return {"fock0": wigner_fock(0, ext, n), "fock1": wigner_fock(1, ext, n),
            "fock2": wigner_fock(2, ext, n), "cat2": wigner_cat(2.0, "even", ext, n)}


def _ratio_grid(args, default):
    vals = option(args, "ratios", None)
    return sorted(set(float(v) for v in (vals if vals is not None else default)))


def cmd_fidelity(args, run: Run):
    from .noise import noise_budget
    from .wigner import fidelity, propagate
    npts = int(option(args, "grid_points", 513))
    names = STATES
    ratios = _ratio_grid(args, list(np.round(np.logspace(-1, 2, 13), 6)) + [0.25, 0.5, 10.0])
    rows, at = [], {}
    for x in ratios:
        b = noise_budget(run.r.with_(cl=x * run.r.nbar))
        g = math.sqrt(b.t_ac)
        for name, w in _states(npts, b.v_total).items():
            f = fidelity(w, propagate(w, g, b.v_total))
            rows.append((x, name, b.t_ac, b.v_total, f))
            at.setdefault(x, {})[name] = f
    run.csv("fidelity.csv", ["cl_over_nbar", "state", "T_ac", "V_add", "F"], rows)
    report = {"params": run.r.to_dict(), "fidelity": {str(k): v for k, v in at.items()}}
    run.json("fidelity.json", report)

    def draw(ax):
        for name in names:
            ax.semilogx(ratios, [at[x][name] for x in ratios], label=name)
        ax.axhline(0.5, ls=":", c="k")
        ax.set_xlabel("C_L / nbar")
        ax.set_ylabel("F")
        ax.legend(fontsize=7)
    run.svg("fidelity.svg", draw)
    return run.finish({"fidelity_at_base": at.get(run.r.cl / run.r.nbar) if run.r.nbar else None})


def cmd_negativity(args, run: Run):
    from .noise import noise_budget
    from .wigner import negativity, propagate
    npts = int(option(args, "grid_points", 513))
    states = {k: v for k, v in _states(npts).items() if k != "fock0"}
    pure = {k: negativity(w) for k, w in states.items()}
    ratios = _ratio_grid(args, list(np.round(np.logspace(-1, 2, 13), 6)) + [run.r.cl / run.r.nbar])
    rows, at = [], {}
    for x in ratios:
        b = noise_budget(run.r.with_(cl=x * run.r.nbar))
        g = math.sqrt(b.t_ac)
        grown = {k: v for k, v in _states(npts, b.v_total).items() if k != "fock0"}
        for name, w in grown.items():
            n = negativity(propagate(w, g, b.v_total))
            rows.append((x, name, b.t_ac, b.v_total, n, n / pure[name]))
            at.setdefault(x, {})[name] = n / pure[name]
    run.csv("negativity.csv", ["cl_over_nbar", "state", "T_ac", "V_add", "N", "N_over_N_pure"], rows)
    # output Wigner functions at the base point (every 4th sample) for the insets
    b = noise_budget(run.r)
    for name, w in states.items():
        o = propagate(w, math.sqrt(b.t_ac), b.v_total)
        X, Y = o.mesh()
        s = slice(None, None, 4)
        run.csv(f"wigner_{name}.csv", ["X", "Y", "W"],
                zip(X[s, s].ravel(), Y[s, s].ravel(), o.values[s, s].ravel()))
    base = at[run.r.cl / run.r.nbar]
    run.json("negativity.json", {"params": run.r.to_dict(), "pure": pure, "ratio_at_base": base,
                                 "ratio": {str(k): v for k, v in at.items()}})

    def draw(ax):
        for name in states:
            ax.semilogx(ratios, [at[x][name] for x in ratios], label=name)
        ax.set_xlabel("C_L / nbar")
        ax.set_ylabel("N / N_pure")
        ax.legend(fontsize=7)
    run.svg("negativity.svg", draw)
    return run.finish({"ratio_at_base": base})


def cmd_tv_diagram(args, run: Run):
    from .noise import LOSS_AXES, find_crossing, tv_trace
    step = float(option(args, "step", 0.01))
    samples = np.round(np.arange(1.0, -1e-12, -step), 10)
    rows, traces = [], {}
    for axis in LOSS_AXES:
        tr = tv_trace(run.r, axis, samples=samples[samples > 0])
        traces[axis] = tr
        rows += [(axis, t["loss_value"], t["T_ac"], t["V_add"], t["W_T"], t["tick"], t["flag"]) for t in tr]
    run.csv("tv_diagram.csv", ["axis", "loss_value", "T_ac", "V_add", "W_T", "tick", "flag"], rows)
    crossings = {}
    for axis, tr in traces.items():
        c = {}
        ok = [t for t in tr if t["flag"] == ""]
        for q, level in (("W_T", 1.0), ("V_add", 0.5)):
            c[q] = None
            # samples run from high to low efficiency; take the first sign change
            for a, b in zip(ok, ok[1:]):
                if (a[q] - level) * (b[q] - level) <= 0 and a[q] != b[q]:
                    c[q] = find_crossing(run.r, axis, q, level, b["loss_value"], a["loss_value"])
                    break
        crossings[axis] = c
    run.json("tv_diagram.json", {"params": run.r.to_dict(), "crossings": crossings,
                                 "flagged": [r[:2] for r in rows if r[-1]]})

    def draw(ax):
        t = np.linspace(1e-3, 1, 200)
        for axis, tr in traces.items():
            ok = [p for p in tr if p["flag"] == ""]
            ax.plot([p["T_ac"] for p in ok], [p["V_add"] for p in ok], label=axis)
            ax.plot([p["T_ac"] for p in ok if p["tick"]], [p["V_add"] for p in ok if p["tick"]], "k.", ms=3)
        ax.plot(t, (t + 1) / 2, "w--", label="W_T = 1")
        ax.fill_between(t, 0, np.abs(1 - t) / 2, color="0.6", label="forbidden")
        ax.axhline(0.5, ls=":", c="k")
        ax.set_facecolor("0.15")
        ax.set_xlabel("T_ac")
        ax.set_ylabel("V_add")
        ax.legend(fontsize=7)
    run.svg("tv_diagram.svg", draw)
    return run.finish({"crossings": crossings})


def cmd_witness_map(args, run: Run):
    from .noise import witness_map
    n = int(option(args, "points", 101))
    el = np.linspace(0.0, 1.0, n)
    em = np.linspace(0.0, 1.0, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        w = witness_map(run.r, el, em)
    rows = [(el[i], em[j], w[i, j]) for i in range(n) for j in range(n)]
    run.csv("witness_map.csv", ["eta_l", "eta_m", "W_T"], rows)
    run.json("witness_map.json", {"params": run.r.to_dict(),
                                  "fraction_below_one": float(np.nanmean(w < 1)),
                                  "nan_points": int(np.isnan(w).sum())})

    def draw(ax):
        im = ax.pcolormesh(em, el, np.log10(w), shading="auto", cmap="RdBu_r", vmin=-2, vmax=2)
        ax.contour(em, el, w, levels=[1.0], colors="k")
        ax.set_xlabel("eta_M")
        ax.set_ylabel("eta_L")
        ax.figure.colorbar(im, ax=ax, label="log10 W_T")
    run.svg("witness_map.svg", draw)
    return run.finish({"points": n * n})


def cmd_homodyne_gains(args, run: Run):
    from .homodyne import PulseSpec, homodyne_couplings, light_gains, photocurrent_spectrum_pulse
    from .response import default_grid
    e = homodyne_couplings(run.r, 1.0)
    grid = default_grid(run.r, e)
    T = light_gains(run.r, grid, 1.0).transmissions()
    run.csv("homodyne_gains.csv", ["delta", "T_aa", "T_ba", "T_ca", "sum"],
            zip(grid, T["T_aa"], T["T_ba"], T["T_ca"], T["T_aa"] + T["T_ba"] + T["T_ca"]))
    pulse = PulseSpec(float(option(args, "pulse_delta", 0.0)), float(option(args, "b_theta_var", 0.5)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        s = photocurrent_spectrum_pulse(run.r, grid, pulse)
    run.csv("photocurrent_pulse.csv", ["delta", "S"], zip(s.omega, s.values))
    run.json("homodyne_gains.json", {"params": run.r.to_dict(), "h": 1.0,
                                     "max_sum_rule_error": float(np.max(np.abs(
                                         T["T_aa"] + T["T_ba"] + T["T_ca"] - 1))),
                                     "pulse": s.meta})

    def draw(ax):
        for k, v in T.items():
            ax.plot(grid / e.gamma_prime, v, label=k)
        ax.set_xlabel("detuning / Gamma'")
        ax.legend(fontsize=7)
    run.svg("homodyne_gains.svg", draw)
    return run.finish({})


def cmd_homodyne_spectrum(args, run: Run):
    from .homodyne import homodyne_couplings, vacuum_spectrum
    hs = [float(h) for h in option(args, "h_values", [1.0, 2.0, 4.0])]
    e1 = homodyne_couplings(run.r, max(hs))
    grid = np.linspace(-5 * e1.gamma_prime, 5 * e1.gamma_prime, 2001)
    rows, mins, spectra = [], {}, {}
    for h in hs:
        sp = vacuum_spectrum(run.r, grid, h)
        spectra[h] = sp
        rows += [(h, d, o, m, w, t) for d, o, m, w, t in zip(
            grid, sp["optical"].values, sp["mechanical"].values, sp["microwave"].values, sp["total"].values)]
        mins[str(h)] = float(sp["total"].values.min())
    run.csv("homodyne_spectrum.csv", ["h", "delta", "optical", "mechanical", "microwave", "total"], rows)
    run.json("homodyne_spectrum.json", {"params": run.r.to_dict(), "min_total": mins,
                                        "squashing": {k: v < 0.5 for k, v in mins.items()}})

    def draw(ax):
        for h, sp in spectra.items():
            ax.plot(grid / e1.gamma_prime, sp["total"].values, label=f"h = {h:g}")
        ax.axhline(0.5, ls=":", c="k")
        ax.set_xlabel("detuning / Gamma'(h_max)")
        ax.set_ylabel("symmetrised spectrum")
        ax.legend(fontsize=7)
    run.svg("homodyne_spectrum.svg", draw)
    return run.finish({"min_total": mins})


def cmd_reverse(args, run: Run):
    from .homodyne import homodyne_couplings
    from .reverse import INPUTS, high_cooperativity_limit, reverse_added_noise, reverse_channel, reverse_coefficients
    from .response import default_grid
    e = homodyne_couplings(run.r, run.r.eta_d)
    grid = default_grid(run.r, e)
    co = reverse_coefficients(run.r, grid)
    noise = reverse_added_noise(run.r, grid)
    run.csv("reverse.csv", ["delta"] + [f"abs_{k}" for k in INPUTS] + ["noise"],
            zip(grid, *[np.abs(np.broadcast_to(co[k], grid.shape)) for k in INPUTS], noise))
    ch = reverse_channel(run.r, 0.0)
    report = {"params": run.r.to_dict(), "s": ch.s_ratio, "noise_at_sideband": ch.noise,
              "high_cooperativity_limit": high_cooperativity_limit(run.r.eta_d),
              "coefficients_at_sideband": ch.coefficients}
    run.json("reverse.json", report)

    def draw(ax):
        ax.plot(grid / e.gamma_prime, noise)
        ax.set_xlabel("detuning / Gamma'")
        ax.set_ylabel("added noise")
    run.svg("reverse.svg", draw)
    return run.finish({"noise_at_sideband": ch.noise})


def cmd_entanglement(args, run: Run):
    from .gaussian_ent import entanglement_report
    from .noise import noise_budget
    b = noise_budget(run.r)
    g, v = math.sqrt(b.t_ac), b.v_total
    rs = [float(x) for x in option(args, "r_values", [0.0, 0.5, 1.0, 2.0, 5.0, 10.0])]
    reps = [entanglement_report(x, g, v) for x in rs]
    run.csv("entanglement.csv", ["r", "g", "v", "I", "W_T", "verdict"],
            [(p["r"], g, v, p["I"], p["W_T"], p["verdict"]) for p in reps])
    run.json("entanglement.json", {"params": run.r.to_dict(), "reports": reps})
    return run.finish({"I_at_max_r": reps[-1]["I"], "W_T": reps[-1]["W_T"]})


def cmd_oracle_validate(args, run: Run):
    from .oracle import validate
    seed = args.seed if args.seed is not None else 0
    segs = int(option(args, "segments", 4096))
    tol = float(option(args, "tolerance", 0.05))
    rep, mc, an = validate(run.r, seed=seed, n_segments=segs, tolerance=tol)
    sel = (mc.omega >= rep.band[0]) & (mc.omega <= rep.band[1])
    run.csv("oracle_psd.csv", ["delta", "monte_carlo", "analytic"], zip(mc.omega[sel], mc.values[sel], an.values))
    verdict = "pass" if rep.passed else "fail"
    run.json("oracle.json", {"params": run.r.to_dict(), "seed": seed, "segments": mc.meta["segments"],
                             "report": rep.to_dict(), "verdict": verdict})

    def draw(ax):
        ax.plot(mc.omega[sel], mc.values[sel], ".", ms=3, label="Monte Carlo")
        ax.plot(an.omega, an.values, label="analytic")
        ax.set_xlabel("detuning")
        ax.legend(fontsize=7)
    run.svg("oracle.svg", draw)
    run.finish({"verdict": verdict, "rms_rel": rep.rms_rel})
    return 0 if rep.passed else 1


def cmd_presets(args, run: Run):
    data = {n: P.preset_reduced(n).to_dict() for n in P.preset_names()}
    run.json("presets.json", data)
    return run.finish({"presets": P.preset_names()})


COMMANDS = {
    "transmission": (cmd_transmission, "ideal transmission spectrum (optionally the full beta x C_M' grid)"),
    "noise-sweep": (cmd_noise_sweep, "noise components versus C_L/nbar"),
    "fidelity": (cmd_fidelity, "transfer fidelity of test states versus C_L/nbar"),
    "negativity": (cmd_negativity, "surviving Wigner negativity versus C_L/nbar"),
    "tv-diagram": (cmd_tv_diagram, "T-V traces for each loss parameter"),
    "witness-map": (cmd_witness_map, "W_T over eta_L x eta_M"),
    "homodyne-gains": (cmd_homodyne_gains, "input-to-light gains and pulse photocurrent spectrum"),
    "homodyne-spectrum": (cmd_homodyne_spectrum, "vacuum photocurrent spectrum at several feedback gains"),
    "reverse": (cmd_reverse, "microwave-to-optical transfer coefficients and noise"),
    "entanglement": (cmd_entanglement, "inseparability of a TMSS half sent through the transducer"),
    "oracle-validate": (cmd_oracle_validate, "Monte Carlo check of the output spectrum"),
    "presets": (cmd_presets, "list the named parameter sets"),
}


def _floats(s):
    return [float(x) for x in s.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help="named parameter set (see the presets command)")
    common.add_argument("--config", help="JSON file with 'preset', 'params' and command options")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="random seed (oracle-validate)")
    common.add_argument("--format", choices=FORMATS, default="all",
                        help="csv (tables + JSON report), json, svg or all")
    for f in P.ReducedParams.field_names():
        common.add_argument("--" + f.replace("_", "-"), dest=f, type=float, help=f"override {f}")

    p = argparse.ArgumentParser(prog="fbtransducer", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_)
        if name == "transmission":
            sp.add_argument("--grid", action="store_true", default=None, help="all beta x C_M' panels")
        if name in ("fidelity", "negativity"):
            sp.add_argument("--ratios", type=_floats, help="comma-separated C_L/nbar values")
            sp.add_argument("--grid-points", dest="grid_points", type=int, help="Wigner grid size")
        if name == "tv-diagram":
            sp.add_argument("--step", type=float, help="efficiency step (default 0.01)")
        if name == "witness-map":
            sp.add_argument("--points", type=int, help="samples per axis (default 101)")
        if name == "homodyne-gains":
            sp.add_argument("--b-theta-var", dest="b_theta_var", type=float, help="<B_theta^2> of the pulse")
            sp.add_argument("--pulse-delta", dest="pulse_delta", type=float, help="pulse centre detuning")
        if name == "homodyne-spectrum":
            sp.add_argument("--h-values", dest="h_values", type=_floats, help="comma-separated gains")
        if name == "entanglement":
            sp.add_argument("--r-values", dest="r_values", type=_floats, help="comma-separated squeezing")
        if name == "oracle-validate":
            sp.add_argument("--segments", type=int, help="Welch segments (default 4096)")
            sp.add_argument("--tolerance", type=float, help="RMS tolerance (default 0.05)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            args.options = {}
            r = None
        else:
            r = resolve_params(args)
        run = Run(args, r)
        return COMMANDS[args.command][0](args, run)
    except (TransducerError, ValueError, OSError) as exc:
        if isinstance(exc, TransducerError):
            err = exc.to_dict()
        else:
            err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
