"""Command-line front end.

Usage::

    dirac-tsfp COMMAND [--config FILE] [--out DIR] [--jobs N] [--budget STEPS]

Commands: ``run``, ``converge``, ``sweep-eps``, ``sweep-h``, ``growth``,
``compare``. Each writes CSV files and ``summary.txt`` into the output
directory (``--out``, else ``$DIRAC_TSFP_OUT``, else ``./results``).

Exit status: 0 when every tolerance band is met, 1 when the computation
finished but a band failed, 2 on configuration or budget errors.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import experiments as ex
from .config import COMMANDS, RunConfig, load_config, with_overrides
from .errors import BudgetError, ConfigurationError, DiracError
from .integrators import SchemeKind, Stepper, evolve
from .model import build_free_modes
from .presets import ProblemPreset, get_preset, preset_from_csv
from .spectral import l2_norm

OUT_ENV = "DIRAC_TSFP_OUT"
SNAPSHOT_FIELDS = ("step", "t", "x", "phi1_re", "phi1_im", "phi2_re", "phi2_im")

CONVERGE_TAUS = (0.1, 0.05, 0.025, 0.0125)
SWEEP_EPSILONS = (1.0, 0.5, 0.25, 0.125)
GROWTH_TAUS = (0.1, 0.05)
GROWTH_T_END = 32.0
SPATIAL_MS = (8, 16, 32)
SPATIAL_TAU = 1e-3
SPATIAL_EPSILONS = (1.0, 0.25)
COMPARE_TAU = 0.1
ORDERING_TAU = 0.05


@dataclass
class Check:
    name: str
    value: float
    band: str
    passed: bool

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name} = {self.value:.6g}  (band {self.band})"


def _band(name, value, lo=None, hi=None) -> Check:
    ok = (lo is None or value >= lo) and (hi is None or value <= hi)
    if lo is not None and hi is not None:
        band = f"[{lo:g}, {hi:g}]"
    elif lo is not None:
        band = f">= {lo:g}"
    else:
        band = f"<= {hi:g}"
    return Check(name, value, band, ok)


class Outputs:
    """Writes artifacts and collects the summary of one command."""

    def __init__(self, out_dir: Path, cfg: RunConfig):
        self.dir = out_dir
        self.cfg = cfg
        self.checks: list[Check] = []
        self.notes: list[str] = []
        self.files: list[str] = []
        out_dir.mkdir(parents=True, exist_ok=True)

    def _track(self, name):
        if name not in self.files:
            self.files.append(name)

    def records(self, name, records):
        ex.write_records(self.dir / name, records)
        self._track(name)

    def fits(self, name, fits):
        ex.write_fits(self.dir / name, fits)
        self._track(name)

    def note(self, text):
        self.notes.append(text)

    def check(self, c: Check):
        self.checks.append(c)

    def summary(self, status: Optional[str] = None) -> None:
        lines = [f"command: {self.cfg.command}"]
        lines += [f"note: {n}" for n in self.notes]
        lines += [c.line() for c in self.checks]
        lines += [f"file: {f}" for f in self.files]
        if status:
            lines.append(f"status: {status}")
        else:
            lines.append(f"status: {'all bands met' if self.passed else 'band failure'}")
        (self.dir / "summary.txt").write_text("\n".join(lines) + "\n")

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _preset(cfg: RunConfig, default: str = "bump") -> ProblemPreset:
    if cfg.potential_csv is not None:
        return preset_from_csv(cfg.potential_csv)
    return get_preset(cfg.preset or default)


def _ref(cfg: RunConfig) -> ex.ReferenceParams:
    return ex.ReferenceParams(cfg.ref_M, cfg.ref_tau, cfg.budget)


def _given(cfg: RunConfig, name: str, default):
    return getattr(cfg, name) if name in cfg.explicit else default


def cmd_run(cfg: RunConfig, out: Outputs) -> None:
    preset = _preset(cfg)
    M = _given(cfg, "M", preset.M)
    grid = preset.grid(M)
    stepper = Stepper(
        SchemeKind.parse(cfg.scheme), build_free_modes(grid), preset.potentials(grid, cfg.epsilon), cfg.tau
    )
    n_total = cfg.n_steps if cfg.n_steps is not None else ex.steps_for(cfg.t_end, cfg.tau)
    f0 = preset.initial(grid)
    norm0 = l2_norm(f0)
    rows = []

    def emit(n, f):
        for j, x in enumerate(grid.x):
            u1, u2 = f.values[:, j]
            nums = (n * cfg.tau, x, u1.real, u1.imag, u2.real, u2.imag)
            rows.append([n] + [repr(float(v)) for v in nums])

    emit(0, f0)
    final = evolve(f0, stepper, n_total, observer=emit, every=cfg.stride)
    path = out.dir / "snapshots.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SNAPSHOT_FIELDS)
        writer.writerows(rows)
    out._track("snapshots.csv")
    drift = abs(l2_norm(final) - norm0) / norm0
    out.note(f"{stepper.scheme.value}: {n_total} steps of tau={cfg.tau:g}, eps={cfg.epsilon:g}, M={M}")
    if stepper.scheme.is_splitting:
        out.check(_band("relative norm drift", drift, hi=1e-10))
    else:
        out.note(f"relative norm drift {drift:.3e} (not conserved exactly by {stepper.scheme.value})")


def read_snapshots(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SNAPSHOT_FIELDS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            {"step": int(r["step"]), **{k: float(r[k]) for k in SNAPSHOT_FIELDS[1:]}} for r in reader
        ]


def _order_checks(out: Outputs, finals, schemes, sweep):
    fits = []
    for s in schemes:
        kind = SchemeKind.parse(s)
        rows = [r for r in finals if r.scheme == kind.value]
        fit = ex.fit_order([(r.tau, r.e_max) for r in rows])
        fits.append((f"{sweep}:{kind.value}", fit))
        lo, hi = ex.ORDER_BANDS[kind]
        out.check(_band(f"{kind.value} temporal order", fit.slope, lo, hi))
    return fits


def cmd_converge(cfg: RunConfig, out: Outputs) -> None:
    preset = _preset(cfg)
    schemes = cfg.schemes or (cfg.scheme,)
    taus = cfg.taus or CONVERGE_TAUS
    recs = ex.temporal_convergence(
        preset, schemes, taus, cfg.epsilon, cfg.T, _given(cfg, "M", None), 1, _ref(cfg), cfg.jobs
    )
    finals = ex.final_records(recs)
    out.records("converge.csv", finals)
    out.fits("fits.csv", _order_checks(out, finals, schemes, "tau"))


def _eps_slope_checks(out, finals, schemes, taus, enforce=True):
    fits = []
    for s in schemes:
        for tau in taus:
            rows = sorted(
                (r for r in finals if r.scheme == s and r.tau == tau), key=lambda r: -r.eps
            )
            slopes = ex.log2_ratios([r.e_max for r in rows])
            for r0, r1, sl in zip(rows, rows[1:], slopes):
                name = f"{s} tau={tau:g} log2 e_max ratio eps {r0.eps:g}->{r1.eps:g}"
                lo, hi = ex.EPS_SLOPE_BAND
                if enforce and SchemeKind.parse(s).is_splitting:
                    out.check(_band(name, sl, lo, hi))
                else:
                    out.note(f"{name} = {sl:.4g}")
            if len(rows) >= 3 and rows[0].eps / rows[-1].eps >= 4:
                fits.append((f"eps:{s}:tau={tau!r}", ex.fit_order([(r.eps, r.e_max) for r in rows])))
    return fits


def cmd_sweep_eps(cfg: RunConfig, out: Outputs) -> None:
    preset = _preset(cfg)
    schemes = cfg.schemes or (cfg.scheme,)
    taus = cfg.taus or (COMPARE_TAU,)
    eps_list = cfg.epsilons or SWEEP_EPSILONS
    recs = ex.epsilon_scaling(
        preset, schemes, taus, eps_list, cfg.T, _given(cfg, "M", None), 1, _ref(cfg), cfg.jobs
    )
    finals = ex.final_records(recs)
    out.records("sweep_eps.csv", finals)
    fits = _eps_slope_checks(out, finals, schemes, taus)
    if len(taus) >= 3:
        for s in schemes:
            for eps in eps_list:
                rows = [r for r in finals if r.scheme == s and r.eps == eps]
                fit = ex.fit_order([(r.tau, r.e_max) for r in rows])
                fits.append((f"tau:{s}:eps={eps!r}", fit))
                lo, hi = ex.ORDER_BANDS[SchemeKind.parse(s)]
                out.check(_band(f"{s} eps={eps:g} temporal order", fit.slope, lo, hi))
    out.fits("fits.csv", fits)


def cmd_sweep_h(cfg: RunConfig, out: Outputs) -> None:
    preset = _preset(cfg, default="smooth")
    scheme = cfg.scheme
    Ms = tuple(cfg.Ms or SPATIAL_MS)
    tau = _given(cfg, "tau", SPATIAL_TAU)
    eps_list = cfg.epsilons or SPATIAL_EPSILONS
    runs = tuple(sorted(set(Ms) | {cfg.ref_M}))
    recs = ex.spatial_sweep(preset, scheme, runs, tau, eps_list, cfg.T, 1, _ref(cfg), cfg.jobs)
    finals = ex.final_records(recs)
    out.records("sweep_h.csv", finals)
    floor = {r.eps: r.e_max for r in finals if r.M == cfg.ref_M}
    out.note("temporal floor (M = reference M): " + ", ".join(f"eps={e:g}: {v:.3e}" for e, v in floor.items()))
    for eps in eps_list:
        rows = sorted((r for r in finals if r.eps == eps and r.M in Ms), key=lambda r: r.M)
        for coarse, fine in zip(rows, rows[1:]):
            name = f"eps={eps:g} error drop M {coarse.M}->{fine.M}"
            drop = coarse.e_max / fine.e_max
            if coarse.e_max >= ex.SPATIAL_DROP_MIN * floor[eps]:
                out.check(_band(name, drop, lo=ex.SPATIAL_DROP_MIN))
            else:
                out.note(f"{name} = {drop:.4g} (temporal floor reached)")
    for M in Ms:
        errs = [r.e_max for r in finals if r.M == M]
        if len(errs) > 1 and min(errs) >= 10 * max(floor.values()):
            out.check(_band(f"M={M} max/min error across eps", max(errs) / min(errs), hi=ex.EPS_AGREEMENT))


def cmd_growth(cfg: RunConfig, out: Outputs) -> None:
    preset = _preset(cfg)
    taus = cfg.taus or GROWTH_TAUS
    t_end = _given(cfg, "t_end", GROWTH_T_END)
    # crossing times and the linear fit use every step; the CSV is thinned to the stride
    recs = ex.long_time_growth(
        preset, cfg.scheme, taus, cfg.epsilon, t_end, 1, _given(cfg, "M", None), _ref(cfg), cfg.jobs
    )
    thinned = [
        r for r in recs if round(r.t / r.tau) % cfg.stride == 0 or abs(r.t - t_end) < 1e-12 * t_end
    ]
    out.records("growth.csv", thinned)
    crossings = {}
    for tau in taus:
        series = [r for r in recs if r.tau == tau]
        slope, _, r2 = ex.linear_fit(series)
        out.check(Check(f"tau={tau:g} linear growth slope", slope, "> 0", slope > 0))
        out.check(_band(f"tau={tau:g} linear model R^2", r2, lo=ex.LINEAR_R2_MIN))
        crossings[tau] = ex.crossing_time(series, cfg.delta0)
        out.note(f"tau={tau:g} first exceeds delta0={cfg.delta0:g} at t={crossings[tau]}")
    ordered = sorted(taus, reverse=True)
    for big, small in zip(ordered, ordered[1:]):
        if crossings[big] is None or crossings[small] is None:
            out.note(f"crossing ratio tau {big:g}/{small:g} undefined (bound not exceeded)")
            continue
        ratio = crossings[small] / crossings[big]
        scale = (big / small) ** 2 / 4.0
        lo, hi = ex.CROSSING_RATIO_BAND
        out.check(_band(f"crossing-time ratio tau {big:g}->{small:g}", ratio, lo * scale, hi * scale))


def cmd_compare(cfg: RunConfig, out: Outputs) -> None:
    preset = _preset(cfg)
    schemes = cfg.schemes or ALL_SCHEME_NAMES
    taus = cfg.taus or CONVERGE_TAUS
    recs = ex.temporal_convergence(preset, schemes, taus, 1.0, 1.0, _given(cfg, "M", None), 1, _ref(cfg), cfg.jobs)
    finals = ex.final_records(recs)
    out.records("compare_tau.csv", finals)
    fits = _order_checks(out, finals, schemes, "tau")
    out.fits("fits.csv", fits)
    at = {r.scheme: r.e_max for r in finals if math.isclose(r.tau, ORDERING_TAU)}
    if {"lie", "strang", "fourth"} <= at.keys():
        out.check(_band("e(fourth)/e(strang) at tau=0.05", at["fourth"] / at["strang"], hi=1.0))
        out.check(_band("e(strang)/e(lie) at tau=0.05", at["strang"] / at["lie"], hi=1.0))

    tau = _given(cfg, "tau", COMPARE_TAU)
    eps_list = cfg.epsilons or SWEEP_EPSILONS
    recs = ex.epsilon_scaling(preset, schemes, tau, eps_list, cfg.T, _given(cfg, "M", None), 1, _ref(cfg), cfg.jobs)
    finals = ex.final_records(recs)
    out.records("compare_eps.csv", finals)
    fits += _eps_slope_checks(out, finals, schemes, [tau], enforce=False)
    out.fits("fits.csv", fits)
    for c in comparator_checks(finals, eps_list):
        out.check(c)


def comparator_checks(finals, eps_list) -> list[Check]:
    """Uniformity checks across an epsilon sweep at fixed tau."""
    checks = []
    eps_sorted = sorted(eps_list, reverse=True)
    by = {(r.scheme, r.eps): r.e_max for r in finals}
    if all(("strang", e) in by for e in eps_sorted):
        worst = max(by[("strang", b)] / by[("strang", a)] for a, b in zip(eps_sorted, eps_sorted[1:]))
        checks.append(_band("strang e_max growth as eps decreases (max consecutive ratio)", worst, hi=1.5))
    if all(("fdm", e) in by for e in eps_sorted):
        ratio = by[("fdm", eps_sorted[-1])] / by[("fdm", eps_sorted[0])]
        checks.append(_band(f"fdm e_max(eps={eps_sorted[-1]:g}) / e_max(eps={eps_sorted[0]:g})", ratio, lo=2.0))
    if all(("ewi", e) in by for e in eps_sorted):
        base = by[("ewi", eps_sorted[0])]
        ratio = max(by[("ewi", e)] for e in eps_sorted) / base
        checks.append(_band(f"ewi max e_max / e_max(eps={eps_sorted[0]:g})", ratio, hi=3.0))
        spread = max(by[("ewi", e)] for e in eps_sorted) / min(by[("ewi", e)] for e in eps_sorted)
        checks.append(Check("ewi max/min e_max across eps (reported)", spread, "info", True))
    return checks


ALL_SCHEME_NAMES = tuple(k.value for k in SchemeKind)

HANDLERS = {
    "run": cmd_run,
    "converge": cmd_converge,
    "sweep-eps": cmd_sweep_eps,
    "sweep-h": cmd_sweep_h,
    "growth": cmd_growth,
    "compare": cmd_compare,
}


def run_command(cfg: RunConfig, out_dir: Optional[Path] = None) -> int:
    """Execute ``cfg``; returns the process exit status."""
    out_dir = Path(out_dir or cfg.out_dir or os.environ.get(OUT_ENV, "results"))
    out = Outputs(out_dir, cfg)
    try:
        HANDLERS[cfg.command](cfg, out)
    except BudgetError as exc:
        out.summary(status=f"budget error: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigurationError, ValueError) as exc:
        out.summary(status=f"configuration error: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DiracError as exc:
        out.summary(status=f"error: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out.summary()
    for c in out.checks:
        print(c.line())
    return 0 if out.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirac-tsfp", description="Time-splitting spectral solvers for the 1D Dirac equation"
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="sectioned key=value config file")
    parser.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./results)")
    parser.add_argument("--jobs", type=int, default=None, help="parallel sweep workers")
    parser.add_argument("--budget", type=int, default=None, help="max fine steps per reference")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command)
        if args.jobs is not None and args.jobs < 1:
            raise ConfigurationError(f"--jobs must be >= 1, got {args.jobs}")
        if args.budget is not None and args.budget < 1:
            raise ConfigurationError(f"--budget must be >= 1, got {args.budget}")
        cfg = with_overrides(cfg, jobs=args.jobs, budget=args.budget)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run_command(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
