"""Reference solutions, error functionals and convergence sweeps.

Errors are measured against a Strang solution on a fine grid with a small
step. A coarse numerical solution is interpolated spectrally onto the fine
grid and the discrete L2 norm of the difference is taken there.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BudgetError, ConfigurationError, FitError, SnapshotLookupError
from .integrators import SchemeKind, Stepper, evolve
from .model import build_free_modes
from .presets import ProblemPreset
from .spectral import GridSpec, SpinorField, interpolate, l2_norm

REFERENCE_M = 128
REFERENCE_TAU = 1e-4
DEFAULT_BUDGET = 20_000_000
DEFAULT_STRIDE = 10
DEFAULT_DELTA0 = 1e-3

#: accepted bands for fitted temporal orders
ORDER_BANDS = {
    SchemeKind.LIE: (0.8, 1.2),
    SchemeKind.STRANG: (1.8, 2.2),
    SchemeKind.FOURTH: (3.7, 4.3),
    SchemeKind.EWI: (1.8, 2.2),
    SchemeKind.FDM: (1.8, 2.2),
}
EPS_SLOPE_BAND = (0.6, 1.4)
CROSSING_RATIO_BAND = (3.0, 5.0)
LINEAR_R2_MIN = 0.9
SPATIAL_DROP_MIN = 100.0
EPS_AGREEMENT = 3.0

RECORD_FIELDS = ("scheme", "epsilon", "tau", "M", "t", "e", "e_max")
FIT_FIELDS = ("sweep_id", "slope", "residual")


def steps_for(duration: float, dt: float, what: str = "horizon") -> int:
    """Number of steps of size ``dt`` covering ``duration`` exactly."""
    ratio = duration / dt
    n = int(round(ratio))
    if abs(ratio - n) > 1e-12 * max(1.0, abs(ratio)):
        raise ConfigurationError(f"{what} {duration!r} is not a multiple of the step {dt!r}")
    return n


@dataclass(frozen=True)
class ReferenceSolution:
    """Fine-grid Strang snapshots keyed by fine step index."""

    preset: ProblemPreset
    eps: float
    grid: GridSpec
    tau: float
    snapshots: dict = field(repr=False)

    @property
    def times(self) -> list[float]:
        return [k * self.tau for k in sorted(self.snapshots)]

    def index(self, t: float) -> int:
        return steps_for(t, self.tau, "snapshot time")

    def at(self, t: float) -> SpinorField:
        try:
            return self.snapshots[self.index(t)]
        except (KeyError, ConfigurationError):
            raise SnapshotLookupError(f"no reference snapshot at t={t!r}") from None

    def restrict(self, t: float, grid: GridSpec) -> SpinorField:
        """Snapshot at ``t`` truncated to the modes of ``grid``."""
        return interpolate(self.at(t), grid)


def compute_reference(
    preset: ProblemPreset,
    eps: float,
    T_end: float,
    snapshot_times: Iterable[float],
    M: int = REFERENCE_M,
    tau: float = REFERENCE_TAU,
    budget: int = DEFAULT_BUDGET,
) -> ReferenceSolution:
    grid = preset.grid(M)
    n_total = steps_for(T_end, tau, "reference horizon")
    if n_total > budget:
        raise BudgetError(n_total, budget)
    wanted = set()
    for t in snapshot_times:
        if t < 0 or t > T_end * (1 + 1e-12):
            raise ConfigurationError(f"snapshot time {t!r} outside [0, {T_end!r}]")
        wanted.add(steps_for(t, tau, "snapshot time"))
    stepper = Stepper(SchemeKind.STRANG, build_free_modes(grid), preset.potentials(grid, eps), tau)
    field_ = preset.initial(grid)
    snaps = {}
    done = 0
    for k in sorted(wanted):
        field_ = evolve(field_, stepper, k - done)
        done = k
        snaps[k] = field_
    return ReferenceSolution(preset, eps, grid, tau, snaps)


def error_at(f: SpinorField, ref: ReferenceSolution, t: float) -> float:
    """Discrete L2 error of ``f`` against the reference on the fine grid."""
    exact = ref.at(t)
    return l2_norm(interpolate(f, ref.grid) - exact)


@dataclass(frozen=True)
class ErrorRecord:
    scheme: str
    eps: float
    tau: float
    M: int
    t: float
    e: float
    e_max: float

    def row(self) -> dict:
        return {
            "scheme": self.scheme,
            "epsilon": repr(float(self.eps)),
            "tau": repr(float(self.tau)),
            "M": str(int(self.M)),
            "t": repr(float(self.t)),
            "e": repr(float(self.e)),
            "e_max": repr(float(self.e_max)),
        }


def sample_steps(n_total: int, stride: int) -> list[int]:
    steps = list(range(0, n_total + 1, stride))
    if steps[-1] != n_total:
        steps.append(n_total)
    return steps


def run_trajectory(
    preset: ProblemPreset,
    scheme,
    tau: float,
    eps: float,
    M: int,
    T_end: float,
    ref: ReferenceSolution,
    stride: int = 1,
) -> list[ErrorRecord]:
    """Evolve one configuration and record errors every ``stride`` steps."""
    scheme = SchemeKind.parse(scheme)
    grid = preset.grid(M)
    stepper = Stepper(scheme, build_free_modes(grid), preset.potentials(grid, eps), tau)
    n_total = steps_for(T_end, tau)
    records = []
    e_max = 0.0

    def record(n, f):
        nonlocal e_max
        t = n * tau
        e = error_at(f, ref, t)
        e_max = max(e_max, e)
        records.append(ErrorRecord(scheme.value, eps, tau, M, t, e, e_max))

    f0 = preset.initial(grid)
    record(0, f0)
    evolve(f0, stepper, n_total, observer=record, every=stride)
    return records


def _snapshot_times(taus: Sequence[float], T_end: float, stride: int) -> list[float]:
    times = set()
    for tau in taus:
        n_total = steps_for(T_end, tau)
        times.update(n * tau for n in sample_steps(n_total, stride))
    return sorted(times)


def _map(fn, jobs_args: list[tuple], jobs: int = 1) -> list:
    if jobs <= 1 or len(jobs_args) <= 1:
        return [fn(*a) for a in jobs_args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *a) for a in jobs_args]
        return [f.result() for f in futures]


@dataclass(frozen=True)
class ReferenceParams:
    M: int = REFERENCE_M
    tau: float = REFERENCE_TAU
    budget: int = DEFAULT_BUDGET


def _reference_for(preset, eps, T_end, taus, stride, params: ReferenceParams):
    times = _snapshot_times(taus, T_end, stride)
    return compute_reference(preset, eps, T_end, times, params.M, params.tau, params.budget)


def _check_budget(eps_list, T, params: ReferenceParams):
    for eps in eps_list:
        n = steps_for(T / eps, params.tau, "reference horizon")
        if n > params.budget:
            raise BudgetError(n, params.budget)


def temporal_convergence(
    preset: ProblemPreset,
    schemes,
    taus: Sequence[float],
    eps: float = 1.0,
    T: float = 1.0,
    M: Optional[int] = None,
    stride: int = 1,
    ref_params: ReferenceParams = ReferenceParams(),
    jobs: int = 1,
) -> list[ErrorRecord]:
    """Errors of each scheme and step up to ``t = T / eps``."""
    M = M or ref_params.M
    T_end = T / eps
    _check_budget([eps], T, ref_params)
    ref = _reference_for(preset, eps, T_end, taus, stride, ref_params)
    args = [(preset, s, tau, eps, M, T_end, ref, stride) for s in schemes for tau in taus]
    return [r for recs in _map(run_trajectory, args, jobs) for r in recs]


def long_time_growth(
    preset: ProblemPreset,
    scheme,
    taus: Sequence[float],
    eps: float,
    T_end: float,
    stride: int = DEFAULT_STRIDE,
    M: Optional[int] = None,
    ref_params: ReferenceParams = ReferenceParams(),
    jobs: int = 1,
) -> list[ErrorRecord]:
    """Error histories ``e(t_n)`` sampled every ``stride`` steps up to ``T_end``."""
    M = M or ref_params.M
    _check_budget([eps], T_end * eps, ref_params)
    ref = _reference_for(preset, eps, T_end, taus, stride, ref_params)
    args = [(preset, scheme, tau, eps, M, T_end, ref, stride) for tau in taus]
    return [r for recs in _map(run_trajectory, args, jobs) for r in recs]


def _eps_job(preset, schemes, taus, eps, T, M, stride, ref_params):
    T_end = T / eps
    ref = _reference_for(preset, eps, T_end, taus, stride, ref_params)
    return [
        r
        for s in schemes
        for tau in taus
        for r in run_trajectory(preset, s, tau, eps, M, T_end, ref, stride)
    ]


def epsilon_scaling(
    preset: ProblemPreset,
    schemes,
    tau,
    eps_list: Sequence[float],
    T: float = 1.0,
    M: Optional[int] = None,
    stride: int = 1,
    ref_params: ReferenceParams = ReferenceParams(),
    jobs: int = 1,
) -> list[ErrorRecord]:
    """For each ``eps`` run up to ``T / eps`` with fixed step(s) ``tau``."""
    if isinstance(schemes, (str, SchemeKind)):
        schemes = [schemes]
    taus = [tau] if np.isscalar(tau) else list(tau)
    M = M or ref_params.M
    _check_budget(eps_list, T, ref_params)
    args = [(preset, schemes, taus, eps, T, M, stride, ref_params) for eps in eps_list]
    return [r for recs in _map(_eps_job, args, jobs) for r in recs]


def _spatial_job(preset, scheme, Ms, tau, eps, T, stride, ref_params):
    T_end = T / eps
    ref = _reference_for(preset, eps, T_end, [tau], stride, ref_params)
    return [r for M in Ms for r in run_trajectory(preset, scheme, tau, eps, M, T_end, ref, stride)]


def spatial_sweep(
    preset: ProblemPreset,
    scheme,
    Ms: Sequence[int],
    tau: float,
    eps_list: Sequence[float],
    T: float = 1.0,
    stride: int = 1,
    ref_params: ReferenceParams = ReferenceParams(),
    jobs: int = 1,
) -> list[ErrorRecord]:
    """Errors over a list of grid sizes at a small fixed step."""
    _check_budget(eps_list, T, ref_params)
    for M in Ms:
        if M > ref_params.M:
            raise ConfigurationError(f"M={M} exceeds the reference grid M={ref_params.M}")
    args = [(preset, scheme, Ms, tau, eps, T, stride, ref_params) for eps in eps_list]
    return [r for recs in _map(_spatial_job, args, jobs) for r in recs]


def final_records(records: Iterable[ErrorRecord]) -> list[ErrorRecord]:
    """Last record of every (scheme, eps, tau, M) trajectory, in first-seen order."""
    last = {}
    for r in records:
        last[(r.scheme, r.eps, r.tau, r.M)] = r
    return list(last.values())


@dataclass(frozen=True)
class OrderFit:
    """Least-squares line through ``(log2 parameter, log2 error)``.

    ``residual`` is the root-mean-square deviation from the line in log2
    units.
    """

    samples: tuple
    slope: float
    intercept: float
    residual: float


def fit_order(samples: Sequence[tuple[float, float]]) -> OrderFit:
    samples = tuple((float(p), float(e)) for p, e in samples)
    if len(samples) < 3:
        raise FitError(f"need at least 3 samples, got {len(samples)}")
    p = np.array([s[0] for s in samples])
    e = np.array([s[1] for s in samples])
    if np.any(p <= 0) or np.any(e <= 0) or not np.all(np.isfinite(e)):
        raise FitError("parameters and errors must be positive and finite")
    if p.max() / p.min() < 4.0 * (1 - 1e-12):
        raise FitError(f"parameter span {p.max() / p.min():.3g} is below 4x")
    x, y = np.log2(p), np.log2(e)
    A = np.stack([x, np.ones_like(x)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    return OrderFit(samples, float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))


def crossing_time(records: Sequence[ErrorRecord], delta0: float) -> Optional[float]:
    """First time the error history exceeds ``delta0``.

    The crossing is located by linear interpolation between the two samples
    that bracket it, so it is not quantised to the sampling interval.
    Returns ``None`` when the bound is never exceeded.
    """
    prev_t, prev_e = None, None
    for r in sorted(records, key=lambda r: r.t):
        if r.e > delta0:
            if prev_t is None:
                return r.t
            return prev_t + (delta0 - prev_e) * (r.t - prev_t) / (r.e - prev_e)
        prev_t, prev_e = r.t, r.e
    return None


def linear_fit(records: Sequence[ErrorRecord]) -> tuple[float, float, float]:
    """``(slope, intercept, R^2)`` of the least-squares line ``e ~ t``."""
    t = np.array([r.t for r in records])
    e = np.array([r.e for r in records])
    slope, intercept = np.polyfit(t, e, 1)
    ss_res = float(np.sum((e - (slope * t + intercept)) ** 2))
    ss_tot = float(np.sum((e - e.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def reference_discrepancy(
    preset: ProblemPreset,
    eps: float,
    T_end: float,
    snapshot_times: Sequence[float],
    params: ReferenceParams = ReferenceParams(),
) -> float:
    """Largest snapshot difference between references at ``tau`` and ``tau/2``."""
    coarse = compute_reference(preset, eps, T_end, snapshot_times, params.M, params.tau, params.budget)
    fine = compute_reference(
        preset, eps, T_end, snapshot_times, params.M, params.tau / 2, params.budget
    )
    return max(l2_norm(coarse.at(t) - fine.at(t)) for t in snapshot_times)


def write_records(path, records: Iterable[ErrorRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RECORD_FIELDS, lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow(r.row())


def read_records(path) -> list[ErrorRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RECORD_FIELDS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            ErrorRecord(
                row["scheme"],
                float(row["epsilon"]),
                float(row["tau"]),
                int(row["M"]),
                float(row["t"]),
                float(row["e"]),
                float(row["e_max"]),
            )
            for row in reader
        ]


def write_fits(path, fits: Iterable[tuple[str, OrderFit]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIT_FIELDS)
        for sweep_id, fit in fits:
            writer.writerow([sweep_id, repr(float(fit.slope)), repr(float(fit.residual))])


def read_fits(path) -> list[tuple[str, float, float]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != FIT_FIELDS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [(row["sweep_id"], float(row["slope"]), float(row["residual"])) for row in reader]


def log2_ratios(values: Sequence[float]) -> list[float]:
    return [math.log2(a / b) for a, b in zip(values[:-1], values[1:])]
