"""Named acceptance checks, run sequentially and reported as plain data.

Each check returns a :class:`CheckResult`; :func:`validate` collects them into
a JSON-serialisable report.  Expensive scans are shared between checks
through a :class:`ValidationContext`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import entanglement
from .dynamics import evolve, evolve_exact, steady_state
from .errors import CavityEntError
from .model import (
    DensityMatrix,
    HilbertLayout,
    ModelParams,
    effective_to_physical,
    ground_vacuum,
    kappa0_physical_state,
    kappa0_stationary_state,
    mode_populations,
)
from .scans import (
    jump_diagnostic,
    loglog_slope,
    scan_steady,
    scan_time,
    steady_grid,
    steady_scan_spec,
    time_grid,
    time_scan_spec,
    unimodal,
)

RANDOM_SEED = 20240607


@dataclass
class CheckResult:
    name: str
    criterion: int
    passed: bool
    seconds: float = 0.0
    limit_seconds: float | None = None
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "criterion": self.criterion,
            "status": "pass" if self.passed else "fail",
            "seconds": round(self.seconds, 3),
            "limit_seconds": self.limit_seconds,
            "detail": _plain(self.detail),
        }


def _plain(obj):
    """Convert numpy scalars and arrays to JSON-friendly Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


class ValidationContext:
    """Caches the two default scans so several checks can share them.

    Scan time is charged to the first check that requests the scan.
    """

    def __init__(self, log_base: float = entanglement.LOG_BASE, jobs: int = 1):
        self.log_base = log_base
        self.jobs = jobs
        self._cache = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def time_scan(self, cutoff: int = 3):
        def build():
            spec = time_scan_spec(cutoff=cutoff)
            spec = replace(spec, log_base=self.log_base, jobs=self.jobs)
            return scan_time(spec)

        return self._get(("time", cutoff), build)

    def steady_scan(self):
        def build():
            spec = steady_scan_spec()
            spec = replace(spec, log_base=self.log_base, jobs=self.jobs)
            return scan_steady(spec)

        return self._get("steady", build)


def bell_pair() -> DensityMatrix:
    ket = np.zeros(4, dtype=complex)
    ket[1] = ket[2] = np.sqrt(0.5)
    return DensityMatrix.from_ket(HilbertLayout.modes(1), ket)


def vacuum_triplet_mixture(p: float) -> DensityMatrix:
    """``p |psi+><psi+| + (1-p) |00><00|`` on two qubit-truncated modes."""
    bell = bell_pair().mat
    vac = np.zeros((4, 4), dtype=complex)
    vac[0, 0] = 1.0
    return DensityMatrix(HilbertLayout.modes(1), p * bell + (1.0 - p) * vac)


# -- individual checks -----------------------------------------------------


def check_closed_form_steady_state(ctx: ValidationContext) -> CheckResult:
    worst = 0.0
    for n_t in (0.5, 1.0):
        params = ModelParams(n_t=n_t, cutoff=10).with_kappa(0.0)
        rho = steady_state(params, params.layout())
        ref = kappa0_stationary_state(n_t, 10)
        diff = np.abs(rho.mat.diagonal() - ref.mat.diagonal()).reshape(2, 11)[:, :7]
        worst = max(worst, float(diff.max()))
    return CheckResult("closed_form_steady_state", 1, worst <= 1e-6, limit_seconds=1.0,
                       detail={"max_population_error": worst})


def check_kappa0_separable(ctx: ValidationContext) -> CheckResult:
    values = {}
    for n_t in (0.2, 0.5, 1.0, 2.0):
        rho = kappa0_physical_state(ModelParams(n_t=n_t), cutoff=6)
        values[n_t] = entanglement.traced_negativity(rho, ctx.log_base).value
    worst = max(values.values())
    return CheckResult("kappa0_separable", 2, worst <= 1e-9, limit_seconds=1.0,
                       detail={"negativity": values})


def check_bell_calibration(ctx: ValidationContext) -> CheckResult:
    bell = entanglement.log_negativity(bell_pair(), ctx.log_base).value
    ps = [0.01, *np.round(np.arange(0.1, 1.01, 0.1), 10)]
    mixtures = {float(p): entanglement.log_negativity(vacuum_triplet_mixture(p), ctx.log_base).value
                for p in ps}
    ok = abs(bell - 1.0) <= 1e-9 and all(v > 0 for v in mixtures.values())
    return CheckResult("bell_calibration", 3, ok, limit_seconds=1.0,
                       detail={"bell": bell, "mixtures": mixtures})


def check_noise_resonance(ctx: ValidationContext) -> CheckResult:
    n_vals, t_vals, grid = time_grid(ctx.time_scan())
    detail, ok = {}, True
    for t in (2.0, 5.0, 10.0, 20.0):
        j = int(np.argmin(np.abs(t_vals - t)))
        column = grid[:, j]
        peak = int(np.argmax(column))
        good = unimodal(column) and column[peak] > 0
        ok &= good
        detail[f"t={t:g}"] = {"peak_n_t": n_vals[peak], "peak": column[peak], "unimodal": good}
    return CheckResult("noise_resonance", 4, bool(ok), limit_seconds=120.0, detail=detail)


def check_double_resonance(ctx: ValidationContext) -> CheckResult:
    result = ctx.steady_scan()
    n_vals, k_vals, grid = steady_grid(result)
    kappa0_max = float(np.nanmax(grid[:, 0]))
    axis = grid[:, 1:]  # drop the prepended kappa = 0 line
    i, j = np.unravel_index(int(np.nanargmax(axis)), axis.shape)
    interior = 0 < i < axis.shape[0] - 1 and 0 < j < axis.shape[1] - 1
    rises = [float(np.max(np.diff(col[int(np.argmax(col)):]), initial=0.0)) for col in axis]
    monotone = max(rises) <= 1e-8
    flags = sorted({f for f in result.flags() if f})
    ok = interior and kappa0_max <= 1e-9 and monotone and not flags
    return CheckResult(
        "double_resonance", 5, bool(ok), limit_seconds=120.0,
        detail={
            "max": axis[i, j], "argmax_n_t": n_vals[i], "argmax_kappa": k_vals[j + 1],
            "interior": interior, "kappa0_max": kappa0_max,
            "max_rise_beyond_peak": max(rises), "flags": flags,
            "max_cutoff_used": max(result.cutoffs_used),
        },
    )


def check_measurement_enhancement(ctx: ValidationContext) -> CheckResult:
    result = ctx.time_scan()
    traced = result.column("neg_traced")
    k = int(np.argmax(traced))
    measured = result.column("neg_measured")[k]
    ratio = float(measured / traced[k])
    return CheckResult(
        "measurement_enhancement", 6, 1.5 <= ratio <= 2.5, limit_seconds=10.0,
        detail={"n_t": result.column("n_t")[k], "t": result.column("t")[k],
                "traced": traced[k], "measured": measured, "ratio": ratio},
    )


def check_large_kappa_scaling(ctx: ValidationContext) -> CheckResult:
    n_ts = (5.0, 10.0, 20.0, 50.0)
    pops = []
    for n_t in n_ts:
        params = ModelParams(n_t=n_t, cutoff=4).with_kappa(50.0)
        pops.append(mode_populations(steady_state(params, params.layout())))
    pops = np.array(pops)
    slopes = {r: loglog_slope(n_ts, pops[:, r]) for r in (1, 2)}
    expected = {1: -2.0, 2: -5.0}
    ok = all(abs(slopes[r] - expected[r]) <= 0.3 for r in (1, 2))
    return CheckResult("large_kappa_scaling", 7, ok, limit_seconds=30.0,
                       detail={"slopes": slopes, "expected": expected, "populations": pops})


def check_cutoff_convergence(ctx: ValidationContext) -> CheckResult:
    n3 = ctx.time_scan(3)
    n4 = ctx.time_scan(4)
    deltas = {}
    for column in ("neg_traced", "neg_measured"):
        deltas[column] = float(np.max(np.abs(n3.column(column) - n4.column(column))))
    return CheckResult("cutoff_convergence", 8, deltas["neg_traced"] <= 1e-3,
                       detail={"max_delta_n3_n4": deltas})


def check_oracle_equivalence(ctx: ValidationContext) -> CheckResult:
    spec = time_scan_spec()
    rng = np.random.default_rng(RANDOM_SEED)
    n_ts = rng.choice(spec.axis("n_t").values, size=5, replace=False)
    t = 5.0
    rk4_err = 0.0
    for n_t in n_ts:
        params = spec.base.replace(n_t=float(n_t))
        layout = params.layout()
        rho0 = ground_vacuum(layout)
        diff = evolve(params, layout, rho0, t).mat - evolve_exact(params, layout, rho0, t).mat
        rk4_err = max(rk4_err, float(np.abs(diff).max()))

    picture_err, top = 0.0, 0.0
    for n_t in n_ts[:2]:
        params = spec.base.replace(n_t=float(n_t))
        eff = evolve(params, params.layout(), ground_vacuum(params.layout()), t)
        phys_layout = params.layout("physical")
        phys = evolve(params, phys_layout, ground_vacuum(phys_layout), t)
        picture_err = max(picture_err, float(np.abs(effective_to_physical(eff, params).mat - phys.mat).max()))
        top = max(top, float(mode_populations(eff)[-1]))
    ok = rk4_err <= 1e-6 and picture_err <= 1e-6
    return CheckResult(
        "oracle_equivalence", 9, ok, limit_seconds=60.0,
        detail={"n_t": n_ts, "t": t, "rk4_vs_expm": rk4_err,
                "effective_vs_physical": picture_err, "top_level_population": top},
    )


def check_jump_increases_entanglement(ctx: ValidationContext) -> CheckResult:
    result = ctx.steady_scan()
    traced = result.column("neg_traced")
    k = int(np.nanargmax(traced))
    start = time.perf_counter()
    params = ModelParams(n_t=result.column("n_t")[k], cutoff=result.cutoffs_used[k]).with_kappa(
        result.column("kappa")[k]
    )
    record = jump_diagnostic(params, ctx.log_base)
    ok = record["neg_after_jump"] > record["neg_steady"]
    return CheckResult("jump_increases_entanglement", 10, ok, limit_seconds=10.0,
                       seconds=time.perf_counter() - start, detail=record)


CHECKS = {
    "closed_form_steady_state": check_closed_form_steady_state,
    "kappa0_separable": check_kappa0_separable,
    "bell_calibration": check_bell_calibration,
    "noise_resonance": check_noise_resonance,
    "double_resonance": check_double_resonance,
    "measurement_enhancement": check_measurement_enhancement,
    "large_kappa_scaling": check_large_kappa_scaling,
    "cutoff_convergence": check_cutoff_convergence,
    "oracle_equivalence": check_oracle_equivalence,
    "jump_increases_entanglement": check_jump_increases_entanglement,
}


def run_check(name: str, ctx: ValidationContext) -> CheckResult:
    """Run one named check; exceptions become a failed result, never propagate."""
    start = time.perf_counter()
    try:
        result = CHECKS[name](ctx)
    except CavityEntError as exc:
        criterion = list(CHECKS).index(name) + 1
        return CheckResult(name, criterion, False, time.perf_counter() - start,
                           detail={"error": f"{type(exc).__name__}: {exc}"})
    if not result.seconds:
        result.seconds = time.perf_counter() - start
    return result


def validate(config: dict | None = None) -> dict:
    """Run the named checks and return a report.

    ``config`` may hold ``only`` (a list of check names), ``log_base`` and
    ``jobs``.  The report's ``passed`` field is true only if every selected
    check passed.
    """
    config = dict(config or {})
    names = config.get("only") or list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    ctx = ValidationContext(config.get("log_base", entanglement.LOG_BASE), config.get("jobs", 1))
    results = [run_check(name, ctx) for name in names]
    return {
        "passed": all(r.passed for r in results),
        "checks": [r.as_dict() for r in results],
    }
