"""Parameter sweeps over noise intensity, cavity decay and time, plus the
photon-jump diagnostic.

Rows are produced in row-major order over the axes as listed in the
:class:`ScanSpec`, whatever the execution schedule, so CSV output is
byte-for-byte reproducible.
"""

from __future__ import annotations

import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import numerics
from .dynamics import (
    TRACE_DRIFT_TOL,
    build_superoperator,
    evolve_samples,
    jump_superoperator,
    solve_steady_state,
)
from .entanglement import LOG_BASE, atom_measured_negativity, traced_negativity
from .errors import JumpProbabilityError, NumericalError
from .model import (
    DensityMatrix,
    ModelParams,
    effective_to_physical,
    ground_vacuum,
    kappa0_physical_state,
    lowering_operator,
    mode_populations,
)

log = logging.getLogger(__name__)

AXIS_NAMES = ("n_t", "kappa", "t")
#: Largest top-level population accepted before the steady-state cutoff is raised.
TRUNCATION_TOL = 1e-10
MAX_ADAPTIVE_CUTOFF = 40


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    num: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if self.num < 2:
            raise ValueError("an axis needs at least 2 points")
        if not self.start < self.stop:
            raise ValueError(f"axis {self.name}: start must be below stop")
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if self.spacing == "log" and self.start <= 0:
            raise ValueError("log spacing needs a positive start")

    @property
    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.num)
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class ScanSpec:
    base: ModelParams
    axes: tuple[Axis, ...]
    dt: float | None = None
    log_base: float = LOG_BASE
    include_kappa0: bool = True
    cutoffs: tuple[int, ...] = ()
    out: str | None = None
    jobs: int = 1

    def axis(self, name: str) -> Axis:
        for ax in self.axes:
            if ax.name == name:
                return ax
        raise ValueError(f"scan has no {name!r} axis")

    def require_axes(self, *names: str) -> None:
        if sorted(ax.name for ax in self.axes) != sorted(names):
            raise ValueError(f"scan needs exactly the axes {names}")


def time_scan_spec(kappa: float = 2.0, grid_nt: int = 21, grid_t: int = 81, t_max: float = 20.0, **base) -> ScanSpec:
    """Noise/time scan at ``Gamma = 0.2``, ``g_a = g_b = 1``, cutoff 3.

    The decay rate defaults to 2; ``kappa=1.0`` gives the other commonly
    used setting.
    """
    params = ModelParams(**{"gamma": 0.2, "cutoff": 3, **base}).with_kappa(kappa)
    return ScanSpec(
        params,
        (Axis("n_t", 0.05, 5.0, grid_nt), Axis("t", 0.0, t_max, grid_t)),
    )


def steady_scan_spec(grid_nt: int = 25, grid_kappa: int = 25, **base) -> ScanSpec:
    """Steady-state scan over noise intensity and (log-spaced) cavity decay."""
    params = ModelParams(**{"gamma": 0.2, "cutoff": 3, **base})
    return ScanSpec(
        params,
        (Axis("n_t", 0.05, 5.0, grid_nt), Axis("kappa", 0.05, 10.0, grid_kappa, "log")),
    )


@dataclass
class ScanResult:
    """Table of scan rows; ``columns`` is the exact CSV header."""

    columns: list[str]
    rows: list[tuple]
    cutoffs_used: list[int] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([np.nan if r[i] is None else r[i] for r in self.rows], dtype=float)

    def flags(self) -> list[str]:
        i = self.columns.index("flag")
        return [r[i] for r in self.rows]

    def to_csv(self, target=None) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        text = buf.getvalue()
        if target is not None:
            Path(target).write_text(text, encoding="utf-8", newline="\n")
        return text


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    value = float(value)
    if value == 0.0:
        return "0"
    return f"{value:.12g}"


def columns(cutoff: int) -> list[str]:
    pops = [f"p{r}" for r in range(cutoff + 1)]
    return ["n_t", "kappa", "t", "neg_traced", "neg_measured", *pops, "trace_drift", "residual", "flag"]


def _negativities(rho_phys: DensityMatrix, base: float) -> tuple[float, float]:
    traced = traced_negativity(rho_phys, base).value
    measured = atom_measured_negativity(rho_phys, base).expected_negativity
    return traced, measured


def _pad(pops, cutoff: int) -> list[float]:
    out = [float(p) for p in pops[: cutoff + 1]]
    return out + [0.0] * (cutoff + 1 - len(out))


def _map(func, items, jobs: int):
    if jobs <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def time_series(
    params: ModelParams,
    times,
    dt: float | None = None,
    log_base: float = LOG_BASE,
) -> list[tuple]:
    """Scan rows for one parameter set, evolving from the ground state and vacuum."""
    times = np.asarray(times, dtype=float)
    layout = params.layout()
    traj = evolve_samples(params, layout, ground_vacuum(layout), times, dt)
    rows = []
    for t, state, drift in zip(times, traj.states, traj.trace_drift):
        phys = effective_to_physical(state, params)
        traced, measured = _negativities(phys, log_base)
        flag = "" if drift <= TRACE_DRIFT_TOL else "drift"
        rows.append(
            (params.n_t, params.kappa, float(t), traced, measured,
             *_pad(mode_populations(state), params.cutoff), float(drift), None, flag)
        )
    return rows


class _TimeColumn:
    """Picklable worker integrating one noise intensity over the whole time grid."""

    def __init__(self, spec: ScanSpec):
        self.spec = spec
        self.times = spec.axis("t").values

    def __call__(self, n_t: float) -> list[tuple]:
        params = self.spec.base.replace(n_t=float(n_t))
        return time_series(params, self.times, self.spec.dt, self.spec.log_base)


def scan_time(spec: ScanSpec) -> ScanResult:
    """Negativity versus noise intensity and time, starting from ground state and vacuum."""
    spec.require_axes("n_t", "t")
    spec.base.kappa  # symmetric decay required
    n_values = spec.axis("n_t").values
    per_n = _map(_TimeColumn(spec), list(n_values), spec.jobs)
    if spec.axes[0].name == "n_t":
        rows = [row for col in per_n for row in col]
    else:
        rows = [col[j] for j in range(len(per_n[0])) for col in per_n]
    result = ScanResult(columns(spec.base.cutoff), rows, [spec.base.cutoff] * len(rows))
    if spec.out:
        result.to_csv(spec.out)
    return result


def adaptive_steady_state(
    params: ModelParams,
    truncation_tol: float = TRUNCATION_TOL,
    max_cutoff: int = MAX_ADAPTIVE_CUTOFF,
):
    """Effective-picture steady state, raising the cutoff until the top level is empty.

    Returns ``(solution, converged)``.
    """
    cutoff = params.cutoff
    while True:
        p = params.replace(cutoff=cutoff)
        sol = solve_steady_state(p, p.layout(), sector=True)
        top = mode_populations(sol.state)[-1]
        if top <= truncation_tol:
            return sol, True
        if cutoff >= max_cutoff:
            return sol, False
        cutoff = min(max_cutoff, cutoff + max(2, cutoff // 2))


class _SteadyPoint:
    def __init__(self, spec: ScanSpec):
        self.spec = spec

    def __call__(self, point: tuple[float, float]) -> tuple:
        n_t, kappa = point
        spec = self.spec
        params = spec.base.replace(n_t=float(n_t)).with_kappa(float(kappa))
        cutoff = params.cutoff
        if kappa == 0.0:
            phys = kappa0_physical_state(params)
            traced, measured = _negativities(phys, spec.log_base)
            x = n_t / (1.0 + n_t)
            pops = [x**r * (1.0 - x) for r in range(cutoff + 1)]
            return (float(n_t), 0.0, None, traced, measured, *pops, 0.0, 0.0, ""), cutoff
        try:
            sol, converged = adaptive_steady_state(params, TRUNCATION_TOL, MAX_ADAPTIVE_CUTOFF)
        except NumericalError as exc:
            log.warning("steady state failed at n_t=%g kappa=%g: %s", n_t, kappa, exc)
            nan = float("nan")
            return (float(n_t), float(kappa), None, nan, nan, *[nan] * (cutoff + 1),
                    nan, nan, type(exc).__name__), cutoff
        p = params.replace(cutoff=sol.state.layout.cutoff)
        phys = effective_to_physical(sol.state, p)
        traced, measured = _negativities(phys, spec.log_base)
        flag = "" if converged else "truncation"
        return (float(n_t), float(kappa), None, traced, measured,
                *_pad(mode_populations(sol.state), cutoff), sol.trace_error, sol.residual,
                flag), p.cutoff


def scan_steady(spec: ScanSpec) -> ScanResult:
    """Steady-state negativity over noise intensity and cavity decay.

    When ``include_kappa0`` is set and the decay axis starts above zero, a
    ``kappa = 0`` line is added ahead of the axis values; that line uses the
    closed-form lossless stationary state.  All other points raise the cutoff
    from ``spec.base.cutoff`` until the top photon level is empty.
    """
    spec.require_axes("n_t", "kappa")
    kappas = list(spec.axis("kappa").values)
    if spec.include_kappa0 and kappas[0] > 0:
        kappas = [0.0, *kappas]
    n_values = list(spec.axis("n_t").values)
    if spec.axes[0].name == "n_t":
        points = [(n, k) for n in n_values for k in kappas]
    else:
        points = [(n, k) for k in kappas for n in n_values]
    out = _map(_SteadyPoint(spec), points, spec.jobs)
    result = ScanResult(columns(spec.base.cutoff), [r for r, _ in out], [c for _, c in out])
    if spec.out:
        result.to_csv(spec.out)
    return result


def steady_grid(result: ScanResult, column: str = "neg_traced"):
    """Reshape a steady scan into ``(n_t values, kappa values, values[n_t, kappa])``."""
    n = result.column("n_t")
    k = result.column("kappa")
    n_vals = np.unique(n)
    k_vals = np.unique(k)
    grid = np.full((n_vals.size, k_vals.size), np.nan)
    vals = result.column(column)
    for a, b, v in zip(n, k, vals):
        grid[np.searchsorted(n_vals, a), np.searchsorted(k_vals, b)] = v
    return n_vals, k_vals, grid


def time_grid(result: ScanResult, column: str = "neg_traced"):
    """Reshape a time scan into ``(n_t values, t values, values[n_t, t])``."""
    n = result.column("n_t")
    t = result.column("t")
    n_vals = np.unique(n)
    t_vals = np.unique(t)
    grid = np.full((n_vals.size, t_vals.size), np.nan)
    for a, b, v in zip(n, t, result.column(column)):
        grid[np.searchsorted(n_vals, a), np.searchsorted(t_vals, b)] = v
    return n_vals, t_vals, grid


JUMP_RECORD_KEYS = (
    "g_a", "g_b", "kappa", "gamma", "n_t", "cutoff", "tau",
    "neg_steady", "neg_after_jump", "neg_no_jump",
)


def jump_diagnostic(params: ModelParams, log_base: float = LOG_BASE, tau: float | None = None) -> dict:
    """Negativity of the steady state, after one cavity photon jump, and after a
    short stretch of conditional no-jump evolution.

    The jump applies ``c`` (``a + b`` up to normalisation in the physical
    picture).  The no-jump branch evolves for ``tau = 0.1 / kappa`` under the
    master equation with the cavity jump term removed, i.e. the non-Hermitian
    ``H - i kappa c^dag c`` plus the full atomic dissipators, then renormalises.
    """
    kappa = params.kappa
    if kappa <= 0 or params.n_t <= 0:
        raise ValueError("jump diagnostic needs kappa > 0 and n_t > 0")
    tau = 0.1 / kappa if tau is None else float(tau)
    layout = params.layout()
    rho = solve_steady_state(params, layout).state
    c = lowering_operator(layout, 1)

    jumped = c @ rho.mat @ c.conj().T
    prob = np.trace(jumped).real
    if prob < 1e-12:
        raise JumpProbabilityError(f"tr[c rho c^dag] = {prob:.3e}: cavity is empty")
    jumped = DensityMatrix(layout, jumped / prob)

    gen = build_superoperator(params, layout).mat - jump_superoperator(kappa, c)
    y = numerics.matrix_exponential(gen * tau) @ numerics.vec(rho.mat)
    no_jump = numerics.unvec(y, layout.dim)
    no_jump = DensityMatrix(layout, 0.5 * (no_jump + no_jump.conj().T) / np.trace(no_jump).real)

    def neg(state):
        return traced_negativity(effective_to_physical(state, params), log_base).value

    return {
        "g_a": params.g_a,
        "g_b": params.g_b,
        "kappa": kappa,
        "gamma": params.gamma,
        "n_t": params.n_t,
        "cutoff": params.cutoff,
        "tau": tau,
        "neg_steady": neg(rho),
        "neg_after_jump": neg(jumped),
        "neg_no_jump": neg(no_jump),
    }


def unimodal(values, slack: float = 1e-6) -> bool:
    """True if ``values`` rise to a single interior maximum and then fall."""
    values = np.asarray(values, dtype=float)
    peak = int(np.argmax(values))
    if peak in (0, values.size - 1):
        return False
    rising = np.all(np.diff(values[: peak + 1]) > -slack)
    falling = np.all(np.diff(values[peak:]) < slack)
    return bool(rising and falling)


def loglog_slope(x, y) -> float:
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    xm, ym = x.mean(), y.mean()
    return float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))


__all__ = [
    "Axis", "ScanSpec", "ScanResult", "time_scan_spec", "steady_scan_spec", "scan_time", "scan_steady",
    "time_series", "columns",
    "adaptive_steady_state", "steady_grid", "time_grid", "jump_diagnostic", "JUMP_RECORD_KEYS",
    "unimodal", "loglog_slope",
]
