"""Numerical experiments: convergence studies, dynamics runs and randomized bound checks.

Every driver returns plain data (tables, snapshot arrays, reports); writing
files is left to the caller or to :mod:`logse.cli`.
"""

from __future__ import annotations

import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import nonlinearity as nl
from .fem import error_norms, interpolate
from .gronwall import GronwallParams, gronwall_bound, gronwall_relaxed_bound, maximal_sequence_oracle
from .imex import IMEXSolver, SchemeConfig, TimeSeries, check_constraints, truncation_check
from .mesh import Mesh, structured_triangulation, uniform_interval
from .solutions import TWO_GAUSSON_CASES, GaussonSpec, TwoGaussonSpec, tanh_product

log = logging.getLogger(__name__)

FLOAT_FMT = "%.17g"


class SolverFailure(RuntimeError):
    """The discrete solution became non-finite or the linear solve failed."""


def gausson_eval(spec: GaussonSpec, x, t: float) -> complex:
    """Value of the Gausson at a single point ``x`` (scalar or length-``d`` sequence)."""
    xs = tuple(np.atleast_1d(np.asarray(x, dtype=float)))
    return complex(spec.u(xs, t))


def fit_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit a slope")
    A = np.column_stack([np.log(x), np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, np.log(y), rcond=None)
    return float(coef[0])


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    tau: float
    e2: float
    einf: float
    L2: float


@dataclass
class ConvergenceTable:
    """Errors per refinement; ``refined`` names the column used as abscissa."""

    refined: str
    rows: list = field(default_factory=list)

    COLUMNS = ("h", "tau", "e2", "einf", "L2")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def slope(self, name: str = "e2") -> float:
        return fit_slope(self.column(self.refined), self.column(name))

    @property
    def slopes(self) -> dict:
        return {name: self.slope(name) for name in ("e2", "einf", "L2")}

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.COLUMNS) + "\n")
        for r in self.rows:
            buf.write(",".join(FLOAT_FMT % getattr(r, c) for c in self.COLUMNS) + "\n")
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text

    def slopes_csv(self) -> str:
        s = self.slopes
        return "column,slope\n" + "".join(f"{k},{FLOAT_FMT % v}\n" for k, v in s.items())


def _map(fn: Callable, jobs: Sequence, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))  # map preserves job order


def box_mesh(dim: int, n_cells: int, half_width: float = 1.0) -> Mesh:
    """``(-L, L)^d`` with ``n_cells`` cells per axis."""
    if dim == 1:
        return uniform_interval(-half_width, half_width, n_cells)
    return structured_triangulation(((-half_width, half_width),) * 2, n_cells, n_cells)


@dataclass(frozen=True)
class GaussonJob:
    spec: GaussonSpec
    n_cells: int
    tau: float
    T: float
    degree: int


def gausson_errors(job: GaussonJob) -> ConvergenceRow:
    """Run the scheme against the exact Gausson and return the errors at ``t = N_t τ``."""
    spec = job.spec
    mesh = box_mesh(spec.d, job.n_cells)
    cfg = SchemeConfig(tau=job.tau, T=job.T, lam=spec.lam, degree=job.degree, boundary=spec.trace())
    issues, _ = check_constraints(job.tau, 2.0 / job.n_cells, job.degree, spec.d)
    for msg in issues:
        log.warning("constraint: %s", msg)
    solver = IMEXSolver(mesh, cfg)
    u, _ = solver.run(interpolate(solver.space, spec.initial()))
    if not np.all(np.isfinite(u.values)):
        raise SolverFailure("non-finite values in the discrete solution")
    t_end = cfg.n_steps * cfg.tau
    err = error_norms(solver.space, u, lambda *c: spec.u(c, t_end))
    return ConvergenceRow(2.0 / job.n_cells, job.tau, err.l2, err.linf, err.L2)


def _table(refined: str, jobs, workers: int) -> ConvergenceTable:
    rows = _map(gausson_errors, jobs, workers)
    key = (lambda r: -r.tau) if refined == "tau" else (lambda r: -r.h)
    return ConvergenceTable(refined, sorted(rows, key=key))


DEFAULT_GAUSSON = GaussonSpec(d=1, b=1.0, lam=-1.0)


def converge_time(spec: GaussonSpec = DEFAULT_GAUSSON, h: float = 2**-5,
                  taus: Sequence[float] | None = None, r: int = 1, T: float = 1.0,
                  workers: int = 1) -> ConvergenceTable:
    """Fixed mesh on ``(-1, 1)^d``, varying time step.

    Defaults are ``τ_j = 0.1 · 2^-j`` in 1D and ``0.01 · 2^-j`` in 2D, ``j = 1..5``.
    """
    if taus is None:
        base = 0.1 if spec.d == 1 else 0.01
        taus = [base * 2.0**-j for j in range(1, 6)]
    n = int(round(2.0 / h))
    return _table("tau", [GaussonJob(spec, n, tau, T, r) for tau in taus], workers)


def default_space_steps(r: int) -> list:
    if r == 1:
        return [2.0**-j for j in range(1, 6)]
    return [1.0 / (j + 1) for j in range(1, 6)]


def converge_space(spec: GaussonSpec = DEFAULT_GAUSSON, tau: float = 1e-4,
                   hs: Sequence[float] | None = None, r: int = 1, T: float = 0.01,
                   long: bool = False, workers: int = 1) -> ConvergenceTable:
    """Fixed small time step, varying mesh size.

    ``long=True`` switches to ``τ = 1e-5, T = 1``, which takes minutes.
    """
    if long:
        tau, T = 1e-5, 1.0
    hs = default_space_steps(r) if hs is None else hs
    jobs = [GaussonJob(spec, int(round(2.0 / h)), tau, T, r) for h in hs]
    return _table("h", jobs, workers)


def converge_2d_combined(spec: GaussonSpec | None = None, js: Sequence[int] = (1, 2, 3, 4),
                         T: float = 1.0, workers: int = 1) -> ConvergenceTable:
    """``h_j = 1/(20+4j)`` (cell side), ``τ_j = h_j^2``; errors against ``h``."""
    spec = GaussonSpec(d=2, b=1.0, lam=-1.0) if spec is None else spec
    jobs = []
    for j in js:
        h = 1.0 / (20 + 4 * j)
        jobs.append(GaussonJob(spec, 2 * (20 + 4 * j), h * h, T, 1))
    return _table("h", jobs, workers)


# ---------------------------------------------------------------- dynamics


@dataclass
class Snapshots:
    """``values[k]`` is the complex solution at ``times[k]`` on ``coords``."""

    coords: np.ndarray
    times: list = field(default_factory=list)
    values: list = field(default_factory=list)

    def at(self, t: float) -> np.ndarray:
        k = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        if abs(self.times[k] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t={t}")
        return self.values[k]

    def rows(self, k: int) -> np.ndarray:
        """``coords..., |u|, Re u, Im u`` per node."""
        u = self.values[k]
        return np.column_stack([self.coords, np.abs(u), u.real, u.imag])


def _snapshot_steps(times: Sequence[float], tau: float) -> dict:
    steps = {}
    for t in times:
        n = int(round(t / tau))
        if abs(n * tau - t) > 1e-9 * max(1.0, t):
            raise ValueError(f"snapshot time {t} is not a multiple of tau={tau}")
        steps[n] = float(t)
    return steps


def _run_with_snapshots(mesh: Mesh, cfg: SchemeConfig, u0: Callable, times: Sequence[float]):
    solver = IMEXSolver(mesh, cfg)
    steps = _snapshot_steps(times, cfg.tau)
    snaps = Snapshots(solver.space.dof_coords.copy())

    def grab(n, t, u):
        if n in steps:
            snaps.times.append(steps[n])
            snaps.values.append(u.values.copy())

    u, series = solver.run(interpolate(solver.space, u0), callback=grab)
    if not np.all(np.isfinite(u.values)):
        raise SolverFailure("non-finite values in the discrete solution")
    return snaps, series


def dynamics_two_gausson(case: str | TwoGaussonSpec = "i", T: float = 1.0, tau: float = 1e-4,
                         h: float = 0.05, lam: float = -1.0, times: Sequence[float] | None = None,
                         record_every: int = 100):
    """Two Gaussian bumps on ``(-40, 40)`` with zero boundary data."""
    spec = TWO_GAUSSON_CASES[case] if isinstance(case, str) else case
    mesh = uniform_interval(-40.0, 40.0, int(round(80.0 / h)))
    cfg = SchemeConfig(tau=tau, T=T, lam=lam, record_every=record_every)
    times = np.linspace(0.0, cfg.n_steps * tau, 5) if times is None else times
    return _run_with_snapshots(mesh, cfg, spec, times)


def dynamics_2d_tanh(T: float = 0.5, tau: float = 1e-4, cell: float = 0.1, lam: float = -1.0,
                     times: Sequence[float] = (0.0, 0.25, 0.5), record_every: int = 100):
    """``tanh(x) tanh(y) exp(-x^2-y^2)`` on ``(-10, 10)^2`` with zero boundary data."""
    n = int(round(20.0 / cell))
    mesh = structured_triangulation(((-10.0, 10.0), (-10.0, 10.0)), n, n)
    cfg = SchemeConfig(tau=tau, T=T, lam=lam, record_every=record_every)
    times = [t for t in times if t <= cfg.n_steps * tau + 1e-12]
    return _run_with_snapshots(mesh, cfg, tanh_product, times)


def local_maxima(x: np.ndarray, a: np.ndarray, rel_height: float = 0.1) -> np.ndarray:
    """Abscissae of strict interior local maxima of ``a`` above ``rel_height · max a``."""
    order = np.argsort(x)
    x, a = x[order], a[order]
    idx = np.flatnonzero((a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:])) + 1
    return x[idx[a[idx] >= rel_height * a.max()]]


def reflection_asymmetry(coords: np.ndarray, values: np.ndarray, axis: int = 0) -> float:
    """``max |v(p) - v(R p)|`` where ``R`` flips the sign of coordinate ``axis``."""
    key = np.round(coords, 9)
    flipped = key.copy()
    flipped[:, axis] = -flipped[:, axis]
    flipped = np.round(flipped, 9) + 0.0  # normalise -0.0
    lookup = {tuple(p): i for i, p in enumerate(key + 0.0)}
    partner = np.array([lookup[tuple(p)] for p in flipped])
    return float(np.max(np.abs(values - values[partner])))


def write_snapshot(stream, rows: np.ndarray, header: str) -> None:
    stream.write(header + "\n")
    np.savetxt(stream, rows, fmt=FLOAT_FMT)


def write_series(stream, series: TimeSeries) -> None:
    stream.write("t mass energy linf\n")
    np.savetxt(stream, series.as_array(), fmt=FLOAT_FMT)


# --------------------------------------------------------- truncation study


def truncation_study(spec: GaussonSpec = DEFAULT_GAUSSON, taus: Sequence[float] = (1e-2, 5e-3, 2.5e-3),
                     T: float = 1.0, n_cells: int = 64):
    """Truncation reports for each ``τ`` on ``(-1, 1)^d``."""
    mesh = box_mesh(spec.d, n_cells)
    return [truncation_check(spec, mesh, SchemeConfig(tau=tau, T=T, lam=spec.lam)) for tau in taus]


# ------------------------------------------------------- randomized checks


@dataclass
class CheckResult:
    name: str
    samples: int
    violations: int
    worst: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass
class LemmaReport:
    seed: int
    generator: str
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def text(self) -> str:
        lines = [f"generator {self.generator}", f"seed {self.seed}"]
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"{status} {r.name} samples={r.samples} violations={r.violations}")
            if r.worst:
                lines.append(f"  first counterexample: {r.worst}")
        return "\n".join(lines) + "\n"


def _disk(rng, n, radius):
    r = radius * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


def _tally(name, ok, *arrays) -> CheckResult:
    ok = np.asarray(ok, dtype=bool)
    bad = np.flatnonzero(~ok)
    worst = ""
    if bad.size:
        k = bad[0]
        worst = " ".join(repr(complex(a[k])) if np.ndim(a) else repr(a) for a in arrays)
    return CheckResult(name, ok.size, int(bad.size), worst)


def verify_lemmas(seed: int = 0, n_samples: int = 100_000, slack: float = 1e-12) -> LemmaReport:
    """Randomized checks of the pointwise and integral bounds on ``f`` and of the Grönwall bound."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    bitgen = np.random.PCG64(seed)
    rng = np.random.Generator(bitgen)
    report = LemmaReport(seed, type(bitgen).__name__)
    n = n_samples
    tiny = 1e-300

    u, v = _disk(rng, n, 10.0), _disk(rng, n, 10.0)
    report.results.append(_tally("lipschitz", nl.check_lipschitz_bound(u, v, slack), u, v))
    a, b = tiny * np.exp(2j * np.pi * rng.random(n)), _disk(rng, n, 1.0)
    report.results.append(_tally("lipschitz_near_zero", nl.check_lipschitz_bound(a, b, slack), a, b))

    eps = math.exp(-1)
    u, v = _disk(rng, n, eps), _disk(rng, n, eps)
    report.results.append(_tally("holder_alpha_half", nl.check_holder_bound(u, v, 0.5, eps, slack), u, v))
    a, b = tiny * np.exp(2j * np.pi * rng.random(n)), _disk(rng, n, eps)
    report.results.append(_tally("holder_near_zero", nl.check_holder_bound(a, b, 0.5, eps, slack), a, b))

    u, v = _disk(rng, n, 100.0), _disk(rng, n, 100.0)
    report.results.append(_tally("imaginary_part", nl.check_imaginary_inequality(u, v, slack), u, v))
    report.results.append(_tally("imaginary_near_zero",
                                 nl.check_imaginary_inequality(a, b, slack), a, b))

    report.results.append(_l2_split_check(rng, n, slack, mixed=True))
    report.results.append(_l2_split_check(rng, n, slack, mixed=False))
    report.results.append(_gronwall_check(rng, max(1, n // 100), slack))
    return report


def _l2_split_check(rng, n_samples: int, slack: float, mixed: bool) -> CheckResult:
    """Batches of 32 co-located pairs, all inside the ε-disk or straddling it."""
    per = 32
    trials = max(1, -(-n_samples // per))
    bad = 0
    worst = ""
    for _ in range(trials):
        alpha = rng.uniform(0.3, 0.95) if mixed else 0.5
        eps = nl.delta_alpha(alpha) * rng.uniform(0.05, 1.0)
        if mixed:
            u, v = _disk(rng, per, 5.0), _disk(rng, per, 5.0)
            u[: per // 4] *= eps / 5.0
        else:
            u, v = _disk(rng, per, eps), _disk(rng, per, eps)
        lhs, rhs = nl.l2_split_bound(u, v, rng.random(per), alpha, eps)
        if not lhs <= rhs * (1 + slack) + slack:
            bad += 1
            worst = worst or f"alpha={alpha!r} eps={eps!r} lhs={lhs!r} rhs={rhs!r}"
    name = "l2_split_straddling" if mixed else "l2_split_inside"
    return CheckResult(name, trials * per, bad, worst)


def _gronwall_check(rng, draws: int, slack: float, n_max: int = 50) -> CheckResult:
    bad = 0
    worst = ""
    for _ in range(draws):
        p = GronwallParams(rng.uniform(0.01, 3), rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0.01, 1))
        y = maximal_sequence_oracle(p, n_max)
        for n in range(n_max + 1):
            b = gronwall_bound(p, n)
            if not (y[n] <= b * (1 + slack) and b <= gronwall_relaxed_bound(p, n) * (1 + slack)):
                bad += 1
                worst = worst or f"{p} n={n}"
    return CheckResult("gronwall_chain", draws * (n_max + 1), bad, worst)
