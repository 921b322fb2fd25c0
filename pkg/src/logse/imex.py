"""First-order IMEX finite-element time stepping for the logarithmic Schrödinger equation.

Each step solves the linear problem

    (i/τ) M u^{n+1} - S u^{n+1} = (i/τ) M u^n + 2λ (f(u^n), φ)

with ``f(z) = z ln|z|``, so the Laplacian is implicit and the logarithmic
term explicit.  The system matrix depends only on ``(mesh, τ)`` and is
factored once per run.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import banded
from .fem import (
    CoefficientVector,
    FunctionSpace,
    assemble_load_f,
    assemble_mass,
    assemble_stiffness,
    rule_for,
)
from .mesh import Mesh
from .nonlinearity import f as log_f

log = logging.getLogger(__name__)


def n_steps(T: float, tau: float) -> int:
    """``floor(T / tau)``, tolerant of the rounding in ratios like ``0.3 / 0.1``."""
    q = T / tau
    k = round(q)
    return int(k) if abs(q - k) <= 1e-9 * max(1.0, q) else int(math.floor(q))


@dataclass
class SchemeConfig:
    """Discretisation parameters.

    ``boundary`` is ``None`` for homogeneous Dirichlet data, otherwise a
    callable ``g(*coords, t)`` giving the exact trace.  ``quad_order`` is the
    polynomial exactness of the quadrature (``None`` for the default rule).
    """

    tau: float
    T: float
    lam: float = -1.0
    degree: int = 1
    boundary: Callable | None = None
    quad_order: int | None = None
    record_every: int = 1

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.T < self.tau * (1 - 1e-12):
            raise ValueError(f"T={self.T} is shorter than one step tau={self.tau}")
        if self.degree not in (1, 2):
            raise ValueError(f"degree must be 1 or 2, got {self.degree}")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")

    @property
    def n_steps(self) -> int:
        return n_steps(self.T, self.tau)

    @property
    def boundary_mode(self) -> str:
        return "homogeneous" if self.boundary is None else "exact-trace"


def check_constraints(tau: float, h: float, degree: int, dim: int = 1):
    """Return messages for violated step-size hypotheses and the ratio ``tau / h^(d/2)``."""
    issues = []
    if tau > math.exp(-1):
        issues.append(f"tau={tau:g} exceeds e^-1")
    if h ** (degree + 1) > math.exp(-1):
        issues.append(f"h^(r+1)={h ** (degree + 1):g} exceeds e^-1")
    return issues, tau / h ** (dim / 2)


@dataclass
class TimeSeries:
    times: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    linf: list = field(default_factory=list)

    def append(self, t, mass, energy, linf):
        self.times.append(float(t))
        self.mass.append(float(mass))
        self.energy.append(float(energy))
        self.linf.append(float(linf))

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.times, self.mass, self.energy, self.linf])


def observables(space: FunctionSpace, u, lam: float, quad=None, S=None):
    """Mass ``∫|u_h|^2`` and energy ``||∇u_h||^2 + λ ∫|u_h|^2 ln|u_h|^2``."""
    values = u.values if isinstance(u, CoefficientVector) else np.asarray(u)
    quad = space.quad if quad is None else quad
    data = space.element_data(quad)
    uq, duq = space.evaluate(values, quad)
    r2 = np.abs(uq) ** 2
    mass = float(np.sum(data.wdet * r2))
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = np.where(r2 > 0, r2 * np.log(r2), 0.0)
    grad2 = float(np.sum(data.wdet * np.sum(np.abs(duq) ** 2, axis=-1)))
    return mass, grad2 + lam * float(np.sum(data.wdet * dens))


class IMEXSolver:
    """Owns the matrices and the single factorization for one ``(mesh, τ)``."""

    def __init__(self, mesh: Mesh, cfg: SchemeConfig, check_residual: bool = False):
        self.cfg = cfg
        self.space = FunctionSpace(mesh, cfg.degree, rule_for(mesh.dim, cfg.quad_order, cfg.degree))
        self.quad = self.space.quad
        self.M = assemble_mass(self.space)
        self.S = assemble_stiffness(self.space)
        self.A = banded.build_step_matrix(self.M, self.S, cfg.tau)
        self.interior = self.space.interior_dofs
        self.boundary = self.space.boundary_dofs
        self.A_interior = self.A.restrict(self.interior)
        self.factorization = banded.factor(self.A_interior)
        self.check_residual = check_residual
        self.max_residual = 0.0

    def boundary_values(self, t: float) -> np.ndarray:
        if self.cfg.boundary is None:
            return np.zeros(self.boundary.size, dtype=complex)
        pts = self.space.dof_coords[self.boundary]
        return np.asarray(self.cfg.boundary(*pts.T, t), dtype=complex)

    def rhs(self, values: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        return (1j / cfg.tau) * self.M.matvec(values) + 2 * cfg.lam * assemble_load_f(
            self.space, values, self.quad
        )

    def step(self, u: CoefficientVector, t_n: float) -> CoefficientVector:
        """Advance ``u^n`` at ``t_n`` to ``u^{n+1}``."""
        values = u.values if isinstance(u, CoefficientVector) else np.asarray(u, dtype=complex)
        new = np.zeros(self.space.n_dofs, dtype=complex)
        new[self.boundary] = self.boundary_values(t_n + self.cfg.tau)
        b = self.rhs(values) - self.A.matvec(new)
        b_in = b[self.interior]
        x = banded.solve(self.factorization, b_in)
        if self.check_residual and b_in.size:
            res = np.linalg.norm(self.A_interior.matvec(x) - b_in)
            scale = np.linalg.norm(b_in)
            self.max_residual = max(self.max_residual, res / scale if scale else res)
        new[self.interior] = x
        return CoefficientVector(new, self.space)

    def observe(self, u: CoefficientVector):
        mass, energy = observables(self.space, u, self.cfg.lam, self.quad)
        return mass, energy, float(np.max(np.abs(u.values)))

    def run(self, u0: CoefficientVector, callback: Callable | None = None):
        """Take ``N_t`` steps from ``u0``.

        ``callback(n, t_n, u)`` is invoked after every step (and once at
        ``n = 0``).  Returns the final state and the recorded observables.
        """
        cfg = self.cfg
        if isinstance(u0, CoefficientVector) and u0.space.n_dofs != self.space.n_dofs:
            raise ValueError("initial data lives on a different space")
        u = u0 if isinstance(u0, CoefficientVector) else CoefficientVector(u0, self.space)
        u = CoefficientVector(u.values, self.space)
        series = TimeSeries()
        series.append(0.0, *self.observe(u))
        if callback is not None:
            callback(0, 0.0, u)
        N = cfg.n_steps
        for n in range(N):
            t = n * cfg.tau
            u = self.step(u, t)
            t_next = (n + 1) * cfg.tau
            if (n + 1) % cfg.record_every == 0 or n + 1 == N:
                series.append(t_next, *self.observe(u))
            if callback is not None:
                callback(n + 1, t_next, u)
        return u, series


def run(u0: CoefficientVector, cfg: SchemeConfig, mesh: Mesh | None = None):
    """Build a solver on ``u0``'s mesh and advance ``cfg.n_steps`` steps."""
    mesh = u0.space.mesh if mesh is None else mesh
    return IMEXSolver(mesh, cfg).run(u0)


@dataclass
class TruncationReport:
    tau: float
    times: np.ndarray
    norms: np.ndarray
    bounds: np.ndarray
    bounds_laplacian: np.ndarray

    @property
    def max_norm(self) -> float:
        return float(np.max(self.norms))

    @property
    def satisfied(self) -> bool:
        return bool(np.all(self.norms**2 <= self.bounds))


def truncation_check(exact, mesh: Mesh, cfg: SchemeConfig, n_sub: int = 4,
                     quad_order: int = 11) -> TruncationReport:
    """Truncation error ``T^n = i(D_τ u^n - u_t^n) + Δ(u^{n+1} - u^n)`` of an exact solution.

    ``exact`` must provide ``u``, ``u_t``, ``u_tt``, ``lap_u``, ``grad_u_t``,
    ``hess_u_t`` and ``lap_u_t``, each called as ``(xs, t)``.  The
    reference bound per step is

        (2/3) τ^2 max ||u_tt||^2 + 2 τ^2 max ||u_t||_{H^2}^2

    with maxima sampled at ``n_sub + 1`` points of ``[t_n, t_{n+1}]``;
    ``bounds_laplacian`` uses ``||Δu_t||`` in place of the full H^2 norm.
    """
    required = ("u", "u_t", "u_tt", "lap_u", "grad_u_t", "hess_u_t", "lap_u_t")
    missing = [name for name in required if not callable(getattr(exact, name, None))]
    if missing:
        raise ValueError(f"exact solution lacks derivative callbacks: {missing}")
    space = FunctionSpace(mesh, 1, rule_for(mesh.dim, quad_order, 1))
    data = space.element_data()
    w = data.wdet
    xs = tuple(data.xq[..., k] for k in range(mesh.dim))

    def sq(v):
        return float(np.sum(w * np.abs(v) ** 2))

    tau = cfg.tau
    N = cfg.n_steps
    times = tau * np.arange(N)
    norms = np.empty(N)
    bounds = np.empty(N)
    blap = np.empty(N)
    u_next, lap_next = exact.u(xs, 0.0), exact.lap_u(xs, 0.0)
    for n in range(N):
        t = times[n]
        u_now, lap_now = u_next, lap_next
        u_next, lap_next = exact.u(xs, t + tau), exact.lap_u(xs, t + tau)
        T = 1j * ((u_next - u_now) / tau - exact.u_t(xs, t)) + (lap_next - lap_now)
        norms[n] = math.sqrt(sq(T))
        utt = h2 = lap = 0.0
        for s in np.linspace(t, t + tau, n_sub + 1):
            utt = max(utt, sq(exact.u_tt(xs, s)))
            grad = exact.grad_u_t(xs, s)
            hess = exact.hess_u_t(xs, s)
            h2 = max(h2, sq(exact.u_t(xs, s)) + sum(sq(g) for g in grad)
                     + sum(sq(hjk) for row in hess for hjk in row))
            lap = max(lap, sq(exact.lap_u_t(xs, s)))
        bounds[n] = (2 / 3) * tau**2 * utt + 2 * tau**2 * h2
        blap[n] = (2 / 3) * tau**2 * utt + 2 * tau**2 * lap
    return TruncationReport(tau, times, norms, bounds, blap)


def pde_residual(exact, xs, t, lam: float):
    """``i u_t + Δu - λ u ln|u|^2`` evaluated pointwise; zero for an exact solution."""
    u = exact.u(xs, t)
    return 1j * exact.u_t(xs, t) + exact.lap_u(xs, t) - 2 * lam * log_f(u)
