"""Lagrange finite elements (P1/P2 in 1D, P1 on triangles).

Assembly of mass/stiffness matrices and of the logarithmic load, nodal
interpolation, Ritz projection and error norms.

Pointwise callables follow the numpy convention ``g(x)`` in 1D and
``g(x, y)`` in 2D, with array arguments of any matching shape.  Gradients
return an array in 1D and a tuple ``(gx, gy)`` in 2D.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .banded import BandedMatrix, factor, solve
from .mesh import Mesh
from .nonlinearity import f as log_f
from .quadrature import QuadratureRule, default_rule, gauss_legendre, triangle_rule


def reference_basis(dim: int, degree: int, pts: np.ndarray):
    """Values ``(nq, nloc)`` and reference gradients ``(nq, nloc, dim)``.

    Local ordering: 1D P1 ``[left, right]``, 1D P2 ``[left, mid, right]``,
    triangle P1 ``[v0, v1, v2]``.
    """
    pts = np.asarray(pts, dtype=float)
    if dim == 1:
        s = pts[:, 0]
        if degree == 1:
            phi = np.column_stack([1 - s, s])
            dphi = np.column_stack([-np.ones_like(s), np.ones_like(s)])
        elif degree == 2:
            phi = np.column_stack([2 * (s - 0.5) * (s - 1), -4 * s * (s - 1), 2 * s * (s - 0.5)])
            dphi = np.column_stack([4 * s - 3, 4 - 8 * s, 4 * s - 1])
        else:
            raise ValueError(f"unsupported degree {degree} in 1D")
        return phi, dphi[:, :, None]
    if dim == 2 and degree == 1:
        s, t = pts[:, 0], pts[:, 1]
        phi = np.column_stack([1 - s - t, s, t])
        dphi = np.broadcast_to(np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]), (len(s), 3, 2))
        return phi, dphi.copy()
    raise ValueError(f"unsupported degree {degree} in {dim}D")


def rule_for(dim: int, order: int | None, degree: int) -> QuadratureRule:
    """Quadrature exact to polynomial ``order`` (``None`` selects the assembly default)."""
    if order is None:
        return default_rule(dim, degree)
    if dim == 1:
        return gauss_legendre(max(1, (order + 2) // 2))
    return triangle_rule(order)


class ElementData(NamedTuple):
    phi: np.ndarray  # (nq, nloc)
    dphi: np.ndarray  # (E, nq, nloc, dim) physical gradients
    wdet: np.ndarray  # (E, nq) weight times Jacobian determinant
    xq: np.ndarray  # (E, nq, dim) physical quadrature points


class FunctionSpace:
    """Continuous Lagrange space of degree ``degree`` on ``mesh``.

    Degrees of freedom are ordered by position so the assembled matrices
    are banded: in 1D P2 the midpoint of element ``k`` sits between its
    two vertices (global index ``2k + 1``).
    """

    def __init__(self, mesh: Mesh, degree: int, quad: QuadratureRule | None = None):
        if degree < 1 or degree > mesh.degree_support:
            raise ValueError(
                f"degree {degree} not supported on this mesh (max {mesh.degree_support})"
            )
        self.mesh = mesh
        self.degree = degree
        self.dim = mesh.dim
        self.quad = quad if quad is not None else default_rule(mesh.dim, degree)
        self._cache = {}

        if mesh.dim == 1 and degree == 2:
            E = mesh.n_elements
            x = mesh.nodes[:, 0]
            coords = np.empty(2 * E + 1)
            coords[0::2] = x
            coords[1::2] = 0.5 * (x[:-1] + x[1:])
            self.cell_dofs = np.column_stack([2 * np.arange(E), 2 * np.arange(E) + 1, 2 * np.arange(E) + 2])
            self.dof_coords = coords[:, None]
            self.boundary_dofs = 2 * mesh.boundary_nodes
        else:
            self.cell_dofs = mesh.elements
            self.dof_coords = mesh.nodes
            self.boundary_dofs = mesh.boundary_nodes
        self.n_dofs = self.dof_coords.shape[0]
        is_bdry = np.zeros(self.n_dofs, dtype=bool)
        is_bdry[self.boundary_dofs] = True
        self.interior_dofs = np.flatnonzero(~is_bdry)
        self.bandwidth = int(np.max(np.ptp(self.cell_dofs, axis=1)))

    @property
    def nodal_weight(self) -> float:
        """Cell measure per DOF of the uniform layout, used by the discrete l2 norm."""
        return float(np.prod(self.mesh.spacing)) / self.degree**self.dim

    def coords(self):
        """DOF coordinates split per axis, ready for ``g(*space.coords())``."""
        return tuple(self.dof_coords[:, k] for k in range(self.dim))

    def element_data(self, quad: QuadratureRule | None = None) -> ElementData:
        quad = quad if quad is not None else self.quad
        key = id(quad)
        if key in self._cache:
            return self._cache[key][1]
        phi, dref = reference_basis(self.dim, self.degree, quad.points)
        mesh = self.mesh
        if self.dim == 1:
            x = mesh.nodes[:, 0]
            x0 = x[mesh.elements[:, 0]]
            he = x[mesh.elements[:, 1]] - x0
            dphi = dref[None, :, :, :] / he[:, None, None, None]
            wdet = quad.weights[None, :] * he[:, None]
            xq = (x0[:, None] + he[:, None] * quad.points[None, :, 0])[:, :, None]
        else:
            p = mesh.nodes[mesh.elements]
            J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)  # columns are edge vectors
            det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            Jinv = np.linalg.inv(J)
            dphi = np.einsum("qak,ekl->eqal", dref, Jinv)
            wdet = quad.weights[None, :] * np.abs(det)[:, None]
            xq = p[:, 0][:, None, :] + np.einsum("ekl,ql->eqk", J, quad.points)
        data = ElementData(phi, dphi, wdet, xq)
        self._cache[key] = (quad, data)  # hold quad so its id stays unique
        return data

    def evaluate(self, values: np.ndarray, quad: QuadratureRule | None = None):
        """FE function and its gradient at the quadrature points, ``(E, nq)`` and ``(E, nq, dim)``."""
        data = self.element_data(quad)
        local = np.asarray(values)[self.cell_dofs]
        u = local @ data.phi.T
        du = np.einsum("eqak,ea->eqk", data.dphi, local)
        return u, du

    def evaluate_values(self, values: np.ndarray, quad: QuadratureRule | None = None) -> np.ndarray:
        """FE function at the quadrature points, ``(E, nq)``, without the gradient."""
        data = self.element_data(quad)
        return np.asarray(values)[self.cell_dofs] @ data.phi.T

    def _scatter(self, local: np.ndarray) -> np.ndarray:
        idx = self.cell_dofs.ravel()
        local = local.ravel()
        if np.iscomplexobj(local):
            re = np.bincount(idx, weights=local.real, minlength=self.n_dofs)
            im = np.bincount(idx, weights=local.imag, minlength=self.n_dofs)
            return re + 1j * im
        return np.bincount(idx, weights=local, minlength=self.n_dofs)

    def _assemble(self, local: np.ndarray) -> BandedMatrix:
        nloc = self.cell_dofs.shape[1]
        rows = np.repeat(self.cell_dofs, nloc, axis=1)
        cols = np.tile(self.cell_dofs, (1, nloc))
        return BandedMatrix.from_entries(self.n_dofs, rows, cols, local.reshape(len(local), -1),
                                         bandwidth=self.bandwidth)


@dataclass(eq=False)
class CoefficientVector:
    """Complex nodal coefficients of an FE function on ``space``."""

    values: np.ndarray
    space: FunctionSpace

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.space.n_dofs,):
            raise ValueError(
                f"expected {self.space.n_dofs} coefficients, got shape {self.values.shape}"
            )

    def copy(self) -> "CoefficientVector":
        return CoefficientVector(self.values.copy(), self.space)


def _check_space(u: CoefficientVector, space: FunctionSpace) -> np.ndarray:
    if isinstance(u, CoefficientVector):
        if u.space.mesh is not space.mesh or u.space.degree != space.degree:
            raise ValueError("coefficient vector lives on a different mesh or degree")
        return u.values
    values = np.asarray(u)
    if values.shape != (space.n_dofs,):
        raise ValueError(f"expected {space.n_dofs} coefficients, got shape {values.shape}")
    return values


def _quad_for(space: FunctionSpace, quad) -> QuadratureRule:
    return space.quad if quad is None else quad


def assemble_mass(space: FunctionSpace, quad: QuadratureRule | None = None) -> BandedMatrix:
    """Consistent mass matrix ``M[i, j] = (phi_i, phi_j)``."""
    data = space.element_data(_quad_for(space, quad))
    local = np.einsum("eq,qa,qb->eab", data.wdet, data.phi, data.phi)
    return space._assemble(local)


def assemble_stiffness(space: FunctionSpace, quad: QuadratureRule | None = None) -> BandedMatrix:
    """Stiffness matrix ``S[i, j] = (grad phi_i, grad phi_j)``."""
    data = space.element_data(_quad_for(space, quad))
    local = np.einsum("eq,eqak,eqbk->eab", data.wdet, data.dphi, data.dphi)
    return space._assemble(local)


def assemble_load_f(space: FunctionSpace, u, quad: QuadratureRule | None = None) -> np.ndarray:
    """Load vector ``b_i = (f(u_h), phi_i)`` with ``f(z) = z ln|z|``.

    ``u_h`` is reconstructed at the quadrature points before ``f`` is applied.
    """
    values = _check_space(u, space)
    quad = _quad_for(space, quad)
    data = space.element_data(quad)
    uq = space.evaluate_values(values, quad)
    local = (data.wdet * log_f(uq)) @ data.phi
    return space._scatter(local)


def interpolate(space: FunctionSpace, g: Callable) -> CoefficientVector:
    """Nodal interpolant: the coefficient at each DOF is ``g`` at that point."""
    return CoefficientVector(np.asarray(g(*space.coords()), dtype=complex), space)


def _stack_grad(grad, dim):
    if dim == 1:
        return np.asarray(grad)[..., None]
    return np.stack(grad, axis=-1)


def ritz_project(space: FunctionSpace, g: Callable, grad_g: Callable, g_boundary=None,
                 quad: QuadratureRule | None = None) -> CoefficientVector:
    """Elliptic projection: ``(grad R g, grad phi) = (grad g, grad phi)`` on interior DOFs.

    Boundary coefficients default to ``g`` at the boundary DOFs; pass a
    callable or an array to ``g_boundary`` to override.
    """
    quad = _quad_for(space, quad)
    data = space.element_data(quad)
    xq = data.xq
    gq = _stack_grad(grad_g(*(xq[..., k] for k in range(space.dim))), space.dim)
    rhs = space._scatter(np.einsum("eq,eqk,eqak->ea", data.wdet, gq, data.dphi))

    bd = space.boundary_dofs
    values = np.zeros(space.n_dofs, dtype=np.result_type(rhs.dtype, float))
    if g_boundary is None:
        gb = g(*(space.dof_coords[bd, k] for k in range(space.dim)))
    elif callable(g_boundary):
        gb = g_boundary(*(space.dof_coords[bd, k] for k in range(space.dim)))
    else:
        gb = g_boundary
    gb = np.asarray(gb)
    values = values.astype(np.result_type(values.dtype, gb.dtype))
    values[bd] = gb

    inner = space.interior_dofs
    if inner.size:
        S = assemble_stiffness(space, quad)
        lifted = S.matvec(values)
        S_in = S.restrict(inner)
        values[inner] = solve(factor(S_in), (rhs - lifted)[inner])
    return CoefficientVector(values, space)


class ErrorNorms(NamedTuple):
    l2: float
    linf: float
    L2: float


def error_norms(space: FunctionSpace, u_h, u_exact: Callable,
                quad: QuadratureRule | None = None) -> ErrorNorms:
    """Discrete nodal l2 and l-infinity errors plus the continuous L2 error.

    ``l2 = sqrt(w * sum |u_h - u|^2)`` over all DOF nodes, where ``w`` is the
    cell measure per DOF (``h^d`` for linear elements).
    """
    values = _check_space(u_h, space)
    diff = values - u_exact(*space.coords())
    l2 = float(np.sqrt(space.nodal_weight * np.sum(np.abs(diff) ** 2)))
    linf = float(np.max(np.abs(diff)))
    quad = _quad_for(space, quad)
    data = space.element_data(quad)
    uq = space.evaluate_values(values, quad)
    ex = u_exact(*(data.xq[..., k] for k in range(space.dim)))
    L2 = float(np.sqrt(np.sum(data.wdet * np.abs(uq - ex) ** 2)))
    return ErrorNorms(l2, linf, L2)


def h1_seminorm_error(space: FunctionSpace, u_h, grad_exact: Callable,
                      quad: QuadratureRule | None = None) -> float:
    """``|| grad(u_h - u) ||_{L2}`` by quadrature."""
    values = _check_space(u_h, space)
    quad = _quad_for(space, quad)
    data = space.element_data(quad)
    _, du = space.evaluate(values, quad)
    ex = _stack_grad(grad_exact(*(data.xq[..., k] for k in range(space.dim))), space.dim)
    return float(np.sqrt(np.sum(data.wdet[..., None] * np.abs(du - ex) ** 2)))


def l2_norm(space: FunctionSpace, u_h, quad: QuadratureRule | None = None) -> float:
    values = _check_space(u_h, space)
    quad = _quad_for(space, quad)
    uq = space.evaluate_values(values, quad)
    return float(np.sqrt(np.sum(space.element_data(quad).wdet * np.abs(uq) ** 2)))


def sup_norm(space: FunctionSpace, u_h, samples_per_element: int = 16) -> float:
    """Max of ``|u_h|`` sampled on a uniform sub-grid of every element."""
    values = _check_space(u_h, space)
    if space.dim == 1:
        s = np.linspace(0.0, 1.0, samples_per_element + 1)[:, None]
    else:
        m = samples_per_element
        i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1))
        keep = i + j <= m
        s = np.column_stack([i[keep], j[keep]]) / m
    phi, _ = reference_basis(space.dim, space.degree, s)
    vals = np.einsum("qa,ea->eq", phi, values[space.cell_dofs])
    return float(np.max(np.abs(vals)))
