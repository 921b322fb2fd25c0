"""Uniform 1D partitions and structured triangulations of rectangles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TextIO

import numpy as np


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable simplicial mesh.

    Attributes
    ----------
    dim : int
        Spatial dimension (1 or 2).
    nodes : ndarray, shape (n_nodes, dim)
        Vertex coordinates.
    elements : ndarray of int, shape (n_elements, dim + 1)
        Vertex indices of each element. Triangles are counter-clockwise.
    boundary_nodes : ndarray of int
        Sorted indices of the vertices lying on the domain boundary.
    h : float
        Maximum element diameter.
    degree_support : int
        Highest Lagrange degree the FE layer supports on this mesh.
    spacing : tuple of float
        Cell side per axis (the grid spacing of the structured layout).
    bounds : tuple of (float, float)
        Domain extent per axis.
    """

    dim: int
    nodes: np.ndarray
    elements: np.ndarray
    boundary_nodes: np.ndarray
    h: float
    degree_support: int
    spacing: tuple
    bounds: tuple
    shape: tuple = field(default=())

    def __post_init__(self):
        for arr in (self.nodes, self.elements, self.boundary_nodes):
            arr.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    @property
    def measure(self) -> float:
        return float(np.prod([b - a for a, b in self.bounds]))

    def element_measures(self) -> np.ndarray:
        if self.dim == 1:
            x = self.nodes[:, 0]
            return x[self.elements[:, 1]] - x[self.elements[:, 0]]
        p = self.nodes[self.elements]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def uniform_interval(a: float, b: float, n_elements: int) -> Mesh:
    """Partition ``(a, b)`` into ``n_elements`` equal subintervals."""
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if int(n_elements) != n_elements or n_elements < 1:
        raise ValueError(f"n_elements must be a positive integer, got {n_elements}")
    n_elements = int(n_elements)
    x = np.linspace(a, b, n_elements + 1)
    elements = np.column_stack([np.arange(n_elements), np.arange(1, n_elements + 1)])
    h = (b - a) / n_elements
    return Mesh(
        dim=1,
        nodes=x[:, None].copy(),
        elements=elements,
        boundary_nodes=np.array([0, n_elements]),
        h=h,
        degree_support=2,
        spacing=(h,),
        bounds=((float(a), float(b)),),
        shape=(n_elements,),
    )


def structured_triangulation(rect, nx: int, ny: int, pattern: str = "symmetric") -> Mesh:
    """Split an ``nx`` by ``ny`` grid of rectangles into right triangles.

    Parameters
    ----------
    rect : ((a, b), (c, d))
        The rectangle ``(a, b) x (c, d)``.
    nx, ny : int
        Cells per axis.
    pattern : {"symmetric", "uniform"}
        ``"uniform"`` cuts every cell along the same diagonal. ``"symmetric"``
        orients the diagonal by quadrant so the triangulation is invariant
        under reflection through either midline (needs even ``nx``/``ny`` for
        exact invariance).

    Nodes are numbered row-major, ``k = j * (nx + 1) + i``.
    """
    (a, b), (c, d) = rect
    if not (a < b and c < d):
        raise ValueError(f"degenerate rectangle {rect}")
    for n in (nx, ny):
        if int(n) != n or n < 1:
            raise ValueError(f"cell counts must be positive integers, got nx={nx}, ny={ny}")
    if pattern not in ("symmetric", "uniform"):
        raise ValueError(f"unknown pattern {pattern!r}")
    nx, ny = int(nx), int(ny)

    xs = np.linspace(a, b, nx + 1)
    ys = np.linspace(c, d, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    i, j = i.ravel(), j.ravel()
    ll = j * (nx + 1) + i
    lr = ll + 1
    ul = ll + nx + 1
    ur = ul + 1
    if pattern == "uniform":
        slash = np.ones(ll.shape, dtype=bool)
    else:
        # cell centre relative to domain centre, in half-cell units to stay integral
        sx = np.sign(2 * i + 1 - nx)
        sy = np.sign(2 * j + 1 - ny)
        slash = sx * sy >= 0
    t1 = np.where(slash[:, None], np.column_stack([ll, lr, ur]), np.column_stack([ll, lr, ul]))
    t2 = np.where(slash[:, None], np.column_stack([ll, ur, ul]), np.column_stack([lr, ur, ul]))
    elements = np.empty((2 * nx * ny, 3), dtype=np.int64)
    elements[0::2] = t1
    elements[1::2] = t2

    on_edge = (
        (np.arange(nx + 1)[None, :] == 0)
        | (np.arange(nx + 1)[None, :] == nx)
        | (np.arange(ny + 1)[:, None] == 0)
        | (np.arange(ny + 1)[:, None] == ny)
    )
    boundary = np.flatnonzero(on_edge.ravel())

    hx, hy = (b - a) / nx, (d - c) / ny
    return Mesh(
        dim=2,
        nodes=nodes,
        elements=elements,
        boundary_nodes=boundary,
        h=float(np.hypot(hx, hy)),
        degree_support=1,
        spacing=(hx, hy),
        bounds=((float(a), float(b)), (float(c), float(d))),
        shape=(nx, ny),
    )


def dump(mesh: Mesh, stream: TextIO) -> None:
    """Write a plain-text node and element listing for debugging."""
    stream.write(f"# nodes {mesh.n_nodes}\n")
    for k, p in enumerate(mesh.nodes):
        stream.write(f"{k} " + " ".join(f"{c:.17g}" for c in p) + "\n")
    stream.write(f"# elements {mesh.n_elements}\n")
    for k, e in enumerate(mesh.elements):
        stream.write(f"{k} " + " ".join(str(v) for v in e) + "\n")
