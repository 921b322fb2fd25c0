"""Quadrature rules on the reference interval [0, 1] and reference triangle."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Points and weights on a reference element.

    ``points`` has shape ``(nq, dim)``; ``order`` is the highest total
    polynomial degree integrated exactly.
    """

    points: np.ndarray
    weights: np.ndarray
    order: int

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_points(self) -> int:
        return self.points.shape[0]


@lru_cache(maxsize=None)
def gauss_legendre(n_points: int) -> QuadratureRule:
    """``n_points``-point Gauss-Legendre rule mapped to [0, 1]."""
    if n_points < 1:
        raise ValueError("need at least one point")
    x, w = np.polynomial.legendre.leggauss(n_points)
    pts = (0.5 * (x + 1.0))[:, None]
    return QuadratureRule(points=pts, weights=0.5 * w, order=2 * n_points - 1)


@lru_cache(maxsize=None)
def triangle_rule(order: int = 5) -> QuadratureRule:
    """Symmetric rules on the triangle (0,0), (1,0), (0,1).

    Orders 1, 2 and 5 are available; 5 is the 7-point Radon rule.
    """
    if order <= 1:
        pts = np.array([[1 / 3, 1 / 3]])
        w = np.array([0.5])
        return QuadratureRule(pts, w, 1)
    if order == 2:
        pts = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]])
        w = np.full(3, 1 / 6)
        return QuadratureRule(pts, w, 2)
    if order > 5:
        raise ValueError(f"triangle rule of order {order} not available")
    s = np.sqrt(15.0)
    a1, b1 = (6 - s) / 21, (9 + 2 * s) / 21
    a2, b2 = (6 + s) / 21, (9 - 2 * s) / 21
    w1, w2 = (155 - s) / 2400, (155 + s) / 2400
    pts = np.array(
        [[1 / 3, 1 / 3], [a1, a1], [b1, a1], [a1, b1], [a2, a2], [b2, a2], [a2, b2]]
    )
    w = np.array([9 / 80, w1, w1, w1, w2, w2, w2])
    return QuadratureRule(pts, w, 5)


def default_rule(dim: int, degree: int) -> QuadratureRule:
    """Rule used for assembly: 2r+2 Gauss points in 1D, 7-point rule on triangles."""
    if dim == 1:
        return gauss_legendre(2 * degree + 2)
    return triangle_rule(5)
