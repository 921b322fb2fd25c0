"""Closed-form solutions and initial data for the logarithmic Schrödinger equation.

``i u_t + Δu = λ u ln|u|^2``.  Coordinates are passed per axis, ``(x,)`` or
``(x, y)``, as numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GaussonSpec:
    """Moving Gaussian ``b exp(i(x.ζ - (a + |ζ|^2) t) + (λ/2)|x - 2ζt|^2)``.

    ``a = -λ (d - ln b^2)``; the solution is exact for any real ``b != 0``.
    """

    d: int = 1
    b: float = 1.0
    zeta: tuple = ()
    lam: float = -1.0

    def __post_init__(self):
        if self.b == 0:
            raise ValueError("b must be nonzero")
        zeta = tuple(float(z) for z in self.zeta) or (0.0,) * self.d
        if len(zeta) != self.d:
            raise ValueError(f"zeta has {len(zeta)} components for d={self.d}")
        object.__setattr__(self, "zeta", zeta)

    @property
    def a(self) -> float:
        return -self.lam * (self.d - np.log(self.b**2))

    def _parts(self, xs, t):
        zz = sum(z * z for z in self.zeta)
        shifted = [x - 2 * z * t for x, z in zip(xs, self.zeta)]
        phase = sum(x * z for x, z in zip(xs, self.zeta)) - (self.a + zz) * t
        r2 = sum(s * s for s in shifted)
        u = self.b * np.exp(1j * phase + 0.5 * self.lam * r2)
        phi_t = -1j * (self.a + zz) - 2 * self.lam * sum(z * s for z, s in zip(self.zeta, shifted))
        grad_phi = [1j * z + self.lam * s for z, s in zip(self.zeta, shifted)]
        grad_phi_t = [-2 * self.lam * z for z in self.zeta]
        return u, phi_t, grad_phi, grad_phi_t

    def u(self, xs, t):
        return self._parts(xs, t)[0]

    def __call__(self, *coords, t=0.0):
        return self.u(coords, t)

    def u_t(self, xs, t):
        u, phi_t, _, _ = self._parts(xs, t)
        return phi_t * u

    def u_tt(self, xs, t):
        u, phi_t, _, _ = self._parts(xs, t)
        phi_tt = 4 * self.lam * sum(z * z for z in self.zeta)
        return (phi_tt + phi_t**2) * u

    def grad_u(self, xs, t):
        u, _, g, _ = self._parts(xs, t)
        return [gk * u for gk in g]

    def lap_u(self, xs, t):
        u, _, g, _ = self._parts(xs, t)
        return (self.d * self.lam + sum(gk * gk for gk in g)) * u

    def grad_u_t(self, xs, t):
        u, phi_t, g, gt = self._parts(xs, t)
        return [(gtk + phi_t * gk) * u for gk, gtk in zip(g, gt)]

    def hess_u_t(self, xs, t):
        u, phi_t, g, gt = self._parts(xs, t)
        d = self.d
        return [
            [(gt[j] * g[k] + gt[k] * g[j] + phi_t * (self.lam * (j == k) + g[j] * g[k])) * u
             for k in range(d)]
            for j in range(d)
        ]

    def lap_u_t(self, xs, t):
        H = self.hess_u_t(xs, t)
        return sum(H[k][k] for k in range(self.d))

    def initial(self):
        return lambda *coords: self.u(coords, 0.0)

    def trace(self):
        """Boundary data ``g(*coords, t)``."""
        return lambda *args: self.u(args[:-1], args[-1])


@dataclass(frozen=True)
class TwoGaussonSpec:
    """Initial data ``sum_k exp(-a_k/2 (x - x_k)^2 + i ζ_k x)``."""

    a: tuple = (1.0, 1.0)
    zeta: tuple = (0.0, 0.0)
    centers: tuple = (-5.0, 5.0)

    def __post_init__(self):
        if any(ak <= 0 for ak in self.a):
            raise ValueError("widths a_k must be positive")
        if not len(self.a) == len(self.zeta) == len(self.centers):
            raise ValueError("a, zeta and centers must have equal length")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return sum(
            np.exp(-0.5 * ak * (x - xk) ** 2 + 1j * zk * x)
            for ak, zk, xk in zip(self.a, self.zeta, self.centers)
        )


TWO_GAUSSON_CASES = {
    "i": TwoGaussonSpec((1.0, 1.0), (0.0, 0.0), (-5.0, 5.0)),
    "ii": TwoGaussonSpec((1.0, 1.0), (0.0, 0.0), (-2.0, 2.0)),
    "iii": TwoGaussonSpec((1.0, 1.0), (2.0, -2.0), (-30.0, 30.0)),
}


def tanh_product(x, y):
    """``tanh(x) tanh(y) exp(-x^2 - y^2)``."""
    return np.tanh(x) * np.tanh(y) * np.exp(-x * x - y * y)
