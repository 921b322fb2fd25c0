"""The logarithmic nonlinearity ``f(z) = z ln|z|`` and its continuity bounds.

Each ``check_*`` predicate evaluates one inequality numerically and returns
whether it holds; they accept scalars or broadcastable arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class HolderDomainError(ValueError):
    """Inputs fall outside the disk on which the Hölder bound is stated."""


def f(z):
    """``z * ln|z|`` with ``f(0) = 0``."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)  # hypot-based modulus
    with np.errstate(divide="ignore", invalid="ignore"):
        out = z * np.log(r)
    out = np.where(r == 0, 0.0, out)
    return out[()] if out.ndim == 0 else out


def delta_alpha(alpha: float) -> float:
    """Threshold ``exp(alpha / (alpha - 1))`` up to which the Hölder constant increases."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return float(np.exp(alpha / (alpha - 1)))


def holder_constant(alpha: float, eps):
    """``(2 eps)^(1 - alpha) * (|ln eps| + 1)``, taken as 0 at ``eps = 0``."""
    eps = np.asarray(eps, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (2 * eps) ** (1 - alpha) * (np.abs(np.log(eps)) + 1)
    out = np.where(eps == 0, 0.0, out)
    return out[()] if out.ndim == 0 else out


def upsilon(eps: float, lam_inf: float) -> float:
    """``max_{eps <= y <= lam_inf} (|ln y| + 1)``, attained at an endpoint."""
    if not 0 < eps < lam_inf:
        raise ValueError(f"need 0 < eps < lam_inf, got eps={eps}, lam_inf={lam_inf}")
    return max(abs(np.log(eps)), abs(np.log(lam_inf))) + 1.0


@dataclass(frozen=True)
class HolderParams:
    alpha: float
    epsilon: float
    lambda_inf: float = 0.0

    def __post_init__(self):
        d = delta_alpha(self.alpha)
        if not 0 < self.epsilon <= d:
            raise ValueError(f"epsilon must lie in (0, {d}], got {self.epsilon}")
        if self.lambda_inf < 0:
            raise ValueError("lambda_inf must be nonnegative")

    @property
    def delta_alpha(self) -> float:
        return delta_alpha(self.alpha)

    @property
    def H_alpha_eps(self) -> float:
        return float(holder_constant(self.alpha, self.epsilon))

    @property
    def Upsilon(self) -> float:
        return upsilon(self.epsilon, self.lambda_inf)


def check_lipschitz_bound(u, v, slack: float = 1e-12):
    """``|f(u) - f(v)| <= (|ln y| + 1) |u - v|`` with ``y = max(|u|, |v|)``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    y = np.maximum(np.abs(u), np.abs(v))
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.abs(np.log(y)) + 1
        rhs = np.where(y == 0, 0.0, k * np.abs(u - v))
    return np.abs(f(u) - f(v)) <= rhs + slack


def check_holder_bound(u, v, alpha: float, epsilon: float, slack: float = 1e-12):
    """``|f(u) - f(v)| <= H_alpha(eps) |u - v|^alpha`` for ``|u|, |v| <= eps <= delta_alpha``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if not 0 <= epsilon <= delta_alpha(alpha):
        raise HolderDomainError(f"epsilon={epsilon} exceeds delta_alpha={delta_alpha(alpha)}")
    if np.any(np.abs(u) > epsilon) or np.any(np.abs(v) > epsilon):
        raise HolderDomainError(f"inputs outside the disk |z| <= {epsilon}")
    rhs = holder_constant(alpha, epsilon) * np.abs(u - v) ** alpha
    return np.abs(f(u) - f(v)) <= rhs + slack


def check_imaginary_inequality(u, v, slack: float = 1e-12):
    """``|Im[(f(u) - f(v)) conj(u - v)]| <= |u - v|^2`` (relative ``slack``)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    d = u - v
    lhs = np.abs(np.imag((f(u) - f(v)) * np.conj(d)))
    rhs = np.abs(d) ** 2
    return lhs <= rhs * (1 + slack)


def l2_split_bound(u_vals, v_vals, weights, alpha: float, epsilon: float):
    """Weighted L2 bound on ``f(u) - f(v)`` from splitting the domain at ``|z| = eps``.

    Returns ``(lhs, rhs)`` with ``lhs = sum w |f(u) - f(v)|^2``.  When the
    larger sup-norm ``Lambda`` exceeds ``eps``::

        rhs = H^2 * sum w |u - v|^(2 alpha) + Upsilon(eps, Lambda)^2 * sum w |u - v|^2

    otherwise only the Hölder term remains.
    """
    u = np.asarray(u_vals, dtype=complex).ravel()
    v = np.asarray(v_vals, dtype=complex).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if np.any(w < 0):
        raise ValueError("quadrature weights must be nonnegative")
    HolderParams(alpha, epsilon)  # validates alpha and epsilon
    lam = max(float(np.max(np.abs(u), initial=0.0)), float(np.max(np.abs(v), initial=0.0)))
    d = np.abs(u - v)
    lhs = float(np.sum(w * np.abs(f(u) - f(v)) ** 2))
    rhs = float(holder_constant(alpha, epsilon) ** 2 * np.sum(w * d ** (2 * alpha)))
    if lam > epsilon:
        rhs += upsilon(epsilon, lam) ** 2 * float(np.sum(w * d**2))
    return lhs, rhs


def lipschitz_regime_bound(u_vals, v_vals, weights, epsilon: float):
    """``(||f(u) - f(v)||, Upsilon * ||u - v||)`` when every sample exceeds ``eps`` in modulus."""
    u = np.asarray(u_vals, dtype=complex).ravel()
    v = np.asarray(v_vals, dtype=complex).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if np.any(np.abs(u) <= epsilon) or np.any(np.abs(v) <= epsilon):
        raise ValueError("all samples must satisfy |u|, |v| > epsilon")
    lam = max(np.max(np.abs(u)), np.max(np.abs(v)))
    lhs = float(np.sqrt(np.sum(w * np.abs(f(u) - f(v)) ** 2)))
    rhs = upsilon(epsilon, lam) * float(np.sqrt(np.sum(w * np.abs(u - v) ** 2)))
    return lhs, rhs
