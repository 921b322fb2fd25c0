"""Discrete Grönwall bound for recurrences with a sublinear ``y**alpha`` term.

A sequence with ``y(n) <= c1 + c2 * sum_{m<n} y(m)**alpha + c3 * sum_{m<n} y(m)``
is bounded by :func:`gronwall_bound`; :func:`maximal_sequence_oracle` builds
the sequence attaining the recurrence with equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GronwallParams:
    c1: float
    c2: float
    c3: float
    alpha: float

    def __post_init__(self):
        if not self.c1 > 0:
            raise ValueError(f"c1 must be positive, got {self.c1}")
        # c2 = 0 and c3 = 0 are the limiting cases of the bound
        if self.c2 < 0 or self.c3 < 0:
            raise ValueError(f"c2, c3 must be nonnegative, got {self.c2}, {self.c3}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")

    @property
    def slope(self) -> float:
        """``c1^(alpha-1) c2 + c3``."""
        return self.c1 ** (self.alpha - 1) * self.c2 + self.c3

    @property
    def rate(self) -> float:
        """``alpha c1^(alpha-1) c2 + c3``, so the growth factor is ``1 + rate``."""
        return self.alpha * self.c1 ** (self.alpha - 1) * self.c2 + self.c3

    @property
    def beta(self) -> float:
        return 1.0 + self.rate


def _check_n(n):
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    return int(n)


def _log_geometric(k: float, n: int) -> float:
    """``log(((1 + k)^n - 1) / k)``, with the ``k -> 0`` limit ``log n``."""
    if k == 0.0:
        return math.log(n)
    x = n * math.log1p(k)
    if x < 700.0:
        return math.log(math.expm1(x) / k)
    return x + math.log1p(-math.exp(-x)) - math.log(k)


def gronwall_bound(p: GronwallParams, n: int, log: bool = False) -> float:
    """``c1 (1 + A ((1 + k)^n - 1) / k)`` with ``A = c1^(a-1) c2 + c3``, ``k = a c1^(a-1) c2 + c3``.

    With ``log=True`` the natural log of the bound is returned, which stays
    finite when the bound itself would overflow.
    """
    n = _check_n(n)
    if n == 0 or p.slope == 0.0:
        return math.log(p.c1) if log else p.c1
    lg = math.log(p.slope) + _log_geometric(p.rate, n)
    if log:
        return math.log(p.c1) + (lg + math.log1p(math.exp(-lg)) if lg > 0 else math.log1p(math.exp(lg)))
    if lg > 700.0:
        return math.exp(math.log(p.c1) + lg + math.log1p(math.exp(-lg)))
    return p.c1 * (1.0 + math.exp(lg))


def gronwall_relaxed_bound(p: GronwallParams, n: int, log: bool = False) -> float:
    """``c1 (1 - 1/alpha + (1/alpha) (1 + k)^n)``, a weaker closed form of the bound."""
    n = _check_n(n)
    a = p.alpha
    x = n * math.log1p(p.rate)
    if x < 700.0:
        # 1 - 1/a + g/a == 1 + (g - 1)/a keeps precision for small growth
        val = p.c1 * (1.0 + math.expm1(x) / a)
        return math.log(val) if log else val
    lg = math.log(p.c1) - math.log(a) + x + math.log1p((a - 1.0) * math.exp(-x))
    return lg if log else math.exp(lg)


def maximal_sequence_oracle(p: GronwallParams, N: int) -> np.ndarray:
    """``y(0..N)`` with ``y(0) = c1`` and the recurrence taken with equality."""
    N = _check_n(N)
    if N < 1:
        raise ValueError("N must be at least 1")
    y = np.empty(N + 1)
    y[0] = p.c1
    s_alpha = 0.0
    s_lin = 0.0
    for n in range(1, N + 1):
        s_alpha += float(y[n - 1]) ** p.alpha
        s_lin += float(y[n - 1])
        y[n] = p.c1 + p.c2 * s_alpha + p.c3 * s_lin
        if not math.isfinite(y[n]):
            raise OverflowError(f"oracle sequence overflowed at n={n}")
    return y
