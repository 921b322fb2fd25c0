"""Banded matrix storage and a factor-once banded LU solver.

The LU is LAPACK's ``?gbtrf``/``?gbtrs`` (partial pivoting within the band),
reached through :mod:`scipy.linalg.lapack`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack


class SingularMatrixError(np.linalg.LinAlgError):
    pass


class BandedMatrix:
    """Square matrix with equal lower and upper half-bandwidth ``p``.

    Entry ``A[i, j]`` lives at ``ab[p + i - j, j]`` (LAPACK band layout), so
    ``ab`` has shape ``(2p + 1, n)``.  Works for real or complex entries.
    """

    def __init__(self, ab: np.ndarray):
        ab = np.asarray(ab)
        if ab.ndim != 2 or ab.shape[0] % 2 != 1:
            raise ValueError(f"band array must have an odd number of rows, got {ab.shape}")
        self.ab = ab
        self.ab.setflags(write=False)
        # structured meshes fill only a few of the 2p+1 diagonals
        self._stored = np.flatnonzero(np.any(ab != 0, axis=1)) - ab.shape[0] // 2

    @classmethod
    def from_entries(cls, n, rows, cols, vals, bandwidth=None, dtype=float):
        """Accumulate ``(row, col, val)`` triplets; duplicates are summed in input order."""
        rows = np.asarray(rows).ravel()
        cols = np.asarray(cols).ravel()
        vals = np.asarray(vals).ravel()
        p = int(np.max(np.abs(rows - cols))) if bandwidth is None and rows.size else (bandwidth or 0)
        ab = np.zeros((2 * p + 1, n), dtype=dtype)
        np.add.at(ab, (p + rows - cols, cols), vals)
        return cls(ab)

    @classmethod
    def identity(cls, n, dtype=float):
        return cls(np.ones((1, n), dtype=dtype))

    @property
    def n(self) -> int:
        return self.ab.shape[1]

    @property
    def bandwidth(self) -> int:
        return self.ab.shape[0] // 2

    @property
    def dtype(self):
        return self.ab.dtype

    def _diagonals(self, nonzero_only=False):
        p, n = self.bandwidth, self.n
        for d in (self._stored if nonzero_only else range(-p, p + 1)):
            # column range holding A[j + d, j]
            j0, j1 = max(0, -d), min(n, n - d)
            yield d, j0, j1, self.ab[p + d, j0:j1]

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=self.dtype)
        for d, j0, j1, vals in self._diagonals():
            j = np.arange(j0, j1)
            A[j + d, j] = vals
        return A

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[0] != self.n:
            raise ValueError(f"length mismatch: matrix n={self.n}, vector {x.shape[0]}")
        y = np.zeros(x.shape, dtype=np.result_type(self.dtype, x.dtype))
        for d, j0, j1, vals in self._diagonals(nonzero_only=True):
            y[j0 + d:j1 + d] += vals * x[j0:j1] if x.ndim == 1 else vals[:, None] * x[j0:j1]
        return y

    def __matmul__(self, x):
        return self.matvec(x)

    def is_symmetric(self, tol=0.0) -> bool:
        p = self.bandwidth
        for d in range(1, p + 1):
            lower = self.ab[p + d, : self.n - d]
            upper = self.ab[p - d, d:]
            if np.max(np.abs(lower - upper), initial=0.0) > tol:
                return False
        return True

    def restrict(self, idx) -> "BandedMatrix":
        """Principal submatrix on the sorted index set ``idx``."""
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size and np.any(np.diff(idx) <= 0):
            raise ValueError("restriction indices must be strictly increasing")
        pos = np.full(self.n, -1, dtype=np.int64)
        pos[idx] = np.arange(idx.size)
        rows, cols, vals = [], [], []
        for d, j0, j1, v in self._diagonals(nonzero_only=True):
            j = np.arange(j0, j1)
            keep = (pos[j] >= 0) & (pos[j + d] >= 0) & (v != 0)
            rows.append(pos[j[keep] + d])
            cols.append(pos[j[keep]])
            vals.append(v[keep])
        rows, cols, vals = (np.concatenate(a) for a in (rows, cols, vals))
        return BandedMatrix.from_entries(idx.size, rows, cols, vals, dtype=self.dtype)

    def combine(self, a, other: "BandedMatrix", b) -> "BandedMatrix":
        """Return ``a * self + b * other`` for matrices of equal size and bandwidth."""
        if other.n != self.n or other.bandwidth != self.bandwidth:
            raise ValueError("matrices differ in size or bandwidth")
        return BandedMatrix(a * self.ab + b * other.ab)


@dataclass(frozen=True, eq=False)
class Factorization:
    """LAPACK band LU factors; immutable and safe to share between solves."""

    lu: np.ndarray
    ipiv: np.ndarray
    kl: int
    ku: int

    @property
    def n(self) -> int:
        return self.lu.shape[1]

    @property
    def dtype(self):
        return self.lu.dtype

    def solve(self, rhs):
        return solve(self, rhs)


def build_step_matrix(M: BandedMatrix, S: BandedMatrix, tau: float, interior=None) -> BandedMatrix:
    """``(i / tau) M - S``, optionally restricted to the ``interior`` indices."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if M.n != S.n:
        raise ValueError(f"dimension mismatch: {M.n} vs {S.n}")
    if M.bandwidth != S.bandwidth:
        p = max(M.bandwidth, S.bandwidth)
        M, S = _widen(M, p), _widen(S, p)
    A = BandedMatrix((1j / tau) * M.ab - S.ab)
    return A if interior is None else A.restrict(interior)


def _widen(A: BandedMatrix, p: int) -> BandedMatrix:
    q = A.bandwidth
    ab = np.zeros((2 * p + 1, A.n), dtype=A.dtype)
    ab[p - q:p + q + 1] = A.ab
    return BandedMatrix(ab)


def factor(A: BandedMatrix) -> Factorization:
    """Banded LU with partial pivoting.

    Raises
    ------
    SingularMatrixError
        If a pivot vanishes or falls below 1e-300 in modulus.
    """
    p = A.bandwidth
    work = np.zeros((3 * p + 1, A.n), dtype=np.result_type(A.dtype, np.float64))
    work[p:] = A.ab
    if np.iscomplexobj(work):
        lu, ipiv, info = lapack.zgbtrf(work, p, p, overwrite_ab=1)
    else:
        lu, ipiv, info = lapack.dgbtrf(work, p, p, overwrite_ab=1)
    if info < 0:
        raise ValueError(f"illegal argument {-info} to gbtrf")
    diag = lu[2 * p]
    if info > 0 or (diag.size and np.min(np.abs(diag)) < 1e-300):
        raise SingularMatrixError("matrix is numerically singular")
    lu.setflags(write=False)
    return Factorization(lu=lu, ipiv=ipiv, kl=p, ku=p)


def solve(F: Factorization, rhs) -> np.ndarray:
    """Solve ``A x = rhs`` with the factors of ``A``; ``rhs`` may be 1D or 2D."""
    rhs = np.asarray(rhs)
    if rhs.shape[0] != F.n:
        raise ValueError(f"rhs length {rhs.shape[0]} does not match n={F.n}")
    if F.n == 0:
        return rhs.astype(np.result_type(F.dtype, rhs.dtype))
    if np.iscomplexobj(F.lu):
        x, info = lapack.zgbtrs(F.lu, F.kl, F.ku, rhs.astype(complex), F.ipiv)
    elif np.iscomplexobj(rhs):
        return solve(F, rhs.real) + 1j * solve(F, rhs.imag)
    else:
        x, info = lapack.dgbtrs(F.lu, F.kl, F.ku, rhs.astype(float), F.ipiv)
    if info != 0:
        raise ValueError(f"gbtrs failed with info={info}")
    return x
