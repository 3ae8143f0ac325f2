"""Exact linear algebra over a prime field F_p.

Everything is an ``int64`` array with entries in ``[0, p)``.  ``Matrix`` is a
read-only wrapper for callers that want the matrix and its field bundled;
all functions also take plain arrays (or scipy sparse matrices) plus ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from ._config import DEFAULT_PRIME, check_prime

_FLOAT_EXACT = float(1 << 53)


@dataclass(frozen=True)
class Matrix:
    """An immutable matrix over F_p."""

    data: np.ndarray
    prime: int = DEFAULT_PRIME

    def __post_init__(self):
        check_prime(self.prime)
        arr = as_array(self.data, self.prime)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __getitem__(self, rc):
        return self.data[rc]

    def transpose(self) -> "Matrix":
        return Matrix(self.data.T, self.prime)

    T = property(transpose)

    def rank(self) -> int:
        return rank(self.data, self.prime)

    def kernel_dim(self) -> int:
        return kernel_dim(self.data, self.prime)

    def cokernel_dim(self) -> int:
        return cokernel_dim(self.data, self.prime)

    def kernel_basis(self) -> np.ndarray:
        return kernel_basis(self.data, self.prime)

    @classmethod
    def identity(cls, n: int, prime: int = DEFAULT_PRIME) -> "Matrix":
        return cls(np.eye(n, dtype=np.int64), prime)

    @classmethod
    def zeros(cls, rows: int, cols: int, prime: int = DEFAULT_PRIME) -> "Matrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), prime)


def _unwrap(M, p):
    if isinstance(M, Matrix):
        return M.data, (M.prime if p is None else p)
    return M, (DEFAULT_PRIME if p is None else p)


def as_array(M, p: int) -> np.ndarray:
    """Dense int64 copy of ``M`` reduced into ``[0, p)``."""
    if isinstance(M, Matrix):
        M = M.data
    if sp.issparse(M):
        M = M.toarray()
    arr = np.array(M, dtype=np.int64, copy=True)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    arr %= p
    return arr


def matmul_mod(A, B, p: int) -> np.ndarray:
    """``A @ B mod p`` for reduced int64 operands.

    Uses float64 BLAS when the inner dimension keeps every dot product below
    2**53, which makes the result exact.
    """
    if sp.issparse(A) or sp.issparse(B):
        out = A @ B
        out = out.toarray() if sp.issparse(out) else np.asarray(out)
        return np.asarray(out, dtype=np.int64) % p
    A = np.asarray(A)
    B = np.asarray(B)
    k = A.shape[-1]
    if k == 0:
        return np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
    if k * float(p - 1) ** 2 < _FLOAT_EXACT:
        out = np.rint(A.astype(np.float64) @ B.astype(np.float64))
        return np.fmod(out, p).astype(np.int64)
    return (A.astype(np.int64) @ B.astype(np.int64)) % p


def row_echelon(M, p: int | None = None, cap: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Echelon basis of the row space, rows sorted by pivot column, each monic."""
    M, p = _unwrap(M, p)
    arr = as_array(M, p)
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return np.zeros((0, arr.shape[1]), dtype=np.int64), np.zeros(0, dtype=np.int64)
    basis, pivots = _kernels.echelon(arr, p, cap)
    order = np.argsort(pivots, kind="stable")
    return np.ascontiguousarray(basis[order]), np.ascontiguousarray(pivots[order])


def rank(M, p: int | None = None, cap: int | None = None) -> int:
    """Rank over F_p; with ``cap`` the answer is ``min(rank, cap)`` and
    elimination stops as soon as the cap is reached."""
    M, p = _unwrap(M, p)
    arr = as_array(M, p)
    if arr.size == 0:
        return 0
    if arr.shape[1] > arr.shape[0]:
        arr = np.ascontiguousarray(arr.T)
    limit = min(arr.shape) if cap is None else min(cap, *arr.shape)
    if limit <= 0:
        return 0
    basis, _ = _kernels.echelon(arr, p, limit)
    return int(basis.shape[0])


def kernel_dim(M, p: int | None = None) -> int:
    M, p = _unwrap(M, p)
    cols = M.shape[1]
    return cols - rank(M, p)


def cokernel_dim(M, p: int | None = None) -> int:
    M, p = _unwrap(M, p)
    return M.shape[0] - rank(M, p)


def kernel_basis(M, p: int | None = None) -> np.ndarray:
    """Rows spanning ``{x : M x = 0}``."""
    M, p = _unwrap(M, p)
    arr = as_array(M, p)
    n = arr.shape[1]
    S = Subspace.from_rows(arr, p)
    K = np.zeros((S.free.size, n), dtype=np.int64)
    for a, f in enumerate(S.free):
        K[a, f] = 1
        K[a, S.pivots] = (-S.reduced[:, a]) % p
    return K


@dataclass
class Subspace:
    """A subspace of F_p^n stored in reduced row echelon form.

    ``reduced[:, a]`` holds the entries of the RREF in column ``free[a]``; the
    pivot columns of the RREF form an identity block.
    """

    n: int
    prime: int
    pivots: np.ndarray
    free: np.ndarray
    reduced: np.ndarray
    _basis: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_rows(cls, rows, p: int, n: int | None = None) -> "Subspace":
        if np.size(rows) == 0:
            if n is None:
                n = np.shape(rows)[-1]
            arr = np.zeros((0, n), dtype=np.int64)
        else:
            arr = as_array(rows, p)
            n = arr.shape[1] if n is None else n
        basis, pivots = row_echelon(arr, p)
        return cls.from_echelon(basis, pivots, p, n)

    @classmethod
    def from_echelon(cls, basis: np.ndarray, pivots: np.ndarray, p: int, n: int) -> "Subspace":
        """From the output of ``row_echelon`` (rows sorted by pivot)."""
        free = np.setdiff1d(np.arange(n, dtype=np.int64), pivots)
        reduced = _kernels.back_substitute(basis, pivots, free, p) if basis.shape[0] else \
            np.zeros((0, free.size), dtype=np.int64)
        return cls(n, p, pivots, free, reduced)

    @classmethod
    def full(cls, n: int, p: int) -> "Subspace":
        return cls(n, p, np.arange(n, dtype=np.int64), np.zeros(0, dtype=np.int64),
                   np.zeros((n, 0), dtype=np.int64))

    @property
    def dim(self) -> int:
        return int(self.pivots.size)

    @property
    def is_full(self) -> bool:
        return self.dim == self.n

    @property
    def basis(self) -> np.ndarray:
        """RREF rows."""
        if self._basis is None:
            B = np.zeros((self.dim, self.n), dtype=np.int64)
            B[np.arange(self.dim), self.pivots] = 1
            if self.free.size:
                B[:, self.free] = self.reduced
            self._basis = B
        return self._basis

    def reduce(self, W) -> np.ndarray:
        """Coordinates of ``W`` (rows) modulo this subspace, in the basis of
        unit vectors at the free columns."""
        W = np.asarray(W, dtype=np.int64) % self.prime
        if self.dim == 0:
            return W[:, self.free] if W.ndim == 2 else W[self.free]
        corr = matmul_mod(W[..., self.pivots], self.reduced, self.prime)
        return (W[..., self.free] - corr) % self.prime

    def residual(self, W) -> np.ndarray:
        """``W`` minus its component in the subspace, in ambient coordinates."""
        W = np.asarray(W, dtype=np.int64) % self.prime
        out = np.zeros_like(W)
        out[..., self.free] = self.reduce(W)
        return out

    def coordinates(self, W) -> np.ndarray:
        """Coordinates of vectors lying in the subspace w.r.t. the RREF basis."""
        W = np.asarray(W, dtype=np.int64) % self.prime
        return W[..., self.pivots]

    def contains(self, W) -> bool:
        return not np.any(self.reduce(np.atleast_2d(W)))
