"""Dense exact linear algebra over prime fields F_p.

Matrices are immutable wrappers around int64 numpy arrays with every entry
reduced into [0, p). The modulus travels with the matrix and binary
operations refuse to mix moduli.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

# Entries stay below 2**24 so a dot product of length up to 2**15 fits in int64.
MAX_MODULUS = 1 << 24


class ModulusError(ValueError):
    """Raised when matrices over different fields meet, or p is not prime."""


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """Validate p once per field context and return it."""
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise ModulusError(f"modulus must be a prime, got {p!r}")
    p = int(p)
    if p >= MAX_MODULUS:
        raise ModulusError(f"modulus {p} too large (limit {MAX_MODULUS})")
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise ModulusError(f"modulus {p} is not prime ({d} divides it)")
        d += 1
    return p


@lru_cache(maxsize=None)
def inverse_table(p: int) -> np.ndarray:
    """Table of multiplicative inverses mod p (entry 0 is 0)."""
    tab = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        tab[a] = pow(a, -1, p)
    tab.flags.writeable = False
    return tab


def _inv(a: np.ndarray | int, p: int):
    if p <= 65537:
        return inverse_table(p)[a]
    return pow(int(a), p - 2, p)


class Matrix:
    """An immutable dense matrix over F_p."""

    __slots__ = ("a", "p", "_hash")

    def __init__(self, entries, p: int, rows: int | None = None, cols: int | None = None):
        p = check_prime(p)
        arr = np.array(entries, dtype=np.int64)
        if arr.size == 0 and (rows is not None or cols is not None):
            arr = arr.reshape(rows or 0, cols or 0)
        elif arr.ndim == 1 and rows is not None and cols is not None:
            arr = arr.reshape(rows, cols)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(rows or 0, cols or 0)
            else:
                raise ValueError(f"matrix entries must be 2-dimensional, got shape {arr.shape}")
        arr %= p
        arr.flags.writeable = False
        object.__setattr__(self, "a", arr)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _wrap(cls, arr: np.ndarray, p: int) -> "Matrix":
        # trusted constructor: arr already reduced and owned
        m = cls.__new__(cls)
        arr.flags.writeable = False
        object.__setattr__(m, "a", arr)
        object.__setattr__(m, "p", p)
        object.__setattr__(m, "_hash", None)
        return m

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "Matrix":
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), check_prime(p))

    @classmethod
    def identity(cls, n: int, p: int) -> "Matrix":
        return cls._wrap(np.eye(n, dtype=np.int64), check_prime(p))

    @classmethod
    def from_array(cls, arr: np.ndarray, p: int) -> "Matrix":
        return cls._wrap(np.mod(np.asarray(arr, dtype=np.int64), p), check_prime(p))

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(self.a.T.copy(), self.p)

    def _same_field(self, other: "Matrix") -> None:
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.p != self.p:
            raise ModulusError(f"mixed moduli {self.p} and {other.p}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Matrix._wrap(matmul_mod(self.a, other.a, self.p), self.p)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return Matrix._wrap((self.a + other.a) % self.p, self.p)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        return Matrix._wrap((self.a - other.a) % self.p, self.p)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap((-self.a) % self.p, self.p)

    def scale(self, c: int) -> "Matrix":
        return Matrix._wrap((self.a * (int(c) % self.p)) % self.p, self.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.p, self.shape, self.a.tobytes())))
        return self._hash

    def __getitem__(self, idx):
        out = self.a[idx]
        if isinstance(out, np.ndarray):
            if out.ndim == 2:
                return Matrix._wrap(out.copy(), self.p)
            return out.copy()
        return int(out)

    def is_zero(self) -> bool:
        return not self.a.any()

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def __repr__(self) -> str:
        return f"Matrix({self.tolist()}, p={self.p})"


# ---------------------------------------------------------------------------
# array level kernels


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    return (a @ b) % p


def rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Row reduce a copy of a; first nonzero entry is the pivot."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        piv = int(a[r, c])
        if piv != 1:
            a[r] = (a[r] * _inv(piv, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank_array(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    if a.shape[0] > a.shape[1]:
        a = a.T
    return len(rref_array(a, p)[1])


def kernel_array(a: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the null space, in the standard free-variable form."""
    rows, cols = a.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    r, pivots = rref_array(a, p)
    piv_set = set(pivots)
    free = [c for c in range(cols) if c not in piv_set]
    k = np.zeros((cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        k[fc, j] = 1
        for i, pc in enumerate(pivots):
            k[pc, j] = (-r[i, fc]) % p
    return k


def solve_array(a: np.ndarray, b: np.ndarray, p: int) -> Optional[np.ndarray]:
    rows, cols = a.shape
    if b.shape[0] != rows:
        raise ValueError(f"solve: a has {rows} rows but b has {b.shape[0]}")
    nb = b.shape[1]
    if rows == 0:
        return np.zeros((cols, nb), dtype=np.int64)
    aug = np.concatenate([a % p, b % p], axis=1)
    r, pivots = rref_array(aug, p)
    if pivots and pivots[-1] >= cols:
        return None
    x = np.zeros((cols, nb), dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, cols:]
    return x


# ---------------------------------------------------------------------------
# Matrix level API


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    r, piv = rref_array(m.a, m.p)
    return Matrix._wrap(r, m.p), piv


def rank(m: Matrix) -> int:
    return rank_array(m.a, m.p)


def kernel_basis(m: Matrix) -> Matrix:
    return Matrix._wrap(kernel_array(m.a, m.p), m.p)


def solve(a: Matrix, b: Matrix) -> Optional[Matrix]:
    a._same_field(b)
    x = solve_array(a.a, b.a, a.p)
    return None if x is None else Matrix._wrap(x, a.p)


def kron(a: Matrix, b: Matrix) -> Matrix:
    a._same_field(b)
    return Matrix._wrap(np.kron(a.a, b.a) % a.p, a.p)


def hstack(blocks: Sequence[Matrix], rows: int | None = None, p: int | None = None) -> Matrix:
    if not blocks:
        return Matrix.zeros(rows or 0, 0, p)
    q = blocks[0].p
    for b in blocks:
        blocks[0]._same_field(b)
    return Matrix._wrap(np.concatenate([b.a for b in blocks], axis=1), q)


def vstack(blocks: Sequence[Matrix], cols: int | None = None, p: int | None = None) -> Matrix:
    if not blocks:
        return Matrix.zeros(0, cols or 0, p)
    q = blocks[0].p
    for b in blocks:
        blocks[0]._same_field(b)
    return Matrix._wrap(np.concatenate([b.a for b in blocks], axis=0), q)


def block_diag(blocks: Sequence[Matrix], p: int) -> Matrix:
    r = sum(b.rows for b in blocks)
    c = sum(b.cols for b in blocks)
    out = np.zeros((r, c), dtype=np.int64)
    i = j = 0
    for b in blocks:
        if b.p != p:
            raise ModulusError(f"mixed moduli {p} and {b.p}")
        out[i:i + b.rows, j:j + b.cols] = b.a
        i += b.rows
        j += b.cols
    return Matrix._wrap(out, p)


def inverse(m: Matrix) -> Optional[Matrix]:
    """Two-sided inverse of a square matrix, or None when singular."""
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    if rank(m) < m.rows:
        return None
    return solve(m, Matrix.identity(m.rows, m.p))


def left_inverse(k: Matrix) -> Matrix:
    """L with L @ k = I for k of full column rank."""
    if k.cols == 0:
        return Matrix.zeros(0, k.rows, k.p)
    lt = solve(k.T, Matrix.identity(k.cols, k.p))
    if lt is None:
        raise ValueError("left_inverse: columns are dependent")
    return lt.T


def column_basis(m: Matrix) -> Matrix:
    """Independent columns of m spanning its column space (pivot columns)."""
    _, piv = rref_array(m.a, m.p)
    return Matrix._wrap(m.a[:, piv].copy(), m.p)


def quotient_maps(sub: Matrix) -> tuple[Matrix, Matrix]:
    """Projection and section for k^n / span(columns of sub).

    Returns (proj, sec) with proj @ sub = 0, proj @ sec = I and
    the quotient basis given by the standard vectors at non-pivot coordinates
    of the row-reduced subspace.
    """
    n, p = sub.rows, sub.p
    if sub.cols == 0:
        return Matrix.identity(n, p), Matrix.identity(n, p)
    r, piv = rref_array(sub.a.T, p)
    w = r[: len(piv)].T  # n x r basis of the subspace
    piv_set = set(piv)
    comp = [c for c in range(n) if c not in piv_set]
    sec = np.zeros((n, len(comp)), dtype=np.int64)
    sec[comp, np.arange(len(comp))] = 1
    basis = np.concatenate([w, sec], axis=1)
    inv = solve_array(basis, np.eye(n, dtype=np.int64), p)
    proj = inv[len(piv):]
    return Matrix._wrap(np.ascontiguousarray(proj), p), Matrix._wrap(sec, p)


def in_span(basis: Matrix, v: Matrix) -> bool:
    if basis.cols == 0:
        return v.is_zero()
    return rank(hstack([basis, v])) == rank(basis)


def nonzero_det_batch(mats: np.ndarray, p: int) -> np.ndarray:
    """Vectorized invertibility test for a stack of square matrices mod p."""
    a = np.array(mats, dtype=np.int64) % p
    nb, n = a.shape[0], a.shape[1]
    ok = np.ones(nb, dtype=bool)
    idx = np.arange(nb)
    for c in range(n):
        sub = a[:, c:, c] != 0
        has = sub.any(axis=1)
        ok &= has
        piv = c + np.argmax(sub, axis=1)
        row_c = a[idx, c].copy()
        a[idx, c] = a[idx, piv]
        a[idx, piv] = row_c
        pv = a[:, c, c]
        if p <= 65537:
            inv = inverse_table(p)[pv]
        else:
            inv = np.array([pow(int(x), p - 2, p) if x else 0 for x in pv], dtype=np.int64)
        if c + 1 < n:
            fac = (a[:, c + 1:, c] * inv[:, None]) % p
            a[:, c + 1:, :] = (a[:, c + 1:, :] - fac[:, :, None] * a[:, c, None, :]) % p
    return ok


def as_matrix(x, p: int) -> Matrix:
    if isinstance(x, Matrix):
        if x.p != p:
            raise ModulusError(f"mixed moduli {p} and {x.p}")
        return x
    return Matrix(x, p)


def iter_vectors(dim: int, p: int) -> Iterable[np.ndarray]:
    """All vectors of F_p^dim in lexicographic order."""
    if dim == 0:
        yield np.zeros(0, dtype=np.int64)
        return
    grids = np.indices((p,) * dim).reshape(dim, -1).T
    for row in grids:
        yield row
