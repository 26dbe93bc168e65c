"""Exact dense linear algebra over :class:`~mil.field.GF`.

Matrices are numpy int64 arrays of field codes.  :class:`Matrix` is an
immutable, hashable wrapper used for group elements; the free functions
work on raw arrays.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .field import GF, FieldElement, as_codes


class ShapeError(ValueError):
    pass


def rref(F: GF, A) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.  Zero rows end up last."""
    A = np.array(A, dtype=np.int64, copy=True)
    if A.ndim != 2:
        raise ShapeError(f"expected a 2-d array, got shape {A.shape}")
    m, n = A.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.flatnonzero(A[row:, col])
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            A[[row, piv]] = A[[piv, row]]
        a = int(A[row, col])
        if a != 1:
            A[row, col:] = F.mul(int(F.inv(a)), A[row, col:])
        others = np.flatnonzero(A[:, col])
        others = others[others != row]
        if others.size:
            factors = A[others, col][:, None]
            A[others, col:] = F.sub(A[others, col:], F.mul(factors, A[row, col:][None, :]))
        pivots.append(col)
        row += 1
    return A, pivots


def rank(F: GF, A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(F, A)[1])


def row_basis(F: GF, A) -> np.ndarray:
    """Canonical basis (nonzero rref rows) of the row space of ``A``."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[0] == 0:
        return A.reshape(0, A.shape[1])
    R, piv = rref(F, A)
    return R[: len(piv)]


def kernel(F: GF, A) -> np.ndarray:
    """Basis of ``{x : A x = 0}`` as the rows of the returned array."""
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    if m == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(F, A)
    free = [c for c in range(n) if c not in set(piv)]
    K = np.zeros((len(free), n), dtype=np.int64)
    if not free:
        return K
    K[np.arange(len(free)), free] = 1
    if piv:
        block = R[: len(piv)][:, free]  # (npiv, nfree)
        K[:, piv] = F.neg(block.T)
    return K


def solve_linear(F: GF, M, rhs) -> tuple[np.ndarray | None, np.ndarray]:
    """Solve ``M X = rhs``.

    Returns ``(X, K)`` where ``X`` is one solution (``None`` when the system
    is inconsistent) and the rows of ``K`` span the kernel of ``M``.
    """
    M = np.asarray(M, dtype=np.int64)
    rhs = np.asarray(rhs, dtype=np.int64)
    vector = rhs.ndim == 1
    if vector:
        rhs = rhs[:, None]
    if M.ndim != 2 or rhs.shape[0] != M.shape[0]:
        raise ShapeError(f"incompatible shapes {M.shape} and {rhs.shape}")
    m, n = M.shape
    aug = np.concatenate([M, rhs], axis=1)
    R, piv = rref(F, aug)
    K = kernel(F, M)
    if any(c >= n for c in piv):
        return None, K
    X = np.zeros((n, rhs.shape[1]), dtype=np.int64)
    for i, c in enumerate(piv):
        X[c] = R[i, n:]
    return (X[:, 0] if vector else X), K


def inverse(F: GF, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ShapeError(f"not square: {A.shape}")
    R, piv = rref(F, np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1))
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return R[:, n:]


class Matrix:
    """Immutable square-or-rectangular matrix over a finite field."""

    __slots__ = ("field", "a", "_key")

    def __init__(self, field: GF, entries):
        a = entries.a if isinstance(entries, Matrix) else as_codes(field, entries)
        a = np.array(a, dtype=np.int64)
        if a.ndim != 2:
            raise ShapeError(f"matrix entries must be 2-d, got shape {a.shape}")
        a.setflags(write=False)
        self.field = field
        self.a = a
        self._key = a.tobytes() + bytes(a.shape)

    @classmethod
    def identity(cls, field: GF, n: int) -> "Matrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def diag(cls, field: GF, values: Sequence) -> "Matrix":
        v = as_codes(field, list(values))
        return cls(field, np.diag(v))

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def key(self) -> bytes:
        return self._key

    def sort_key(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.a.ravel())

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        return Matrix(self.field, self.field.matmul(self.a, other.a))

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.field, self.field.add(self.a, other.a))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.field, self.field.sub(self.a, other.a))

    def scale(self, c) -> "Matrix":
        c = c.value if isinstance(c, FieldElement) else int(c)
        return Matrix(self.field, self.field.mul(c, self.a))

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            return self.inverse() ** (-k)
        result = Matrix.identity(self.field, self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def inverse(self) -> "Matrix":
        return Matrix(self.field, inverse(self.field, self.a))

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.a.T)

    def conj(self) -> "Matrix":
        return Matrix(self.field, self.field.conj(self.a))

    def frobenius(self) -> "Matrix":
        return Matrix(self.field, self.field.frobenius(self.a))

    def rank(self) -> int:
        return rank(self.field, self.a)

    def is_identity(self) -> bool:
        n, m = self.shape
        return n == m and np.array_equal(self.a, np.eye(n, dtype=np.int64))

    def __getitem__(self, idx):
        return self.a[idx]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def format(self) -> list[list[str]]:
        return [[self.field.format(x) for x in row] for row in self.a]

    def __repr__(self):
        body = "; ".join(" ".join(r) for r in self.format())
        return f"Matrix[{self.field!r}]({body})"


class Subspace:
    """A subspace of ``F^n`` stored by its canonical (rref) basis rows."""

    __slots__ = ("field", "n", "basis")

    def __init__(self, field: GF, n: int, vectors=()):
        vecs = np.asarray(vectors if len(vectors) else np.zeros((0, n)), dtype=np.int64)
        if vecs.ndim == 1:
            vecs = vecs[None, :]
        if vecs.shape[1] != n:
            raise ShapeError(f"vectors of length {vecs.shape[1]} in ambient dimension {n}")
        self.field = field
        self.n = n
        b = row_basis(field, vecs)
        b.setflags(write=False)
        self.basis = b

    @classmethod
    def span(cls, field: GF, vectors: Iterable, n: int | None = None) -> "Subspace":
        vecs = [as_codes(field, v) for v in vectors]
        if n is None:
            n = len(vecs[0])
        return cls(field, n, np.array(vecs).reshape(len(vecs), n))

    @classmethod
    def whole(cls, field: GF, n: int) -> "Subspace":
        return cls(field, n, np.eye(n, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def codim(self) -> int:
        return self.n - self.dim

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64)
        if v.ndim == 1:
            v = v[None, :]
        return rank(self.field, np.concatenate([self.basis, v])) == self.dim

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __le__(self, other: "Subspace") -> bool:
        return self.dim == 0 or other.contains(self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.field, self.n, np.concatenate([self.basis, other.basis]))

    def intersect(self, other: "Subspace") -> "Subspace":
        # v = a B1 = b B2  <=>  (a, -b) in ker of [B1; B2]^T
        if self.dim == 0 or other.dim == 0:
            return Subspace(self.field, self.n)
        stacked = np.concatenate([self.basis, other.basis]).T
        K = kernel(self.field, stacked)
        if K.shape[0] == 0:
            return Subspace(self.field, self.n)
        a = K[:, : self.dim]
        return Subspace(self.field, self.n, self.field.matmul(a, self.basis))

    def annihilator(self) -> "Subspace":
        """Linear forms (coefficient rows) vanishing on this subspace."""
        if self.dim == 0:
            return Subspace.whole(self.field, self.n)
        return Subspace(self.field, self.n, kernel(self.field, self.basis))

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.n == other.n
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return hash((self.n, self.basis.tobytes()))

    def __repr__(self):
        rows = ["(" + ",".join(self.field.format(x) for x in r) + ")" for r in self.basis]
        return f"Subspace(dim={self.dim}, n={self.n}, [{' '.join(rows)}])"


def fixed_space(g: Matrix) -> Subspace:
    """``{v : g v = v}``."""
    n, m = g.shape
    if n != m:
        raise ShapeError(f"fixed space of a non-square matrix {g.shape}")
    F = g.field
    return Subspace(F, n, kernel(F, F.sub(g.a, np.eye(n, dtype=np.int64))))
