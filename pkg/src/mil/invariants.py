"""Graded invariant theory by degreewise linear algebra.

All spaces are subspaces of the dense degree-``d`` coefficient space (see
:mod:`mil.poly`).  ``rho_d(g)`` denotes the matrix of ``f -> act(g, f)`` on
degree ``d``; its column ``i`` is the image of the ``i``-th monomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np

from .field import GF
from .groups import MatrixGroup
from .linalg import Subspace, kernel, rank, row_basis
from .poly import (
    Character,
    Polynomial,
    count,
    dense_mul,
    monomial_images,
    mul_index,
    mul_linear,
    substitution_matrices,
)


class BudgetExceeded(RuntimeError):
    """A computation would exceed the configured size limits."""


@dataclass(frozen=True)
class Budget:
    max_degree: int = 60
    max_monomials: int = 6000  # largest graded piece handled densely
    max_bytes: float = 1.5e9  # cap on dense per-degree tables kept in memory at once

    def check_degree(self, n: int, d: int) -> int:
        if d > self.max_degree:
            raise BudgetExceeded(f"degree {d} exceeds the budget of {self.max_degree}")
        N = count(n, d)
        if N > self.max_monomials:
            raise BudgetExceeded(f"degree {d} piece has {N} monomials, over the budget of {self.max_monomials}")
        return N

    def check_bytes(self, nbytes: float, what: str) -> None:
        if nbytes > self.max_bytes:
            raise BudgetExceeded(f"{what} needs about {nbytes / 2**20:.0f} MiB, over the budget of {self.max_bytes / 2**20:.0f} MiB")


DEFAULT_BUDGET = Budget()


# --------------------------------------------------------------------------
# cached degreewise data per group


class GradedAction:
    """Per-group cache of generator matrices and invariant spaces."""

    def __init__(self, G: MatrixGroup):
        self.G = G
        self.field = G.field
        self.n = G.n
        self._gen_mats: list[np.ndarray] = []
        self._gen_iter = None
        self._inv: dict[int, np.ndarray] = {}

    def generator_matrices(self, d: int) -> np.ndarray:
        """``rho_d`` of every generator, shape ``(k, N_d, N_d)``."""
        from .linalg import inverse

        if self._gen_iter is None:
            gens = self.G.generators
            S = np.stack([inverse(self.field, g.a) for g in gens]) if gens else np.zeros((0, self.n, self.n), dtype=np.int64)
            self._gen_iter = substitution_matrices(self.field, S, 10**9)
        while len(self._gen_mats) <= d:
            _, M = next(self._gen_iter)
            self._gen_mats.append(M)
        return self._gen_mats[d]

    def invariant_basis(self, d: int) -> np.ndarray:
        if d not in self._inv:
            self._inv[d] = _common_eigenspace(self.field, self.generator_matrices(d), None)
        return self._inv[d]


def graded(G: MatrixGroup) -> GradedAction:
    ga = G.__dict__.get("_graded")
    if ga is None:
        ga = GradedAction(G)
        G.__dict__["_graded"] = ga
    return ga


def _common_eigenspace(F: GF, mats: np.ndarray, eig) -> np.ndarray:
    """Rows spanning ``{v : M_i v = eig_i v for all i}`` (``eig`` ``None`` means all ones)."""
    k = mats.shape[0]
    N = mats.shape[2]
    K = np.eye(N, dtype=np.int64)
    for i in range(k):
        lam = 1 if eig is None else int(eig[i])
        A = F.sub(mats[i], F.mul(lam, np.eye(N, dtype=np.int64)))
        # restrict to the current solution space: A K^T c = 0
        AK = F.matmul(A, K.T)
        C = kernel(F, AK)
        if C.shape[0] == 0:
            return np.zeros((0, N), dtype=np.int64)
        K = row_basis(F, F.matmul(C, K))
    return row_basis(F, K)


# --------------------------------------------------------------------------
# invariant and semi-invariant spaces


def invariant_space(G: MatrixGroup, d: int, budget: Budget = DEFAULT_BUDGET) -> Subspace:
    """Degree-``d`` invariants as a subspace of the degree-``d`` coefficient space."""
    N = budget.check_degree(G.n, d)
    return Subspace(G.field, N, graded(G).invariant_basis(d))


def invariant_space_bruteforce(G: MatrixGroup, d: int) -> Subspace:
    """Same space as an intersection over all group elements (oracle for small groups)."""
    from .linalg import inverse

    F = G.field
    S = np.stack([inverse(F, a) for a in G.stack])
    M = None
    for dd, M in substitution_matrices(F, S, d):
        pass
    return Subspace(F, count(G.n, d), _common_eigenspace(F, M, None))


def invariant_polynomials(G: MatrixGroup, d: int, budget: Budget = DEFAULT_BUDGET) -> list[Polynomial]:
    return [Polynomial.from_vector(G.field, G.n, d, v) for v in invariant_space(G, d, budget).basis]


@dataclass(frozen=True)
class GradedDims:
    group: MatrixGroup = field(repr=False)
    dims: tuple[int, ...]

    @property
    def D(self) -> int:
        return len(self.dims) - 1


def hilbert_function(G: MatrixGroup, D: int, budget: Budget = DEFAULT_BUDGET) -> GradedDims:
    return GradedDims(G, tuple(invariant_space(G, d, budget).dim for d in range(D + 1)))


def series_coefficients(degrees: Sequence[int], D: int) -> list[int]:
    """Coefficients of ``prod 1/(1 - t^d_i)`` up to ``t^D``."""
    c = [1] + [0] * D
    for e in degrees:
        for k in range(e, D + 1):
            c[k] += c[k - e]
    return c


def semi_invariant_space(G: MatrixGroup, chi: Character, d: int, budget: Budget = DEFAULT_BUDGET, check: bool = True) -> Subspace:
    """``{f : act(s, f) = chi(s) f for all s}`` in degree ``d``."""
    if chi.group is not G:
        raise ValueError("character belongs to a different group")
    if check and not chi.is_valid():
        raise ValueError("not a character of the group")
    N = budget.check_degree(G.n, d)
    mats = graded(G).generator_matrices(d)
    eig = [chi(g) for g in G.generators]
    return Subspace(G.field, N, _common_eigenspace(G.field, mats, eig))


# --------------------------------------------------------------------------
# transfers


def _chunk(total: int, per_item: int, limit: int = 6_000_000) -> int:
    return max(1, min(total, limit // max(per_item, 1)))


def summed_images(G: MatrixGroup, d: int, which, weights=None, elements=None) -> np.ndarray:
    """Rows ``sum_s w_s act(s, m_i)`` for the degree-``d`` monomials ``m_i``, ``i`` in ``which``.

    ``elements`` restricts the sum to a subset of group indices (weights are
    aligned with it).
    """
    F = G.field
    which = np.asarray(which, dtype=np.int64)
    N = count(G.n, d)
    idx = np.arange(G.order) if elements is None else np.asarray(elements, dtype=np.int64)
    w = np.ones(len(idx), dtype=np.int64) if weights is None else np.asarray(weights, dtype=np.int64)
    out = np.zeros((len(which), N), dtype=np.int64)
    if len(which) == 0 or len(idx) == 0:
        return out
    inv = G.inverse_stack
    step = _chunk(len(idx), len(which) * N)
    for s in range(0, len(idx), step):
        sl = idx[s : s + step]
        imgs = monomial_images(F, inv[sl], d, which)  # (B, m, N)
        part = F.sum(F.mul(w[s : s + step][:, None, None], imgs), axis=0)
        out = F.add(out, part)
    return out


def _image_sum_poly(G: MatrixGroup, f: Polynomial, weights=None, elements=None) -> Polynomial:
    F = G.field
    if f.n != G.n or f.field is not F:
        raise ValueError("polynomial does not live on the group's space")
    terms: dict = {}
    for d, part in f.homogeneous_components().items():
        vec = part.to_vector(d)
        nz = np.flatnonzero(vec)
        rows = summed_images(G, d, nz, weights, elements)
        res = F.dot_sum(vec[nz], rows, axis=0)
        terms.update(Polynomial.from_vector(F, G.n, d, res).terms)
    return Polynomial(F, G.n, terms)


def transfer(G: MatrixGroup, f: Polynomial) -> Polynomial:
    """``Tr(f) = sum_s act(s, f)``."""
    return _image_sum_poly(G, f)


def twisted_transfer(G: MatrixGroup, chi: Character, f: Polynomial) -> Polynomial:
    """``sum_s chi(s)^-1 act(s, f)``."""
    return _image_sum_poly(G, f, weights=G.field.inv(chi.values))


def relative_transfer(G: MatrixGroup, H: MatrixGroup, f: Polynomial) -> Polynomial:
    """``sum_i act(g_i, f)`` over right coset representatives of ``H`` in ``G``.

    With this choice ``transfer(G, f) == transfer(H, relative_transfer(G, H, f))``.
    """
    from .groups import right_cosets

    cd = right_cosets(G, H)
    return _image_sum_poly(G, f, elements=np.array(cd.representatives))


def transfer_matrix(G: MatrixGroup, d: int, weights=None) -> np.ndarray:
    """Rows: transfers of all degree-``d`` monomials."""
    return summed_images(G, d, np.arange(count(G.n, d)), weights)


# --------------------------------------------------------------------------
# coinvariants, ideals, generation


@dataclass(frozen=True)
class CoinvariantBound:
    value: int | None  # None when the budget ran out first
    scanned: int  # last degree examined
    quotient_dims: tuple[int, ...]

    @property
    def conclusive(self) -> bool:
        return self.value is not None


def coinvariant_bound(G: MatrixGroup, budget: Budget = DEFAULT_BUDGET) -> CoinvariantBound:
    """Smallest ``d`` with ``(A / A A^G_+)_d = 0``."""
    F = G.field
    n = G.n
    if n == 0:
        return CoinvariantBound(1, 1, (1, 0))
    prev = np.zeros((0, 1), dtype=np.int64)  # I_0 = 0
    dims = [1]
    d = 0
    cached = 0.0
    k = max(1, len(G.generators))
    while True:
        d += 1
        try:
            N = budget.check_degree(n, d)
            # the graded cache keeps every generator matrix up to degree d
            cached += 8.0 * k * N * N
            budget.check_bytes(cached, "generator matrices")
        except BudgetExceeded:
            return CoinvariantBound(None, d - 1, tuple(dims))
        parts = [graded(G).invariant_basis(d)]
        if prev.shape[0]:
            for j in range(n):
                L = np.zeros(n, dtype=np.int64)
                L[j] = 1
                parts.append(mul_linear(F, n, d - 1, prev, L))
        cur = row_basis(F, np.concatenate(parts).reshape(-1, N))
        dims.append(N - cur.shape[0])
        if cur.shape[0] == N:
            return CoinvariantBound(d, d, tuple(dims))
        prev = cur


def ideal_graded_piece_vectors(F: GF, n: int, gens: Sequence[Polynomial], d: int) -> np.ndarray:
    """Row basis of the degree-``d`` part of the ideal generated by ``gens`` in ``A``."""
    from .poly import ideal_graded_piece

    return ideal_graded_piece(list(gens), d, field=F, n=n).basis


def quotient_vanishes(F: GF, n: int, gens: Sequence[Polynomial], d: int) -> bool:
    """Whether ``(A / (gens))_d = 0``."""
    return ideal_graded_piece_vectors(F, n, gens, d).shape[0] == count(n, d)


def _check_invariant(G: MatrixGroup, f: Polynomial) -> None:
    if not f.is_homogeneous() or f.is_zero():
        raise ValueError("generators must be nonzero homogeneous polynomials")
    d = f.degree
    mats = graded(G).generator_matrices(d)
    v = f.to_vector(d)
    if np.any(G.field.matmul(mats, v[:, None])[:, :, 0] != v[None, :]):
        raise ValueError(f"{f} is not invariant")


def invariant_ideal_piece(G: MatrixGroup, gens: Sequence[Polynomial], d: int) -> np.ndarray:
    """Row basis of ``(sum_i A^G g_i)_d``."""
    F, n = G.field, G.n
    N = count(n, d)
    rows = []
    for g in gens:
        e = g.degree
        if e > d:
            continue
        U = graded(G).invariant_basis(d - e)
        if U.shape[0]:
            rows.append(dense_mul(F, n, d - e, U, e, g.to_vector(e)[None, :]))
    if not rows:
        return np.zeros((0, N), dtype=np.int64)
    return row_basis(F, np.concatenate(rows))


@dataclass(frozen=True)
class ContractionResult:
    passed: bool
    degree: int | None  # first failing degree
    witness: Polynomial | None  # invariant in (J A) ∩ A^G outside J
    checked_up_to: int


def ideal_contraction_check(G: MatrixGroup, J_gens: Sequence[Polynomial], D: int, budget: Budget = DEFAULT_BUDGET) -> ContractionResult:
    """Compare ``(J A) ∩ A^G`` with ``J`` degree by degree up to ``D``."""
    F, n = G.field, G.n
    for f in J_gens:
        _check_invariant(G, f)
    for d in range(D + 1):
        N = budget.check_degree(n, d)
        JA = Subspace(F, N, ideal_graded_piece_vectors(F, n, J_gens, d))
        inv = Subspace(F, N, graded(G).invariant_basis(d))
        contraction = JA.intersect(inv)
        JG = Subspace(F, N, invariant_ideal_piece(G, J_gens, d))
        if contraction.dim != JG.dim:
            for v in contraction.basis:
                if not JG.contains(v):
                    return ContractionResult(False, d, Polynomial.from_vector(F, n, d, v), d)
        # JG is always inside the contraction, so equal dimension means equality
    return ContractionResult(True, None, None, D)


@dataclass(frozen=True)
class GenerationResult:
    passed: bool
    failing_degree: int | None
    dims: tuple[tuple[int, int], ...]  # (dim of generated piece, dim A^G_d) per degree


def subalgebra_piece(F: GF, n: int, fs: Sequence[Polynomial], d: int, cache: dict | None = None) -> np.ndarray:
    """Row basis of the span of products of ``fs`` of total degree ``d``."""
    if cache is None:
        cache = {}
    if d in cache:
        return cache[d]
    N = count(n, d)
    if d == 0:
        res = np.ones((1, 1), dtype=np.int64)
    else:
        rows = []
        for f in fs:
            e = f.degree
            if e < 1 or e > d:
                continue
            lower = subalgebra_piece(F, n, fs, d - e, cache)
            if lower.shape[0]:
                rows.append(dense_mul(F, n, d - e, lower, e, f.to_vector(e)[None, :]))
        res = row_basis(F, np.concatenate(rows)) if rows else np.zeros((0, N), dtype=np.int64)
    cache[d] = res
    return res


def algebra_generation_check(G: MatrixGroup, fs: Sequence[Polynomial], D: int, budget: Budget = DEFAULT_BUDGET) -> GenerationResult:
    """Degreewise comparison of ``k[fs]_d`` with ``A^G_d`` for ``d <= D``."""
    for f in fs:
        _check_invariant(G, f)
    F, n = G.field, G.n
    cache: dict = {}
    dims = []
    failing = None
    for d in range(D + 1):
        budget.check_degree(n, d)
        gen = subalgebra_piece(F, n, fs, d, cache)
        inv = graded(G).invariant_basis(d)
        dims.append((gen.shape[0], inv.shape[0]))
        if gen.shape[0] != inv.shape[0] and failing is None:
            failing = d
    return GenerationResult(failing is None, failing, tuple(dims))


def graded_character_values(G: MatrixGroup, f: Polynomial) -> np.ndarray | None:
    """``c_s`` with ``act(s, f) = c_s f`` for every element, or ``None`` if ``f`` is not semi-invariant."""
    F = G.field
    if not f.is_homogeneous() or f.is_zero():
        raise ValueError("need a nonzero homogeneous polynomial")
    d = f.degree
    v = f.to_vector(d)
    nz = np.flatnonzero(v)
    out = np.zeros(G.order, dtype=np.int64)
    inv = G.inverse_stack
    lead = int(nz[-1])
    step = _chunk(G.order, len(nz) * count(G.n, d))
    for s in range(0, G.order, step):
        imgs = monomial_images(F, inv[s : s + step], d, nz)  # (B, m, N)
        acted = F.sum(F.mul(v[nz][None, :, None], imgs), axis=1)  # (B, N)
        c = F.div(acted[:, lead], v[lead])
        if np.any(acted != F.mul(c[:, None], v[None, :])):
            return None
        out[s : s + step] = c
    return out
