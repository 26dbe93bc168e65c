"""Finite matrix groups given by generators, fully enumerated.

Elements are stored as one ``(order, n, n)`` code array in canonical order
(row-major entry tuples, ascending).  Lookups go through fixed-width
big-endian byte keys, whose bytewise order is the canonical order, so a
batch of matrices can be located with one ``searchsorted``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .field import GF, make_field
from .linalg import Matrix, Subspace, inverse, rank

DEFAULT_CAP = 10**6


class GroupError(ValueError):
    pass


class CapExceeded(GroupError):
    def __init__(self, cap: int, count: int):
        super().__init__(f"group enumeration exceeded the cap of {cap} elements ({count} found so far)")
        self.cap = cap
        self.count = count


def enumeration_cap() -> int:
    """The element cap, overridable through the ``MIL_CAP`` environment variable."""
    v = os.environ.get("MIL_CAP")
    return int(v) if v else DEFAULT_CAP


def _keys(stack: np.ndarray) -> np.ndarray:
    stack = np.ascontiguousarray(stack, dtype=">u2")
    m = stack.shape[0]
    width = stack[0].nbytes if m else 2 * int(np.prod(stack.shape[1:]))
    return stack.reshape(m, -1).view(np.dtype((np.void, width))).ravel()


class MatrixGroup:
    """A finite subgroup of GL(n, q), enumerated."""

    def __init__(self, field: GF, n: int, generators: Sequence[Matrix], stack: np.ndarray, name: str = ""):
        self.field = field
        self.n = n
        self.generators = tuple(generators)
        keys = _keys(stack)
        order = np.argsort(keys, kind="stable")
        self.stack = np.ascontiguousarray(stack[order])
        self.stack.setflags(write=False)
        self._keys = keys[order]
        self.name = name

    # -- basic data ------------------------------------------------------

    @property
    def order(self) -> int:
        return self.stack.shape[0]

    def __len__(self) -> int:
        return self.order

    @cached_property
    def elements(self) -> tuple[Matrix, ...]:
        return tuple(Matrix(self.field, a) for a in self.stack)

    @cached_property
    def identity_index(self) -> int:
        return self.index(Matrix.identity(self.field, self.n))

    def locate(self, arrs) -> np.ndarray:
        """Canonical indices of a batch of matrices; ``-1`` for non-members."""
        arrs = np.asarray(arrs, dtype=np.int64).reshape(-1, self.n, self.n)
        k = _keys(arrs)
        pos = np.searchsorted(self._keys, k)
        pos = np.minimum(pos, self.order - 1)
        hit = self._keys[pos] == k
        return np.where(hit, pos, -1)

    def index(self, g: Matrix) -> int:
        i = int(self.locate(g.a)[0])
        if i < 0:
            raise GroupError("matrix is not an element of the group")
        return i

    def __contains__(self, g: Matrix) -> bool:
        return g.shape == (self.n, self.n) and int(self.locate(g.a)[0]) >= 0

    @property
    def characteristic(self) -> int:
        return self.field.p

    def is_modular(self) -> bool:
        return self.order % self.field.p == 0

    def is_p_group(self) -> bool:
        m = self.order
        while m % self.field.p == 0:
            m //= self.field.p
        return m == 1

    @cached_property
    def inverse_indices(self) -> np.ndarray:
        inv = np.stack([inverse(self.field, a) for a in self.stack])
        out = self.locate(inv)
        out.setflags(write=False)
        return out

    @property
    def inverse_stack(self) -> np.ndarray:
        return self.stack[self.inverse_indices]

    def multiplication_table(self) -> np.ndarray:
        """``table[i, j]`` is the index of ``elements[i] @ elements[j]``."""
        N = self.order
        table = np.empty((N, N), dtype=np.int64)
        chunk = max(1, 200000 // max(N * self.n * self.n, 1))
        for s in range(0, N, chunk):
            P = self.field.matmul(self.stack[s : s + chunk, None], self.stack[None, :])
            table[s : s + chunk] = self.locate(P.reshape(-1, self.n, self.n)).reshape(-1, N)
        return table

    def product_indices(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        P = self.field.matmul(self.stack[np.asarray(left)], self.stack[np.asarray(right)])
        return self.locate(P)

    def is_abelian(self) -> bool:
        F = self.field
        gens = [g.a for g in self.generators]
        for i, a in enumerate(gens):
            for b in gens[i + 1 :]:
                if not np.array_equal(F.matmul(a, b), F.matmul(b, a)):
                    return False
        return True

    def is_closed(self) -> bool:
        """Exhaustive check that the element set is closed under products and inverses."""
        return bool(np.all(self.multiplication_table() >= 0) and np.all(self.inverse_indices >= 0))

    def element_orders(self) -> np.ndarray:
        return self._classification["order"]

    # -- element classification -------------------------------------------

    @cached_property
    def _classification(self) -> dict[str, np.ndarray]:
        F = self.field
        n = self.n
        N = self.order
        I = np.eye(n, dtype=np.int64)
        D = F.sub(self.stack, I[None])
        ranks = np.array([rank(F, d) for d in D], dtype=np.int64)
        sq_zero = np.all(F.matmul(D, D) == 0, axis=(1, 2))
        orders = np.zeros(N, dtype=np.int64)
        cur = np.array(self.stack)
        pending = np.ones(N, dtype=bool)
        k = 1
        while pending.any():
            done = pending & np.all(cur == I[None], axis=(1, 2))
            orders[done] = k
            pending &= ~done
            if pending.any():
                cur[pending] = F.matmul(cur[pending], self.stack[pending])
                k += 1
        return {
            "rank": ranks,
            "fixed_dim": n - ranks,
            "pseudo_reflection": ranks == 1,
            "transvection": (ranks == 1) & sq_zero,
            "order": orders,
        }

    def pseudo_reflection_indices(self) -> np.ndarray:
        return np.flatnonzero(self._classification["pseudo_reflection"])

    def transvection_indices(self) -> np.ndarray:
        return np.flatnonzero(self._classification["transvection"])

    def describe(self) -> dict:
        c = self._classification
        return {
            "field": self.field.spec(),
            "n": self.n,
            "order": self.order,
            "generators": [g.format() for g in self.generators],
            "abelian": self.is_abelian(),
            "modular": self.is_modular(),
            "pseudo_reflections": int(c["pseudo_reflection"].sum()),
            "transvections": int(c["transvection"].sum()),
        }

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"MatrixGroup{label}(n={self.n}, {self.field!r}, order={self.order})"

    def to_json(self) -> dict:
        return {"field": self.field.spec(), "n": self.n, "generators": [g.format() for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict | str, cap: int | None = None) -> "MatrixGroup":
        if isinstance(data, str):
            data = json.loads(data)
        F = make_field(data["field"]["p"], data["field"]["r"])
        if list(F.modulus) != list(data["field"].get("modulus", F.modulus)):
            raise GroupError("field modulus does not match the canonical one")
        gens = [Matrix(F, [[F.parse(x) for x in row] for row in g]) for g in data["generators"]]
        return closure(gens, cap=cap, field=F, n=data["n"])


def is_pseudo_reflection(g: Matrix) -> bool:
    F = g.field
    return rank(F, F.sub(g.a, np.eye(g.rows, dtype=np.int64))) == 1


def is_transvection(g: Matrix) -> bool:
    F = g.field
    D = F.sub(g.a, np.eye(g.rows, dtype=np.int64))
    return rank(F, D) == 1 and not np.any(F.matmul(D, D))


def closure(generators: Iterable[Matrix], cap: int | None = None, field: GF | None = None, n: int | None = None, name: str = "") -> MatrixGroup:
    """Enumerate the group generated by ``generators``."""
    gens = list(generators)
    if cap is None:
        cap = enumeration_cap()
    if gens:
        field = gens[0].field
        n = gens[0].rows
    if field is None or n is None:
        raise GroupError("an empty generator list needs an explicit field and dimension")
    for g in gens:
        if g.field is not field or g.shape != (n, n):
            raise GroupError("generators must be square matrices of one size over one field")
        if rank(field, g.a) != n:
            raise GroupError("singular generator")
    I = np.eye(n, dtype=np.int64)
    gens = [g for g in gens if not g.is_identity()]
    G = np.stack([g.a for g in gens]) if gens else np.zeros((0, n, n), dtype=np.int64)
    seen = {bytes(_keys(I[None])[0])}
    found = [I[None]]
    frontier = I[None]
    while frontier.shape[0] and G.shape[0]:
        P = field.matmul(frontier[:, None], G[None]).reshape(-1, n, n)
        k = _keys(P)
        _, first = np.unique(k, return_index=True)
        fresh = [i for i in np.sort(first) if bytes(k[i]) not in seen]
        for i in fresh:
            seen.add(bytes(k[i]))
        if len(seen) > cap:
            raise CapExceeded(cap, len(seen))
        frontier = P[fresh]
        found.append(frontier)
    return MatrixGroup(field, n, tuple(Matrix(field, g) for g in G), np.concatenate(found), name=name)


def trivial_group(field: GF, n: int) -> MatrixGroup:
    return closure([], field=field, n=n, name="trivial")


def subgroup_from_indices(G: MatrixGroup, idx: Sequence[int], generators: Sequence[Matrix] | None = None, name: str = "") -> MatrixGroup:
    """Wrap a subset (assumed closed) of ``G`` as a group; generators default to a small generating subset."""
    idx = np.asarray(sorted(set(int(i) for i in idx)), dtype=np.int64)
    stack = G.stack[idx]
    H = MatrixGroup(G.field, G.n, (), stack, name=name)
    if generators is None:
        generators = _small_generating_set(H)
    H.generators = tuple(generators)
    return H


def _small_generating_set(H: MatrixGroup) -> list[Matrix]:
    """Greedy generating set: add the first element not yet in the generated subgroup."""
    gens: list[Matrix] = []
    covered = np.zeros(H.order, dtype=bool)
    covered[H.identity_index] = True
    current = np.array([H.identity_index])
    while not covered.all():
        i = int(np.flatnonzero(~covered)[0])
        gens.append(H.elements[i])
        # regenerate the subgroup from gens (inside H)
        members = {H.identity_index}
        frontier = [H.identity_index]
        gidx = np.array([H.index(g) for g in gens])
        while frontier:
            P = H.product_indices(np.repeat(frontier, len(gidx)), np.tile(gidx, len(frontier)))
            new = [int(x) for x in np.unique(P) if int(x) not in members]
            members.update(new)
            frontier = new
        current = np.array(sorted(members))
        covered[current] = True
    return gens


def subgroup(G: MatrixGroup, generators: Sequence[Matrix], name: str = "") -> MatrixGroup:
    for g in generators:
        if g not in G:
            raise GroupError("generator is not in the ambient group")
    return closure(generators, field=G.field, n=G.n, name=name)


def point_stabilizer(G: MatrixGroup, U: Subspace) -> MatrixGroup:
    """Elements of ``G`` fixing every vector of ``U``."""
    if U.n != G.n:
        raise GroupError("subspace lives in a different space")
    if U.dim == 0:
        return G
    B = U.basis.T  # columns span U
    img = G.field.matmul(G.stack, B[None])
    keep = np.flatnonzero(np.all(img == B[None], axis=(1, 2)))
    return subgroup_from_indices(G, keep, name=f"Stab({G.name})" if G.name else "")


@dataclass(frozen=True)
class ReflectionCensus:
    pseudo_reflections: tuple[int, ...]
    transvections: tuple[int, ...]
    orders: tuple[int, ...]  # element order of each pseudo-reflection

    @property
    def n_pseudo_reflections(self) -> int:
        return len(self.pseudo_reflections)

    @property
    def n_transvections(self) -> int:
        return len(self.transvections)


def reflection_census(G: MatrixGroup) -> ReflectionCensus:
    pr = G.pseudo_reflection_indices()
    tv = G.transvection_indices()
    orders = G.element_orders()[pr]
    return ReflectionCensus(tuple(int(i) for i in pr), tuple(int(i) for i in tv), tuple(int(o) for o in orders))


def _generated_by_indices(G: MatrixGroup, idx: Sequence[int], name: str) -> MatrixGroup:
    if len(idx) == 0:
        return subgroup_from_indices(G, [G.identity_index], generators=[], name=name)
    members = {G.identity_index}
    frontier = [G.identity_index]
    gidx = np.asarray(idx, dtype=np.int64)
    while frontier:
        P = G.product_indices(np.repeat(frontier, len(gidx)), np.tile(gidx, len(frontier)))
        new = [int(x) for x in np.unique(P) if int(x) not in members]
        members.update(new)
        frontier = new
    return subgroup_from_indices(G, sorted(members), name=name)


def reflection_subgroup(G: MatrixGroup) -> MatrixGroup:
    return _generated_by_indices(G, G.pseudo_reflection_indices(), f"Refl({G.name})")


def transvection_subgroup(G: MatrixGroup) -> MatrixGroup:
    return _generated_by_indices(G, G.transvection_indices(), f"Transv({G.name})")


def same_elements(G: MatrixGroup, H: MatrixGroup) -> bool:
    return G.order == H.order and np.array_equal(G.stack, H.stack)


@dataclass(frozen=True)
class CosetDecomposition:
    """``G`` as the disjoint union of right cosets ``H g_i``."""

    group: MatrixGroup
    subgroup: MatrixGroup
    representatives: tuple[int, ...]  # indices into group.elements
    coset_of: np.ndarray  # coset number of every element of group

    @property
    def index(self) -> int:
        return len(self.representatives)

    def representative_matrices(self) -> list[Matrix]:
        return [self.group.elements[i] for i in self.representatives]


def right_cosets(G: MatrixGroup, H: MatrixGroup) -> CosetDecomposition:
    if H.n != G.n or H.field is not G.field:
        raise GroupError("subgroup over a different space")
    Hin = G.locate(H.stack)
    if np.any(Hin < 0):
        raise GroupError("H is not a subgroup of G")
    coset_of = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for i in range(G.order):
        if coset_of[i] >= 0:
            continue
        members = G.product_indices(Hin, np.full(H.order, i))
        if np.any(coset_of[members] >= 0):
            raise GroupError("H is not a subgroup of G")
        coset_of[members] = len(reps)
        reps.append(i)
    if len(reps) * H.order != G.order:
        raise GroupError("H is not a subgroup of G")
    return CosetDecomposition(G, H, tuple(reps), coset_of)


@dataclass(frozen=True)
class TrivialSummandSplit:
    group: MatrixGroup  # restricted representation
    kept: tuple[int, ...]  # coordinates (0-based) of the complement
    dropped: tuple[int, ...]  # fixed basis vectors split off
    split: bool  # False when no splitting was found


def split_trivial_summand(G: MatrixGroup) -> TrivialSummandSplit:
    """Split off basis vectors fixed by ``G`` whose complementary coordinate space is stable."""
    n = G.n
    F = G.field
    gens = [g.a for g in G.generators] or [G.stack[i] for i in range(G.order)]
    fixed = {
        i for i in range(n)
        if all(np.array_equal(a[:, i], np.eye(n, dtype=np.int64)[:, i]) for a in gens)
    }
    changed = True
    while changed:
        changed = False
        comp = [c for c in range(n) if c not in fixed]
        for s in sorted(fixed):
            if any(np.any(a[s, comp]) for a in gens):
                fixed.discard(s)
                changed = True
    if not fixed:
        return TrivialSummandSplit(G, tuple(range(n)), (), False)
    kept = tuple(c for c in range(n) if c not in fixed)
    sub = [Matrix(F, a[np.ix_(kept, kept)]) for a in gens]
    if kept:
        H = closure(sub, field=F, n=len(kept), name=f"{G.name}|split" if G.name else "")
    else:
        H = trivial_group(F, 0)
    return TrivialSummandSplit(H, kept, tuple(sorted(fixed)), True)
