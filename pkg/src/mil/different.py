"""Reflecting hyperplanes, the different ``theta_G`` and its character.

``theta_G`` is the largest form with ``Tr(f / theta_G)`` polynomial for
every ``f``.  Writing ``chi`` for the character of a candidate
``theta = prod x_a^{d_a}``, ``Tr(f / theta) = Tr_chi(f) / theta`` with the
twisted transfer ``Tr_chi(f) = sum_s chi(s)^-1 act(s, f)``, which is
``A^G``-linear.  So the condition only needs checking on monomials of degree
below the coinvariant bound, and ``theta | Tr_chi(m)`` is tested one
hyperplane at a time through the valuation ``v_a`` (the hyperplane forms are
pairwise coprime).

Two search methods are provided:

* ``"global"``: brute force on the whole group, exponents raised orbit by
  orbit until the condition fails (the valid exponent vectors are exactly
  the divisors of ``theta_G``, a box);
* ``"local"``: the exponent at ``a`` computed by the same brute force on the
  inertia group ``W_a`` alone, whose different is ``x_a^{d_a}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import MatrixGroup, point_stabilizer, subgroup_from_indices
from .invariants import DEFAULT_BUDGET, Budget, BudgetExceeded, coinvariant_bound
from .linalg import Subspace
from .poly import Character, Polynomial, count, exponents, linear_form, mul_linear, substitution_matrices, substitution_matrix


class DifferentError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# arrangement


@dataclass
class Hyperplane:
    form: np.ndarray  # coefficient row, last nonzero entry 1
    inertia: tuple[int, ...]  # group indices of W_a (identity included)
    n_transvections: int
    orbit: int = -1
    single_center: bool = True

    @property
    def order(self) -> int:
        return len(self.inertia)

    @property
    def q_alpha(self) -> int:
        return self.n_transvections + 1

    @property
    def e_alpha(self) -> int:
        return self.order // self.q_alpha

    @property
    def lower_bound(self) -> int:
        return max(self.e_alpha - 1, self.q_alpha - 1)

    @property
    def is_tame(self) -> bool:
        return self.n_transvections == 0

    def polynomial(self, field) -> Polynomial:
        return linear_form(field, self.form)


@dataclass
class ReflectionArrangement:
    group: MatrixGroup = field(repr=False)
    hyperplanes: list[Hyperplane]
    orbits: list[list[int]]  # hyperplane indices per orbit

    @property
    def n_pseudo_reflections(self) -> int:
        return sum(h.order - 1 for h in self.hyperplanes)


def _monic(F, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale rows so the last nonzero entry is 1; also return the scale factors."""
    rows = np.atleast_2d(rows)
    last = rows.shape[1] - 1 - np.argmax(rows[:, ::-1] != 0, axis=1)
    s = rows[np.arange(rows.shape[0]), last]
    return F.mul(F.inv(s)[:, None], rows), s


def reflection_arrangement(G: MatrixGroup) -> ReflectionArrangement:
    F = G.field
    n = G.n
    I = np.eye(n, dtype=np.int64)
    pr = G.pseudo_reflection_indices()
    tv = set(int(i) for i in G.transvection_indices())
    by_form: dict[bytes, list[int]] = {}
    forms: dict[bytes, np.ndarray] = {}
    centers: dict[bytes, set] = {}
    for i in pr:
        D = F.sub(G.stack[i], I)
        r = int(np.flatnonzero(np.any(D != 0, axis=1))[0])
        form, _ = _monic(F, D[r])
        key = form[0].tobytes()
        by_form.setdefault(key, []).append(int(i))
        forms[key] = form[0]
        if int(i) in tv:
            c = int(np.flatnonzero(np.any(D != 0, axis=0))[0])
            center, _ = _monic(F, D[:, c])
            centers.setdefault(key, set()).add(center[0].tobytes())
    keys = sorted(by_form, key=lambda k: tuple(forms[k][::-1]))
    hyps = []
    for k in keys:
        idx = sorted([G.identity_index] + by_form[k])
        ntv = sum(1 for i in by_form[k] if i in tv)
        hyps.append(Hyperplane(forms[k], tuple(idx), ntv, single_center=len(centers.get(k, ())) <= 1))
    # orbits under the group: c -> c g^-1
    pos = {h.form.tobytes(): j for j, h in enumerate(hyps)}
    parent = list(range(len(hyps)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if hyps:
        C = np.stack([h.form for h in hyps])
        from .linalg import inverse

        for g in G.generators:
            img, _ = _monic(F, F.matmul(C, inverse(F, g.a)))
            for j, row in enumerate(img):
                t = pos[row.tobytes()]
                a, b = find(j), find(t)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    roots = sorted({find(j) for j in range(len(hyps))})
    orbits = [[j for j in range(len(hyps)) if find(j) == r] for r in roots]
    for o, members in enumerate(orbits):
        for j in members:
            hyps[j].orbit = o
    return ReflectionArrangement(G, hyps, orbits)


def form_scalars(G: MatrixGroup, forms: np.ndarray) -> np.ndarray:
    """``c[s, j]`` with ``act(s, x_j) = c[s, j] * x_(s j)`` for monic forms ``x_j`` permuted by ``G``."""
    F = G.field
    R = F.matmul(forms[None, :, :], G.inverse_stack)  # (|G|, h, n)
    B, h, n = R.shape
    _, s = _monic(F, R.reshape(-1, n))
    return s.reshape(B, h)


def orbit_characters(G: MatrixGroup, arr: ReflectionArrangement) -> np.ndarray:
    """Values ``(|G|, #orbits)`` of the characters of the orbit products ``prod_{a in o} x_a``."""
    F = G.field
    out = np.ones((G.order, len(arr.orbits)), dtype=np.int64)
    if not arr.hyperplanes:
        return out
    forms = np.stack([h.form for h in arr.hyperplanes])
    c = form_scalars(G, forms)
    for o, members in enumerate(arr.orbits):
        v = np.ones(G.order, dtype=np.int64)
        for j in members:
            v = F.mul(v, c[:, j])
        out[:, o] = v
    return out


# --------------------------------------------------------------------------
# valuations


def valuation_change(F, form: np.ndarray) -> tuple[int, np.ndarray]:
    """``(j, S)``: the substitution ``S`` is an automorphism sending the form to ``x_j``."""
    n = form.shape[0]
    j = int(np.flatnonzero(form)[-1])
    S = np.eye(n, dtype=np.int64)
    for k in range(n):
        if k != j:
            S[j, k] = F.neg(form[k])
    return j, S


def min_valuations(rows: np.ndarray, E: np.ndarray, j: int) -> np.ndarray:
    """Per row: smallest exponent of ``x_j`` over the nonzero coefficients (large for zero rows)."""
    big = np.iinfo(np.int64).max // 4
    ex = np.where(rows != 0, E[None, :, j], big)
    return ex.min(axis=1)


@dataclass
class _DegreeData:
    d: int
    fibers: dict  # key -> rows after the valuation change, per hyperplane representative


class _Searcher:
    """Degreewise fibre sums of the transfer, ready for any character built from orbit characters."""

    def __init__(self, G: MatrixGroup, arr: ReflectionArrangement, reps: Sequence[int], D: int, budget: Budget):
        F = G.field
        self.G = G
        self.F = F
        self.reps = list(reps)
        chars = orbit_characters(G, arr)
        self.chars = chars
        keys, inverse = np.unique(chars, axis=0, return_inverse=True)
        self.keys = keys
        n = G.n
        sq = sum(budget.check_degree(n, d) ** 2 for d in range(D))
        budget.check_bytes(8 * sq * len(keys) * (1 + len(self.reps)), "transfer fibre sums")
        key_of = inverse.ravel()
        sums = [[np.zeros((count(n, d), count(n, d)), dtype=np.int64) for d in range(D)] for _ in range(len(keys))]
        inv = G.inverse_stack
        step = max(1, min(G.order, 4_000_000 // max(1, count(n, max(D - 1, 0)) ** 2)))
        for s in range(0, G.order if D else 0, step):
            idx = np.arange(s, min(s + step, G.order))
            ks = key_of[idx]
            for d, M in substitution_matrices(F, inv[idx], D - 1):
                for k in np.unique(ks):
                    sums[k][d] = F.add(sums[k][d], F.sum(M[ks == k], axis=0))
        self.degrees = []
        for d in range(D):
            E = exponents(n, d)
            per_key = []
            for k in range(len(keys)):
                rows = sums[k][d].T  # row i: fibre sum of act(s, m_i)
                per_rep = []
                for a in self.reps:
                    j, S = valuation_change(F, arr.hyperplanes[a].form)
                    M = substitution_matrix(F, S, d)
                    per_rep.append(F.matmul(rows, M.T))
                per_key.append(per_rep)
            self.degrees.append((d, E, per_key))

    def character(self, expo: Sequence[int]) -> np.ndarray:
        """Values on the fibre keys of ``prod_o chi_o^expo[o]``."""
        F = self.F
        v = np.ones(len(self.keys), dtype=np.int64)
        for o, e in enumerate(expo):
            v = F.mul(v, F.pow(self.keys[:, o], e))
        return v

    def min_valuation(self, expo: Sequence[int], r: int, arr: ReflectionArrangement):
        """Smallest ``v_a(Tr_chi(m))`` over all scanned monomials at the ``r``-th representative."""
        F = self.F
        w = F.inv(self.character(expo))
        a = self.reps[r]
        j, _ = valuation_change(F, arr.hyperplanes[a].form)
        best = (np.iinfo(np.int64).max, None)
        for d, E, per_key in self.degrees:
            acc = None
            for k in range(len(self.keys)):
                term = F.mul(w[k], per_key[k][r])
                acc = term if acc is None else F.add(acc, term)
            v = min_valuations(acc, E, j)
            i = int(np.argmin(v))
            if v[i] < best[0]:
                best = (int(v[i]), (d, i))
        return best


# --------------------------------------------------------------------------
# the different


@dataclass
class Witness:
    exponent: int  # failing exponent (d_a + 1)
    degree: int
    monomial: tuple[int, ...]
    valuation: int


@dataclass
class DifferentData:
    group: MatrixGroup = field(repr=False)
    arrangement: ReflectionArrangement
    exponents: list[int]  # per hyperplane
    theta: Polynomial
    chi: Character
    certified: bool
    method: str
    D_cov: dict  # bound used per hyperplane (local) or {"G": value}
    witnesses: dict  # hyperplane index (local) or orbit (global) -> Witness
    lower_bound_ok: dict  # hyperplane index -> bool or None (multi-centre: no bound claimed)
    notes: list[str] = field(default_factory=list)  # why the exponents are only lower bounds

    @property
    def delta(self) -> int:
        return sum(self.exponents)

    def triples(self) -> list[tuple[int, int, int]]:
        return [(h.e_alpha, h.q_alpha, d) for h, d in zip(self.arrangement.hyperplanes, self.exponents)]


def _theta(G: MatrixGroup, arr: ReflectionArrangement, expo: Sequence[int]) -> Polynomial:
    F, n = G.field, G.n
    vec = np.ones(1, dtype=np.int64)
    deg = 0
    for h, e in zip(arr.hyperplanes, expo):
        for _ in range(e):
            vec = mul_linear(F, n, deg, vec, h.form)
            deg += 1
    return Polynomial.from_vector(F, n, deg, vec)


def _theta_character(G: MatrixGroup, arr: ReflectionArrangement, expo_per_orbit: Sequence[int]) -> Character:
    F = G.field
    chars = orbit_characters(G, arr)
    v = np.ones(G.order, dtype=np.int64)
    for o, e in enumerate(expo_per_orbit):
        v = F.mul(v, F.pow(chars[:, o], e))
    return Character(G, v)


def _search_single_orbit(G: MatrixGroup, arr: ReflectionArrangement, budget: Budget):
    """Brute-force search on a group, one orbit at a time.  Returns exponents per orbit, witnesses, D_cov."""
    if not arr.orbits:
        return [], {}, None
    cb = coinvariant_bound(G, budget)
    if not cb.conclusive:
        raise BudgetExceeded(f"coinvariant bound not reached by degree {cb.scanned}")
    reps = [members[0] for members in arr.orbits]
    S = _Searcher(G, arr, reps, cb.value, budget)
    expo = [0] * len(arr.orbits)
    witnesses = {}
    for o in range(len(arr.orbits)):
        while True:
            trial = list(expo)
            trial[o] += 1
            fail = None
            for r in range(len(reps)):
                v, where = S.min_valuation(trial, r, arr)
                if v < trial[r]:
                    fail = (v, where)
                    break
            if fail is None:
                if trial[o] > cb.value:
                    raise DifferentError("twisted transfer vanishes identically in the scanned degrees")
                expo = trial
                continue
            v, (d, i) = fail
            witnesses[o] = Witness(trial[o], d, tuple(int(x) for x in exponents(G.n, d)[i]), v)
            break
    return expo, witnesses, cb.value


def different(G: MatrixGroup, method: str = "local", budget: Budget = DEFAULT_BUDGET) -> DifferentData:
    """Compute ``theta_G`` by brute force (see module docstring for the two methods).

    If a search runs out of budget the affected exponents are replaced by lower
    bounds and the result is returned with ``certified`` false.
    """
    arr = reflection_arrangement(G)
    hyps = arr.hyperplanes
    notes = []
    if method == "global":
        try:
            expo_o, wit, Dc = _search_single_orbit(G, arr, budget)
        except BudgetExceeded as exc:
            notes.append(f"whole-group search: {exc}")
            expo_o, wit, Dc = [_fallback_exponent(hyps[members[0]]) for members in arr.orbits], {}, None
        expo = [expo_o[h.orbit] for h in hyps]
        D_cov = {"G": Dc}
        witnesses = wit
    elif method == "local":
        expo = [0] * len(hyps)
        D_cov = {}
        witnesses = {}
        for members in arr.orbits:
            a = members[0]
            W = subgroup_from_indices(G, hyps[a].inertia, name="W")
            warr = reflection_arrangement(W)
            if len(warr.hyperplanes) != 1:
                raise DifferentError("inertia group has more than one reflecting hyperplane")
            try:
                e, wit, Dc = _search_single_orbit(W, warr, budget)
            except BudgetExceeded as exc:
                notes.append(f"hyperplane {a}: {exc}")
                e, wit, Dc = [_fallback_exponent(hyps[a])], {}, None
            for j in members:
                expo[j] = e[0]
            D_cov[a] = Dc
            if wit:
                witnesses[a] = wit[0]
    else:
        raise ValueError(f"unknown method {method!r}")
    expo_o = [expo[members[0]] for members in arr.orbits]
    theta = _theta(G, arr, expo)
    chi = _theta_character(G, arr, expo_o)
    lb = {j: (expo[j] >= h.lower_bound if h.single_center else None) for j, h in enumerate(hyps)}
    return DifferentData(G, arr, expo, theta, chi, not notes, method, D_cov, witnesses, lb, notes)


def _fallback_exponent(h: Hyperplane) -> int:
    """Exponent known without a search: the bound on single-centre hyperplanes, else 0."""
    return h.lower_bound if h.single_center else 0


# --------------------------------------------------------------------------
# factorisation along a point stabiliser


@dataclass
class DifferentFactorization:
    theta_H: Polynomial
    theta_quotient: Polynomial
    quotient_outside_prime: bool  # theta_{G/H} does not vanish on U
    intrinsic_match: bool  # different(H) equals theta_H
    coprime: bool
    discrepancy: str | None


def restrict_to_subspace(f: Polynomial, U: Subspace) -> Polynomial:
    """``f`` pulled back along ``k^dim U -> V``, ``t -> sum t_i u_i``."""
    return f.substitute(U.basis.T)


def different_factorization(G: MatrixGroup, H: MatrixGroup, U: Subspace, data: DifferentData | None = None, method: str = "local", budget: Budget = DEFAULT_BUDGET) -> DifferentFactorization:
    """Split ``theta_G`` into the hyperplanes containing ``U`` and the rest."""
    stab = point_stabilizer(G, U)
    if stab.order != H.order or not np.array_equal(stab.stack, H.stack):
        raise DifferentError("H is not the point stabiliser of U")
    if data is None:
        data = different(G, method, budget)
    F = G.field
    arr = data.arrangement
    inside, outside = [], []
    for j, h in enumerate(arr.hyperplanes):
        vanishes = U.dim == 0 or not np.any(F.matmul(U.basis, h.form))
        (inside if vanishes else outside).append(j)
    e_in = [data.exponents[j] if j in inside else 0 for j in range(len(arr.hyperplanes))]
    e_out = [data.exponents[j] if j in outside else 0 for j in range(len(arr.hyperplanes))]
    theta_H = _theta(G, arr, e_in)
    theta_Q = _theta(G, arr, e_out)
    if theta_H * theta_Q != data.theta:
        raise DifferentError("factorisation does not multiply back to theta_G")
    outside_ok = U.dim == 0 or not restrict_to_subspace(theta_Q, U).is_zero()
    from .poly import divide_by_linear

    coprime = all(
        divide_by_linear(theta_Q, arr.hyperplanes[j].polynomial(F)) is None
        for j in inside
        if data.exponents[j] > 0
    )
    own = different(H, method, budget)
    match = own.theta == theta_H
    note = None if match else f"different of H is {own.theta}, factor is {theta_H}"
    return DifferentFactorization(theta_H, theta_Q, outside_ok, match, coprime, note)
