"""Decisions: direct summand property, coregularity, and the criteria relating them."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .field import Embedding, make_field
from .groups import (
    MatrixGroup,
    point_stabilizer,
    reflection_census,
    reflection_subgroup,
    transvection_subgroup,
)
from .invariants import (
    DEFAULT_BUDGET,
    Budget,
    BudgetExceeded,
    graded,
    invariant_space,
    series_coefficients,
    subalgebra_piece,
    summed_images,
)
from .different import DifferentData, different
from .linalg import Matrix, Subspace, rank, row_basis, solve_linear
from .poly import Polynomial, count, exponents, ideal_graded_piece


class VerdictRefused(BudgetExceeded):
    """Raised when a decision would rest on uncertified input (a budget-limited different)."""


# --------------------------------------------------------------------------
# direct summand property


@dataclass
class DspVerdict:
    decision: str  # "holds" | "fails"
    witness: Polynomial | None = None  # theta-tilde with Tr(theta-tilde / theta) = 1
    obstruction: str | None = None
    method: str = "linear-system"
    notes: list[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.decision == "holds"


def diagonal_normalizer(G: MatrixGroup, limit: int = 200_000) -> np.ndarray:
    """Diagonal matrices (first entry 1) normalising ``G``, as rows of diagonal entries."""
    F = G.field
    n = G.n
    units = np.arange(1, F.q, dtype=np.int64)
    if n == 0 or len(units) ** (n - 1) > limit:
        return np.ones((1, n), dtype=np.int64)
    grids = np.meshgrid(*([units] * (n - 1)), indexing="ij") if n > 1 else []
    T = np.ones((len(units) ** (n - 1), n), dtype=np.int64)
    for i, g in enumerate(grids):
        T[:, i + 1] = g.ravel()
    keep = np.ones(len(T), dtype=bool)
    Tinv = F.inv(T)
    for g in G.generators:
        conj = F.mul(F.mul(T[:, :, None], g.a[None]), Tinv[:, None, :])
        keep &= G.locate(conj) >= 0
    return T[keep]


def torus_weight_classes(F, T: np.ndarray, n: int, d: int) -> np.ndarray:
    """Weight of every degree-``d`` monomial under the diagonal group ``T`` (one row per monomial).

    ``act(t, x^e) = prod t_j^(-e_j) x^e``; rows are the discrete logs of that scalar.
    """
    E = exponents(n, d)
    L = F.dlog(T)  # (|T|, n)
    return (-(E @ L.T)) % (F.q - 1) if F.q > 2 else np.zeros((E.shape[0], len(T)), dtype=np.int64)


def dsp_decide(G: MatrixGroup, data: DifferentData | None = None, budget: Budget = DEFAULT_BUDGET, use_torus: bool = True) -> DspVerdict:
    """Solve ``sum_s chi(s)^-1 act(s, theta~) = theta_G`` in degree ``delta_G``."""
    if data is None:
        data = different(G, "local", budget)
    if not data.certified:
        raise VerdictRefused("the different is not certified; refusing to decide")
    F, n = G.field, G.n
    delta = data.delta
    N = budget.check_degree(n, delta)
    theta = data.theta.to_vector(delta)
    cols = np.arange(N)
    notes = []
    if use_torus:
        T = diagonal_normalizer(G)
        if len(T) > 1:
            W = torus_weight_classes(F, T, n, delta)
            t_idx = int(np.flatnonzero(theta)[0])
            same = np.all(W == W[t_idx][None, :], axis=1)
            if np.any(theta[~same]):
                raise AssertionError("theta is not a weight vector for the diagonal normaliser")
            cols = np.flatnonzero(same)
            notes.append(f"restricted to {len(cols)} of {N} monomials by a diagonal normaliser of order {len(T)}")
    weights = F.inv(data.chi.values)
    rows = summed_images(G, delta, cols, weights)  # Tr_chi(m_i) as rows, (len(cols), N)
    if len(cols) < N and np.any(rows[:, np.setdiff1d(np.arange(N), cols)]):
        raise AssertionError("twisted transfer left the weight space")
    x, _ = solve_linear(F, rows[:, cols].T, theta[cols])
    if x is None:
        verdict = DspVerdict("fails", obstruction="linear-system-infeasible", notes=notes)
    else:
        vec = np.zeros(N, dtype=np.int64)
        vec[cols] = x
        wit = Polynomial.from_vector(F, n, delta, vec)
        verdict = DspVerdict("holds", witness=wit, notes=notes)
        check = F.dot_sum(vec[cols], rows, axis=0)
        if not np.array_equal(check, theta):
            raise AssertionError("witness does not reproduce theta")
    if not G.is_modular() and not verdict.holds:
        raise AssertionError("non-modular group without the direct summand property")
    return verdict


def verify_dsp_witness(G: MatrixGroup, data: DifferentData, witness: Polynomial) -> bool:
    """Independent re-check: ``Tr_chi(witness) == theta_G``."""
    from .invariants import twisted_transfer

    return twisted_transfer(G, data.chi, witness) == data.theta


def dsp_pgroup_criterion(G: MatrixGroup) -> DspVerdict | None:
    """A p-group with the direct summand property is generated by its transvections."""
    if not G.is_p_group():
        raise ValueError("not a p-group")
    if transvection_subgroup(G).order != G.order:
        return DspVerdict("fails", obstruction="p-group-not-transvection-generated", method="p-group-criterion")
    return None


# --------------------------------------------------------------------------
# coregularity


@dataclass
class CoregularityVerdict:
    decision: str  # "coregular" | "not-coregular" | "inconclusive"
    degrees: tuple[int, ...] | None = None
    witness: list[Polynomial] | None = None
    witness_field: dict | None = None  # field of the witness when an extension was needed
    obstruction: dict | None = None
    candidates: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def coregular(self) -> bool:
        return self.decision == "coregular"


def degree_multisets(order: int, n: int) -> list[tuple[int, ...]]:
    """Non-decreasing ``n``-tuples of positive integers with product ``order``."""
    out = []

    def rec(rest, k, lo, acc):
        if k == 0:
            if rest == 1:
                out.append(tuple(acc))
            return
        for d in range(lo, rest + 1):
            if rest % d == 0:
                # remaining k-1 factors are all >= d
                if d ** k > rest and k > 1:
                    break
                rec(rest // d, k - 1, d, acc + [d])

    rec(order, n, 1, [])
    return out


def _decomposables(F, n: int, chosen: list[Polynomial], e: int) -> np.ndarray:
    lower = [f for f in chosen if f.degree < e]
    if not lower:
        return np.zeros((0, count(n, e)), dtype=np.int64)
    return subalgebra_piece(F, n, lower, e, {})


def _pick_independent(F, basis: np.ndarray, dec: np.ndarray, k: int) -> np.ndarray | None:
    """``k`` rows of ``basis`` independent modulo ``dec``, greedily in order."""
    cur = dec
    r0 = rank(F, cur) if cur.shape[0] else 0
    picked = []
    for v in basis:
        trial = np.concatenate([cur, v[None, :]]) if cur.shape[0] else v[None, :]
        r = rank(F, trial)
        if r > r0:
            picked.append(v)
            cur, r0 = trial, r
            if len(picked) == k:
                return np.array(picked)
    return None


def _is_hsop(F, n: int, fs: Sequence[Polynomial]) -> bool:
    t = sum(f.degree - 1 for f in fs) + 1
    return ideal_graded_piece(list(fs), t, field=F, n=n).dim == count(n, t)


def _random_choice(F, rng, basis: np.ndarray, dec: np.ndarray, k: int) -> np.ndarray | None:
    if basis.shape[0] == 0:
        return None
    C = F.random(rng, (k, basis.shape[0]))
    rows = F.matmul(C, basis)
    stacked = np.concatenate([dec, rows]) if dec.shape[0] else rows
    if rank(F, stacked) != (rank(F, dec) if dec.shape[0] else 0) + k:
        return None
    return rows


def _search_hsop(G: MatrixGroup, degs: tuple[int, ...], F, inv_bases: dict, rng, attempts: int, mode: str) -> list[Polynomial] | None:
    n = G.n
    distinct = sorted(set(degs))
    for attempt in range(attempts if mode == "random" else 1):
        chosen: list[Polynomial] = []
        ok = True
        for e in distinct:
            k = degs.count(e)
            dec = _decomposables(F, n, chosen, e)
            basis = inv_bases[e]
            rows = _pick_independent(F, basis, dec, k) if mode == "aligned" else _random_choice(F, rng, basis, dec, k)
            if rows is None:
                ok = False
                break
            chosen.extend(Polynomial.from_vector(F, n, e, v) for v in rows)
        if ok and _is_hsop(F, n, chosen):
            return chosen
    return None


def coregularity_decide(
    G: MatrixGroup,
    data: DifferentData | None = None,
    budget: Budget = DEFAULT_BUDGET,
    seed: int = 0,
    attempts: int = 12,
    hilbert_window: int | None = None,
) -> CoregularityVerdict:
    """Refute by necessary conditions, confirm by a certified homogeneous system of parameters."""
    F, n = G.field, G.n
    if data is None:
        data = different(G, "local", budget)
    delta = data.delta
    lin = invariant_space(G, 1, budget).dim if n else 0
    census = reflection_census(G)
    cands = []
    survivors = []
    for degs in degree_multisets(G.order, n):
        rec = {"degrees": list(degs)}
        ones = degs.count(1)
        if ones != lin:
            rec["rejected"] = "linear-invariants"
            rec["detail"] = f"{ones} degree-one generators but {lin} linear invariants"
        elif sum(degs) != delta + n if data.certified else sum(degs) < delta + n:
            rec["rejected"] = "degree-sum"
            rec["needed_delta"] = sum(degs) - n
            rec["delta"] = delta
            rec["pseudo_reflections"] = census.n_pseudo_reflections
            rec["detail"] = (
                f"needs differential degree {sum(degs) - n}, found {delta if data.certified else f'at least {delta}'}"
                f" ({census.n_pseudo_reflections} pseudo-reflections)"
            )
        else:
            survivors.append(degs)
        cands.append(rec)
    if survivors:
        window = hilbert_window if hilbert_window is not None else max(sum(d) for d in survivors)
        try:
            dims = [invariant_space(G, d, budget).dim for d in range(window + 1)]
        except BudgetExceeded as exc:
            return CoregularityVerdict("inconclusive", candidates=cands, notes=[f"Hilbert window: {exc}"])
        still = []
        for degs in survivors:
            series = series_coefficients(degs, window)
            rec = next(r for r in cands if r["degrees"] == list(degs))
            bad = next((d for d in range(window + 1) if series[d] != dims[d]), None)
            if bad is None:
                still.append(degs)
                rec["survives"] = True
            else:
                rec["rejected"] = "hilbert-mismatch"
                rec["detail"] = f"degree {bad}: series gives {series[bad]}, invariants have {dims[bad]}"
        survivors = still
    if not survivors:
        obstruction = {"kind": "no-admissible-degrees", "order": G.order, "delta": delta, "linear_invariants": lin,
                       "pseudo_reflections": census.n_pseudo_reflections, "candidates": cands}
        return CoregularityVerdict("not-coregular", obstruction=obstruction, candidates=cands)
    # witness search
    rng = np.random.default_rng(seed)
    for degs in survivors:
        try:
            inv_bases = {e: invariant_space(G, e, budget).basis for e in set(degs)}
            hs = _search_hsop(G, degs, F, inv_bases, rng, 1, "aligned")
            if hs is None:
                hs = _search_hsop(G, degs, F, inv_bases, rng, attempts, "random")
            ext = None
            if hs is None:
                for s in (2, 3):
                    if F.q ** s > 1 << 16:
                        break
                    K = make_field(F.p, F.r * s)
                    emb = Embedding(F, K)
                    GK = _extend_group(G, K, emb)
                    kb = {e: emb(b) for e, b in inv_bases.items()}
                    hs = _search_hsop(GK, degs, K, kb, rng, attempts, "random")
                    if hs is not None:
                        ext = K
                        break
        except BudgetExceeded as exc:
            return CoregularityVerdict("inconclusive", candidates=cands, notes=[str(exc)])
        if hs is not None:
            if int(np.prod(degs)) != G.order or (data.certified and sum(degs) != delta + n):
                raise AssertionError("degree identities violated by a certified witness")
            return CoregularityVerdict(
                "coregular",
                degrees=tuple(degs),
                witness=hs,
                witness_field=None if ext is None else ext.spec(),
                candidates=cands,
            )
    return CoregularityVerdict("inconclusive", candidates=cands, notes=["no certified homogeneous system of parameters found"])


def _extend_group(G: MatrixGroup, K, emb: Embedding) -> MatrixGroup:
    stack = emb(G.stack)
    H = MatrixGroup(K, G.n, tuple(Matrix(K, emb(g.a)) for g in G.generators), stack, name=f"{G.name}@{K!r}")
    return H


def verify_coregular_witness(G: MatrixGroup, verdict: CoregularityVerdict) -> bool:
    """Re-check a coregular verdict: invariance, hsop property and ``prod d_i = |G|``."""
    if not verdict.coregular:
        return False
    fs = verdict.witness
    F = fs[0].field if fs else G.field
    if F is not G.field:
        G = _extend_group(G, F, Embedding(G.field, F))
    from .invariants import _check_invariant

    try:
        for f in fs:
            _check_invariant(G, f)
    except ValueError:
        return False
    degs = sorted(f.degree for f in fs)
    return int(np.prod(degs)) == G.order and _is_hsop(F, G.n, fs)


# --------------------------------------------------------------------------
# criteria linking the two


def dsp_abelian_criterion(G: MatrixGroup, verdict: CoregularityVerdict | None = None, budget: Budget = DEFAULT_BUDGET) -> DspVerdict | None:
    """For abelian groups generated by pseudo-reflections: DSP iff coregular.

    Returns ``None`` when the criterion does not apply (not generated by
    pseudo-reflections) or the coregularity verdict is inconclusive.
    """
    if not G.is_abelian():
        raise ValueError("group is not abelian")
    if reflection_subgroup(G).order != G.order:
        return None
    if verdict is None:
        verdict = coregularity_decide(G, budget=budget)
    if verdict.decision == "coregular":
        return DspVerdict("holds", method="abelian-criterion")
    if verdict.decision == "not-coregular":
        return DspVerdict("fails", obstruction="abelian-not-coregular", method="abelian-criterion")
    return None


def serre_check(G: MatrixGroup, verdict: CoregularityVerdict) -> bool:
    """Coregular implies generated by pseudo-reflections (vacuous otherwise)."""
    if not verdict.coregular:
        return True
    return reflection_subgroup(G).order == G.order


# --------------------------------------------------------------------------
# inheritance by point stabilisers


def sample_vectors(F, n: int, seed: int, extra: int = 2) -> list[np.ndarray]:
    """Standard basis vectors plus a few seeded random nonzero vectors."""
    vecs = [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    rng = np.random.default_rng(seed)
    while len(vecs) < n + extra:
        v = F.random(rng, n)
        if np.any(v):
            vecs.append(v)
    return vecs


def sample_subspaces(F, n: int, seed: int = 0, extra: int = 2, max_size: int = 2) -> list[Subspace]:
    """Distinct spans of subsets (size <= ``max_size``) of the vector sample, plus 0."""
    vecs = sample_vectors(F, n, seed, extra)
    seen = {}
    seen[Subspace(F, n)] = None
    for k in range(1, max_size + 1):
        for sub in combinations(range(len(vecs)), k):
            U = Subspace(F, n, np.array([vecs[i] for i in sub]))
            seen.setdefault(U, None)
    return list(seen)


@dataclass
class GroupVerdicts:
    dsp: DspVerdict | None
    coregularity: CoregularityVerdict | None
    notes: list[str] = field(default_factory=list)


def decide_all(G: MatrixGroup, budget: Budget = DEFAULT_BUDGET, seed: int = 0) -> GroupVerdicts:
    notes = []
    try:
        data = different(G, "local", budget)
    except BudgetExceeded as exc:
        return GroupVerdicts(None, None, [f"different: {exc}"])
    try:
        dsp = dsp_decide(G, data, budget)
    except BudgetExceeded as exc:
        dsp = None
        notes.append(f"dsp: {exc}")
    try:
        cor = coregularity_decide(G, data, budget, seed)
    except BudgetExceeded as exc:
        cor = None
        notes.append(f"coregularity: {exc}")
    return GroupVerdicts(dsp, cor, notes)


@dataclass
class InheritanceRecord:
    group: str
    subspace: list[list[int]]
    stabilizer_order: int
    dsp_parent: str | None
    dsp_child: str | None
    coreg_parent: str | None
    coreg_child: str | None
    violation: str | None


@dataclass
class InheritanceReport:
    records: list[InheritanceRecord]
    skipped: list[str]

    @property
    def violations(self) -> list[InheritanceRecord]:
        return [r for r in self.records if r.violation]


def inheritance_suite(corpus: dict[str, MatrixGroup], budget: Budget = DEFAULT_BUDGET, seed: int = 0, extra: int = 2, max_size: int = 2) -> InheritanceReport:
    """DSP and coregularity must pass from ``G`` to every sampled point stabiliser."""
    records = []
    skipped = []
    cache: dict[bytes, GroupVerdicts] = {}

    def verdicts(H: MatrixGroup) -> GroupVerdicts:
        key = H.stack.tobytes() + bytes(str(H.field.spec()), "ascii")
        if key not in cache:
            cache[key] = decide_all(H, budget, seed)
        return cache[key]

    for name, G in corpus.items():
        parent = verdicts(G)
        if parent.dsp is None or parent.coregularity is None or parent.coregularity.decision == "inconclusive":
            skipped.append(f"{name}: verdict unavailable ({'; '.join(parent.notes) or 'inconclusive coregularity'})")
            if parent.dsp is None:
                continue
        for U in sample_subspaces(G.field, G.n, seed, extra, max_size):
            H = point_stabilizer(G, U)
            need_dsp = parent.dsp is not None and parent.dsp.holds
            need_cor = parent.coregularity is not None and parent.coregularity.coregular
            child = verdicts(H) if (need_dsp or need_cor) else GroupVerdicts(None, None)
            violation = None
            if need_dsp:
                if child.dsp is None:
                    skipped.append(f"{name} / U={U.basis.tolist()}: stabiliser DSP verdict unavailable")
                elif not child.dsp.holds:
                    violation = "dsp"
            if need_cor:
                if child.coregularity is None or child.coregularity.decision == "inconclusive":
                    skipped.append(f"{name} / U={U.basis.tolist()}: stabiliser coregularity inconclusive")
                elif not child.coregularity.coregular:
                    violation = (violation + "+" if violation else "") + "coregularity"
            records.append(
                InheritanceRecord(
                    name,
                    U.basis.tolist(),
                    H.order,
                    parent.dsp.decision if parent.dsp else None,
                    child.dsp.decision if child.dsp else None,
                    parent.coregularity.decision if parent.coregularity else None,
                    child.coregularity.decision if child.coregularity else None,
                    violation,
                )
            )
    return InheritanceReport(records, skipped)
