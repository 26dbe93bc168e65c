"""Built-in scenarios: each binds concrete groups to a list of checkable claims."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .decide import (
    coregularity_decide,
    dsp_abelian_criterion,
    dsp_decide,
    dsp_pgroup_criterion,
    inheritance_suite,
    sample_subspaces,
    serre_check,
)
from .different import DifferentData, different, different_factorization
from .families import (
    form_membership,
    go3_stabilizers,
    gu3_invariants,
    gu3_stabilizers,
    orthogonal_plus_stabilizer_even,
    orthogonal_plus_stabilizer_odd,
    sanity_groups,
    symmetric_family,
    symplectic_stabilizer,
    unitary_transvection_family,
)
from .groups import (
    CapExceeded,
    MatrixGroup,
    is_pseudo_reflection,
    is_transvection,
    point_stabilizer,
    reflection_census,
    split_trivial_summand,
)
from .invariants import (
    Budget,
    BudgetExceeded,
    algebra_generation_check,
    hilbert_function,
    ideal_contraction_check,
    ideal_graded_piece_vectors,
    invariant_space,
)
from .linalg import Subspace, fixed_space
from .poly import Polynomial, act, format_polynomial
from .report import (
    ClaimResult,
    Outcome,
    ScenarioReport,
    contraction_witness,
    dsp_witness,
    hsop_witness,
    invariants_witness,
    run_claim,
)


class Context:
    def __init__(self, params: dict, seed: int, budget: Budget):
        self.params = params
        self.seed = seed
        self.budget = budget
        self.claims: list[ClaimResult] = []
        self.fields: dict[tuple, dict] = {}
        self._cache: dict[tuple, object] = {}

    def claim(self, cid: str, operation: str, expected: str, fn: Callable[[], Outcome]) -> ClaimResult:
        res = run_claim(cid, operation, expected, fn)
        self.claims.append(res)
        return res

    def group(self, G: MatrixGroup) -> MatrixGroup:
        spec = G.field.spec()
        self.fields[(spec["p"], spec["r"])] = spec
        return G

    def _key(self, G: MatrixGroup, what: str) -> tuple:
        return (what, G.field.p, G.field.r, G.stack.tobytes())

    def different(self, G: MatrixGroup, method: str = "local") -> DifferentData:
        k = self._key(G, "different-" + method)
        if k not in self._cache:
            self._cache[k] = different(G, method, self.budget)
        data = self._cache[k]
        if not data.certified:
            # claims compare exact exponents, so a lower bound makes them inconclusive
            raise BudgetExceeded("; ".join(data.notes))
        return data

    def dsp(self, G: MatrixGroup):
        k = self._key(G, "dsp")
        if k not in self._cache:
            self._cache[k] = dsp_decide(G, self.different(G), self.budget)
        return self._cache[k]

    def coregularity(self, G: MatrixGroup):
        k = self._key(G, "coreg")
        if k not in self._cache:
            self._cache[k] = coregularity_decide(G, self.different(G), self.budget, self.seed)
        return self._cache[k]


@dataclass(frozen=True)
class Scenario:
    name: str
    locator: str
    anchor: str
    summary: str
    defaults: dict
    runner: Callable[[Context], None] = field(repr=False)


# --------------------------------------------------------------------------
# shared claim bodies


def _order_outcome(G: MatrixGroup, expected: int) -> Outcome:
    return Outcome(G.order == expected, {"order": G.order, "expected": expected})


def _dsp_outcome(ctx: Context, G: MatrixGroup, expect_holds: bool) -> Outcome:
    v = ctx.dsp(G)
    data = ctx.different(G)
    obs = {"decision": v.decision, "delta": data.delta, "theta": format_polynomial(data.theta)}
    if v.obstruction:
        obs["obstruction"] = v.obstruction
    wit = [dsp_witness(G, data.theta, v.witness)] if v.witness is not None else []
    if v.witness is not None:
        obs["witness"] = format_polynomial(v.witness)
    return Outcome(v.holds == expect_holds, obs, wit, list(v.notes))


def _coreg_outcome(ctx: Context, G: MatrixGroup, expected: str, degrees: tuple | None = None) -> Outcome:
    v = ctx.coregularity(G)
    obs: dict = {"decision": v.decision}
    wit = []
    if v.coregular:
        obs["degrees"] = list(v.degrees)
        obs["witness"] = [format_polynomial(f) for f in v.witness]
        wit = [hsop_witness(G, v.witness)]
    if v.obstruction:
        obs["candidates"] = v.obstruction["candidates"]
    if v.decision == "inconclusive":
        return Outcome(None, obs, notes=list(v.notes))
    ok = v.decision == expected and (degrees is None or tuple(v.degrees or ()) == tuple(degrees))
    return Outcome(ok, obs, wit, list(v.notes))


def _census_outcome(G: MatrixGroup, pr: int | None = None, tv: int | None = None) -> Outcome:
    c = reflection_census(G)
    obs = {"pseudo_reflections": c.n_pseudo_reflections, "transvections": c.n_transvections}
    ok = (pr is None or c.n_pseudo_reflections == pr) and (tv is None or c.n_transvections == tv)
    return Outcome(ok, obs)


def _pgroup_outcome(G: MatrixGroup, expect_fail: bool) -> Outcome:
    v = dsp_pgroup_criterion(G)
    obs = {"conclusion": "fails" if v else "none"}
    if v:
        obs["obstruction"] = v.obstruction
    return Outcome((v is not None) == expect_fail, obs)


def _agreement_outcome(ctx: Context, G: MatrixGroup) -> Outcome:
    """Linear criterion against the abelian and p-group criteria wherever they apply."""
    direct = ctx.dsp(G).decision
    obs = {"linear": direct}
    ok = True
    if G.is_abelian():
        ab = dsp_abelian_criterion(G, ctx.coregularity(G))
        obs["abelian"] = ab.decision if ab else "not-applicable"
        if ab is not None and ab.decision != direct:
            ok = False
    if G.is_p_group():
        pg = dsp_pgroup_criterion(G)
        obs["p-group"] = pg.decision if pg else "no-conclusion"
        if pg is not None and pg.decision != direct:
            ok = False
    return Outcome(ok, obs)


# --------------------------------------------------------------------------
# example GU3


def run_example_gu3(ctx: Context) -> None:
    q = ctx.params["q"]
    D = ctx.params["max_degree"]
    Dideal = ctx.params["ideal_degree"]
    data = gu3_stabilizers(q)
    H, Ht, tau = ctx.group(data.H), data.Htilde, data.tau
    inv = gu3_invariants(data)
    deg_h = inv.h.degree

    ctx.claim("order-H", "closure", f"|H| = (q+1)q^3 = {(q + 1) * q**3}", lambda: _order_outcome(H, (q + 1) * q**3))
    ctx.claim("order-Htilde", "closure", f"|Htilde| = q^3 = {q**3}", lambda: _order_outcome(Ht, q**3))

    def tau_claim():
        order = next(k for k in range(1, q + 3) if (tau**k).is_identity())
        obs = {"pseudo_reflection": is_pseudo_reflection(tau), "transvection": is_transvection(tau), "order": order}
        return Outcome(obs["pseudo_reflection"] and not obs["transvection"] and order == q + 1, obs)

    ctx.claim("tau", "is_pseudo_reflection", f"tau is a non-unipotent pseudo-reflection of order {q + 1}", tau_claim)

    def form_claim():
        e3 = np.array([0, 0, 1])
        bad = [i for i, g in enumerate(H.elements) if not form_membership(g, data.form) or not np.array_equal(g.a[:, 2], e3)]
        return Outcome(not bad, {"violations": len(bad)})

    ctx.claim("form", "form_membership", "every element of H preserves the hermitian form and fixes e3", form_claim)

    def degrees_claim():
        fs = [inv.x1, inv.F, inv.N3]
        ok = all(f == act(g, f) for f in fs for g in H.generators)
        degs = [f.degree for f in fs]
        return Outcome(ok and degs == [1, q + 1, q**3], {"degrees": degs}, [invariants_witness(H, fs)])

    ctx.claim("invariant-degrees", "invariant_space", f"x1, F, N(x3) are H-invariant of degrees 1, {q + 1}, {q**3}", degrees_claim)

    def h_claim():
        eta = data.eta
        semi = act(tau, inv.h) == inv.h.scale(eta)
        return Outcome(semi and all(act(g, inv.h) == inv.h for g in Ht.generators), {"degree": deg_h, "h": format_polynomial(inv.h)}, [invariants_witness(Ht, [inv.h])])

    ctx.claim("h-semi-invariant", "semi_invariant_space", "h is Htilde-invariant and tau.h = eta h", h_claim)

    def dims_claim():
        dH = hilbert_function(H, D, ctx.budget).dims
        dT = hilbert_function(Ht, D, ctx.budget).dims
        pred = [sum(dH[d - i * deg_h] for i in range(q + 1) if d - i * deg_h >= 0) for d in range(D + 1)]
        return Outcome(list(dT) == pred, {"dims_H": list(dH), "dims_Htilde": list(dT), "predicted": pred})

    ctx.claim("hilbert-decomposition", "hilbert_function", f"dim A^Htilde_d = sum_i dim A^H_(d - {deg_h} i) for d <= {D}", dims_claim)

    def gen_claim():
        r = algebra_generation_check(Ht, [inv.x1, inv.F, inv.N3, inv.h], D, ctx.budget)
        return Outcome(r.passed, {"failing_degree": r.failing_degree})

    ctx.claim("generation", "algebra_generation_check", f"k[x1,F,N(x3),h] = A^Htilde up to degree {D}", gen_claim)

    def drop_claim():
        r = algebra_generation_check(Ht, [inv.x1, inv.F, inv.N3], D, ctx.budget)
        return Outcome(not r.passed and r.failing_degree == deg_h, {"failing_degree": r.failing_degree, "dims": list(r.dims[r.failing_degree]) if r.failing_degree is not None else None})

    ctx.claim("generation-without-h", "algebra_generation_check", f"dropping h fails first at degree {deg_h}", drop_claim)

    def ideal_claim():
        K, n = data.field, 3
        x1, x2, x3 = (Polynomial.var(K, 3, i) for i in range(3))
        sets = {
            "with_h": [inv.x1, inv.F, inv.N3, inv.h],
            "monomial": [x1, x2 ** (q + 1), x3 ** (q**3)],
            "without_h": [inv.x1, inv.F, inv.N3],
        }
        bad = []
        for d in range(Dideal + 1):
            pieces = {k: Subspace(K, graded_count(n, d), ideal_graded_piece_vectors(K, n, v, d)) for k, v in sets.items()}
            if not (pieces["with_h"] == pieces["monomial"] == pieces["without_h"]):
                bad.append(d)
        return Outcome(not bad, {"checked_up_to": Dideal, "mismatched_degrees": bad})

    ctx.claim("ideal-identity", "ideal_graded_piece", f"(x1,F,N(x3),h)A = (x1,x2^{q + 1},x3^{q**3})A = (x1,F,N(x3))A up to degree {Dideal}", ideal_claim)

    def contraction_claim():
        gens = [inv.x1, inv.F, inv.N3]
        r = ideal_contraction_check(Ht, gens, D, ctx.budget)
        obs = {"passed": r.passed, "degree": r.degree}
        wit = []
        if r.witness is not None:
            obs["witness"] = format_polynomial(r.witness)
            wit = [contraction_witness(Ht, gens, r.witness)]
        return Outcome(not r.passed and r.degree == deg_h, obs, wit)

    ctx.claim("contraction", "ideal_contraction_check", f"(x1,F,N(x3)) is not contracted in A^Htilde: failure at degree {deg_h}", contraction_claim)
    ctx.claim("dsp-Htilde", "dsp_decide", "DSP fails for Htilde", lambda: _dsp_outcome(ctx, Ht, False))
    ctx.claim("dsp-H", "dsp_decide", "DSP holds for H", lambda: _dsp_outcome(ctx, H, True))
    ctx.claim("coregular-H", "coregularity_decide", f"H coregular with degrees (1, {q + 1}, {q**3})", lambda: _coreg_outcome(ctx, H, "coregular", (1, q + 1, q**3)))
    for m, Hm in sorted(data.H_m.items()):
        if m in (1, q + 1):
            continue  # Htilde and H are covered above
        ctx.claim(f"dsp-H{m}", "dsp_decide", f"DSP fails for H_{m} (order {m * q**3})", lambda Hm=Hm: _dsp_outcome(ctx, Hm, False))


def graded_count(n: int, d: int) -> int:
    from .poly import count

    return count(n, d)


# --------------------------------------------------------------------------
# abelian block examples


def _delta_outcome(ctx: Context, G: MatrixGroup, expected: int) -> Outcome:
    data = ctx.different(G)
    return Outcome(data.delta == expected, {"delta": data.delta, "expected": expected, "exponents": data.exponents})


def run_example_abelian_i(ctx: Context) -> None:
    q, n = ctx.params["q"], ctx.params["n"]
    fam = unitary_transvection_family(q, n)
    G = ctx.group(fam.G)
    delta = (q ** (2 * n) - 1) // (q**2 - 1) * (q - 1)
    ctx.claim("order", "closure", f"|G_n| = q^(n^2) = {q ** (n * n)}", lambda: _order_outcome(G, q ** (n * n)))
    ctx.claim("abelian", "closure", "G_n is abelian", lambda: Outcome(G.is_abelian(), {"abelian": G.is_abelian()}))

    def shape_claim():
        bad = 0
        F = G.field
        I = np.eye(2 * n, dtype=np.int64)
        for g in G.elements:
            if g.is_identity():
                continue
            if fixed_space(g).dim < n:
                bad += 1
            B = g.a[n:, :n]
            if not np.array_equal(F.conj(B), F.neg(B.T)) or not np.array_equal(g.a[n:, n:], I[:n, :n]):
                bad += 1
        return Outcome(bad == 0, {"violations": bad})

    ctx.claim("anti-hermitian", "unitary_transvection_family", "every element has anti-hermitian B and fixed space of dimension >= n", shape_claim)
    if n == 2:
        U = Subspace(G.field, 2 * n, np.eye(2 * n, dtype=np.int64)[1:])
        ctx.claim("stabilizer-e234", "point_stabilizer", f"the stabiliser of <e2,e3,e4> has order q = {q}", lambda: _order_outcome(point_stabilizer(G, U), q))
    ctx.claim("delta", "different", f"delta = (q^(2n)-1)/(q^2-1)(q-1) = {delta}", lambda: _delta_outcome(ctx, G, delta))
    ctx.claim("coregularity", "coregularity_decide", "not coregular (degree arithmetic)", lambda: _coreg_outcome(ctx, G, "not-coregular"))
    ctx.claim("dsp", "dsp_decide", "DSP fails", lambda: _dsp_outcome(ctx, G, False))

    def abelian_claim():
        v = dsp_abelian_criterion(G, ctx.coregularity(G))
        obs = {"criterion": v.decision if v else None, "linear": ctx.dsp(G).decision}
        return Outcome(v is not None and v.decision == "fails" and obs["linear"] == "fails", obs)

    ctx.claim("abelian-criterion", "dsp_abelian_criterion", "abelian criterion gives fails, agreeing with the linear system", abelian_claim)
    if n == 3:
        def reduction_claim():
            K = point_stabilizer(G, Subspace(G.field, 6, np.eye(6, dtype=np.int64)[[2, 3, 4, 5]]))
            split = split_trivial_summand(K)
            G2 = unitary_transvection_family(q, 2).G
            obs = {"stabilizer_order": K.order, "reduced_dim": split.group.n, "split": split.split}
            from .groups import same_elements

            return Outcome(split.split and split.group.n == 4 and same_elements(split.group, G2), obs)

        ctx.claim("reduction", "split_trivial_summand", "the stabiliser of <e3,...,e6> reduces to G_2 on k^4", reduction_claim)


def run_example_abelian_ii(ctx: Context) -> None:
    q, n = ctx.params["q"], ctx.params["n"]
    fam = symplectic_stabilizer(q, n)
    G = ctx.group(fam.G)
    order = q ** (n * (n + 1) // 2)
    ctx.claim("order", "closure", f"|G_n| = q^(n(n+1)/2) = {order}", lambda: _order_outcome(G, order))
    if n == 2:
        ctx.claim("delta", "different", f"delta = q^2 - 1 = {q * q - 1}", lambda: _delta_outcome(ctx, G, q * q - 1))
    ctx.claim("coregularity", "coregularity_decide", "not coregular", lambda: _coreg_outcome(ctx, G, "not-coregular"))
    ctx.claim("dsp", "dsp_decide", "DSP fails", lambda: _dsp_outcome(ctx, G, False))
    ctx.claim("criteria-agree", "dsp_abelian_criterion", "abelian criterion agrees with the linear system", lambda: _agreement_outcome(ctx, G))


# --------------------------------------------------------------------------
# families


def _membership_outcome(G: MatrixGroup, form) -> Outcome:
    bad = sum(not form_membership(g, form) for g in G.elements)
    return Outcome(bad == 0, {"violations": bad, "kind": form.kind})


def run_family_i(ctx: Context) -> None:
    q, m = ctx.params["q"], ctx.params["m"]
    fam = unitary_transvection_family(q, m)
    G = ctx.group(fam.G)
    ctx.claim("order", "unitary_transvection_family", f"|H| = q^(m^2) = {q ** (m * m)}", lambda: _order_outcome(G, q ** (m * m)))
    ctx.claim("form", "form_membership", "H preserves the hermitian form", lambda: _membership_outcome(G, fam.form))
    ctx.claim("census", "reflection_census", "every pseudo-reflection is a transvection", lambda: _census_outcome(G, reflection_census(G).n_transvections))
    ctx.claim("dsp", "dsp_decide", "DSP fails", lambda: _dsp_outcome(ctx, G, False))
    ctx.claim("criteria-agree", "dsp_decide", "linear system agrees with the abelian and p-group criteria", lambda: _agreement_outcome(ctx, G))


def run_family_ii(ctx: Context) -> None:
    q, m = ctx.params["q"], ctx.params["m"]
    fam = symplectic_stabilizer(q, m)
    G = ctx.group(fam.G)
    order = q ** (m * (m + 1) // 2)
    ctx.claim("order", "symplectic_stabilizer", f"|H| = q^(m(m+1)/2) = {order}", lambda: _order_outcome(G, order))
    ctx.claim("form", "form_membership", "H preserves the alternating form", lambda: _membership_outcome(G, fam.form))
    ctx.claim("dsp", "dsp_decide", "DSP fails", lambda: _dsp_outcome(ctx, G, False))
    ctx.claim("criteria-agree", "dsp_decide", "linear system agrees with the abelian and p-group criteria", lambda: _agreement_outcome(ctx, G))


def run_family_iii_a(ctx: Context) -> None:
    q, m = ctx.params["q"], ctx.params["m"]
    fam = orthogonal_plus_stabilizer_odd(q, m)
    G = ctx.group(fam.G)
    order = q ** (m * (m - 1) // 2)
    ctx.claim("order", "orthogonal_plus_stabilizer_odd", f"|H| = q^(m(m-1)/2) = {order}", lambda: _order_outcome(G, order))
    ctx.claim("form", "form_membership", "H preserves the symmetric form", lambda: _membership_outcome(G, fam.form))
    ctx.claim("census", "reflection_census", "H contains no pseudo-reflections", lambda: _census_outcome(G, 0, 0))
    ctx.claim("p-group-criterion", "dsp_pgroup_criterion", "p-group criterion gives fails", lambda: _pgroup_outcome(G, True))
    ctx.claim("dsp", "dsp_decide", "DSP fails", lambda: _dsp_outcome(ctx, G, False))
    go = go3_stabilizers(q)
    ctx.claim("go3-order", "go3_stabilizers", f"|H| = 2q = {2 * q}, |H^-| = q = {q}", lambda: Outcome(go.H.order == 2 * q and go.H_minus.order == q, {"H": go.H.order, "H_minus": go.H_minus.order}))
    ctx.claim("go3-form", "form_membership", "H preserves 2 x1 x3 + x2^2", lambda: _membership_outcome(go.H, go.form))
    ctx.claim("go3-census", "reflection_census", "H^- contains no pseudo-reflections", lambda: _census_outcome(go.H_minus, 0, 0))
    ctx.claim("go3-p-group-criterion", "dsp_pgroup_criterion", "p-group criterion gives fails for H^-", lambda: _pgroup_outcome(go.H_minus, True))
    ctx.claim("go3-dsp", "dsp_decide", "DSP fails for H^-", lambda: _dsp_outcome(ctx, go.H_minus, False))


def run_family_iii_b(ctx: Context) -> None:
    q, m = ctx.params["q"], ctx.params["m"]
    fam = orthogonal_plus_stabilizer_even(q, m)
    G = ctx.group(fam.G)
    order = q ** (m * (m - 1) // 2)
    ctx.claim("order", "orthogonal_plus_stabilizer_even", f"|H| = q^(m(m-1)/2) = {order}", lambda: _order_outcome(G, order))
    ctx.claim("form", "form_membership", "H preserves Q = sum x_i x_(m+i)", lambda: _membership_outcome(G, fam.form))
    ctx.claim("census", "reflection_census", "H contains no pseudo-reflections", lambda: _census_outcome(G, 0, 0))
    ctx.claim("p-group-criterion", "dsp_pgroup_criterion", "p-group criterion gives fails", lambda: _pgroup_outcome(G, True))
    ctx.claim("dsp", "dsp_decide", "DSP fails", lambda: _dsp_outcome(ctx, G, False))


def _family_iv_odd(ctx: Context, p: int, m: int) -> None:
    fam = symmetric_family(p, m)
    ctx.group(fam.G)
    mp = m // p
    S = point_stabilizer(fam.G, fam.U)

    def stab_claim():
        from .groups import closure, same_elements

        cyc = closure([fam.sigma])
        obs = {"order": S.order, "generated_by_sigma": same_elements(S, cyc)}
        return Outcome(S.order == p and obs["generated_by_sigma"], obs)

    ctx.claim(f"p{p}-stabilizer", "point_stabilizer", f"Stab(U) = <sigma> of order {p}", stab_claim)

    def fixed_claim():
        V = fixed_space(fam.sigma)
        codim = fam.G.n - V.dim
        return Outcome(V == fam.U and codim == (p - 1) * mp - 2, {"fixed_dim": V.dim, "codim": codim, "equals_U": V == fam.U})

    ctx.claim(f"p{p}-fixed-space", "fixed_space", f"V^sigma = U of codimension (p-1)m'-2 = {(p - 1) * mp - 2}", fixed_claim)
    ctx.claim(f"p{p}-p-group-criterion", "dsp_pgroup_criterion", "p-group criterion gives fails for Stab(U)", lambda: _pgroup_outcome(S, True))
    ctx.claim(f"p{p}-dsp", "dsp_decide", "DSP fails for Stab(U)", lambda: _dsp_outcome(ctx, S, False))
    ctx.claim(f"p{p}-stabilizer-U1", "point_stabilizer", "Stab(U1) is the block subgroup H", lambda: Outcome(np.array_equal(point_stabilizer(fam.G, fam.U1).stack, fam.H.stack), {"order": fam.H.order}))


def _family_iv_even(ctx: Context, m: int) -> None:
    fam = symmetric_family(2, m)
    ctx.group(fam.G)
    H = fam.H
    mp = m // 2
    F = H.field

    def h_claim():
        orders = set(H.element_orders().tolist())
        elem = H.is_abelian() and orders <= {1, 2}
        return Outcome(elem and H.order == 2**mp, {"order": H.order, "elementary_abelian": elem})

    ctx.claim("p2-H", "symmetric_family", f"H elementary abelian of order 2^m' = {2**mp}", h_claim)
    ctx.claim("p2-census", "reflection_census", f"H has exactly m' = {mp} transvections", lambda: _census_outcome(H, mp, mp))

    def fixed_claim():
        VH = Subspace(F, H.n, np.eye(H.n, dtype=np.int64))
        for g in H.generators:
            VH = VH.intersect(fixed_space(g))
        odd = Subspace(F, H.n, np.array([fam.f_basis[i] for i in range(0, m - 3, 2)]))
        return Outcome(VH == odd, {"dim": VH.dim, "basis": VH.basis.tolist()})

    ctx.claim("p2-fixed-space", "fixed_space", "V^H = span{f1, f3, ..., f_(m-3)}", fixed_claim)

    def coreg_claim():
        v = ctx.coregularity(H)
        census = reflection_census(H).n_pseudo_reflections
        shape = [r for r in v.candidates if r.get("rejected") == "degree-sum"]
        needed = {tuple(r["degrees"]): r["needed_delta"] for r in shape}
        obs = {"decision": v.decision, "needed": {" ".join(map(str, k)): val for k, val in needed.items()}, "found": census}
        key = (1,) * (m - 2 - 2) + (2, 4) if m == 6 else None
        ok = v.decision == "not-coregular" and (key is None or needed.get(key) == 4) and census == mp
        return Outcome(ok, obs)

    ctx.claim("p2-coregularity", "coregularity_decide", "not coregular: shape (1,1,2,4) needs 4 reflections, the census finds 3", coreg_claim)

    def both_claim():
        ab = dsp_abelian_criterion(H, ctx.coregularity(H))
        lin = ctx.dsp(H)
        obs = {"abelian": ab.decision if ab else None, "linear": lin.decision}
        return Outcome(ab is not None and ab.decision == "fails" and lin.decision == "fails", obs)

    ctx.claim("p2-dsp", "dsp_decide", "DSP fails by the abelian criterion and by the linear system", both_claim)
    ctx.claim("p2-stabilizer-U1", "point_stabilizer", "Stab(U1) is the block subgroup H", lambda: Outcome(np.array_equal(point_stabilizer(fam.G, fam.U1).stack, H.stack), {"order": H.order}))


def run_family_iv(ctx: Context) -> None:
    m = ctx.params["m"]
    ps = [ctx.params["p"]] if ctx.params.get("p") else [3, 2]
    for p in ps:
        if p == 2:
            _family_iv_even(ctx, m)
        else:
            _family_iv_odd(ctx, p, m)


# --------------------------------------------------------------------------
# corpus-wide checks


def corpus(q2: int = 2, q3: int = 3) -> dict[str, MatrixGroup]:
    """Every small group used by the scenarios, keyed by a short label."""
    out = dict(sanity_groups())
    g = gu3_stabilizers(2)
    out["GU3/H q=2"] = g.H
    out["GU3/Htilde q=2"] = g.Htilde
    out["G2 unitary q=2"] = unitary_transvection_family(2, 2).G
    out["G2 symplectic q=2"] = symplectic_stabilizer(2, 2).G
    out["G2 symplectic q=3"] = symplectic_stabilizer(3, 2).G
    out["orth-odd q=3 m=2"] = orthogonal_plus_stabilizer_odd(3, 2).G
    out["orth-even q=2 m=2"] = orthogonal_plus_stabilizer_even(2, 2).G
    go = go3_stabilizers(3)
    out["GO3/H q=3"] = go.H
    out["GO3/H- q=3"] = go.H_minus
    s3 = symmetric_family(3, 6)
    out["S6 p=3 Stab(U)"] = point_stabilizer(s3.G, s3.U)
    out["S6 p=2 H"] = symmetric_family(2, 6).H
    return out


def run_thm1_inheritance(ctx: Context) -> None:
    groups = corpus()
    for G in groups.values():
        ctx.group(G)

    def suite():
        rep = inheritance_suite(groups, ctx.budget, ctx.seed, extra=ctx.params["sample"], max_size=ctx.params["span"])
        obs = {
            "pairs": len(rep.records),
            "violations": [r.__dict__ for r in rep.violations],
            "groups": len(groups),
        }
        notes = list(rep.skipped)
        if rep.violations:
            return Outcome(False, obs, notes=notes)
        return Outcome(None if rep.skipped else True, obs, notes=notes)

    ctx.claim("inheritance", "inheritance_suite", "DSP and coregularity pass to every sampled point stabiliser", suite)

    def factorization():
        g = gu3_stabilizers(2)
        H = g.H
        data = ctx.different(H)
        rows = []
        ok = True
        for U in sample_subspaces(H.field, 3, ctx.seed, ctx.params["sample"], ctx.params["span"]):
            S = point_stabilizer(H, U)
            fac = different_factorization(H, S, U, data, budget=ctx.budget)
            good = fac.coprime and fac.quotient_outside_prime and fac.intrinsic_match
            ok &= good
            rows.append({"U": U.basis.tolist(), "stabilizer": S.order, "theta_H": format_polynomial(fac.theta_H), "coprime": fac.coprime, "intrinsic": fac.intrinsic_match})
        return Outcome(ok, {"subspaces": rows})

    ctx.claim("factorization-GU3", "different_factorization", "theta_G = theta_(G/H) theta_H with coprime factors for GU3 H stabilisers", factorization)


def run_cst_serre_sanity(ctx: Context) -> None:
    groups = sanity_groups()
    S3 = ctx.group(groups["S3/F7"])
    ctx.claim("S3-coregular", "coregularity_decide", "S3 on F7^3 is coregular with degrees (1,2,3)", lambda: _coreg_outcome(ctx, S3, "coregular", (1, 2, 3)))

    def delta_claim():
        d = ctx.different(S3)
        c = reflection_census(S3).n_pseudo_reflections
        return Outcome(d.delta == 3 == c, {"delta": d.delta, "reflections": c})

    ctx.claim("S3-delta", "different", "delta = 3 = number of reflections", delta_claim)
    ctx.claim("S3-dsp", "dsp_decide", "DSP holds with an explicit witness", lambda: _dsp_outcome(ctx, S3, True))
    ctx.claim("transfer-nonmodular", "transfer", "non-modular: Tr(|G|^-1 f) = f for invariant f", lambda: _nonmodular_transfer(S3))
    for name, G in groups.items():
        if name == "S3/F7":
            continue
        ctx.group(G)
        ctx.claim(f"{name}-coregular", "coregularity_decide", f"{name} is coregular", lambda G=G: _coreg_outcome(ctx, G, "coregular"))
        ctx.claim(f"{name}-dsp", "dsp_decide", f"{name} has DSP", lambda G=G: _dsp_outcome(ctx, G, True))

    def serre_all():
        rows = {}
        ok = True
        for label, G in corpus().items():
            v = ctx.coregularity(G)
            if not v.coregular:
                rows[label] = v.decision
                continue
            data = ctx.different(G)
            degs = v.degrees
            ids = int(np.prod(degs)) == G.order and sum(degs) == data.delta + G.n
            sc = serre_check(G, v)
            ok &= ids and sc and ctx.dsp(G).holds
            rows[label] = {"degrees": list(degs), "serre": sc, "identities": ids}
        return Outcome(ok, {"corpus": rows})

    ctx.claim("serre", "serre_check", "every coregular corpus member is a pseudo-reflection group satisfying both degree identities, and has DSP", serre_all)

    def oracle():
        rows = []
        ok = True
        for label, G in corpus().items():
            d_local = ctx.different(G)
            if G.order > ctx.params["oracle_order"]:
                d_global = None
            else:
                d_global = ctx.different(G, "global")
            for j, h in enumerate(d_local.arrangement.hyperplanes):
                expect = None
                if h.n_transvections == 0:
                    expect = h.e_alpha - 1
                elif h.order == h.q_alpha and len(d_local.arrangement.hyperplanes) == 1:
                    expect = h.q_alpha - 1
                got = d_local.exponents[j]
                glob = d_global.exponents[j] if d_global is not None else None
                agree = glob is None or glob == got
                good = agree and (expect is None or got == expect)
                ok &= good
                if expect is not None or not agree:
                    rows.append({"group": label, "hyperplane": j, "exponent": got, "brute_force": glob, "expected": expect})
        return Outcome(ok, {"checked": rows})

    ctx.claim("different-oracle", "different", "exponents equal e-1 on tame hyperplanes and q-1 on single-hyperplane transvection groups; global and local searches agree", oracle)


def _nonmodular_transfer(G: MatrixGroup) -> Outcome:
    from .invariants import transfer

    F = G.field
    fs = [Polynomial.from_vector(F, G.n, d, v) for d in (1, 2, 3) for v in invariant_space(G, d).basis]
    c = F.inv(G.order % F.p)
    ok = all(transfer(G, f.scale(c)) == f for f in fs)
    return Outcome(ok, {"checked": len(fs)})


# --------------------------------------------------------------------------
# catalog


SCENARIOS: dict[str, Scenario] = {
    s.name: s
    for s in [
        Scenario("example-gu3", "Example GU3", "point stabilizer of $<e_3>$ inside", "unitary point stabilisers H, Htilde, H_m in dimension 3",
                 {"q": 2, "max_degree": 12, "ideal_degree": 16}, run_example_gu3),
        Scenario("example-abelian-i", "Example abelian (i)", "anti-hermitian $n\\times n$ matrix with coefficients", "block unipotent group with anti-hermitian B",
                 {"q": 2, "n": 2}, run_example_abelian_i),
        Scenario("example-abelian-ii", "Example abelian (ii)", "is not coregular and does not have the direct summand property", "block unipotent group with symmetric B",
                 {"q": 2, "n": 2}, run_example_abelian_ii),
        Scenario("family-I", "Families (I) unitary", "$g^TJ\\overline{g}=J$", "stabiliser of a maximal isotropic subspace in GU_2m",
                 {"q": 2, "m": 2}, run_family_i),
        Scenario("family-II", "Families (II) symplectic", "$g^TJg=J$", "stabiliser of a maximal isotropic subspace in Sp_2m",
                 {"q": 2, "m": 2}, run_family_ii),
        Scenario("family-III-a", "Families (III-a) orthogonal, odd q", "does not contain pseudo-reflections", "orthogonal stabilisers in odd characteristic and GO_3",
                 {"q": 3, "m": 2}, run_family_iii_a),
        Scenario("family-III-b", "Families (III-b) orthogonal, even q", "$p$-group without pseudo-reflections", "orthogonal stabiliser in even characteristic",
                 {"q": 2, "m": 2}, run_family_iii_b),
        Scenario("family-IV", "Families (IV) symmetric groups", "the fixed point space of $\\sigma$ is $U$", "S_m on the quotient of the sum-zero module",
                 {"p": None, "m": 6}, run_family_iv),
        Scenario("thm1-inheritance", "Main theorem (point stabilisers)", "also has the direct summand property", "inheritance of DSP and coregularity over the corpus",
                 {"sample": 2, "span": 2}, run_thm1_inheritance),
        Scenario("cst-serre-sanity", "Introduction (non-modular sanity)", "if the group is non-modular", "sanity corpus, Serre check and different oracle",
                 {"oracle_order": 200}, run_cst_serre_sanity),
    ]
}

PARAM_KEYS = ("q", "n", "m", "p")


def run_scenario(name: str, params: dict | None = None, seed: int = 0, budget: Budget | None = None, recheck: bool = False) -> ScenarioReport:
    from .report import recheck_report

    if name not in SCENARIOS:
        raise KeyError(name)
    sc = SCENARIOS[name]
    merged = dict(sc.defaults)
    for k, v in (params or {}).items():
        if v is not None and k in merged:
            merged[k] = v
    ctx = Context(merged, seed, budget or Budget())
    errors = []
    t = time.perf_counter()
    try:
        sc.runner(ctx)
    except (CapExceeded, BudgetExceeded) as exc:
        errors.append(f"{type(exc).__name__}: {exc}")
    rep = ScenarioReport(sc.name, sc.locator, sc.anchor, merged, seed, ctx.claims, [ctx.fields[k] for k in sorted(ctx.fields)], __version__, errors)
    if recheck:
        recheck_report(rep)
    rep.seconds = time.perf_counter() - t
    return rep
