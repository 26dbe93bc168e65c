import dataclasses
import itertools
from math import prod

import numpy as np
import pytest

from mil.decide import (
    VerdictRefused,
    coregularity_decide,
    decide_all,
    degree_multisets,
    diagonal_normalizer,
    dsp_abelian_criterion,
    dsp_decide,
    dsp_pgroup_criterion,
    inheritance_suite,
    sample_subspaces,
    serre_check,
    verify_coregular_witness,
    verify_dsp_witness,
)
from mil.different import different
from mil.families import (
    cyclic_transvection_group,
    diagonal_reflection_group,
    go3_stabilizers,
    gu3_stabilizers,
    orthogonal_plus_stabilizer_odd,
    permutation_group_s3,
    symmetric_transvection_family,
    unitary_transvection_family,
)
from mil.field import make_field
from mil.groups import closure, split_trivial_summand
from mil.invariants import Budget, BudgetExceeded
from mil.linalg import Matrix, Subspace


def gl2(p):
    F = make_field(p)
    return closure([Matrix(F, [[int(F.gen), 0], [0, 1]]), Matrix(F, [[1, 1], [0, 1]]), Matrix(F, [[0, 1], [1, 0]])])


def sl2(p):
    F = make_field(p)
    return closure([Matrix(F, [[1, 1], [0, 1]]), Matrix(F, [[1, 0], [1, 1]])])


def test_degree_multisets_by_enumeration():
    for order in (1, 6, 8, 12, 24, 27, 36):
        for n in (1, 2, 3):
            brute = sorted(
                {tuple(sorted(t)) for t in itertools.product(range(1, order + 1), repeat=n) if prod(t) == order}
            )
            assert degree_multisets(order, n) == brute


# polynomial invariant rings: coregular with these degrees, and A^G is a direct summand
POLYNOMIAL_CASES = [
    ("GL2(2)", lambda: gl2(2), (2, 3)),
    ("GL2(3)", lambda: gl2(3), (6, 8)),
    ("SL2(3)", lambda: sl2(3), (4, 6)),
    ("S3/F7", lambda: permutation_group_s3(7), (1, 2, 3)),
    ("C3-transv", lambda: cyclic_transvection_group(3), (1, 3)),
    ("C3-diag", lambda: diagonal_reflection_group(7, 3), (1, 3)),
]


@pytest.mark.parametrize("name,make,degrees", POLYNOMIAL_CASES, ids=[c[0] for c in POLYNOMIAL_CASES])
def test_polynomial_cases(name, make, degrees):
    G = make()
    data = different(G)
    v = coregularity_decide(G, data)
    assert v.coregular and v.degrees == degrees
    assert verify_coregular_witness(G, v)
    assert serre_check(G, v)
    d = dsp_decide(G, data)
    assert d.holds
    assert verify_dsp_witness(G, data, d.witness)


def test_torus_reduction_does_not_change_the_verdict():
    for G in (gl2(3), gu3_stabilizers(2).Htilde, gu3_stabilizers(2).H):
        data = different(G)
        a = dsp_decide(G, data, use_torus=True)
        b = dsp_decide(G, data, use_torus=False)
        assert a.decision == b.decision


def test_diagonal_normalizer():
    G = gl2(3)
    T = diagonal_normalizer(G)
    # all diagonal matrices with first entry 1 normalise GL2
    assert sorted(T[:, 1].tolist()) == [1, 2]
    assert np.all(T[:, 0] == 1)


@pytest.mark.parametrize(
    "G",
    [
        orthogonal_plus_stabilizer_odd(3, 2).G,
        closure([Matrix(make_field(2), [[1, 0, 0, 0], [0, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1]])]),
    ],
)
def test_no_pseudo_reflections(G):
    # theta = 1, the transfer of a constant is |G| = 0, and Serre rules out coregularity
    data = different(G)
    assert data.delta == 0
    assert not dsp_decide(G, data).holds
    v = coregularity_decide(G, data)
    assert v.decision == "not-coregular"
    assert v.obstruction["kind"] == "no-admissible-degrees"
    assert v.obstruction["pseudo_reflections"] == 0


def test_refuses_uncertified_different():
    G = gl2(2)
    data = dataclasses.replace(different(G), certified=False)
    with pytest.raises(VerdictRefused):
        dsp_decide(G, data)


def test_pgroup_criterion():
    d = gu3_stabilizers(2)
    # the only transvections of Htilde are the q - 1 central ones (a = 0, c in GF(q)^*)
    r = dsp_pgroup_criterion(d.Htilde)
    assert r is not None
    # agrees with the direct computation
    assert r.decision == dsp_decide(d.Htilde).decision == "fails"
    assert dsp_pgroup_criterion(cyclic_transvection_group(3)) is None
    with pytest.raises(ValueError):
        dsp_pgroup_criterion(gl2(3))


@pytest.mark.parametrize(
    "make",
    [
        lambda: unitary_transvection_family(2, 2).G,
        lambda: symmetric_transvection_family(2, 2).G,
        lambda: symmetric_transvection_family(3, 2).G,
        lambda: cyclic_transvection_group(5),
        lambda: diagonal_reflection_group(7, 6),
    ],
)
def test_abelian_criterion_agrees_with_linear_system(make):
    G = make()
    assert G.is_abelian()
    via_criterion = dsp_abelian_criterion(G)
    direct = dsp_decide(G)
    assert via_criterion is not None
    assert via_criterion.decision == direct.decision


def test_abelian_criterion_applicability():
    G = orthogonal_plus_stabilizer_odd(3, 2).G
    assert dsp_abelian_criterion(G) is None  # no pseudo-reflections
    with pytest.raises(ValueError):
        dsp_abelian_criterion(gl2(3))


def test_gu3_q2_verdicts():
    d = gu3_stabilizers(2)
    H = decide_all(d.H)
    assert H.dsp.holds and H.coregularity.coregular and H.coregularity.degrees == (1, 3, 8)
    Ht = decide_all(d.Htilde)
    assert not Ht.dsp.holds


def test_go3_verdicts():
    d = go3_stabilizers(3)
    v = decide_all(d.H)
    assert v.coregularity.degrees == (1, 2, 3)
    assert v.dsp.holds


def test_coregularity_budget():
    G = gl2(3)
    v = coregularity_decide(G, budget=Budget(max_degree=10))
    assert v.decision == "inconclusive"  # the Hilbert window needs degree 14
    with pytest.raises(BudgetExceeded):
        dsp_decide(G, budget=Budget(max_degree=10))  # certified different, but theta~ lives in degree 12


def test_uncertified_different_is_refused_but_still_filters():
    G = gl2(3)
    data = different(G, "local", Budget(max_degree=3))
    assert not data.certified and data.delta == 8
    with pytest.raises(VerdictRefused):
        dsp_decide(G, data)
    # delta is only a lower bound: (6, 8) needs 12 >= 8 and survives the degree-sum filter
    v = coregularity_decide(G, data)
    rec = next(r for r in v.candidates if r["degrees"] == [6, 8])
    assert rec.get("rejected") != "degree-sum"
    rec = next(r for r in v.candidates if r["degrees"] == [2, 24])
    assert rec.get("rejected") != "degree-sum"
    # (1, 48) is rejected on linear invariants
    rec = next(r for r in v.candidates if r["degrees"] == [1, 48])
    assert rec["rejected"] == "linear-invariants"
    # with the full budget the verdict is reached
    full = coregularity_decide(G, data, budget=Budget())
    assert full.coregular and full.degrees == (6, 8)


def test_sample_subspaces():
    F = make_field(3)
    subs = sample_subspaces(F, 3, seed=1, extra=2, max_size=2)
    assert subs[0] == Subspace(F, 3)
    assert len(set(subs)) == len(subs)
    assert all(U.dim <= 2 for U in subs)
    for i in range(3):
        assert Subspace(F, 3, [np.eye(3, dtype=np.int64)[i]]) in subs
    assert sample_subspaces(F, 3, seed=1) == sample_subspaces(F, 3, seed=1)


def test_inheritance_on_small_corpus():
    corpus = {
        "GL2(3)": gl2(3),
        "S3/F7": permutation_group_s3(7),
        "C3-transv": cyclic_transvection_group(3),
        "GU3(2) H": gu3_stabilizers(2).H,
    }
    rep = inheritance_suite(corpus, seed=0, extra=1, max_size=2)
    assert rep.records
    assert rep.violations == []
    by_group = {r.group for r in rep.records}
    assert by_group == set(corpus)
    # the zero subspace gives the group itself
    for r in rep.records:
        if r.subspace == []:
            assert r.stabilizer_order == corpus[r.group].order


def test_split_trivial_summand_keeps_verdicts():
    F = make_field(3)
    G = closure([Matrix(F, [[1, 0, 0], [1, 1, 0], [0, 0, 1]])])
    s = split_trivial_summand(G)
    assert s.split
    a, b = decide_all(G), decide_all(s.group)
    assert a.dsp.decision == b.dsp.decision
    assert a.coregularity.decision == b.coregularity.decision
