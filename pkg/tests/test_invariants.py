import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mil.families import cyclic_transvection_group, permutation_group_s3
from mil.field import make_field
from mil.groups import closure
from mil.invariants import (
    Budget,
    BudgetExceeded,
    algebra_generation_check,
    coinvariant_bound,
    graded_character_values,
    hilbert_function,
    ideal_contraction_check,
    invariant_polynomials,
    invariant_space,
    invariant_space_bruteforce,
    quotient_vanishes,
    relative_transfer,
    semi_invariant_space,
    series_coefficients,
    transfer,
    twisted_transfer,
)
from mil.linalg import Matrix
from mil.poly import Character, Polynomial, act, monomials, variables


def gl2(p):
    F = make_field(p)
    g = int(F.gen)
    # a diagonal generator of det g, a transvection and the swap
    return closure([Matrix(F, [[g, 0], [0, 1]]), Matrix(F, [[1, 1], [0, 1]]), Matrix(F, [[0, 1], [1, 0]])])


def sl2(p):
    F = make_field(p)
    return closure([Matrix(F, [[1, 1], [0, 1]]), Matrix(F, [[1, 0], [1, 1]])])


def random_poly(F, n, d, rng, terms=4):
    mons = monomials(n, d)
    pick = rng.choice(len(mons), size=min(terms, len(mons)), replace=False)
    return Polynomial(F, n, {mons[i]: int(F.random(rng, (), nonzero=True)) for i in pick})


def test_series_coefficients():
    # 1/((1-t)(1-t^2)) = 1 + t + 2t^2 + 2t^3 + 3t^4
    assert series_coefficients([1, 2], 4) == [1, 1, 2, 2, 3]
    assert series_coefficients([], 3) == [1, 0, 0, 0]


@pytest.mark.parametrize(
    "make,degrees",
    [
        (lambda: permutation_group_s3(7), [1, 2, 3]),  # symmetric functions
        (lambda: gl2(2), [2, 3]),  # Dickson: q^2 - q, q^2 - 1
        (lambda: gl2(3), [6, 8]),
        (lambda: sl2(3), [4, 6]),  # q + 1 and q^2 - q
        (lambda: cyclic_transvection_group(3), [1, 3]),
        (lambda: cyclic_transvection_group(5), [1, 5]),
    ],
)
def test_hilbert_function_of_polynomial_invariant_rings(make, degrees):
    G = make()
    prod = 1
    for d in degrees:
        prod *= d
    assert prod == G.order
    D = 14
    assert hilbert_function(G, D).dims == tuple(series_coefficients(degrees, D))
    # coinvariant algebra top degree is sum(d_i - 1)
    assert coinvariant_bound(G).value == sum(d - 1 for d in degrees) + 1


@pytest.mark.parametrize("make", [lambda: permutation_group_s3(5), lambda: gl2(2), lambda: sl2(3), lambda: cyclic_transvection_group(3)])
def test_invariant_space_matches_bruteforce(make):
    G = make()
    for d in range(7):
        assert invariant_space(G, d) == invariant_space_bruteforce(G, d)


def test_invariants_are_invariant():
    G = gl2(3)
    for d in (6, 8, 12):
        for f in invariant_polynomials(G, d):
            for g in G.generators:
                assert act(g, f) == f


def test_dickson_invariants_generate():
    G = gl2(2)
    x1, x2 = variables(G.field, 2)
    c1 = x1**2 + x1 * x2 + x2**2
    c0 = x1**2 * x2 + x1 * x2**2
    r = algebra_generation_check(G, [c1, c0], 12)
    assert r.passed and r.failing_degree is None
    r = algebra_generation_check(G, [c1], 12)
    assert not r.passed and r.failing_degree == 3
    with pytest.raises(ValueError):
        algebra_generation_check(G, [x1], 3)


def test_transfer_properties():
    G = permutation_group_s3(7)
    F = G.field
    x1, x2, x3 = variables(F, 3)
    # Tr(x1) = 2 (x1 + x2 + x3) since each coordinate has stabiliser of order 2
    assert transfer(G, x1) == 2 * (x1 + x2 + x3)
    rng = np.random.default_rng(0)
    e1 = x1 + x2 + x3
    for _ in range(5):
        f = random_poly(F, 3, 3, rng)
        t = transfer(G, f)
        assert all(act(g, t) == t for g in G.generators)
        # A^G-linearity
        assert transfer(G, e1 * f) == e1 * t


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_transfer_is_a_g_linear_in_modular_case(seed, d):
    G = gl2(3)
    F = G.field
    rng = np.random.default_rng(seed)
    f = random_poly(F, 2, d, rng)
    inv = invariant_polynomials(G, 6)[0]
    assert transfer(G, inv * f) == inv * transfer(G, f)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_relative_transfer_composes(seed):
    G = gl2(3)
    H = sl2(3)
    F = G.field
    rng = np.random.default_rng(seed)
    f = random_poly(F, 2, int(rng.integers(1, 5)), rng)
    assert transfer(G, f) == transfer(H, relative_transfer(G, H, f))


def test_transfer_image_is_proper_in_modular_case():
    # every linear-form orbit sum is a multiple of 3 = 0 in GF(3)
    G = cyclic_transvection_group(3)
    F = G.field
    x1, x2 = variables(F, 2)
    assert transfer(G, x1).is_zero() and transfer(G, x2).is_zero()


def test_semi_invariants_and_characters():
    G = permutation_group_s3(7)
    F = G.field
    x1, x2, x3 = variables(F, 3)
    vdm = (x1 - x2) * (x1 - x3) * (x2 - x3)
    vals = graded_character_values(G, vdm)
    assert vals is not None
    sign = Character(G, vals)
    assert sign.is_valid()
    assert sorted(vals.tolist()) == [1, 1, 1, 6, 6, 6]
    assert graded_character_values(G, x1) is None
    S = semi_invariant_space(G, sign, 3)
    assert S.dim == 1 and S.contains(vdm.to_vector(3))
    # the twisted transfer lands in the semi-invariants
    t = twisted_transfer(G, sign, x1**2 * x2)
    assert S.contains(t.to_vector(3))
    assert semi_invariant_space(G, sign, 2).dim == 0
    with pytest.raises(ValueError):
        semi_invariant_space(G, Character(G, [2] * 6), 3)


def test_contraction():
    G = permutation_group_s3(7)
    F = G.field
    x1, x2, x3 = variables(F, 3)
    e1 = x1 + x2 + x3
    e2 = x1 * x2 + x1 * x3 + x2 * x3
    assert ideal_contraction_check(G, [e1, e2], 8).passed
    with pytest.raises(ValueError):
        ideal_contraction_check(G, [x1], 3)


def test_contraction_for_transvection_group():
    # C_3 on 2 variables has polynomial invariants, so (x1 A) ∩ A^G = x1 A^G
    G = cyclic_transvection_group(3)
    F = G.field
    x1, x2 = variables(F, 2)
    assert ideal_contraction_check(G, [x1], 6).passed


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_quotient_vanishing_is_monotone(seed):
    F = make_field(3)
    rng = np.random.default_rng(seed)
    gens = [random_poly(F, 2, int(rng.integers(1, 4)), rng, 2) for _ in range(2)]
    seen = False
    for d in range(12):
        v = quotient_vanishes(F, 2, gens, d)
        if seen:
            assert v
        seen = seen or v


def test_budget():
    G = gl2(3)
    with pytest.raises(BudgetExceeded):
        invariant_space(G, 5, Budget(max_degree=4))
    with pytest.raises(BudgetExceeded):
        invariant_space(G, 5, Budget(max_monomials=3))
    assert coinvariant_bound(G, Budget(max_degree=5)).value is None
    # the cache of three generator matrices passes 4000 bytes at degree 7, before the bound 14
    assert coinvariant_bound(G, Budget(max_bytes=4000)).value is None
    with pytest.raises(BudgetExceeded):
        Budget(max_bytes=10).check_bytes(11, "x")
