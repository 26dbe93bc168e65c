import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mil.field import make_field
from mil.groups import closure
from mil.linalg import Matrix, inverse
from mil.poly import (
    Character,
    ParseError,
    Polynomial,
    act,
    count,
    dense_mul,
    divide_by_linear,
    format_polynomial,
    ideal_graded_piece,
    monomials,
    mul_linear,
    orbit,
    orbit_product,
    parse_polynomial,
    substitution_matrix,
    variables,
)


def evaluate(f, point):
    """Naive evaluation of ``f`` at a point of ``F^n``."""
    F = f.field
    total = 0
    for e, c in f.terms.items():
        t = c
        for x, k in zip(point, e):
            t = int(F.mul(t, F.pow(int(x), k))) if k else t
        total = int(F.add(total, t))
    return total


def random_poly(F, n, d, rng, terms=4):
    mons = monomials(n, d)
    pick = rng.choice(len(mons), size=min(terms, len(mons)), replace=False)
    return Polynomial(F, n, {mons[i]: int(F.random(rng, (), nonzero=True)) for i in pick})


def test_monomial_counts_and_order():
    for n in range(1, 5):
        for d in range(6):
            ms = monomials(n, d)
            assert len(ms) == count(n, d) == comb(d + n - 1, n - 1)
            assert list(ms) == sorted(ms)
            assert all(sum(m) == d for m in ms)
    assert count(3, -1) == 0
    assert monomials(2, 1) == ((0, 1), (1, 0))


@pytest.mark.parametrize("p,r", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_ring_operations_agree_with_evaluation(p, r):
    F = make_field(p, r)
    rng = np.random.default_rng(1)
    points = [F.random(rng, 3) for _ in range(12)]
    for _ in range(5):
        f = random_poly(F, 3, 2, rng)
        g = random_poly(F, 3, 3, rng)
        for v in points:
            fv, gv = evaluate(f, v), evaluate(g, v)
            assert evaluate(f * g, v) == F.mul(fv, gv)
            assert evaluate(f + g, v) == F.add(fv, gv)
            assert evaluate(f - g, v) == F.sub(fv, gv)
            assert evaluate(f**3, v) == F.pow(fv, 3)


@pytest.mark.parametrize("p,r", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_dense_products_match_sparse(p, r):
    F = make_field(p, r)
    rng = np.random.default_rng(2)
    n = 3
    for a, b in [(1, 1), (2, 1), (2, 3)]:
        f = random_poly(F, n, a, rng, 6)
        g = random_poly(F, n, b, rng, 6)
        assert np.array_equal(dense_mul(F, n, a, f.to_vector(a), b, g.to_vector(b)), (f * g).to_vector(a + b))
        if b == 1:
            L = g.to_vector(1)[::-1]
            assert np.array_equal(mul_linear(F, n, a, f.to_vector(a), L), (f * g).to_vector(a + 1))


@pytest.mark.parametrize("p,r", [(2, 1), (3, 1), (2, 2), (3, 2), (5, 1)])
def test_action_is_composition_with_inverse(p, r):
    F = make_field(p, r)
    rng = np.random.default_rng(3)
    for _ in range(4):
        A = F.random(rng, (3, 3))
        try:
            Ai = inverse(F, A)
        except ZeroDivisionError:
            continue
        g = Matrix(F, A)
        f = random_poly(F, 3, 3, rng) + random_poly(F, 3, 1, rng)
        gf = act(g, f)
        for _ in range(10):
            v = F.random(rng, 3)
            w = F.matmul(Ai, v[:, None])[:, 0]
            assert evaluate(gf, v) == evaluate(f, w)


def test_action_is_a_left_action():
    F = make_field(3, 2)
    rng = np.random.default_rng(4)
    mats = []
    while len(mats) < 2:
        A = F.random(rng, (3, 3))
        try:
            inverse(F, A)
        except ZeroDivisionError:
            continue
        mats.append(Matrix(F, A))
    g, h = mats
    f = random_poly(F, 3, 4, rng, 8)
    assert act(g @ h, f) == act(g, act(h, f))


def test_substitution_matrix_columns():
    F = make_field(2, 2)
    S = np.array([[1, 2], [3, 0]])
    M = substitution_matrix(F, S, 2)
    x1, x2 = variables(F, 2)
    for i, e in enumerate(monomials(2, 2)):
        m = Polynomial(F, 2, {e: 1})
        assert np.array_equal(M[:, i], m.substitute(S).to_vector(2))


def test_format_and_parse():
    F = make_field(2, 2)
    x1, x2, x3 = variables(F, 3)
    f = x1**2 * x3 + x2**4
    assert format_polynomial(f) == "g^0*x2^4 + g^0*x1^2*x3"
    assert parse_polynomial(F, 3, str(f)) == f
    P = make_field(7)
    y1, y2 = variables(P, 2)
    assert str(3 * y1 * y2 + y2**2) == "1*x2^2 + 3*x1*x2"
    assert parse_polynomial(P, 2, "x1 - x2") == y1 - y2
    assert parse_polynomial(P, 2, "-2x1x2") == 5 * y1 * y2
    assert parse_polynomial(P, 2, "0") == Polynomial.zero(P, 2)
    with pytest.raises(ParseError):
        parse_polynomial(P, 2, "x3")
    with pytest.raises(ParseError):
        parse_polynomial(P, 2, "x1 +")


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([(2, 1), (3, 1), (2, 2), (3, 2)]), st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_parse_round_trip(pr, seed, d):
    F = make_field(*pr)
    rng = np.random.default_rng(seed)
    f = random_poly(F, 3, d, rng, 5)
    assert parse_polynomial(F, 3, format_polynomial(f)) == f


def test_homogeneous_pieces_and_monic():
    F = make_field(3)
    x1, x2 = variables(F, 2)
    f = 2 * x1**2 + x2 + 1
    comps = f.homogeneous_components()
    assert set(comps) == {0, 1, 2}
    assert not f.is_homogeneous()
    assert f.degree == 2
    g = 2 * x1 * x2 + x2**2
    assert g.monic().leading_term()[1] == 1
    assert g.variables_used() == {0, 1}


@pytest.mark.parametrize("p,r", [(2, 1), (3, 1), (2, 2)])
def test_divide_by_linear(p, r):
    F = make_field(p, r)
    rng = np.random.default_rng(6)
    for _ in range(8):
        ell = random_poly(F, 3, 1, rng, 2)
        f = random_poly(F, 3, 3, rng, 5)
        assert divide_by_linear(f * ell, ell) == f
    x1, x2, _ = variables(F, 3)
    assert divide_by_linear(x1**2 + x2**2 + x1 * x2, x1) is None


def test_orbit_product_of_linear_form():
    # S3 permuting coordinates over GF(7): the orbit of x1 is {x1, x2, x3}
    F = make_field(7)
    gens = [Matrix(F, [[0, 1, 0], [1, 0, 0], [0, 0, 1]]), Matrix(F, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])]
    G = closure(gens)
    x1, x2, x3 = variables(F, 3)
    assert len(orbit(G, x1)) == 3
    assert orbit_product(G, x1) == x1 * x2 * x3
    assert orbit_product(G, x1 + x2 + x3) == x1 + x2 + x3
    # the orbit product of a nonlinear polynomial multiplies distinct images
    assert orbit_product(G, x1**2) == (x1 * x2 * x3) ** 2


def test_orbit_product_all_nonzero_forms():
    # the orbit of x1 under GL2(F2) is the three nonzero forms
    F = make_field(2)
    G = closure([Matrix(F, [[1, 1], [0, 1]]), Matrix(F, [[0, 1], [1, 0]])])
    x1, x2 = variables(F, 2)
    assert G.order == 6
    assert orbit_product(G, x1) == x1 * x2 * (x1 + x2)


def test_ideal_graded_piece_dimension():
    F = make_field(3)
    x1, x2, x3 = variables(F, 3)
    # (x1, x2) in degree d: everything but x3^d
    for d in range(1, 5):
        assert ideal_graded_piece([x1, x2], d).dim == count(3, d) - 1
    # (x1^2) has degree-d piece of size count(3, d-2)
    for d in range(2, 6):
        assert ideal_graded_piece([x1**2], d).dim == count(3, d - 2)
    with pytest.raises(ValueError):
        ideal_graded_piece([x1 + x2**2], 3)


def test_character_validity():
    F = make_field(7)
    G = closure([Matrix(F, [[0, 1], [1, 0]])])
    det = Character(G, [int(g.a[0, 0] * g.a[1, 1] - g.a[0, 1] * g.a[1, 0]) % 7 for g in G.elements])
    assert det.is_valid()
    assert (det * det).is_trivial()
    assert det**2 == Character.trivial(G)
    assert not Character(G, [1, 3]).is_valid()


@pytest.mark.parametrize("p,r", [(2, 2), (3, 2)])
def test_extension_field_polynomial_arithmetic_is_exhaustively_consistent(p, r):
    F = make_field(p, r)
    x1, x2 = variables(F, 2)
    pts = list(itertools.product(range(F.q), repeat=2))
    for a in range(1, F.q):
        f = (x1 + a * x2) ** F.p
        # Frobenius is additive: (x1 + a x2)^p = x1^p + a^p x2^p
        assert f == x1**F.p + int(F.pow(a, F.p)) * x2**F.p
        for v in pts[:10]:
            assert evaluate(f, v) == F.pow(F.add(v[0], F.mul(a, v[1])), F.p)
