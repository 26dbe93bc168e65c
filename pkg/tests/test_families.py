from math import factorial

import numpy as np
import pytest

from mil.families import (
    FormSpec,
    build_group,
    form_membership,
    go3_stabilizers,
    gu3_invariants,
    gu3_stabilizers,
    orthogonal_plus_stabilizer_even,
    orthogonal_plus_stabilizer_odd,
    quotient_coordinates,
    sanity_groups,
    symmetric_family,
    symmetric_transvection_family,
    unitary_transvection_family,
)
from mil.field import make_field
from mil.groups import point_stabilizer, reflection_census
from mil.linalg import Matrix, Subspace
from mil.poly import act


@pytest.mark.parametrize("q", [2, 3])
def test_gu3_orders_and_form(q):
    d = gu3_stabilizers(q)
    # a in GF(q^2), b with b^(q+1) = 1, c on a coset of the trace-zero line
    assert d.H.order == q**3 * (q + 1)
    assert d.Htilde.order == q**3
    assert d.Htilde.is_p_group()
    assert all(form_membership(g, d.form) for g in d.H.elements)
    assert d.field.mult_order(d.eta) == q + 1
    assert set(d.H_m) == {m for m in range(1, q + 2) if (q + 1) % m == 0}
    for m, Hm in d.H_m.items():
        assert Hm.order == m * q**3
    assert d.H_m[1].order == d.Htilde.order
    assert d.H_m[q + 1].order == d.H.order
    # H fixes e3
    e3 = Subspace(d.field, 3, [[0, 0, 1]])
    assert point_stabilizer(d.H, e3).order == d.H.order


@pytest.mark.parametrize("q", [2, 3])
def test_gu3_invariants(q):
    d = gu3_stabilizers(q)
    inv = gu3_invariants(d)
    for f in (inv.x1, inv.F, inv.N3):
        assert all(act(g, f) == f for g in d.H.generators)
    assert all(act(g, inv.h) == inv.h for g in d.Htilde.generators)
    assert inv.h.degree == q * q
    # N3 has one factor per element of the x3-orbit; the stabiliser of x3 is the diagonal part
    assert inv.N3.degree == q**3
    assert inv.F.degree == q + 1
    # h is semi-invariant but not invariant under the full H
    assert any(act(g, inv.h) != inv.h for g in d.H.generators)


@pytest.mark.parametrize("q,n,order", [(2, 2, 2**4), (3, 2, 3**4), (2, 3, 2**9)])
def test_unitary_family(q, n, order):
    fam = unitary_transvection_family(q, n)
    assert fam.G.order == order  # q^(n^2)
    assert fam.G.is_abelian()
    assert all(form_membership(g, fam.form) for g in fam.G.elements)
    for h in fam.normalizer_generators:
        assert form_membership(h, fam.form)
        hi = h.inverse()
        assert all((h @ g @ hi) in fam.G for g in fam.G.generators)


@pytest.mark.parametrize("q,n,order", [(2, 2, 2**3), (3, 2, 3**3), (2, 3, 2**6), (4, 2, 4**3)])
def test_symplectic_family(q, n, order):
    fam = symmetric_transvection_family(q, n)
    assert fam.G.order == order  # q^(n(n+1)/2)
    assert fam.G.is_abelian()
    assert all(form_membership(g, fam.form) for g in fam.G.elements)
    for h in fam.normalizer_generators:
        assert form_membership(h, fam.form)
        hi = h.inverse()
        assert all((h @ g @ hi) in fam.G for g in fam.G.generators)


@pytest.mark.parametrize("q,m", [(3, 2), (3, 3), (5, 2)])
def test_orthogonal_odd(q, m):
    fam = orthogonal_plus_stabilizer_odd(q, m)
    assert fam.G.order == q ** (m * (m - 1) // 2)
    assert all(form_membership(g, fam.form) for g in fam.G.elements)
    # a skew B of rank 2 fixes a subspace of codimension 2: no pseudo-reflections
    assert reflection_census(fam.G).n_pseudo_reflections == 0


@pytest.mark.parametrize("q,m", [(2, 2), (2, 3), (4, 2)])
def test_orthogonal_even(q, m):
    fam = orthogonal_plus_stabilizer_even(q, m)
    assert fam.G.order == q ** (m * (m - 1) // 2)
    assert all(form_membership(g, fam.form) for g in fam.G.elements)
    assert reflection_census(fam.G).n_pseudo_reflections == 0


def test_family_parameter_errors():
    with pytest.raises(ValueError):
        orthogonal_plus_stabilizer_odd(4, 2)
    with pytest.raises(ValueError):
        orthogonal_plus_stabilizer_even(3, 2)
    with pytest.raises(ValueError):
        unitary_transvection_family(2, 1)
    with pytest.raises(ValueError):
        gu3_stabilizers(6)
    with pytest.raises(ValueError):
        go3_stabilizers(2)


@pytest.mark.parametrize("q", [3, 5, 9])
def test_go3(q):
    d = go3_stabilizers(q)
    assert d.H_minus.order == q
    assert d.H.order == 2 * q
    assert all(form_membership(g, d.form) for g in d.H.elements)
    e3 = Subspace(d.field, 3, [[0, 0, 1]])
    assert point_stabilizer(d.H, e3).order == d.H.order


def test_form_validation():
    F = make_field(3)
    with pytest.raises(ValueError):
        FormSpec("alternating", Matrix(F, [[1, 0], [0, 1]]))
    with pytest.raises(ValueError):
        FormSpec("symmetric-bilinear", Matrix(F, [[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        FormSpec("bogus", Matrix(F, [[1]]))


@pytest.mark.parametrize("p,m", [(3, 6), (2, 6), (5, 5), (2, 8)])
def test_symmetric_family(p, m):
    fam = symmetric_family(p, m)
    assert fam.G.n == m - 2
    assert fam.G.order == factorial(m)  # faithful for m >= 5
    assert fam.H.order == factorial(p) ** (m // p)
    assert fam.sigma in fam.H
    assert fam.sigma.rank() == m - 2
    assert fam.field.p == p
    # sigma generates a group of order p
    s = fam.sigma
    assert not s.is_identity() and (s**p).is_identity()
    # the block indicators sum to (1, ..., 1), which dies in V
    assert fam.U1.dim == m // p - 1
    # the image of (1, ..., 1) is zero in V
    assert not np.any(quotient_coordinates(fam.field, m, np.ones(m, dtype=np.int64)))
    # transposition matrices act as pseudo-reflections
    swap = fam.perm_to_matrix(tuple([1, 0] + list(range(2, m))))
    assert swap.rank() == m - 2 and (swap - Matrix.identity(fam.field, m - 2)).rank() == 1


def test_symmetric_family_errors():
    with pytest.raises(ValueError):
        symmetric_family(3, 4)
    with pytest.raises(ValueError):
        symmetric_family(3, 7)
    with pytest.raises(ValueError):
        quotient_coordinates(make_field(3), 6, [1, 0, 0, 0, 0, 0])


def test_sanity_groups():
    g = sanity_groups()
    assert {k: v.order for k, v in g.items()} == {"S3/F7": 6, "C3-diag/F7": 3, "C3-transv/F3": 3, "trivial/F2": 1}


@pytest.mark.parametrize(
    "spec,order",
    [
        ("gu3:q=2", 24),
        ("gu3:q=2:sub=Htilde", 8),
        ("gu3:q=3:sub=H2", 54),
        ("unitary:q=2:n=2", 16),
        ("symplectic:q=3:n=2", 27),
        ("orth-odd:q=3:m=3", 27),
        ("orth-even:q=2:m=3", 8),
        ("go3:q=3", 6),
        ("go3:q=3:sub=Hminus", 3),
        ("symmetric:p=3:m=6:sub=H", 36),
        ("symmetric:p=3:m=6:sub=sigma", 3),
        ("s3", 6),
        ("diag:p=7:m=3", 3),
        ("transvection:p=5", 5),
        ("trivial:p=3:n=2", 1),
    ],
)
def test_build_group(spec, order):
    assert build_group(spec).order == order


@pytest.mark.parametrize("spec", ["nope", "gu3:q", "gu3:q=2:sub=X", "symmetric:p=3:m=6:sub=Q"])
def test_build_group_errors(spec):
    with pytest.raises(ValueError):
        build_group(spec)
