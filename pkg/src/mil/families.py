"""Explicit groups: unitary point stabilisers in dimension 3, block unipotent
families of unitary/symplectic/orthogonal type, the symmetric-group
quotient module, classical-form predicates and a small sanity corpus.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .field import GF, FieldError, make_field, prime_power
from .groups import MatrixGroup, closure, subgroup_from_indices, trivial_group
from .linalg import Matrix, Subspace
from .poly import Polynomial, orbit_product


# --------------------------------------------------------------------------
# classical forms


@dataclass(frozen=True)
class FormSpec:
    """A form on ``k^n``: ``kind`` in {hermitian, alternating, symmetric-bilinear, quadratic}.

    For ``quadratic`` the polynomial ``Q`` is required; ``gram`` is then its
    polar form (used only for reporting).
    """

    kind: str
    gram: Matrix
    Q: Polynomial | None = None

    def __post_init__(self):
        F = self.gram.field
        J = self.gram.a
        if self.kind == "hermitian":
            if not np.array_equal(J.T, F.conj(J)):
                raise ValueError("hermitian Gram matrix must equal its conjugate transpose")
        elif self.kind == "alternating":
            if not np.array_equal(J.T, F.neg(J)) or np.any(np.diag(J)):
                raise ValueError("alternating Gram matrix must be skew with zero diagonal")
        elif self.kind == "symmetric-bilinear":
            if not np.array_equal(J.T, J):
                raise ValueError("symmetric Gram matrix expected")
        elif self.kind == "quadratic":
            if self.Q is None or self.Q.degree != 2 or not self.Q.is_homogeneous():
                raise ValueError("quadratic form needs a homogeneous quadratic polynomial Q")
        else:
            raise ValueError(f"unknown form kind {self.kind!r}")


def form_membership(g: Matrix, form: FormSpec) -> bool:
    """Whether ``g`` preserves ``form``."""
    F = g.field
    J = form.gram.a
    if g.shape != J.shape:
        raise ValueError(f"matrix {g.shape} does not match form of size {J.shape}")
    if form.kind == "hermitian":
        return bool(np.array_equal(F.matmul(F.matmul(g.a.T, J), F.conj(g.a)), J))
    if form.kind in ("alternating", "symmetric-bilinear"):
        return bool(np.array_equal(F.matmul(F.matmul(g.a.T, J), g.a), J))
    # Q o g: x_j -> sum_k g[j, k] x_k
    return form.Q.substitute(g.a) == form.Q


def antidiagonal(F: GF, n: int) -> Matrix:
    return Matrix(F, np.eye(n, dtype=np.int64)[::-1])


def hyperbolic_gram(F: GF, m: int, sign: int = 1) -> Matrix:
    """``[[O, I], [sign*I, O]]``."""
    I = np.eye(m, dtype=np.int64)
    O = np.zeros((m, m), dtype=np.int64)
    lower = I if sign == 1 else F.neg(I)
    return Matrix(F, np.block([[O, I], [lower, O]]))


def hyperbolic_quadratic(F: GF, m: int) -> Polynomial:
    """``Q = sum_{i<=m} x_i x_{m+i}``."""
    n = 2 * m
    terms = {}
    for i in range(m):
        e = [0] * n
        e[i] = e[m + i] = 1
        terms[tuple(e)] = 1
    return Polynomial(F, n, terms)


# --------------------------------------------------------------------------
# point stabiliser of e_3 in the 3-dimensional unitary group


@dataclass
class GU3Data:
    q: int
    field: GF
    H: MatrixGroup
    Htilde: MatrixGroup
    tau: Matrix
    eta: int
    H_m: dict[int, MatrixGroup]
    form: FormSpec


def _check_q(q: int) -> tuple[int, int]:
    try:
        return prime_power(q)
    except FieldError as exc:
        raise ValueError(str(exc)) from None


def gu3_stabilizers(q: int) -> GU3Data:
    """``H = {[[1,0,0],[a,b,0],[c,d,1]] : b^(q+1)=1, d=-b a^q, c+c^q+a^(q+1)=0}`` over GF(q^2)."""
    p, r = _check_q(q)
    F = make_field(p, 2 * r)
    els = F.elements()
    conj = F.conj(els)
    unit_b = els[(els != 0) & (F.mul(els, conj) == 1)]
    mats = []
    for a in els:
        na = int(F.mul(a, F.conj(a)))
        cs = els[F.add(F.add(els, conj), na) == 0]
        for b in unit_b:
            d = int(F.neg(F.mul(b, F.conj(a))))
            for c in cs:
                mats.append([[1, 0, 0], [int(a), int(b), 0], [int(c), d, 1]])
    stack = np.array(mats, dtype=np.int64)
    H_all = MatrixGroup(F, 3, (), stack, name=f"H[GU3,q={q}]")
    Ht_idx = np.flatnonzero(H_all.stack[:, 1, 1] == 1)
    Htilde = subgroup_from_indices(H_all, Ht_idx, name=f"Htilde[GU3,q={q}]")
    eta = int(F.pow(F.gen, q - 1)) if F.q > 2 else 1
    tau = Matrix(F, [[1, 0, 0], [0, int(F.inv(eta)), 0], [0, 0, 1]])
    H = closure(list(Htilde.generators) + [tau], name=f"H[GU3,q={q}]")
    # indexed by the order of the image in H / Htilde: H_1 = Htilde, H_(q+1) = H
    H_m = {}
    for m in range(1, q + 2):
        if (q + 1) % m == 0:
            H_m[m] = closure(list(Htilde.generators) + [tau ** ((q + 1) // m)], name=f"H_{m}[GU3,q={q}]")
    form = FormSpec("hermitian", antidiagonal(F, 3))
    if not np.array_equal(H.stack, H_all.stack):
        raise AssertionError("H is not generated by Htilde and tau")
    return GU3Data(q, F, H, Htilde, tau, eta, H_m, form)


@dataclass
class GU3Invariants:
    x1: Polynomial
    F: Polynomial  # x1 x3^q + x2^(q+1) + x3 x1^q
    N3: Polynomial  # orbit product of x3 under H
    h: Polynomial  # orbit product of x2 under Htilde


def gu3_invariants(data: GU3Data) -> GU3Invariants:
    q, K = data.q, data.field
    x1, x2, x3 = (Polynomial.var(K, 3, i) for i in range(3))
    F = x1 * x3**q + x2 ** (q + 1) + x3 * x1**q
    N3 = orbit_product(data.H, x3)
    h = orbit_product(data.Htilde, x2)
    closed = x2 * (x2 ** (q * q - 1) - x1 ** (q * q - 1))
    if h != closed:
        raise AssertionError("orbit product of x2 differs from its closed form")
    return GU3Invariants(x1, F, N3, h)


# --------------------------------------------------------------------------
# block unipotent families [[I, 0], [B, I]]


def block_unipotent(F: GF, B: np.ndarray) -> Matrix:
    n = B.shape[0]
    I = np.eye(n, dtype=np.int64)
    O = np.zeros((n, n), dtype=np.int64)
    return Matrix(F, np.block([[I, O], [np.asarray(B, dtype=np.int64), I]]))


def _additive_basis(F: GF, values: np.ndarray) -> list[int]:
    """An F_p-basis of the additive group spanned by ``values``."""
    basis: list[int] = []
    span = {0}
    for v in sorted(int(x) for x in values):
        if v in span:
            continue
        basis.append(v)
        new = set(span)
        for s in span:
            for k in range(1, F.p):
                new.add(int(F.add(s, F.mul(k, v))))
        span = new
    return basis


@dataclass
class BlockFamily:
    q: int
    n: int  # block size; the group acts on k^(2n)
    field: GF
    G: MatrixGroup
    normalizer_generators: list[Matrix]
    form: FormSpec | None
    kind: str


def _block_family(F: GF, n: int, entries: Callable[[int, int], list[np.ndarray]], name: str) -> MatrixGroup:
    gens = []
    for i in range(n):
        for j in range(i, n):
            for B in entries(i, j):
                gens.append(block_unipotent(F, B))
    return closure(gens, name=name)


def _normalizer_generators(F: GF, n: int, twist: Callable[[np.ndarray], np.ndarray]) -> list[Matrix]:
    from .linalg import inverse

    gens = []
    base = []
    A = np.eye(n, dtype=np.int64)
    A[0, 0] = F.gen
    base.append(A)
    if n > 1:
        P = np.eye(n, dtype=np.int64)[np.r_[1:n, 0]]
        base.append(P)
        T = np.eye(n, dtype=np.int64)
        T[0, 1] = 1
        base.append(T)
    for A in base:
        lower = inverse(F, twist(A)).T
        O = np.zeros((n, n), dtype=np.int64)
        gens.append(Matrix(F, np.block([[A, O], [O, lower]])))
    return gens


def unitary_transvection_family(q: int, n: int) -> BlockFamily:
    """``[[I,0],[B,I]]`` with ``conj(B) = -B^T`` over GF(q^2); order ``q^(n^2)``."""
    if n < 2:
        raise ValueError("need 2n >= 4")
    p, r = _check_q(q)
    F = make_field(p, 2 * r)
    els = F.elements()
    diag_vals = _additive_basis(F, els[F.conj(els) == F.neg(els)])
    off_vals = _additive_basis(F, els)

    def entries(i, j):
        out = []
        vals = diag_vals if i == j else off_vals
        for b in vals:
            B = np.zeros((n, n), dtype=np.int64)
            B[i, j] = b
            if i != j:
                B[j, i] = F.neg(F.conj(b))
            out.append(B)
        return out

    G = _block_family(F, n, entries, f"G_{n}[unitary,q={q}]")
    form = FormSpec("hermitian", hyperbolic_gram(F, n))
    return BlockFamily(q, n, F, G, _normalizer_generators(F, n, F.conj), form, "unitary")


def symmetric_transvection_family(q: int, n: int) -> BlockFamily:
    """``[[I,0],[B,I]]`` with ``B = B^T`` over GF(q); order ``q^(n(n+1)/2)``."""
    if n < 2:
        raise ValueError("need 2n >= 4")
    p, r = _check_q(q)
    F = make_field(p, r)
    vals = _additive_basis(F, F.elements())

    def entries(i, j):
        out = []
        for b in vals:
            B = np.zeros((n, n), dtype=np.int64)
            B[i, j] = B[j, i] = b
            out.append(B)
        return out

    G = _block_family(F, n, entries, f"G_{n}[symplectic,q={q}]")
    form = FormSpec("alternating", hyperbolic_gram(F, n, sign=-1))
    return BlockFamily(q, n, F, G, _normalizer_generators(F, n, lambda A: A), form, "symplectic")


def symplectic_stabilizer(q: int, m: int) -> BlockFamily:
    """Point stabiliser of a maximal isotropic subspace in Sp(2m, q)."""
    return symmetric_transvection_family(q, m)


def orthogonal_plus_stabilizer_odd(q: int, m: int) -> BlockFamily:
    """``[[I,0],[B,I]]`` with ``B = -B^T`` over GF(q), q odd; order ``q^(m(m-1)/2)``."""
    p, r = _check_q(q)
    if p == 2:
        raise ValueError("odd q required")
    if m < 2:
        raise ValueError("m >= 2 required")
    F = make_field(p, r)
    vals = _additive_basis(F, F.elements())

    def entries(i, j):
        if i == j:
            return []
        out = []
        for b in vals:
            B = np.zeros((m, m), dtype=np.int64)
            B[i, j] = b
            B[j, i] = F.neg(b)
            out.append(B)
        return out

    G = _block_family(F, m, entries, f"H[GO+{2 * m},q={q}]")
    form = FormSpec("symmetric-bilinear", hyperbolic_gram(F, m))
    return BlockFamily(q, m, F, G, [], form, "orthogonal-odd")


def orthogonal_plus_stabilizer_even(q: int, m: int) -> BlockFamily:
    """``[[I,0],[B,I]]`` with ``B`` symmetric of zero diagonal over GF(q), q even."""
    p, r = _check_q(q)
    if p != 2:
        raise ValueError("even q required")
    if m < 2:
        raise ValueError("m >= 2 required")
    F = make_field(p, r)
    vals = _additive_basis(F, F.elements())

    def entries(i, j):
        if i == j:
            return []
        out = []
        for b in vals:
            B = np.zeros((m, m), dtype=np.int64)
            B[i, j] = B[j, i] = b
            out.append(B)
        return out

    G = _block_family(F, m, entries, f"H[GO+{2 * m},q={q}]")
    form = FormSpec("quadratic", hyperbolic_gram(F, m), hyperbolic_quadratic(F, m))
    return BlockFamily(q, m, F, G, [], form, "orthogonal-even")


@dataclass
class GO3Data:
    q: int
    field: GF
    H: MatrixGroup
    H_minus: MatrixGroup
    form: FormSpec


def go3_element(F: GF, a: int, b: int) -> Matrix:
    half = int(F.inv(2))
    return Matrix(F, [[1, 0, 0], [int(F.neg(b)), a, 0], [int(F.neg(F.mul(F.mul(b, b), half))), int(F.mul(a, b)), 1]])


def go3_stabilizers(q: int) -> GO3Data:
    """Point stabiliser of ``e_3`` for ``Q = 2 x1 x3 + x2^2`` (q odd), and its ``a = 1`` part."""
    p, r = _check_q(q)
    if p == 2:
        raise ValueError("odd q required")
    F = make_field(p, r)
    one, minus = 1, int(F.neg(1))
    basis = _additive_basis(F, F.elements())
    gens = [go3_element(F, one, b) for b in basis]
    H_minus = closure(gens, name=f"H-[GO3,q={q}]")
    H = closure(gens + [go3_element(F, minus, 0)], name=f"H[GO3,q={q}]")
    Q = Polynomial(F, 3, {(1, 0, 1): 2, (0, 2, 0): 1})
    gram = Matrix(F, [[0, 0, 2], [0, 2, 0], [2, 0, 0]])
    return GO3Data(q, F, H, H_minus, FormSpec("quadratic", gram, Q))


# --------------------------------------------------------------------------
# symmetric group on the quotient module


def perm_matrix_on_quotient(F: GF, m: int, perm: tuple[int, ...]) -> np.ndarray:
    """Matrix of ``e_i -> e_perm[i]`` on ``V = Vtilde/<v>`` in the basis ``b_j = e_j - e_(j+1)``, ``j < m-1``.

    ``Vtilde`` has basis ``b_1..b_(m-1)`` with coordinates the partial sums
    of the entries; in the quotient ``b_(m-1) = sum_(i<=m-2) i b_i``.
    """
    n = m - 2
    relation = np.array([(i + 1) % F.p for i in range(n)], dtype=np.int64)
    M = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        x = np.zeros(m, dtype=np.int64)
        x[perm[j]] += 1
        x[perm[j + 1]] -= 1
        c = np.cumsum(x)[: m - 1] % F.p
        col = (c[:n] + c[m - 2] * relation) % F.p
        M[:, j] = col
    return M


def quotient_coordinates(F: GF, m: int, x) -> np.ndarray:
    """Coordinates in ``V`` of the image of a vector ``x`` of ``Vtilde`` (entries summing to 0)."""
    x = np.asarray(x, dtype=np.int64) % F.p
    if x.sum() % F.p:
        raise ValueError("vector is not in Vtilde")
    n = m - 2
    relation = np.array([(i + 1) % F.p for i in range(n)], dtype=np.int64)
    c = np.cumsum(x)[: m - 1] % F.p
    return (c[:n] + c[m - 2] * relation) % F.p


@dataclass
class SymmetricFamily:
    p: int
    m: int
    field: GF
    G: MatrixGroup
    H: MatrixGroup
    sigma: Matrix
    U1: Subspace
    U: Subspace | None
    f_basis: list[np.ndarray]  # images of e_j + e_(j+1) (p = 2), as coordinate vectors
    perm_to_matrix: Callable[[tuple[int, ...]], Matrix] = dc_field(repr=False)


def symmetric_family(p: int, m: int) -> SymmetricFamily:
    """``S_m`` acting on ``Vtilde/<v>`` over GF(p) with ``p | m``."""
    if m < 5:
        raise ValueError("m >= 5 required")
    if m % p:
        raise ValueError("p must divide m")
    F = make_field(p)
    mp = m // p

    def mat(perm):
        return Matrix(F, perm_matrix_on_quotient(F, m, perm))

    swap = tuple([1, 0] + list(range(2, m)))
    cycle = tuple(list(range(1, m)) + [0])
    G = closure([mat(swap), mat(cycle)], name=f"S_{m}[p={p}]")
    block_gens = []
    for j in range(mp):
        for i in range(p - 1):
            a = j * p + i
            perm = list(range(m))
            perm[a], perm[a + 1] = perm[a + 1], perm[a]
            block_gens.append(mat(tuple(perm)))
    H = closure(block_gens, name=f"H[S_{m},p={p}]")
    sig = list(range(m))
    for j in range(mp):
        for i in range(p):
            sig[j * p + i] = j * p + (i + 1) % p
    sigma = mat(tuple(sig))
    vs = []
    for j in range(mp):
        x = np.zeros(m, dtype=np.int64)
        x[j * p : (j + 1) * p] = 1
        vs.append(quotient_coordinates(F, m, x))
    U1 = Subspace(F, m - 2, np.array(vs))
    U = None
    if p % 2 == 1 or mp % 2 == 0:
        w = quotient_coordinates(F, m, np.arange(1, m + 1))
        U = Subspace(F, m - 2, np.array(vs + [w]))
    f_basis = []
    for j in range(m - 2):
        x = np.zeros(m, dtype=np.int64)
        x[j] = 1
        x[j + 1] = F.neg(1) if p != 2 else 1
        f_basis.append(quotient_coordinates(F, m, x))
    return SymmetricFamily(p, m, F, G, H, sigma, U1, U, f_basis, mat)


# --------------------------------------------------------------------------
# sanity corpus


def permutation_group_s3(p: int = 7) -> MatrixGroup:
    F = make_field(p)
    swap = Matrix(F, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    cyc = Matrix(F, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    return closure([swap, cyc], name=f"S3/F{p}")


def diagonal_reflection_group(p: int, m: int) -> MatrixGroup:
    """``<diag(lambda, 1)>`` with ``lambda`` of order ``m`` in GF(p)."""
    F = make_field(p)
    lam = F.root_of_unity(m)
    return closure([Matrix(F, [[lam, 0], [0, 1]])], name=f"C{m}-diag/F{p}")


def cyclic_transvection_group(p: int) -> MatrixGroup:
    F = make_field(p)
    return closure([Matrix(F, [[1, 0], [1, 1]])], name=f"C{p}-transv/F{p}")


def sanity_groups() -> dict[str, MatrixGroup]:
    return {
        "S3/F7": permutation_group_s3(7),
        "C3-diag/F7": diagonal_reflection_group(7, 3),
        "C3-transv/F3": cyclic_transvection_group(3),
        "trivial/F2": trivial_group(make_field(2), 2),
    }


# --------------------------------------------------------------------------
# textual group specs: "family:key=value:key=value"


def _parse_spec(spec: str) -> tuple[str, dict[str, str]]:
    parts = spec.split(":")
    params = {}
    for part in parts[1:]:
        if "=" not in part:
            raise ValueError(f"malformed parameter {part!r} in {spec!r}")
        k, v = part.split("=", 1)
        params[k.strip()] = v.strip()
    return parts[0].strip(), params


def build_group(spec: str) -> MatrixGroup:
    """Construct a group from text such as ``gu3:q=2:sub=Htilde`` or ``symmetric:p=3:m=6:sub=H``."""
    name, params = _parse_spec(spec)

    def geti(key, default=None):
        if key in params:
            return int(params[key])
        if default is None:
            raise ValueError(f"{name} needs parameter {key}")
        return default

    sub = params.get("sub")
    if name == "gu3":
        d = gu3_stabilizers(geti("q", 2))
        if sub in (None, "H"):
            return d.H
        if sub == "Htilde":
            return d.Htilde
        if sub.startswith("H") and sub[1:].isdigit():
            return d.H_m[int(sub[1:])]
        raise ValueError(f"unknown gu3 subgroup {sub!r}")
    if name in ("unitary", "abelian-i"):
        return unitary_transvection_family(geti("q", 2), geti("n", 2)).G
    if name in ("symplectic", "abelian-ii"):
        return symmetric_transvection_family(geti("q", 2), geti("n", geti("m", 2))).G
    if name == "orth-odd":
        return orthogonal_plus_stabilizer_odd(geti("q", 3), geti("m", 2)).G
    if name == "orth-even":
        return orthogonal_plus_stabilizer_even(geti("q", 2), geti("m", 2)).G
    if name == "go3":
        d = go3_stabilizers(geti("q", 3))
        return d.H_minus if sub in ("Hminus", "H-") else d.H
    if name == "symmetric":
        fam = symmetric_family(geti("p", 3), geti("m", 6))
        if sub in (None, "G"):
            return fam.G
        if sub == "H":
            return fam.H
        if sub == "sigma":
            return closure([fam.sigma])
        raise ValueError(f"unknown symmetric subgroup {sub!r}")
    if name == "s3":
        return permutation_group_s3(geti("p", 7))
    if name == "diag":
        return diagonal_reflection_group(geti("p", 7), geti("m", 3))
    if name == "transvection":
        return cyclic_transvection_group(geti("p", 3))
    if name == "trivial":
        return trivial_group(make_field(geti("p", 2)), geti("n", 2))
    raise ValueError(f"unknown group family {name!r}")


GROUP_FAMILIES = ("gu3", "unitary", "symplectic", "orth-odd", "orth-even", "go3", "symmetric", "s3", "diag", "transvection", "trivial")
