"""The polynomial ring k[x1..xn] and its graded pieces.

Two representations are used side by side:

* :class:`Polynomial` -- a sparse term map ``{exponent tuple: code}``, the
  user-facing value type with exact parse/print.
* dense graded vectors -- a homogeneous degree-``d`` polynomial is a vector
  of codes indexed by :func:`monomials` ``(n, d)``.  Everything that is
  degreewise linear algebra (group actions, transfers, ideal pieces) runs on
  these.

Monomials are listed in decreasing grevlex order with ``x1 < x2 < ... < xn``;
for a fixed degree this is increasing lexicographic order of exponent
tuples, so ``monomials(3, 1) == ((0,0,1), (0,1,0), (1,0,0))``.

Group action convention: ``act(g, f) = f o g^-1``, i.e. ``x_j`` is replaced by
``sum_k (g^-1)_{jk} x_k``.  This is a left action on the coordinate ring.
"""

from __future__ import annotations

import re
from functools import lru_cache, total_ordering
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .field import GF, FieldElement
from .linalg import Matrix, Subspace, inverse


# --------------------------------------------------------------------------
# monomial bases


def count(n: int, d: int) -> int:
    """Number of monomials of degree ``d`` in ``n`` variables."""
    if d < 0:
        return 0
    if n == 0:
        return 1 if d == 0 else 0
    return comb(d + n - 1, n - 1)


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    if d < 0:
        return ()
    if n == 0:
        return ((),) if d == 0 else ()
    if n == 1:
        return ((d,),)
    out = []
    for e in range(d + 1):
        out.extend((e,) + rest for rest in monomials(n - 1, d - e))
    return tuple(out)


@lru_cache(maxsize=None)
def exponents(n: int, d: int) -> np.ndarray:
    E = np.array(monomials(n, d), dtype=np.int64).reshape(count(n, d), n)
    E.setflags(write=False)
    return E


@lru_cache(maxsize=None)
def _lookup(n: int, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    base = np.array([(d + 1) ** i for i in range(n)], dtype=np.int64)
    keys = exponents(n, d) @ base if n else np.zeros(1, dtype=np.int64)
    order = np.argsort(keys, kind="stable")
    return base, keys[order], order


def index_of(n: int, d: int, E) -> np.ndarray:
    """Positions of exponent vectors (rows of ``E``, all of degree ``d``)."""
    E = np.asarray(E, dtype=np.int64)
    base, skeys, order = _lookup(n, d)
    k = E @ base if n else np.zeros(E.shape[:-1], dtype=np.int64)
    pos = np.searchsorted(skeys, k)
    return order[pos]


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(monomials(n, d))}


@lru_cache(maxsize=None)
def mulvar(n: int, d: int) -> np.ndarray:
    """``mulvar(n, d)[k, i]`` is the index in degree ``d+1`` of ``x_k * m_i``."""
    E = exponents(n, d)
    out = np.empty((n, E.shape[0]), dtype=np.int64)
    for k in range(n):
        Ek = E.copy()
        Ek[:, k] += 1
        out[k] = index_of(n, d + 1, Ek)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def peel(n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """For each degree-``d`` monomial: its first variable and the index of ``m / x_var``."""
    E = exponents(n, d)
    var = np.argmax(E > 0, axis=1)
    P = E.copy()
    P[np.arange(E.shape[0]), var] -= 1
    parent = index_of(n, d - 1, P)
    var.setflags(write=False)
    parent.setflags(write=False)
    return var, parent


@lru_cache(maxsize=64)
def mul_index(n: int, a: int, b: int) -> np.ndarray:
    """``mul_index(n, a, b)[i, j]`` is the index of ``m_i * m_j`` in degree ``a + b``."""
    Ea, Eb = exponents(n, a), exponents(n, b)
    S = Ea[:, None, :] + Eb[None, :, :]
    out = index_of(n, a + b, S.reshape(-1, n)).reshape(Ea.shape[0], Eb.shape[0])
    out.setflags(write=False)
    return out


def grevlex_key(e: Sequence[int]) -> tuple:
    """Sort key: ascending key means ascending grevlex (x1 < ... < xn)."""
    return (sum(e), tuple(-x for x in e))


@total_ordering
class Monomial:
    """Exponent vector with grevlex comparison."""

    __slots__ = ("exponents",)

    def __init__(self, exps: Iterable[int]):
        self.exponents = tuple(int(e) for e in exps)
        if any(e < 0 for e in self.exponents):
            raise ValueError("negative exponent")

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(a + b for a, b in zip(self.exponents, other.exponents))

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.exponents == other.exponents

    def __lt__(self, other: "Monomial"):
        return grevlex_key(self.exponents) < grevlex_key(other.exponents)

    def __hash__(self):
        return hash(self.exponents)

    def __repr__(self):
        return f"Monomial{self.exponents}"


def homogeneous_basis(n: int, d: int) -> list[Monomial]:
    """All degree-``d`` monomials in ``n`` variables, largest first."""
    return [Monomial(e) for e in monomials(n, d)]


# --------------------------------------------------------------------------
# dense graded arithmetic


def _scatter_add(F: GF, out_len: int, idx: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """Field sum of ``vals[..., i]`` into slots ``idx[i]`` (batched over leading axes)."""
    lead = vals.shape[: vals.ndim - idx.ndim]
    nb = int(np.prod(lead)) if lead else 1
    flat_vals = vals.reshape(nb, -1)
    ids = (idx.ravel()[None, :] + out_len * np.arange(nb)[:, None]).ravel()
    if F.is_prime_field:
        acc = np.bincount(ids, weights=flat_vals.ravel().astype(np.float64), minlength=nb * out_len)
        res = np.rint(np.fmod(acc, F.p)).astype(np.int64)
    else:
        dig = F.digits(flat_vals).reshape(-1, F.r)
        parts = [
            np.rint(np.fmod(np.bincount(ids, weights=dig[:, t].astype(np.float64), minlength=nb * out_len), F.p)).astype(np.int64)
            for t in range(F.r)
        ]
        res = F.from_digits(np.stack(parts, axis=-1))
    return res.reshape(lead + (out_len,))


def mul_linear(F: GF, n: int, d: int, V, L) -> np.ndarray:
    """Multiply degree-``d`` dense vectors ``V (..., N_d)`` by linear forms ``L (..., n)``."""
    V = np.asarray(V, dtype=np.int64)
    L = np.asarray(L, dtype=np.int64)
    mv = mulvar(n, d)
    lead = np.broadcast_shapes(V.shape[:-1], L.shape[:-1])
    if F.is_prime_field:
        acc = np.zeros(lead + (count(n, d + 1),), dtype=np.int64)
        for k in range(n):
            lk = L[..., k]
            if np.any(lk):
                acc[..., mv[k]] += lk[..., None] * V
        return acc % F.p
    if F.supports_packed and n <= 255 // (F.p - 1):
        acc = np.zeros(lead + (count(n, d + 1),), dtype=np.int64)
        for k in range(n):
            lk = L[..., k]
            if np.any(lk):
                acc[..., mv[k]] += F.mul_packed(lk[..., None], V)
        return F.unpack(acc)
    out = np.zeros(lead + (count(n, d + 1),), dtype=np.int64)
    for k in range(n):
        lk = L[..., k]
        if not np.any(lk):
            continue
        contrib = F.mul(lk[..., None], V)
        out[..., mv[k]] = F.add(out[..., mv[k]], contrib)
    return out


def dense_mul(F: GF, n: int, a: int, u, b: int, v) -> np.ndarray:
    """Product of dense homogeneous vectors of degrees ``a`` and ``b`` (batched)."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    outer = F.mul(u[..., :, None], v[..., None, :])
    return _scatter_add(F, count(n, a + b), mul_index(n, a, b), outer)


def substitution_matrices(F: GF, S, D: int, n_out: int | None = None) -> Iterator[tuple[int, np.ndarray]]:
    """Matrices of the substitutions ``x_j -> sum_k S[b, j, k] y_k`` on degrees ``0..D``.

    ``S`` has shape ``(B, n, n_out)``.  Yields ``(d, M)`` with ``M`` of shape
    ``(B, N_d(n_out), N_d(n))``; column ``i`` of ``M[b]`` is the image of the
    ``i``-th degree-``d`` monomial.
    """
    S = np.asarray(S, dtype=np.int64)
    if S.ndim == 2:
        S = S[None]
    B, n, k_out = S.shape
    if n_out is not None and n_out != k_out:
        raise ValueError("n_out does not match S")
    M = np.ones((B, 1, 1), dtype=np.int64)
    yield 0, M
    prime = F.is_prime_field
    for d in range(1, D + 1):
        var, parent = peel(n, d)
        mv = mulvar(k_out, d - 1)
        out = np.zeros((B, count(k_out, d), count(n, d)), dtype=np.int64)
        for j in range(n):
            cols = np.flatnonzero(var == j)
            if cols.size == 0:
                continue
            Vj = M[:, :, parent[cols]]
            for k in range(k_out):
                s = S[:, j, k]
                if not np.any(s):
                    continue
                rows = mv[k]
                if prime:
                    out[:, rows[:, None], cols[None, :]] += s[:, None, None] * Vj
                else:
                    cur = out[:, rows[:, None], cols[None, :]]
                    out[:, rows[:, None], cols[None, :]] = F.add(cur, F.mul(s[:, None, None], Vj))
        if prime:
            out %= F.p
        M = out
        yield d, M


def substitution_matrix(F: GF, S, d: int) -> np.ndarray:
    """Single-substitution version of :func:`substitution_matrices` at degree ``d``."""
    M = None
    for dd, M in substitution_matrices(F, np.asarray(S)[None], d):
        pass
    return M[0]


def action_matrices(F: GF, gs: Sequence[Matrix], D: int) -> Iterator[tuple[int, np.ndarray]]:
    """Matrices of ``f -> act(g, f)`` on degree ``0..D`` for each ``g``."""
    invs = np.stack([inverse(F, g.a) for g in gs]) if gs else np.zeros((0, 0, 0), dtype=np.int64)
    return substitution_matrices(F, invs, D)


def monomial_images(F: GF, S, d: int, which: np.ndarray) -> np.ndarray:
    """Images of selected degree-``d`` monomials under substitutions ``S (B, n, n)``.

    Only the monomials on the peel-chains of ``which`` are expanded, so this
    is cheap when few columns of a large substitution matrix are needed.
    Returns shape ``(B, len(which), N_d)``.
    """
    S = np.asarray(S, dtype=np.int64)
    B, n, _ = S.shape
    which = np.asarray(which, dtype=np.int64)
    needed = {d: np.unique(which)}
    for dd in range(d, 0, -1):
        var, parent = peel(n, dd)
        needed[dd - 1] = np.unique(parent[needed[dd]])
    images = {0: np.ones((B, 1, 1), dtype=np.int64)}
    pos = {0: {0: 0}}
    for dd in range(1, d + 1):
        var, parent = peel(n, dd)
        idxs = needed[dd]
        prev = images[dd - 1]
        prev_pos = pos[dd - 1]
        par_rows = np.array([prev_pos[int(i)] for i in parent[idxs]], dtype=np.int64)
        Vp = prev[:, par_rows, :]  # (B, m, N_{dd-1})
        L = S[:, var[idxs], :]  # (B, m, n)
        images[dd] = mul_linear(F, n, dd - 1, Vp, L)
        pos[dd] = {int(i): r for r, i in enumerate(idxs)}
        del images[dd - 1]
    rows = np.array([pos[d][int(i)] for i in which], dtype=np.int64)
    return images[d][:, rows, :]


# --------------------------------------------------------------------------
# sparse polynomials


def _code(F: GF, c) -> int:
    if isinstance(c, FieldElement):
        if c.field is not F:
            raise ValueError("coefficient from a different field")
        return c.value
    c = int(c)
    if F.is_prime_field:
        return c % F.p
    if not 0 <= c < F.q:
        raise ValueError(f"code {c} out of range for {F!r}")
    return c


class Polynomial:
    """Element of ``k[x1..xn]`` as an immutable term map."""

    __slots__ = ("field", "n", "terms", "_hash")

    def __init__(self, field: GF, n: int, terms: Mapping[Sequence[int], object] | None = None):
        self.field = field
        self.n = n
        clean: dict[tuple[int, ...], int] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not have {n} entries")
            c = _code(field, c)
            if c:
                clean[e] = c
        self.terms = clean
        self._hash = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def _raw(cls, field: GF, n: int, terms: dict) -> "Polynomial":
        obj = cls.__new__(cls)
        obj.field = field
        obj.n = n
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, field: GF, n: int) -> "Polynomial":
        return cls._raw(field, n, {})

    @classmethod
    def constant(cls, field: GF, n: int, c=1) -> "Polynomial":
        return cls(field, n, {(0,) * n: c})

    @classmethod
    def var(cls, field: GF, n: int, i: int) -> "Polynomial":
        """The coordinate ``x_{i+1}`` (``i`` is 0-based)."""
        e = [0] * n
        e[i] = 1
        return cls._raw(field, n, {tuple(e): 1})

    @classmethod
    def linear(cls, field: GF, coeffs) -> "Polynomial":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(field, n, terms)

    @classmethod
    def from_vector(cls, field: GF, n: int, d: int, vec) -> "Polynomial":
        vec = np.asarray(vec, dtype=np.int64)
        mons = monomials(n, d)
        nz = np.flatnonzero(vec)
        return cls._raw(field, n, {mons[i]: int(vec[i]) for i in nz})

    # -- inspection ------------------------------------------------------

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def homogeneous_components(self) -> dict[int, "Polynomial"]:
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {d: Polynomial._raw(self.field, self.n, t) for d, t in sorted(parts.items())}

    def to_vector(self, d: int | None = None) -> np.ndarray:
        if d is None:
            d = max(self.degree, 0)
        idx = monomial_index(self.n, d)
        vec = np.zeros(count(self.n, d), dtype=np.int64)
        for e, c in self.terms.items():
            if sum(e) != d:
                raise ValueError(f"term {e} is not of degree {d}")
            vec[idx[e]] = c
        return vec

    def coefficient(self, e: Sequence[int]) -> int:
        return self.terms.get(tuple(e), 0)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[tuple[int, ...], int]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms.items(), key=lambda t: grevlex_key(t[0]))

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        _, c = self.leading_term()
        return self.scale(int(self.field.inv(c)))

    def variables_used(self) -> set[int]:
        return {i for e in self.terms for i, x in enumerate(e) if x}

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if other.field is not self.field or other.n != self.n:
            raise ValueError("polynomials from different rings")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.field, self.n, other)
        self._check(other)
        F = self.field
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = int(F.add(t.get(e, 0), c))
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return Polynomial._raw(F, self.n, t)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return Polynomial._raw(F, self.n, {e: int(F.neg(c)) for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.field, self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        F = self.field
        c = _code(F, c)
        if c == 0:
            return Polynomial.zero(F, self.n)
        return Polynomial._raw(F, self.n, {e: int(F.mul(c, v)) for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        F = self.field
        if not self.terms or not other.terms:
            return Polynomial.zero(F, self.n)
        if len(self.terms) * len(other.terms) > 4000 and self.is_homogeneous() and other.is_homogeneous():
            a, b = self.degree, other.degree
            vec = dense_mul(F, self.n, a, self.to_vector(a), b, other.to_vector(b))
            return Polynomial.from_vector(F, self.n, a + b, vec)
        t: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t[e] = int(F.add(t.get(e, 0), F.mul(c1, c2)))
        return Polynomial._raw(F, self.n, {e: c for e, c in t.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.field, self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field is other.field and self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, FieldElement)):
            return self == Polynomial.constant(self.field, self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def substitute(self, S) -> "Polynomial":
        """Replace ``x_j`` by ``sum_k S[j, k] y_k`` (``S`` is ``n x k``)."""
        F = self.field
        S = np.asarray(S, dtype=np.int64)
        k = S.shape[1]
        result: dict = {}
        for d, part in self.homogeneous_components().items():
            vec = part.to_vector(d)
            nz = np.flatnonzero(vec)
            if k == self.n:
                imgs = monomial_images(F, S[None], d, nz)[0]
                out = F.dot_sum(vec[nz], imgs, axis=0)
            else:
                M = substitution_matrix(F, S, d)
                out = F.matmul(M[:, nz], vec[nz][:, None])[:, 0]
            result.update(Polynomial.from_vector(F, k, d, out).terms)
        return Polynomial._raw(F, k, result)

    # -- text ------------------------------------------------------------

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial[{self.field!r}, n={self.n}]({self})"


def variables(field: GF, n: int) -> list[Polynomial]:
    return [Polynomial.var(field, n, i) for i in range(n)]


def format_polynomial(f: Polynomial) -> str:
    if f.is_zero():
        return "0"
    F = f.field
    out = []
    for e, c in f.sorted_terms():
        factors = [f"x{i + 1}" if x == 1 else f"x{i + 1}^{x}" for i, x in enumerate(e) if x]
        out.append("*".join([F.format(c)] + factors))
    return " + ".join(out)


_TOKEN = re.compile(r"\s*(?:(?P<g>g\^-?\d+|g(?![\w^]))|(?P<x>x(?P<xi>\d+)(?:\^(?P<xe>\d+))?)|(?P<int>\d+)|(?P<op>[+\-*]))")


class ParseError(ValueError):
    pass


def parse_polynomial(field: GF, n: int, text: str) -> Polynomial:
    """Inverse of :func:`format_polynomial`; also accepts ``-`` and implicit ``*``."""
    s = text.strip()
    pos = 0
    tokens = []
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {s[pos:]!r}")
        pos = m.end()
        if m.group("g"):
            tokens.append(("c", field.parse(m.group("g"))))
        elif m.group("x"):
            i = int(m.group("xi"))
            if not 1 <= i <= n:
                raise ParseError(f"variable x{i} outside x1..x{n}")
            tokens.append(("x", (i - 1, int(m.group("xe") or 1))))
        elif m.group("int"):
            tokens.append(("c", field.parse(m.group("int"))))
        else:
            tokens.append(("op", m.group("op")))
    result = Polynomial.zero(field, n)
    sign = 1
    coeff = None
    exps = [0] * n
    seen = False

    def flush():
        nonlocal result, coeff, exps, seen
        if not seen:
            raise ParseError(f"empty term in {text!r}")
        c = 1 if coeff is None else coeff
        if sign < 0:
            c = int(field.neg(c))
        result = result + Polynomial(field, n, {tuple(exps): c})
        coeff, exps, seen = None, [0] * n, False

    for kind, val in tokens:
        if kind == "op" and val in "+-":
            if seen:
                flush()
            elif val == "-" and result.is_zero() and coeff is None:
                pass
            sign = -1 if val == "-" else 1
        elif kind == "op":
            continue
        elif kind == "c":
            coeff = val if coeff is None else int(field.mul(coeff, val))
            seen = True
        else:
            i, e = val
            exps[i] += e
            seen = True
    if seen:
        flush()
    elif tokens:
        raise ParseError(f"dangling operator in {text!r}")
    return result


# --------------------------------------------------------------------------
# paper-facing operations


def act(g: Matrix, f: Polynomial) -> Polynomial:
    """``(g . f)(v) = f(g^-1 v)``."""
    if g.rows != f.n or g.cols != f.n:
        raise ValueError(f"matrix {g.shape} does not act on {f.n} variables")
    return f.substitute(inverse(g.field, g.a))


def divide_by_linear(f: Polynomial, ell: Polynomial) -> Polynomial | None:
    """Exact quotient ``f / ell`` or ``None`` when ``ell`` does not divide ``f``."""
    if ell.is_zero() or not ell.is_homogeneous() or ell.degree != 1:
        raise ValueError("divisor must be a nonzero linear form")
    F = f.field
    n = f.n
    coeffs = [0] * n
    for e, c in ell.terms.items():
        coeffs[e.index(1)] = c
    j = max(i for i in range(n) if coeffs[i])
    inv_cj = int(F.inv(coeffs[j]))
    rem = dict(f.terms)
    quot: dict = {}
    # eliminate x_j-bearing terms in decreasing x_j exponent
    while True:
        cands = [e for e in rem if e[j] > 0]
        if not cands:
            break
        top = max(e[j] for e in cands)
        for e in [e for e in cands if e[j] == top]:
            c = rem.pop(e, 0)
            if not c:
                continue
            u = list(e)
            u[j] -= 1
            u = tuple(u)
            qc = int(F.mul(c, inv_cj))
            quot[u] = int(F.add(quot.get(u, 0), qc))
            for k in range(n):
                if k == j or not coeffs[k]:
                    continue
                t = list(u)
                t[k] += 1
                t = tuple(t)
                v = int(F.sub(rem.get(t, 0), F.mul(qc, coeffs[k])))
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
    if any(rem.values()):
        return None
    q = Polynomial(F, n, quot)
    assert q * ell == f
    return q


def linear_form_vector(f: Polynomial) -> np.ndarray:
    if f.degree != 1 or not f.is_homogeneous():
        raise ValueError("not a linear form")
    return f.to_vector(1)[::-1].copy()  # degree-1 basis is x_n, ..., x_1


def linear_form(field: GF, coeffs) -> Polynomial:
    return Polynomial.linear(field, list(np.asarray(coeffs, dtype=np.int64)))


def orbit(group, f: Polynomial) -> list[Polynomial]:
    """Distinct images ``act(g, f)`` in canonical group order."""
    seen: dict[Polynomial, None] = {}
    F = group.field
    if f.is_homogeneous() and f.degree == 1:
        c = linear_form_vector(f)
        imgs = F.matmul(c[None, None, :], group.inverse_stack)[:, 0, :]
        for row in imgs:
            seen.setdefault(linear_form(F, row), None)
        return list(seen)
    for g in group.elements:
        seen.setdefault(act(g, f), None)
    return list(seen)


def orbit_product(group, x: Polynomial) -> Polynomial:
    """Product of the distinct images of ``x`` under the group.

    One factor per coset of the stabiliser of ``x``; the degree equals the
    orbit length times ``deg x``.
    """
    result = Polynomial.constant(x.field, x.n, 1)
    imgs = orbit(group, x)
    if x.degree == 1:
        F, n = x.field, x.n
        vec = np.ones(1, dtype=np.int64)
        for i, img in enumerate(imgs):
            vec = mul_linear(F, n, i, vec, linear_form_vector(img))
        return Polynomial.from_vector(F, n, len(imgs), vec)
    for img in imgs:
        result = result * img
    return result


def ideal_graded_piece(gens: Sequence[Polynomial], d: int, field: GF | None = None, n: int | None = None) -> Subspace:
    """Degree-``d`` part of the ideal generated by homogeneous ``gens``."""
    if gens:
        field, n = gens[0].field, gens[0].n
    rows = []
    for g in gens:
        if g.is_zero():
            continue
        if not g.is_homogeneous():
            raise ValueError("ideal generators must be homogeneous")
        e = g.degree
        if e > d:
            continue
        idx = mul_index(n, d - e, e)
        block = np.zeros((count(n, d - e), count(n, d)), dtype=np.int64)
        gv = g.to_vector(e)
        block[np.arange(idx.shape[0])[:, None], idx] = gv[None, :]
        rows.append(block)
    N = count(n, d)
    if not rows:
        return Subspace(field, N)
    return Subspace(field, N, np.concatenate(rows))


class Character:
    """A homomorphism from an enumerated group to the multiplicative group of its field.

    ``values[i]`` is the value on ``group.elements[i]``.
    """

    def __init__(self, group, values):
        self.group = group
        self.values = np.asarray(values, dtype=np.int64)
        if self.values.shape != (group.order,):
            raise ValueError("one value per group element required")

    @classmethod
    def trivial(cls, group) -> "Character":
        return cls(group, np.ones(group.order, dtype=np.int64))

    def __call__(self, g) -> int:
        i = g if isinstance(g, (int, np.integer)) else self.group.index(g)
        return int(self.values[i])

    def is_trivial(self) -> bool:
        return bool(np.all(self.values == 1))

    def is_valid(self) -> bool:
        """Exhaustive check of ``chi(gh) = chi(g) chi(h)`` and ``chi(1) = 1``."""
        G = self.group
        F = G.field
        if np.any(self.values == 0) or self.values[G.identity_index] != 1:
            return False
        table = G.multiplication_table()
        lhs = self.values[table]
        rhs = F.mul(self.values[:, None], self.values[None, :])
        return bool(np.array_equal(lhs, rhs))

    def __mul__(self, other: "Character") -> "Character":
        return Character(self.group, self.group.field.mul(self.values, other.values))

    def __pow__(self, k: int) -> "Character":
        return Character(self.group, self.group.field.pow(self.values, k))

    def __eq__(self, other):
        return isinstance(other, Character) and other.group is self.group and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"Character({[self.group.field.format(v) for v in self.values]})"
