"""Finite fields GF(p^r) with vectorised arithmetic.

Elements are encoded as integers ``0 <= a < q``: the coefficient vector
``(c_0, ..., c_{r-1})`` of the residue class modulo the defining polynomial
is read as base-``p`` digits, ``a = sum c_i p^i``.  All arithmetic methods
of :class:`GF` accept python ints or numpy integer arrays and broadcast.

The defining polynomial of GF(p^r) is the lexicographically smallest monic
irreducible polynomial of degree ``r`` (coefficient tuples compared constant
term first), so a field is determined by ``(p, r)`` alone.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

MAX_ORDER = 1 << 16
_TABLE_LIMIT = 1024


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, r)`` with ``q == p**r``; raise if ``q`` is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    r, m = 0, q
    while m % p == 0:
        m //= p
        r += 1
    if m != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, r


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- dense univariate polynomials over F_p, coefficient lists constant first --

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = (a[-1] * inv_lead) % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _ptrim(a)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division of a monic polynomial by every monic polynomial of degree <= deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _pmod(poly, list(low) + [1], p):
                return False
    return True


def _polymulmod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int], p: int) -> list[int]:
    r = len(modulus) - 1
    prod = [0] * (2 * r - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, r - 1, -1):
        c = prod[k]
        if c:
            for i in range(r):
                prod[k - r + i] = (prod[k - r + i] - c * modulus[i]) % p
    return (prod + [0] * r)[:r]


class GF:
    """The finite field with ``p**r`` elements.

    Use :func:`make_field` rather than the constructor; it caches one
    instance per ``(p, r)`` so fields can be compared by identity.
    """

    def __init__(self, p: int, r: int, modulus: Sequence[int]):
        self.p = p
        self.r = r
        self.q = p**r
        self.modulus = tuple(int(c) for c in modulus)
        self.is_prime_field = r == 1
        q = self.q
        self._pw = np.array([p**i for i in range(r)], dtype=np.int64)

        # primitive element, exp/log tables
        order = q - 1
        factors = _prime_factors(order) if order > 1 else []
        if q == 2:
            gen = 1
        else:
            gen = None
            for a in range(2 if r == 1 else p, q):
                if all(self._slow_pow(a, order // f) != 1 for f in factors):
                    gen = a
                    break
        self.gen = gen
        exp = np.zeros(2 * max(order, 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        gdig = self._digits_int(gen)
        for i in range(max(order, 1)):
            exp[i] = x
            log[x] = i
            x = self._from_digit_list(_polymulmod(self._digits_int(x), gdig, self.modulus, p))
        exp[max(order, 1):] = exp[: max(order, 1)]
        self._exp = exp
        self._log = log

        idx = np.arange(q, dtype=np.int64)
        dig = self.digits(idx)
        self._neg = self.from_digits((-dig) % p)
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(order - log[1:]) % order] if q > 2 else 1
        self._inv = inv
        frob = np.zeros(q, dtype=np.int64)
        frob[1:] = exp[(log[1:] * p) % order] if q > 2 else 1
        self._frob = frob
        self._lanes = np.array([1 << (8 * i) for i in range(min(self.r, 8))], dtype=np.int64)
        if q <= _TABLE_LIMIT and not self.is_prime_field:
            self._addt = self.from_digits((dig[:, None, :] + dig[None, :, :]) % p)
            a, b = np.meshgrid(idx, idx, indexing="ij")
            self._mult = self._mul_log(a, b)
            # products with digits packed into 8-bit lanes, so sums are integer adds
            self._mult_packed = self.digits(self._mult) @ self._lanes if p > 2 and self.r <= 8 else None
        else:
            self._mult_packed = None
            self._addt = None
            self._mult = None

    # -- construction helpers --------------------------------------------

    def _digits_int(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.r)]

    def _from_digit_list(self, d: Sequence[int]) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(d))

    def _slow_pow(self, a: int, k: int) -> int:
        result = [1] + [0] * (self.r - 1)
        base = self._digits_int(a)
        while k:
            if k & 1:
                result = _polymulmod(result, base, self.modulus, self.p)
            base = _polymulmod(base, base, self.modulus, self.p)
            k >>= 1
        return self._from_digit_list(result)

    def _mul_log(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        s = np.where(nz, self._log[a] + self._log[b], 0)
        return np.where(nz, self._exp[s], 0)

    # -- representation --------------------------------------------------

    def __repr__(self) -> str:
        return f"GF({self.q})" if self.is_prime_field else f"GF({self.p}^{self.r})"

    def __reduce__(self):
        return (make_field, (self.p, self.r))

    def spec(self) -> dict:
        return {"p": self.p, "r": self.r, "modulus": list(self.modulus)}

    def digits(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._pw) % self.p

    def from_digits(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=np.int64)
        return d @ self._pw

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def element(self, a) -> "FieldElement":
        return FieldElement(self, int(a) % self.q if isinstance(a, (int, np.integer)) and self.is_prime_field else a)

    # -- arithmetic ------------------------------------------------------

    def add(self, a, b):
        if self.is_prime_field:
            return (np.asarray(a) + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self._addt is not None:
            return self._addt[a, b]
        return self.from_digits((self.digits(a) + self.digits(b)) % self.p)

    def neg(self, a):
        if self.is_prime_field:
            return (-np.asarray(a)) % self.p
        if self.p == 2:
            return np.asarray(a)
        return self._neg[a]

    def sub(self, a, b):
        if self.is_prime_field:
            return (np.asarray(a) - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.is_prime_field:
            return (np.asarray(a, dtype=np.int64) * b) % self.p
        if self._mult is not None:
            return self._mult[a, b]
        return self._mul_log(a, b)

    @property
    def supports_packed(self) -> bool:
        return getattr(self, "_mult_packed", None) is not None

    def mul_packed(self, a, b):
        """``a * b`` with digits in 8-bit lanes; up to ``255 // (p - 1)`` of these may be summed as integers."""
        return self._mult_packed[a, b]

    def unpack(self, x):
        x = np.asarray(x, dtype=np.int64)
        out = np.zeros(x.shape, dtype=np.int64)
        for i in range(self.r):
            out += ((x >> (8 * i)) & 255) % self.p * self.p**i
        return out

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self._inv[a]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        if k == 0:
            return np.ones_like(a)
        order = self.q - 1
        nz = a != 0
        if k < 0 and np.any(~nz):
            raise ZeroDivisionError("negative power of zero")
        s = np.where(nz, (self._log[a] * k) % order if order else 0, 0)
        return np.where(nz, self._exp[s], 0)

    def frobenius(self, a, times: int = 1):
        """``a -> a**(p**times)``."""
        a = np.asarray(a, dtype=np.int64)
        for _ in range(times % self.r if self.r > 1 else 0):
            a = self._frob[a]
        return a

    def conj(self, a):
        """The involution ``a -> a**sqrt(q)`` of GF(q) over its index-2 subfield."""
        if self.r % 2:
            raise FieldError(f"{self!r} has no quadratic subfield")
        return self.frobenius(a, self.r // 2)

    def sum(self, a, axis=0):
        """Field sum of ``a`` along ``axis``."""
        a = np.asarray(a, dtype=np.int64)
        if self.is_prime_field:
            return a.sum(axis=axis) % self.p
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        return self.from_digits(self.digits(a).sum(axis=axis) % self.p)

    def dot_sum(self, coeffs, arrays, axis=0):
        """``sum_i coeffs[i] * arrays[i]`` along ``axis`` (coeffs broadcast on that axis)."""
        arrays = np.asarray(arrays, dtype=np.int64)
        c = np.asarray(coeffs, dtype=np.int64)
        shape = [1] * arrays.ndim
        shape[axis] = -1
        return self.sum(self.mul(c.reshape(shape), arrays), axis=axis)

    def matmul(self, A, B):
        """Matrix product over the field, broadcasting over leading axes."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        k = A.shape[-1]
        p = self.p
        exact = k * (p - 1) ** 2 < 2**52
        if self.is_prime_field:
            if exact and A.size and B.size:
                C = np.matmul(A.astype(np.float64), B.astype(np.float64))
                return np.rint(np.fmod(C, p)).astype(np.int64)
            return np.matmul(A, B) % p
        r = self.r
        dt = np.float64 if exact else np.int64
        Ad = [np.ascontiguousarray(x, dtype=dt) for x in np.moveaxis(self.digits(A), -1, 0)]
        Bd = [np.ascontiguousarray(x, dtype=dt) for x in np.moveaxis(self.digits(B), -1, 0)]
        parts = [None] * (2 * r - 1)
        for i in range(r):
            for j in range(r):
                prod = np.matmul(Ad[i], Bd[j])
                parts[i + j] = prod if parts[i + j] is None else parts[i + j] + prod
        parts = [np.rint(np.fmod(c, p)).astype(np.int64) if exact else c % p for c in parts]
        for t in range(2 * r - 2, r - 1, -1):
            c = parts[t]
            for i in range(r):
                if self.modulus[i]:
                    parts[t - r + i] = (parts[t - r + i] - self.modulus[i] * c) % p
        return self.from_digits(np.stack(parts[:r], axis=-1))

    # -- text form -------------------------------------------------------

    def format(self, a: int) -> str:
        a = int(a)
        if self.is_prime_field:
            return str(a)
        if a == 0:
            return "0"
        return f"g^{int(self._log[a])}"

    def parse(self, text: str) -> int:
        s = text.strip()
        if s.startswith("g^"):
            k = int(s[2:])
            return int(self._exp[k % (self.q - 1)]) if self.q > 2 else 1
        if s == "g":
            return int(self.gen)
        v = int(s)
        if self.is_prime_field:
            return v % self.p
        if v == 0:
            return 0
        if v == 1:
            return 1
        raise FieldError(f"cannot parse {text!r} as an element of {self!r}")

    def random(self, rng: np.random.Generator, shape=None, nonzero: bool = False):
        lo = 1 if nonzero else 0
        return rng.integers(lo, self.q, size=shape, dtype=np.int64)

    # -- subfields -------------------------------------------------------

    def subfield_elements(self, s: int) -> np.ndarray:
        """Codes of the subfield GF(p^s) inside this field."""
        if self.r % s:
            raise FieldError(f"GF({self.p}^{s}) is not a subfield of {self!r}")
        a = self.elements()
        return a[self.frobenius(a, s) == a]

    def norm(self, a):
        """Norm to the quadratic subfield: ``a**(sqrt(q)+1)``."""
        if self.r % 2:
            raise FieldError(f"{self!r} has no quadratic subfield")
        return self.mul(a, self.conj(a))

    def trace(self, a):
        """Trace to the quadratic subfield: ``a + a**sqrt(q)``."""
        return self.add(a, self.conj(a))

    def root_of_unity(self, m: int) -> int:
        """A primitive ``m``-th root of unity; ``m`` must divide ``q - 1``."""
        if (self.q - 1) % m:
            raise FieldError(f"no primitive {m}-th root of unity in {self!r}")
        return int(self._exp[(self.q - 1) // m]) if self.q > 2 else 1

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        from math import gcd

        return (self.q - 1) // gcd(int(self._log[a]), self.q - 1) if self.q > 2 else 1

    def dlog(self, a):
        """Discrete logarithm base the primitive element (``-1`` for zero)."""
        return self._log[a]


@lru_cache(maxsize=None)
def make_field(p: int, r: int = 1) -> GF:
    """The canonical field GF(p^r)."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise FieldError(f"characteristic {p} is not prime")
    if r < 1:
        raise FieldError(f"extension degree must be >= 1, got {r}")
    if p**r > MAX_ORDER:
        raise FieldError(f"GF({p}^{r}) exceeds the supported size {MAX_ORDER}")
    if r == 1:
        return GF(p, 1, (0, 1))
    for low in product(range(p), repeat=r):
        poly = list(low) + [1]
        if is_irreducible(poly, p):
            return GF(p, r, poly)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def field_of_order(q: int) -> GF:
    return make_field(*prime_power(q))


class Embedding:
    """The inclusion GF(p^s) -> GF(p^r) sending the class of ``t`` to a fixed root.

    The root is the smallest code in the big field annihilated by the small
    field's modulus, so the map is deterministic.
    """

    def __init__(self, small: GF, big: GF):
        if small.p != big.p or big.r % small.r:
            raise FieldError(f"{small!r} does not embed in {big!r}")
        self.small = small
        self.big = big
        mod = small.modulus
        root = None
        for b in range(big.q):
            acc = 0
            for c in reversed(mod):
                acc = int(big.add(big.mul(acc, b), c))
            if acc == 0:
                root = b
                break
        assert root is not None
        self.root = root
        powers = [1]
        for _ in range(small.r - 1):
            powers.append(int(big.mul(powers[-1], root)))
        image = np.zeros(small.q, dtype=np.int64)
        dig = small.digits(small.elements())
        for i, pw in enumerate(powers):
            image = big.add(image, big.mul(dig[:, i], pw))
        self.table = image
        back = np.full(big.q, -1, dtype=np.int64)
        back[image] = small.elements()
        self._back = back

    def __call__(self, a):
        return self.table[np.asarray(a, dtype=np.int64)]

    def restrict(self, a):
        out = self._back[np.asarray(a, dtype=np.int64)]
        if np.any(out < 0):
            raise FieldError("element does not lie in the subfield")
        return out


class FieldElement:
    """An element of a :class:`GF`, with operator overloading.

    Heavy computations use raw integer codes; this wrapper is for
    user-facing code and tests.
    """

    __slots__ = ("field", "value")

    def __init__(self, field: GF, value):
        if isinstance(value, FieldElement):
            value = value.value
        if isinstance(value, str):
            value = field.parse(value)
        value = int(value)
        if not 0 <= value < field.q:
            raise FieldError(f"code {value} out of range for {field!r}")
        self.field = field
        self.value = value

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldError("elements of different fields")
            return other.value
        if isinstance(other, (int, np.integer)):
            if self.field.is_prime_field:
                return int(other) % self.field.p
            if other in (0, 1):
                return int(other)
        return NotImplemented

    def _wrap(self, v) -> "FieldElement":
        return FieldElement(self.field, int(v))

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(self.value, o))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, k: int):
        return self._wrap(self.field.pow(self.value, k))

    def inverse(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.value))

    def frobenius(self) -> "FieldElement":
        return self._wrap(self.field.frobenius(self.value))

    def conj(self) -> "FieldElement":
        return self._wrap(self.field.conj(self.value))

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.digits(self.value))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.value == o

    def __hash__(self):
        return hash((self.field.p, self.field.r, self.value))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __str__(self):
        return self.field.format(self.value)

    def __repr__(self):
        return f"{self.field!r}({self})"


def frobenius(a: FieldElement) -> FieldElement:
    return a.frobenius()


def conj(a: FieldElement) -> FieldElement:
    return a.conj()


def as_codes(field: GF, values: Iterable) -> np.ndarray:
    """Integer codes for a nested sequence of ints / FieldElements / text."""
    def conv(v):
        if isinstance(v, FieldElement):
            return v.value
        if isinstance(v, str):
            return field.parse(v)
        v = int(v)
        return v % field.p if field.is_prime_field else v

    arr = np.asarray(values, dtype=object)
    return np.vectorize(conv, otypes=[np.int64])(arr) if arr.size else arr.astype(np.int64)
