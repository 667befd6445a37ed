"""Exact arithmetic over a prime field: scalars, monomials, term orders, polynomials.

Monomials are exponent tuples.  Polynomials are sparse maps ``monomial -> coefficient``
with coefficients stored as integers in ``[0, p)``.  The raw dict helpers
(``padd``, ``pmul``, ...) are what the Groebner engine uses; :class:`Polynomial`
is the immutable user-facing wrapper.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Sequence

DEFAULT_PRIME = 32003

# exponents are packed into integer sort keys with this radix
_EXP_RADIX = 1 << 12


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@total_ordering
@dataclass(frozen=True)
class FieldScalar:
    """An element of F_p."""

    value: int
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _check(self, other):
        if isinstance(other, int):
            return FieldScalar(other, self.p)
        if other.p != self.p:
            raise ValueError("field characteristic mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldScalar(self.value + other.value, self.p)

    __radd__ = __add__

    def __neg__(self):
        return FieldScalar(-self.value, self.p)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        return FieldScalar(self.value * other.value, self.p)

    __rmul__ = __mul__

    def inverse(self) -> "FieldScalar":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return FieldScalar(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __lt__(self, other):
        return self.value < self._check(other).value

    def __int__(self):
        return self.value


# ---------------------------------------------------------------- monomials

def mono_mul(a: tuple, b: tuple) -> tuple:
    return tuple([x + y for x, y in zip(a, b)])


def mono_div(a: tuple, b: tuple) -> tuple:
    """a / b, assuming b divides a."""
    return tuple([x - y for x, y in zip(a, b)])


def mono_divides(b: tuple, a: tuple) -> bool:
    for x, y in zip(b, a):
        if x > y:
            return False
    return True


def mono_lcm(a: tuple, b: tuple) -> tuple:
    return tuple([x if x > y else y for x, y in zip(a, b)])


def mono_degree(a: tuple, weights: Sequence[int]) -> int:
    return sum(e * w for e, w in zip(a, weights))


def monomials_of_degree(d: int, weights: Sequence[int]) -> list[tuple]:
    """All exponent vectors of weighted degree ``d``."""
    n = len(weights)
    out: list[tuple] = []

    def rec(i, rest, acc):
        if i == n - 1:
            if rest % weights[i] == 0:
                out.append(tuple(acc + [rest // weights[i]]))
            return
        for e in range(rest // weights[i] + 1):
            rec(i + 1, rest - e * weights[i], acc + [e])

    if d < 0:
        return out
    if n == 0:
        return [()] if d == 0 else []
    rec(0, d, [])
    return out


class TermOrder:
    """Graded monomial order with positive integer weights.

    ``key(m)`` packs a monomial into an int so that larger keys mean larger
    monomials; keys are memoised.
    """

    KINDS = ("grevlex", "glex")

    def __init__(self, nvars: int, kind: str = "grevlex", weights: Sequence[int] | None = None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown term order {kind!r}")
        weights = tuple(weights) if weights is not None else (1,) * nvars
        if len(weights) != nvars:
            raise ValueError("weight vector length must equal the number of variables")
        if any(w <= 0 for w in weights):
            raise ValueError("grading weights must be positive")
        self.nvars = nvars
        self.kind = kind
        self.weights = weights
        self._keys: dict[tuple, int] = {}

    def degree(self, m: tuple) -> int:
        return mono_degree(m, self.weights)

    def key(self, m: tuple) -> int:
        k = self._keys.get(m)
        if k is not None:
            return k
        k = self.degree(m)
        if self.kind == "grevlex":
            for e in reversed(m):
                k = k * _EXP_RADIX + (_EXP_RADIX - 1 - e)
        else:
            for e in m:
                k = k * _EXP_RADIX + e
        if any(e >= _EXP_RADIX for e in m):
            raise OverflowError("exponent too large for packed term order")
        self._keys[m] = k
        return k

    def compare(self, u: tuple, w: tuple) -> int:
        if len(u) != len(w):
            raise ValueError("variable count mismatch")
        a, b = self.key(u), self.key(w)
        return (a > b) - (a < b)

    def describe(self) -> dict:
        return {"kind": self.kind, "weights": list(self.weights)}

    def __eq__(self, other):
        return isinstance(other, TermOrder) and (self.nvars, self.kind, self.weights) == (
            other.nvars, other.kind, other.weights)

    def __hash__(self):
        return hash((self.nvars, self.kind, self.weights))


# ------------------------------------------------------- raw dict polynomials

def padd(a: dict, b: dict, p: int, scale: int = 1) -> dict:
    """a + scale*b."""
    out = dict(a)
    for m, c in b.items():
        v = (out.get(m, 0) + scale * c) % p
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def pscale(a: dict, c: int, p: int) -> dict:
    c %= p
    if not c:
        return {}
    return {m: (v * c) % p for m, v in a.items()}


def pmul_term(a: dict, mono: tuple, c: int, p: int) -> dict:
    return {mono_mul(m, mono): (v * c) % p for m, v in a.items()}


def pmul(a: dict, b: dict, p: int) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = mono_mul(m1, m2)
            v = (out.get(m, 0) + c1 * c2) % p
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def pdegree(a: dict, weights) -> int | None:
    """Weighted degree of a homogeneous polynomial (None for zero)."""
    degs = {mono_degree(m, weights) for m in a}
    if not degs:
        return None
    if len(degs) > 1:
        raise ValueError("polynomial is not homogeneous")
    return degs.pop()


class PolynomialRing:
    """The ambient ring S = F_p[x_1..x_v] with a grading and a term order."""

    def __init__(self, names: Sequence[str], weights: Sequence[int] | None = None,
                 p: int = DEFAULT_PRIME, order: str = "grevlex"):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = tuple(names)
        self.nvars = len(self.names)
        self.p = p
        self.order = TermOrder(self.nvars, order, weights)
        self.weights = self.order.weights

    def __eq__(self, other):
        return isinstance(other, PolynomialRing) and (self.names, self.p, self.order) == (
            other.names, other.p, other.order)

    def __hash__(self):
        return hash((self.names, self.p, self.order))

    def one_mono(self) -> tuple:
        return (0,) * self.nvars

    def var(self, i: int | str) -> "Polynomial":
        if isinstance(i, str):
            i = self.names.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self) -> list["Polynomial"]:
        return [self.var(i) for i in range(self.nvars)]

    def const(self, c: int) -> "Polynomial":
        c %= self.p
        return Polynomial(self, {self.one_mono(): c} if c else {})

    def __call__(self, text: str) -> "Polynomial":
        from .dsl import parse_polynomial
        return Polynomial(self, parse_polynomial(text, self))

    def sorted_terms(self, a: dict) -> list[tuple[tuple, int]]:
        key = self.order.key
        return sorted(a.items(), key=lambda t: key(t[0]), reverse=True)

    def format(self, a: dict) -> str:
        return format_poly(a, self.names, self.p, self.order.key)


def _signed(c: int, p: int) -> int:
    return c - p if c > p // 2 else c


def format_mono(m: tuple, names) -> str:
    parts = []
    for n, e in zip(names, m):
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def format_poly(a: dict, names, p: int, key) -> str:
    if not a:
        return "0"
    out = []
    for m, c in sorted(a.items(), key=lambda t: key(t[0]), reverse=True):
        c = _signed(c, p)
        sign = "-" if c < 0 else "+"
        c = abs(c)
        ms = format_mono(m, names)
        if not ms:
            body = str(c)
        elif c == 1:
            body = ms
        else:
            body = f"{c}*{ms}"
        out.append((sign, body))
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


class Polynomial:
    """Immutable polynomial in canonical form (no zero coefficients)."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: PolynomialRing, terms: dict | None = None):
        self.ring = ring
        p = ring.p
        clean = {}
        for m, c in (terms or {}).items():
            if len(m) != ring.nvars:
                raise ValueError("variable count mismatch")
            c %= p
            if c:
                clean[m] = c
        self._terms = clean
        self._hash = None

    @property
    def terms(self) -> list[tuple[tuple, int]]:
        """Terms sorted descending in the term order."""
        return self.ring.sorted_terms(self._terms)

    def as_dict(self) -> dict:
        return dict(self._terms)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring.nvars != self.ring.nvars:
                raise ValueError("variable count mismatch")
            if other.ring != self.ring:
                raise ValueError("polynomials live in different rings")
            return other
        if isinstance(other, (int, FieldScalar)):
            return self.ring.const(int(other))
        return NotImplemented

    def is_zero(self) -> bool:
        return not self._terms

    def lead(self) -> tuple[tuple, int]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0]

    def degree(self) -> int:
        return max(mono_degree(m, self.ring.weights) for m in self._terms)

    def is_homogeneous(self) -> bool:
        return len({mono_degree(m, self.ring.weights) for m in self._terms}) <= 1

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ring, padd(self._terms, other._terms, self.ring.p))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, pscale(self._terms, -1, self.ring.p))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ring, padd(self._terms, other._terms, self.ring.p, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ring, pmul(self._terms, other._terms, self.ring.p))

    __rmul__ = __mul__

    def scale(self, c: int) -> "Polynomial":
        return Polynomial(self.ring, pscale(self._terms, int(c), self.ring.p))

    def __pow__(self, e: int):
        out = self.ring.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self):
        return self.ring.format(self._terms)

    def __repr__(self):
        return f"Polynomial({self})"


def poly_arith(a: Polynomial, b: Polynomial | int, op: str) -> Polynomial:
    """Dispatch ``add``/``mul``/``scale``; ``scale`` expects an integer ``b``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(int(b))
    raise ValueError(f"unknown operation {op!r}")


def compare_monomials(u: Iterable[int], w: Iterable[int], order: TermOrder) -> int:
    return order.compare(tuple(u), tuple(w))
