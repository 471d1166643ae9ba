"""Exact arithmetic in Q[z][k] plus prime-field residues.

Two dense univariate polynomial types are stacked: ``ZPoly`` has rational
coefficients in the parameter ``z`` and ``KPoly`` has ``ZPoly`` coefficients
in the recurrence index ``k``.  Both are immutable and always canonical
(no trailing zero coefficients), so structural equality is polynomial
equality.

Rationals are :class:`fractions.Fraction`; ``Rational`` is an alias kept for
readability at call sites.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

from .errors import DenominatorDividesModulus, NotPrime, ParseError

Rational = Fraction
NEG_INF = float("-inf")

Scalar = Union[int, Fraction]


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"refusing inexact or boolean scalar {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_rational(q) -> str:
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class _DensePoly:
    """Shared machinery for the two polynomial levels."""

    __slots__ = ("coeffs",)
    var = "x"

    def __init__(self, coeffs=()):
        if not isinstance(coeffs, (tuple, list)):
            coeffs = (coeffs,)
        c = [self._coerce(a) for a in coeffs]
        while c and not c[-1]:
            c.pop()
        self.coeffs = tuple(c)

    # subclasses supply these three
    @classmethod
    def _coerce(cls, a):
        raise NotImplementedError

    @classmethod
    def _lift(cls, other):
        raise NotImplementedError

    @classmethod
    def _czero(cls):
        raise NotImplementedError

    @classmethod
    def gen(cls):
        return cls((0, 1))

    @classmethod
    def const(cls, c):
        return cls((c,))

    def __setattr__(self, name, value):
        if hasattr(self, "coeffs"):
            raise AttributeError(f"{type(self).__name__} is immutable")
        object.__setattr__(self, name, value)

    def __reduce__(self):
        return (type(self), (self.coeffs,))

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else self._czero()

    def coeff(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self._czero()

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((type(self).__name__, self.coeffs))

    def __neg__(self):
        return type(self)([-a for a in self.coeffs])

    def __pos__(self):
        return self

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return type(self)(out)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return type(self)()
        if len(b) == 1:
            c = b[0]
            return type(self)([x * c for x in a])
        if len(a) == 1:
            c = a[0]
            return type(self)([c * y for y in b])
        out = [self._czero()] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return type(self)(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("polynomial exponent must be a nonnegative integer")
        result = type(self).const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a scalar or another polynomial."""
        acc = self._czero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, g):
        acc = type(self)()
        for c in reversed(self.coeffs):
            acc = acc * g + c
        return acc

    def __repr__(self):
        return f"{type(self).__name__}({self.render()!r})"

    def __str__(self):
        return self.render()


class ZPoly(_DensePoly):
    """Polynomial in ``z`` over Q (also used as a plain univariate Q-polynomial)."""

    __slots__ = ()
    var = "z"

    @classmethod
    def _coerce(cls, a):
        return as_rational(a)

    @classmethod
    def _lift(cls, other):
        if isinstance(other, ZPoly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return cls((other,))
        return None

    @classmethod
    def _czero(cls):
        return Fraction(0)

    def __truediv__(self, other):
        # only division by a nonzero scalar; polynomial division is divmod()
        if isinstance(other, (int, Fraction)):
            c = as_rational(other)
            return ZPoly([a / c for a in self.coeffs])
        if isinstance(other, ZPoly) and other.is_constant() and other:
            return self / other.coeffs[0]
        return NotImplemented

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.coeff(0)

    def __divmod__(self, other):
        other = self._lift(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dl = other.lead
        dd = len(other.coeffs) - 1
        quot = [Fraction(0)] * max(len(rem) - dd, 0)
        for i in range(len(rem) - 1, dd - 1, -1):
            c = rem[i] / dl
            if not c:
                continue
            quot[i - dd] = c
            for j, b in enumerate(other.coeffs):
                rem[i - dd + j] -= c * b
        return ZPoly(quot), ZPoly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "ZPoly":
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def monic(self) -> "ZPoly":
        if not self:
            return self
        return self / self.lead

    def denominators_lcm(self) -> int:
        return math.lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1

    def integer_coeffs(self) -> list[int]:
        """Primitive integer coefficient list of a nonzero scalar multiple."""
        m = self.denominators_lcm()
        ints = [int(c * m) for c in self.coeffs]
        g = math.gcd(*ints) if ints else 1
        return [x // g for x in ints] if g else ints

    def rational_roots(self) -> list[Fraction]:
        """All distinct rational roots, sorted."""
        if not self:
            raise ValueError("the zero polynomial has every number as a root")
        ints = self.integer_coeffs()
        roots = set()
        while ints and ints[0] == 0:
            roots.add(Fraction(0))
            ints = ints[1:]
        if len(ints) <= 1:
            return sorted(roots)
        reduced = ZPoly(ints)
        for num in _divisors(abs(ints[0])):
            for den in _divisors(abs(ints[-1])):
                for cand in (Fraction(num, den), Fraction(-num, den)):
                    if cand not in roots and not reduced(cand):
                        roots.add(cand)
        return sorted(roots)

    def render(self, var: str | None = None, spaced: bool = True) -> str:
        var = var or self.var
        if not self.coeffs:
            return "0"
        parts = []
        for e in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[e]
            if not c:
                continue
            parts.append((c < 0, _monomial(abs(c), var, e)))
        return _join_terms(parts, spaced)


def zpoly_gcd(a: ZPoly, b: ZPoly) -> ZPoly:
    """Monic gcd over Q (zero if both inputs are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


def _divisors(n: int) -> list[int]:
    if n == 0:
        return [1]
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _monomial(c: Fraction, var: str, e: int) -> str:
    if e == 0:
        return format_rational(c)
    mono = var if e == 1 else f"{var}^{e}"
    if c == 1:
        return mono
    return f"{format_rational(c)}*{mono}"


def _join_terms(parts, spaced: bool) -> str:
    out = []
    for idx, (neg, text) in enumerate(parts):
        if idx == 0:
            out.append(("-" if neg else "") + text)
        elif spaced:
            out.append((" - " if neg else " + ") + text)
        else:
            out.append(("-" if neg else "+") + text)
    return "".join(out)


Z = ZPoly.gen()


class KPoly(_DensePoly):
    """Polynomial in ``k`` whose coefficients are ``ZPoly``."""

    __slots__ = ()
    var = "k"

    @classmethod
    def _coerce(cls, a):
        if isinstance(a, ZPoly):
            return a
        if isinstance(a, KPoly):
            raise TypeError("KPoly coefficients must be ZPoly or scalars")
        return ZPoly((a,))

    @classmethod
    def _lift(cls, other):
        if isinstance(other, KPoly):
            return other
        if isinstance(other, ZPoly) or (
            isinstance(other, (int, Fraction)) and not isinstance(other, bool)
        ):
            return cls((other,))
        return None

    @classmethod
    def _czero(cls):
        return ZPoly()

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) or (isinstance(other, ZPoly) and other.is_constant() and other):
            return KPoly([a / other for a in self.coeffs])
        return NotImplemented

    @property
    def z_degree(self):
        return max((c.degree for c in self.coeffs), default=NEG_INF)

    def __call__(self, k0, z0=None):
        """Evaluate at ``k = k0``; additionally at ``z = z0`` when given."""
        acc = ZPoly()
        for c in reversed(self.coeffs):
            acc = acc * k0 + c
        if isinstance(acc, KPoly):
            return acc if z0 is None else acc.specialize(z0)
        if z0 is None:
            return acc
        return acc(z0)

    def specialize(self, z0) -> "KPoly":
        """Substitute a number (or a ZPoly) for ``z`` in every coefficient."""
        return KPoly([ZPoly((c(z0),)) if not isinstance(z0, ZPoly) else c.compose(z0) for c in self.coeffs])

    def shift(self, c) -> "KPoly":
        """Return f(k + c)."""
        return self.compose(KPoly((as_rational(c), 1)))

    def reflect(self, c) -> "KPoly":
        """Return f(c - k)."""
        return self.compose(KPoly((as_rational(c), -1)))

    def render(self, spaced: bool = True) -> str:
        if not self.coeffs:
            return "0"
        if len(self.coeffs) == 1:
            return self.coeffs[0].render(spaced=spaced)
        parts = []
        for e in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[e]
            if not c:
                continue
            kmono = "" if e == 0 else ("k" if e == 1 else f"k^{e}")
            nz = [i for i, a in enumerate(c.coeffs) if a]
            if len(nz) == 1:
                a = c.coeffs[nz[0]]
                m = _monomial(abs(a), "z", nz[0])
                if not kmono:
                    text = m
                elif m == "1":
                    text = kmono
                else:
                    text = f"{m}*{kmono}"
                parts.append((a < 0, text))
            else:
                inner = c.render(spaced=False)
                text = f"({inner})" + (f"*{kmono}" if kmono else "")
                parts.append((False, text))
        return _join_terms(parts, spaced)


K = KPoly.gen()
KZ = KPoly((Z,))


def to_kpoly(x) -> KPoly:
    if isinstance(x, KPoly):
        return x
    return KPoly((x,))


def poly_shift_k(f: KPoly, c) -> KPoly:
    return to_kpoly(f).shift(c)


def poly_reflect_k(f: KPoly, c) -> KPoly:
    return to_kpoly(f).reflect(c)


# ---------------------------------------------------------------- primes, residues

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for every n < 3.3e24."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def odd_primes_below(n: int) -> list[int]:
    return [p for p in range(3, n) if is_prime(p)]


def check_odd_prime(p: int) -> int:
    if not isinstance(p, int) or p < 3 or not is_prime(p) or p >= 2**64:
        raise NotPrime(f"{p!r} is not an odd prime below 2^64")
    return p


def rational_mod(q, p: int) -> int:
    q = as_rational(q)
    if q.denominator % p == 0:
        raise DenominatorDividesModulus(f"denominator of {format_rational(q)} is divisible by {p}")
    return q.numerator * pow(q.denominator, -1, p) % p


@dataclass(frozen=True)
class ModInt:
    """Residue modulo an odd prime."""

    residue: int
    modulus: int

    def __post_init__(self):
        check_odd_prime(self.modulus)
        object.__setattr__(self, "residue", self.residue % self.modulus)

    @classmethod
    def of(cls, value, p: int) -> "ModInt":
        return cls(rational_mod(value, p), p)

    def _other(self, other) -> int:
        if isinstance(other, ModInt):
            if other.modulus != self.modulus:
                raise ValueError("moduli differ")
            return other.residue
        return rational_mod(other, self.modulus)

    def __add__(self, other):
        return ModInt(self.residue + self._other(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return ModInt(self.residue - self._other(other), self.modulus)

    def __rsub__(self, other):
        return ModInt(self._other(other) - self.residue, self.modulus)

    def __mul__(self, other):
        return ModInt(self.residue * self._other(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return ModInt(-self.residue, self.modulus)

    def __pow__(self, e: int):
        return ModInt(pow(self.residue, e, self.modulus), self.modulus)

    def inverse(self) -> "ModInt":
        if self.residue == 0:
            raise ZeroDivisionError(f"0 is not invertible mod {self.modulus}")
        return ModInt(pow(self.residue, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        return self * ModInt(self._other(other), self.modulus).inverse()

    def __eq__(self, other):
        if isinstance(other, ModInt):
            return (self.residue, self.modulus) == (other.residue, other.modulus)
        if isinstance(other, (int, Fraction)):
            try:
                return self.residue == rational_mod(other, self.modulus)
            except DenominatorDividesModulus:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.modulus))

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"ModInt({self.residue} mod {self.modulus})"


def poly_eval_mod(f, k0: int, z0: int, p: int) -> ModInt:
    """f(k0, z0) mod p for a KPoly or ZPoly with p-integral coefficients."""
    check_odd_prime(p)
    f = to_kpoly(f)
    acc = 0
    for c in reversed(f.coeffs):
        cz = 0
        for a in reversed(c.coeffs):
            cz = (cz * z0 + rational_mod(a, p)) % p
        acc = (acc * k0 + cz) % p
    return ModInt(acc, p)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r} at {pos} in {text!r}")
        num, ident, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif ident is not None:
            out.append(("id", ident))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, env: Mapping[str, object]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.env = env

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError(f"unexpected end of input in {self.text!r}")
        if op is not None and tok != ("op", op):
            raise ParseError(f"expected {op!r}, found {tok[1]!r} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> KPoly:
        if not self.toks:
            raise ParseError("empty polynomial expression")
        val = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                val = val * rhs
            else:
                if rhs.degree > 0 or rhs.z_degree > 0 or not rhs:
                    raise ParseError(f"can only divide by a nonzero constant in {self.text!r}")
                val = val / rhs.coeffs[0].coeffs[0]
        return val

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError(f"exponent must be a nonnegative integer literal in {self.text!r}")
            return base ** val
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return KPoly((val,))
        if kind == "id":
            if val in self.env:
                return to_kpoly(self.env[val])
            raise ParseError(f"unknown variable {val!r} in {self.text!r}")
        if val == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError(f"unexpected {val!r} in {self.text!r}")


def parse_poly(text: str, env: Mapping[str, object] | None = None) -> KPoly:
    """Parse the canonical rendering grammar into a KPoly.

    Variables ``k`` and ``z`` are always known; ``env`` may bind extra names
    (e.g. ``eta``) to polynomials that are substituted while parsing.
    """
    names = {"k": K, "z": KZ}
    if env:
        names.update(env)
    return _Parser(str(text), names).parse()


def parse_zpoly(text: str, env: Mapping[str, object] | None = None) -> ZPoly:
    f = parse_poly(text, env)
    if f.degree > 0:
        raise ParseError(f"{text!r} depends on k")
    return f.coeff(0)
