"""Linear recurrence operators  L = sum_i a_i(k) sigma^i  with coefficients in Q[z][k].

Covers application to sequences, the adjoint, the degree via the
transformed coefficients b_l(k), the degeneracy set, detection of the
reflection center gamma, and the telescoping certificate attached to an
adjoint image.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .errors import (
    AmbiguousGamma,
    IndexOutOfRange,
    IndicialIdenticallyZero,
    NotAnnihilated,
    NotPartible,
)
from .exact import K, KZ, NEG_INF, KPoly, ZPoly, as_rational, parse_poly, to_kpoly, zpoly_gcd


@dataclass(frozen=True)
class ShiftOp:
    coeffs: tuple[KPoly, ...]
    epsilon: int | None = None

    def __post_init__(self):
        coeffs = tuple(to_kpoly(a) for a in self.coeffs)
        if not coeffs or not coeffs[-1]:
            raise ValueError("leading coefficient a_J must be nonzero")
        if self.epsilon not in (None, 1, -1):
            raise ValueError("epsilon must be +1, -1 or None")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def a(self, i: int) -> KPoly:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else KPoly()

    @property
    def is_symbolic(self) -> bool:
        return any(c.z_degree > 0 for c in self.coeffs)

    def specialize(self, z0) -> "ShiftOp":
        return ShiftOp(tuple(c.specialize(z0) for c in self.coeffs), self.epsilon)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [c.render() for c in self.coeffs],
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_json(cls, data) -> "ShiftOp":
        if isinstance(data, str):
            data = json.loads(data)
        coeffs = tuple(parse_poly(s) for s in data["coeffs"])
        op = cls(coeffs, data.get("epsilon"))
        if "order" in data and data["order"] != op.order:
            raise ValueError(f"declared order {data['order']} but {op.order + 1} coefficients given")
        return op

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                s = "" if i == 0 else ("S" if i == 1 else f"S^{i}")
                terms.append(f"({c})" + (f"*{s}" if s else ""))
        return " + ".join(reversed(terms))


def schroder_operator(epsilon: int, z=None) -> ShiftOp:
    """(k+3) S^2 - eps (2k+3)(1+2z) S + k, annihilating eps^k S_k(z) and eps^k s_k(z).

    ``z=None`` keeps the parameter symbolic.
    """
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    w = 1 + 2 * KZ
    op = ShiftOp((K, -epsilon * (2 * K + 3) * w, K + 3), epsilon)
    return op if z is None else op.specialize(z)


def schroder_eta(epsilon: int) -> ZPoly:
    """eta = (1 - eps (1 + 2z)) / 2 as a polynomial in z."""
    return (1 - epsilon * (1 + 2 * ZPoly.gen())) / 2


def _coefficient_at(a: KPoly, n: int, z=None):
    v = a(n)
    if z is not None:
        return v(z)
    return v


def _scalarize(v):
    if isinstance(v, ZPoly) and v.is_constant():
        c = v.coeff(0)
        return c.numerator if c.denominator == 1 else c
    return v


def op_apply(L: ShiftOp, F: Sequence, n: int, z=None):
    """sum_i a_i(n) F(n + i).

    ``F`` holds exact values (ints, Fractions or ZPolys); ``z`` specializes a
    symbolic operator on the fly.
    """
    if n < 0 or n + L.order >= len(F):
        raise IndexOutOfRange(f"need F on [{n}, {n + L.order}], have {len(F)} terms")
    total = ZPoly()
    for i, a in enumerate(L.coeffs):
        if a:
            total = total + _coefficient_at(a, n, z) * F[n + i]
    return _scalarize(total)


def op_adjoint_apply(L: ShiftOp, x) -> KPoly:
    """L*(x)(k) = sum_i a_i(k - i) x(k - i)."""
    x = to_kpoly(x)
    out = KPoly()
    for i, a in enumerate(L.coeffs):
        out = out + (a * x).shift(-i)
    return out


def transformed_coefficients(L: ShiftOp) -> list[KPoly]:
    J = L.order
    b = []
    for ell in range(J + 1):
        acc = KPoly()
        for j in range(ell, J + 1):
            acc = acc + comb(j, ell) * L.a(J - j).shift(j - J)
        b.append(acc)
    return b


def op_degree(L: ShiftOp):
    """Return (d, [b_0, ..., b_J]) where d = max_l (deg b_l - l)."""
    b = transformed_coefficients(L)
    d = max(bl.degree - ell for ell, bl in enumerate(b))
    if d == NEG_INF:
        raise ValueError("all transformed coefficients vanish")
    return int(d), b


def indicial_polynomial(L: ShiftOp) -> KPoly:
    """sum_l [k^(d+l)] b_l * s(s-1)...(s-l+1), returned as a KPoly in which k plays s."""
    d, b = op_degree(L)
    out = KPoly()
    for ell, bl in enumerate(b):
        c = bl.coeff(d + ell) if d + ell >= 0 else ZPoly()
        if not c:
            continue
        falling = KPoly((1,))
        for t in range(ell):
            falling = falling * (K - t)
        out = out + c * falling
    return out


def _nonneg_integer_roots(P: KPoly) -> set[int]:
    # a root must kill every z-coefficient simultaneously
    zdeg = P.z_degree
    g = ZPoly()
    for b in range(int(zdeg) + 1):
        g = zpoly_gcd(g, ZPoly([c.coeff(b) for c in P.coeffs]))
    if not g:
        raise IndicialIdenticallyZero("indicial polynomial vanishes identically")
    return {int(r) for r in g.rational_roots() if r.denominator == 1 and r >= 0}


def op_degenerate_roots(L: ShiftOp, z=None) -> set[int]:
    """Nonnegative integer roots of the indicial polynomial (empty iff nondegenerate).

    For a symbolic operator the answer is generic in z.  Passing ``z``
    evaluates that generic indicial polynomial at a specific value; if it
    collapses to zero there the generic degree is not attained, which is
    reported as IndicialIdenticallyZero.  Specialize the operator first to
    analyse it in its own right.
    """
    P = indicial_polynomial(L)
    if z is not None:
        P = P.specialize(z)
        if not P:
            raise IndicialIdenticallyZero(
                f"generic indicial polynomial {indicial_polynomial(L)} vanishes at z = {z}"
            )
    return _nonneg_integer_roots(P)


@dataclass(frozen=True)
class PartibleInfo:
    gamma: Fraction
    degree: int
    nondegenerate: bool


def _gamma_condition_coefficients(A: KPoly, B: KPoly, sign: int, J: int):
    """Coefficients (in k and z) of A(g+k) - sign*B(g-k-J) as polynomials in g."""
    G = ZPoly.gen()
    conds = {}
    for j, Aj in enumerate(A.coeffs):
        for t in range(j + 1):
            gp = comb(j, t) * G ** (j - t)
            for bz, c in enumerate(Aj.coeffs):
                if c:
                    conds[(t, bz)] = conds.get((t, bz), ZPoly()) + c * gp
    shifted = G - J
    for j, Bj in enumerate(B.coeffs):
        for t in range(j + 1):
            gp = comb(j, t) * (-1) ** t * shifted ** (j - t)
            for bz, c in enumerate(Bj.coeffs):
                if c:
                    conds[(t, bz)] = conds.get((t, bz), ZPoly()) - sign * c * gp
    return [p for p in conds.values() if p]


def partible_condition_holds(L: ShiftOp, gamma, d: int) -> bool:
    J = L.order
    sign = (-1) ** d
    return all(
        L.a(i).shift(gamma) == sign * L.a(J - i).reflect(as_rational(gamma) - J)
        for i in range(J // 2 + 1)
    )


def op_find_gamma(L: ShiftOp) -> PartibleInfo:
    """Locate the rational center gamma making L power-partible."""
    d, _ = op_degree(L)
    roots = op_degenerate_roots(L)
    if roots:
        raise NotPartible(f"operator is degenerate, R_L = {sorted(roots)}", reason="degenerate")
    J = L.order
    sign = (-1) ** d
    conds = []
    for i in range(J // 2 + 1):
        conds.extend(_gamma_condition_coefficients(L.a(i), L.a(J - i), sign, J))
    if not conds:
        raise AmbiguousGamma("symmetry conditions hold for every gamma")
    g = ZPoly()
    for c in conds:
        g = zpoly_gcd(g, c)
    if g.degree < 1:
        raise NotPartible("symmetry conditions are inconsistent", reason="no-gamma")
    candidates = g.rational_roots()
    if not candidates:
        raise NotPartible(f"symmetry conditions have no rational solution ({g} = 0)", reason="irrational")
    if len(candidates) > 1:
        raise AmbiguousGamma(f"several centers satisfy the conditions: {candidates}")
    gamma = candidates[0]
    if not partible_condition_holds(L, gamma, d):
        raise AssertionError(f"gamma = {gamma} from the condition gcd does not verify")
    return PartibleInfo(gamma, d, True)


@dataclass(frozen=True)
class TelescopeCertificate:
    x: KPoly
    u: tuple[KPoly, ...]

    def to_json(self) -> dict:
        return {"x": self.x.render(), "u": [ui.render() for ui in self.u]}

    @classmethod
    def from_json(cls, data) -> "TelescopeCertificate":
        return cls(parse_poly(data["x"]), tuple(parse_poly(s) for s in data["u"]))


def op_telescope(L: ShiftOp, x) -> TelescopeCertificate:
    """u_i(k) = sum_{j=1}^{J-i} a_{i+j}(k-j) x(k-j), i = 0..J-1."""
    x = to_kpoly(x)
    J = L.order
    u = []
    for i in range(J):
        acc = KPoly()
        for j in range(1, J - i + 1):
            acc = acc + (L.a(i + j) * x).shift(-j)
        u.append(acc)
    return TelescopeCertificate(x, tuple(u))


def verify_telescope(cert: TelescopeCertificate, L: ShiftOp, F: Sequence, N: int, z=None) -> bool:
    """Check the closed partial sums of L*(x) F for every n <= N exactly."""
    J = L.order
    if len(F) < N + J:
        raise IndexOutOfRange(f"need {N + J} terms of F, have {len(F)}")
    for k in range(N):
        if op_apply(L, F, k, z) != 0:
            raise NotAnnihilated(f"L(F)({k}) != 0", k)
    lstar = op_adjoint_apply(L, cert.x)

    def at(poly, n):
        return _coefficient_at(poly, n, z)

    start = sum((at(cert.u[i], 0) * F[i] for i in range(J)), ZPoly())
    running = ZPoly()
    for n in range(N + 1):
        end = sum((at(cert.u[i], n) * F[n + i] for i in range(J)), ZPoly())
        if running != start - end:
            return False
        if n < N:
            running = running + at(lstar, n) * F[n]
    return True
