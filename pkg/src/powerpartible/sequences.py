"""Large/little Schroeder and central Delannoy polynomials.

Values come either straight from the binomial sums or from the order-two
recurrence shared by both Schroeder families.  ``z`` may be an int, a
Fraction, or ``SYMBOLIC`` (the generator of Q[z]), in which case ZPolys are
returned.

Convention: s_0(z) = 0 (the sum defining s_n is empty at n = 0).  Some
references start the little Schroeder numbers at 1; the congruences checked
in this package depend on the value 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .errors import NonIntegralStep, SingularRecurrence
from .exact import KZ, K, ZPoly
from .shiftops import ShiftOp, _coefficient_at, _scalarize, schroder_operator

SYMBOLIC = ZPoly.gen()


class Family(str, enum.Enum):
    LARGE = "large"
    LITTLE = "little"
    DELANNOY = "delannoy"
    CUSTOM = "custom"


def _normalize(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


def _check_n(n):
    if n < 0:
        raise ValueError("n must be nonnegative")


def large_schroder(n: int, z=SYMBOLIC):
    _check_n(n)
    total = sum((Fraction(comb(n, k) * comb(n + k, k), k + 1) * z**k for k in range(n + 1)), Fraction(0))
    return _normalize(total)


def little_schroder(n: int, z=SYMBOLIC):
    _check_n(n)
    if n == 0:
        return ZPoly() if isinstance(z, ZPoly) else 0
    total = sum(
        (Fraction(comb(n, k) * comb(n, k - 1), n) * z ** (k - 1) * (z + 1) ** (n - k) for k in range(1, n + 1)),
        Fraction(0),
    )
    return _normalize(total)


def central_delannoy(n: int, z=SYMBOLIC):
    _check_n(n)
    return _normalize(sum((comb(n, k) * comb(n + k, k) * z**k for k in range(n + 1)), 0))


DEFINITIONS = {
    Family.LARGE: large_schroder,
    Family.LITTLE: little_schroder,
    Family.DELANNOY: central_delannoy,
}


@dataclass(frozen=True)
class SequenceSpec:
    family: Family
    z: object = SYMBOLIC
    epsilon: int = 1
    operator: ShiftOp | None = None
    initials: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.CUSTOM:
            if self.operator is None or len(self.initials) != self.operator.order:
                raise ValueError("custom sequences need an operator and exactly `order` initial values")


def _exact_quotient(num, den, integral: bool):
    if isinstance(den, ZPoly):
        if not den.is_constant():
            if not isinstance(num, ZPoly):
                num = ZPoly((num,))
            q, r = divmod(num, den)
            if r:
                raise NonIntegralStep(f"{den} does not divide {num}")
            return q
        den = den.coeff(0)
    if den == 0:
        raise SingularRecurrence("leading coefficient vanishes")
    if isinstance(num, ZPoly):
        q = num / den
        if integral and any(c.denominator != 1 for c in q.coeffs):
            raise NonIntegralStep(f"({num}) / {den} leaves Z[z]")
        return q
    q = Fraction(num) / den
    if integral:
        if q.denominator != 1:
            raise NonIntegralStep(f"{num} / {den} is not an integer")
        return q.numerator
    return _normalize(q)


def run_recurrence(L: ShiftOp, initials: Sequence, N: int, z=None, integral: bool = False) -> list:
    """Extend ``initials`` to N + 1 terms using sum_i a_i(n) F(n+i) = 0.

    With ``integral`` set, every division must stay inside Z (or Z[z]);
    a failure means the operator and the initial values do not match.
    """
    J = L.order
    if len(initials) != J:
        raise ValueError(f"need {J} initial values, got {len(initials)}")
    symbolic = any(isinstance(v, ZPoly) for v in initials)
    out = list(initials)
    n = 0
    while len(out) < N + 1:
        acc = 0
        for i in range(J):
            a = L.coeffs[i]
            if a:
                acc = acc - _coefficient_at(a, n, z) * out[n + i]
        q = _exact_quotient(acc, _coefficient_at(L.coeffs[J], n, z), integral)
        if not symbolic:
            q = _scalarize(q)
        out.append(q)
        n += 1
    return out[: N + 1]


def delannoy_operator() -> ShiftOp:
    """(k+2) S^2 - (2k+3)(1+2z) S + (k+1), annihilating D_k(z)."""
    return ShiftOp((K + 1, -(2 * K + 3) * (1 + 2 * KZ), K + 2))


def seq_by_recurrence(spec: SequenceSpec, N: int) -> list:
    """First N + 1 terms, unweighted: consumers apply eps^k themselves."""
    if spec.family is Family.CUSTOM:
        return run_recurrence(spec.operator, list(spec.initials), N)
    z = spec.z
    if spec.family is Family.DELANNOY:
        L = delannoy_operator()
        initials = [central_delannoy(0, z), central_delannoy(1, z)]
    else:
        L = schroder_operator(1)
        fn = DEFINITIONS[spec.family]
        initials = [fn(0, z), fn(1, z)]
    if isinstance(z, ZPoly):
        if z != SYMBOLIC:
            L = ShiftOp(tuple(c.specialize(z) for c in L.coeffs))
        initials = [v if isinstance(v, ZPoly) else ZPoly((v,)) for v in initials]
        return run_recurrence(L, initials, N, integral=True)
    return run_recurrence(L, initials, N, z=z, integral=isinstance(z, int))


def _table_size(N: int) -> int:
    return max(64, 1 << (N).bit_length())


@lru_cache(maxsize=512)
def _cached_table(family: Family, z, size: int) -> tuple:
    return tuple(seq_by_recurrence(SequenceSpec(family, z), size))


def sequence_table(family, z, N: int) -> tuple:
    """Memoized exact terms F_0..F_N (immutable snapshot)."""
    family = Family(family)
    return _cached_table(family, z, _table_size(N))[: N + 1]


def weighted_table(family, z, epsilon: int, N: int) -> tuple:
    """eps^k F_k(z) for k = 0..N."""
    vals = sequence_table(family, z, N)
    if epsilon == 1:
        return vals
    return tuple(v if k % 2 == 0 else -v for k, v in enumerate(vals))


@dataclass
class IdentityReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_identities(N: int, z_values=(SYMBOLIC,)) -> IdentityReport:
    """(z+1) s_n = S_n and 2z(2n+1) S_n = D_{n+1} - D_{n-1} for 1 <= n <= N."""
    if N < 1:
        raise ValueError("N must be at least 1")
    report = IdentityReport()
    for z in z_values:
        S = [large_schroder(n, z) for n in range(N + 1)]
        s = [little_schroder(n, z) for n in range(N + 1)]
        D = [central_delannoy(n, z) for n in range(N + 2)]
        for n in range(1, N + 1):
            if (z + 1) * s[n] != S[n]:
                report.violations.append(("little-large", n, str(z)))
            if 2 * z * (2 * n + 1) * S[n] != D[n + 1] - D[n - 1]:
                report.violations.append(("delannoy", n, str(z)))
            report.checked += 2
    return report
