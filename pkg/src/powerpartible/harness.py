"""Modular and exact checks of the Schroeder congruences at desk scale.

Every sum is formed exactly over Z first and reduced mod p afterwards: the
recurrence's leading coefficient n + 2 vanishes mod p inside the summation
range, so running the recurrence mod p is not an option.
"""

from __future__ import annotations

import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import EtaDividesModulus, HypothesisViolated, ReductionError
from .exact import K, KPoly, ModInt, ZPoly, check_odd_prime, odd_primes_below, poly_eval_mod, rational_mod
from .reduction import ReductionCertificate, build_basis, schroder_certificate, verify_certificate
from .sequences import SYMBOLIC, Family, central_delannoy, sequence_table, weighted_table
from .shiftops import op_adjoint_apply, schroder_eta, schroder_operator

SCHRODER_FAMILIES = (Family.LARGE, Family.LITTLE)
EXPECTED = {Family.LARGE: 1, Family.LITTLE: 0}


def admissible(p: int, z: int) -> bool:
    """The standing hypothesis gcd(p, z(z+1)) = 1."""
    return gcd(p, z * (z + 1)) == 1


@dataclass(frozen=True)
class GridSpec:
    primes: tuple
    r_values: tuple
    epsilons: tuple = (-1, 1)
    z_values: tuple = tuple(range(-10, 11))

    def __post_init__(self):
        for p in self.primes:
            check_odd_prime(p)
        if any(e not in (-1, 1) for e in self.epsilons):
            raise ValueError("epsilons must be a subset of {-1, 1}")
        if any(r < 0 for r in self.r_values):
            raise ValueError("r must be nonnegative")

    @classmethod
    def desk(cls, pmax=100, rmax=4, zmin=-10, zmax=10, epsilons=(-1, 1)):
        return cls(
            tuple(odd_primes_below(pmax)),
            tuple(range(rmax + 1)),
            tuple(epsilons),
            tuple(range(zmin, zmax + 1)),
        )

    def points(self):
        for p in self.primes:
            for z in self.z_values:
                yield p, z


@dataclass(frozen=True)
class PointRecord:
    p: int
    r: int
    epsilon: int
    z: int
    family: str
    residue: int
    expected: int
    passed: bool


@dataclass
class CongruenceReport:
    records: list = field(default_factory=list)
    skipped: int = 0
    skipped_points: list = field(default_factory=list)

    @property
    def failures(self):
        return [rec for rec in self.records if not rec.passed]

    @property
    def ok(self) -> bool:
        return bool(self.records) and not self.failures

    def summary(self) -> dict:
        return {
            "checked": len(self.records),
            "passed": sum(rec.passed for rec in self.records),
            "failed": len(self.failures),
            "skipped": self.skipped,
        }

    def to_json(self) -> dict:
        return {
            "kind": "theorem1",
            "summary": self.summary(),
            "skipped_points": [list(pt) for pt in self.skipped_points],
            "records": [asdict(rec) for rec in self.records],
        }


@dataclass
class CheckReport:
    """Pass counts per named check plus the full list of failures."""

    kind: str
    passed: Counter = field(default_factory=Counter)
    failures: list = field(default_factory=list)
    skipped: int = 0

    def record(self, check: str, ok: bool, **detail):
        if ok:
            self.passed[check] += 1
        else:
            self.failures.append({"check": check, **{k: _jsonable(v) for k, v in detail.items()}})

    @property
    def ok(self) -> bool:
        return bool(self.passed) and not self.failures

    def summary(self) -> dict:
        return {
            "checked": sum(self.passed.values()) + len(self.failures),
            "passed": sum(self.passed.values()),
            "failed": len(self.failures),
            "skipped": self.skipped,
            "by_check": dict(sorted(self.passed.items())),
        }

    def to_json(self) -> dict:
        return {"kind": self.kind, "summary": self.summary(), "failures": self.failures}


def _jsonable(v):
    if isinstance(v, (ZPoly, KPoly, Fraction)):
        return str(v)
    if isinstance(v, int) and abs(v) > 2**53:
        return str(v)
    return v


# ---------------------------------------------------------------- weighted sums

def weighted_sum_exact(family, r: int, epsilon: int, z, n: int):
    """sum_{k<n} (2k+1)^(2r+1) eps^k F_k(z), exact."""
    F = weighted_table(family, z, epsilon, n)
    m = 2 * r + 1
    return sum((2 * k + 1) ** m * F[k] for k in range(n))


def weighted_sum_mod(family, r: int, epsilon: int, z: int, p: int, strict: bool = True) -> ModInt:
    check_odd_prime(p)
    if strict and not admissible(p, z):
        raise HypothesisViolated(f"gcd({p}, z(z+1)) != 1 for z = {z}")
    return ModInt(weighted_sum_exact(family, r, epsilon, z, p), p)


def _theorem1_chunk(args):
    z, primes, r_values, epsilons = args
    out = []
    pmax = max(primes)
    for eps in epsilons:
        for fam in SCHRODER_FAMILIES:
            F = weighted_table(fam, z, eps, pmax)
            for p in primes:
                if not admissible(p, z):
                    continue
                for r in r_values:
                    m = 2 * r + 1
                    res = sum((2 * k + 1) ** m * F[k] for k in range(p)) % p
                    exp = EXPECTED[fam]
                    out.append(PointRecord(p, r, eps, z, fam.value, res, exp, res == exp))
    return out


def _map(fn, tasks, jobs: int):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def verify_theorem1(grid: GridSpec, jobs: int = 1) -> CongruenceReport:
    """Large-family residues must be 1 and little-family residues 0 at every admissible point."""
    report = CongruenceReport()
    for p, z in grid.points():
        if not admissible(p, z):
            report.skipped += 1
            report.skipped_points.append((p, z))
    if not grid.primes:
        return report
    tasks = [(z, grid.primes, grid.r_values, grid.epsilons) for z in grid.z_values]
    for chunk in _map(_theorem1_chunk, tasks, jobs):
        report.records.extend(chunk)
    report.records.sort(key=lambda rec: (rec.p, rec.r, rec.epsilon, rec.z, rec.family))
    return report


# ---------------------------------------------------------------- Delannoy route (r = 0)

def delannoy_identity_holds(p: int, epsilon: int, z) -> bool:
    """2z sum_{k<p} (2k+1) eps^k S_k(z) == D_p(z) + eps D_{p-1}(z) - 1 - eps, exactly."""
    lhs = 2 * z * weighted_sum_exact(Family.LARGE, 0, epsilon, z, p)
    rhs = central_delannoy(p, z) + epsilon * central_delannoy(p - 1, z) - 1 - epsilon
    return lhs == rhs


def verify_lemma32(primes, epsilons=(-1, 1), z_values=range(-10, 11), strict: bool = False) -> CheckReport:
    report = CheckReport("lemma32")
    for p in primes:
        check_odd_prime(p)
        for z in z_values:
            Dp = sequence_table(Family.DELANNOY, z, p)
            report.record("delannoy_p", (Dp[p] - (1 + 2 * z)) % p == 0, p=p, z=z, value=Dp[p] % p)
            report.record("delannoy_p_minus_1", (Dp[p - 1] - 1) % p == 0, p=p, z=z, value=Dp[p - 1] % p)
            for eps in epsilons:
                report.record("exact_identity", delannoy_identity_holds(p, eps, z), p=p, z=z, epsilon=eps)
            if not admissible(p, z):
                if strict:
                    raise HypothesisViolated(f"gcd({p}, z(z+1)) != 1 for z = {z}")
                report.skipped += 1
                continue
            for eps in epsilons:
                for fam in SCHRODER_FAMILIES:
                    res = weighted_sum_mod(fam, 0, eps, z, p).residue
                    report.record(f"r0_{fam.value}", res == EXPECTED[fam], p=p, z=z, epsilon=eps, residue=res)
    return report


# ---------------------------------------------------------------- divisibility

def _int_coeffs(f: KPoly) -> list:
    out = []
    for c in f.coeffs:
        v = c.constant_value()
        out.append(v.numerator if v.denominator == 1 else v)
    return out


def _horner(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def closed_form(y, F, n: int):
    """n(n^2-1) (y(n-1) F_{n-1} - y(n-2) F_n) for the window sum of L*(y (k+1)(k+2)) F."""
    return n * (n * n - 1) * (y(n - 1) * F[n - 1] - y(n - 2) * F[n])


def schroder_cofactor(j: int) -> KPoly:
    """y with x_j = y(k) (k+1)(k+2); for the preset family y = 2 (2k+3)^(j-2)."""
    return 2 * (2 * K + 3) ** (j - 2)


def verify_divisibility(
    n_max: int,
    s_max: int,
    epsilons=(-1, 1),
    z_values=range(-10, 11),
    families=SCHRODER_FAMILIES,
    y_trials: int = 3,
    seed: int = 0,
) -> CheckReport:
    """Numeric window-sum identity, 2n(n^2-1) divisibility, and n(n^2-1) divisibility for random y."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    rng = random.Random(seed)
    report = CheckReport("divisibility")
    randoms = [
        KPoly([rng.randint(-5, 5) for _ in range(rng.randint(1, 4))]) for _ in range(y_trials)
    ]
    for eps in epsilons:
        for z in z_values:
            L = schroder_operator(eps, z)
            for fam in families:
                F = weighted_table(fam, z, eps, n_max + 1)
                cases = [("basis", s, schroder_cofactor(s + 2)) for s in range(s_max + 1)]
                cases += [("random", t, y) for t, y in enumerate(randoms)]
                for tag, s, y in cases:
                    image = _int_coeffs(op_adjoint_apply(L, y * (K + 1) * (K + 2)))
                    yc = _int_coeffs(y)

                    def yv(k):
                        return _horner(yc, k)

                    running = image[0] * F[0] if image else 0
                    for n in range(2, n_max + 1):
                        running += _horner(image, n - 1) * F[n - 1]
                        rhs = n * (n * n - 1) * (yv(n - 1) * F[n - 1] - yv(n - 2) * F[n])
                        where = dict(n=n, s=s, epsilon=eps, z=z, family=fam.value)
                        report.record(f"{tag}_closed_form", running == rhs, **where)
                        mod = (2 if tag == "basis" else 1) * n * (n * n - 1)
                        report.record(f"{tag}_divisible", running % mod == 0, **where)
    return report


def verify_closed_form_symbolic(n_max: int = 20, s_max: int = 4, epsilons=(-1, 1), families=SCHRODER_FAMILIES) -> CheckReport:
    """The window-sum identity as an equality in Z[z]."""
    report = CheckReport("closed_form_symbolic")
    for eps in epsilons:
        L = schroder_operator(eps)
        for fam in families:
            F = weighted_table(fam, SYMBOLIC, eps, n_max + 1)
            for s in range(s_max + 1):
                y = schroder_cofactor(s + 2)
                image = op_adjoint_apply(L, y * (K + 1) * (K + 2))
                running = ZPoly()
                for n in range(1, n_max + 1):
                    running = running + image(n - 1) * F[n - 1]
                    if n < 2:
                        continue
                    rhs = closed_form(lambda k: y(k).constant_value(), F, n)
                    where = dict(n=n, s=s, epsilon=eps, family=fam.value)
                    report.record("identity", running == rhs, **where)
                    integral = all(c.denominator == 1 for c in running.coeffs)
                    report.record("integral", integral, **where)
                    mod = 2 * n * (n * n - 1)
                    report.record("divisible", all(c.numerator % mod == 0 for c in running.coeffs), **where)
    return report


# ---------------------------------------------------------------- certificate path

@lru_cache(maxsize=256)
def _cofactor_values(x, n: int) -> tuple:
    y = _cofactor_of(x)
    return tuple(y(k).constant_value() for k in range(n))


def _cofactor_of(x) -> KPoly:
    quad = list(x.quadratic)
    if x.gamma != Fraction(-1, 2) or x.J != 2 or Fraction(1, 4) not in quad:
        raise ValueError("closed-form boundary needs a basis element carrying the factor (k+1)(k+2)")
    quad.remove(Fraction(1, 4))
    return build_basis(x.gamma, x.J, x.alpha, x.linear, quad).expanded


def _target_power_sum(cert: ReductionCertificate, F, n: int, i: int):
    def point(k):
        return cert.scale * (k - cert.gamma)

    return sum(point(k) ** i * F[k] for k in range(n))


def certificate_partial_sum(cert: ReductionCertificate, family, epsilon: int, z: int, n: int) -> Fraction:
    """sum_{k<n} target(k) F_k rebuilt from the certificate, exactly over Q."""
    F = weighted_table(family, z, epsilon, n + 1)
    P = cert.pivot(z)
    total = Fraction(0)
    for i, num, e in cert.residual:
        total += num(z) / P**e * _target_power_sum(cert, F, n, i)
    for j, num, e, x in cert.combo:
        y = _cofactor_of(x)
        total += num(z) / P**e * closed_form(lambda k: y(k).constant_value(), F, n)
    return total


def _certificate_for(r: int, epsilon: int, cert):
    if cert is not None:
        return cert
    return schroder_certificate(r, epsilon)


def verify_via_certificate(r: int, epsilon: int, z: int, p: int, family=Family.LARGE, cert=None, strict: bool = True) -> bool:
    """Rebuild sum (2k+1)^(2r+1) eps^k F_k mod p from the certificate and compare with the direct sum."""
    check_odd_prime(p)
    if strict and not admissible(p, z):
        raise HypothesisViolated(f"gcd({p}, z(z+1)) != 1 for z = {z}")
    cert = _certificate_for(r, epsilon, cert)
    if cert.m != 2 * r + 1:
        raise ValueError(f"certificate is for m = {cert.m}, not {2 * r + 1}")
    eta_mod = schroder_eta(epsilon)(z) % p if cert.z is None else None
    if eta_mod == 0:
        if admissible(p, z):
            raise ReductionError(f"gcd(p, z(z+1)) = 1 but eta = 0 mod {p} at z = {z}")
        raise EtaDividesModulus(f"eta(z={z}) = 0 mod {p}")
    pivot_mod = poly_eval_mod(cert.pivot, 0, z, p)
    if pivot_mod.residue == 0:
        raise EtaDividesModulus(f"pivot {cert.pivot} vanishes mod {p} at z = {z}")
    inv = pivot_mod.inverse()
    if cert.z is not None and cert.z != z:
        raise ValueError(f"certificate was specialized at z = {cert.z}")
    F = weighted_table(family, z, epsilon, p + 1)
    total = ModInt(0, p)
    for i, num, e in cert.residual:
        coeff = poly_eval_mod(num, 0, z, p) * inv**e
        total = total + coeff * (_target_power_sum(cert, F, p, i) % p)
    for j, num, e, x in cert.combo:
        coeff = poly_eval_mod(num, 0, z, p) * inv**e
        yv = _cofactor_values(x, p)
        boundary = closed_form(yv.__getitem__, F, p)
        total = total + coeff * rational_mod(boundary, p)
    return total == weighted_sum_mod(family, r, epsilon, z, p, strict=False)


def _two_path_chunk(args):
    z, primes, r_values, epsilons = args
    out = []
    for eps in epsilons:
        for p in primes:
            if not admissible(p, z):
                continue
            for r in r_values:
                for fam in SCHRODER_FAMILIES:
                    ok = verify_via_certificate(r, eps, z, p, fam)
                    out.append(("two_path", ok, dict(p=p, r=r, epsilon=eps, z=z, family=fam.value)))
    return out


def two_path_report(grid: GridSpec, jobs: int = 1) -> CheckReport:
    report = CheckReport("two_path")
    for p, z in grid.points():
        if not admissible(p, z):
            report.skipped += 1
    tasks = [(z, grid.primes, grid.r_values, grid.epsilons) for z in grid.z_values]
    for chunk in _map(_two_path_chunk, tasks, jobs):
        for check, ok, where in chunk:
            report.record(check, ok, **where)
    return report


def certify(cert: ReductionCertificate, primes=None, z_values=range(-10, 11)) -> CheckReport:
    """Symbolic re-expansion plus the modular reconstruction on a grid."""
    report = CheckReport("certify")
    report.record("identity", verify_certificate(cert), m=cert.m)
    if cert.basis != "schroder" or cert.m % 2 == 0:
        return report
    r = (cert.m - 1) // 2
    eps = cert.operator.epsilon
    primes = primes if primes is not None else odd_primes_below(50)
    zs = [cert.z] if cert.z is not None else list(z_values)
    for p in primes:
        for z in zs:
            if not admissible(p, z):
                report.skipped += 1
                continue
            for fam in SCHRODER_FAMILIES:
                ok = verify_via_certificate(r, eps, z, p, fam, cert=cert)
                report.record("two_path", ok, p=p, z=z, family=fam.value)
    return report
