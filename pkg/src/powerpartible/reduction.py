"""Power-partible reduction of (k - gamma)^m modulo adjoint images L*(x_j).

The engine works in the monomial basis t = k - gamma.  Coefficients live in
Q(z) but only ever with denominators that are powers of one fixed
polynomial (the *pivot*; eta for the Schroeder operator), so every
coefficient is stored as ``(numerator ZPoly, pivot exponent)`` and no
rational-function arithmetic is needed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Callable

from .errors import (
    DegenerateSpecialization,
    LeadingCoefficientVanishes,
    NonMonomialDenominator,
    ParityViolation,
    ReductionError,
)
from .exact import K, KPoly, ZPoly, as_rational, format_rational, parse_poly, parse_zpoly, to_kpoly
from .shiftops import PartibleInfo, ShiftOp, op_adjoint_apply, op_find_gamma, schroder_eta, schroder_operator


@dataclass(frozen=True)
class SymmetricBasisPoly:
    """alpha * (k - gamma + J/2)^linear * prod_q ((k - gamma + J/2)^2 - q)."""

    gamma: Fraction
    J: int
    alpha: Fraction = Fraction(1)
    linear: int = 0
    quadratic: tuple[Fraction, ...] = ()
    expanded: KPoly = field(default=None, compare=False, repr=False)

    @property
    def degree(self) -> int:
        return self.linear + 2 * len(self.quadratic)


def build_basis(gamma, J: int, alpha=1, linear: int = 0, quadratic=()) -> SymmetricBasisPoly:
    gamma, alpha = as_rational(gamma), as_rational(alpha)
    quadratic = tuple(as_rational(q) for q in quadratic)
    center = K - gamma + Fraction(J, 2)
    x = KPoly((alpha,)) * center**linear
    for q in quadratic:
        x = x * (center * center - q)
    if not check_symmetry(x, gamma, J):
        raise ReductionError(f"product of symmetric factors failed the symmetry check: {x}")
    return SymmetricBasisPoly(gamma, J, alpha, linear, quadratic, x)


def check_symmetry(x, gamma, J: int) -> bool:
    """x(gamma + k) == (-1)^deg x * x(gamma - k - J)."""
    x = to_kpoly(x)
    if not x:
        return True
    gamma = as_rational(gamma)
    sign = -1 if x.degree % 2 else 1
    return x.shift(gamma) == sign * x.reflect(gamma - J)


@dataclass(frozen=True)
class BasisFamily:
    """x_j for j >= start, with deg x_j = j."""

    name: str
    start: int
    make: Callable[[int], SymmetricBasisPoly]

    def __call__(self, j: int) -> SymmetricBasisPoly:
        if j < self.start:
            raise ValueError(f"basis family {self.name!r} starts at degree {self.start}")
        x = self.make(j)
        if x.degree != j:
            raise ReductionError(f"basis element x_{j} has degree {x.degree}")
        return x


def schroder_family() -> BasisFamily:
    """x_{s+2}(k) = 2 (2k+3)^s (k+1)(k+2)."""
    half = Fraction(-1, 2)

    def make(j):
        s = j - 2
        return build_basis(half, 2, alpha=2 ** (s + 1), linear=s, quadratic=(Fraction(1, 4),))

    return BasisFamily("schroder", 2, make)


def power_family(gamma, J: int, start: int = 0) -> BasisFamily:
    """x_j = (k - gamma + J/2)^j."""
    return BasisFamily("power", start, lambda j: build_basis(gamma, J, linear=j))


@dataclass(frozen=True)
class ReductionCertificate:
    """(scale (k - gamma))^m = sum residual + sum v_j L*(x_j).

    ``residual`` holds ``(i, numerator, e)`` meaning numerator/pivot^e times
    (scale (k - gamma))^i; ``combo`` holds ``(j, numerator, e, x_j)``.
    """

    m: int
    gamma: Fraction
    operator: ShiftOp
    residual: tuple
    combo: tuple
    pivot: ZPoly = ZPoly((1,))
    scale: Fraction = Fraction(1)
    basis: str = "custom"
    z: int | None = None

    @property
    def max_pivot_power(self) -> int:
        return max([e for _, _, e in self.residual] + [c[2] for c in self.combo] + [0])

    def residual_dict(self) -> dict:
        return {i: (num, e) for i, num, e in self.residual}

    def coefficient(self, j):
        for jj, num, e, _ in self.combo:
            if jj == j:
                return num, e
        raise KeyError(j)

    def rescaled(self, scale) -> "ReductionCertificate":
        """Re-express the identity for (scale (k - gamma))^m."""
        scale = as_rational(scale)
        factor = scale / self.scale
        top = factor**self.m
        residual = tuple((i, num * (top / factor**i), e) for i, num, e in self.residual)
        combo = tuple((j, num * top, e, x) for j, num, e, x in self.combo)
        return replace(self, residual=residual, combo=combo, scale=scale)


def _pivot_split(lam: ZPoly, pivot: ZPoly | None):
    """Write lam = c * pivot^a with c a nonzero rational."""
    if lam.is_constant():
        return lam.coeff(0), 0
    if pivot is None or pivot.is_constant():
        raise NonMonomialDenominator(f"leading coefficient {lam} is not a power of the pivot")
    a = 0
    rest = lam
    while not rest.is_constant():
        q, r = divmod(rest, pivot)
        if r:
            raise NonMonomialDenominator(f"leading coefficient {lam} is not a rational multiple of a power of {pivot}")
        rest, a = q, a + 1
    return rest.coeff(0), a


def _strip_pivot(num: ZPoly, e: int, pivot: ZPoly):
    while e > 0 and num and not pivot.is_constant():
        q, r = divmod(num, pivot)
        if r:
            break
        num, e = q, e - 1
    if not num:
        e = 0
    return num, e


def _check_parity(img_t: KPoly, parity: int, j: int):
    for i, c in enumerate(img_t.coeffs):
        if c and i % 2 != parity:
            raise ParityViolation(f"L*(x_{j}) has a (k - gamma)^{i} term; expected parity {parity}")


def reduce_power(L: ShiftOp, info: PartibleInfo, family: BasisFamily, m: int, pivot: ZPoly | None = None) -> ReductionCertificate:
    """Top-down elimination of (k - gamma)^m by adjoint images.

    At each step the current top power t^e (t = k - gamma) is cancelled with
    L*(x_{e-d}); the loop stops once only powers below d + start remain.
    """
    if m < 1:
        raise ValueError("m must be positive")
    gamma, d = info.gamma, info.degree
    floor = d + family.start
    # remainder = rem / pivot^E
    rem = KPoly((0,) * m + (1,))
    E = 0
    combo = []
    while rem.degree >= floor:
        e = rem.degree
        j = e - d
        x = family(j)
        img = op_adjoint_apply(L, x.expanded).shift(gamma)
        if img.degree != e:
            if img.degree < e:
                raise LeadingCoefficientVanishes(f"deg L*(x_{j}) = {img.degree} < {e}: leading reduction coefficient vanishes")
            raise ReductionError(f"deg L*(x_{j}) = {img.degree} exceeds deg x + deg L = {e}")
        _check_parity(img, (d + j) % 2, j)
        lam = img.lead
        if pivot is None and not lam.is_constant():
            pivot = lam.monic()
        c, a = _pivot_split(lam, pivot)
        N = rem.lead
        # v_j = N / (c pivot^(E+a))
        if a:
            rem = rem * KPoly((pivot**a,))
        rem = rem - img * KPoly((N / c,))
        if rem.coeff(e):
            raise ReductionError("elimination step failed to cancel the leading term")
        combo.append((j, N / c, E + a, x))
        E += a
    for i, cf in enumerate(rem.coeffs):
        if cf and i % 2 != m % 2:
            raise ParityViolation(f"residual (k - gamma)^{i} has the wrong parity for m = {m}")
    pivot = pivot if pivot is not None else ZPoly((1,))
    residual = []
    for i, cf in enumerate(rem.coeffs):
        if cf:
            num, e = _strip_pivot(cf, E, pivot)
            residual.append((i, num, e))
    combo = tuple((j, *_strip_pivot(num, e, pivot), x) for j, num, e, x in combo)
    return ReductionCertificate(m, gamma, L, tuple(residual), combo, pivot)


def verify_certificate(cert: ReductionCertificate, L: ShiftOp | None = None) -> bool:
    """Re-expand the certificate identity in Q[z][k] after clearing pivot powers."""
    L = L if L is not None else cert.operator
    if cert.m < 1:
        return False
    P = cert.pivot
    top = cert.max_pivot_power
    t = cert.scale * (K - cert.gamma)
    lhs = KPoly((P**top,)) * t**cert.m
    rhs = KPoly()
    for i, num, e in cert.residual:
        rhs = rhs + KPoly((num * P ** (top - e),)) * t**i
    for j, num, e, x in cert.combo:
        rhs = rhs + KPoly((num * P ** (top - e),)) * op_adjoint_apply(L, x.expanded)
    return lhs == rhs


def _eta_excluded(epsilon: int) -> int:
    return 0 if epsilon == 1 else -1


def check_schroder_specialization(epsilon: int, z) -> None:
    if z is not None and schroder_eta(epsilon)(z) == 0:
        raise DegenerateSpecialization(
            f"eta = (1 - eps(1+2z))/2 vanishes for eps = {epsilon}, z = {z}; "
            f"excluded residues: z = {_eta_excluded(epsilon)} (and generally z(z+1) = 0)"
        )


@lru_cache(maxsize=256)
def schroder_certificate(r: int, epsilon: int, z: int | None = None) -> ReductionCertificate:
    """(2k+1)^(2r+1) = sum_s v_s/eta^u_s L*(x_{2s+2}) + (2k+1).

    ``z=None`` keeps z symbolic (denominators are powers of eta); an integer
    ``z`` reduces the specialized operator instead.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    check_schroder_specialization(epsilon, z)
    L = schroder_operator(epsilon, z)
    info = op_find_gamma(L)
    if info.gamma != Fraction(-1, 2) or info.degree != 1:
        raise ReductionError(f"unexpected operator data gamma={info.gamma}, d={info.degree}")
    pivot = schroder_eta(epsilon) if z is None else None
    cert = reduce_power(L, info, schroder_family(), 2 * r + 1, pivot=pivot)
    cert = replace(cert.rescaled(2), basis="schroder", z=z)
    if z is None:
        cert = replace(cert, pivot=schroder_eta(epsilon))
    if [(i, num, e) for i, num, e in cert.residual] != [(1, ZPoly((1,)), 0)]:
        raise ReductionError(f"residual is not exactly (2k+1): {cert.residual}")
    # symbolic: numerators are free of eta, so only 2-powers may remain;
    # specialized: eta is an integer and its powers are folded in as well
    allowed = 2 * (1 if z is None else abs(schroder_eta(epsilon)(z).numerator))
    for j, num, e, _ in cert.combo:
        for c in num.coeffs:
            if _strip_factors(c.denominator, allowed) != 1:
                raise NonMonomialDenominator(f"coefficient of L*(x_{j}) has denominator {c.denominator}")
    return cert


def _strip_factors(n: int, base: int) -> int:
    g = gcd(n, base)
    while g > 1:
        while n % g == 0:
            n //= g
        g = gcd(n, base)
    return n


# ---------------------------------------------------------------- JSON

def _pivot_is_linear(P: ZPoly) -> bool:
    return P.degree == 1


def _render_in_pivot(num: ZPoly, P: ZPoly) -> str:
    # z = (eta - b)/a when eta = a z + b
    b, a = P.coeff(0), P.coeff(1)
    return num.compose(ZPoly((-b / a, 1 / a))).render(var="eta")


def certificate_to_json(cert: ReductionCertificate) -> dict:
    linear = _pivot_is_linear(cert.pivot)
    fmt = (lambda num: _render_in_pivot(num, cert.pivot)) if linear else (lambda num: num.render())
    return {
        "m": cert.m,
        "gamma": format_rational(cert.gamma),
        "scale": format_rational(cert.scale),
        "target": f"({format_rational(cert.scale)}*(k - ({format_rational(cert.gamma)})))^{cert.m}",
        "eta": cert.pivot.render(),
        "epsilon": cert.operator.epsilon,
        "z": cert.z,
        "numerator_variable": "eta" if linear else "z",
        "operator": cert.operator.to_json(),
        "residual": [[i, fmt(num)] + ([f"eta^{e}"] if e else []) for i, num, e in cert.residual],
        "combo": [[j, fmt(num), f"eta^{e}"] for j, num, e, _ in cert.combo],
        "basis": cert.basis,
        **(
            {
                "eta_definition": "(1 - epsilon*(1+2*z))/2",
                "eta_value": format_rational(schroder_eta(cert.operator.epsilon)(cert.z)) if cert.z is not None else None,
            }
            if cert.basis == "schroder"
            else {}
        ),
        "basis_polys": {str(j): x.expanded.render() for j, _, _, x in cert.combo},
        "basis_params": {
            str(j): {
                "gamma": format_rational(x.gamma),
                "J": x.J,
                "alpha": format_rational(x.alpha),
                "linear": x.linear,
                "quadratic": [format_rational(q) for q in x.quadratic],
            }
            for j, _, _, x in cert.combo
        },
    }


def _eta_power(text: str) -> int:
    text = text.strip()
    if text == "1":
        return 0
    if not text.startswith("eta"):
        raise ValueError(f"denominator must be a power of eta, got {text!r}")
    rest = text[3:].strip()
    return 1 if not rest else int(rest.lstrip("^"))


def certificate_from_json(data) -> ReductionCertificate:
    if isinstance(data, str):
        data = json.loads(data)
    pivot = parse_zpoly(data.get("eta", "1"))
    env = {"eta": pivot}
    L = ShiftOp.from_json(data["operator"])
    residual = []
    for entry in data["residual"]:
        e = _eta_power(entry[2]) if len(entry) > 2 else 0
        residual.append((int(entry[0]), parse_zpoly(entry[1], env), e))
    combo = []
    params = data["basis_params"]
    for j, num, den in data["combo"]:
        p = params[str(j)]
        x = build_basis(p["gamma"], p["J"], p["alpha"], p["linear"], p["quadratic"])
        declared = data.get("basis_polys", {}).get(str(j))
        if declared is not None and parse_poly(declared) != x.expanded:
            raise ValueError(f"basis polynomial for j={j} does not match its parameters")
        combo.append((int(j), parse_zpoly(num, env), _eta_power(den), x))
    return ReductionCertificate(
        m=int(data["m"]),
        gamma=as_rational(data["gamma"]),
        operator=L,
        residual=tuple(residual),
        combo=tuple(combo),
        pivot=pivot,
        scale=as_rational(data.get("scale", "1")),
        basis=data.get("basis", "custom"),
        z=data.get("z"),
    )
