from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import integer_kpolys, kpolys, ks, odd_primes, small_ints, small_rationals, to_sympy, zpolys

from powerpartible.errors import DenominatorDividesModulus, NotPrime, ParseError
from powerpartible.exact import (
    NEG_INF,
    K,
    KPoly,
    KZ,
    ModInt,
    Z,
    ZPoly,
    is_prime,
    parse_poly,
    parse_zpoly,
    poly_eval_mod,
    poly_reflect_k,
    poly_shift_k,
    zpoly_gcd,
)


def _canonical(f):
    return not f.coeffs or bool(f.coeffs[-1])


class TestShift:
    def test_square_shift(self):
        assert poly_shift_k(K**2, -1) == K**2 - 2 * K + 1

    def test_linear_shift_matches_pointwise(self):
        f = poly_shift_k(K + 3, -2)
        assert f == K + 1
        assert [f(k) for k in range(4)] == [(K + 3)(k - 2) for k in range(4)]

    def test_zero_fixed(self):
        assert poly_shift_k(KPoly(), 7) == 0

    @given(kpolys, small_rationals)
    def test_shift_roundtrip(self, f, c):
        assert poly_shift_k(poly_shift_k(f, c), -c) == f

    @given(kpolys, small_rationals)
    def test_shift_matches_sympy(self, f, c):
        c_sym = sympy.Rational(c.numerator, c.denominator)
        assert to_sympy(poly_shift_k(f, c)) == sympy.expand(to_sympy(f).subs(ks, ks + c_sym))

    @given(kpolys, small_rationals)
    def test_shift_preserves_degree(self, f, c):
        assert poly_shift_k(f, c).degree == f.degree


class TestReflect:
    def test_linear(self):
        g = poly_reflect_k(K, Fraction(-5, 2))
        assert g == -K - Fraction(5, 2)
        assert all(g(k) == Fraction(-5, 2) - k for k in range(-3, 4))

    def test_even_power_about_minus_half(self):
        assert poly_reflect_k((2 * K + 1) ** 2, -1) == (2 * K + 1) ** 2

    def test_constant(self):
        assert poly_reflect_k(KPoly((1,)), 0) == 1

    @given(kpolys, small_rationals)
    def test_involution(self, f, c):
        assert poly_reflect_k(poly_reflect_k(f, c), c) == f


class TestRing:
    @given(kpolys, kpolys, kpolys)
    @settings(max_examples=60)
    def test_associativity(self, f, g, h):
        assert (f * g) * h == f * (g * h)
        assert (f + g) + h == f + (g + h)

    @given(kpolys, kpolys, kpolys)
    @settings(max_examples=60)
    def test_distributivity(self, f, g, h):
        assert f * (g + h) == f * g + f * h

    @given(kpolys)
    def test_additive_inverse(self, f):
        assert f + (-f) == 0
        assert f - f == KPoly()

    @given(kpolys, kpolys)
    def test_product_matches_sympy(self, f, g):
        assert to_sympy(f * g) == sympy.expand(to_sympy(f) * to_sympy(g))

    @given(kpolys, kpolys, small_rationals)
    def test_canonical_form_everywhere(self, f, g, c):
        for h in (f, g, f + g, f - g, f * g, -f, f.shift(c), f.reflect(c), f**2, f - f):
            assert _canonical(h)
            assert all(_canonical(a) for a in h.coeffs)

    def test_zero_degree_sentinel(self):
        assert KPoly().degree == NEG_INF
        assert ZPoly().degree == NEG_INF
        assert KPoly((0, 0, 0)).coeffs == ()

    def test_immutable(self):
        with pytest.raises(AttributeError):
            K.coeffs = ()

    def test_rejects_floats(self):
        with pytest.raises(TypeError):
            ZPoly((0.5,))


class TestZPolyDivision:
    @given(zpolys, zpolys)
    def test_divmod(self, a, b):
        if not b:
            return
        q, r = divmod(a, b)
        assert q * b + r == a
        assert r.degree < b.degree

    def test_gcd(self):
        a = (Z - 1) * (Z + 2) * 3
        b = (Z - 1) * (2 * Z + 5)
        assert zpoly_gcd(a, b) == Z - 1

    def test_rational_roots(self):
        assert ZPoly((1, -3, 2)).rational_roots() == [Fraction(1, 2), 1]
        assert (Z**2 - 2).rational_roots() == []
        assert (Z**3).rational_roots() == [0]


class TestEvalMod:
    def test_cube(self):
        assert poly_eval_mod((2 * K + 1) ** 3, 2, 0, 7) == ModInt(6, 7)

    def test_boundary_term(self):
        f = -1 * (2 * K + 3) * (1 + 2 * KZ)
        assert f(1, 1) == -15
        assert poly_eval_mod(f, 1, 1, 5).residue == 0

    def test_denominator_divides_modulus(self):
        with pytest.raises(DenominatorDividesModulus):
            poly_eval_mod(KPoly((Fraction(1, 5),)), 0, 0, 5)

    @given(integer_kpolys, integer_kpolys, small_ints, small_ints, odd_primes)
    def test_multiplicative(self, f, g, k0, z0, p):
        lhs = poly_eval_mod(f * g, k0, z0, p)
        assert lhs == poly_eval_mod(f, k0, z0, p) * poly_eval_mod(g, k0, z0, p)

    @given(kpolys, small_ints, small_ints, odd_primes)
    def test_agrees_with_exact(self, f, k0, z0, p):
        exact = f(k0, z0)
        if any(c.denominator % p == 0 for cz in f.coeffs for c in cz.coeffs):
            return
        assert poly_eval_mod(f, k0, z0, p) == ModInt.of(exact, p)


class TestModInt:
    def test_normalizes(self):
        assert ModInt(-1, 7).residue == 6

    def test_requires_odd_prime(self):
        for bad in (1, 2, 9, 91, 2**64 + 13):
            with pytest.raises(NotPrime):
                ModInt(0, bad)

    def test_inverse(self):
        assert ModInt(3, 7).inverse() * 3 == 1

    def test_primality_against_sieve(self):
        sieve = [True] * 2000
        sieve[0] = sieve[1] = False
        for i in range(2, 2000):
            if sieve[i]:
                for j in range(i * i, 2000, i):
                    sieve[j] = False
        assert [n for n in range(2000) if is_prime(n)] == [n for n in range(2000) if sieve[n]]
        assert is_prime(2**61 - 1) and not is_prime(3215031751)


class TestParser:
    def test_canonical_rendering(self):
        f = (2 * KZ + 1) * K**2 - 3 * K + Fraction(1, 2)
        assert f.render() == "(2*z+1)*k^2 - 3*k + 1/2"
        assert parse_poly("(2*z+1)*k^2 - 3*k + 1/2") == f

    def test_operator_coefficients(self):
        assert parse_poly("-(2*k+3)*(1+2*z)") == -(2 * K + 3) * (1 + 2 * KZ)
        assert parse_poly("k+3") == K + 3

    def test_extra_binding(self):
        assert parse_zpoly("-(8-eta)", {"eta": -Z}) == -Z - 8

    @pytest.mark.parametrize("bad", ["", "k^", "2*", "(k", "k / k", "k ^ z", "x", "3 $ 4"])
    def test_rejects(self, bad):
        with pytest.raises(ParseError):
            parse_poly(bad)

    @given(kpolys)
    def test_roundtrip(self, f):
        assert parse_poly(f.render()) == f

    @given(st.lists(small_rationals, max_size=4).map(ZPoly))
    def test_zpoly_roundtrip(self, f):
        assert parse_zpoly(f.render()) == f
