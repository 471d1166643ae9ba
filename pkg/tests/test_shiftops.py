import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import kpolys, small_ints, sympy_adjoint, to_sympy

from powerpartible.errors import (
    AmbiguousGamma,
    IndexOutOfRange,
    IndicialIdenticallyZero,
    NotAnnihilated,
    NotPartible,
)
from powerpartible.exact import K, KZ, KPoly, Z
from powerpartible.sequences import large_schroder, little_schroder, weighted_table
from powerpartible.shiftops import (
    ShiftOp,
    TelescopeCertificate,
    indicial_polynomial,
    op_adjoint_apply,
    op_apply,
    op_degenerate_roots,
    op_degree,
    op_find_gamma,
    op_telescope,
    partible_condition_holds,
    schroder_eta,
    schroder_operator,
    verify_telescope,
)

X2 = 2 * (K + 1) * (K + 2)
NONDEGENERATE_Z = [z for z in range(-3, 4) if z not in (0, -1)]


class TestApply:
    def test_annihilates_large(self):
        L = schroder_operator(1, 1)
        S = [large_schroder(n, 1) for n in range(5)]
        assert S == [1, 2, 6, 22, 90]
        assert op_apply(L, S, 1) == 4 * 22 - 15 * 6 + 1 * 2 == 0

    def test_annihilates_little(self):
        L = schroder_operator(1, 1)
        s = [little_schroder(n, 1) for n in range(4)]
        assert op_apply(L, s, 0) == 3 * 3 - 9 * 1 + 0 == 0

    def test_difference_of_constant(self):
        assert op_apply(ShiftOp((-1, 1)), [5, 5, 5], 1) == 0

    def test_symbolic_values(self):
        L = schroder_operator(-1)
        F = weighted_table("large", Z, -1, 12)
        assert all(op_apply(L, F, n) == 0 for n in range(10))

    def test_specializes_on_the_fly(self):
        L = schroder_operator(-1)
        F = weighted_table("little", 4, -1, 12)
        assert all(op_apply(L, F, n, z=4) == 0 for n in range(10))

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            op_apply(schroder_operator(1, 1), [1, 2, 6], 1)


class TestAdjoint:
    @pytest.mark.parametrize("eps", [1, -1])
    def test_schroder_x2(self, eps):
        eta = KPoly((schroder_eta(eps),))
        img = op_adjoint_apply(schroder_operator(eps), X2)
        assert img == 2 * K * (K + 1) * (2 * K + 1) * (1 - eps * (1 + 2 * KZ))
        assert img == 4 * eta * K * (K + 1) * (2 * K + 1)

    def test_difference(self):
        assert op_adjoint_apply(ShiftOp((-1, 1)), K) == -1

    def test_specialized(self):
        assert op_adjoint_apply(schroder_operator(1, 1), X2) == -4 * K * (K + 1) * (2 * K + 1)

    @given(kpolys, st.sampled_from([1, -1]))
    @settings(max_examples=40, deadline=None)
    def test_matches_sympy(self, x, eps):
        L = schroder_operator(eps)
        assert to_sympy(op_adjoint_apply(L, x)) == sympy_adjoint(L, x)

    @given(st.lists(small_ints, min_size=1, max_size=9), st.sampled_from([1, -1]), st.sampled_from(NONDEGENERATE_Z))
    def test_degree_law(self, coeffs, eps, z):
        x = KPoly(coeffs)
        if not x:
            return
        L = schroder_operator(eps, z)
        d, _ = op_degree(L)
        assert op_adjoint_apply(L, x).degree == x.degree + d


class TestDegree:
    @pytest.mark.parametrize("eps", [1, -1])
    def test_schroder(self, eps):
        d, b = op_degree(schroder_operator(eps))
        w = 1 + 2 * KZ
        assert d == 1
        assert b[2] == K
        assert b[1] == 2 * K - eps * (2 * K + 1) * w
        assert b[0] == (2 * K + 1) * (1 - eps * w)

    def test_constant_coefficients(self):
        d, b = op_degree(ShiftOp((-1, 0, 1)))
        # b_l = sum_j C(j,l) a_{J-j}(k+j-J): b_2 = a_0, b_1 = a_1 + 2 a_0, b_0 = a_2 + a_1 + a_0
        assert b == [KPoly(), KPoly((-2,)), KPoly((-1,))]
        assert d == -1

    def test_k_sigma(self):
        d, b = op_degree(ShiftOp((0, K)))
        assert b == [K - 1, KPoly()]
        assert d == 1
        # independent check: L*(x) = (k-1) x(k-1) raises degree by one
        assert op_adjoint_apply(ShiftOp((0, K)), K**3).degree == 4


class TestDegenerateRoots:
    def test_schroder_symbolic_is_nondegenerate(self):
        L = schroder_operator(1)
        assert indicial_polynomial(L) == 4 * KPoly((schroder_eta(1),))
        assert op_degenerate_roots(L) == set()

    def test_specialized_eta_nonzero(self):
        L = schroder_operator(1, 1)
        assert indicial_polynomial(L) == -4
        assert op_degenerate_roots(L) == set()

    def test_generic_indicial_vanishes_at_eta_zero(self):
        with pytest.raises(IndicialIdenticallyZero):
            op_degenerate_roots(schroder_operator(1), z=0)
        with pytest.raises(IndicialIdenticallyZero):
            op_degenerate_roots(schroder_operator(-1), z=-1)

    def test_specialized_eta_zero_is_degenerate(self):
        # degree drops to -1 and the indicial polynomial becomes s^2 - 2s
        L = schroder_operator(1, 0)
        assert op_degree(L)[0] == -1
        assert op_degenerate_roots(L) == {0, 2}

    def test_difference_operator(self):
        assert op_degenerate_roots(ShiftOp((-1, 1))) == {0}


class TestFindGamma:
    @pytest.mark.parametrize("eps", [1, -1])
    def test_schroder_symbolic(self, eps):
        info = op_find_gamma(schroder_operator(eps))
        assert (info.gamma, info.degree, info.nondegenerate) == (Fraction(-1, 2), 1, True)

    @pytest.mark.parametrize("eps", [1, -1])
    @pytest.mark.parametrize("z", [z for z in range(-6, 7)])
    def test_schroder_specialized(self, eps, z):
        L = schroder_operator(eps, z)
        if schroder_eta(eps)(z) == 0:
            with pytest.raises(NotPartible) as exc:
                op_find_gamma(L)
            assert exc.value.reason == "degenerate"
        else:
            assert op_find_gamma(L).gamma == Fraction(-1, 2)

    def test_symmetry_identities(self):
        L = schroder_operator(1)
        g = Fraction(-1, 2)
        assert L.a(0).shift(g) + L.a(2).reflect(g - 2) == 0
        assert L.a(1).shift(g) + L.a(1).reflect(g - 2) == 0

    def test_degenerate_constant_operator(self):
        with pytest.raises(NotPartible) as exc:
            op_find_gamma(ShiftOp((-1, 0, 1)))
        assert exc.value.reason == "degenerate"

    def test_inconsistent(self):
        with pytest.raises(NotPartible):
            op_find_gamma(ShiftOp((-2, 1)))

    def test_irrational_center(self):
        # a_0(k) = k^2 - 2 forces a center solving a quadratic without rational roots
        L = ShiftOp((K**2 - 2, 0, K))
        with pytest.raises(NotPartible):
            op_find_gamma(L)

    def test_ambiguous(self):
        # constant symmetric coefficients satisfy the conditions for every center
        L = ShiftOp((1, 3, 1))
        assert op_degenerate_roots(L) == set()
        assert partible_condition_holds(L, 0, 0) and partible_condition_holds(L, 5, 0)
        with pytest.raises(AmbiguousGamma):
            op_find_gamma(L)

    @given(st.integers(-6, 6), st.integers(-4, 4), st.integers(-3, 3).filter(bool), st.sampled_from([1, -1]))
    def test_recovers_planted_center(self, twice_gamma, c1, c0, sign):
        gamma = Fraction(twice_gamma, 2)
        a0 = c0 * (K - gamma) + c1
        L = ShiftOp((a0, 0, sign * a0.reflect(2 * gamma - 2)))
        d, _ = op_degree(L)
        if (-1) ** d != sign or op_degenerate_roots(L):
            return
        assert op_find_gamma(L).gamma == gamma


class TestTelescope:
    @pytest.mark.parametrize("eps", [1, -1])
    def test_generic_formula(self, eps):
        x = KPoly([1, -2, 3, 5])
        cert = op_telescope(schroder_operator(eps), x)
        w = 1 + 2 * KZ
        assert cert.u[0] == (K + 1) * x.shift(-2) - eps * (2 * K + 1) * w * x.shift(-1)
        assert cert.u[1] == (K + 2) * x.shift(-1)

    def test_difference(self):
        assert op_telescope(ShiftOp((-1, 1)), KPoly((1,))).u == (KPoly((1,)),)

    def test_specialized_x2(self):
        cert = op_telescope(schroder_operator(1, 1), X2)
        n = K
        assert cert.u[0] == 2 * n * (n**2 - 1) - 6 * n * (n + 1) * (2 * n + 1)
        assert cert.u[1] == 2 * n * (n + 1) * (n + 2)

    @pytest.mark.parametrize("family", ["large", "little"])
    def test_schroder_preset(self, family):
        L = schroder_operator(1, 1)
        F = weighted_table(family, 1, 1, 40)
        assert verify_telescope(op_telescope(L, X2), L, F, 25)

    def test_empty_sum(self):
        L = schroder_operator(1, 1)
        F = weighted_table("large", 1, 1, 5)
        assert verify_telescope(op_telescope(L, X2), L, F, 0)

    def test_corrupted_certificate(self):
        L = schroder_operator(1, 1)
        F = weighted_table("large", 1, 1, 40)
        cert = op_telescope(L, X2)
        bad = TelescopeCertificate(cert.x, (cert.u[0], cert.u[1] + 1))
        assert not verify_telescope(bad, L, F, 25)

    def test_not_annihilated(self):
        L = schroder_operator(1, 1)
        F = list(weighted_table("large", 1, 1, 10))
        F[4] += 1
        with pytest.raises(NotAnnihilated) as exc:
            verify_telescope(op_telescope(L, X2), L, F, 8)
        assert exc.value.index == 2

    @given(
        st.lists(small_ints, max_size=9),
        st.sampled_from([1, -1]),
        st.sampled_from(NONDEGENERATE_Z),
        st.sampled_from(["large", "little"]),
    )
    @settings(max_examples=40, deadline=None)
    def test_random_x(self, coeffs, eps, z, family):
        L = schroder_operator(eps, z)
        F = weighted_table(family, z, eps, 20)
        assert verify_telescope(op_telescope(L, KPoly(coeffs)), L, F, 15)

    def test_symbolic_z(self):
        L = schroder_operator(-1)
        F = weighted_table("large", Z, -1, 12)
        assert verify_telescope(op_telescope(L, K**3 + 1), L, F, 10)


class TestOperatorJson:
    def test_operator_file_format(self):
        text = json.dumps({"order": 2, "coeffs": ["k", "-(2*k+3)*(1+2*z)", "k+3"], "epsilon": 1})
        assert ShiftOp.from_json(text) == schroder_operator(1)

    def test_roundtrip(self):
        L = schroder_operator(-1)
        assert ShiftOp.from_json(json.dumps(L.to_json())) == L

    def test_order_mismatch(self):
        with pytest.raises(ValueError):
            ShiftOp.from_json({"order": 3, "coeffs": ["k", "1"]})

    def test_zero_leading_coefficient(self):
        with pytest.raises(ValueError):
            ShiftOp((K, 0))
