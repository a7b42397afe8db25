"""Layer recurrence, eigenvalue assembly, eigenfunctions, and the transform."""

import math
from fractions import Fraction

import pytest

from gkw import (
    BigFloat,
    DomainError,
    QuadraticNumber,
    SpectralOptions,
    advance_layer,
    eigenfunction_eval,
    eigenvalue,
    eigenvalue_omega,
    functional_equation_residual,
    g_transform,
    gfunction_from_result,
    gfunction_from_state,
    gfunction_reference,
    golden_pow,
    init_layers,
    k_coeff,
    quad_to_float,
)
from gkw.spectral import (
    divisor,
    eval_tail_bound,
    layer_w1_exact,
    layer_w2_exact,
    layer_w2_float,
    simplified_layers,
)

FAST = SpectralOptions(precision=96, v_max=8, initial_width=24)


class TestInitialLayer:
    def test_unit_vector_n1(self):
        st = init_layers(1, FAST)
        assert st.layers() == [BigFloat.one(96)]
        coeffs = st.coefficient_layer(0)
        assert coeffs[1] == 1
        assert all(c.is_zero() for j, c in enumerate(coeffs) if j not in (1,))

    def test_unit_vector_n5(self):
        st = init_layers(5, FAST)
        coeffs = st.coefficient_layer(0)
        assert coeffs[5] == 1
        assert sum(float(c) for c in coeffs) == 1.0

    def test_window_must_reach_n(self):
        with pytest.raises(DomainError):
            init_layers(4, FAST, j_hi=3)


class TestAdvance:
    def test_first_layer_is_diagonal_kernel(self):
        for n in (1, 2, 5):
            st = advance_layer(init_layers(n, FAST))
            expect = quad_to_float(k_coeff(n, n), 96)
            assert float(abs(st.layers()[1] - expect)) < 1e-25

    def test_first_layer_coefficients(self):
        n = 3
        st = advance_layer(init_layers(n, FAST))
        coeffs = st.coefficient_layer(1)
        for j in (1, 2, 4, 7):
            expect = quad_to_float(k_coeff(j, n) / divisor(n, j), 96)
            assert float(abs(coeffs[j] - expect)) < 1e-24
        assert coeffs[n].is_zero()

    def test_normalization_pins_nth_coefficient(self):
        st = init_layers(2, FAST)
        for _ in range(4):
            advance_layer(st)
        for v in range(1, 5):
            assert st.coefficient_layer(v)[2].is_zero()

    def test_second_layer_matches_exact_mode(self):
        for n in (1, 2, 4):
            st = init_layers(n, FAST)
            advance_layer(st)
            advance_layer(st)
            exact = layer_w2_exact(n, st.j_hi)
            got = st.layers()[2]
            assert float(abs(got - quad_to_float(exact, 96))) < 1e-22

    def test_float_light_path_matches_exact(self):
        for n in (1, 3, 6):
            hi = n + 60
            exact = quad_to_float(layer_w2_exact(n, hi), 96)
            light = layer_w2_float(n, 96, j_hi=hi)
            assert float(abs(exact - light)) < 1e-24


class TestDivisor:
    def test_never_small(self):
        # |1 - (-1)^(n+j) phi^(2n-2j)| >= 1 - phi^-2 for all j != n
        bound = quad_to_float(1 - golden_pow(-2), 96)
        for n in (1, 2, 7):
            for j in range(1, 40):
                if j == n:
                    continue
                val = abs(quad_to_float(divisor(n, j), 96))
                assert val >= bound - BigFloat(Fraction(1, 2**80), 96)

    def test_rejected_at_n(self):
        with pytest.raises(DomainError):
            divisor(3, 3)


class TestEigenvalue:
    def test_lambda1_is_one(self, eigen_cache):
        res = eigen_cache(1)
        assert float(abs(res.lam - 1)) < 1e-6
        assert res.refined

    def test_lambda2_magnitude(self, eigen_cache, oracle_cache):
        res = eigen_cache(2)
        assert abs(float(abs(res.lam))) == pytest.approx(0.3036630029, abs=1e-9)
        oracle = oracle_cache(40)[1]
        assert float(abs(res.lam - oracle)) < 1e-8

    def test_lambda3_magnitude(self, eigen_cache):
        assert abs(float(eigen_cache(3).lam)) == pytest.approx(0.10088, abs=5e-6)

    def test_partial_sum_invariant(self):
        # unrefined value is the plain scaled layer sum, to rounding
        opts = SpectralOptions(precision=96, v_max=12, refine=False)
        res = eigenvalue(2, opts)
        scale = quad_to_float(golden_pow(-4), 96)
        manual = sum(res.layer_values, BigFloat.zero(96)) * scale
        assert float(abs(abs(res.lam) - manual)) < 1e-24
        assert not res.refined

    def test_sign_rule(self, eigen_cache):
        for n in (1, 2, 3, 4):
            res = eigen_cache(n)
            assert res.lam.sign() == (1 if n % 2 == 1 else -1)

    def test_contributions_scale(self, eigen_cache):
        res = eigen_cache(2)
        scale = quad_to_float(golden_pow(-4), 128)
        assert float(abs(res.contributions[0] - scale)) < 1e-30

    def test_layer_magnitude_bound(self, eigen_cache):
        # |W_v| < C / (v^2 sqrt(n)) with one fitted constant across all runs
        cs = []
        for n in (1, 2, 3, 10):
            res = eigen_cache(n)
            cs.append(res.fitted_constant)
        c_fit = max(cs)
        assert c_fit < 6.0  # sanity: the fitted constant stays O(1)
        for n in (1, 2, 3, 10):
            res = eigen_cache(n)
            for v in range(1, len(res.layer_values)):
                assert abs(float(res.layer_values[v])) <= c_fit / (
                    v * v * math.sqrt(n)
                ) * (1 + 1e-9)

    def test_precision_consistency(self):
        # doubling the precision moves the value by less than the coarser
        # reported uncertainty
        lo = eigenvalue(2, SpectralOptions(precision=96, v_max=8))
        hi = eigenvalue(2, SpectralOptions(precision=192, v_max=8))
        gap = float(abs(lo.lam - hi.lam))
        budget = float(lo.window_error) + 2.0 ** (-90)
        assert gap <= budget

    def test_divergence_diagnostic(self):
        # the guard fires when a freshly computed layer stops decreasing
        from mpmath.libmp import fzero

        from gkw.errors import ConvergenceError

        st = init_layers(2, FAST)
        for _ in range(8):
            advance_layer(st)
        st.W[5] = fzero  # simulate a stalled history
        with pytest.raises(ConvergenceError) as err:
            advance_layer(st)
        assert "decreasing" in str(err.value)


class TestOmega:
    def test_zero_gives_base_spectrum(self, eigen_cache):
        for n in (1, 2, 3):
            res = eigen_cache(n)
            got = eigenvalue_omega(res, 0)
            expect = quad_to_float(golden_pow(-2 * n), 128)
            if n % 2 == 0:
                expect = -expect
            assert float(abs(got - expect)) < 1e-30

    def test_one_specializes_to_lambda(self, eigen_cache):
        for n in (1, 2):
            res = eigen_cache(n)
            assert float(abs(eigenvalue_omega(res, 1) - res.lam)) < 1e-35

    def test_monotone_on_grid_n1(self, eigen_cache):
        res = eigen_cache(1)
        vals = [float(eigenvalue_omega(res, Fraction(k, 8))) for k in range(9)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert 0 < vals[4] < 1

    def test_linear_coefficient_is_first_layer(self, eigen_cache):
        # d lambda(w)/dw at 0 = (-1)^(n+1) phi^(-2n) W[1], and W[1] = K(n,n)
        for n in (1, 2, 3):
            res = eigen_cache(n)
            w1 = res.layer_values[1]
            expect = quad_to_float(k_coeff(n, n), 128)
            assert float(abs(w1 - expect)) < 1e-30

    def test_domain(self, eigen_cache):
        with pytest.raises(DomainError):
            eigenvalue_omega(eigen_cache(1), 2)


class TestEigenfunction:
    def test_reference_reproduces_simple_pole(self):
        # the unit-eigenvalue coefficients must rebuild f(z) = 1/(z+1)
        gf = gfunction_reference(80, 128)
        for z in (Fraction(3, 10), Fraction(0), Fraction(1)):
            val = eigenfunction_eval(gf, z)
            expect = 1 / (BigFloat(z, 128) + 1)
            assert float(abs(val.re - expect)) < 1e-30
            assert float(abs(val.im)) < 1e-30

    def test_basis_element_root(self):
        # second basis element vanishes at z = 1/phi
        gf = gfunction_reference(3, 96)
        coeffs = (BigFloat.zero(96), BigFloat.one(96), BigFloat.zero(96))
        gf = type(gf)(n=1, lam=BigFloat.one(96), coeffs=coeffs)
        z = quad_to_float(golden_pow(-1), 96)
        val = eigenfunction_eval(gf, z)
        assert float(abs(val)) < 1e-27

    def test_domain_error(self):
        gf = gfunction_reference(10, 64)
        with pytest.raises(DomainError):
            eigenfunction_eval(gf, Fraction(-3, 4))

    def test_tail_bound_honest(self):
        short = gfunction_reference(25, 128)
        longer = gfunction_reference(90, 128)
        z = Fraction(1, 2)
        gap = abs(eigenfunction_eval(short, z).re - eigenfunction_eval(longer, z).re)
        assert gap <= eval_tail_bound(short, z)

    def test_finite_at_complex_point(self, eigen_cache):
        gf = gfunction_from_result(eigen_cache(2))
        val = eigenfunction_eval(gf, complex(0.1, 0.4))
        assert float(abs(val)) > 0


class TestFunctionalEquation:
    def test_closed_form_residual_tiny(self):
        gf = gfunction_reference(90, 128)
        resid = functional_equation_residual(gf, BigFloat.one(128), Fraction(3, 10))
        assert float(resid) < 1e-20

    def test_computed_pair_residual(self, eigen_cache):
        res = eigen_cache(2)
        gf = gfunction_from_result(res)
        resid = functional_equation_residual(gf, res.lam, Fraction(1, 2))
        assert float(resid) < 1e-6

    def test_layer_pairs_improve_with_depth(self):
        resids = []
        for vmax in (8, 32):
            opts = SpectralOptions(precision=128, v_max=vmax, refine=False)
            st = init_layers(2, opts)
            for _ in range(vmax):
                advance_layer(st)
            res = eigenvalue(2, opts)
            gf = gfunction_from_state(st, res.lam)
            resids.append(float(functional_equation_residual(gf, res.lam, Fraction(1, 2))))
        assert resids[1] < resids[0]

    def test_zero_eigenvalue_rejected(self):
        gf = gfunction_reference(10, 64)
        with pytest.raises(DomainError):
            functional_equation_residual(gf, BigFloat.zero(64), Fraction(1, 2))


class TestGTransform:
    def test_simple_pole_coefficients(self):
        # f = 1/(z+1) -> a_j = sqrt(5)(1 - (-1)^j phi^(-2j))
        got = g_transform([1], [1, 1], 12, 128)
        for j, a in enumerate(got, start=1):
            exact = QuadraticNumber(0, 1, 5) * (1 - (-1) ** j * golden_pow(-2 * j))
            assert float(abs(a - quad_to_float(exact, 128))) < 1e-33

    def test_orthogonality_on_basis_elements(self):
        # e_l -> indicator at l
        phi_inv = golden_pow(-1)
        phi = golden_pow(1)
        for ell in (1, 2, 3):
            num = [QuadraticNumber(1, 0, 5)]
            for _ in range(ell - 1):
                num = _poly_mul_test(num, [-phi_inv, QuadraticNumber(1, 0, 5)])
            den = [QuadraticNumber(1, 0, 5)]
            for _ in range(ell + 1):
                den = _poly_mul_test(den, [phi, QuadraticNumber(1, 0, 5)])
            got = g_transform(num, den, 6, 96)
            for j, a in enumerate(got, start=1):
                target = 1.0 if j == ell else 0.0
                assert abs(float(a) - target) < 1e-24

    def test_shifted_basis_gives_kernel(self):
        # e_l(z+1) -> column of kernel coefficients
        phi_inv = golden_pow(-1)
        phi = golden_pow(1)
        one = QuadraticNumber(1, 0, 5)
        for ell in (1, 2, 4):
            num = [one]
            for _ in range(ell - 1):
                num = _poly_mul_test(num, [one - phi_inv, one])
            den = [one]
            for _ in range(ell + 1):
                den = _poly_mul_test(den, [one + phi, one])
            got = g_transform(num, den, 9, 96)
            for j, a in enumerate(got, start=1):
                expect = quad_to_float(k_coeff(j, ell), 96)
                assert float(abs(a - expect)) < 1e-24

    def test_pole_at_expansion_point_rejected(self):
        phi_inv = golden_pow(-1)
        with pytest.raises(DomainError):
            g_transform([1], [-phi_inv, QuadraticNumber(1, 0, 5)], 4, 64)


def _poly_mul_test(p, q):
    out = [QuadraticNumber(0, 0, 5)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        for k, qk in enumerate(q):
            out[i + k] = out[i + k] + pi * qk
    return out


class TestSimplifiedRecursion:
    def test_gap_scales_inverse_n(self):
        # the large-index shortcut approaches the full recursion like 1/n
        opts = SpectralOptions(precision=96, v_max=4, initial_width=24)
        gaps = {}
        for n in (20, 28):
            full = eigenvalue(n, SpectralOptions(precision=96, v_max=4, refine=False))
            simp = simplified_layers(n, 4, opts)
            gaps[n] = max(
                abs(float(a - b)) for a, b in zip(full.layer_values, simp)
            )
        c_fit = gaps[20] * 20 * 1.05
        for n, g in gaps.items():
            assert g <= c_fit / n

    def test_layer_one_identical(self):
        opts = SpectralOptions(precision=96, v_max=3, initial_width=24)
        n = 21
        simp = simplified_layers(n, 3, opts)
        assert float(abs(simp[1] - quad_to_float(k_coeff(n, n), 96))) < 1e-24
