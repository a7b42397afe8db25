"""Exact arithmetic and float-conversion contracts."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkw import (
    PHI,
    SQRT5,
    BigFloat,
    ComplexBigFloat,
    DomainError,
    QuadraticNumber,
    golden_pow,
    quad_compare,
    quad_to_float,
)
from gkw.numerics import bigfloat_sum, sqrt_int, squarefree_decompose


def rand_quad(rng, d=5):
    def frac():
        return Fraction(rng.randint(-50, 50), rng.randint(1, 30))

    return QuadraticNumber(frac(), frac(), d)


class TestFieldAxioms:
    def test_random_axioms_bulk(self):
        rng = random.Random(20120)
        for _ in range(10_000):
            x, y, z = (rand_quad(rng) for _ in range(3))
            assert (x + y) * z == x * z + y * z
            assert (x * y) * z == x * (y * z)
            assert x + (y + z) == (x + y) + z
            if not x.is_zero():
                assert x * x.inverse() == 1
                assert (y / x) * x == y

    def test_inverse_roundtrip_exact(self):
        rng = random.Random(7)
        for _ in range(500):
            x = rand_quad(rng, d=13)
            if x.is_zero():
                continue
            assert (1 / x) * x == QuadraticNumber(1, 0, 13)

    def test_mixed_discriminants_rejected(self):
        a = QuadraticNumber(1, 1, 5)
        b = QuadraticNumber(1, 1, 2)
        with pytest.raises(DomainError):
            a + b
        with pytest.raises(DomainError):
            quad_compare(a, b)

    def test_rational_values_mix_across_fields(self):
        a = QuadraticNumber(3, 0, 5)
        b = QuadraticNumber(1, 1, 2)
        assert a + b == QuadraticNumber(4, 1, 2)


class TestGoldenPowers:
    def test_identity(self):
        assert golden_pow(0) == QuadraticNumber(1, 0, 5)

    def test_square(self):
        assert golden_pow(2) == QuadraticNumber(Fraction(3, 2), Fraction(1, 2), 5)

    def test_inverse_square(self):
        assert golden_pow(-2) == QuadraticNumber(Fraction(3, 2), Fraction(-1, 2), 5)

    def test_addition_law_exhaustive(self):
        for j in range(-200, 201, 17):
            for k in range(-200, 201, 23):
                assert golden_pow(j) * golden_pow(k) == golden_pow(j + k)

    def test_unit(self):
        for k in (-9, -1, 3, 40):
            assert golden_pow(k) * golden_pow(-k) == 1

    def test_lucas_fibonacci_structure(self):
        # 2 phi^k = L_k + F_k sqrt(5) with the integer recurrences
        lucas, fib = [2, 1], [0, 1]
        for _ in range(200):
            lucas.append(lucas[-1] + lucas[-2])
            fib.append(fib[-1] + fib[-2])
        for k in range(0, 201, 7):
            doubled = 2 * golden_pow(k)
            assert doubled.a == lucas[k]
            assert doubled.b == fib[k]


class TestCompare:
    def test_phi_inverse_is_phi_minus_one(self):
        assert quad_compare(PHI - 1, golden_pow(-1)) == 0

    def test_sqrt5_positive(self):
        assert quad_compare(2 * PHI - 1, QuadraticNumber(0, 0, 5)) > 0

    def test_mixed_sign_case(self):
        x = QuadraticNumber(Fraction(3, 2), Fraction(-1, 2), 5)  # (3-sqrt5)/2
        assert x.sign() > 0
        assert quad_compare(x, QuadraticNumber(0, 0, 5)) > 0

    def test_order_total(self):
        rng = random.Random(99)
        vals = [rand_quad(rng) for _ in range(60)]
        s = sorted(vals)
        for a, b in zip(s, s[1:]):
            assert a <= b


class TestQuadToFloat:
    def _bisection_sqrt(self, m: int, prec: int) -> Fraction:
        # integer bisection oracle: floor(sqrt(m * 4^prec)) / 2^prec
        scaled = m << (2 * prec)
        return Fraction(math.isqrt(scaled), 1 << prec)

    def test_sqrt5_against_bisection(self):
        f = quad_to_float(SQRT5, 64)
        oracle = self._bisection_sqrt(5, 80)
        assert abs(Fraction(float(f)) - oracle) < Fraction(1, 2**50)
        assert str(f).startswith("2.2360679774997896964")

    def test_inverse_square_value(self):
        f = quad_to_float(golden_pow(-2), 64)
        # (3 - sqrt5)/2 via the same bisection oracle
        oracle = (3 - self._bisection_sqrt(5, 80)) / 2
        assert abs(Fraction(float(f)) - oracle) < Fraction(1, 2**50)
        assert str(f).startswith("0.3819660112501051517")

    def test_zero(self):
        assert quad_to_float(QuadraticNumber(0, 0, 5), 64).is_zero()

    def test_heavy_cancellation(self):
        # phi^-k has components of size phi^k; conversion must stay faithful
        for k in (50, 200, 601):
            f = quad_to_float(golden_pow(-k), 64)
            direct = quad_to_float(golden_pow(1), 96) ** (-k)
            assert abs(f - direct) <= abs(direct) * Fraction(1, 2**60)

    @settings(max_examples=300, deadline=None)
    @given(
        st.fractions(min_value=-100, max_value=100),
        st.fractions(min_value=-100, max_value=100),
    )
    def test_monotone(self, a, b):
        x = QuadraticNumber(a, b, 5)
        y = QuadraticNumber(b, a, 5)
        fx, fy = quad_to_float(x, 64), quad_to_float(y, 64)
        if quad_compare(x, y) < 0:
            assert fx <= fy
        elif quad_compare(x, y) > 0:
            assert fy <= fx


class TestBigFloat:
    def test_precision_explicit(self):
        x = BigFloat(1, 64) / 3
        assert x.prec == 64
        y = x.at_prec(128)
        assert y.prec == 128

    def test_exact_int_and_fraction(self):
        assert BigFloat(12345, 64) == 12345
        assert BigFloat(Fraction(1, 4), 64) == Fraction(1, 4)

    def test_one_ulp_contract_mul(self):
        x = BigFloat(Fraction(1, 3), 96)
        y = BigFloat(Fraction(10, 7), 96)
        z = x * y
        exact = Fraction(10, 21)
        assert abs(Fraction(str(z.to_decimal(40))) - exact) < Fraction(1, 2**90)

    def test_sum_guarded(self):
        vals = [BigFloat(Fraction(1, k), 96) for k in range(1, 200)]
        s = bigfloat_sum(vals, 96)
        exact = sum(Fraction(1, k) for k in range(1, 200))
        assert abs(s - BigFloat(exact, 128)) < BigFloat(Fraction(1, 2**88), 96)

    def test_pi(self):
        assert str(BigFloat.pi(96)).startswith("3.14159265358979323846")

    def test_sqrt_domain(self):
        with pytest.raises(DomainError):
            BigFloat(-1, 64).sqrt()

    def test_sqrt_int(self):
        assert str(sqrt_int(2, 64)).startswith("1.41421356237309504")

    def test_ordering_and_abs(self):
        a, b = BigFloat(-3, 64), BigFloat(2, 64)
        assert a < b and abs(a) > b and (-a).sign() > 0

    def test_ulp(self):
        one = BigFloat.one(64)
        assert one.ulp() == BigFloat(Fraction(1, 2**63), 64)


class TestComplex:
    def test_mul_div_roundtrip(self):
        z = ComplexBigFloat(BigFloat(3, 96), BigFloat(-2, 96))
        w = ComplexBigFloat(BigFloat(Fraction(1, 3), 96), BigFloat(5, 96))
        back = (z * w) / w
        assert float(abs(back - z)) < 1e-25

    def test_abs(self):
        z = ComplexBigFloat(BigFloat(3, 64), BigFloat(4, 64))
        assert abs(abs(z) - 5) < BigFloat(Fraction(1, 2**50), 64)


class TestSquarefree:
    def test_examples(self):
        assert squarefree_decompose(12) == (2, 3)
        assert squarefree_decompose(20) == (2, 5)
        assert squarefree_decompose(5) == (1, 5)
        assert squarefree_decompose(49) == (7, 1)

    def test_reconstruction(self):
        rng = random.Random(3)
        for _ in range(200):
            m = rng.randint(1, 10**6)
            s, d = squarefree_decompose(m)
            assert s * s * d == m
