"""Kernel coefficient identities and window certificates."""

import os
from fractions import Fraction

import pytest

from gkw import (
    DomainError,
    QuadraticNumber,
    TruncationError,
    golden_pow,
    jacobi_eval,
    k_coeff,
    k_window,
    quad_to_float,
)
from gkw.kernel import (
    diagonal_limit_constant,
    dump_row_csv,
    kernel_matrix_floats,
    row_sum_all,
    scaled_coeff,
)


class TestKCoeff:
    def test_entry_1_1(self):
        # direct residue expansion gives (15 - 5 sqrt5)/8 = (5/4) phi^-2
        expected = QuadraticNumber(Fraction(15, 8), Fraction(-5, 8), 5)
        assert k_coeff(1, 1) == expected
        assert k_coeff(1, 1) == golden_pow(-2) * Fraction(5, 4)
        assert str(quad_to_float(k_coeff(1, 1), 64)).startswith("0.477457")

    def test_first_column_closed_form(self):
        # symbolic residue: K(j, 1) = (5j/2) 2^-j phi^-(1+j)
        for j in range(1, 11):
            expected = golden_pow(-(1 + j)) * Fraction(5 * j, 2 ** (j + 1))
            assert k_coeff(j, 1) == expected

    def test_symmetry_instance(self):
        assert 1 * k_coeff(2, 1) == 2 * k_coeff(1, 2)

    def test_symmetry_block_exact(self):
        for ell in range(1, 61, 7):
            for j in range(1, 61, 5):
                assert ell * k_coeff(j, ell) == j * k_coeff(ell, j)

    def test_positivity(self):
        for ell in (1, 2, 7, 19):
            for j in range(1, 40, 3):
                assert k_coeff(j, ell).sign() > 0

    def test_jacobi_closed_form_agrees(self):
        # K(j, l) = 5 * 2^(j-l-2) phi^(-l-j) P_(j-1)^((l-j, 1))(3/2),
        # equivalently P = 4 S(j, l) / (5 * 4^j); exercises negative alpha
        for j in range(1, 14):
            for ell in range(1, 14):
                p = jacobi_eval(j - 1, ell - j, 1, Fraction(3, 2))
                assert p == Fraction(4 * scaled_coeff(j, ell), 5 * 4**j)

    def test_diagonal_theorem_form(self):
        # K(n, n) = (5/4) phi^(-2n) P_(n-1)^((0,1))(3/2)
        for n in range(1, 41, 4):
            p = jacobi_eval(n - 1, 0, 1, Fraction(3, 2))
            assert k_coeff(n, n) == golden_pow(-2 * n) * (Fraction(5, 4) * p)

    def test_bad_indices(self):
        with pytest.raises(DomainError):
            k_coeff(0, 1)


class TestJacobi:
    def test_degree_zero(self):
        assert jacobi_eval(0, 0, 1, Fraction(3, 2)) == 1

    def test_low_degrees_at_three_halves(self):
        # three-term recurrence, independently checked against the
        # coefficient-extraction sum below
        assert jacobi_eval(1, 0, 1, Fraction(3, 2)) == Fraction(7, 4)
        assert jacobi_eval(2, 0, 1, Fraction(3, 2)) == Fraction(29, 8)
        assert jacobi_eval(3, 0, 1, Fraction(3, 2)) == Fraction(519, 64)

    def test_two_paths_agree(self):
        # recurrence (alpha, beta > -1) vs finite sum (forced via negative
        # alpha identity P_m^(a,b) at a=0 equals the sum path by symmetry)
        for m in range(8):
            for x in (Fraction(3, 2), Fraction(1, 3), Fraction(-2, 5)):
                rec = jacobi_eval(m, 1, 2, x)
                acc = Fraction(0)
                for s in range(m + 1):
                    from math import comb

                    acc += (
                        comb(m + 1, s) * comb(m + 2, m - s) * (x - 1) ** (m - s) * (x + 1) ** s
                    )
                assert rec == acc / 2**m

    def test_negative_degree_rejected(self):
        with pytest.raises(DomainError):
            jacobi_eval(-1, 0, 1, Fraction(1, 2))


class TestRowSums:
    def test_row_sum_closed_form(self):
        # sum over the g-index is exactly 1; over the source index it is
        # 1 - (2 phi)^-j
        for j in (1, 2, 5, 9):
            acc = QuadraticNumber(0, 0, 5)
            for i in range(1, 400):
                acc = acc + k_coeff(j, i)
            gap = row_sum_all(j) - acc
            assert abs(quad_to_float(gap, 64)) < quad_to_float(
                golden_pow(-700), 64
            ) + Fraction(1, 2**60)

    def test_partial_sums_below_one(self):
        for ell in (1, 3, 12):
            acc = QuadraticNumber(0, 0, 5)
            for j in range(1, 120):
                acc = acc + k_coeff(j, ell)
                assert acc < 1


class TestKWindow:
    def test_row1_certificate(self):
        table = k_window(1, Fraction(10**30 - 1, 10**30), prec=128)
        assert table.j_lo == 1
        assert float(table.tail_mass_bound) < 1e-30
        assert table.captured_mass < 1
        assert table.captured_mass + Fraction(10, 10**30) > 1

    def test_row5_peak_at_diagonal(self):
        table = k_window(5, Fraction(999, 1000), prec=64)
        assert table.j_lo <= 5 <= table.j_hi
        peak = max(range(table.j_lo, table.j_hi + 1), key=lambda j: table.values[j])
        assert peak == 5
        # brute-force maximum over a wide scan agrees
        wide = max(range(1, 200), key=lambda j: k_coeff(j, 5))
        assert wide == 5

    def test_mass_never_exceeds_one(self):
        for ell in (1, 4, 9):
            table = k_window(ell, Fraction(99, 100), prec=64)
            assert table.captured_mass < 1

    def test_cap_raises_with_achieved_mass(self):
        with pytest.raises(TruncationError) as err:
            k_window(3, Fraction(10**40 - 1, 10**40), j_cap=6, prec=64)
        assert err.value.achieved is not None
        assert err.value.achieved < 1

    def test_bad_target(self):
        with pytest.raises(DomainError):
            k_window(2, Fraction(3, 2))


class TestDiagonalAsymptotics:
    def test_limit_constant_value(self):
        # 5^(1/4) / (2 sqrt(pi)) = 0.42183010306792...
        c = diagonal_limit_constant(96)
        assert str(c).startswith("0.4218301030679")

    def test_relative_deviation_decreasing(self):
        c = float(diagonal_limit_constant(96))
        devs = []
        for ell in (25, 50, 100):
            val = float(quad_to_float(k_coeff(ell, ell), 96)) * ell**0.5
            devs.append(abs(val - c) / c)
        assert devs[-1] < 0.05
        assert devs[0] > devs[1] > devs[2]


class TestFloatMatrix:
    def test_matches_exact_entries(self):
        mat = kernel_matrix_floats(12, 96)
        from gkw.numerics import BigFloat

        for j in (1, 5, 12):
            for i in (2, 7, 12):
                exact = quad_to_float(k_coeff(j, i), 96)
                got = BigFloat(mat[j][i], 96)
                assert abs(got - exact) <= exact.ulp() * 4


class TestCsvDump:
    def test_roundtrip(self, tmp_path):
        table = k_window(2, Fraction(99, 100), prec=64)
        path = tmp_path / "row.csv"
        dump_row_csv(table, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "j,K_a,K_b,K_float"
        assert len(lines) == (table.j_hi - table.j_lo + 1) + 1
        j, ka, kb, kf = lines[1].split(",")
        v = table.values[int(j)]
        assert Fraction(ka) == v.a and Fraction(kb) == v.b
