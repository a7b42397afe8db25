"""Independent matrix-truncation route to the transfer-operator spectrum.

The operator acts on Taylor coefficients about a basis point z0 inside the
disc of analyticity; its matrix entries are finite binomial sums of Hurwitz
zeta values,

    M[a][k] = sum_b C(k, b) (-z0)^(k-b) (-1)^a C(a+b+1, a) zeta(a+b+2, 1+z0),

so a dense N x N truncation plus a shifted-QR eigensolve cross-checks the
layer recurrence with no shared machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath.libmp import (
    from_int,
    fzero,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_mul,
    mpf_neg,
    mpf_pos,
    mpf_pow_int,
    mpf_shift,
    mpf_sub,
)

from .errors import ConvergenceError, DomainError
from .numerics import BigFloat, Rational, _fraction_to_raw

_RND = "n"

# B_2 .. B_22 as exact rationals; B_22 backs the remainder bound.
BERNOULLI = {
    2: Fraction(1, 6),
    4: Fraction(-1, 30),
    6: Fraction(1, 42),
    8: Fraction(-1, 30),
    10: Fraction(5, 66),
    12: Fraction(-691, 2730),
    14: Fraction(7, 6),
    16: Fraction(-3617, 510),
    18: Fraction(43867, 798),
    20: Fraction(-174611, 330),
    22: Fraction(854513, 138),
}
_EM_TERMS = 10  # uses B_2 .. B_20


def bernoulli_numbers(n_max: int) -> list[Fraction]:
    """B_0..B_n from the defining recurrence (test oracle for the table)."""
    out = [Fraction(1)]
    for m in range(1, n_max + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * out[k]
        out.append(-acc / (m + 1))
    return out


def hurwitz_zeta(s: int, a, prec: int) -> BigFloat:
    """zeta(s, a) = sum_{k>=0} (a+k)^-s by Euler-Maclaurin, faithful to 2 ulp.

    The direct-sum cutoff M is raised until the first omitted correction
    term (the B_22 term) is provably below 2^-(prec+4) relative to the
    leading magnitude a^-s.
    """
    if s < 2:
        raise DomainError("exponent must be an integer >= 2")
    a = Fraction(a) if not isinstance(a, BigFloat) else a
    if isinstance(a, Fraction):
        if a <= 0:
            raise DomainError("offset must be positive")
        a_raw = _fraction_to_raw(a, prec + 32)
        a_float = float(a)
    else:
        if a.sign() <= 0:
            raise DomainError("offset must be positive")
        a_raw = a.raw
        a_float = float(a)

    wp = prec + 32

    # remainder constant: |B_22|/22! * (s)_21 * (a+M)^(-s-21)  vs  a^-s
    lead = Fraction(BERNOULLI[22].numerator, BERNOULLI[22].denominator * math.factorial(22))
    rising = 1
    for i in range(2 * _EM_TERMS + 1):
        rising *= s + i
    m_cut = 16
    while True:
        rel = float(lead) * rising * (a_float + m_cut) ** -(2 * _EM_TERMS + 1) * (
            (a_float + m_cut) / a_float
        ) ** -s
        if rel < 2.0 ** -(prec + 4):
            break
        m_cut *= 2

    acc = fzero
    for k in range(m_cut):
        term = mpf_pow_int(
            mpf_add(a_raw, from_int(k), wp, _RND), -s, wp, _RND
        )
        acc = mpf_add(acc, term, wp, _RND)
    am = mpf_add(a_raw, from_int(m_cut), wp, _RND)
    am_inv = mpf_div(from_int(1), am, wp, _RND)
    # (a+M)^(1-s)/(s-1)
    acc = mpf_add(
        acc,
        mpf_div(mpf_pow_int(am, 1 - s, wp, _RND), from_int(s - 1), wp, _RND),
        wp,
        _RND,
    )
    # (a+M)^-s / 2
    pw = mpf_pow_int(am, -s, wp, _RND)
    acc = mpf_add(acc, mpf_shift(pw, -1), wp, _RND)
    # sum_j B_2j/(2j)! (s)_(2j-1) (a+M)^(-s-2j+1)
    pw = mpf_mul(pw, am_inv, wp, _RND)  # (a+M)^(-s-1)
    rising = s
    fact = 1
    for j in range(1, _EM_TERMS + 1):
        b = BERNOULLI[2 * j]
        fact = math.factorial(2 * j)
        coeff = Fraction(b.numerator * rising, b.denominator * fact)
        acc = mpf_add(
            acc, mpf_mul(_fraction_to_raw(coeff, wp), pw, wp, _RND), wp, _RND
        )
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        pw = mpf_mul(pw, mpf_mul(am_inv, am_inv, wp, _RND), wp, _RND)
    return BigFloat(mpf_pos(acc, prec, _RND), prec)


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense truncation of the transfer operator in a Taylor basis."""

    dim: int
    precision: int
    center: Fraction
    entries: tuple  # row-major raw mpf values

    def entry(self, a: int, k: int) -> BigFloat:
        return BigFloat(self.entries[a * self.dim + k], self.precision)

    def trace(self) -> BigFloat:
        wp = self.precision + 16
        acc = fzero
        for a in range(self.dim):
            acc = mpf_add(acc, self.entries[a * self.dim + a], wp, _RND)
        return BigFloat(mpf_pos(acc, self.precision, _RND), self.precision)


def build_matrix(N: int, prec: int, center: Rational = Fraction(1)) -> TruncatedOperator:
    """Assemble the N x N truncation about the given basis point."""
    if N < 2:
        raise DomainError("dimension must be at least 2")
    z0 = Fraction(center)
    if not 0 < z0 <= 2:
        raise DomainError("basis point must lie inside the analyticity disc")
    wp = prec + 32
    zetas = {
        s: hurwitz_zeta(s, 1 + z0, wp).raw for s in range(2, 2 * N + 1)
    }
    neg_z0 = -z0
    rows: list = [fzero] * (N * N)
    comb = math.comb
    for k in range(N):
        # (-z0)^(k-b) as exact rationals
        zpows = [neg_z0 ** (k - b) for b in range(k + 1)]
        for a in range(N):
            acc = fzero
            for b in range(k + 1):
                c = comb(k, b) * zpows[b]
                if c == 0:
                    continue
                coeff = Fraction((-1) ** a * comb(a + b + 1, a)) * c
                acc = mpf_add(
                    acc,
                    mpf_mul(_fraction_to_raw(coeff, wp), zetas[a + b + 2], wp, _RND),
                    wp,
                    _RND,
                )
            rows[a * N + k] = mpf_pos(acc, prec + 16, _RND)
    return TruncatedOperator(dim=N, precision=prec, center=z0, entries=tuple(rows))


def _balance(M: "mpmath.matrix", max_sweeps: int = 8) -> None:
    """Two-sided power-of-2 diagonal scaling (exact; improves conditioning)."""
    n = M.rows
    for _ in range(max_sweeps):
        done = True
        for i in range(n):
            r = mpmath.mpf(0)
            c = mpmath.mpf(0)
            for j in range(n):
                if j != i:
                    r += abs(M[i, j])
                    c += abs(M[j, i])
            if r == 0 or c == 0:
                continue
            e = 0
            # scaling row i by d and column i by 1/d sends (r, c) to (r*d, c/d);
            # drive them together with d a power of two
            while c < r / 2:
                c *= 2
                r /= 2
                e -= 1
            while c >= 2 * r:
                c /= 2
                r *= 2
                e += 1
            if e:
                done = False
                scale = mpmath.mpf(2) ** e
                for j in range(n):
                    M[i, j] *= scale
                    M[j, i] /= scale
        if done:
            return


def oracle_eigenvalues(N: int, count: int, prec: int, center: Rational = Fraction(1)) -> list[BigFloat]:
    """Leading eigenvalues by modulus from the dense truncation.

    Balanced Hessenberg + shifted QR at working precision (mpmath's dense
    eigensolver).  The leading `count` eigenvalues must come out real;
    otherwise a :class:`ConvergenceError` with diagnostics is raised.
    """
    if count > N:
        raise DomainError("cannot extract more eigenvalues than the dimension")
    op = build_matrix(N, prec, center)
    wp = prec + 16
    with mpmath.workprec(wp):
        M = mpmath.matrix(N, N)
        for a in range(N):
            for k in range(N):
                M[a, k] = mpmath.mp.make_mpf(op.entries[a * N + k])
        _balance(M)
        try:
            eigs = mpmath.eig(M, left=False, right=False)
        except RuntimeError as exc:  # mpmath signals QR stagnation this way
            raise ConvergenceError(
                "QR iteration did not converge", diagnostics={"N": N, "prec": prec}
            ) from exc
        eigs.sort(key=lambda z: (-abs(z), mpmath.arg(z)))
        out = []
        for z in eigs[:count]:
            if abs(z.imag) > abs(z) * mpmath.mpf(2) ** (-prec // 4) + mpmath.mpf(2) ** (-prec // 2):
                raise ConvergenceError(
                    "leading eigenvalue came out non-real",
                    diagnostics={"N": N, "value": str(z)},
                )
            out.append(BigFloat(z.real._mpf_, prec))
    return out


def stable_eigenvalues(
    N: int, count: int, prec: int, step: int = 10
) -> tuple[list[BigFloat], BigFloat]:
    """Eigenvalues at N together with the max shift against dimension N+step."""
    base = oracle_eigenvalues(N, count, prec)
    bigger = oracle_eigenvalues(N + step, count, prec)
    drift = max(abs(x - y) for x, y in zip(base, bigger))
    return base, drift


def dump_spectrum_csv(N: int, eigenvalues: list[BigFloat], path) -> None:
    lines = ["N,index,eigenvalue"]
    for i, lam in enumerate(eigenvalues, start=1):
        lines.append(f"{N},{i},{lam.to_decimal()}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
