"""The coupling kernel K(j, l) and Jacobi polynomial evaluation.

K(j, l) is the j-th golden-basis coefficient of the unit-shifted basis
element; it reduces to the exact closed form

    K(j, l) = S(j, l) * (2*phi)**-(j+l),
    S(j, l) = 5 * sum_b C(l-1, b) * C(j, j-1-b) * 5**b   (a positive integer),

obtained by expanding the residue representation.  Everything here is exact
in Q(sqrt(5)); floats are produced by a single final rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, TruncationError
from .numerics import (
    BigFloat,
    QuadraticNumber,
    Rational,
    golden_pow,
    quad_to_float,
)

DEFAULT_JCAP_SLOPE = 8
DEFAULT_JCAP_OFFSET = 200


def default_j_cap(ell: int) -> int:
    return DEFAULT_JCAP_SLOPE * ell + DEFAULT_JCAP_OFFSET


def scaled_coeff(j: int, ell: int) -> int:
    """The integer S(j, l) with K(j, l) = S(j, l) * (2*phi)**-(j+l)."""
    if j < 1 or ell < 1:
        raise DomainError("kernel indices start at 1")
    comb = math.comb
    return 5 * sum(
        comb(ell - 1, b) * comb(j, j - 1 - b) * 5**b for b in range(min(ell, j))
    )


def k_coeff(j: int, ell: int) -> QuadraticNumber:
    """Exact kernel coefficient K(j, l) in Q(sqrt(5))."""
    s = scaled_coeff(j, ell)
    return golden_pow(-(j + ell)) * Fraction(s, 2 ** (j + ell))


def row_sum_all(j: int) -> QuadraticNumber:
    """Exact sum over the second index: sum_i K(j, i) = 1 - (2*phi)**-j."""
    if j < 1:
        raise DomainError("kernel indices start at 1")
    return 1 - golden_pow(-j) * Fraction(1, 2**j)


def _binom_general(n: int, k: int) -> Fraction:
    # falling-factorial binomial for possibly negative n
    if k < 0:
        return Fraction(0)
    num = 1
    for i in range(k):
        num *= n - i
    return Fraction(num, math.factorial(k))


def jacobi_eval(m: int, alpha: int, beta: int, x: Rational) -> Fraction:
    """Exact Jacobi polynomial value P_m^(alpha, beta)(x) for rational x.

    Integer parameters only.  For alpha, beta > -1 the classical three-term
    recurrence is used; otherwise the finite coefficient-extraction sum

        P_m = 2**-m * sum_s C(m+alpha, s) C(m+beta, m-s) (x-1)**(m-s) (x+1)**s

    which stays valid for negative integer parameters.
    """
    if m < 0:
        raise DomainError("degree must be nonnegative")
    x = Fraction(x)
    if alpha > -1 and beta > -1:
        p_prev = Fraction(1)
        if m == 0:
            return p_prev
        p_cur = Fraction(alpha + 1) + Fraction(alpha + beta + 2) * (x - 1) / 2
        for k in range(2, m + 1):
            c0 = 2 * k * (k + alpha + beta) * (2 * k + alpha + beta - 2)
            c1 = 2 * k + alpha + beta - 1
            c1x = (2 * k + alpha + beta) * (2 * k + alpha + beta - 2)
            c1c = alpha * alpha - beta * beta
            c2 = 2 * (k + alpha - 1) * (k + beta - 1) * (2 * k + alpha + beta)
            p_next = (c1 * (c1x * x + c1c) * p_cur - c2 * p_prev) / c0
            p_prev, p_cur = p_cur, p_next
        return p_cur
    acc = Fraction(0)
    for s in range(m + 1):
        acc += (
            _binom_general(m + alpha, s)
            * _binom_general(m + beta, m - s)
            * (x - 1) ** (m - s)
            * (x + 1) ** s
        )
    return acc / 2**m


@dataclass(frozen=True)
class KernelTable:
    """A cached window of one kernel row, with a certified tail bound.

    ``values[j] = K(j, ell)`` exactly for j in [j_lo, j_hi]; since the full
    row sums to 1 exactly, ``tail_mass_bound`` (an upward rounding of
    1 - captured mass) certifies what the window misses.
    """

    ell: int
    j_lo: int
    j_hi: int
    values: dict[int, QuadraticNumber]
    tail_mass_bound: BigFloat
    captured_mass: QuadraticNumber

    def __post_init__(self):
        if not (1 <= self.j_lo <= self.ell <= self.j_hi):
            raise DomainError("window must contain the diagonal index")


_ROW_CACHE: dict[tuple[int, str], KernelTable] = {}


def k_window(
    ell: int,
    mass_target,
    j_cap: int | None = None,
    prec: int = 64,
) -> KernelTable:
    """Grow a window around j = ell until it captures mass >= mass_target.

    The captured mass is an exact partial row sum, hence a certified lower
    bound.  If the cap is hit first, a :class:`TruncationError` carrying the
    achieved mass is raised.  Results are cached per (ell, mass_target).
    """
    if ell < 1:
        raise DomainError("row index starts at 1")
    target = Fraction(mass_target)
    if not 0 < target < 1:
        raise DomainError("mass target must lie strictly between 0 and 1")
    if j_cap is None:
        j_cap = default_j_cap(ell)
    if j_cap < ell:
        raise DomainError(f"cap {j_cap} excludes the diagonal index {ell}")

    key = (ell, f"{target}|{j_cap}")
    hit = _ROW_CACHE.get(key)
    if hit is not None:
        return hit

    values: dict[int, QuadraticNumber] = {ell: k_coeff(ell, ell)}
    mass = values[ell]
    lo = hi = ell
    width = 1
    while mass <= target:
        grew = False
        for _ in range(width):
            if lo > 1:
                lo -= 1
                values[lo] = k_coeff(lo, ell)
                mass = mass + values[lo]
                grew = True
        for _ in range(width):
            if hi < j_cap:
                hi += 1
                values[hi] = k_coeff(hi, ell)
                mass = mass + values[hi]
                grew = True
            if mass > target:
                break
        if not grew:
            raise TruncationError(
                f"row {ell}: cap {j_cap} reached with mass below target",
                achieved=mass,
            )
        width *= 2

    deficit = 1 - mass
    table = KernelTable(
        ell=ell,
        j_lo=lo,
        j_hi=hi,
        values=values,
        tail_mass_bound=BigFloat(
            libmp_round_up(deficit, prec), prec
        ),
        captured_mass=mass,
    )
    _ROW_CACHE.setdefault(key, table)
    return table


def libmp_round_up(x: QuadraticNumber, prec: int):
    """Raw float upper bound of an exact nonnegative value."""
    f = quad_to_float(x, prec + 8)
    up = f + f.ulp()
    return up.at_prec(prec).raw


_S_TABLE: dict = {"size": 0, "table": None}


def kernel_matrix_scaled(j_hi: int) -> list[list[int]]:
    """S(j, i) for 1 <= j, i <= j_hi as a dense integer table.

    Uses the exact symmetry i*S(j, i) = j*S(i, j) to fill the lower half.
    The table is cached and grown on demand; callers may receive a larger
    table than requested and must index within their own bound.
    """
    if _S_TABLE["size"] >= j_hi:
        return _S_TABLE["table"]
    comb = math.comb
    pow5 = [5**b for b in range(j_hi + 1)]
    crow = [[comb(m, t) for t in range(m + 1)] for m in range(j_hi + 1)]
    S = [[0] * (j_hi + 1) for _ in range(j_hi + 1)]
    for i in range(1, j_hi + 1):
        ci = crow[i - 1]
        for j in range(i, j_hi + 1):
            cj = crow[j]
            acc = 0
            for b in range(min(i, j)):
                acc += ci[b] * cj[j - 1 - b] * pow5[b]
            S[j][i] = 5 * acc
            if j != i:
                # exact symmetry: i * S(j, i) = j * S(i, j)
                S[i][j] = (S[j][i] * i) // j
    _S_TABLE["size"] = j_hi
    _S_TABLE["table"] = S
    return S


def kernel_matrix_floats(j_hi: int, prec: int) -> list[list]:
    """K(j, i) over [1, j_hi]^2 as raw mpf values, each rounded once.

    Returned as a (j_hi+1) x (j_hi+1) table indexed from 1; row/column 0 is
    unused padding.
    """
    from mpmath.libmp import fzero, from_int, mpf_mul, mpf_sqrt, mpf_add, mpf_div

    wp = prec + 32
    S = kernel_matrix_scaled(j_hi)
    # exact (2*phi)**-1 = (sqrt(5)-1)/4, powered at working precision
    sqrt5 = mpf_sqrt(from_int(5), wp, "n")
    inv2phi = mpf_div(mpf_add(sqrt5, from_int(-1), wp, "n"), from_int(4), wp, "n")
    powers = [None] * (2 * j_hi + 1)
    powers[0] = from_int(1)
    for m in range(1, 2 * j_hi + 1):
        powers[m] = mpf_mul(powers[m - 1], inv2phi, wp, "n")
    out = [[fzero] * (j_hi + 1) for _ in range(j_hi + 1)]
    for j in range(1, j_hi + 1):
        row = out[j]
        Sj = S[j]
        for i in range(1, j_hi + 1):
            row[i] = mpf_mul(from_int(Sj[i]), powers[j + i], prec, "n")
    return out


def diagonal_limit_constant(prec: int) -> BigFloat:
    """The limit of K(l, l)*sqrt(l): 5**(1/4) / (2*sqrt(pi))."""
    root5 = BigFloat(5, prec + 8).sqrt().sqrt()
    return (root5 / (BigFloat.pi(prec + 8).sqrt() * 2)).at_prec(prec)


def dump_row_csv(table: KernelTable, path, prec: int = 64) -> None:
    """Write one kernel row: j, exact components, and a float rendering."""
    lines = ["j,K_a,K_b,K_float"]
    for j in range(table.j_lo, table.j_hi + 1):
        v = table.values[j]
        f = quad_to_float(v, prec)
        lines.append(f"{j},{v.a},{v.b},{f.to_decimal()}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
