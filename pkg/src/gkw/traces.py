"""Continued-fraction fixed points, operator traces, and their decomposition.

The purely periodic continued fractions

    xi_l     = [0; l, l, l, ...]         root of  x^2 + l x - 1,
    xi_{i,j} = [0; i, j, i, j, ...]      with  i x^2 + i j x - j = 0,

are exact quadratic irrationals; the product xi_{i,j} xi_{j,i} depends only
on u = i*j and equals (u + 2 - sqrt(u(u+4)))/2.  The operator traces are

    Tr L   = sum_l 1/(xi_l^-2 + 1),
    Tr L^2 = sum_{i,j} 1/((xi_{i,j} xi_{j,i})^-2 - 1),

and the layer functions W_l(n) split them column by column (first power)
and pair by pair (second power).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyError, DomainError
from .kernel import k_coeff
from .numerics import (
    BigFloat,
    QuadraticNumber,
    bigfloat_sum,
    golden_pow,
    quad_to_float,
    squarefree_decompose,
    sqrt_int,
)
from .oracle import hurwitz_zeta
from .spectral import SpectralOptions, layer_w2_float, eigenvalue, init_layers, advance_layer


@dataclass(frozen=True)
class FixedPoint:
    """A periodic continued-fraction value, exact in its quadratic field."""

    kind: str  # "single" or "pair"
    indices: tuple
    value: QuadraticNumber  # xi_l for singles, the product for pairs

    def defining_residual(self) -> QuadraticNumber:
        """Substitute back into the defining quadratic; exactly zero."""
        x = self.value
        if self.kind == "single":
            (ell,) = self.indices
            return x * x + ell * x - 1
        u = self.indices[0] * self.indices[1]
        return x * x - (u + 2) * x + 1


def xi_single(ell: int) -> FixedPoint:
    """xi_l = (-l + sqrt(l^2 + 4)) / 2, the positive root of x^2 + lx - 1."""
    if ell < 1:
        raise DomainError("period digit must be a positive integer")
    s, d = squarefree_decompose(ell * ell + 4)
    value = QuadraticNumber(Fraction(-ell, 2), Fraction(s, 2), d)
    return FixedPoint(kind="single", indices=(ell,), value=value)


def xi_pair(i: int, j: int) -> QuadraticNumber:
    """xi_{i,j} = (-ij + sqrt(ij(ij+4))) / (2i)."""
    if i < 1 or j < 1:
        raise DomainError("period digits must be positive integers")
    u = i * j
    s, d = squarefree_decompose(u * (u + 4))
    return QuadraticNumber(Fraction(-u, 2 * i), Fraction(s, 2 * i), d)


def xi_pair_product(i: int, j: int) -> FixedPoint:
    """Exact xi_{i,j} xi_{j,i} = (u + 2 - sqrt(u(u+4)))/2 with u = ij."""
    if i < 1 or j < 1:
        raise DomainError("period digits must be positive integers")
    u = i * j
    s, d = squarefree_decompose(u * (u + 4))
    value = QuadraticNumber(Fraction(u + 2, 2), Fraction(-s, 2), d)
    return FixedPoint(kind="pair", indices=(i, j), value=value)


def single_term_exact(ell: int) -> QuadraticNumber:
    """1/(xi_l^-2 + 1) = xi^2/(1 + xi^2), exactly."""
    xi = xi_single(ell).value
    sq = xi * xi
    return sq / (1 + sq)


def _single_term_raw(ell: int, prec: int) -> BigFloat:
    # cancellation-free closed form 2 / (m + l*sqrt(m)), m = l^2 + 4
    m = ell * ell + 4
    root = sqrt_int(m, prec + 8)
    return (2 / (root * ell + m)).at_prec(prec)


def _pair_term(u: int, prec: int) -> BigFloat:
    # 1/((xi_{i,j} xi_{j,i})^-2 - 1) = 2/(u(u+4) + (u+2) sqrt(u(u+4)))
    m = u * (u + 4)
    root = sqrt_int(m, prec + 8)
    return (2 / (root * (u + 2) + m)).at_prec(prec)


@dataclass(frozen=True)
class TraceReport:
    """Trace value with method tag, term count, and tail bound.

    For the first power `alt_value` carries the independent zeta-series
    evaluation; the constructor of the report guarantees the two routes
    agree within `combined_tolerance`.
    """

    power: int
    value: BigFloat
    method: str
    terms: int
    tail_bound: BigFloat
    alt_value: BigFloat | None = None
    alt_method: str | None = None
    combined_tolerance: BigFloat | None = None


def _trace1_xi(terms: int, prec: int) -> tuple[BigFloat, BigFloat]:
    """Direct xi-sum plus an Euler-Maclaurin tail with explicit remainder."""
    wp = prec + 16
    vals = [_single_term_raw(ell, wp) for ell in range(1, terms + 1)]
    head = bigfloat_sum(vals, wp)
    t = BigFloat(terms, wp)
    m = t * t + 4
    root = m.sqrt()
    # integral_L^inf f = (sqrt(L^2+4) - L)/2 ; f(L)/2 ; B2/2! f'(L); B4/4! f'''(L)
    integral = (root - t) / 2
    f_l = _single_term_raw(terms, wp)
    fp = -2 / (root * m)  # f' = -2 (t^2+4)^(-3/2)
    fppp = 6 / (root * m * m) - (30 * t * t) / (root * m * m * m)
    tail = integral - f_l / 2 - fp * Fraction(1, 12) + fppp * Fraction(1, 720)
    # remainder: |B6/6! f^(5)| <= (1/30240) * 3240 / L^7
    remainder = BigFloat(Fraction(3240, 30240), wp) / t**7
    return (head + tail).at_prec(prec), remainder.at_prec(prec)


def _trace1_zeta(kterms: int, prec: int) -> BigFloat:
    """Alternating zeta-series form accelerated by the Euler transform.

    1/2 - 1/(2 sqrt 5) + 1/2 sum_k (-1)^(k-1) C(2k,k) (zeta(2k)-1); the raw
    terms shrink only like k^(-1/2), the transform makes them 2^-j.
    """
    wp = prec + 16
    a = [
        BigFloat(math.comb(2 * k, k), wp) * hurwitz_zeta(2 * k, 2, wp)
        for k in range(1, kterms + 1)
    ]
    acc = a[0] / 2
    diff = a
    sign = 1
    for j in range(1, kterms - 1):
        diff = [diff[i + 1] - diff[i] for i in range(len(diff) - 1)]
        sign = -sign
        acc = acc + BigFloat(sign, wp) * diff[0].ldexp(-(j + 1))
    val = BigFloat(Fraction(1, 2), wp) - 1 / (2 * sqrt_int(5, wp)) + acc / 2
    return val.at_prec(prec)


def trace_power(
    power: int,
    terms: int | None = None,
    prec: int = 128,
    cross_check_tol: Fraction = Fraction(1, 10**10),
) -> TraceReport:
    """Evaluate Tr L (power 1) or Tr L^2 (power 2) from the fixed points.

    Power 1 runs both the xi-sum (with Euler-Maclaurin tail) and the
    zeta-series (Euler transform) and enforces their agreement.  Power 2
    truncates the pair sum at i + j <= L and reports the comparison-envelope
    tail sum_{i+j>L} 1/(ij)^2, which shrinks only like 1/L.
    """
    if power == 1:
        terms = terms or 600
        value, remainder = _trace1_xi(terms, prec)
        alt = _trace1_zeta(44, prec)
        tol = BigFloat(cross_check_tol, prec) + remainder
        if abs(value - alt) > tol:
            raise ConsistencyError(
                f"trace methods disagree: {value} vs {alt} beyond {tol}"
            )
        return TraceReport(
            power=1,
            value=value,
            method="xi-sum+euler-maclaurin",
            terms=terms,
            tail_bound=remainder,
            alt_value=alt,
            alt_method="zeta-series+euler-transform",
            combined_tolerance=tol,
        )
    if power == 2:
        L = terms or 600
        wp = prec + 16
        vals = []
        for i in range(1, L):
            for j in range(i, L - i + 1):
                term = _pair_term(i * j, wp)
                vals.append(term if i == j else term.ldexp(1))
        value = bigfloat_sum(vals, prec)
        # envelope tail: sum_{i+j>L} 1/(ij)^2 <= sum_{s>L} (2 zeta(2) + o(1))/s^2
        envelope = BigFloat(4, prec) * hurwitz_zeta(2, 1, prec) / (L - 1)
        return TraceReport(
            power=2,
            value=value,
            method="pair-sum",
            terms=L,
            tail_bound=envelope,
        )
    raise DomainError("only the first and second powers are supported")


# ---------------------------------------------------------------------------
# decomposition identities
# ---------------------------------------------------------------------------


def _layer_column(ell: int, n_max: int, opts: SpectralOptions) -> list[BigFloat]:
    """W_{ell-1}(n) for n = 1..n_max (light paths for the first three)."""
    prec = opts.precision
    if ell == 1:
        return [BigFloat.one(prec) for _ in range(n_max)]
    if ell == 2:
        return [quad_to_float(k_coeff(n, n), prec) for n in range(1, n_max + 1)]
    if ell == 3:
        return [layer_w2_float(n, prec) for n in range(1, n_max + 1)]
    out = []
    for n in range(1, n_max + 1):
        state = init_layers(n, opts)
        for _ in range(ell - 1):
            advance_layer(state)
        out.append(state.layers()[ell - 1])
    return out


def column_identity(
    ell: int, n_max: int = 40, opts: SpectralOptions | None = None
) -> BigFloat:
    """Residual of sum_n (-1)^(n+1) phi^(-2n) W_{ell-1}(n) = 1/(xi_ell^-2 + 1)."""
    if ell < 1:
        raise DomainError("column index starts at 1")
    opts = opts or SpectralOptions()
    prec = opts.precision
    col = _layer_column(ell, n_max, opts)
    terms = []
    for n in range(1, n_max + 1):
        t = quad_to_float(golden_pow(-2 * n), prec + 8) * col[n - 1]
        terms.append(t if n % 2 == 1 else -t)
    lhs = bigfloat_sum(terms, prec)
    rhs = quad_to_float(single_term_exact(ell), prec)
    return abs(lhs - rhs)


def pair_identity(
    ell: int, n_max: int = 40, opts: SpectralOptions | None = None
) -> BigFloat:
    """Residual of the pair decomposition at total index ell.

    sum_{i+j=ell} sum_n phi^(-4n) W_{i-1}(n) W_{j-1}(n)
        = sum_{i+j=ell} 1/((xi_{i,j} xi_{j,i})^-2 - 1).

    Stated for ell >= 2; the pair sum is empty below that.
    """
    if ell < 2:
        raise DomainError("pair identity needs i + j = ell with i, j >= 1")
    opts = opts or SpectralOptions()
    prec = opts.precision
    columns = {i: _layer_column(i, n_max, opts) for i in range(1, ell)}
    terms = []
    for i in range(1, ell):
        j = ell - i
        for n in range(1, n_max + 1):
            scale = quad_to_float(golden_pow(-4 * n), prec + 8)
            terms.append(scale * columns[i][n - 1] * columns[j][n - 1])
    lhs = bigfloat_sum(terms, prec)
    rhs_terms = []
    for i in range(1, ell):
        j = ell - i
        prod = xi_pair_product(i, j).value
        sq = prod * prod
        rhs_terms.append(quad_to_float(sq / (1 - sq), prec + 8))
    rhs = bigfloat_sum(rhs_terms, prec)
    return abs(lhs - rhs)


def omega_trace_identity(
    power: int, ell: int, n_max: int = 40, opts: SpectralOptions | None = None
) -> BigFloat:
    """Coefficient-wise deformation identity; reduces to the column or pair form.

    Matching powers of the deformation parameter in Tr L_w and Tr L_w^2
    yields exactly the column identity (first power) and the pair identity
    (second power), so this wrapper delegates to them by name.
    """
    if power == 1:
        return column_identity(ell, n_max, opts)
    if power == 2:
        return pair_identity(ell, n_max, opts)
    raise DomainError("only the first and second powers are supported")


def spectral_trace_partial(n_terms: int, opts: SpectralOptions | None = None) -> BigFloat:
    """sum_{n<=N} lambda_n from the recurrence (for trace consistency checks)."""
    opts = opts or SpectralOptions()
    vals = [eigenvalue(n, opts).lam for n in range(1, n_terms + 1)]
    return bigfloat_sum(vals, opts.precision)


def tail_envelope(n_from: int, prec: int = 64) -> BigFloat:
    """sum_{n>=n_from} phi^(-2n) (1 + 1.7/sqrt(n)), an eigenvalue tail bound."""
    wp = prec + 8
    terms = []
    for n in range(n_from, n_from + 400):
        t = quad_to_float(golden_pow(-2 * n), wp)
        terms.append(t * (1 + BigFloat(Fraction(17, 10), wp) / BigFloat(n, wp).sqrt()))
    # geometric remainder of the envelope itself
    rem = quad_to_float(golden_pow(-2 * (n_from + 400)), wp) * 4
    return (bigfloat_sum(terms, wp) + rem).at_prec(prec)


def decomposition_matrix(
    n_max: int, l_max: int, opts: SpectralOptions | None = None
) -> dict:
    """The doubly-indexed table (-1)^(n+1) phi^(-2n) W_{l-1}(n) plus marginals.

    Rows sum (over l) toward the eigenvalues, columns sum (over n) toward
    the closed forms 1/(xi_l^-2 + 1).
    """
    opts = opts or SpectralOptions()
    prec = opts.precision
    cols = {ell: _layer_column(ell, n_max, opts) for ell in range(1, l_max + 1)}
    cells = {}
    for n in range(1, n_max + 1):
        scale = quad_to_float(golden_pow(-2 * n), prec + 8)
        sign = 1 if n % 2 == 1 else -1
        for ell in range(1, l_max + 1):
            v = scale * cols[ell][n - 1]
            cells[(n, ell)] = v if sign > 0 else -v
    row_sums = {
        n: bigfloat_sum([cells[(n, ell)] for ell in range(1, l_max + 1)], prec)
        for n in range(1, n_max + 1)
    }
    col_sums = {
        ell: bigfloat_sum([cells[(n, ell)] for n in range(1, n_max + 1)], prec)
        for ell in range(1, l_max + 1)
    }
    col_targets = {
        ell: quad_to_float(single_term_exact(ell), prec) for ell in range(1, l_max + 1)
    }
    return {
        "cells": cells,
        "row_sums": row_sums,
        "col_sums": col_sums,
        "col_targets": col_targets,
        "n_max": n_max,
        "l_max": l_max,
    }


def dump_decomposition_csv(matrix: dict, path) -> None:
    l_max, n_max = matrix["l_max"], matrix["n_max"]
    header = ["n"] + [f"l{ell}" for ell in range(1, l_max + 1)] + ["row_sum"]
    lines = [",".join(header)]
    for n in range(1, n_max + 1):
        row = [str(n)]
        row += [matrix["cells"][(n, ell)].to_decimal() for ell in range(1, l_max + 1)]
        row.append(matrix["row_sums"][n].to_decimal())
        lines.append(",".join(row))
    col = ["col_sum"] + [
        matrix["col_sums"][ell].to_decimal() for ell in range(1, l_max + 1)
    ] + [""]
    tgt = ["col_target"] + [
        matrix["col_targets"][ell].to_decimal() for ell in range(1, l_max + 1)
    ] + [""]
    lines.append(",".join(col))
    lines.append(",".join(tgt))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
