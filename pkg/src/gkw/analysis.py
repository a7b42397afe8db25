"""Asymptotics of the eigenvalue sequence: c(n), ratios, and tail fits.

c(n) rescales the eigenvalue against the geometric envelope,

    c(n) = ((-1)^(n+1) lambda_n phi^(2n) - 1) * sqrt(n),

which the asymptotic theory pins to the band (0.4, 1.7) with a limit as n
grows.  The expansion-coefficient fit over the basis n^(-p/2) is a purely
empirical least-squares estimate and is labeled as such.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PrecisionError
from .numerics import BigFloat, golden_pow, quad_to_float


@dataclass(frozen=True)
class AsymptoticsRow:
    n: int
    lam: BigFloat
    c_n: BigFloat
    err_lambda: BigFloat
    ratio_to_next: BigFloat | None = None


def asympt_c(n: int, lam: BigFloat, err: BigFloat | None = None) -> BigFloat:
    """c(n) from a computed eigenvalue; errors propagate as phi^(2n) sqrt(n).

    Raises :class:`PrecisionError` when the supplied eigenvalue error is too
    large for the rescaled quantity to carry meaning.
    """
    if n < 1:
        raise DomainError("index starts at 1")
    prec = lam.prec
    scale = quad_to_float(golden_pow(2 * n), prec)
    signed = lam if n % 2 == 1 else -lam
    sqrt_n = BigFloat(n, prec).sqrt()
    c = (signed * scale - 1) * sqrt_n
    if err is not None:
        c_err = err * scale * sqrt_n
        if not c_err < abs(c) / 4:
            raise PrecisionError(
                f"eigenvalue error {float(err):.3g} too large to extract c({n})"
            )
    return c


def rows_from_eigenvalues(pairs, errs=None) -> list[AsymptoticsRow]:
    """Assemble table rows from (n, lambda) pairs sorted by n."""
    pairs = sorted(pairs, key=lambda t: t[0])
    out = []
    for idx, (n, lam) in enumerate(pairs):
        err = errs.get(n) if errs else None
        ratio = None
        if idx + 1 < len(pairs) and pairs[idx + 1][0] == n + 1:
            ratio = lam / pairs[idx + 1][1]
        out.append(
            AsymptoticsRow(
                n=n,
                lam=lam,
                c_n=asympt_c(n, lam, err),
                err_lambda=err if err is not None else BigFloat.zero(lam.prec),
                ratio_to_next=ratio,
            )
        )
    return out


def ratio_test(lams: list[BigFloat]) -> list[BigFloat]:
    """Consecutive ratios lambda_n / lambda_(n+1) (expected to tend to -phi^2)."""
    if len(lams) < 2:
        raise DomainError("need at least two eigenvalues")
    return [lams[i] / lams[i + 1] for i in range(len(lams) - 1)]


def fit_d(rows: list[AsymptoticsRow], p_max: int) -> dict:
    """Least squares for c(n) ~ sum_{p>=0} d(p) n^(-p/2); empirical only.

    Returns the estimates, per-point residuals, and the design condition
    number.  Beyond p_max = 3 the basis is numerically nearly dependent, so
    a conditioning warning is emitted.
    """
    if p_max < 0:
        raise DomainError("p_max must be nonnegative")
    if len(rows) < p_max + 2:
        raise DomainError("need at least p_max + 2 rows to fit")
    ns = np.array([r.n for r in rows], dtype=float)
    cs = np.array([float(r.c_n) for r in rows])
    design = np.vstack([ns ** (-p / 2.0) for p in range(p_max + 1)]).T
    cond = float(np.linalg.cond(design))
    if p_max > 3:
        warnings.warn(
            f"design matrix condition number {cond:.3g}; estimates beyond "
            "p_max = 3 are ill-determined",
            RuntimeWarning,
            stacklevel=2,
        )
    coeffs, _, _, _ = np.linalg.lstsq(design, cs, rcond=None)
    fitted = design @ coeffs
    residuals = cs - fitted
    return {
        "estimates": [float(c) for c in coeffs],
        "residuals": [float(r) for r in residuals],
        "rms_residual": float(np.sqrt(np.mean(residuals**2))),
        "condition_number": cond,
        "p_max": p_max,
    }


def dump_rows_csv(rows: list[AsymptoticsRow], path) -> None:
    lines = ["n,lambda,c_n,ratio,err_lambda"]
    for r in rows:
        ratio = r.ratio_to_next.to_decimal() if r.ratio_to_next is not None else ""
        lines.append(
            f"{r.n},{r.lam.to_decimal()},{r.c_n.to_decimal()},{ratio},{r.err_lambda.to_decimal()}"
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
