"""Layered eigenvalue series and eigenfunctions in the golden basis.

The normalized layers W[v] and coefficient layers w_j^(v) satisfy

    W[0] = 1,  w_j^(0) = [j == n],  w_n^(v) = 0 for v >= 1,
    W[v]   = sum_{r<v} sum_i w_i^(v-r-1) K(n, i) W[r],
    w_j^(v) = [ same sum at j  -  sum_{r=1..v} w_j^(v-r) W[r] ] / d_j,
    d_j    = 1 - (-1)^(n+j) phi^(2n-2j),

and the n-th eigenvalue is (-1)^(n+1) phi^(-2n) sum_v W[v].  Layer terms
decay like 1/v^2, so the raw partial sum converges slowly; the series is
therefore also summed in closed form by solving its fixed-point equation at
unit deformation (`refine`), which is exact in the window and converges
geometrically as the window widens.  A flat-tail closure column absorbs the
non-decaying part of the eigenvector using the exact row sums
sum_i K(j, i) = 1 - (2 phi)^-j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath.libmp import (
    from_int,
    fzero,
    fone,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_mul,
    mpf_neg,
    mpf_pos,
    mpf_sub,
)

from .errors import ConvergenceError, DomainError
from .kernel import k_coeff, kernel_matrix_floats, scaled_coeff
from .numerics import (
    BigFloat,
    ComplexBigFloat,
    QuadraticNumber,
    bigfloat_sum,
    golden_pow,
    quad_to_float,
)

_RND = "n"


@dataclass(frozen=True)
class SpectralOptions:
    """Knobs for the layered computation; precision is always explicit."""

    precision: int = 128
    v_max: int = 32
    initial_width: int = 32
    mass_tol: Fraction = Fraction(1, 10**20)
    j_cap: int | None = None
    refine: bool = True
    solver_width: int | None = None
    window_check: bool = True

    def cap_for(self, n: int) -> int:
        return self.j_cap if self.j_cap is not None else 8 * n + 200

    def solver_width_for(self, n: int) -> int:
        # window error of the fixed point decays like ~10^(-0.2 width) in the
        # worst observed case; 72 gives comfortably more than the 1e-10-level
        # accuracy the cross-checks consume, at cubic solve cost.
        if self.solver_width is not None:
            return self.solver_width
        digits = min(self.precision * 0.30103 - 6, 14.0)
        return max(56, int(digits / 0.18) + 8)


# ---------------------------------------------------------------------------
# window machinery
# ---------------------------------------------------------------------------


def _round16(x: int) -> int:
    return ((x + 15) // 16) * 16


def _layer1_mass(n: int, hi: int, prec: int) -> BigFloat:
    """sum_j |w_j^(1)| over the window; w_j^(1) = K(j, n)/d_j closed form."""
    terms = []
    for j in range(1, hi + 1):
        if j == n:
            continue
        w = k_coeff(j, n) / divisor(n, j)
        terms.append(abs(quad_to_float(w, prec)))
    return bigfloat_sum(terms, prec)


def divisor(n: int, j: int) -> QuadraticNumber:
    """The exact recurrence divisor d_j = 1 - (-1)^(n+j) phi^(2n-2j)."""
    if j == n:
        raise DomainError("divisor vanishes only at j = n, which is excluded")
    return 1 - (-1) ** (n + j) * golden_pow(2 * (n - j))


def choose_window(n: int, opts: SpectralOptions) -> int:
    """Double the window until the layer-1 mass stabilizes within mass_tol."""
    if n < 1:
        raise DomainError("eigenvalue index starts at 1")
    cap = opts.cap_for(n)
    if cap < n:
        raise DomainError(f"window cap {cap} cannot include j = n = {n}")
    prec = min(opts.precision, 96)
    tol = BigFloat(opts.mass_tol, prec)
    w = opts.initial_width
    mass = _layer1_mass(n, n + w, prec)
    while n + 2 * w <= cap:
        mass2 = _layer1_mass(n, n + 2 * w, prec)
        if abs(mass2 - mass) < tol:
            return min(_round16(n + 2 * w), cap)
        w, mass = 2 * w, mass2
    return cap


# ---------------------------------------------------------------------------
# layer state
# ---------------------------------------------------------------------------

_KMAT_CACHE: dict[tuple[int, int], list[list]] = {}


def _kernel_floats(j_hi: int, prec: int) -> list[list]:
    key = (j_hi, prec)
    m = _KMAT_CACHE.get(key)
    if m is None:
        m = kernel_matrix_floats(j_hi, prec + 16)
        _KMAT_CACHE.setdefault(key, m)
    return m


@dataclass
class LayerState:
    """Recurrence state for one eigenvalue index.

    W[v] and what[v][j] hold the normalized layers as raw mantissa/exponent
    tuples at `precision` plus guard bits; `layers()` exposes them as
    BigFloat.  States advance sequentially in v; distinct n are independent.
    """

    n: int
    j_hi: int
    precision: int
    W: list = field(default_factory=list)
    what: list = field(default_factory=list)
    _conv: list = field(default_factory=list)
    _kmat: list | None = None
    _div: list | None = None

    @property
    def v_done(self) -> int:
        return len(self.W) - 1

    @property
    def window(self) -> tuple[int, int]:
        return (1, self.j_hi)

    def layers(self) -> list[BigFloat]:
        return [BigFloat(mpf_pos(w, self.precision, _RND), self.precision) for w in self.W]

    def coefficient_layer(self, v: int) -> list[BigFloat]:
        p = self.precision
        return [BigFloat(mpf_pos(x, p, _RND), p) for x in self.what[v]]


def init_layers(n: int, opts: SpectralOptions | None = None, j_hi: int | None = None) -> LayerState:
    """State at v = 0: W = [1] and the coefficient unit vector at j = n."""
    opts = opts or SpectralOptions()
    if j_hi is None:
        j_hi = choose_window(n, opts)
    if j_hi < n:
        raise DomainError(f"window [1, {j_hi}] does not include j = n = {n}")
    w0 = [fzero] * (j_hi + 1)
    w0[n] = fone
    return LayerState(n=n, j_hi=j_hi, precision=opts.precision, W=[fone], what=[w0])


def advance_layer(state: LayerState) -> LayerState:
    """Append one layer, returning the same state with v_done + 1."""
    n, hi = state.n, state.j_hi
    wp = state.precision + 24
    if state._kmat is None:
        state._kmat = _kernel_floats(hi, state.precision)
        state._div = [None] * (hi + 1)
        for j in range(1, hi + 1):
            if j != n:
                state._div[j] = quad_to_float(divisor(n, j), wp).raw
    K, dv = state._kmat, state._div
    v = state.v_done + 1
    u = v - 1

    prev = state.what[u]
    support = [i for i in range(1, hi + 1) if prev[i] != fzero]
    conv = [fzero] * (hi + 1)
    for j in range(1, hi + 1):
        Kj = K[j]
        acc = fzero
        for i in support:
            acc = mpf_add(acc, mpf_mul(prev[i], Kj[i], wp, _RND), wp, _RND)
        conv[j] = acc
    state._conv.append(conv)

    Wls = state.W
    acc = fzero
    for r in range(v):
        acc = mpf_add(acc, mpf_mul(state._conv[u - r][n], Wls[r], wp, _RND), wp, _RND)
    Wv = acc
    state.W.append(Wv)

    new = [fzero] * (hi + 1)
    for j in range(1, hi + 1):
        if j == n:
            continue
        acc = fzero
        for r in range(v):
            acc = mpf_add(acc, mpf_mul(state._conv[u - r][j], Wls[r], wp, _RND), wp, _RND)
        for r in range(1, v + 1):
            acc = mpf_sub(acc, mpf_mul(state.what[v - r][j], Wls[r], wp, _RND), wp, _RND)
        new[j] = mpf_div(acc, dv[j], wp, _RND)
    state.what.append(new)

    if v >= 8 and mpf_cmp(mpf_abs(Wv), mpf_abs(state.W[v - 4])) > 0:
        raise ConvergenceError(
            f"layer magnitudes stopped decreasing at v = {v} (window too small?)",
            diagnostics={"n": n, "v": v, "j_hi": hi},
        )
    return state


# ---------------------------------------------------------------------------
# fixed-point refinement (series summed to all layers)
# ---------------------------------------------------------------------------


def _closure_kernel(n: int, J: int, prec: int) -> tuple[list[list], list]:
    """Kernel float window plus the flat-tail closure folded into column J."""
    wp = prec + 16
    K = [row[:] for row in _kernel_floats(J, prec)]
    for j in range(1, J + 1):
        sigma = quad_to_float(1 - golden_pow(-j) * Fraction(1, 2**j), wp).raw
        acc = fzero
        for i in range(1, J + 1):
            acc = mpf_add(acc, K[j][i], wp, _RND)
        delta = mpf_sub(sigma, acc, wp, _RND)
        if mpf_cmp(delta, fzero) > 0:
            K[j][J] = mpf_add(K[j][J], delta, wp, _RND)
    eps = [None] * (J + 1)
    for j in range(1, J + 1):
        e = (-1) ** (n + j) * golden_pow(2 * (n - j))
        eps[j] = quad_to_float(e, wp).raw
    return K, eps


def _lu_solve(M: list[list], b: list, wp: int) -> list:
    """In-place LU with partial pivoting on raw mpf rows."""
    m = len(M)
    for col in range(m):
        piv, pmag = col, mpf_abs(M[col][col])
        for r in range(col + 1, m):
            mag = mpf_abs(M[r][col])
            if mpf_cmp(mag, pmag) > 0:
                piv, pmag = r, mag
        if pmag == fzero:
            raise ConvergenceError("singular system in fixed-point solve")
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            b[col], b[piv] = b[piv], b[col]
        prow = M[col]
        pinv = mpf_div(fone, prow[col], wp, _RND)
        for r in range(col + 1, m):
            row = M[r]
            if row[col] == fzero:
                continue
            f = mpf_mul(row[col], pinv, wp, _RND)
            row[col] = fzero
            for c in range(col + 1, m):
                if prow[c] != fzero:
                    row[c] = mpf_sub(row[c], mpf_mul(f, prow[c], wp, _RND), wp, _RND)
            b[r] = mpf_sub(b[r], mpf_mul(f, b[col], wp, _RND), wp, _RND)
    x = [fzero] * m
    for r in range(m - 1, -1, -1):
        acc = b[r]
        row = M[r]
        for c in range(r + 1, m):
            acc = mpf_sub(acc, mpf_mul(row[c], x[c], wp, _RND), wp, _RND)
        x[r] = mpf_div(acc, row[r], wp, _RND)
    return x


def solve_fixed_point(
    n: int, J: int, prec: int, t0: BigFloat
) -> tuple[BigFloat, list[BigFloat], int]:
    """Solve the all-layers fixed point for T = phi^(2n) |lambda_n|.

    Secant iteration on g(T) = (T - 1) - T * (K A(T))_n, where A(T) solves
    the off-index linear system; returns (T, eigenvector A with A_n = 1,
    iterations).  The eigenvector is the g-coefficient vector of the
    eigenfunction normalized to unit n-th coefficient.
    """
    wp = prec + 24
    K, eps = _closure_kernel(n, J, prec)
    idx = [j for j in range(1, J + 1) if j != n]
    pos = {j: r for r, j in enumerate(idx)}

    def g(traw):
        M = []
        b = []
        for j in idx:
            dj = mpf_sub(traw, eps[j], wp, _RND)
            Kj = K[j]
            row = [
                mpf_sub(
                    dj if i == j else fzero,
                    mpf_mul(traw, Kj[i], wp, _RND),
                    wp,
                    _RND,
                )
                for i in idx
            ]
            M.append(row)
            b.append(mpf_mul(traw, Kj[n], wp, _RND))
        x = _lu_solve(M, b, wp)
        s = K[n][n]
        Kn = K[n]
        for j in idx:
            s = mpf_add(s, mpf_mul(Kn[j], x[pos[j]], wp, _RND), wp, _RND)
        resid = mpf_sub(
            mpf_sub(traw, fone, wp, _RND), mpf_mul(traw, s, wp, _RND), wp, _RND
        )
        return resid, x

    t1 = t0.at_prec(wp).raw
    t2 = mpf_mul(t1, BigFloat(Fraction(10**6 + 1, 10**6), wp).raw, wp, _RND)
    g1, _ = g(t1)
    g2, x2 = g(t2)
    tol_shift = prec - 6
    iterations = 2
    for _ in range(48):
        denom = mpf_sub(g2, g1, wp, _RND)
        if denom == fzero:
            break
        step = mpf_mul(g2, mpf_div(mpf_sub(t2, t1, wp, _RND), denom, wp, _RND), wp, _RND)
        t3 = mpf_sub(t2, step, wp, _RND)
        done = mpf_cmp(
            mpf_abs(mpf_sub(t3, t2, wp, _RND)),
            mpf_abs(mpf_mul(t3, BigFloat.exp2(-tol_shift, wp).raw, wp, _RND)),
        ) < 0
        t1, g1 = t2, g2
        t2 = t3
        g2, x2 = g(t2)
        iterations += 1
        if done:
            break
    else:
        raise ConvergenceError(
            "fixed-point iteration did not converge",
            diagnostics={"n": n, "J": J, "prec": prec},
        )
    A = [BigFloat.zero(prec)] * (J + 1)
    for j in idx:
        A[j] = BigFloat(mpf_pos(x2[pos[j]], prec, _RND), prec)
    A[n] = BigFloat.one(prec)
    return BigFloat(mpf_pos(t2, prec, _RND), prec), A, iterations


# ---------------------------------------------------------------------------
# eigenvalue assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenvalueResult:
    """One eigenvalue with its layer decomposition and error estimates.

    `lam` is the refined value when `refined` is true, otherwise the raw
    partial sum over the computed layers (which carries an O(1/v_max)
    truncation error; see the tail fields).
    """

    n: int
    lam: BigFloat
    partial_sum: BigFloat
    layer_values: tuple
    window: tuple[int, int]
    v_max: int
    precision: int
    tail_conservative: BigFloat
    tail_heuristic: BigFloat
    fitted_constant: float
    refined: bool
    window_error: BigFloat | None = None
    eigvec: tuple | None = None
    solver_window: int | None = None

    @property
    def contributions(self) -> list[BigFloat]:
        scale = quad_to_float(golden_pow(-2 * self.n), self.precision)
        return [w * scale for w in self.layer_values]

    @property
    def magnitude_total(self) -> BigFloat:
        """phi^(2n) |lambda_n|, i.e. the summed layer series."""
        sign = 1 if (self.n + 1) % 2 == 0 else -1
        t = self.lam * quad_to_float(golden_pow(2 * self.n), self.precision)
        return t if sign > 0 else -t


def eigenvalue(n: int, opts: SpectralOptions | None = None) -> EigenvalueResult:
    """Compute lambda_n from the layer recurrence.

    Layers 0..v_max are always computed and reported.  With refine on
    (default) the full series is then summed via the fixed point, which is
    limited only by the window; with refine off the value is the raw partial
    sum together with a conservative and a heuristic tail estimate.
    """
    opts = opts or SpectralOptions()
    if opts.v_max < 1:
        raise DomainError("need at least one layer")
    prec = opts.precision
    state = init_layers(n, opts)
    for _ in range(opts.v_max):
        advance_layer(state)
    layers = state.layers()
    sqrt_n = BigFloat(n, prec).sqrt()

    c_hat = 0.0
    for v in range(1, len(layers)):
        c_hat = max(c_hat, abs(float(layers[v])) * v * v * math.sqrt(n))
    v_max = opts.v_max
    scale = quad_to_float(golden_pow(-2 * n), prec)
    tail_conservative = BigFloat(1.25 * c_hat, prec) / (sqrt_n * v_max) * scale
    tail_heuristic = abs(layers[-1]) * v_max * scale

    total_partial = bigfloat_sum(layers, prec)
    sign = 1 if (n + 1) % 2 == 0 else -1
    partial = total_partial * scale
    partial = partial if sign > 0 else -partial

    if not opts.refine:
        return EigenvalueResult(
            n=n,
            lam=partial,
            partial_sum=partial,
            layer_values=tuple(layers),
            window=state.window,
            v_max=v_max,
            precision=prec,
            tail_conservative=tail_conservative,
            tail_heuristic=tail_heuristic,
            fitted_constant=c_hat,
            refined=False,
        )

    J = min(_round16(n + opts.solver_width_for(n)), opts.cap_for(n))
    t0 = total_partial + abs(layers[-1]) * v_max
    t_solved, eigvec, _ = solve_fixed_point(n, J, prec, t0)
    window_error = None
    if opts.window_check:
        t_small, _, _ = solve_fixed_point(n, J - 12, prec, t_solved)
        window_error = abs(t_solved - t_small) * scale
    lam = t_solved * scale
    lam = lam if sign > 0 else -lam
    return EigenvalueResult(
        n=n,
        lam=lam,
        partial_sum=partial,
        layer_values=tuple(layers),
        window=state.window,
        v_max=v_max,
        precision=prec,
        tail_conservative=tail_conservative,
        tail_heuristic=tail_heuristic,
        fitted_constant=c_hat,
        refined=True,
        window_error=window_error,
        eigvec=tuple(eigvec),
        solver_window=J,
    )


def eigenvalue_omega(result: EigenvalueResult, omega) -> BigFloat:
    """Deformed eigenvalue lambda_n(omega) from the recorded layers.

    Evaluates (-1)^(n+1) phi^(-2n) sum_v omega^v W[v]; when the result was
    refined, the remaining tail (known at omega = 1) is folded in scaled by
    omega^(v_max+1), so omega = 1 reproduces `lam` exactly.
    """
    prec = result.precision
    w = BigFloat(omega, prec) if not isinstance(omega, BigFloat) else omega
    if abs(float(w)) > 1:
        raise DomainError("deformation parameter must lie in [-1, 1]")
    acc = BigFloat.zero(prec)
    for wv in reversed(result.layer_values):
        acc = acc * w + wv
    if result.refined:
        sign = 1 if (result.n + 1) % 2 == 0 else -1
        total = result.magnitude_total
        partial = bigfloat_sum(result.layer_values, prec)
        acc = acc + (total - partial) * w ** (result.v_max + 1)
    scale = quad_to_float(golden_pow(-2 * result.n), prec)
    out = acc * scale
    return out if (result.n + 1) % 2 == 0 else -out


# ---------------------------------------------------------------------------
# light layer paths (v <= 2) and the simplified recursion diagnostic
# ---------------------------------------------------------------------------


def layer_w1_exact(n: int) -> QuadraticNumber:
    """W_1(n) = K(n, n) exactly."""
    return k_coeff(n, n)


def layer_w2_exact(n: int, j_hi: int) -> QuadraticNumber:
    """Window-truncated exact W_2(n) = K(n,n)^2 + sum_i K(n,i)K(i,n)/d_i."""
    acc = k_coeff(n, n) ** 2
    for i in range(1, j_hi + 1):
        if i == n:
            continue
        acc = acc + k_coeff(n, i) * k_coeff(i, n) / divisor(n, i)
    return acc


def layer_w2_float(n: int, prec: int, j_hi: int | None = None) -> BigFloat:
    """W_2(n) summed in floats with exactly rounded kernel entries."""
    if j_hi is None:
        j_hi = n + max(48, int(prec * 0.36) + 16)
    wp = prec + 16
    diag = quad_to_float(k_coeff(n, n), wp)
    terms = [diag * diag]
    for i in range(1, j_hi + 1):
        if i == n:
            continue
        kin = quad_to_float(k_coeff(i, n), wp)
        kni = kin * Fraction(n, i)
        terms.append(kni * kin / quad_to_float(divisor(n, i), wp))
    return bigfloat_sum(terms, prec)


def simplified_layers(n: int, v_max: int, opts: SpectralOptions | None = None) -> list[BigFloat]:
    """Layers from the large-n simplified recursion (diagnostic only).

    For v >= 2 the cross-layer products and the direct K(j, n) feed-in drop
    out: W~[v] = sum_i w~_i^(v-1) K(n, i) and w~ likewise renormalized by
    the same divisor.  Layer 1 coincides with the full recursion.
    """
    opts = opts or SpectralOptions()
    prec = opts.precision
    wp = prec + 24
    hi = choose_window(n, opts)
    K = _kernel_floats(hi, prec)
    dv = [None] * (hi + 1)
    for j in range(1, hi + 1):
        if j != n:
            dv[j] = quad_to_float(divisor(n, j), wp).raw
    what = [fzero] * (hi + 1)
    for j in range(1, hi + 1):
        if j != n:
            what[j] = mpf_div(K[j][n], dv[j], wp, _RND)
    W = [BigFloat.one(prec), BigFloat(mpf_pos(K[n][n], prec, _RND), prec)]
    for _ in range(2, v_max + 1):
        acc = fzero
        for i in range(1, hi + 1):
            if what[i] != fzero:
                acc = mpf_add(acc, mpf_mul(what[i], K[n][i], wp, _RND), wp, _RND)
        W.append(BigFloat(mpf_pos(acc, prec, _RND), prec))
        new = [fzero] * (hi + 1)
        for j in range(1, hi + 1):
            if j == n:
                continue
            acc = fzero
            for i in range(1, hi + 1):
                if i != n and what[i] != fzero:
                    acc = mpf_add(acc, mpf_mul(what[i], K[j][i], wp, _RND), wp, _RND)
            new[j] = mpf_div(acc, dv[j], wp, _RND)
        what = new
    return W


# ---------------------------------------------------------------------------
# eigenfunctions in the golden basis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GFunction:
    """Truncated golden-basis expansion sum_j A_j (z-1/phi)^(j-1)/(z+phi)^(j+1)."""

    n: int
    lam: BigFloat
    coeffs: tuple  # A_1 .. A_J
    source: str = "layers"

    @property
    def count(self) -> int:
        return len(self.coeffs)


def gfunction_from_result(result: EigenvalueResult) -> GFunction:
    """Eigenfunction coefficients for a computed eigenvalue.

    Refined results carry the fixed-point eigenvector; otherwise the layer
    coefficient vectors are aggregated over v (their v-series at each j).
    """
    if result.refined and result.eigvec is not None:
        return GFunction(
            n=result.n,
            lam=result.lam,
            coeffs=tuple(result.eigvec[1:]),
            source="refined",
        )
    raise DomainError("result carries no eigenvector; build from a LayerState")


def gfunction_from_state(state: LayerState, lam: BigFloat) -> GFunction:
    prec = state.precision
    coeffs = []
    for j in range(1, state.j_hi + 1):
        coeffs.append(
            bigfloat_sum(
                [BigFloat(mpf_pos(state.what[v][j], prec, _RND), prec) for v in range(len(state.what))],
                prec,
            )
        )
    return GFunction(n=state.n, lam=lam, coeffs=tuple(coeffs), source="layers")


def gfunction_reference(count: int, prec: int) -> GFunction:
    """The closed-form unit-eigenvalue pair: a_j = sqrt(5)(1 - (-1)^j phi^-2j)."""
    sqrt5 = QuadraticNumber(0, 1, 5)
    coeffs = []
    for j in range(1, count + 1):
        exact = sqrt5 * (1 - (-1) ** j * golden_pow(-2 * j))
        coeffs.append(quad_to_float(exact, prec))
    return GFunction(n=1, lam=BigFloat.one(prec), coeffs=tuple(coeffs), source="reference")


def _as_complex(z, prec: int) -> ComplexBigFloat:
    if isinstance(z, ComplexBigFloat):
        return z
    if isinstance(z, complex):
        return ComplexBigFloat(BigFloat(z.real, prec), BigFloat(z.imag, prec))
    return ComplexBigFloat(BigFloat(z, prec) if not isinstance(z, BigFloat) else z, BigFloat.zero(prec))


def eigenfunction_eval(gf: GFunction, z) -> ComplexBigFloat:
    """Evaluate the truncated golden-basis series at Re(z) > -1/2."""
    prec = gf.lam.prec
    zc = _as_complex(z, prec)
    if 2 * float(zc.re) <= -1.0:
        raise DomainError("evaluation point must satisfy Re(z) > -1/2")
    phi_inv = quad_to_float(golden_pow(-1), prec)
    phi_f = quad_to_float(golden_pow(1), prec)
    r = zc - phi_inv
    s = zc + phi_f
    t = r / s
    acc = ComplexBigFloat(BigFloat.zero(prec), BigFloat.zero(prec))
    for a in reversed(gf.coeffs):
        acc = acc * t + a
    return acc / (s * s)


def eval_tail_bound(gf: GFunction, z) -> BigFloat:
    """Geometric bound on the dropped tail of the series at z."""
    prec = gf.lam.prec
    zc = _as_complex(z, prec)
    phi_inv = quad_to_float(golden_pow(-1), prec)
    phi_f = quad_to_float(golden_pow(1), prec)
    t = abs((zc - phi_inv) / (zc + phi_f))
    if not float(t) < 1:
        raise DomainError("evaluation point must satisfy Re(z) > -1/2")
    amax = max(abs(a) for a in gf.coeffs)
    s2 = abs((zc + phi_f) * (zc + phi_f))
    return amax * t ** gf.count / ((1 - t) * s2)


def functional_equation_residual(gf: GFunction, lam: BigFloat, z) -> BigFloat:
    """|U(z) - U(z+1) - U(1/(z+1)) / (lam (z+1)^2)| for the given pair."""
    if lam.is_zero():
        raise DomainError("eigenvalue must be nonzero")
    prec = lam.prec
    zc = _as_complex(z, prec)
    one = BigFloat.one(prec)
    z1 = zc + one
    zr = ComplexBigFloat(one, BigFloat.zero(prec)) / z1
    for point in (zc, z1, zr):
        if 2 * float(point.re) <= -1.0:
            raise DomainError("z, z+1 and 1/(z+1) must all satisfy Re > -1/2")
    u0 = eigenfunction_eval(gf, zc)
    u1 = eigenfunction_eval(gf, z1)
    ur = eigenfunction_eval(gf, zr)
    lamc = ComplexBigFloat(lam, BigFloat.zero(prec))
    resid = u0 - u1 - ur / (lamc * z1 * z1)
    return abs(resid)


# ---------------------------------------------------------------------------
# golden-coefficient transform of a rational function
# ---------------------------------------------------------------------------


def _poly_mul(p: list, q: list) -> list:
    out = [QuadraticNumber(0, 0, 5)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi.is_zero():
            continue
        for k, qk in enumerate(q):
            out[i + k] = out[i + k] + pi * qk
    return out


def _coerce_poly(coeffs) -> list:
    out = []
    for c in coeffs:
        if isinstance(c, QuadraticNumber):
            if c.b != 0 and c.d != 5:
                raise DomainError("polynomial coefficients must live in Q(sqrt(5))")
            out.append(QuadraticNumber(c.a, c.b, 5))
        else:
            out.append(QuadraticNumber(Fraction(c), 0, 5))
    while len(out) > 1 and out[-1].is_zero():
        out.pop()
    return out


def g_transform(numerator, denominator, count: int, prec: int) -> list[BigFloat]:
    """Golden coefficients a_1..a_count of f = numerator/denominator.

    Exact route: substitute z = (w phi + 1/phi)/(1 - w), clear (1-w) powers,
    and read Taylor coefficients of (2 phi - 1)^2 f(z(w)) / (w - 1)^2 at
    w = 0 by exact power-series division in Q(sqrt(5)).  A vanishing
    denominator at w = 0 (a pole of f at z = 1/phi) is a domain error.
    """
    num = _coerce_poly(numerator)
    den = _coerce_poly(denominator)
    deg = max(len(num), len(den)) - 1
    phi = golden_pow(1)
    phi_inv = golden_pow(-1)
    zero = QuadraticNumber(0, 0, 5)
    one = [QuadraticNumber(1, 0, 5)]
    lin = [phi_inv, phi]  # w*phi + 1/phi
    omw = [QuadraticNumber(1, 0, 5), QuadraticNumber(-1, 0, 5)]  # 1 - w

    lin_pows = [one]
    omw_pows = [one]
    for _ in range(deg + 2):
        lin_pows.append(_poly_mul(lin_pows[-1], lin))
        omw_pows.append(_poly_mul(omw_pows[-1], omw))

    def lift(poly: list) -> list:
        out = [zero] * (deg + 1)
        for k, c in enumerate(poly):
            if c.is_zero():
                continue
            term = _poly_mul(lin_pows[k], omw_pows[deg - k])
            for m, t in enumerate(term):
                if m <= deg:
                    out[m] = out[m] + c * t
        return out

    n_poly = lift(num)
    d_poly = _poly_mul(omw_pows[2], lift(den))
    if d_poly[0].is_zero():
        raise DomainError("function has a pole at z = 1/phi (w = 0)")

    # series of 5 * n_poly / d_poly up to w^(count-1)
    inv0 = d_poly[0].inverse()
    coeffs = []
    series = []
    for m in range(count):
        acc = n_poly[m] * 5 if m < len(n_poly) else zero
        for k in range(1, min(m, len(d_poly) - 1) + 1):
            acc = acc - d_poly[k] * series[m - k]
        cm = acc * inv0
        series.append(cm)
        coeffs.append(quad_to_float(cm, prec))
    return coeffs
