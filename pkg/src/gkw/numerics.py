"""Exact field arithmetic and explicit-precision floats.

Three value types underpin everything else:

* ``Rational`` -- exact rationals; an alias of :class:`fractions.Fraction`.
* ``QuadraticNumber`` -- exact elements a + b*sqrt(d) of a real quadratic
  field, tagged by the square-free discriminant d.  Sign determination is
  exact integer arithmetic, never floating point.
* ``BigFloat`` -- an immutable binary float with an explicit precision in
  bits.  Every operation takes its precision from its inputs (or an explicit
  argument); there is no process-global precision mode.  Basic operations
  are correctly rounded by the mpmath/gmpy backend, which is stronger than
  the 1-ulp faithfulness this package relies on.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering

from mpmath import libmp
from mpmath.libmp import (
    fhalf,
    fnone,
    fone,
    fzero,
    from_int,
    from_man_exp,
    from_rational,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_mul,
    mpf_mul_int,
    mpf_neg,
    mpf_pi,
    mpf_pow_int,
    mpf_shift,
    mpf_sign,
    mpf_sqrt,
    mpf_sub,
    to_float,
    to_str,
)

from .errors import DomainError

Rational = Fraction

_RND = "n"  # round to nearest even throughout


def _sign_fraction(q: Fraction) -> int:
    return (q.numerator > 0) - (q.numerator < 0)


def squarefree_decompose(m: int) -> tuple[int, int]:
    """Write m = s**2 * d with d square-free; returns (s, d)."""
    if m <= 0:
        raise DomainError(f"need a positive integer, got {m}")
    s, d = 1, 1
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
    return s, d * m


@total_ordering
class QuadraticNumber:
    """Exact a + b*sqrt(d) with rational a, b and square-free d >= 2.

    Arithmetic is closed and exact.  Mixing two genuinely irrational values
    with different d raises :class:`DomainError`; rational values (b == 0)
    combine with any discriminant.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=5):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", int(d))
        if self.d < 2:
            raise DomainError(f"discriminant must be >= 2, got {d}")

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticNumber is immutable")

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QuadraticNumber):
            if other.b == 0:
                return QuadraticNumber(other.a, 0, self.d)
            if self.b == 0:
                return other  # handled by caller re-coercing self
            if other.d != self.d:
                raise DomainError(
                    f"discriminant mismatch: sqrt({self.d}) vs sqrt({other.d})"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(other, 0, self.d)
        return None

    def _pair(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return None, None
        if self.b == 0 and rhs.d != self.d:
            return QuadraticNumber(self.a, 0, rhs.d), rhs
        return self, rhs

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        lhs, rhs = self._pair(other)
        if lhs is None:
            return NotImplemented
        return QuadraticNumber(lhs.a + rhs.a, lhs.b + rhs.b, lhs.d)

    __radd__ = __add__

    def __sub__(self, other):
        lhs, rhs = self._pair(other)
        if lhs is None:
            return NotImplemented
        return QuadraticNumber(lhs.a - rhs.a, lhs.b - rhs.b, lhs.d)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __mul__(self, other):
        lhs, rhs = self._pair(other)
        if lhs is None:
            return NotImplemented
        return QuadraticNumber(
            lhs.a * rhs.a + lhs.d * lhs.b * rhs.b,
            lhs.a * rhs.b + lhs.b * rhs.a,
            lhs.d,
        )

    __rmul__ = __mul__

    def inverse(self) -> QuadraticNumber:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadraticNumber(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        lhs, rhs = self._pair(other)
        if lhs is None:
            return NotImplemented
        return lhs * rhs.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = QuadraticNumber(1, 0, self.d)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- exact predicates ---------------------------------------------------

    def conjugate(self) -> QuadraticNumber:
        return QuadraticNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        """Field norm a**2 - d*b**2 (rational, multiplicative)."""
        return self.a * self.a - self.d * self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def sign(self) -> int:
        """Exact sign under the real embedding with sqrt(d) > 0.

        Same-sign components decide immediately; mixed signs reduce to the
        exact integer comparison of a**2 against d*b**2.
        """
        sa, sb = _sign_fraction(self.a), _sign_fraction(self.b)
        if sb == 0:
            return sa
        if sa == 0:
            return sb
        if sa == sb:
            return sa
        cmp = self.a * self.a - self.d * self.b * self.b  # sign of |a|^2 - d|b|^2
        sc = _sign_fraction(cmp)
        return sa * sc if sc else 0

    def __eq__(self, other):
        lhs, rhs = self._pair(other)
        if lhs is None:
            return NotImplemented
        return lhs.a == rhs.a and lhs.b == rhs.b

    def __lt__(self, other):
        lhs, rhs = self._pair(other)
        if lhs is None:
            return NotImplemented
        return (lhs - rhs).sign() < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __repr__(self):
        return f"QuadraticNumber({self.a!r}, {self.b!r}, d={self.d})"

    def __str__(self):
        return f"{self.a} + {self.b}*sqrt({self.d})"

    def to_bigfloat(self, prec: int) -> "BigFloat":
        return quad_to_float(self, prec)


PHI = QuadraticNumber(Fraction(1, 2), Fraction(1, 2), 5)
SQRT5 = QuadraticNumber(0, 1, 5)


def golden_pow(k: int) -> QuadraticNumber:
    """Exact power of the golden ratio; negative k uses phi**-1 = phi - 1."""
    return PHI**k


def quad_compare(x: QuadraticNumber, y: QuadraticNumber) -> int:
    """Exact three-way comparison (-1, 0, 1) of two equal-field values."""
    if isinstance(x, QuadraticNumber) and isinstance(y, QuadraticNumber):
        if x.b != 0 and y.b != 0 and x.d != y.d:
            raise DomainError(f"discriminant mismatch: {x.d} vs {y.d}")
    return (x - y).sign()


# ---------------------------------------------------------------------------
# BigFloat
# ---------------------------------------------------------------------------

MIN_PRECISION = 16


def _magnitude(raw) -> int | None:
    """Exponent of the leading bit, or None for zero."""
    if raw == fzero:
        return None
    return raw[2] + raw[3]


def _fraction_to_raw(q: Fraction, prec: int):
    if q.denominator == 1:
        return from_int(q.numerator, prec, _RND)
    return from_rational(q.numerator, q.denominator, prec, _RND)


@total_ordering
class BigFloat:
    """Immutable binary float carrying its precision in bits.

    Binary operations round to the larger operand precision; ints and
    Fractions mix in exactly (rounded once at the result precision).
    """

    __slots__ = ("raw", "prec")

    def __init__(self, value, prec: int = 53):
        prec = int(prec)
        if prec < 1:
            raise DomainError(f"precision must be positive, got {prec}")
        if isinstance(value, tuple) and len(value) == 4:
            raw = value
        elif isinstance(value, BigFloat):
            raw = libmp.mpf_pos(value.raw, prec, _RND)
        elif isinstance(value, int):
            raw = from_int(value, prec, _RND)
        elif isinstance(value, Fraction):
            raw = _fraction_to_raw(value, prec)
        elif isinstance(value, float):
            raw = libmp.from_float(value, prec, _RND)
        elif isinstance(value, str):
            raw = libmp.from_str(value, prec, _RND)
        else:
            raise TypeError(f"cannot build BigFloat from {type(value).__name__}")
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("BigFloat is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, prec: int) -> "BigFloat":
        return cls(fzero, prec)

    @classmethod
    def one(cls, prec: int) -> "BigFloat":
        return cls(fone, prec)

    @classmethod
    def pi(cls, prec: int) -> "BigFloat":
        return cls(mpf_pi(prec, _RND), prec)

    @classmethod
    def exp2(cls, e: int, prec: int) -> "BigFloat":
        """Exact power of two 2**e."""
        return cls(from_man_exp(1, e), prec)

    # -- helpers ------------------------------------------------------------

    def _rhs(self, other):
        if isinstance(other, BigFloat):
            return other.raw, max(self.prec, other.prec)
        if isinstance(other, int):
            return from_int(other), self.prec
        if isinstance(other, Fraction):
            return _fraction_to_raw(other, self.prec + 8), self.prec
        return None, None

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        raw, prec = self._rhs(other)
        if raw is None:
            return NotImplemented
        return BigFloat(mpf_add(self.raw, raw, prec, _RND), prec)

    __radd__ = __add__

    def __sub__(self, other):
        raw, prec = self._rhs(other)
        if raw is None:
            return NotImplemented
        return BigFloat(mpf_sub(self.raw, raw, prec, _RND), prec)

    def __rsub__(self, other):
        raw, prec = self._rhs(other)
        if raw is None:
            return NotImplemented
        return BigFloat(mpf_sub(raw, self.raw, prec, _RND), prec)

    def __mul__(self, other):
        raw, prec = self._rhs(other)
        if raw is None:
            return NotImplemented
        return BigFloat(mpf_mul(self.raw, raw, prec, _RND), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        raw, prec = self._rhs(other)
        if raw is None:
            return NotImplemented
        return BigFloat(mpf_div(self.raw, raw, prec, _RND), prec)

    def __rtruediv__(self, other):
        raw, prec = self._rhs(other)
        if raw is None:
            return NotImplemented
        return BigFloat(mpf_div(raw, self.raw, prec, _RND), prec)

    def __neg__(self):
        return BigFloat(mpf_neg(self.raw), self.prec)

    def __abs__(self):
        return BigFloat(mpf_abs(self.raw), self.prec)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return BigFloat(mpf_pow_int(self.raw, k, self.prec, _RND), self.prec)

    def sqrt(self) -> "BigFloat":
        if self.sign() < 0:
            raise DomainError("sqrt of a negative value")
        return BigFloat(mpf_sqrt(self.raw, self.prec, _RND), self.prec)

    def ldexp(self, e: int) -> "BigFloat":
        """Exact scaling by 2**e."""
        return BigFloat(mpf_shift(self.raw, e), self.prec)

    def at_prec(self, prec: int) -> "BigFloat":
        return BigFloat(libmp.mpf_pos(self.raw, prec, _RND), prec)

    # -- predicates -----------------------------------------------------------

    def sign(self) -> int:
        return mpf_sign(self.raw)

    def is_zero(self) -> bool:
        return self.raw == fzero

    def magnitude(self) -> int | None:
        """Exponent of the most significant bit; None if zero."""
        return _magnitude(self.raw)

    def ulp(self) -> "BigFloat":
        """Unit in the last place at this value's magnitude and precision."""
        mag = self.magnitude()
        if mag is None:
            return BigFloat.exp2(-self.prec, self.prec)
        return BigFloat.exp2(mag - self.prec, self.prec)

    def __eq__(self, other):
        raw, _ = self._rhs(other)
        if raw is None:
            return NotImplemented
        return mpf_cmp(self.raw, raw) == 0

    def __lt__(self, other):
        raw, _ = self._rhs(other)
        if raw is None:
            return NotImplemented
        return mpf_cmp(self.raw, raw) < 0

    def __hash__(self):
        return hash(self.raw)

    def __float__(self):
        return to_float(self.raw)

    def __repr__(self):
        return f"BigFloat('{self}', prec={self.prec})"

    def __str__(self):
        dps = int(self.prec / 3.3219280948873626) + 2
        return to_str(self.raw, dps)

    def to_decimal(self, dps: int | None = None) -> str:
        """Deterministic decimal rendering with dps significant digits."""
        if dps is None:
            dps = int(self.prec / 3.3219280948873626) + 2
        return to_str(self.raw, dps)


class ComplexBigFloat:
    """Minimal complex pair of BigFloats (rectangular form)."""

    __slots__ = ("re", "im")

    def __init__(self, re: BigFloat, im: BigFloat):
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexBigFloat is immutable")

    def _coerce(self, other):
        if isinstance(other, ComplexBigFloat):
            return other
        if isinstance(other, (BigFloat, int, Fraction)):
            re = other if isinstance(other, BigFloat) else BigFloat(other, self.re.prec)
            return ComplexBigFloat(re, BigFloat.zero(self.re.prec))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexBigFloat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexBigFloat(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return ComplexBigFloat(-self.re, -self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexBigFloat(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        return ComplexBigFloat(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __abs__(self) -> BigFloat:
        return (self.re * self.re + self.im * self.im).sqrt()

    def __repr__(self):
        return f"ComplexBigFloat({self.re!r}, {self.im!r})"


def bigfloat_sum(values, prec: int) -> BigFloat:
    """Sum with 16 guard bits, rounded once at the end."""
    wp = prec + 16
    acc = fzero
    for v in values:
        raw = v.raw if isinstance(v, BigFloat) else BigFloat(v, wp).raw
        acc = mpf_add(acc, raw, wp, _RND)
    return BigFloat(libmp.mpf_pos(acc, prec, _RND), prec)


def sqrt_int(m: int, prec: int) -> BigFloat:
    """sqrt of a nonnegative integer at the requested precision."""
    if m < 0:
        raise DomainError("sqrt of a negative integer")
    return BigFloat(mpf_sqrt(from_int(m), prec, _RND), prec)


def quad_to_float(x: QuadraticNumber, prec: int) -> BigFloat:
    """Round a + b*sqrt(d) to a BigFloat within 1 ulp.

    The two components can cancel almost completely (powers phi**-k carry
    components of size phi**k), so the working precision is raised until the
    observed cancellation is covered.
    """
    if prec < MIN_PRECISION:
        raise DomainError(f"precision must be >= {MIN_PRECISION}, got {prec}")
    if x.b == 0:
        return BigFloat(_fraction_to_raw(x.a, prec), prec)
    guard = 16
    while True:
        wp = prec + guard
        rb = _fraction_to_raw(x.b, wp)
        rs = mpf_sqrt(from_int(x.d), wp, _RND)
        term = mpf_mul(rb, rs, wp, _RND)
        if x.a == 0:
            return BigFloat(libmp.mpf_pos(term, prec, _RND), prec)
        ra = _fraction_to_raw(x.a, wp)
        res = mpf_add(ra, term, wp, _RND)
        mag = _magnitude(res)
        if mag is None:  # full cancellation at this working precision
            guard *= 4
            continue
        lost = max(_magnitude(ra), _magnitude(term)) - mag
        if lost + prec + 8 <= wp:
            return BigFloat(libmp.mpf_pos(res, prec, _RND), prec)
        guard = max(2 * guard, lost + 24)
