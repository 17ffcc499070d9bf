"""Dyadic rationals, outward-rounded complex balls, and precision-indexed names.

Every inexact real enters the library as a :class:`RealName`: a pure function
from a bit precision ``p`` to a dyadic approximation within ``2**-p``.  All
derived quantities are :class:`ComplexBall` values guaranteed to contain the
true result.
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Union


class CFineqError(Exception):
    """Base class for library errors."""


class PrecisionExhausted(CFineqError):
    """A certified computation could not be completed at the requested precision."""


class DivisorStraddlesZero(CFineqError, ZeroDivisionError):
    """Division by a ball that contains zero."""


# ---------------------------------------------------------------------------
# Dyadic numbers


class Dyadic:
    """Exact number ``mantissa * 2**exponent`` in canonical form.

    The mantissa is odd, or zero with exponent zero.
    """

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: int = 0, exponent: int = 0):
        mantissa = int(mantissa)
        exponent = int(exponent)
        if mantissa == 0:
            exponent = 0
        else:
            tz = (mantissa & -mantissa).bit_length() - 1
            if tz:
                mantissa >>= tz
                exponent += tz
        self.mantissa = mantissa
        self.exponent = exponent

    # construction -------------------------------------------------------
    @classmethod
    def coerce(cls, x: "DyadicLike") -> "Dyadic":
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, bool):
            return cls(int(x))
        if isinstance(x, int):
            return cls(x)
        if isinstance(x, Fraction):
            if x.denominator & (x.denominator - 1):
                raise ValueError(f"{x} is not a dyadic rational")
            return cls(x.numerator, -(x.denominator.bit_length() - 1))
        raise TypeError(f"cannot convert {type(x).__name__} to Dyadic")

    @classmethod
    def pow2(cls, k: int) -> "Dyadic":
        return cls(1, k)

    @classmethod
    def from_fraction(cls, q: Fraction, exponent: int, mode: str = "nearest") -> "Dyadic":
        """Round ``q`` to a multiple of ``2**exponent``."""
        q = Fraction(q)
        if exponent >= 0:
            num, den = q.numerator, q.denominator << exponent
        else:
            num, den = q.numerator << -exponent, q.denominator
        if mode == "floor":
            m = num // den
        elif mode == "ceil":
            m = -((-num) // den)
        elif mode == "nearest":
            m = (2 * num + den) // (2 * den)
        else:
            raise ValueError(mode)
        return cls(m, exponent)

    @staticmethod
    def is_dyadic(q: Fraction) -> bool:
        d = Fraction(q).denominator
        return d & (d - 1) == 0

    # inspection ---------------------------------------------------------
    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def __float__(self) -> float:
        return math.ldexp(float(self.mantissa), self.exponent) if abs(self.mantissa) < (1 << 1000) else float(self.to_fraction())

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def top(self) -> int:
        """Smallest ``t`` with ``|self| < 2**t`` (very negative for zero)."""
        if self.mantissa == 0:
            return -(1 << 62)
        return self.exponent + abs(self.mantissa).bit_length()

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    # arithmetic ---------------------------------------------------------
    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.mantissa, self.exponent)

    def __abs__(self) -> "Dyadic":
        return self if self.mantissa >= 0 else -self

    def __add__(self, other: "DyadicLike") -> "Dyadic":
        other = Dyadic.coerce(other)
        if self.mantissa == 0:
            return other
        if other.mantissa == 0:
            return self
        e = min(self.exponent, other.exponent)
        return Dyadic(
            (self.mantissa << (self.exponent - e)) + (other.mantissa << (other.exponent - e)), e
        )

    __radd__ = __add__

    def __sub__(self, other: "DyadicLike") -> "Dyadic":
        return self + (-Dyadic.coerce(other))

    def __rsub__(self, other: "DyadicLike") -> "Dyadic":
        return Dyadic.coerce(other) - self

    def __mul__(self, other: "DyadicLike") -> "Dyadic":
        other = Dyadic.coerce(other)
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def shift(self, k: int) -> "Dyadic":
        """Multiply by ``2**k``."""
        if self.mantissa == 0:
            return self
        return Dyadic(self.mantissa, self.exponent + k)

    def round(self, exponent: int, mode: str = "nearest") -> "Dyadic":
        """Round to a multiple of ``2**exponent``."""
        if self.exponent >= exponent:
            return self
        s = exponent - self.exponent
        m = self.mantissa
        if mode == "floor":
            r = m >> s
        elif mode == "ceil":
            r = -((-m) >> s)
        elif mode == "nearest":
            r = (m + (1 << (s - 1))) >> s
        else:
            raise ValueError(mode)
        return Dyadic(r, exponent)

    def round_bits(self, bits: int, mode: str = "ceil") -> "Dyadic":
        """Keep at most ``bits`` significant bits."""
        excess = abs(self.mantissa).bit_length() - bits
        if excess <= 0:
            return self
        return self.round(self.exponent + excess, mode)

    # comparison ---------------------------------------------------------
    def _cmp(self, other: "DyadicLike") -> int:
        if isinstance(other, Fraction) and not Dyadic.is_dyadic(other):
            a = self.to_fraction()
            return (a > other) - (a < other)
        return (self - Dyadic.coerce(other)).sign()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (Dyadic, int, Fraction)):
            return self._cmp(other) == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __lt__(self, other: "DyadicLike") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "DyadicLike") -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: "DyadicLike") -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: "DyadicLike") -> bool:
        return self._cmp(other) >= 0

    def __repr__(self) -> str:
        return f"Dyadic({self.mantissa}, {self.exponent})"

    def __str__(self) -> str:
        q = self.to_fraction()
        return str(q) if q.denominator == 1 or abs(self.exponent) < 64 else f"{self.mantissa}*2^{self.exponent}"


DyadicLike = Union[Dyadic, int, Fraction]
ZERO = Dyadic(0)
ONE = Dyadic(1)


def dyadic_div_up(a: Dyadic, b: Dyadic, bits: int = 40) -> Dyadic:
    """Upper bound for ``a / b`` with ``a >= 0`` and ``b > 0``."""
    if a.mantissa == 0:
        return ZERO
    shift = bits + b.mantissa.bit_length() - a.mantissa.bit_length() + 1
    shift = max(shift, 0)
    q = -((-(a.mantissa << shift)) // b.mantissa)
    return Dyadic(q, a.exponent - b.exponent - shift)


def dyadic_div_down(a: Dyadic, b: Dyadic, bits: int = 40) -> Dyadic:
    """Lower bound for ``a / b`` with ``a >= 0`` and ``b > 0``."""
    if a.mantissa == 0:
        return ZERO
    shift = max(bits + b.mantissa.bit_length() - a.mantissa.bit_length() + 1, 0)
    return Dyadic((a.mantissa << shift) // b.mantissa, a.exponent - b.exponent - shift)


# ---------------------------------------------------------------------------
# working precision

_PRECISION: contextvars.ContextVar[Optional[int]] = contextvars.ContextVar("cfineq_precision", default=128)
_RADIUS_BITS = 30


def get_precision() -> Optional[int]:
    """Relative precision (bits) used to round ball centres; ``None`` means exact."""
    return _PRECISION.get()


@contextlib.contextmanager
def working_precision(bits: Optional[int]) -> Iterator[None]:
    token = _PRECISION.set(bits)
    try:
        yield
    finally:
        _PRECISION.reset(token)


def _rad_up(r: Dyadic) -> Dyadic:
    return r.round_bits(_RADIUS_BITS, "ceil")


def _align(a: Dyadic, b: Dyadic) -> tuple[int, int, int]:
    if a.mantissa == 0:
        return 0, b.mantissa, b.exponent
    if b.mantissa == 0:
        return a.mantissa, 0, a.exponent
    e = min(a.exponent, b.exponent)
    return a.mantissa << (a.exponent - e), b.mantissa << (b.exponent - e), e


def _hypot(re: Dyadic, im: Dyadic, upper: bool) -> Dyadic:
    if im.mantissa == 0:
        return abs(re)
    if re.mantissa == 0:
        return abs(im)
    a, b, e = _align(re, im)
    a, b = abs(a), abs(b)
    excess = max(a.bit_length(), b.bit_length()) - 64
    if excess > 0:
        a >>= excess
        b >>= excess
        if upper:
            a += 1
            b += 1
        e += excess
    s = a * a + b * b
    r = math.isqrt(s)
    if upper and r * r < s:
        r += 1
    return Dyadic(r, e)


def abs_upper(re: Dyadic, im: Dyadic) -> Dyadic:
    """Upper bound for ``|re + i*im|``."""
    return _hypot(re, im, True)


def abs_lower(re: Dyadic, im: Dyadic) -> Dyadic:
    """Lower bound for ``|re + i*im|``."""
    return _hypot(re, im, False)


def _round_center(re: Dyadic, im: Dyadic, prec: Optional[int]) -> tuple[Dyadic, Dyadic, Dyadic]:
    if prec is None:
        return re, im, ZERO
    t = max(re.top(), im.top())
    q = t - prec
    if re.mantissa and re.exponent < q or im.mantissa and im.exponent < q:
        return re.round(q), im.round(q), Dyadic(1, q)
    return re, im, ZERO


# ---------------------------------------------------------------------------
# complex balls


class ComplexBall:
    """Closed disk ``{z : |z - (re + i*im)| <= rad}`` with dyadic data."""

    __slots__ = ("re", "im", "rad")

    def __init__(self, re: DyadicLike = 0, im: DyadicLike = 0, rad: DyadicLike = 0):
        self.re = Dyadic.coerce(re)
        self.im = Dyadic.coerce(im)
        self.rad = Dyadic.coerce(rad)
        if self.rad.mantissa < 0:
            raise ValueError("negative radius")

    # construction -------------------------------------------------------
    @classmethod
    def coerce(cls, x: "BallLike") -> "ComplexBall":
        if isinstance(x, ComplexBall):
            return x
        if isinstance(x, (int, Dyadic)):
            return cls(x)
        if isinstance(x, Fraction):
            return cls.from_fraction(x)
        if isinstance(x, tuple) and len(x) == 2:
            return cls.from_fraction(Fraction(x[0]), Fraction(x[1]))
        if hasattr(x, "x") and hasattr(x, "y"):  # Gaussian rationals
            return cls.from_fraction(_to_fraction(x.x), _to_fraction(x.y))
        raise TypeError(f"cannot convert {type(x).__name__} to ComplexBall")

    @classmethod
    def from_fraction(cls, re: Fraction, im: Fraction = Fraction(0), prec: Optional[int] = None) -> "ComplexBall":
        """Enclose ``re + i*im``; exact when both parts are dyadic."""
        re, im = Fraction(re), Fraction(im)
        if Dyadic.is_dyadic(re) and Dyadic.is_dyadic(im):
            return cls(Dyadic.coerce(re), Dyadic.coerce(im))
        if prec is None:
            prec = get_precision() or 256
        mag = max(abs(re), abs(im))
        t = mag.numerator.bit_length() - mag.denominator.bit_length() + 1
        q = t - prec - 2
        rre = Dyadic.from_fraction(re, q)
        rim = Dyadic.from_fraction(im, q)
        return cls(rre, rim, Dyadic(1, q))

    # inspection ---------------------------------------------------------
    def is_exact(self) -> bool:
        return self.rad.mantissa == 0

    def is_real(self) -> bool:
        return self.im.mantissa == 0

    def center_fractions(self) -> tuple[Fraction, Fraction]:
        return self.re.to_fraction(), self.im.to_fraction()

    def mag_upper(self) -> Dyadic:
        return abs_upper(self.re, self.im) + self.rad

    def mag_lower(self) -> Dyadic:
        lo = abs_lower(self.re, self.im) - self.rad
        return lo if lo.mantissa > 0 else ZERO

    def re_lower(self) -> Dyadic:
        return self.re - self.rad

    def re_upper(self) -> Dyadic:
        return self.re + self.rad

    def im_lower(self) -> Dyadic:
        return self.im - self.rad

    def im_upper(self) -> Dyadic:
        return self.im + self.rad

    def contains_zero(self) -> bool:
        return self.contains(0)

    def excludes_zero(self) -> bool:
        return not self.contains(0)

    def contains(self, value: object) -> bool:
        """Whether an exact value lies in the ball."""
        if isinstance(value, ComplexBall):
            d = abs_upper(self.re - value.re, self.im - value.im)
            return d + value.rad <= self.rad
        if isinstance(value, tuple):
            vr, vi = Fraction(value[0]), Fraction(value[1])
        elif hasattr(value, "x") and hasattr(value, "y"):
            vr, vi = _to_fraction(value.x), _to_fraction(value.y)
        elif isinstance(value, Dyadic):
            vr, vi = value.to_fraction(), Fraction(0)
        else:
            vr, vi = Fraction(value), Fraction(0)
        cr, ci = self.center_fractions()
        r = self.rad.to_fraction()
        return (vr - cr) ** 2 + (vi - ci) ** 2 <= r * r

    def overlaps(self, other: "ComplexBall") -> bool:
        """Conservative: ``False`` only when the disks are certainly disjoint."""
        d = abs_lower(self.re - other.re, self.im - other.im)
        return d <= self.rad + other.rad

    def disjoint(self, other: "ComplexBall") -> bool:
        return not self.overlaps(other)

    # arithmetic ---------------------------------------------------------
    def conj(self) -> "ComplexBall":
        return ComplexBall(self.re, -self.im, self.rad)

    def real_part(self) -> "ComplexBall":
        return ComplexBall(self.re, 0, self.rad)

    def imag_part(self) -> "ComplexBall":
        return ComplexBall(self.im, 0, self.rad)

    def __neg__(self) -> "ComplexBall":
        return ComplexBall(-self.re, -self.im, self.rad)

    def __pos__(self) -> "ComplexBall":
        return self

    def widen(self, r: DyadicLike) -> "ComplexBall":
        return ComplexBall(self.re, self.im, _rad_up(self.rad + Dyadic.coerce(r)))

    def __add__(self, other: "BallLike") -> "ComplexBall":
        return ball_add(self, other)

    __radd__ = __add__

    def __sub__(self, other: "BallLike") -> "ComplexBall":
        return ball_add(self, -ComplexBall.coerce(other))

    def __rsub__(self, other: "BallLike") -> "ComplexBall":
        return ball_add(-self, other)

    def __mul__(self, other: "BallLike") -> "ComplexBall":
        return ball_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: "BallLike") -> "ComplexBall":
        return ball_div(self, other)

    def __rtruediv__(self, other: "BallLike") -> "ComplexBall":
        return ball_div(other, self)

    def __pow__(self, k: int) -> "ComplexBall":
        if k < 0:
            return ball_div(1, self**-k)
        result = ComplexBall(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_pow2(self, k: int) -> "ComplexBall":
        return ComplexBall(self.re.shift(k), self.im.shift(k), self.rad.shift(k))

    def __repr__(self) -> str:
        return f"ComplexBall({self.re!r}, {self.im!r}, rad={self.rad!r})"

    def __str__(self) -> str:
        return format_ball(self)


BallLike = Union[ComplexBall, Dyadic, int, Fraction, tuple]


def _to_fraction(v: object) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    # sympy rationals and mpq expose numerator/denominator or p/q
    num = getattr(v, "numerator", None)
    den = getattr(v, "denominator", None)
    if num is not None and den is not None:
        num = num() if callable(num) else num
        den = den() if callable(den) else den
        return Fraction(int(num), int(den))
    return Fraction(int(v.p), int(v.q))


def ball_add(x: BallLike, y: BallLike, prec: Optional[int] = ...) -> ComplexBall:
    """Sum of two balls, centre rounded at the working precision."""
    x = ComplexBall.coerce(x)
    y = ComplexBall.coerce(y)
    if prec is ...:
        prec = get_precision()
    re, im, err = _round_center(x.re + y.re, x.im + y.im, prec)
    rad = x.rad + y.rad + err
    return ComplexBall(re, im, _rad_up(rad) if rad.mantissa else rad)


def ball_mul(x: BallLike, y: BallLike, prec: Optional[int] = ...) -> ComplexBall:
    """Product of two balls: ``|xc|*ry + |yc|*rx + rx*ry`` plus rounding."""
    x = ComplexBall.coerce(x)
    y = ComplexBall.coerce(y)
    if prec is ...:
        prec = get_precision()
    if x.im.mantissa == 0 and y.im.mantissa == 0:
        re0, im0 = x.re * y.re, ZERO
    else:
        re0 = x.re * y.re - x.im * y.im
        im0 = x.re * y.im + x.im * y.re
    re, im, err = _round_center(re0, im0, prec)
    rad = err
    if x.rad.mantissa or y.rad.mantissa:
        rad = rad + abs_upper(x.re, x.im) * y.rad + abs_upper(y.re, y.im) * x.rad + x.rad * y.rad
    return ComplexBall(re, im, _rad_up(rad) if rad.mantissa else rad)


def ball_inv(y: BallLike, prec: Optional[int] = ...) -> ComplexBall:
    y = ComplexBall.coerce(y)
    if prec is ...:
        prec = get_precision()
    if prec is None:
        prec = 256
    lo = abs_lower(y.re, y.im)
    if lo <= y.rad:
        raise DivisorStraddlesZero("divisor ball contains zero")
    a, b, e = _align(y.re, y.im)
    d = a * a + b * b
    k = prec + 8 + d.bit_length() - max(abs(a), abs(b)).bit_length()
    # centre = (a - ib) / (d * 2**e), rounded at 2**(-k - e)
    re = Dyadic((2 * (a << k) + d) // (2 * d), -k - e)
    im = Dyadic((2 * (-b << k) + d) // (2 * d), -k - e)
    rad = Dyadic(1, -k - e)
    if y.rad.mantissa:
        rad = rad + dyadic_div_up(y.rad, lo * (lo - y.rad))
    return ComplexBall(re, im, _rad_up(rad))


def ball_div(x: BallLike, y: BallLike, prec: Optional[int] = ...) -> ComplexBall:
    """Quotient; raises :class:`DivisorStraddlesZero` when ``0`` lies in ``y``."""
    return ball_mul(x, ball_inv(y, prec), prec)


def ball_sum(items: Iterable[BallLike]) -> ComplexBall:
    total = ComplexBall(0)
    for it in items:
        total = total + it
    return total


def ball_prod(items: Iterable[BallLike]) -> ComplexBall:
    total = ComplexBall(1)
    for it in items:
        total = total * it
    return total


def hull(balls: Iterable[ComplexBall]) -> ComplexBall:
    """A ball enclosing every ball in ``balls``."""
    balls = list(balls)
    if not balls:
        raise ValueError("hull of nothing")
    if len(balls) == 1:
        return balls[0]
    lo_re = min(b.re_lower() for b in balls)
    hi_re = max(b.re_upper() for b in balls)
    lo_im = min(b.im_lower() for b in balls)
    hi_im = max(b.im_upper() for b in balls)
    cre = (lo_re + hi_re).shift(-1)
    cim = (lo_im + hi_im).shift(-1)
    if all(b.im.mantissa == 0 for b in balls):
        cim = ZERO
    rad = max(abs_upper(b.re - cre, b.im - cim) + b.rad for b in balls)
    return ComplexBall(cre, cim, _rad_up(rad))


def ball_sqrt_upper(x: Dyadic) -> Dyadic:
    """Upper bound for the square root of a non-negative dyadic."""
    if x.mantissa <= 0:
        return ZERO
    m, e = x.mantissa, x.exponent
    if e % 2:
        m <<= 1
        e -= 1
    m <<= 64
    e -= 64
    r = math.isqrt(m)
    if r * r < m:
        r += 1
    return Dyadic(r, e // 2)


class Sign(enum.IntEnum):
    NEGATIVE = -1
    UNKNOWN = 0
    POSITIVE = 1


def sign_or_unknown(x: BallLike, part: str = "re") -> Sign:
    """Sign of the real (or imaginary) part, or ``UNKNOWN`` if the ball straddles 0."""
    x = ComplexBall.coerce(x)
    if part == "re":
        lo, hi = x.re_lower(), x.re_upper()
    elif part == "im":
        lo, hi = x.im_lower(), x.im_upper()
    else:
        raise ValueError(part)
    if lo.mantissa > 0:
        return Sign.POSITIVE
    if hi.mantissa < 0:
        return Sign.NEGATIVE
    return Sign.UNKNOWN


def format_ball(b: ComplexBall, digits: int = 20) -> str:
    def fmt(d: Dyadic) -> str:
        q = d.to_fraction()
        if q.denominator == 1:
            return str(q.numerator)
        return f"{float(q):.{digits}g}" if abs(float(q)) > 1e-300 or q == 0 else str(d)

    s = fmt(b.re)
    if b.im.mantissa:
        sign = "-" if b.im.mantissa < 0 else "+"
        s = f"{s} {sign} {fmt(abs(b.im))}i" if b.re.mantissa else f"{'-' if sign == '-' else ''}{fmt(abs(b.im))}i"
    if b.rad.mantissa:
        t = b.rad.top()
        s = f"{s} ± {float(b.rad.to_fraction()):.3g}" if t > -1000 else f"{s} ± 2^{t}"
    return s


# ---------------------------------------------------------------------------
# names


@dataclass(frozen=True)
class RealName:
    """A real number presented through approximations.

    ``query(p)`` returns a dyadic within ``2**-p`` of the number.  ``exact``
    carries the rational value when one is known.
    """

    query: Callable[[int], Dyadic]
    exact: Optional[Fraction] = None
    label: Optional[str] = field(default=None, compare=False)
    # when False the exact value is known but balls are still built from queries
    shortcut: bool = field(default=True, compare=False)

    @classmethod
    def rational(cls, q: Union[int, Fraction, str]) -> "RealName":
        q = Fraction(q)
        if Dyadic.is_dyadic(q):
            d = Dyadic.coerce(q)
            return cls(lambda p, d=d: d, q, str(q))
        return cls(lambda p, q=q: Dyadic.from_fraction(q, -(p + 1)), q, str(q))

    @classmethod
    def sqrt(cls, q: Union[int, Fraction, str]) -> "RealName":
        q = Fraction(q)
        if q < 0:
            raise ValueError("square root of a negative number")
        num, den = q.numerator, q.denominator
        r_num, r_den = math.isqrt(num), math.isqrt(den)
        if r_num * r_num == num and r_den * r_den == den:
            return cls.rational(Fraction(r_num, r_den))

        def query(p: int) -> Dyadic:
            k = p + 1
            return Dyadic(math.isqrt((num << (2 * k)) // den), -k)

        return cls(query, None, f"sqrt({q})")

    @classmethod
    def named(cls, name: str) -> "RealName":
        table = {"sqrt2": lambda: cls.sqrt(2), "sqrt3": lambda: cls.sqrt(3), "sqrt5": lambda: cls.sqrt(5),
                 "pi": cls.pi, "e": cls.e}
        if name not in table:
            raise KeyError(name)
        return table[name]()

    @classmethod
    def pi(cls) -> "RealName":
        return cls(_mp_constant("pi"), None, "pi")

    @classmethod
    def e(cls) -> "RealName":
        return cls(_mp_constant("e"), None, "e")

    @classmethod
    def adversarial(cls, q: Union[int, Fraction, str]) -> "RealName":
        """A legal but awkward name: offsets of alternating sign ``±2**-(p+1)``."""
        q = Fraction(q)

        def query(p: int) -> Dyadic:
            off = Dyadic(1 if p % 2 == 0 else -1, -(p + 1))
            return Dyadic.from_fraction(q, -(p + 4)) + off

        return cls(query, q, f"adv({q})", shortcut=False)

    def __neg__(self) -> "RealName":
        inner = self.query
        exact = -self.exact if self.exact is not None else None
        label = f"-{self.label}" if self.label else None
        return RealName(lambda p: -inner(p), exact, label, self.shortcut)

    def __str__(self) -> str:
        return self.label or "<name>"


def _mp_constant(which: str) -> Callable[[int], Dyadic]:
    def query(p: int) -> Dyadic:
        import mpmath

        with mpmath.workprec(p + 40):
            v = mpmath.pi if which == "pi" else mpmath.e
            scaled = mpmath.floor(mpmath.ldexp(+v, p + 2))
            return Dyadic(int(scaled), -(p + 2))

    return query


@dataclass(frozen=True)
class ComplexName:
    re: RealName
    im: RealName = field(default_factory=lambda: RealName.rational(0))


NameLike = Union[RealName, ComplexName]


def as_name(x: Union[NameLike, int, Fraction, str]) -> NameLike:
    if isinstance(x, (RealName, ComplexName)):
        return x
    return RealName.rational(Fraction(x))


def name_to_ball(x: Union[NameLike, int, Fraction], p: int) -> ComplexBall:
    """Ball of radius at most ``2**-p`` containing the named number."""
    if p < 1:
        raise ValueError("precision must be at least 1")
    x = as_name(x)
    if isinstance(x, ComplexName):
        re = _real_part_ball(x.re, p + 1)
        im = _real_part_ball(x.im, p + 1)
        if re.rad.mantissa == 0 and im.rad.mantissa == 0:
            return ComplexBall(re.re, im.re)
        return ComplexBall(re.re, im.re, Dyadic(1, -(p + 1)))
    return _real_part_ball(x, p)


def _real_part_ball(x: RealName, p: int) -> ComplexBall:
    if x.shortcut and x.exact is not None and Dyadic.is_dyadic(x.exact):
        return ComplexBall(Dyadic.coerce(x.exact))
    return ComplexBall(x.query(p + 1), 0, Dyadic(1, -(p + 1)))


def exact_value(x: Union[NameLike, int, Fraction]) -> Optional[tuple[Fraction, Fraction]]:
    """The exact value of a name as ``(re, im)`` if known."""
    x = as_name(x)
    if isinstance(x, ComplexName):
        if x.re.exact is None or x.im.exact is None:
            return None
        return x.re.exact, x.im.exact
    if x.exact is None:
        return None
    return x.exact, Fraction(0)


def magnitude_bound(x: Union[NameLike, int, Fraction]) -> Fraction:
    """Rational upper bound on ``|x|``."""
    b = name_to_ball(x, 8)
    return b.mag_upper().to_fraction()


@dataclass(frozen=True)
class PrecisionState:
    """Outer accuracy index ``N``, working bits ``M`` and magnitude bound ``B``."""

    N: int
    M: int
    B: int

    def __post_init__(self) -> None:
        if self.M < self.N or self.B < 1:
            raise ValueError("PrecisionState requires M >= N and B >= 1")
