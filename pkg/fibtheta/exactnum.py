"""
Exact arithmetic substrate: rationals, the real quadratic field Q(sqrt5),
midpoint-radius balls and certified decimal rendering.

Every analytic quantity in the workbench is a Ball whose center is an exact
element of Q(sqrt5). Partial sums and partial products are exact; only tails,
root extractions and explicit rounding contribute radius.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

from fibtheta.errors import DomainError, PrecisionError

BigRational = Fraction

SQRT5_CACHE_DIGITS = 32        # default accuracy of magnitude bounds
ROUND_EXTRA_BITS = 64          # ball_round headroom above the working precision
SQRT5_UPPER = Fraction(9, 4)   # crude bound used only for rounding error terms

_ZERO = Fraction(0)
_HALF = Fraction(1, 2)


def _decimal_size(x: Fraction) -> int:
    """Upper bound on log10|x| (x != 0), rounded up and padded by one."""
    bits = x.numerator.bit_length() - x.denominator.bit_length() + 1
    return max(0, math.ceil(bits * 0.30103) + 1)


def decimal_exponent(x: Fraction) -> int:
    """floor(log10 x) for a positive rational, without converting to str."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"decimal_exponent needs a positive value, got {x}.")
    bits = x.numerator.bit_length() - x.denominator.bit_length()
    e = math.floor(bits * 0.30103)
    while _pow10(e) > x:
        e -= 1
    while _pow10(e + 1) <= x:
        e += 1
    return e


def _pow10(e: int) -> Fraction:
    return Fraction(10 ** e) if e >= 0 else Fraction(1, 10 ** -e)


@lru_cache(maxsize=256)
def sqrt5_bounds(digits: int) -> tuple[Fraction, Fraction]:
    """Rational lo < sqrt5 < hi with hi - lo = 10^-digits.

    floor(sqrt(5 * 10^(2d))) is exact, and the enclosures are nested:
    the cell at a finer grid always lies inside the coarser cell.
    """
    scale = 10 ** digits
    s = math.isqrt(5 * scale * scale)
    return Fraction(s, scale), Fraction(s + 1, scale)


@dataclass(frozen=True, slots=True)
class QuadElem:
    """Exact element a + b*sqrt5 of the real quadratic field Q(sqrt5)."""
    a: Fraction = _ZERO
    b: Fraction = _ZERO

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction) -> "QuadElem":
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        return obj

    # -- field operations ------------------------------------------------

    def __add__(self, other):
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        return QuadElem._raw(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem._raw(-self.a, -self.b)

    def __sub__(self, other):
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        return QuadElem._raw(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.a, self.b, other.a, other.b
        if not b and not d:
            return QuadElem._raw(a * c, _ZERO)
        return QuadElem._raw(a * c + 5 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("division by zero in Q(sqrt5)")
        return QuadElem._raw(self.a / n, -self.b / n)

    def __truediv__(self, other):
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        if not other.b:
            if not other.a:
                raise ZeroDivisionError("division by zero in Q(sqrt5)")
            return QuadElem._raw(self.a / other.a, self.b / other.a)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- structure -------------------------------------------------------

    def conjugate(self) -> "QuadElem":
        return QuadElem._raw(self.a, -self.b)

    def norm(self) -> Fraction:
        """x * conj(x) = a^2 - 5 b^2, exactly."""
        return self.a * self.a - 5 * self.b * self.b

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def is_rational(self) -> bool:
        return not self.b

    def sign(self) -> int:
        """Exact sign of the real number a + b*sqrt5."""
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if not sb:
            return sa
        if not sa or sa == sb:
            return sb
        # opposite signs; a^2 != 5 b^2 because sqrt5 is irrational
        return sa if a * a > 5 * b * b else sb

    def _cmp(self, other) -> int:
        q = _as_quad(other)
        if q is NotImplemented:
            raise TypeError(f"cannot compare QuadElem with {type(other).__name__}")
        return (self - q).sign()

    def __eq__(self, other):
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        # rational elements hash like the Fraction they equal
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- rational bounds -------------------------------------------------

    def bounds(self, digits: int = SQRT5_CACHE_DIGITS) -> tuple[Fraction, Fraction]:
        """Rational lo <= x <= hi with hi - lo <= 10^-digits.

        The sqrt5 enclosure is refined by the decimal size of b, so large
        components with heavy cancellation still give tight bounds.
        """
        a, b = self.a, self.b
        if not b:
            return a, a
        lo, hi = sqrt5_bounds(digits + _decimal_size(b))
        if b > 0:
            return a + b * lo, a + b * hi
        return a + b * hi, a + b * lo

    def abs_upper(self, digits: int = SQRT5_CACHE_DIGITS) -> Fraction:
        """Rational upper bound on |x|, loose by at most 10^-digits."""
        lo, hi = self.bounds(digits)
        return max(-lo, hi)

    def abs_lower(self, digits: int = SQRT5_CACHE_DIGITS) -> Fraction:
        """Positive rational lower bound on |x| (zero only for x = 0)."""
        if self.is_zero():
            return _ZERO
        while True:
            lo, hi = self.bounds(digits)
            if lo > 0:
                return lo
            if hi < 0:
                return -hi
            digits *= 2

    def __str__(self):
        if not self.b:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt5"


def _as_quad(value):
    if isinstance(value, QuadElem):
        return value
    if isinstance(value, (int, Fraction)):
        return QuadElem._raw(Fraction(value), _ZERO)
    return NotImplemented


def as_quad(value) -> QuadElem:
    """Coerce an int, Fraction or QuadElem into a QuadElem."""
    q = _as_quad(value)
    if q is NotImplemented:
        raise TypeError(f"cannot interpret {value!r} as an element of Q(sqrt5)")
    return q


ZERO = QuadElem._raw(_ZERO, _ZERO)
ONE = QuadElem._raw(Fraction(1), _ZERO)
SQRT5 = QuadElem._raw(_ZERO, Fraction(1))
ALPHA = QuadElem._raw(_HALF, _HALF)       # golden ratio (1 + sqrt5) / 2
BETA = QuadElem._raw(-_HALF, _HALF)       # 1 / alpha = (sqrt5 - 1) / 2
BETA4 = BETA ** 4                         # 2 - 3 beta = 7/2 - (3/2) sqrt5


@dataclass(frozen=True, slots=True)
class Ball:
    """Certified enclosure [center - radius, center + radius] of a real number."""
    center: QuadElem
    radius: Fraction = _ZERO

    def __post_init__(self):
        object.__setattr__(self, "center", as_quad(self.center))
        r = Fraction(self.radius)
        if r < 0:
            raise ValueError("Ball radius must be nonnegative.")
        object.__setattr__(self, "radius", r)

    @classmethod
    def exact(cls, value) -> "Ball":
        return cls(as_quad(value), _ZERO)

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction) -> "Ball":
        lo, hi = Fraction(lo), Fraction(hi)
        if hi < lo:
            raise ValueError(f"Empty interval [{lo}, {hi}].")
        return cls(QuadElem._raw((lo + hi) / 2, _ZERO), (hi - lo) / 2)

    @property
    def is_exact(self) -> bool:
        return not self.radius

    def bounds(self, digits: int = SQRT5_CACHE_DIGITS) -> tuple[Fraction, Fraction]:
        lo, hi = self.center.bounds(digits)
        return lo - self.radius, hi + self.radius

    def lower(self, digits: int = SQRT5_CACHE_DIGITS) -> Fraction:
        return self.bounds(digits)[0]

    def upper(self, digits: int = SQRT5_CACHE_DIGITS) -> Fraction:
        return self.bounds(digits)[1]

    def magnitude(self) -> Fraction:
        """Upper bound on |x| for every x in the ball."""
        return self.center.abs_upper() + self.radius

    # -- certified predicates --------------------------------------------

    def contains(self, other) -> bool:
        """Exact containment of a number or of a whole ball."""
        if isinstance(other, Ball):
            slack = self.radius - other.radius
            if slack < 0:
                return False
            d = other.center - self.center
        else:
            slack = self.radius
            d = as_quad(other) - self.center
        return (slack - d).sign() >= 0 and (slack + d).sign() >= 0

    def overlaps(self, other: "Ball") -> bool:
        """False only when the two enclosures are certifiably disjoint."""
        total = self.radius + other.radius
        d = other.center - self.center
        return (d - total).sign() <= 0 and (-d - total).sign() <= 0

    def gap_bounds(self, other: "Ball") -> tuple[Fraction, Fraction]:
        """(lower, upper) rational bounds on |x - y| over both enclosures."""
        d = other.center - self.center
        total = self.radius + other.radius
        if d.is_zero():
            return _ZERO, total
        # sqrt5 grid two decades finer than the radii, so the bounds track them
        digits = SQRT5_CACHE_DIGITS
        if total:
            digits = max(digits, 2 - decimal_exponent(total))
        return max(_ZERO, d.abs_lower(digits) - total), d.abs_upper(digits) + total

    def is_positive(self) -> bool:
        return (self.center - self.radius).sign() > 0

    def is_negative(self) -> bool:
        return (self.center + self.radius).sign() < 0

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Ball):
            return Ball(self.center + other.center, self.radius + other.radius)
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        return Ball(self.center + other, self.radius)

    __radd__ = __add__

    def __neg__(self):
        return Ball(-self.center, self.radius)

    def __sub__(self, other):
        if isinstance(other, Ball):
            return Ball(self.center - other.center, self.radius + other.radius)
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        return Ball(self.center - other, self.radius)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        if isinstance(other, Ball):
            r1, r2 = self.radius, other.radius
            radius = _ZERO
            if r2:
                radius += self.center.abs_upper() * r2
            if r1:
                radius += other.center.abs_upper() * r1 + r1 * r2
            return Ball(self.center * other.center, radius)
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        radius = self.radius * other.abs_upper() if self.radius else _ZERO
        return Ball(self.center * other, radius)

    __rmul__ = __mul__

    def inverse(self) -> "Ball":
        """1/x for a ball certified to exclude zero."""
        if self.is_exact:
            return Ball(self.center.inverse(), _ZERO)
        m = self.center.abs_lower()
        if m <= self.radius:
            raise DomainError("Cannot divide by a ball that may contain zero.")
        return Ball(self.center.inverse(), self.radius / (m * (m - self.radius)))

    def __truediv__(self, other):
        if isinstance(other, Ball):
            return self * other.inverse()
        other = _as_quad(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = Ball(ONE, _ZERO)
        for _ in range(n):
            result = result * self
        return result

    def __str__(self):
        return f"[{render_decimal(self, 20).text} +/- {render_scientific(self.radius)}]"


class QuadOp(Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"


def quad_arith(x: QuadElem, y: QuadElem, op: Union[QuadOp, str]) -> QuadElem:
    """Exact field arithmetic in Q(sqrt5); div raises ZeroDivisionError on y = 0."""
    op = QuadOp(op)
    if op == QuadOp.ADD:
        return x + y
    elif op == QuadOp.SUB:
        return x - y
    elif op == QuadOp.MUL:
        return x * y
    return x / y


def ball_arith(x: Ball, y: Ball, op: Union[QuadOp, str]) -> Ball:
    """Sound ball arithmetic: the result contains every combination of members."""
    op = QuadOp(op)
    if op == QuadOp.ADD:
        return x + y
    elif op == QuadOp.SUB:
        return x - y
    elif op == QuadOp.MUL:
        return x * y
    return x / y


def _round_to_grid(v: Fraction, shift: int) -> Fraction:
    """Nearest multiple of 2^-shift."""
    if shift >= 0:
        n = ((v.numerator << (shift + 1)) // v.denominator + 1) >> 1
        return Fraction(n, 1 << shift)
    unit = 1 << (-shift)
    return Fraction(math.floor(v / unit + _HALF) * unit)


def ball_round(x: Ball, mantissa_bits: int) -> Ball:
    """Round the center onto a dyadic grid of about `mantissa_bits` bits
    below the magnitude of x, inflating the radius by the rounding error.

    A center already on the grid is returned unchanged.
    """
    if mantissa_bits < 8:
        raise ValueError("ball_round needs at least 8 mantissa bits.")
    c = x.center
    if c.is_zero():
        return x
    mag = c.abs_upper()
    exponent = mag.numerator.bit_length() - mag.denominator.bit_length() + 1
    shift = mantissa_bits - exponent
    a = _round_to_grid(c.a, shift)
    b = _round_to_grid(c.b, shift) if c.b else _ZERO
    if a == c.a and b == c.b:
        return x
    err = abs(a - c.a) + abs(b - c.b) * SQRT5_UPPER
    return Ball(QuadElem._raw(a, b), x.radius + err)


def working_bits(target_radius: Fraction) -> int:
    """Mantissa budget for accumulations that must end below target_radius."""
    target_radius = Fraction(target_radius)
    return max(8, target_radius.denominator.bit_length()
               - target_radius.numerator.bit_length() + ROUND_EXTRA_BITS)


def rationalize(x: Ball, digits: int) -> Ball:
    """Replace the center by a rational on the 10^-(digits+1) grid."""
    lo, hi = x.center.bounds(digits + 1)
    scale = 10 ** (digits + 1)
    mid = (lo + hi) / 2
    c = Fraction(math.floor(mid * scale + _HALF), scale)
    slack = (hi - lo) / 2 + abs(c - mid)
    return Ball(QuadElem._raw(c, _ZERO), x.radius + slack)


def sqrt5_enclosure(precision_digits: int) -> Ball:
    """Ball around sqrt5 with rational center and radius < 10^-precision_digits."""
    if precision_digits < 1:
        raise ValueError("precision_digits must be positive.")
    return Ball.from_bounds(*sqrt5_bounds(precision_digits))


def _iroot4(n: int) -> int:
    return math.isqrt(math.isqrt(n))


def fourth_root_enclosure(x: Ball, precision_digits: int) -> Ball:
    """Ball of radius < 10^-precision_digits containing x^(1/4).

    t -> t^4 is monotone on the positive reals, so the integer fourth roots
    of the outward-rounded endpoints bracket the root.
    """
    if precision_digits < 1:
        raise ValueError("precision_digits must be positive.")
    k = precision_digits + 2
    lo, hi = x.bounds(4 * k + 10)
    if lo <= 0:
        raise DomainError("Fourth root needs an argument certified positive.")
    scale = 10 ** (4 * k)
    t_lo = _iroot4(math.floor(lo * scale))
    n_hi = math.ceil(hi * scale)
    t_hi = _iroot4(n_hi)
    if t_hi ** 4 < n_hi:
        t_hi += 1
    unit = 10 ** k
    result = Ball.from_bounds(Fraction(t_lo, unit), Fraction(t_hi, unit))
    if result.radius >= Fraction(1, 10 ** precision_digits):
        raise PrecisionError(
            f"Input enclosure too wide for a {precision_digits}-digit fourth root."
        )
    return result


class RenderedDecimal(NamedTuple):
    text: str
    certified: bool


def _format_fixed(n: int, digits: int) -> str:
    sign = "-" if n < 0 else ""
    s = str(abs(n)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + s
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


class DecimalMode(str, Enum):
    NEAREST = "nearest"
    TRUNCATE = "truncate"


def _truncate(v: Fraction) -> int:
    return math.floor(v) if v >= 0 else -math.floor(-v)


def render_decimal(x: Ball, digits: int,
                   mode: Union[DecimalMode, str] = DecimalMode.NEAREST) -> RenderedDecimal:
    """Center printed to `digits` places.

    NEAREST rounds the center half-up and is certified iff
    radius < 0.5 * 10^-digits. TRUNCATE chops toward zero, the way constants
    are quoted with a trailing ellipsis, and is certified iff both ends of
    the enclosure truncate to the same digits.
    """
    mode = DecimalMode(mode)
    unit = 10 ** digits
    lo, hi = x.center.bounds(digits + 10)
    if mode == DecimalMode.NEAREST:
        n = math.floor((lo + hi) / 2 * unit + _HALF)
        return RenderedDecimal(_format_fixed(n, digits), x.radius < Fraction(1, 2 * unit))
    n = _truncate((lo + hi) / 2 * unit)
    certified = _truncate((lo - x.radius) * unit) == n == _truncate((hi + x.radius) * unit)
    return RenderedDecimal(_format_fixed(n, digits), certified)


def render_scientific(value: Fraction, significant: int = 2, upward: bool = True) -> str:
    """Compact decimal for a nonnegative bound, rounded outward (up or down)."""
    value = abs(Fraction(value))
    if not value:
        return "0"
    e = decimal_exponent(value)
    scaled = value / _pow10(e - significant + 1)
    m = math.ceil(scaled) if upward else math.floor(scaled)
    if m >= 10 ** significant:
        m //= 10
        e += 1
    digits = str(m)
    mantissa = digits[0] + ("." + digits[1:] if len(digits) > 1 else "")
    return f"{mantissa}e{e:+03d}"


def refine_to_precision(build, precision_digits: int, guard_digits: int = 10,
                        max_rounds: int = 6) -> Ball:
    """Call build(working_digits) with growing guard digits until the ball's
    radius drops below 10^-precision_digits; returns the last ball otherwise.
    """
    target = Fraction(1, 10 ** precision_digits)
    guard = guard_digits
    ball = None
    for _ in range(max_rounds):
        ball = build(precision_digits + guard)
        if ball.radius < target:
            return ball
        guard *= 2
    return ball
