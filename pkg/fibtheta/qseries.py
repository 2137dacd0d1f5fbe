"""
Exact truncated power series in q, used to check the theta product
identities coefficient by coefficient.

A TruncSeries carries a global factor q^(k/4) as an integer quarter offset,
so the q^(1/4) in front of theta_2 never enters the coefficient array.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from fibtheta.errors import UsageError

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 200


@dataclass(frozen=True)
class TruncSeries:
    """sum_{k=0}^{order} coeffs[k] q^k, times q^(quarter_offset/4)."""
    order: int
    coeffs: tuple[Fraction, ...]
    quarter_offset: int = 0

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("Series order must be nonnegative.")
        if len(self.coeffs) != self.order + 1:
            raise ValueError(
                f"Series of order {self.order} needs {self.order + 1} coefficients, "
                f"got {len(self.coeffs)}."
            )
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, order: int, quarter_offset: int = 0) -> "TruncSeries":
        """Pad or cut a coefficient list to the given order."""
        body = list(coeffs[:order + 1])
        body += [0] * (order + 1 - len(body))
        return cls(order, tuple(body), quarter_offset)

    @classmethod
    def constant(cls, value, order: int) -> "TruncSeries":
        return cls.from_coeffs([value], order)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def _check_offset(self, other: "TruncSeries") -> None:
        if self.quarter_offset != other.quarter_offset:
            raise ValueError(
                f"Series carry different quarter offsets "
                f"({self.quarter_offset} vs {other.quarter_offset})."
            )

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        a, b = self.normalized(), other.normalized()
        a._check_offset(b)
        n = min(a.order, b.order)
        return TruncSeries(n, tuple(a.coeffs[k] + b.coeffs[k] for k in range(n + 1)),
                           a.quarter_offset)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.order, tuple(-c for c in self.coeffs), self.quarter_offset)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return series_mul(self, other)
        if isinstance(other, (int, Fraction)):
            return TruncSeries(self.order, tuple(c * other for c in self.coeffs),
                               self.quarter_offset)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TruncSeries":
        if n < 0:
            raise ValueError("Only nonnegative powers of a truncated series are defined.")
        result = TruncSeries.constant(1, self.order)
        for _ in range(n):
            result = series_mul(result, self)
        return result

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by q^k (k >= 0), keeping the order."""
        if k < 0:
            if any(self.coeffs[:-k]):
                raise ValueError("Cannot divide by q: low coefficients are nonzero.")
            return TruncSeries.from_coeffs(list(self.coeffs[-k:]), self.order, self.quarter_offset)
        return TruncSeries.from_coeffs([0] * k + list(self.coeffs), self.order, self.quarter_offset)

    def with_quarter_offset(self, quarter_offset: int) -> "TruncSeries":
        return TruncSeries(self.order, self.coeffs, quarter_offset)

    def normalized(self) -> "TruncSeries":
        """Fold whole powers of q out of the quarter offset into the coefficients."""
        whole, rest = divmod(self.quarter_offset, 4)
        if not whole:
            return self
        if whole < 0 and any(self.coeffs[:-whole]):
            return self
        return self.with_quarter_offset(rest).shift(whole)

    def dilate(self, m: int) -> "TruncSeries":
        return dilate(self, m)


def series_mul(x: TruncSeries, y: TruncSeries) -> TruncSeries:
    """Convolution truncated to min(x.order, y.order); quarter offsets add."""
    n = min(x.order, y.order)
    out = [Fraction(0)] * (n + 1)
    xc, yc = x.coeffs, y.coeffs
    for i in range(n + 1):
        xi = xc[i]
        if not xi:
            continue
        for j in range(n + 1 - i):
            yj = yc[j]
            if yj:
                out[i + j] += xi * yj
    return TruncSeries(n, tuple(out), x.quarter_offset + y.quarter_offset)


def dilate(x: TruncSeries, m: int) -> TruncSeries:
    """Substitute q -> q^m: coefficient k moves to index m*k."""
    if m < 1:
        raise ValueError("Dilation factor must be a positive integer.")
    out = [Fraction(0)] * (x.order + 1)
    for k in range(x.order // m + 1):
        out[m * k] = x.coeffs[k]
    return TruncSeries(x.order, tuple(out), x.quarter_offset * m)


def evaluate(x: TruncSeries, q: Fraction) -> Fraction:
    """Exact Horner value of the coefficient array at a rational q (offset ignored)."""
    q = Fraction(q)
    acc = Fraction(0)
    for c in reversed(x.coeffs):
        acc = acc * q + c
    return acc


class ThetaKind(Enum):
    TWO_BODY = "2body"
    THREE = "3"
    FOUR = "4"


def theta_series(which: Union[ThetaKind, str], order: int) -> TruncSeries:
    """Truncated theta series.

    2body is 2 sum q^{n(n+1)} with quarter offset 1, so theta_2 = q^{1/4} * body;
    3 is 1 + 2 sum q^{n^2}; 4 is 1 + 2 sum (-1)^n q^{n^2}.
    """
    which = ThetaKind(which)
    if order < 0:
        raise ValueError("Series order must be nonnegative.")
    c = [0] * (order + 1)
    if which == ThetaKind.TWO_BODY:
        n = 0
        while n * (n + 1) <= order:
            c[n * (n + 1)] += 2
            n += 1
        return TruncSeries.from_coeffs(c, order, quarter_offset=1)
    c[0] = 1
    n = 1
    while n * n <= order:
        c[n * n] += 2 if which == ThetaKind.THREE or n % 2 == 0 else -2
        n += 1
    return TruncSeries.from_coeffs(c, order)


@dataclass(frozen=True)
class ProductFactor:
    """prod_{n>=1} (1 + sign * q^(a*n + b))^power."""
    sign: int
    a: int
    b: int = 0
    power: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("Factor sign must be +1 or -1.")
        if self.a < 1:
            raise ValueError("Exponent slope must be at least 1.")
        if self.a + self.b < 0:
            raise ValueError("Exponents a*n + b must be nonnegative for n >= 1.")
        if self.power < 1:
            raise ValueError("Factor power must be positive.")


def product_series(factors: Sequence[ProductFactor], order: int) -> TruncSeries:
    """Exact truncation of prod_{n>=1} prod_f (1 + sign q^(a n + b))^power.

    Each binomial is applied in place, highest index first, so a pass costs O(order).
    """
    c = [Fraction(0)] * (order + 1)
    c[0] = Fraction(1)
    for f in factors:
        n = 1
        while f.a * n + f.b <= order:
            e = f.a * n + f.b
            for _ in range(f.power):
                if e == 0:
                    c = [v * (1 + f.sign) for v in c]
                    continue
                for k in range(order, e - 1, -1):
                    c[k] += f.sign * c[k - e]
            n += 1
    return TruncSeries(order, tuple(c))


# -- identity registry -----------------------------------------------------

def _theta(which: str, order: int) -> TruncSeries:
    return theta_series(which, order)


def _tp2(order):
    rhs = product_series([ProductFactor(-1, 2), ProductFactor(1, 2, -2), ProductFactor(1, 2)], order)
    return [_theta("2body", order), rhs.with_quarter_offset(1)]


def _tp3(order):
    return [_theta("3", order),
            product_series([ProductFactor(-1, 2), ProductFactor(1, 2, -1, 2)], order)]


def _tp4(order):
    return [_theta("4", order),
            product_series([ProductFactor(-1, 2), ProductFactor(-1, 2, -1, 2)], order)]


def _eq46(order):
    body = _theta("2body", order).with_quarter_offset(0)
    return [body,
            product_series([ProductFactor(-1, 2), ProductFactor(1, 2, -2), ProductFactor(1, 2)], order)]


def _eq467(order):
    lhs = _theta("2body", order) * _theta("3", order) * _theta("4", order)
    rhs = product_series([ProductFactor(-1, 2, 0, 3)], order) * 2
    return [lhs, rhs.with_quarter_offset(1)]


def _eq47chain(order):
    return [
        dilate(_theta("4", order), 4),
        product_series([ProductFactor(-1, 8), ProductFactor(-1, 8, -4, 2)], order),
        product_series([ProductFactor(-1, 4), ProductFactor(-1, 8, -4)], order),
        product_series([ProductFactor(-1, 4), ProductFactor(-1, 4, -2), ProductFactor(1, 4, -2)], order),
        product_series([ProductFactor(-1, 2), ProductFactor(1, 4, -2)], order),
    ]


def _jacobi_quartic(order):
    t2, t3, t4 = _theta("2body", order), _theta("3", order), _theta("4", order)
    return [t3 ** 4, (t2 ** 4).normalized() + t4 ** 4]


def _landen_sum(order):
    t3, t4 = _theta("3", order), _theta("4", order)
    return [dilate(t3 ** 2, 2) * 2, t3 ** 2 + t4 ** 2]


def _landen_prod(order):
    t3, t4 = _theta("3", order), _theta("4", order)
    return [dilate(t4 ** 2, 2), t3 * t4]


SERIES_IDENTITIES: dict[str, Callable[[int], list[TruncSeries]]] = {
    "tp2": _tp2,
    "tp3": _tp3,
    "tp4": _tp4,
    "eq46": _eq46,
    "eq467": _eq467,
    "eq47chain": _eq47chain,
    "jacobi_quartic": _jacobi_quartic,
    "landen_sum": _landen_sum,
    "landen_prod": _landen_prod,
}


@dataclass
class IdentityResult:
    name: str
    order: int
    passed: bool
    first_mismatch: Optional[int] = None   # coefficient index
    failing_link: Optional[int] = None     # position in a chain of forms
    difference: Fraction = Fraction(0)


def compare_series(lhs: TruncSeries, rhs: TruncSeries) -> Optional[int]:
    """Index of the first differing coefficient, or None when equal to min order."""
    a, b = lhs.normalized(), rhs.normalized()
    a._check_offset(b)
    for k in range(min(a.order, b.order) + 1):
        if a.coeffs[k] != b.coeffs[k]:
            return k
    return None


def verify_forms(name: str, forms: Sequence[TruncSeries], order: int) -> IdentityResult:
    """Check that consecutive forms agree coefficient by coefficient."""
    for link in range(len(forms) - 1):
        lhs, rhs = forms[link], forms[link + 1]
        k = compare_series(lhs, rhs)
        if k is not None:
            diff = lhs.normalized().coeffs[k] - rhs.normalized().coeffs[k]
            logger.debug("identity %s: link %d differs at q^%d", name, link, k)
            return IdentityResult(name, order, False, k, link, diff)
    return IdentityResult(name, order, True)


def verify_identity(name: str, order: int = DEFAULT_ORDER) -> IdentityResult:
    """Expand both sides of a registered identity to `order` and compare exactly."""
    try:
        builder = SERIES_IDENTITIES[name]
    except KeyError:
        raise UsageError(
            f"Unknown identity '{name}'. Known: {', '.join(sorted(SERIES_IDENTITIES))}."
        ) from None
    if order < 0:
        raise UsageError("Series order must be nonnegative.")
    return verify_forms(name, builder(order), order)
