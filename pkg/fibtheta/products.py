"""
Certified Fibonacci infinite products and reciprocal sums.

Partial products are exact rationals rounded with ball_round; the tail is
enclosed multiplicatively. For the factors left after the cutoff,

    |log(1 + s*j/F)| <= j / (F - j),

and since F_{n+1} >= (3/2) F_n past the ratio start, (F' - j) >= (3/2)(F - j)
along the remaining indices, so the whole tail satisfies |log T| <= eps with

    eps = 3 j / (F_first - j).

For eps < 1/2 this gives T in [1, 1/(1 - eps)] (s = +1) or [1 - eps, 1] (s = -1).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import count
from typing import Iterator, Union

from fibtheta.errors import DomainError, PrecisionError, ResourceError, UsageError
from fibtheta.exactnum import (
    BETA, BETA4, ONE, SQRT5, Ball, QuadElem, ball_round, refine_to_precision, working_bits,
)
from fibtheta.fibonacci import IndexConvention, fib, ratio_start
from fibtheta.theta import THETA_GUARD_DIGITS, ThetaValue, collapse, theta_ball

logger = logging.getLogger(__name__)

MAX_PRODUCT_FACTORS = 100_000
_HALF = Fraction(1, 2)


class IndexMap(Enum):
    ALL = "all"          # n
    ODD = "odd"          # 2n - 1
    EVEN = "even"        # 2n
    POWERS = "powers"    # 2^n


@dataclass(frozen=True)
class ProductSpec:
    """prod_{n >= n0} (1 + sign * numerator / F_{index(n)})."""
    sign: int
    index_map: IndexMap
    n0: int = 1
    numerator: int = 1
    convention: IndexConvention = IndexConvention.STANDARD

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise DomainError("Product sign must be +1 or -1.")
        object.__setattr__(self, "index_map", IndexMap(self.index_map))
        object.__setattr__(self, "convention", IndexConvention(self.convention))
        if self.numerator < 1:
            raise DomainError("Factor numerator must be a positive integer.")
        if self.n0 < 0 or (self.index_map == IndexMap.ODD and self.n0 < 1):
            raise DomainError(f"Invalid starting index n0={self.n0} for {self.index_map.value}.")
        first = fib(self.index(self.n0), self.convention)
        if first == 0:
            raise DomainError("Product touches F = 0.")
        # F is nondecreasing from the first nonzero term on
        if self.sign < 0 and first <= self.numerator:
            raise DomainError(
                f"Factor 1 - {self.numerator}/{first} at n={self.n0} is not positive."
            )

    def index(self, n: int) -> int:
        if self.index_map == IndexMap.ALL:
            return n
        elif self.index_map == IndexMap.ODD:
            return 2 * n - 1
        elif self.index_map == IndexMap.EVEN:
            return 2 * n
        return 2 ** n

    def indices(self) -> Iterator[int]:
        for n in count(self.n0):
            yield self.index(n)

    def factor(self, index: int) -> Fraction:
        f = fib(index, self.convention)
        return Fraction(f + self.sign * self.numerator, f)


XI1 = ProductSpec(sign=1, index_map=IndexMap.ALL, n0=1)
XI2 = ProductSpec(sign=-1, index_map=IndexMap.ALL, n0=3)
ODD_PLUS = ProductSpec(sign=1, index_map=IndexMap.ODD, n0=1)
ODD_MINUS = ProductSpec(sign=-1, index_map=IndexMap.ODD, n0=2)
EVEN_PLUS = ProductSpec(sign=1, index_map=IndexMap.EVEN, n0=1)
EVEN_MINUS = ProductSpec(sign=-1, index_map=IndexMap.EVEN, n0=2)


def gamma_spec(j: int, convention: IndexConvention = IndexConvention.STANDARD) -> ProductSpec:
    """prod_{n>=1} (1 + j / F_{2^n})."""
    return ProductSpec(sign=1, index_map=IndexMap.POWERS, n0=1, numerator=j, convention=convention)


def _tail_eps(spec: ProductSpec, index: int):
    """eps bounding |log| of the tail starting at `index`, or None if unusable."""
    if index < ratio_start(spec.convention):
        return None
    f = fib(index, spec.convention)
    j = spec.numerator
    if f <= j:
        return None
    eps = Fraction(3 * j, f - j)
    return eps if eps < _HALF else None


def _tail_ball(eps: Fraction, sign: int) -> Ball:
    if sign > 0:
        return Ball.from_bounds(Fraction(1), 1 / (1 - eps))
    return Ball.from_bounds(1 - eps, Fraction(1))


def partial_product(spec: ProductSpec, factors: int) -> Fraction:
    """Exact product of the first `factors` factors."""
    result = Fraction(1)
    for _, index in zip(range(factors), spec.indices()):
        result *= spec.factor(index)
    return result


def product_at_cutoff(spec: ProductSpec, factors: int) -> Ball:
    """Exact partial product of `factors` factors times the certified tail enclosure."""
    index = spec.index(spec.n0 + factors)
    eps = _tail_eps(spec, index)
    if eps is None:
        raise PrecisionError(f"Cutoff {factors} is too early for a certified tail bound.")
    return Ball.exact(partial_product(spec, factors)) * _tail_ball(eps, spec.sign)


def eval_product(spec: ProductSpec, target_radius: Fraction,
                 max_factors: int = MAX_PRODUCT_FACTORS) -> Ball:
    """Ball of radius <= target_radius containing the infinite product."""
    target = Fraction(target_radius)
    if target <= 0:
        raise ValueError("Target radius must be positive.")
    bits = working_bits(target) + 8
    partial = Ball.exact(ONE)
    for used, index in enumerate(spec.indices()):
        if used >= max_factors:
            raise ResourceError(
                f"Product did not reach radius {float(target):.3g} within {max_factors} factors."
            )
        eps = _tail_eps(spec, index)
        if eps is not None and eps * partial.magnitude() <= 2 * target:
            ball = partial * _tail_ball(eps, spec.sign)
            if ball.radius <= target:
                logger.debug("product %s: %d factors, radius %.3g",
                             spec.index_map.value, used, float(ball.radius))
                return ball
        partial = ball_round(partial * spec.factor(index), bits)
    raise AssertionError("unreachable")


def lucas_partial_sum(terms: int, convention: IndexConvention = IndexConvention.STANDARD) -> Fraction:
    """sum_{n=1}^{terms} 1 / F_{2^n}."""
    return sum((Fraction(1, fib(2 ** n, convention)) for n in range(1, terms + 1)), Fraction(0))


def eval_lucas_sum(target_radius: Fraction,
                   convention: IndexConvention = IndexConvention.STANDARD) -> Ball:
    """Ball containing sum_{n>=1} 1 / F_{2^n}.

    F_{2m} = F_m L_m >= F_m^2, so y_{n+1} <= y_n^2 for y_n = 1 / F_{2^n}
    (standard indices). With x = y_{N+1} <= 1/2 the tail after N terms is at
    most x + x^2 + x^4 + ... <= x / (1 - x). Shifted terms 1 / F_{2^n + 1}
    are smaller, so the same majorant applies.
    """
    target = Fraction(target_radius)
    total = Fraction(0)
    for n in count(1):
        total += Fraction(1, fib(2 ** n, convention))
        x = Fraction(1, fib(2 ** (n + 1)))
        if x <= _HALF:
            tail = x / (1 - x)
            if tail <= target:
                logger.debug("lucas sum: %d terms, tail %.3g", n, float(tail))
                return Ball.from_bounds(total, total + tail)
    raise AssertionError("unreachable")


class SumKind(Enum):
    ALL = "all"
    ODD = "odd"
    EVEN = "even"


def _sum_indices(kind: SumKind) -> Iterator[int]:
    for n in count(1):
        if kind == SumKind.ALL:
            yield n
        elif kind == SumKind.ODD:
            yield 2 * n - 1
        else:
            yield 2 * n


def reciprocal_partial_sum(kind: Union[SumKind, str], terms: int) -> Fraction:
    kind = SumKind(kind)
    return sum((Fraction(1, fib(i)) for _, i in zip(range(terms), _sum_indices(kind))),
               Fraction(0))


def eval_reciprocal_sum(kind: Union[SumKind, str], target_radius: Fraction,
                        convention: IndexConvention = IndexConvention.STANDARD) -> Ball:
    """Ball containing sum 1/F_n, sum 1/F_{2n-1} or sum 1/F_{2n}.

    Past the ratio start the remaining terms shrink by at least 2/3 each,
    so the tail from index m is at most 3 / F_m.
    """
    kind = SumKind(kind)
    target = Fraction(target_radius)
    bits = working_bits(target) + 8
    start = ratio_start(convention)
    acc = Ball.exact(0)
    for index in _sum_indices(kind):
        f = fib(index, convention)
        if index >= start:
            tail = Fraction(3, f)
            if tail <= target / 2:
                return acc + Ball.from_bounds(Fraction(0), tail)
        acc = ball_round(acc + Fraction(1, f), bits)
    raise AssertionError("unreachable")


# -- theta-side formulas -----------------------------------------------------

def thm1_assembly(which: str, inner_radius: Fraction) -> tuple[ThetaValue, ThetaValue]:
    """Numerator and denominator of the theta formulas for xi1 and xi2.

    beta^{-5/4} merges with theta_2's q^{1/4}, so the numerator's quarter
    exponent is -4 and collapses to the exact factor beta^{-1}.
    """
    numerator = theta_ball(2, BETA, inner_radius).times_power(-5)
    if which == "xi1":
        numerator = numerator * 2
    elif which == "xi2":
        numerator = (numerator * theta_ball(3, BETA, inner_radius)
                     * theta_ball(4, BETA, inner_radius) * (SQRT5 / 6))
    else:
        raise UsageError(f"Unknown theorem constant '{which}'; expected xi1 or xi2.")
    return numerator, theta_ball(4, BETA4, inner_radius)


def thm1_rhs(which: str, precision_digits: int) -> Ball:
    """xi1 = 2 beta^{-5/4} theta_2(beta) / theta_4(beta^4),
    xi2 = (sqrt5/6) beta^{-5/4} theta_2 theta_3 theta_4 (beta) / theta_4(beta^4).
    """
    if precision_digits < 10:
        raise ValueError("thm1_rhs needs at least 10 digits.")

    def build(digits: int) -> Ball:
        numerator, denominator = thm1_assembly(which, Fraction(1, 10 ** digits))
        assert numerator.quarter_exp % 4 == 0
        return collapse(numerator, digits) / collapse(denominator, digits)

    return refine_to_precision(build, precision_digits, THETA_GUARD_DIGITS)


def odd_plus_rhs(precision_digits: int) -> Ball:
    """beta^{-1/4} theta_2(beta) / theta_4(beta^4); the quarter powers cancel."""
    def build(digits: int) -> Ball:
        r = Fraction(1, 10 ** digits)
        numerator = theta_ball(2, BETA, r).times_power(-1)
        return collapse(numerator, digits) / theta_ball(4, BETA4, r).body
    return refine_to_precision(build, precision_digits, THETA_GUARD_DIGITS)


def odd_minus_rhs(precision_digits: int) -> Ball:
    """beta^{-1/4} (1 + beta^2) / (2 (1 - beta^2)) theta_2 theta_3 theta_4 (beta) / theta_4(beta^4)."""
    prefactor = (1 + BETA ** 2) / (2 * (1 - BETA ** 2))

    def build(digits: int) -> Ball:
        r = Fraction(1, 10 ** digits)
        numerator = (theta_ball(2, BETA, r).times_power(-1)
                     * theta_ball(3, BETA, r) * theta_ball(4, BETA, r) * prefactor)
        return collapse(numerator, digits) / theta_ball(4, BETA4, r).body
    return refine_to_precision(build, precision_digits, THETA_GUARD_DIGITS)


# -- telescoping forms (exact identities in Q(sqrt5)) -----------------------

def even_plus_telescoped(terms: int) -> QuadElem:
    """prod_{n=1}^{N} (1 + 1/F_{2n}) = 2 (1 - beta^{2N+2}) / ((1 + beta^{2N}) (1 - beta^2))."""
    return 2 * (1 - BETA ** (2 * terms + 2)) / ((1 + BETA ** (2 * terms)) * (1 - BETA ** 2))


def even_minus_telescoped(terms: int) -> QuadElem:
    """prod_{n=2}^{N} (1 - 1/F_{2n}) = (1 + beta^{2N+2}) (1 - beta^2) / ((1 + beta^4) (1 - beta^{2N}))."""
    if terms < 2:
        raise ValueError("The minus product starts at n = 2.")
    return ((1 + BETA ** (2 * terms + 2)) * (1 - BETA ** 2)
            / ((1 + BETA ** 4) * (1 - BETA ** (2 * terms))))


def odd_factor_form(n: int, sign: int) -> QuadElem:
    """(1 + s beta^{2n-2}) (1 + s beta^{2n}) / (1 + beta^{4n-2}), equal to 1 + s/F_{2n-1}."""
    return ((1 + sign * BETA ** (2 * n - 2)) * (1 + sign * BETA ** (2 * n))
            / (1 + BETA ** (4 * n - 2)))


EVEN_PLUS_LIMIT = 1 + SQRT5              # 2 alpha
EVEN_MINUS_LIMIT = (1 + SQRT5) / 6       # alpha / 3
LUCAS_SUM_LIMIT = (5 - SQRT5) / 2
