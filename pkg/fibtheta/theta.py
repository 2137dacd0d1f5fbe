"""
Certified values of the Jacobi theta functions at real nomes 0 < q < 1 in Q(sqrt5).

    theta_2(q) = 2 q^{1/4} sum_{n>=0} q^{n(n+1)}
    theta_3(q) = 1 + 2 sum_{n>=1} q^{n^2}
    theta_4(q) = 1 + 2 sum_{n>=1} (-1)^n q^{n^2}

Partial sums are exact; the tail after N terms is bounded by
2 q^{(N+1)^2} / (1 - q) (theta_3, theta_4) or 2 q^{(N+1)(N+2)} / (1 - q)
(theta_2 body). Targets are absolute radii: theta_4(beta) ~ 0.0303 loses
relative accuracy to cancellation, and divisions downstream inflate it.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from fibtheta.errors import DomainError
from fibtheta.exactnum import ONE, Ball, QuadElem, as_quad, decimal_exponent, fourth_root_enclosure

logger = logging.getLogger(__name__)

THETA_GUARD_DIGITS = 10


@dataclass(frozen=True)
class ThetaValue:
    """base_q^(quarter_exp/4) * body, kept unexpanded until collapse()."""
    base_q: QuadElem
    quarter_exp: int
    body: Ball
    terms: int = 0

    def __mul__(self, other):
        if isinstance(other, ThetaValue):
            if other.base_q != self.base_q:
                raise ValueError("Cannot merge theta values at different nomes.")
            return ThetaValue(self.base_q, self.quarter_exp + other.quarter_exp,
                              self.body * other.body, max(self.terms, other.terms))
        if isinstance(other, Ball):
            return ThetaValue(self.base_q, self.quarter_exp, self.body * other, self.terms)
        try:
            scalar = as_quad(other)
        except TypeError:
            return NotImplemented
        return ThetaValue(self.base_q, self.quarter_exp, self.body * scalar, self.terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ThetaValue":
        return ThetaValue(self.base_q, self.quarter_exp * n, self.body ** n, self.terms)

    def times_power(self, quarters: int) -> "ThetaValue":
        """Multiply by base_q^(quarters/4)."""
        return ThetaValue(self.base_q, self.quarter_exp + quarters, self.body, self.terms)


def _certify_nome(q: QuadElem) -> None:
    if q.sign() <= 0 or (ONE - q).sign() <= 0:
        raise DomainError(f"Theta nome must lie in the open interval (0, 1), got {q}.")


def _upper_nome(q: QuadElem) -> Fraction:
    """Dyadic upper bound of q that is still below 1."""
    digits = 20
    while True:
        hi = q.bounds(digits)[1]
        scale = 1 << int(digits * 3.33)
        qu = Fraction(-((-hi.numerator * scale) // hi.denominator), scale)
        if qu < 1:
            return qu
        digits *= 2


def tail_bound(which: int, q_upper: Fraction, terms: int) -> Fraction:
    """Bound on the omitted part of the series body after `terms` terms."""
    n = terms + 1
    exponent = n * (n + 1) if which == 2 else n * n
    return 2 * q_upper ** exponent / (1 - q_upper)


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def _choose_terms(which: int, q_upper: Fraction, budget: Fraction) -> int:
    # float estimate first, then walk to the exact smallest count
    log_q = _log(q_upper)
    log_budget = _log(budget * (1 - q_upper) / 2)
    guess = max(0, int(math.sqrt(max(log_budget / log_q, 0))) - 2)
    while guess > 0 and tail_bound(which, q_upper, guess - 1) <= budget:
        guess -= 1
    while tail_bound(which, q_upper, guess) > budget:
        guess += 1
    return guess


def _partial_sum(which: int, q: QuadElem, terms: int) -> QuadElem:
    q2 = q * q
    if which == 2:
        # sum_{n=0}^{N} q^{n(n+1)}; ratio between terms is q^{2(n+1)}
        total, term, step = ONE, ONE, q2
        for _ in range(terms):
            term = term * step
            total = total + term
            step = step * q2
        return 2 * total
    # sum_{n=1}^{N} (+-1)^n q^{n^2}; ratio between terms is q^{2n+1}
    total, term, step = ONE, ONE, q
    for n in range(1, terms + 1):
        term = term * step
        total = total + (term + term if which == 3 or n % 2 == 0 else -(term + term))
        step = step * q2
    return total


def theta_partial_ball(which: int, q: Union[QuadElem, Fraction, int], terms: int) -> ThetaValue:
    """Theta value from exactly `terms` series terms plus the certified tail.

    Balls for growing term counts are nested: each one contains the next.
    """
    if which not in (2, 3, 4):
        raise ValueError(f"Unknown theta function {which}; expected 2, 3 or 4.")
    if terms < 0:
        raise ValueError("Term count must be nonnegative.")
    q = as_quad(q)
    _certify_nome(q)
    q_upper = _upper_nome(q)
    body = Ball(_partial_sum(which, q, terms), tail_bound(which, q_upper, terms))
    return ThetaValue(q, 1 if which == 2 else 0, body, terms)


@lru_cache(maxsize=256)
def _theta_ball_cached(which: int, q: QuadElem, target_radius: Fraction) -> ThetaValue:
    _certify_nome(q)
    terms = _choose_terms(which, _upper_nome(q), target_radius / 2)
    value = theta_partial_ball(which, q, terms)
    logger.debug("theta_%d(%s): %d terms, tail %.3g", which, q, terms, float(value.body.radius))
    return value


def theta_ball(which: int, q: Union[QuadElem, Fraction, int], target_radius: Fraction) -> ThetaValue:
    """Certified theta value with body radius <= target_radius.

    For theta_2 the result carries quarter_exp = 1 and the body excludes q^{1/4}.
    """
    if which not in (2, 3, 4):
        raise ValueError(f"Unknown theta function {which}; expected 2, 3 or 4.")
    target_radius = Fraction(target_radius)
    if target_radius <= 0:
        raise ValueError("Target radius must be positive.")
    return _theta_ball_cached(which, as_quad(q), target_radius)


def collapse(value: ThetaValue, precision_digits: int) -> Ball:
    """Expand the quarter power into a plain Ball.

    Whole powers of base_q are applied exactly; a leftover q^{k/4} needs a
    fourth-root enclosure at the requested precision.
    """
    whole, quarters = divmod(value.quarter_exp, 4)
    result = value.body * (value.base_q ** whole) if whole else value.body
    if not quarters:
        return result
    scale = result.magnitude() + 1
    extra = decimal_exponent(scale) + 2
    root = fourth_root_enclosure(Ball.exact(value.base_q), precision_digits + extra + 2)
    return result * (root ** quarters)


def theta_value(which: int, q, precision_digits: int) -> Ball:
    """Fully collapsed theta value with radius below 10^-precision_digits."""
    target = Fraction(1, 10 ** precision_digits)
    guard = THETA_GUARD_DIGITS
    while True:
        ball = collapse(theta_ball(which, q, Fraction(1, 10 ** (precision_digits + guard))),
                        precision_digits + guard)
        if ball.radius < target:
            return ball
        guard += THETA_GUARD_DIGITS
