"""
Fibonacci numbers under both index conventions.

The standard convention (F_0 = 0, F_1 = F_2 = 1) is the default everywhere:
the printed constants 13.1509666577 and 0.1897891436, the closed forms for
the even-index products and the sum over F_{2^n} are only consistent with it.
The shifted convention (F_0 = F_1 = 1) also appears in print; it is
kept selectable so the discrepancy can be reproduced.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from fibtheta.exactnum import ALPHA, BETA, SQRT5, Ball, DecimalMode, render_decimal

logger = logging.getLogger(__name__)

PRINTED_XI1 = Fraction(131509666577, 10 ** 10)
PRINTED_XI2 = Fraction(1897891436, 10 ** 10)


class IndexConvention(Enum):
    STANDARD = "standard"
    SHIFTED = "shifted"


def fib_pair(n: int) -> tuple[int, int]:
    """(F_n, F_{n+1}) in the standard convention, by fast doubling.

    F_2k = F_k (2 F_{k+1} - F_k),  F_2k+1 = F_k^2 + F_{k+1}^2.
    """
    if n < 0:
        raise ValueError(f"Fibonacci index must be nonnegative, got {n}.")
    a, b = 0, 1
    for bit in bin(n)[2:]:
        c = a * (2 * b - a)
        d = a * a + b * b
        if bit == "1":
            a, b = d, c + d
        else:
            a, b = c, d
    return a, b


@lru_cache(maxsize=4096)
def _fib_standard(n: int) -> int:
    return fib_pair(n)[0]


def fib(n: int, conv: IndexConvention = IndexConvention.STANDARD) -> int:
    """Exact F_n under the given index convention."""
    if n < 0:
        raise ValueError(f"Fibonacci index must be nonnegative, got {n}.")
    if IndexConvention(conv) == IndexConvention.SHIFTED:
        return _fib_standard(n + 1)
    return _fib_standard(n)


def ratio_start(conv: IndexConvention = IndexConvention.STANDARD) -> int:
    """Smallest n with F_{n+1} / F_n >= 3/2 from there on."""
    return 1 if IndexConvention(conv) == IndexConvention.SHIFTED else 2


def fib_binet_ball(n: int, precision_digits: int = 1) -> Ball:
    """(alpha^n - (-beta)^n) / sqrt5 evaluated exactly in Q(sqrt5).

    The sqrt5 factors cancel, so the ball has radius 0 and an integer center.
    precision_digits is accepted for interface symmetry; no rounding happens.
    """
    if n < 0:
        raise ValueError(f"Fibonacci index must be nonnegative, got {n}.")
    value = (ALPHA ** n - (-BETA) ** n) / SQRT5
    return Ball.exact(value)


@dataclass
class ProbeEntry:
    """One quantity evaluated under one convention.

    reference is the published value as an exact ball: the printed digits
    for the products, the closed form for the reciprocal sum.
    """
    convention: IndexConvention
    quantity: str
    value: Ball
    decimal: str
    printed: str
    reproduces_printed: bool
    reference: Ball

    def distance_bounds(self) -> tuple[Fraction, Fraction]:
        """Certified (lower, upper) bounds on |value - reference|."""
        return self.value.gap_bounds(self.reference)


@dataclass
class ConventionReport:
    precision_digits: int
    entries: list[ProbeEntry] = field(default_factory=list)

    def reproducing(self) -> list[IndexConvention]:
        """Conventions whose every entry reproduces the printed value."""
        result = []
        for conv in IndexConvention:
            rows = [e for e in self.entries if e.convention == conv]
            if rows and all(e.reproduces_printed for e in rows):
                result.append(conv)
        return result


def _within_printed(value: Ball, printed: Fraction, digits: int) -> bool:
    """True iff the enclosure lies within one unit of the last printed place."""
    unit = Fraction(1, 10 ** digits)
    lo, hi = value.bounds()
    return printed - unit <= lo and hi <= printed + unit


def convention_probe(precision_digits: int = 10) -> ConventionReport:
    """Evaluate the published reference values under both conventions.

    The products start at n = 1 (xi1) and n = 3 (xi2) exactly as written,
    and the reciprocal sum runs over F_{2^n}, n >= 1.
    """
    from fibtheta.products import IndexMap, ProductSpec, eval_lucas_sum, eval_product

    if precision_digits < 10:
        raise ValueError("convention_probe needs at least 10 digits.")
    target = Fraction(1, 10 ** (precision_digits + 2))
    report = ConventionReport(precision_digits=precision_digits)
    lucas_closed = (5 - SQRT5) / 2

    for conv in IndexConvention:
        xi1 = eval_product(ProductSpec(sign=1, index_map=IndexMap.ALL, n0=1, convention=conv), target)
        xi2 = eval_product(ProductSpec(sign=-1, index_map=IndexMap.ALL, n0=3, convention=conv), target)
        lucas = eval_lucas_sum(target, convention=conv)
        # published digits are truncated; other values are rounded for comparison
        quoted = DecimalMode.TRUNCATE if conv == IndexConvention.STANDARD else DecimalMode.NEAREST
        rows = [
            ("xi1", xi1, "13.1509666577", _within_printed(xi1, PRINTED_XI1, 10),
             Ball.exact(PRINTED_XI1), quoted),
            ("xi2", xi2, "0.1897891436", _within_printed(xi2, PRINTED_XI2, 10),
             Ball.exact(PRINTED_XI2), quoted),
            ("lucas_sum", lucas, "(5-sqrt5)/2", lucas.contains(lucas_closed),
             Ball.exact(lucas_closed), DecimalMode.NEAREST),
        ]
        for name, value, printed, ok, reference, mode in rows:
            text = render_decimal(value, precision_digits, mode).text
            logger.debug("convention %s: %s = %s (printed %s, match=%s)",
                         conv.value, name, text, printed, ok)
            report.entries.append(ProbeEntry(conv, name, value, text, printed, ok, reference))
    return report
