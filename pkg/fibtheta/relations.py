"""
Integer relation search over certified constants.

Candidates come from lattice reduction of [I | round(10^p * x)] (exact
integral LLL, delta = 99/100) or from mpmath's PSLQ. The reduction is only a
heuristic: a candidate is accepted only after ball arithmetic certifies
|sum a_i x_i| < 10^(-p/2) and max |a_i| <= max_height.

A search that finds nothing is evidence about the search bounds, never a
proof of algebraic independence.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional, Sequence

import mpmath

from fibtheta.errors import PrecisionError, SearchCancelled, UsageError
from fibtheta.exactnum import Ball, rationalize

logger = logging.getLogger(__name__)

LLL_DELTA = Fraction(99, 100)
MIN_DIMENSION = 2
MAX_DIMENSION = 16
MAX_DEGREE = 8
MAX_TOTAL_DEGREE = 4
PSLQ_MAX_STEPS = 50_000

EVIDENCE_NOTE = (
    "No relation within the search bounds. This is numerical evidence, "
    "not a proof of algebraic independence."
)


@dataclass(frozen=True)
class SearchParams:
    dimension: int
    max_height: int
    precision_digits: int
    method: str = "lll"


@dataclass(frozen=True)
class RelationResult:
    """Outcome of a relation search; coefficients follow `labels`."""
    found: bool
    search_params: SearchParams
    coefficients: Optional[tuple[int, ...]] = None
    residual_bound: Optional[Fraction] = None
    labels: tuple[str, ...] = field(default_factory=tuple)
    degree: Optional[int] = None

    @property
    def note(self) -> str:
        return "certified relation" if self.found else EVIDENCE_NOTE

    def to_dict(self) -> dict:
        from fibtheta.exactnum import render_scientific
        return {
            "found": self.found,
            "coefficients": list(self.coefficients) if self.coefficients else None,
            "labels": list(self.labels),
            "degree": self.degree,
            "residual_bound": (render_scientific(self.residual_bound)
                               if self.residual_bound is not None else None),
            "dimension": self.search_params.dimension,
            "max_height": self.search_params.max_height,
            "precision_digits": self.search_params.precision_digits,
            "method": self.search_params.method,
            "note": self.note,
        }


# -- lattice reduction -------------------------------------------------------

def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(u, v))


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a/b for b > 0."""
    return (2 * a + b) // (2 * b)


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = LLL_DELTA,
               stop_event=None) -> list[list[int]]:
    """LLL-reduce integer row vectors with exact integral Gram-Schmidt data.

    Keeps d_i = det of the leading Gram minors and lambda_ij = d_{j+1} mu_ij
    as integers, so every division below is exact.
    """
    n = len(basis)
    b = [None] + [list(row) for row in basis]      # 1-based rows
    if n < 2:
        return [list(row) for row in basis]
    p, q = delta.numerator, delta.denominator
    d = [1] + [0] * n
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d[1] = _dot(b[1], b[1])
    k, kmax, swaps = 2, 1, 0

    def reduce_row(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l]:
            r = _round_div(lam[k][l], d[l])
            b[k] = [x - r * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= r * d[l]
            for i in range(1, l):
                lam[k][i] -= r * lam[l][i]

    def swap_rows(k: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        mu = lam[k][k - 1]
        big = (d[k - 2] * d[k] + mu * mu) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - mu * t) // d[k - 1]
            lam[i][k - 1] = (big * t + mu * lam[i][k]) // d[k]
        d[k - 1] = big

    while k <= n:
        if stop_event is not None and stop_event.is_set():
            raise SearchCancelled(f"LLL stopped after {swaps} swaps.")
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = _dot(b[k], b[j])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise ValueError("Lattice basis is linearly dependent.")
                    d[k] = u
        reduce_row(k, k - 1)
        if q * d[k] * d[k - 2] < p * d[k - 1] * d[k - 1] - q * lam[k][k - 1] ** 2:
            swap_rows(k)
            swaps += 1
            k = max(2, k - 1)
        else:
            for l in range(k - 2, 0, -1):
                reduce_row(k, l)
            k += 1

    logger.debug("LLL: dimension %d, %d swaps", n, swaps)
    return b[1:]


# -- candidate handling ------------------------------------------------------

def normalize_relation(coeffs: Sequence[int]) -> tuple[int, ...]:
    """Content-free, with the last (leading) nonzero coefficient positive."""
    g = reduce(math.gcd, (abs(c) for c in coeffs), 0)
    if g == 0:
        return tuple(coeffs)
    out = [c // g for c in coeffs]
    lead = next(c for c in reversed(out) if c)
    if lead < 0:
        out = [-c for c in out]
    return tuple(out)


def certify_relation(coeffs: Sequence[int], values: Sequence[Ball]) -> Fraction:
    """Certified upper bound on |sum a_i x_i| over the input enclosures."""
    total = Ball.exact(0)
    for a, x in zip(coeffs, values):
        if a:
            total = total + x * a
    return total.magnitude()


def _acceptance_threshold(precision_digits: int) -> Fraction:
    return Fraction(1, 10 ** (precision_digits // 2))


def _scaled_integers(values: Sequence[Ball], precision_digits: int) -> list[int]:
    scale = 10 ** precision_digits
    out = []
    for x in values:
        lo, hi = x.center.bounds(precision_digits + 5)
        out.append(math.floor((lo + hi) / 2 * scale + Fraction(1, 2)))
    return out


def _lll_candidates(values, precision_digits, stop_event):
    n = len(values)
    scaled = _scaled_integers(values, precision_digits)
    basis = [[1 if i == j else 0 for j in range(n)] + [scaled[i]] for i in range(n)]
    rows = lll_reduce(basis, LLL_DELTA, stop_event)
    rows.sort(key=lambda r: (_dot(r, r), r))
    return [row[:n] for row in rows]


def _check_cancelled(stop_event, stage: str) -> None:
    if stop_event is not None and stop_event.is_set():
        raise SearchCancelled(f"PSLQ stopped {stage} the search.")


def _pslq_candidates(values, precision_digits, max_height, stop_event=None):
    # mpmath.pslq itself cannot be interrupted
    _check_cancelled(stop_event, "before")
    with mpmath.workdps(precision_digits):
        xs = []
        for x in values:
            lo, hi = x.center.bounds(precision_digits + 5)
            mid = (lo + hi) / 2
            xs.append(mpmath.mpf(mid.numerator) / mid.denominator)
        tol = mpmath.mpf(10) ** (-(precision_digits // 2))
        try:
            rel = mpmath.pslq(xs, tol=tol, maxcoeff=max_height, maxsteps=PSLQ_MAX_STEPS)
        except ValueError:
            rel = None
    _check_cancelled(stop_event, "after")
    return [list(rel)] if rel else []


def find_integer_relation(values: Sequence[Ball], max_height: int, precision_digits: int,
                          method: str = "lll", stop_event=None,
                          labels: Sequence[str] = ()) -> RelationResult:
    """Search for integers a (not all zero, |a_i| <= max_height) with sum a_i x_i = 0."""
    n = len(values)
    if not MIN_DIMENSION <= n <= MAX_DIMENSION:
        raise UsageError(f"Relation search needs {MIN_DIMENSION}..{MAX_DIMENSION} values, got {n}.")
    if max_height < 1 or precision_digits < 1:
        raise UsageError("max_height and precision_digits must be positive.")
    if method not in ("lll", "pslq"):
        raise UsageError(f"Unknown relation method '{method}'; expected lll or pslq.")
    limit = Fraction(1, 10 ** precision_digits)
    for i, x in enumerate(values):
        if x.radius >= limit:
            raise PrecisionError(
                f"Value {i} is known only to radius {float(x.radius):.3g}; "
                f"need < 1e-{precision_digits}."
            )

    params = SearchParams(n, max_height, precision_digits, method)
    if method == "lll":
        candidates = _lll_candidates(values, precision_digits, stop_event)
    else:
        candidates = _pslq_candidates(values, precision_digits, max_height, stop_event)

    threshold = _acceptance_threshold(precision_digits)
    for coeffs in candidates:
        if not any(coeffs) or max(abs(c) for c in coeffs) > max_height:
            continue
        bound = certify_relation(coeffs, values)
        if bound < threshold:
            return RelationResult(True, params, normalize_relation(coeffs), bound, tuple(labels))
        logger.debug("rejected candidate %s: residual %.3g", coeffs, float(bound))
    return RelationResult(False, params, labels=tuple(labels))


def _prepared(x: Ball, precision_digits: int) -> Ball:
    # rational centers keep the monomial products small
    return rationalize(x, precision_digits + 20)


def minimal_polynomial_search(x: Ball, max_degree: int, max_height: int, precision_digits: int,
                              method: str = "lll", stop_event=None) -> RelationResult:
    """Lowest-degree integer polynomial (coefficients of 1, x, ..., x^d) vanishing at x."""
    if not 1 <= max_degree <= MAX_DEGREE:
        raise UsageError(f"max_degree must be between 1 and {MAX_DEGREE}.")
    x = _prepared(x, precision_digits)
    result = None
    for d in range(1, max_degree + 1):
        powers = [Ball.exact(1)]
        for _ in range(d):
            powers.append(powers[-1] * x)
        labels = [_monomial_label(k, 0) for k in range(d + 1)]
        result = find_integer_relation(powers, max_height, precision_digits, method,
                                       stop_event, labels)
        if result.found:
            return RelationResult(True, result.search_params, result.coefficients,
                                  result.residual_bound, result.labels, d)
    return RelationResult(False, result.search_params, labels=result.labels, degree=None)


def monomial_exponents(total_degree: int) -> list[tuple[int, int]]:
    """(i, j) for x^i y^j with i + j <= d, graded, y-powers first within a degree."""
    return [(i, e - i) for e in range(total_degree + 1) for i in range(e + 1)]


def _monomial_label(i: int, j: int) -> str:
    parts = [f"x^{i}" if i > 1 else "x"] * (i > 0) + [f"y^{j}" if j > 1 else "y"] * (j > 0)
    return "*".join(parts) or "1"


def polynomial_relation_search(x: Ball, y: Ball, total_degree: int, max_height: int,
                               precision_digits: int, method: str = "lll",
                               stop_event=None) -> RelationResult:
    """Lowest-total-degree integer polynomial P with P(x, y) = 0."""
    if not 1 <= total_degree <= MAX_TOTAL_DEGREE:
        raise UsageError(f"total_degree must be between 1 and {MAX_TOTAL_DEGREE}.")
    x, y = _prepared(x, precision_digits), _prepared(y, precision_digits)
    xp, yp = [Ball.exact(1)], [Ball.exact(1)]
    for _ in range(total_degree):
        xp.append(xp[-1] * x)
        yp.append(yp[-1] * y)
    result = None
    for d in range(1, total_degree + 1):
        exps = monomial_exponents(d)
        values = [xp[i] * yp[j] for i, j in exps]
        labels = [_monomial_label(i, j) for i, j in exps]
        result = find_integer_relation(values, max_height, precision_digits, method,
                                       stop_event, labels)
        if result.found:
            return RelationResult(True, result.search_params, result.coefficients,
                                  result.residual_bound, result.labels, d)
    return RelationResult(False, result.search_params, labels=result.labels)
