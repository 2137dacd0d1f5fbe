"""
Registry of named identity checks and the three-valued comparison behind them.

A numeric check evaluates both sides as balls. It passes when both radii are
within 10^-(p-5) and the balls intersect, fails only when they are
certifiably disjoint, and is inconclusive otherwise. Exact checks compare
Q(sqrt5) values for equality; series checks compare q-series coefficients.
"""

import fnmatch
import json
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Mapping, Optional

from fibtheta.errors import DomainError, PrecisionError, ResourceError, UsageError
from fibtheta.exactnum import (
    BETA, BETA4, SQRT5, Ball, QuadElem, render_decimal, render_scientific,
)
from fibtheta.fibonacci import IndexConvention, convention_probe, fib
from fibtheta.products import (
    EVEN_MINUS, EVEN_MINUS_LIMIT, EVEN_PLUS, EVEN_PLUS_LIMIT, LUCAS_SUM_LIMIT,
    ODD_MINUS, ODD_PLUS, XI1, XI2,
    even_minus_telescoped, even_plus_telescoped, eval_lucas_sum, eval_product,
    odd_factor_form, odd_minus_rhs, odd_plus_rhs, partial_product, thm1_rhs,
)
from fibtheta.qseries import DEFAULT_ORDER, verify_identity
from fibtheta.theta import theta_value

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 40
GUARD_DIGITS = 5            # tolerance is 10^-(p - GUARD_DIGITS)
COMPONENT_GUARD = 10        # extra digits for each side's ingredients
MIN_PRECISION = 10
EXACT_CHECK_TERMS = 30


class Status(Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class CheckKind(Enum):
    NUMERIC = "numeric"     # run(p) -> (lhs Ball, rhs Ball)
    EXACT = "exact"         # run(p) -> [(lhs QuadElem, rhs QuadElem), ...]
    SERIES = "series"       # run(order) -> IdentityResult
    PROBE = "probe"         # run(p) -> ConventionReport


@dataclass(frozen=True)
class Check:
    name: str
    kind: CheckKind
    run: Callable
    description: str = ""


@dataclass
class CheckReport:
    """Outcome of one check; serialized as one JSON object per line."""
    name: str
    status: Status
    lhs_decimal: str
    rhs_decimal: str
    gap_bound: str
    precision_digits: int
    elapsed_ms: int = 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status.value,
            "lhs": self.lhs_decimal,
            "rhs": self.rhs_decimal,
            "gap_bound": self.gap_bound,
            "precision_digits": self.precision_digits,
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass
class RunSummary:
    reports: list[CheckReport] = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        out = {s.value: 0 for s in Status}
        for r in self.reports:
            out[r.status.value] += 1
        return out

    @property
    def exit_code(self) -> int:
        counts = self.counts
        if counts[Status.FAIL.value]:
            return 1
        if counts[Status.INCONCLUSIVE.value]:
            return 2
        return 0

    def to_dict(self) -> dict:
        return {"total": len(self.reports), **self.counts, "exit_code": self.exit_code}


def tolerance(precision_digits: int) -> Fraction:
    return Fraction(1, 10 ** (precision_digits - GUARD_DIGITS))


def compare_balls(lhs: Ball, rhs: Ball, precision_digits: int) -> tuple[Status, str]:
    """Three-valued verdict and the matching gap bound (upper, or lower on fail)."""
    gap_lo, gap_hi = lhs.gap_bounds(rhs)
    if not lhs.overlaps(rhs):
        return Status.FAIL, render_scientific(gap_lo, upward=False)
    tol = tolerance(precision_digits)
    if lhs.radius <= tol and rhs.radius <= tol:
        return Status.PASS, render_scientific(gap_hi)
    return Status.INCONCLUSIVE, render_scientific(gap_hi)


# -- ingredients -------------------------------------------------------------

def _digits(p: int) -> int:
    return p + COMPONENT_GUARD


def _product(spec, p: int) -> Ball:
    return eval_product(spec, Fraction(1, 10 ** _digits(p)))


def _theta(which: int, q, p: int) -> Ball:
    return theta_value(which, q, _digits(p))


# -- numeric checks ----------------------------------------------------------

def _thm1(which: str):
    spec = XI1 if which == "xi1" else XI2
    return lambda p: (_product(spec, p), thm1_rhs(which, _digits(p)))


def _eq09101(p):
    return _product(ODD_PLUS, p), odd_plus_rhs(_digits(p))


def _eq09102(p):
    return _product(ODD_MINUS, p), odd_minus_rhs(_digits(p))


def _eq09081(p):
    # theta_4(beta) ~ 0.03 sits in a denominator; 20 more digits cover the blow-up
    q = p + COMPONENT_GUARD
    t3, t4 = _theta(3, BETA, q), _theta(4, BETA, q)
    rhs = (t3 / t4 - t4 / t3) * (32 * BETA ** -5)
    return _product(XI1, q) ** 4, rhs


def _eq113(p):
    q = p + COMPONENT_GUARD
    lhs = _theta(3, BETA, p) * _theta(4, BETA, p)
    rhs = _product(XI2, q) / _product(XI1, q) * (12 / SQRT5)
    return lhs, rhs


def _eq492a(p):
    return _theta(2, BETA, p) ** 4, _theta(3, BETA, p) ** 4 - _theta(4, BETA, p) ** 4


def _eq492b(p):
    t3, t4 = _theta(3, BETA, p), _theta(4, BETA, p)
    return _theta(4, BETA4, p) ** 4, t3 * t4 * (t3 ** 2 + t4 ** 2) / 2


def _quartic(q):
    return lambda p: (_theta(3, q, p) ** 4, _theta(2, q, p) ** 4 + _theta(4, q, p) ** 4)


def _landen_sum(q):
    return lambda p: (_theta(3, q * q, p) ** 2 * 2, _theta(3, q, p) ** 2 + _theta(4, q, p) ** 2)


def _landen_prod(q):
    return lambda p: (_theta(4, q * q, p) ** 2, _theta(3, q, p) * _theta(4, q, p))


def _closed_form(spec, limit: QuadElem):
    return lambda p: (_product(spec, p), Ball.exact(limit))


def _eq3484(p):
    return eval_lucas_sum(Fraction(1, 10 ** _digits(p))), Ball.exact(LUCAS_SUM_LIMIT)


# -- exact checks ------------------------------------------------------------

def _eq453a_telescoping(p):
    return [(QuadElem(partial_product(EVEN_PLUS, n)), even_plus_telescoped(n))
            for n in range(1, EXACT_CHECK_TERMS + 1)]


def _eq453b_telescoping(p):
    return [(QuadElem(partial_product(EVEN_MINUS, n - 1)), even_minus_telescoped(n))
            for n in range(2, EXACT_CHECK_TERMS + 1)]


def _odd_factors(sign: int):
    first = 1 if sign > 0 else 2
    return lambda p: [(QuadElem(1 + Fraction(sign, fib(2 * n - 1))), odd_factor_form(n, sign))
                      for n in range(first, EXACT_CHECK_TERMS + 1)]


# -- series checks -------------------------------------------------------------

def _series(identity: str):
    return lambda order: verify_identity(identity, order)


_NOMES = {"q1_4": Fraction(1, 4), "q1_2": Fraction(1, 2), "beta": BETA}


def _build_registry() -> dict[str, Check]:
    checks = [
        Check("thm1_xi1", CheckKind.NUMERIC, _thm1("xi1"),
              "prod (1 + 1/F_n) against 2 beta^(-5/4) theta_2(beta) / theta_4(beta^4)"),
        Check("thm1_xi2", CheckKind.NUMERIC, _thm1("xi2"),
              "prod_{n>=3} (1 - 1/F_n) against the theta_2 theta_3 theta_4 formula"),
        Check("eq09101", CheckKind.NUMERIC, _eq09101, "odd plus-product against theta quotient"),
        Check("eq09102", CheckKind.NUMERIC, _eq09102, "odd minus-product against theta quotient"),
        Check("eq09081", CheckKind.NUMERIC, _eq09081,
              "xi1^4 against 32 beta^-5 (theta_3/theta_4 - theta_4/theta_3)"),
        Check("eq113", CheckKind.NUMERIC, _eq113, "theta_3 theta_4 (beta) against (12/sqrt5) xi2/xi1"),
        Check("eq492a", CheckKind.NUMERIC, _eq492a, "theta_2^4 = theta_3^4 - theta_4^4 at beta"),
        Check("eq492b", CheckKind.NUMERIC, _eq492b,
              "theta_4^4(beta^4) = theta_3 theta_4 (theta_3^2 + theta_4^2) / 2 at beta"),
        Check("eq453a", CheckKind.NUMERIC, _closed_form(EVEN_PLUS, EVEN_PLUS_LIMIT),
              "prod (1 + 1/F_2n) contains 1 + sqrt5"),
        Check("eq453b", CheckKind.NUMERIC, _closed_form(EVEN_MINUS, EVEN_MINUS_LIMIT),
              "prod_{n>=2} (1 - 1/F_2n) contains (1 + sqrt5)/6"),
        Check("eq3484", CheckKind.NUMERIC, _eq3484, "sum 1/F_{2^n} contains (5 - sqrt5)/2"),
        Check("eq453a_telescoping", CheckKind.EXACT, _eq453a_telescoping,
              "telescoped partial products of prod (1 + 1/F_2n)"),
        Check("eq453b_telescoping", CheckKind.EXACT, _eq453b_telescoping,
              "telescoped partial products of prod (1 - 1/F_2n)"),
        Check("eq09101_factors", CheckKind.EXACT, _odd_factors(1),
              "1 + 1/F_{2n-1} as a quotient of powers of beta"),
        Check("eq09102_factors", CheckKind.EXACT, _odd_factors(-1),
              "1 - 1/F_{2n-1} as a quotient of powers of beta"),
        Check("convention", CheckKind.PROBE, convention_probe,
              "which index convention reproduces the printed constants"),
    ]
    for suffix, q in _NOMES.items():
        checks += [
            Check(f"eq2_quartic_{suffix}", CheckKind.NUMERIC, _quartic(q),
                  "theta_3^4 = theta_2^4 + theta_4^4"),
            Check(f"eq2_landen_sum_{suffix}", CheckKind.NUMERIC, _landen_sum(q),
                  "2 theta_3^2(q^2) = theta_3^2 + theta_4^2"),
            Check(f"eq2_landen_prod_{suffix}", CheckKind.NUMERIC, _landen_prod(q),
                  "theta_4^2(q^2) = theta_3 theta_4"),
        ]
    for check_name, identity in [
        ("series_tp2", "tp2"), ("series_tp3", "tp3"), ("series_tp4", "tp4"),
        ("series_eq46", "eq46"), ("series_eq467", "eq467"), ("series_eq47", "eq47chain"),
        ("series_jacobi_quartic", "jacobi_quartic"), ("series_landen_sum", "landen_sum"),
        ("series_landen_prod", "landen_prod"),
    ]:
        checks.append(Check(check_name, CheckKind.SERIES, _series(identity),
                            f"formal q-series identity {identity}"))
    return {c.name: c for c in checks}


REGISTRY: dict[str, Check] = _build_registry()


# -- running -------------------------------------------------------------------

def _run_numeric(check: Check, p: int) -> CheckReport:
    lhs, rhs = check.run(p)
    status, gap = compare_balls(lhs, rhs, p)
    return CheckReport(check.name, status, render_decimal(lhs, p).text,
                       render_decimal(rhs, p).text, gap, p)


def _run_exact(check: Check, p: int) -> CheckReport:
    pairs = check.run(p)
    for lhs, rhs in pairs:
        if lhs != rhs:
            gap = (lhs - rhs).abs_lower()
            return CheckReport(check.name, Status.FAIL, render_decimal(Ball.exact(lhs), p).text,
                               render_decimal(Ball.exact(rhs), p).text,
                               render_scientific(gap, upward=False), p)
    lhs, rhs = pairs[-1]
    return CheckReport(check.name, Status.PASS, render_decimal(Ball.exact(lhs), p).text,
                       render_decimal(Ball.exact(rhs), p).text, "0", p)


def _run_series(check: Check, p: int, order: int) -> CheckReport:
    result = check.run(order)
    if result.passed:
        return CheckReport(check.name, Status.PASS, f"order {order}", f"order {order}", "0", p)
    return CheckReport(check.name, Status.FAIL,
                       f"link {result.failing_link}, q^{result.first_mismatch}",
                       f"order {order}", str(abs(result.difference)), p)


def _run_probe(check: Check, p: int) -> CheckReport:
    """Pass iff only the standard convention reproduces the published values.

    The gap is the certified distance from a published value: an upper bound
    for xi1 on a pass, a lower bound for the first mismatching quantity on a fail.
    """
    report = check.run(p)
    standard = [e for e in report.entries if e.convention == IndexConvention.STANDARD]
    xi1 = next(e for e in standard if e.quantity == "xi1")
    if report.reproducing() == [IndexConvention.STANDARD]:
        return CheckReport(check.name, Status.PASS, xi1.decimal, xi1.printed,
                           render_scientific(xi1.distance_bounds()[1]), p)
    missed = [e for e in standard if not e.reproduces_printed]
    if missed:
        gap = render_scientific(missed[0].distance_bounds()[0], upward=False)
    else:
        # both conventions reproduce, so nothing separates them
        gap = render_scientific(xi1.distance_bounds()[1])
    return CheckReport(check.name, Status.FAIL, xi1.decimal, xi1.printed, gap, p)


def run_check(name: str, precision_digits: int = DEFAULT_PRECISION,
              order: int = DEFAULT_ORDER,
              registry: Optional[Mapping[str, Check]] = None) -> CheckReport:
    """Evaluate a registered check and classify it as pass, fail or inconclusive."""
    registry = REGISTRY if registry is None else registry
    try:
        check = registry[name]
    except KeyError:
        raise UsageError(f"Unknown check '{name}'.") from None
    if precision_digits < MIN_PRECISION:
        raise UsageError(f"Precision must be at least {MIN_PRECISION} digits.")

    start = time.perf_counter()
    try:
        if check.kind == CheckKind.NUMERIC:
            report = _run_numeric(check, precision_digits)
        elif check.kind == CheckKind.EXACT:
            report = _run_exact(check, precision_digits)
        elif check.kind == CheckKind.SERIES:
            report = _run_series(check, precision_digits, order)
        else:
            report = _run_probe(check, precision_digits)
    except (DomainError, PrecisionError, ResourceError) as exc:
        # no certified verdict either way
        logger.warning("check %s could not be certified: %s", name, exc)
        report = CheckReport(name, Status.INCONCLUSIVE, "", "", str(exc), precision_digits)
    report.elapsed_ms = int((time.perf_counter() - start) * 1000)
    logger.debug("check %s: %s in %d ms", name, report.status.value, report.elapsed_ms)
    return report


def select_checks(pattern: Optional[str] = None,
                  registry: Optional[Mapping[str, Check]] = None) -> list[str]:
    """Registered names matching an exact name or shell-style pattern, sorted."""
    registry = REGISTRY if registry is None else registry
    if pattern is None:
        return sorted(registry)
    if pattern in registry:
        return [pattern]
    names = sorted(n for n in registry if fnmatch.fnmatchcase(n, pattern))
    if not names:
        raise UsageError(f"No registered check matches '{pattern}'.")
    return names


def run_all(precision_digits: int = DEFAULT_PRECISION, order: int = DEFAULT_ORDER,
            pattern: Optional[str] = None, workers: int = 1,
            registry: Optional[Mapping[str, Check]] = None,
            on_progress=None) -> RunSummary:
    """Run every selected check; reports come back ordered by name."""
    from fibtheta.runner import CheckRunner

    names = select_checks(pattern, registry)
    runner = CheckRunner(names, precision_digits, order, num_workers=workers, registry=registry)
    runner.on_progress = on_progress
    reports = runner.run_blocking()
    return RunSummary(sorted(reports, key=lambda r: r.name))
