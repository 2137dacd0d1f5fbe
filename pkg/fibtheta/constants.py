"""
Named constants for the `digits` and `probe` commands.

Names: xi1, xi2, gamma<j>, lucas_sum, psi_all, psi_odd, psi_even, odd_plus,
odd_minus, even_plus, even_minus, theta2_beta, theta3_beta, theta4_beta,
theta4_beta4.
"""

import re
from fractions import Fraction

from fibtheta.errors import UsageError
from fibtheta.exactnum import BETA, BETA4, Ball
from fibtheta.fibonacci import IndexConvention
from fibtheta.products import (
    EVEN_MINUS, EVEN_PLUS, ODD_MINUS, ODD_PLUS, XI1, XI2, ProductSpec, SumKind,
    eval_lucas_sum, eval_product, eval_reciprocal_sum, gamma_spec, thm1_rhs,
)
from fibtheta.theta import theta_value

# above this many digits xi1/xi2 come from the theta formulas
FAST_PATH_DIGITS = 60

_GAMMA = re.compile(r"gamma(\d+)$")

_PRODUCTS = {
    "xi1": XI1,
    "xi2": XI2,
    "odd_plus": ODD_PLUS,
    "odd_minus": ODD_MINUS,
    "even_plus": EVEN_PLUS,
    "even_minus": EVEN_MINUS,
}

_SUMS = {"psi_all": SumKind.ALL, "psi_odd": SumKind.ODD, "psi_even": SumKind.EVEN}

_THETAS = {
    "theta2_beta": (2, BETA),
    "theta3_beta": (3, BETA),
    "theta4_beta": (4, BETA),
    "theta4_beta4": (4, BETA4),
}

CONSTANT_NAMES = sorted([*_PRODUCTS, *_SUMS, *_THETAS, "lucas_sum", "gamma<j>"])


def _with_convention(spec: ProductSpec, convention: IndexConvention) -> ProductSpec:
    if spec.convention == convention:
        return spec
    return ProductSpec(spec.sign, spec.index_map, spec.n0, spec.numerator, convention)


def evaluate_constant(name: str, digits: int,
                      convention: IndexConvention = IndexConvention.STANDARD) -> Ball:
    """Ball for a named constant with radius below 10^-(digits + 2)."""
    if digits < 1:
        raise UsageError("Digits must be positive.")
    convention = IndexConvention(convention)
    target = Fraction(1, 10 ** (digits + 2))

    if name in ("xi1", "xi2") and convention == IndexConvention.STANDARD and digits > FAST_PATH_DIGITS:
        return thm1_rhs(name, digits + 2)
    if name in _PRODUCTS:
        return eval_product(_with_convention(_PRODUCTS[name], convention), target)
    m = _GAMMA.match(name)
    if m:
        j = int(m.group(1))
        if j < 1:
            raise UsageError("gamma<j> needs j >= 1.")
        return eval_product(gamma_spec(j, convention), target)
    if name in _SUMS:
        return eval_reciprocal_sum(_SUMS[name], target, convention)
    if name == "lucas_sum":
        return eval_lucas_sum(target, convention)
    if name in _THETAS:
        which, q = _THETAS[name]
        return theta_value(which, q, digits + 2)
    raise UsageError(f"Unknown constant '{name}'. Known: {', '.join(CONSTANT_NAMES)}.")
