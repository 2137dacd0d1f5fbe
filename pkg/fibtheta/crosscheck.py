"""
Optional cross-check of certified values against plain mpmath evaluation.

mpmath floating point is an independent implementation (jtheta for theta
values, straightforward loops for products and sums). Agreement is a sanity
check only; the certified ball is the authoritative result.
"""

import re

import mpmath

from fibtheta.exactnum import Ball, render_decimal

_GAMMA = re.compile(r"gamma(\d+)$")

_PRODUCTS = {
    # name: (sign, index(n), first n)
    "xi1": (1, lambda n: n, 1),
    "xi2": (-1, lambda n: n, 3),
    "odd_plus": (1, lambda n: 2 * n - 1, 1),
    "odd_minus": (-1, lambda n: 2 * n - 1, 2),
    "even_plus": (1, lambda n: 2 * n, 1),
    "even_minus": (-1, lambda n: 2 * n, 2),
}

_SUMS = {
    "psi_all": lambda n: n,
    "psi_odd": lambda n: 2 * n - 1,
    "psi_even": lambda n: 2 * n,
    "lucas_sum": lambda n: 2 ** n,
}


def _mpmath_value(name: str, shifted: bool):
    eps = mpmath.mpf(10) ** (-(mpmath.mp.dps + 5))
    offset = 1 if shifted else 0

    def fib(k):
        return mpmath.fib(k + offset)

    beta = (mpmath.sqrt(5) - 1) / 2
    thetas = {
        "theta2_beta": (2, beta),
        "theta3_beta": (3, beta),
        "theta4_beta": (4, beta),
        "theta4_beta4": (4, beta ** 4),
    }
    if name in thetas:
        which, q = thetas[name]
        return mpmath.jtheta(which, 0, q)

    m = _GAMMA.match(name)
    if m or name in _PRODUCTS:
        if m:
            sign, index, n = 1, (lambda k: 2 ** k), 1
            numerator = int(m.group(1))
        else:
            sign, index, n = _PRODUCTS[name]
            numerator = 1
        value = mpmath.mpf(1)
        while True:
            term = mpmath.mpf(numerator) / fib(index(n))
            value *= 1 + sign * term
            if term < eps:
                return value
            n += 1

    if name in _SUMS:
        index = _SUMS[name]
        total, n = mpmath.mpf(0), 1
        while True:
            term = 1 / fib(index(n))
            total += term
            if term < eps:
                return total
            n += 1
    return None


def crosscheck_with_mpmath(name: str, value: Ball, digits: int, shifted: bool = False) -> dict:
    """Compare a certified constant against mpmath at the same number of digits.

    Returns dict with:
        agrees, mpmath_value, certified_value, error
    """
    result = {
        "agrees": None,
        "mpmath_value": None,
        "certified_value": render_decimal(value, digits).text,
        "error": None,
    }

    try:
        with mpmath.workdps(digits + 10):
            approx = _mpmath_value(name, shifted)
            if approx is None:
                result["error"] = f"no mpmath evaluation for '{name}'"
                return result
            result["mpmath_value"] = mpmath.nstr(approx, digits + 1)
            lo, hi = value.bounds(digits + 10)
            slack = mpmath.mpf(10) ** (-digits)
            lo_mp = mpmath.mpf(lo.numerator) / lo.denominator
            hi_mp = mpmath.mpf(hi.numerator) / hi.denominator
            result["agrees"] = bool(lo_mp - slack <= approx <= hi_mp + slack)
    except Exception as e:
        result["error"] = str(e)

    return result
