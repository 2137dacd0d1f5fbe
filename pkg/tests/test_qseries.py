from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fibtheta.errors import UsageError
from fibtheta.qseries import (
    SERIES_IDENTITIES, ProductFactor, TruncSeries, compare_series, dilate, evaluate,
    product_series, series_mul, theta_series, verify_forms, verify_identity,
)

coeff_lists = st.lists(st.integers(min_value=-20, max_value=20), min_size=1, max_size=25)


def series(coeffs, order=24):
    return TruncSeries.from_coeffs(coeffs, order)


def test_theta_series_coefficients():
    assert list(theta_series("3", 10).coeffs) == [1, 2, 0, 0, 2, 0, 0, 0, 0, 2, 0]
    assert list(theta_series("4", 10).coeffs) == [1, -2, 0, 0, 2, 0, 0, 0, 0, -2, 0]
    two = theta_series("2body", 12)
    assert two.quarter_offset == 1
    assert list(two.coeffs) == [2, 0, 2, 0, 0, 0, 2, 0, 0, 0, 0, 0, 2]


def test_product_series_euler_pentagonal():
    # prod (1 - q^n) = 1 - q - q^2 + q^5 + q^7 - q^12 - q^15 + ...
    p = product_series([ProductFactor(-1, 1)], 15)
    expected = [0] * 16
    for k, sign in [(0, 1), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1), (15, -1)]:
        expected[k] = sign
    assert list(p.coeffs) == expected


def test_product_factor_validation():
    with pytest.raises(ValueError):
        ProductFactor(2, 1)
    with pytest.raises(ValueError):
        ProductFactor(1, 0)
    with pytest.raises(ValueError):
        ProductFactor(1, 2, -3)


@given(coeff_lists, coeff_lists)
def test_multiplication_commutes(a, b):
    assert series_mul(series(a), series(b)) == series_mul(series(b), series(a))


@given(coeff_lists, coeff_lists, st.integers(min_value=1, max_value=5))
def test_dilation_is_multiplicative(a, b, m):
    x, y = series(a), series(b)
    assert dilate(x * y, m) == dilate(x, m) * dilate(y, m)


@given(coeff_lists, st.fractions(min_value=-2, max_value=2, max_denominator=10))
def test_evaluate_matches_direct_sum(a, q):
    x = series(a)
    assert evaluate(x, q) == sum(c * q ** k for k, c in enumerate(x.coeffs))


def test_shift_and_quarter_offsets():
    x = series([1, 2, 3])
    assert x.shift(2)[2] == 1
    assert x.shift(2).shift(-2) == x
    folded = x.with_quarter_offset(5).normalized()
    assert folded.quarter_offset == 1
    assert folded[1] == 1


def test_adding_mismatched_offsets_fails():
    with pytest.raises(ValueError):
        series([1]) + series([1]).with_quarter_offset(1)


@pytest.mark.parametrize("name", sorted(SERIES_IDENTITIES))
def test_registered_identities_hold(name):
    result = verify_identity(name, 200)
    assert result.passed, result


@pytest.mark.parametrize("name", ["tp3", "eq47chain", "jacobi_quartic"])
@pytest.mark.parametrize("index", [0, 17, 60])
def test_single_coefficient_mutation_is_detected(name, index):
    forms = SERIES_IDENTITIES[name](80)
    last = forms[-1]
    bumped = list(last.coeffs)
    bumped[index] += 1
    forms[-1] = TruncSeries(last.order, tuple(bumped), last.quarter_offset)
    result = verify_forms(name, forms, 80)
    assert not result.passed
    assert result.failing_link == len(forms) - 2
    assert result.difference == -1
    assert result.first_mismatch == index


def test_compare_series_reports_first_difference():
    assert compare_series(series([1, 2, 3]), series([1, 2, 3])) is None
    assert compare_series(series([1, 2, 3]), series([1, 5, 3])) == 1


def test_unknown_identity():
    with pytest.raises(UsageError):
        verify_identity("tp5", 10)


def test_theta_three_at_rational_nome():
    # partial sums of theta_3 at q = 1/2 approach 2.1289368272...
    value = evaluate(theta_series("3", 100), Fraction(1, 2))
    assert abs(value - Fraction(21289368272, 10 ** 10)) < Fraction(1, 10 ** 9)


factors = st.builds(ProductFactor, st.sampled_from([1, -1]), st.integers(1, 4),
                    st.integers(0, 3), st.integers(1, 2))


@given(st.lists(factors, min_size=1, max_size=4), st.randoms(use_true_random=False))
def test_product_series_ignores_factor_order(fs, rng):
    shuffled = list(fs)
    rng.shuffle(shuffled)
    assert product_series(fs, 30) == product_series(shuffled, 30)
