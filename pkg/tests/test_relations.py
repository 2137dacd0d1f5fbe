import math
import random
import threading
from fractions import Fraction

import pytest

from fibtheta import relations
from fibtheta.errors import PrecisionError, SearchCancelled, UsageError
from fibtheta.exactnum import BETA, SQRT5, Ball, QuadElem
from fibtheta.products import EVEN_PLUS, XI1, eval_product, thm1_rhs
from fibtheta.relations import (
    certify_relation, find_integer_relation, lll_reduce, minimal_polynomial_search,
    monomial_exponents, normalize_relation, polynomial_relation_search,
)
from fibtheta.theta import theta_value


def exact(*values):
    return [Ball.exact(v) for v in values]


def quadratic_integer_ball(a: int, b: int, c: int, digits: int = 70) -> Ball:
    """Enclosure of a + b*sqrt(c) from integer square roots."""
    s = math.isqrt(c * 10 ** (2 * digits))
    lo, hi = Fraction(s, 10 ** digits), Fraction(s + 1, 10 ** digits)
    if b < 0:
        lo, hi = hi, lo
    return Ball.from_bounds(a + b * lo, a + b * hi)


# -- lattice reduction ----------------------------------------------------------

def test_lll_keeps_lattice_and_shortens():
    basis = [[1, 0, 0, 31415926], [0, 1, 0, 27182818], [0, 0, 1, 14142135]]
    reduced = lll_reduce(basis)
    assert len(reduced) == 3
    assert min(sum(x * x for x in row) for row in reduced) < sum(x * x for x in basis[0])


def test_lll_reduced_basis_of_small_example():
    basis = [[1, 1, 1], [-1, 0, 2], [3, 5, 6]]
    reduced = lll_reduce(basis)

    def det(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    # unimodular change of basis
    assert abs(det(reduced)) == abs(det(basis)) == 3
    assert sum(x * x for x in reduced[0]) == 1


def test_normalize_relation():
    assert normalize_relation([2, -2, -2]) == (-1, 1, 1)
    assert normalize_relation([0, 3, 0]) == (0, 1, 0)
    assert normalize_relation([4, 6, -2]) == (-2, -3, 1)


# -- integer relations ------------------------------------------------------------

@pytest.mark.parametrize("method", ["lll", "pslq"])
def test_beta_relation(method):
    result = find_integer_relation(exact(1, BETA, BETA * BETA), 1000, 30, method=method)
    assert result.found
    assert result.coefficients == (-1, 1, 1)
    assert result.residual_bound < Fraction(1, 10 ** 15)


def test_sqrt5_has_no_rational_relation():
    result = find_integer_relation([Ball.exact(1), Ball.exact(SQRT5)], 10 ** 6, 30)
    assert not result.found
    assert result.coefficients is None
    assert "not a proof" in result.note
    assert result.to_dict()["note"] == result.note


def test_quartic_theta_relation():
    values = [theta_value(k, BETA, 50) ** 4 for k in (2, 3, 4)]
    result = find_integer_relation(values, 100, 40)
    assert result.found
    assert result.coefficients == (1, -1, 1)


def test_scale_robustness():
    base = find_integer_relation(exact(1, BETA, BETA * BETA), 1000, 30)
    scaled = find_integer_relation(exact(1000, 1000 * BETA, 1000 * BETA * BETA), 1000, 30)
    assert base.coefficients == scaled.coefficients


def test_deterministic():
    values = exact(1, BETA, BETA * BETA, BETA ** 3)
    first = find_integer_relation(values, 1000, 30)
    second = find_integer_relation(values, 1000, 30)
    assert first == second


def test_fake_relations_are_rejected(monkeypatch):
    values = exact(1, BETA, BETA * BETA)
    assert certify_relation((1, 1, 1), values) > Fraction(1, 10 ** 15)
    monkeypatch.setattr(relations, "_lll_candidates", lambda *args: [[1, 1, 1], [2, 0, -1]])
    assert not find_integer_relation(values, 1000, 30).found


def test_height_bound_is_enforced(monkeypatch):
    # a true relation, but taller than the bound
    monkeypatch.setattr(relations, "_lll_candidates", lambda *args: [[-2, 2, 2]])
    assert not find_integer_relation(exact(1, BETA, BETA * BETA), 1, 30).found


def test_radius_precondition():
    wide = Ball(QuadElem(BETA.a, BETA.b), Fraction(1, 10 ** 10))
    with pytest.raises(PrecisionError):
        find_integer_relation([Ball.exact(1), wide], 100, 40)


@pytest.mark.parametrize("count", [1, 17])
def test_dimension_bounds(count):
    with pytest.raises(UsageError):
        find_integer_relation([Ball.exact(k + 1) for k in range(count)], 10, 20)


def test_unknown_method():
    with pytest.raises(UsageError):
        find_integer_relation(exact(1, BETA), 10, 20, method="hjls")


@pytest.mark.parametrize("method", ["lll", "pslq"])
def test_cancellation(method):
    stop = threading.Event()
    stop.set()
    with pytest.raises(SearchCancelled):
        find_integer_relation(exact(1, BETA, BETA * BETA), 1000, 30, method=method,
                              stop_event=stop)


def test_pslq_cancelled_while_running(monkeypatch):
    stop = threading.Event()

    def slow_pslq(xs, **kwargs):
        stop.set()
        return [-1, 1, 1]

    monkeypatch.setattr(relations.mpmath, "pslq", slow_pslq)
    with pytest.raises(SearchCancelled):
        find_integer_relation(exact(1, BETA, BETA * BETA), 1000, 30, method="pslq",
                              stop_event=stop)


# -- minimal polynomials ------------------------------------------------------------

@pytest.mark.parametrize("x,coefficients", [
    (BETA, (-1, 1, 1)),
    (1 + SQRT5, (-4, -2, 1)),
    ((1 + SQRT5) / 6, (-1, -3, 9)),
])
def test_minimal_polynomials_of_closed_forms(x, coefficients):
    result = minimal_polynomial_search(Ball.exact(x), 4, 1000, 40)
    assert result.found
    assert result.degree == 2
    assert result.coefficients == coefficients
    assert result.labels == ("1", "x", "x^2")


def test_random_quadratic_integers():
    rng = random.Random(20240607)
    squarefree = [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23]
    for _ in range(20):
        a, b, c = rng.randint(-9, 9), rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice(squarefree)
        result = minimal_polynomial_search(quadratic_integer_ball(a, b, c), 2, 10 ** 4, 40)
        assert result.found, (a, b, c)
        assert result.coefficients == (a * a - b * b * c, -2 * a, 1), (a, b, c)


def test_minimal_polynomial_degree_limit():
    with pytest.raises(UsageError):
        minimal_polynomial_search(Ball.exact(BETA), 9, 100, 30)


# -- polynomial relations in two variables -------------------------------------------

def test_monomial_order():
    assert monomial_exponents(2) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert len(monomial_exponents(4)) == 15


def test_duplicate_input_gives_linear_relation():
    xi1 = eval_product(XI1, Fraction(1, 10 ** 60))
    result = polynomial_relation_search(xi1, xi1, 2, 100, 40)
    assert result.found
    assert result.degree == 1
    assert result.coefficients == (0, -1, 1)


def test_relation_hidden_in_one_variable():
    xi1 = eval_product(XI1, Fraction(1, 10 ** 60))
    even = eval_product(EVEN_PLUS, Fraction(1, 10 ** 60))
    result = polynomial_relation_search(xi1, even, 2, 100, 40)
    assert result.found
    assert result.degree == 2
    assert result.coefficients == (-4, -2, 0, 1, 0, 0)
    assert result.labels == ("1", "y", "x", "y^2", "x*y", "x^2")


def test_total_degree_limit():
    with pytest.raises(UsageError):
        polynomial_relation_search(Ball.exact(1), Ball.exact(2), 5, 10, 20)


def test_xi1_small_search_finds_nothing():
    xi1 = thm1_rhs("xi1", 80)
    result = minimal_polynomial_search(xi1, 3, 10 ** 4, 60)
    assert not result.found


@pytest.mark.slow
def test_xi1_xi2_independence_probe():
    xi1, xi2 = thm1_rhs("xi1", 320), thm1_rhs("xi2", 320)
    result = polynomial_relation_search(xi1, xi2, 4, 10 ** 8, 300)
    assert not result.found
    assert result.search_params.dimension == 15
    assert "evidence" in result.to_dict()["note"]


@pytest.mark.slow
def test_xi1_minimal_polynomial_probe():
    xi1 = thm1_rhs("xi1", 220)
    assert not minimal_polynomial_search(xi1, 4, 10 ** 8, 200).found
