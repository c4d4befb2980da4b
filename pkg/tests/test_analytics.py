"""Exact-arithmetic checks for return probabilities, envelopes, and bounds.

Expected rationals come from the brute-force oracles in oracles.py (full
word enumeration) and from hand arithmetic frozen in the asserts.
"""

import math
from fractions import Fraction

import pytest

from walklocus.analytics import (
    ExactValue,
    intersection_expectation,
    lclt_bound,
    localisation_lower_bounds,
    monotonicity_check,
    return_probability,
    return_probability_by_convolution,
    strong_transience_verdict,
    tail_sum,
)
from walklocus.errors import BudgetExceededError, ConfigError, DivergentTailError

from oracles import (
    first_return_probability_by_enumeration,
    return_probability_by_enumeration,
)


def test_return_probability_hand_values():
    assert return_probability(1, 0).rational == 1
    assert return_probability(1, 1).rational == Fraction(1, 2)
    assert return_probability(1, 2).rational == Fraction(3, 8)
    assert return_probability(1, 3).rational == Fraction(5, 16)
    assert return_probability(1, 4).rational == Fraction(35, 128)
    assert return_probability(2, 1).rational == Fraction(1, 4)
    assert return_probability(2, 2).rational == Fraction(9, 64)
    assert return_probability(5, 0).rational == 1
    assert return_probability(5, 1).rational == Fraction(1, 10)


def test_return_probability_equals_word_enumeration():
    for d, n in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)]:
        assert return_probability(d, n).rational == return_probability_by_enumeration(
            d, 2 * n
        )


def test_convolution_method_agrees_with_multinomial():
    for d, n in [(1, 3), (2, 2), (3, 2), (5, 1), (5, 2)]:
        assert (
            return_probability_by_convolution(d, n).rational
            == return_probability(d, n).rational
        )


def test_odd_times_never_return():
    for d in (1, 2):
        for steps in (1, 3):
            assert return_probability_by_enumeration(d, steps) == 0


def test_first_return_decomposition():
    # q_m = sum_{k=1..m} p_k q_{m-k} over raw step counts
    for d in (1, 2):
        q = [return_probability_by_enumeration(d, m) for m in range(5)]
        p = [Fraction(0)] + [
            first_return_probability_by_enumeration(d, m) for m in range(1, 5)
        ]
        for m in range(1, 5):
            assert q[m] == sum(p[k] * q[m - k] for k in range(1, m + 1))


def test_return_probability_validation():
    with pytest.raises(ConfigError):
        return_probability(0, 1)
    with pytest.raises(ConfigError):
        return_probability(2, -1)
    with pytest.raises(BudgetExceededError, match="float"):
        return_probability(5, 10**5)
    with pytest.raises(BudgetExceededError):
        return_probability_by_convolution(5, 3)


def test_lclt_bound_formula_and_domination():
    assert lclt_bound(1, 1) == pytest.approx(math.sqrt(2 / math.pi))
    assert lclt_bound(2, 1) == pytest.approx(4 / math.pi)
    for d in range(1, 7):
        for n in range(1, 21):
            assert float(return_probability(d, n).rational) <= lclt_bound(d, n)
    with pytest.raises(ConfigError):
        lclt_bound(3, 0)


def test_monotonicity_check():
    assert monotonicity_check(1, 4)
    assert monotonicity_check(2, 2)
    assert monotonicity_check(5, 8)
    assert monotonicity_check(3, 0)


def test_exact_value_contracts():
    assert ExactValue("t", rational=Fraction(2, 4)).rational == Fraction(1, 2)
    ev = ExactValue("t", lower=Fraction(1, 3), upper=Fraction(1, 2))
    assert ev.lo == Fraction(1, 3) and ev.width == Fraction(1, 6)
    with pytest.raises(ConfigError):
        ExactValue("t", lower=Fraction(1), upper=Fraction(0))
    with pytest.raises(ConfigError):
        ExactValue("t", rational=Fraction(1), upper=Fraction(2))
    with pytest.raises(ConfigError):
        ExactValue("t", lower=Fraction(1))


def test_tail_sum_rejects_low_dimension():
    for d in (1, 2, 3, 4):
        with pytest.raises(DivergentTailError, match="divergent-or-unknown"):
            tail_sum(d, 1, 100)


def test_tail_sum_basic_enclosure():
    ev = tail_sum(5, 1, 200)
    assert ev.lower >= Fraction(1, 10)  # first term is 1 * q_1 = 1/10
    assert ev.lower < ev.upper
    # dropping the k=1 term shifts the partial sum by exactly q_1
    ev2 = tail_sum(5, 2, 200)
    assert ev.lower - ev2.lower == Fraction(1, 10)


def test_tail_sum_enclosures_nest_with_cutoff():
    a = tail_sum(5, 1, 50)
    b = tail_sum(5, 1, 100)
    c = tail_sum(5, 1, 200)
    assert a.lower <= b.lower <= c.lower
    assert a.upper >= b.upper >= c.upper
    assert c.lower <= c.upper


def test_tail_sum_upper_decreases_in_dimension():
    assert tail_sum(6, 1, 128).upper < tail_sum(5, 1, 128).upper


def test_tail_sum_validation():
    with pytest.raises(ConfigError):
        tail_sum(5, 0, 100)
    with pytest.raises(ConfigError):
        tail_sum(5, 10, 5)


def test_float_mode_brackets_exact_partial_sum():
    exact = tail_sum(5, 1, 64)
    fl = tail_sum(5, 1, 64, mode="float")
    assert fl.lower <= exact.lower
    assert fl.lower <= exact.upper and exact.lower <= fl.upper  # overlap
    mid = float(fl.lower + fl.upper) / 2
    assert abs(mid - float(exact.lower + exact.upper) / 2) < 1e-6
    with pytest.raises(ConfigError):
        tail_sum(5, 1, 64, mode="interval")


def test_intersection_expectation_first_terms():
    ev = intersection_expectation(5, 128)
    assert ev.lower >= Fraction(13, 10)  # 1 + 3 * q_1
    assert ev.lower >= 1
    ej = intersection_expectation(5, 128, adjacency=True)
    # n=1 term: 1 + 2d * 3 * q_2 with q_2 = 27/1000
    assert ej.lower >= 1 + 10 * 3 * Fraction(27, 1000)
    assert ej.upper > ej.lower


def test_intersection_expectation_shrinks_at_high_dimension():
    ev = intersection_expectation(50, 128)
    assert ev.upper <= Fraction(11, 10)


def test_intersection_expectation_validation():
    with pytest.raises(DivergentTailError):
        intersection_expectation(4, 100)
    with pytest.raises(ConfigError):
        intersection_expectation(5, 0)


def test_localisation_lower_bounds_chain():
    b = localisation_lower_bounds(5)
    assert 0 < b.c_lower < 1
    assert b.s_lower == b.c_lower
    assert 0 < b.c_tilde_lower < b.c_lower
    assert b.cutoff == 128


def test_localisation_bounds_monotone_in_dimension():
    values = [localisation_lower_bounds(d).c_lower for d in (5, 6, 7, 8)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_localisation_bounds_round_trip_dict():
    b = localisation_lower_bounds(5, cutoff=16)
    doc = b.as_dict()
    assert doc["cutoff"] == 16
    got = Fraction(int(doc["c_lower"]["numerator"]), int(doc["c_lower"]["denominator"]))
    assert got == b.c_lower


def test_localisation_bounds_high_dimension():
    assert localisation_lower_bounds(100).c_lower >= Fraction(9, 10)


def test_localisation_bounds_reject_low_dimension():
    with pytest.raises(DivergentTailError):
        localisation_lower_bounds(4)


def test_strong_transience_verdicts():
    v5 = strong_transience_verdict(5)
    assert v5.verdict == "strongly-transient"
    assert v5.certified_bound.hi > v5.certified_bound.lo > 0
    # the certificate doubles S_d(1): only even raw times contribute
    s1 = tail_sum(5, 1, 128)
    assert v5.certified_bound.hi == 2 * s1.upper
    assert strong_transience_verdict(1).verdict == "recurrent"
    assert strong_transience_verdict(2).verdict == "recurrent"
    assert strong_transience_verdict(3).verdict == "inconclusive"
    assert strong_transience_verdict(4).verdict == "inconclusive"
    assert strong_transience_verdict(3).certified_bound is None
