"""Exact return probabilities and certified bounds for the walk on Z^d.

Everything here is arbitrary-precision: return probabilities are exact
rationals, and every quantity that involves an infinite series comes as a
rigorous (lower, upper) enclosure built from exact partial sums plus a
closed-form tail envelope. No value in this module is a float estimate
dressed up as a bound; the one float entry point (lclt_bound) is an envelope
by theorem and is only used for comparisons with generous margins.

The key identity: the probability that a 2n-step walk returns to its start
is q_n = C(2n, n) * (2d)^(-2n) * A_d(n), where A_d(n) sums the squared
multinomial coefficients over compositions of n into d parts. A_d satisfies
a clean convolution over d, which gives the fast path; a literal convolution
of the step distribution serves as the independent slow method, and the two
are cross-checked in tests along with brute-force word enumeration.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import BudgetExceededError, ConfigError, DivergentTailError

# 3.14159265358979 < pi < 355/113; the lower constant overestimates 1/pi,
# the upper one overestimates pi itself, whichever an envelope needs.
_PI_LOWER = Fraction(314159265358979, 10**14)
_PI_UPPER = Fraction(355, 113)

# cost model d * n^2 for the squared-multinomial table; beyond this the
# error message points at the float path and the pointwise envelope
_EXACT_BUDGET = 200_000_000

# state cap for the literal step-distribution convolution (slow method)
_CONVOLUTION_STATE_CAP = 300_000

_SQRT_SCALE = 10**30


@dataclass(frozen=True)
class ExactValue:
    """An exact rational, or a rigorous (lower, upper) enclosure.

    Exactly one representation is populated. Rationals are in lowest terms
    (guaranteed by Fraction); enclosures satisfy lower <= upper. The
    provenance tag names the formula that produced the value.
    """

    provenance: str
    rational: Optional[Fraction] = None
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None

    def __post_init__(self):
        if self.rational is not None:
            if self.lower is not None or self.upper is not None:
                raise ConfigError("rational and enclosure forms are mutually exclusive")
        else:
            if self.lower is None or self.upper is None:
                raise ConfigError("enclosure needs both lower and upper")
            if self.lower > self.upper:
                raise ConfigError("enclosure has lower > upper")

    @property
    def lo(self) -> Fraction:
        return self.rational if self.rational is not None else self.lower

    @property
    def hi(self) -> Fraction:
        return self.rational if self.rational is not None else self.upper

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)


def _check_dimension(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ConfigError("dimension must be an integer >= 1")


def _require_summable(d: int, what: str) -> None:
    if d <= 4:
        raise DivergentTailError(
            f"{what} for d={d} is divergent-or-unknown: the n^(1-d/2) tail "
            "majorant is not summable below d=5"
        )


@lru_cache(maxsize=None)
def _squared_multinomial_sums(d: int, n_max: int) -> tuple:
    """A_d(n) = sum over x_1+...+x_d = n of multinomial(n; x)^2, n = 0..n_max."""
    if d == 1:
        return (1,) * (n_max + 1)
    prev = _squared_multinomial_sums(d - 1, n_max)
    out = []
    for n in range(n_max + 1):
        total = 0
        for k in range(n + 1):
            c = math.comb(n, k)
            total += c * c * prev[n - k]
        out.append(total)
    return tuple(out)


def _exact_q(d: int, n: int) -> Fraction:
    if n == 0:
        return Fraction(1)
    table = _squared_multinomial_sums(d, n)
    return Fraction(math.comb(2 * n, n) * table[n], (2 * d) ** (2 * n))


def _check_exact_budget(d: int, n: int) -> None:
    if d * n * n > _EXACT_BUDGET:
        raise BudgetExceededError(
            f"exact table for d={d}, n={n} exceeds the big-integer budget; "
            "use mode='float' on the series functions, or lclt_bound for a "
            "pointwise envelope"
        )


def return_probability(d: int, n: int) -> ExactValue:
    """P(X_{2n} = 0) for the walk on Z^d, as an exact rational."""
    _check_dimension(d)
    if n < 0:
        raise ConfigError("n must be >= 0")
    _check_exact_budget(d, n)
    return ExactValue(provenance="squared-multinomial", rational=_exact_q(d, n))


def return_probability_by_convolution(d: int, n: int) -> ExactValue:
    """P(X_{2n} = 0) by literally convolving the step distribution.

    Exact integer counts over the reachable displacement box, normalized at
    the end. Exponential in d, so this is the cross-check method, not the
    fast path; the total count is asserted to equal (2d)^t at every step.
    """
    _check_dimension(d)
    if n < 0:
        raise ConfigError("n must be >= 0")
    if (4 * n + 1) ** d > _CONVOLUTION_STATE_CAP:
        raise BudgetExceededError(
            f"convolution state space for d={d}, n={n} is too large; "
            "return_probability covers this range"
        )
    origin = (0,) * d
    counts = {origin: 1}
    for step in range(1, 2 * n + 1):
        nxt: dict = {}
        for x, c in counts.items():
            for axis in range(d):
                for sign in (-1, 1):
                    y = x[:axis] + (x[axis] + sign,) + x[axis + 1 :]
                    nxt[y] = nxt.get(y, 0) + c
        counts = nxt
        assert sum(counts.values()) == (2 * d) ** step
    value = Fraction(counts.get(origin, 0), (2 * d) ** (2 * n))
    return ExactValue(provenance="step-convolution", rational=value)


def lclt_bound(d: int, n: int) -> float:
    """The envelope (2d / (pi n))^(d/2) on P(X_{2n} = 0); requires n >= 1."""
    _check_dimension(d)
    if n < 1:
        raise ConfigError("the envelope needs n >= 1")
    return (2 * d / (math.pi * n)) ** (d / 2)


def monotonicity_check(d: int, n_max: int) -> bool:
    """Whether q_0 >= q_1 >= ... >= q_{n_max} holds on exact rationals.

    This is a theorem, so False signals an implementation bug.
    """
    _check_dimension(d)
    if n_max < 0:
        raise ConfigError("n_max must be >= 0")
    _check_exact_budget(d, n_max)
    values = [_exact_q(d, n) for n in range(n_max + 1)]
    return all(a >= b for a, b in zip(values, values[1:]))


# -------------------------------------------------------------- tail envelope


def _sqrt_upper(x: Fraction) -> Fraction:
    """Rational upper bound on sqrt(x), tight to ~1e-30 relative."""
    assert x >= 0
    scaled = x.numerator * _SQRT_SCALE * _SQRT_SCALE // x.denominator
    return Fraction(math.isqrt(scaled) + 1, _SQRT_SCALE)


def _half_power_upper(x: Fraction, k: int) -> Fraction:
    """Rational upper bound on x^(k/2) for x > 0 and any integer k."""
    if k % 2 == 0:
        return x ** (k // 2)
    return _sqrt_upper(x**k)


def _tail_prefactor(d: int) -> Fraction:
    """Rational upper bound on the constant in q_n <= 2 (pi d/16)^(d/2) n^(-d/2).

    Proof sketch: q_n = (2pi)^-d int phi^2n over the torus with
    phi(t) = mean_i cos(t_i); substituting t -> pi - t componentwise maps
    phi to -phi, so the integral is twice the one over {phi >= 0}, where
    1 - cos t >= 2 t^2 / pi^2 gives phi <= exp(-2 |t|^2 / (d pi^2)) and the
    gaussian integral over R^d evaluates to (pi d / 16)^(d/2) n^(-d/2).
    Sharper than the displayed envelope (2d/(pi n))^(d/2) by 2 (pi^2/32)^(d/2).
    """
    return 2 * _half_power_upper(_PI_UPPER * Fraction(d, 16), d)


def _lclt_tail(d: int, cutoff: int, weight: int) -> Fraction:
    """Upper bound on sum_{n > cutoff} n^weight * q_n via the envelope.

    Bounds each term by the _tail_prefactor envelope and the sum by the
    integral int_cutoff^inf t^(weight - d/2) dt, finite when d > 2(weight+1).
    All arithmetic is rational; pi enters as a certified upper bound.
    """
    assert d > 2 * (weight + 1)
    assert cutoff >= 1
    integral = _half_power_upper(Fraction(cutoff), 2 * (weight + 1) - d)
    return _tail_prefactor(d) * integral * Fraction(2, d - 2 * (weight + 1))


def _float_partial(d: int, n_lo: int, n_hi: int, term_weight) -> tuple:
    """(compensated float partial sum of term_weight(n) * q_n, relative error).

    The float path avoids big integers entirely: a_d(n) = A_d(n) / (n!)^2
    is a plain d-fold convolution of 1/(k!)^2 with itself, all values
    O(2.28^d), and q_n is then assembled in log space. The returned
    relative error bound is crude but safe: a few eps per convolution
    layer and per log/exp call, times the term count.
    """
    size = n_hi + 1
    base = np.array([1.0 / math.factorial(k) ** 2 for k in range(size)])
    acc = base.copy()
    for _ in range(d - 1):
        acc = np.convolve(acc, base)[:size]
    terms = [
        float(term_weight(n))
        * math.exp(math.lgamma(2 * n + 1) - 2 * n * math.log(2 * d) + math.log(acc[n]))
        for n in range(n_lo, n_hi + 1)
        if term_weight(n) != 0
    ]
    total = math.fsum(terms)
    rel = (4 * d * size + 64 * len(terms) + 64) * sys.float_info.epsilon
    return total, rel


def _series_enclosure(d, n_lo, cutoff, term_weight, tail: Fraction, mode, tag) -> ExactValue:
    """Enclosure of sum_{n >= n_lo} term_weight(n) * q_n with tail beyond cutoff."""
    if mode == "exact":
        _check_exact_budget(d, cutoff)
        table = _squared_multinomial_sums(d, cutoff)
        partial = Fraction(0)
        for n in range(n_lo, cutoff + 1):
            w = term_weight(n)
            if w == 0:
                continue
            q = (
                Fraction(1)
                if n == 0
                else Fraction(math.comb(2 * n, n) * table[n], (2 * d) ** (2 * n))
            )
            partial += w * q
        return ExactValue(provenance=tag, lower=partial, upper=partial + tail)
    if mode == "float":
        total, rel = _float_partial(d, n_lo, cutoff, term_weight)
        spread = Fraction(total) * Fraction(rel).limit_denominator(10**18)
        lower = max(Fraction(0), Fraction(total) - spread)
        return ExactValue(
            provenance=tag + "+float-compensated",
            lower=lower,
            upper=Fraction(total) + spread + tail,
        )
    raise ConfigError(f"unknown mode {mode!r}; expected 'exact' or 'float'")


def tail_sum(d: int, k: int, cutoff: int, mode: str = "exact") -> ExactValue:
    """Enclosure of S_d(k) = sum_{n >= k} n * q_n.

    lower is the exact (or compensated-float) partial sum up to cutoff;
    upper adds the closed-form integral envelope on the remainder.
    """
    _check_dimension(d)
    _require_summable(d, "the weighted return series")
    if k < 1:
        raise ConfigError("k must be >= 1")
    if cutoff < k:
        raise ConfigError("cutoff must be >= k")
    tail = _lclt_tail(d, cutoff, weight=1)
    return _series_enclosure(d, k, cutoff, lambda n: n, tail, mode, "partial-sum+lclt-integral")


def intersection_expectation(
    d: int, cutoff: int, adjacency: bool = False, mode: str = "exact"
) -> ExactValue:
    """Enclosure of E[I] (trace intersections) or E[J] (trace adjacencies).

    E[I] = sum_{n>=0} (2n+1) q_n counts coincidences of two independent
    walks from a common start. E[J] = 1 + 2d * sum_{n>=1} (2n+1) q_{n+1}
    counts pairs at lattice distance one. Both use exact partial sums up to
    the cutoff plus the integral envelope.
    """
    _check_dimension(d)
    _require_summable(d, "the intersection series")
    if cutoff < 1:
        raise ConfigError("cutoff must be >= 1")
    if not adjacency:
        # sum_{n > c} (2n+1) q_n <= 2 * tail(weight 1) + tail(weight 0)
        tail = 2 * _lclt_tail(d, cutoff, 1) + _lclt_tail(d, cutoff, 0)
        return _series_enclosure(
            d, 0, cutoff, lambda n: 2 * n + 1, tail, mode, "series-EI+lclt-integral"
        )
    # terms (2n+1) q_{n+1} for n > c: with m = n+1, (2m-1) q_m <= 2 m q_m
    tail = 2 * d * 2 * _lclt_tail(d, cutoff + 1, 1)
    inner = _series_enclosure(
        d,
        2,
        cutoff + 1,
        lambda m: 2 * m - 1,
        Fraction(0),
        mode,
        "series-EJ+lclt-integral",
    )
    return ExactValue(
        provenance=inner.provenance,
        lower=1 + 2 * d * inner.lower,
        upper=1 + 2 * d * inner.upper + tail,
    )


@dataclass(frozen=True)
class LocalisationBounds:
    """Certified lower bounds on the localisation constants for one d."""

    dimension: int
    cutoff: int
    s_lower: Fraction
    c_lower: Fraction
    c_tilde_lower: Fraction

    def as_dict(self) -> dict:
        def enc(fr: Fraction) -> dict:
            return {
                "decimal": f"{float(fr):.12g}",
                "numerator": str(fr.numerator),
                "denominator": str(fr.denominator),
            }

        return {
            "dimension": self.dimension,
            "cutoff": self.cutoff,
            "s_lower": enc(self.s_lower),
            "c_lower": enc(self.c_lower),
            "c_tilde_lower": enc(self.c_tilde_lower),
        }


def localisation_lower_bounds(d: int, cutoff: Optional[int] = None) -> LocalisationBounds:
    """Certified lower bounds on s(d), c(d), c-tilde(d) via the chain
    s(d) >= 1/E[I], c(d) >= s(d), c-tilde(d) >= 1/E[J].

    Any cutoff yields a valid certificate; larger cutoffs tighten it. The
    default max(128, d) keeps the envelope decaying (it only starts to decay
    for n beyond roughly 2d/pi).
    """
    _check_dimension(d)
    _require_summable(d, "the localisation bound chain")
    if cutoff is None:
        cutoff = max(128, d)
    ei = intersection_expectation(d, cutoff, adjacency=False)
    ej = intersection_expectation(d, cutoff, adjacency=True)
    s_lower = 1 / ei.hi
    return LocalisationBounds(
        dimension=d,
        cutoff=cutoff,
        s_lower=s_lower,
        c_lower=s_lower,
        c_tilde_lower=1 / ej.hi,
    )


@dataclass(frozen=True)
class TransienceVerdict:
    dimension: int
    verdict: str  # strongly-transient | recurrent | inconclusive
    certified_bound: Optional[ExactValue]  # upper-bounds sum of n * P(X_n = 0)


def strong_transience_verdict(d: int, cutoff: Optional[int] = None) -> TransienceVerdict:
    """Classify Z^d: strong transience holds iff sum_n n * P(X_n = 0) is finite.

    For d >= 5 the verdict carries a certified finite enclosure of that sum
    (only even times contribute, so it equals 2 * S_d(1)). Dimensions 1 and 2
    are recurrent; 3 and 4 are genuinely open here, so the verdict refuses to
    guess and the certificate is omitted.
    """
    _check_dimension(d)
    if d <= 2:
        return TransienceVerdict(d, "recurrent", None)
    if d <= 4:
        return TransienceVerdict(d, "inconclusive", None)
    if cutoff is None:
        cutoff = max(128, d)
    s1 = tail_sum(d, 1, cutoff)
    bound = ExactValue(
        provenance="2*" + s1.provenance, lower=2 * s1.lo, upper=2 * s1.hi
    )
    return TransienceVerdict(d, "strongly-transient", bound)
