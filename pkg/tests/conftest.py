"""Shared independent oracles for the test suite."""

import itertools

import numpy as np
import pytest

from wssim.sizing import success_probability


def brute_force_busy_pmf(busy_probs):
    """P(exactly i busy) by enumerating all 2^M outcomes."""
    probs = np.asarray(busy_probs, dtype=float)
    m = probs.size
    pmf = np.zeros(m + 1)
    for outcome in itertools.product((0, 1), repeat=m):
        p = 1.0
        for q, bit in zip(probs, outcome):
            p *= q if bit else 1.0 - q
        pmf[sum(outcome)] += p
    return pmf


def brute_force_best_set(vacancy_probs, k_branches):
    """Exhaustive search of the throughput objective over all band subsets.

    Returns (best subset as a sorted tuple, best objective value); among
    equal-objective subsets the first in (size, lexicographic) order wins.
    """
    vacancy = np.asarray(vacancy_probs, dtype=float)
    n = vacancy.size
    best_set, best_value = None, -1.0
    for size in range(k_branches, n + 1):
        for subset in itertools.combinations(range(n), size):
            probs = vacancy[list(subset)]
            value = success_probability(probs, k_branches) * probs.sum()
            if value > best_value:
                best_set, best_value = subset, value
    return best_set, best_value


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
