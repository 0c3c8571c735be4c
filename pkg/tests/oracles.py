"""Brute-force references.  Deliberately naive and independent of ``emms``."""

from __future__ import annotations

import itertools
from fractions import Fraction


def item_value(values, weights, cross, giver, observer, b):
    if cross is not None:
        return Fraction(cross[observer][giver][b])
    return Fraction(weights[observer][giver]) * Fraction(values[observer][b])


def labelled_partitions(m, n):
    """Every map item -> bundle label, as a list of n item lists."""
    for labels in itertools.product(range(n), repeat=m):
        bundles = [[] for _ in range(n)]
        for b, k in enumerate(labels):
            bundles[k].append(b)
        yield bundles


def worst_by_permutation(values, weights, cross, bundles, i):
    n = len(bundles)
    best = None
    for perm in itertools.permutations(range(n)):
        u = sum(
            (item_value(values, weights, cross, perm[k], i, b) for k in range(n) for b in bundles[k]),
            Fraction(0),
        )
        if best is None or u < best:
            best = u
    return best


def best_by_permutation(values, weights, cross, bundles, i):
    n = len(bundles)
    return max(
        sum((item_value(values, weights, cross, perm[k], i, b) for k in range(n) for b in bundles[k]), Fraction(0))
        for perm in itertools.permutations(range(n))
    )


def emms_bruteforce(values, weights=None, cross=None, i=0):
    n = len(values)
    m = len(values[0])
    return max(worst_by_permutation(values, weights, cross, bundles, i) for bundles in labelled_partitions(m, n))


def weighted_objective_bruteforce(item_values, x):
    """max over labelled partitions of sum_j x_j * (j-th largest bundle)."""
    n = len(x)
    best = None
    for bundles in labelled_partitions(len(item_values), n):
        sums = sorted((sum((Fraction(item_values[b]) for b in bundle), Fraction(0)) for bundle in bundles), reverse=True)
        val = sum((Fraction(a) * s for a, s in zip(x, sums)), Fraction(0))
        if best is None or val > best:
            best = val
    return best


def maximin_bruteforce(item_values, n):
    return max(
        min(sum((Fraction(item_values[b]) for b in bundle), Fraction(0)) for bundle in bundles)
        for bundles in labelled_partitions(len(item_values), n)
    )


def minimax_bruteforce(item_values, n):
    return min(
        max(sum((Fraction(item_values[b]) for b in bundle), Fraction(0)) for bundle in bundles)
        for bundles in labelled_partitions(len(item_values), n)
    )


def min_size_subset(values: dict, lo, hi=None):
    """Smallest subset of keys with sum in [lo, hi] (hi=None means unbounded)."""
    keys = sorted(values)
    for size in range(len(keys) + 1):
        for combo in itertools.combinations(keys, size):
            s = sum((Fraction(values[k]) for k in combo), Fraction(0))
            if s >= lo and (hi is None or s <= hi):
                return combo
    return None
