"""Partition producers: LPT, nice-partition repair, and the exact optimizer.

All functions here take one agent's item values (a sequence indexed by item)
rather than a whole instance.  Objective vectors are non-decreasing and are
paired with bundle values sorted non-increasingly.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Iterator, Sequence

from .allocation import Partition, weighted_sorted_value
from .errors import BadEpsilon, BadParameters, InvariantBroken, SearchCapExceeded
from .instance import as_fraction

DEFAULT_SEARCH_CAP = 2 * 10**7
CAP_ENV = "EMMS_SEARCH_CAP"

MAXIMIN = "maximin"
MINIMAX = "minimax"
LEXIMIN = "leximin"


def default_search_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_SEARCH_CAP


def _fracs(values: Sequence) -> list[Fraction]:
    return [as_fraction(v) for v in values]


# -- LPT ---------------------------------------------------------------------


def lpt_partition(values: Sequence, n: int) -> Partition:
    """Longest-processing-time greedy split of the items into ``n`` bundles.

    Items go in non-increasing value order (ties: lower index first), each
    into the currently least valuable bundle (ties: lower bundle index).

    >>> p = lpt_partition([4, 3, 2, 1], 2)
    >>> p.bundles
    ((0, 3), (1, 2))
    """
    if n < 1:
        raise BadParameters("n must be at least 1")
    values = _fracs(values)
    order = sorted(range(len(values)), key=lambda b: (-values[b], b))
    sums = [Fraction(0)] * n
    bundles: list[list[int]] = [[] for _ in range(n)]
    for b in order:
        k = min(range(n), key=lambda k: (sums[k], k))
        bundles[k].append(b)
        sums[k] += values[b]
    return Partition(tuple(tuple(bundle) for bundle in bundles))


# -- niceness ------------------------------------------------------------------


def _violation(values: list[Fraction], partition: Partition) -> tuple[int, int, int] | None:
    """First ``(bundle, item, min_bundle)`` breaking niceness, scanning bundles by rank."""
    vals = partition.bundle_values(values)
    order = partition.sorted_order(values)
    last = order[-1]
    low = vals[last]
    for k in order[:-1]:
        for b in partition[k]:
            if vals[k] > values[b] > low:
                return k, b, last
    return None


def is_nice(values: Sequence, partition: Partition) -> bool:
    """True when no item is worth strictly between its bundle and the least bundle."""
    return _violation(_fracs(values), partition) is None


def _nicify_move(partition: Partition, k: int, b: int, last: int) -> Partition:
    bundles = list(partition.bundles)
    merged = tuple(sorted((set(bundles[k]) | set(bundles[last])) - {b}))
    bundles[k] = (b,)
    bundles[last] = merged
    return Partition(tuple(bundles))


def nicify_path(values: Sequence, partition: Partition) -> list[Partition]:
    """Every intermediate partition of the niceness repair, starting with the input."""
    values = _fracs(values)
    path = [partition]
    while (hit := _violation(values, path[-1])) is not None:
        path.append(_nicify_move(path[-1], *hit))
    return path


def nicify(values: Sequence, partition: Partition) -> Partition:
    """Repair ``partition`` into a nice one without lowering its worst-case value.

    Each move replaces the offending bundle and the least bundle by ``{b}``
    and the union of the two minus ``b``.

    >>> nicify([4, 3, 1], Partition(((0, 1), (2,)))).bundles
    ((0,), (1, 2))
    """
    return nicify_path(values, partition)[-1]


def _strip_zeros(values: list[Fraction], partition: Partition) -> Partition | None:
    """Move worthless items out of every non-least bundle into the least one."""
    order = partition.sorted_order(values)
    last = order[-1]
    moved: list[int] = []
    bundles = list(partition.bundles)
    for k in order[:-1]:
        zeros = [b for b in bundles[k] if values[b] == 0]
        if zeros:
            bundles[k] = tuple(b for b in bundles[k] if values[b] != 0)
            moved.extend(zeros)
    if not moved:
        return None
    bundles[last] = tuple(sorted(bundles[last] + tuple(moved)))
    return Partition(tuple(bundles))


def _half_transfer(values: list[Fraction], partition: Partition) -> Partition | None:
    """Move a light part of a multi-item top bundle into the least bundle.

    Applies when some bundle holding two or more items is worth more than
    twice the least bundle.  The moved part is worth at most half its bundle,
    so both new bundle values land between the old ones.
    """
    vals = partition.bundle_values(values)
    order = partition.sorted_order(values)
    last = order[-1]
    low = vals[last]
    for k in order[:-1]:
        bundle = partition[k]
        if len(bundle) < 2 or not low < vals[k] / 2:
            continue
        top = min(bundle, key=lambda b: (-values[b], b))
        rest = tuple(b for b in bundle if b != top)
        if vals[k] - values[top] <= vals[k] / 2:
            keep, move = (top,), rest
        else:
            keep, move = rest, (top,)
        bundles = list(partition.bundles)
        bundles[k] = keep
        bundles[last] = tuple(sorted(bundles[last] + move))
        return Partition(tuple(bundles))
    return None


def claiming_normal_form(values: Sequence, partition: Partition) -> Partition:
    """Nice partition in the shape the bundle-claiming update relies on.

    On top of niceness: no bundle except the least one carries worthless
    items, and every bundle with two or more items is worth at most twice the
    least bundle.  None of the moves lowers the worst-case value under any
    non-decreasing influence vector.
    """
    values = _fracs(values)
    current = partition
    guard = 0
    while True:
        guard += 1
        if guard > 10_000:  # pragma: no cover
            raise InvariantBroken("normal form did not converge")
        current = nicify(values, current)
        nxt = _strip_zeros(values, current)
        if nxt is None:
            nxt = _half_transfer(values, current)
        if nxt is None:
            return current
        current = nxt


# -- objective vectors -----------------------------------------------------------


def objective_vector(kind: str, n: int, eps=None) -> tuple[Fraction, ...]:
    """Canonical non-decreasing weight vector for a classic partition objective.

    >>> objective_vector("maximin", 3)
    (Fraction(0, 1), Fraction(0, 1), Fraction(1, 1))
    >>> objective_vector("minimax", 3)
    (Fraction(0, 1), Fraction(1, 2), Fraction(1, 2))
    """
    if n < 1:
        raise BadParameters("n must be at least 1")
    if kind == MAXIMIN:
        return tuple([Fraction(0)] * (n - 1) + [Fraction(1)])
    if kind == MINIMAX:
        if n < 2:
            raise BadParameters("minimax needs n >= 2")
        return tuple([Fraction(0)] + [Fraction(1, n - 1)] * (n - 1))
    if kind == LEXIMIN:
        if eps is None:
            raise BadEpsilon("leximin needs eps")
        eps = as_fraction(eps)
        if not 0 < eps < 1:
            raise BadEpsilon(f"eps must lie in (0, 1), got {eps}")
        denom = 1 - eps**n
        largest_first = [(eps**k - eps ** (k + 1)) / denom for k in range(n)]
        return tuple(reversed(largest_first))
    raise BadParameters(f"unknown objective {kind!r}")


def huge_items(values: Sequence, n: int) -> tuple[int, ...]:
    """Items worth at least the agent's average share ``V(M)/n``."""
    values = _fracs(values)
    threshold = sum(values, Fraction(0)) / n
    return tuple(b for b, v in enumerate(values) if v >= threshold)


# -- exact search ----------------------------------------------------------------


def _scaled(values: list[Fraction]) -> tuple[list[int], int]:
    scale = math.lcm(*(v.denominator for v in values)) if values else 1
    return [int(v * scale) for v in values], scale


def check_cap(n: int, m: int, cap: int | None) -> None:
    cap = default_search_cap() if cap is None else cap
    if n**m > cap:
        raise SearchCapExceeded(f"{n}^{m} labelled partitions exceed search cap {cap}")


def distinct_value_partitions(values: Sequence, n: int, cap: int | None = None) -> Iterator[tuple[tuple[int, ...], list[int]]]:
    """Yield one witness per distinct multiset of bundle values.

    Yields ``(sorted_sums, assign)``: ``sorted_sums`` are the bundle values
    scaled to integers in non-increasing order and ``assign[b]`` is the
    bundle of item ``b``.  Bundles with equal running sums are
    interchangeable, so only the first of them is tried at each level.
    Worthless items sit in bundle 0 of every witness.
    """
    values = _fracs(values)
    m = len(values)
    check_cap(n, m, cap)
    ints, _ = _scaled(values)
    order = sorted((b for b in range(m) if ints[b] > 0), key=lambda b: (-ints[b], b))
    sums = [0] * n
    assign = [0] * m
    seen: set[tuple[int, ...]] = set()

    def rec(depth: int):
        if depth == len(order):
            key = tuple(sorted(sums, reverse=True))
            if key not in seen:
                seen.add(key)
                yield key, list(assign)
            return
        b = order[depth]
        v = ints[b]
        tried = set()
        for k in range(n):
            s = sums[k]
            if s in tried:
                continue
            tried.add(s)
            sums[k] = s + v
            assign[b] = k
            yield from rec(depth + 1)
            sums[k] = s

    yield from rec(0)


def _from_assign(assign: list[int], n: int) -> Partition:
    bundles: list[list[int]] = [[] for _ in range(n)]
    for b, k in enumerate(assign):
        bundles[k].append(b)
    return Partition(tuple(tuple(bundle) for bundle in bundles))


_OPT_CACHE: dict = {}


def optimal_partition_exact(
    values: Sequence, x: Sequence, cap: int | None = None, normalize: bool = True
) -> tuple[Partition, Fraction]:
    """Partition maximising ``sum_j x[j] * v[j]`` over all splits into ``len(x)`` bundles.

    ``x`` must be non-decreasing; ``v`` are the bundle values sorted
    non-increasingly.  The returned partition is put in
    :func:`claiming_normal_form` unless ``normalize`` is false; its value is
    the same either way.
    """
    values = tuple(_fracs(values))
    x = tuple(_fracs(x))
    n = len(x)
    if any(a > b for a, b in zip(x, x[1:])):
        raise BadParameters("objective vector must be non-decreasing")
    key = (values, x, normalize)
    if key in _OPT_CACHE:
        return _OPT_CACHE[key]
    check_cap(n, len(values), cap)
    xs, xscale = _scaled(list(x))
    _, vscale = _scaled(list(values))
    best = None
    best_assign = None
    for sums, assign in distinct_value_partitions(values, n, cap):
        obj = sum(a * s for a, s in zip(xs, sums))
        if best is None or obj > best:
            best, best_assign = obj, assign
    value = Fraction(best, xscale * vscale)
    partition = _from_assign(best_assign, n)
    if normalize:
        partition = claiming_normal_form(values, partition)
        got = weighted_sorted_value(x, partition.sorted_values(values))
        if got != value:
            raise InvariantBroken(f"normal form changed optimal value {value} -> {got}")
    if len(_OPT_CACHE) > 50_000:
        _OPT_CACHE.clear()
    _OPT_CACHE[key] = (partition, value)
    return partition, value


def leximin_partition_exact(values: Sequence, n: int, cap: int | None = None) -> Partition:
    """Partition whose ascending bundle-value vector is lexicographically largest."""
    best = None
    best_assign = None
    for sums, assign in distinct_value_partitions(values, n, cap):
        asc = sums[::-1]
        if best is None or asc > best:
            best, best_assign = asc, assign
    return _from_assign(best_assign, n)


def minimax_value_exact(values: Sequence, n: int, cap: int | None = None) -> Fraction:
    """Smallest achievable largest-bundle value."""
    values = _fracs(values)
    _, scale = _scaled(values)
    return Fraction(min(sums[0] for sums, _ in distinct_value_partitions(values, n, cap)), scale)


def maximin_value_exact(values: Sequence, n: int, cap: int | None = None) -> Fraction:
    """Largest achievable least-bundle value (the plain maximin share)."""
    values = _fracs(values)
    _, scale = _scaled(values)
    return Fraction(max(sums[-1] for sums, _ in distinct_value_partitions(values, n, cap)), scale)
