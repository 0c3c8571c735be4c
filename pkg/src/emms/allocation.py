"""Partitions, allocations of their bundles, and worst/best allocations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, EnumerationCapExceeded, NotABijection
from .instance import Instance, influence_vector

DEFAULT_ENUM_CAP = 8

WORST = "worst"
BEST = "best"
MATCHING = "matching"
ENUMERATE = "enumerate"


@dataclass(frozen=True)
class Partition:
    """Ordered bundles of item indices.  Empty bundles are allowed."""

    bundles: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(tuple(sorted(b)) for b in self.bundles))

    def __len__(self) -> int:
        return len(self.bundles)

    def __iter__(self):
        return iter(self.bundles)

    def __getitem__(self, k):
        return self.bundles[k]

    def check(self, m: int, n: int | None = None) -> None:
        if n is not None and len(self.bundles) != n:
            raise DimensionMismatch(f"partition has {len(self.bundles)} bundles, expected {n}")
        seen = sorted(b for bundle in self.bundles for b in bundle)
        if seen != list(range(m)):
            raise DimensionMismatch("bundles must be disjoint and cover every item exactly once")

    def bundle_values(self, item_values: Sequence) -> list[Fraction]:
        return [sum((item_values[b] for b in bundle), Fraction(0)) for bundle in self.bundles]

    def sorted_order(self, item_values: Sequence) -> list[int]:
        """Bundle indices by non-increasing value, ties by ascending index."""
        vals = self.bundle_values(item_values)
        return sorted(range(len(vals)), key=lambda k: (-vals[k], k))

    def sorted_values(self, item_values: Sequence) -> list[Fraction]:
        return sorted(self.bundle_values(item_values), reverse=True)

    def sorted_bundles(self, item_values: Sequence) -> "Partition":
        return Partition(tuple(self.bundles[k] for k in self.sorted_order(item_values)))

    def canonical(self) -> tuple:
        """Order-free key, used to compare partitions as set systems."""
        return tuple(sorted(self.bundles))


@dataclass(frozen=True)
class Allocation:
    """``assignment[k]`` is the agent receiving bundle ``k`` of ``partition``."""

    partition: Partition
    assignment: tuple[int, ...]
    utilities: tuple[Fraction, ...]

    def bundle_of(self, agent: int) -> tuple[int, ...]:
        return self.partition[self.assignment.index(agent)]


def _check_bijection(assignment: Sequence[int], n: int) -> tuple[int, ...]:
    assignment = tuple(assignment)
    if sorted(assignment) != list(range(n)):
        raise NotABijection(f"{assignment} is not a bijection onto {n} agents")
    return assignment


def utilities(instance: Instance, partition: Partition, assignment: Sequence[int]) -> tuple[Fraction, ...]:
    """Utility of every agent when bundle ``k`` goes to ``assignment[k]``."""
    n = instance.n
    partition.check(instance.m, n)
    assignment = _check_bijection(assignment, n)
    return tuple(
        sum(
            (instance.item_value(assignment[k], i, b) for k, bundle in enumerate(partition) for b in bundle),
            Fraction(0),
        )
        for i in range(n)
    )


def agent_utility(instance: Instance, partition: Partition, assignment: Sequence[int], i: int) -> Fraction:
    return sum(
        (instance.item_value(assignment[k], i, b) for k, bundle in enumerate(partition) for b in bundle),
        Fraction(0),
    )


def _cost_matrix(instance: Instance, partition: Partition, i: int) -> list[list[Fraction]]:
    # cost[k][a]: value to agent i of bundle k when held by agent a
    return [
        [sum((instance.item_value(a, i, b) for b in bundle), Fraction(0)) for a in range(instance.n)]
        for bundle in partition
    ]


def hungarian(cost: Sequence[Sequence[Fraction]]) -> tuple[Fraction, list[int]]:
    """Exact minimum-cost perfect matching on a square matrix.

    Potentials-based O(n^3) Hungarian method.  Works on any ordered field,
    so rationals stay exact.  Returns ``(total, col_of_row)``.
    """
    n = len(cost)
    if n == 0:
        return Fraction(0), []
    inf = float("inf")
    u = [Fraction(0)] * (n + 1)
    v = [Fraction(0)] * (n + 1)
    p = [0] * (n + 1)  # p[col] = row matched to col, 1-based, 0 = free
    way = [0] * (n + 1)
    for row in range(1, n + 1):
        p[0] = row
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of_row = [0] * n
    for j in range(1, n + 1):
        col_of_row[p[j] - 1] = j - 1
    total = sum((cost[r][col_of_row[r]] for r in range(n)), Fraction(0))
    return total, col_of_row


def _lexmin_optimal_matching(cost: list[list[Fraction]]) -> tuple[Fraction, list[int]]:
    """Optimal matching whose row->column tuple is lexicographically smallest."""
    n = len(cost)
    best, _ = hungarian(cost)
    rows = list(range(n))
    cols = list(range(n))
    fixed: list[int] = []
    spent = Fraction(0)
    for r in range(n):
        rest_rows = rows[r + 1:]
        for c in sorted(cols):
            rest_cols = [cc for cc in cols if cc != c]
            sub = [[cost[rr][cc] for cc in rest_cols] for rr in rest_rows]
            tail, _ = hungarian(sub)
            if spent + cost[r][c] + tail == best:
                fixed.append(c)
                spent += cost[r][c]
                cols = rest_cols
                break
        else:  # pragma: no cover - the optimum is always reachable
            raise AssertionError("lexicographic refinement lost the optimum")
    return best, fixed


def extreme_allocation(
    instance: Instance,
    partition: Partition,
    i: int,
    mode: str = WORST,
    method: str = MATCHING,
    cap: int = DEFAULT_ENUM_CAP,
) -> Allocation:
    """Allocation of ``partition`` minimising (``worst``) or maximising (``best``) agent i's utility.

    Among equally good bijections the lexicographically smallest assignment
    tuple wins, for both methods.
    """
    n = instance.n
    partition.check(instance.m, n)
    if mode not in (WORST, BEST):
        raise ValueError(f"unknown mode {mode!r}")
    cost = _cost_matrix(instance, partition, i)
    sign = 1 if mode == WORST else -1

    if method == ENUMERATE:
        if n > cap:
            raise EnumerationCapExceeded(f"n={n} exceeds enumeration cap {cap}")
        best_val = None
        best_perm = None
        for perm in itertools.permutations(range(n)):
            val = sign * sum((cost[k][perm[k]] for k in range(n)), Fraction(0))
            if best_val is None or val < best_val:
                best_val, best_perm = val, perm
        assignment = tuple(best_perm)
    elif method == MATCHING:
        signed = [[sign * c for c in row] for row in cost]
        _, cols = _lexmin_optimal_matching(signed)
        assignment = tuple(cols)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Allocation(partition, assignment, utilities(instance, partition, assignment))


def worst_value_network(instance: Instance, partition: Partition, i: int) -> Fraction:
    """Closed-form worst-case utility: influence vector against sorted bundle values."""
    x = influence_vector(instance, i)
    partition.check(instance.m, instance.n)
    return weighted_sorted_value(x, partition.sorted_values(instance.values[i]))


def weighted_sorted_value(x: Sequence[Fraction], sorted_values: Sequence[Fraction]) -> Fraction:
    """``sum_j x[j] * v[j]`` with ``x`` non-decreasing and ``v`` non-increasing."""
    return sum((a * b for a, b in zip(x, sorted_values)), Fraction(0))
