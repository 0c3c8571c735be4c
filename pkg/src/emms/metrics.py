"""Fairness quantities: EMMS, MMS, average share, extended-proportional share."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from fractions import Fraction

from .allocation import Allocation, Partition, hungarian, worst_value_network
from .errors import BadParameters
from .instance import Instance, as_fraction, influence_vector, new_instance
from .partitioning import check_cap, lpt_partition, maximin_value_exact, optimal_partition_exact

EXACT = "exact"
LPT_BOUND = "lpt_bound"


def _set_partitions(m: int, n: int):
    """Restricted-growth enumeration of item->block maps with at most ``n`` blocks."""
    assign = [0] * m

    def rec(b: int, used: int):
        if b == m:
            yield assign
            return
        for k in range(min(used + 1, n)):
            assign[b] = k
            yield from rec(b + 1, max(used, k + 1))

    yield from rec(0, 0)


def _general_emms(instance: Instance, i: int, cap: int | None) -> tuple[Partition, Fraction]:
    n, m = instance.n, instance.m
    check_cap(n, m, cap)
    per_item = [[instance.item_value(a, i, b) for a in range(n)] for b in range(m)]
    best = None
    best_part = None
    for assign in _set_partitions(m, n):
        cost = [[Fraction(0)] * n for _ in range(n)]
        for b, k in enumerate(assign):
            row = cost[k]
            for a in range(n):
                row[a] += per_item[b][a]
        worst, _ = hungarian(cost)
        if best is None or worst > best:
            best = worst
            blocks: list[list[int]] = [[] for _ in range(n)]
            for b, k in enumerate(assign):
                blocks[k].append(b)
            best_part = Partition(tuple(tuple(x) for x in blocks))
    return best_part, best


def emms_partition(instance: Instance, i: int, cap: int | None = None) -> tuple[Partition, Fraction]:
    """An optimal cut for agent ``i`` and its worst-case value, exactly."""
    if instance.is_network:
        return optimal_partition_exact(instance.values[i], influence_vector(instance, i), cap)
    return _general_emms(instance, i, cap)


def emms(instance: Instance, i: int, mode: str = EXACT, cap: int | None = None) -> Fraction:
    """Extended maximin share of agent ``i``.

    ``lpt_bound`` returns the worst-case value of the LPT partition, which
    lies between half the share and the share itself.
    """
    if mode == EXACT:
        return emms_partition(instance, i, cap)[1]
    if mode == LPT_BOUND:
        instance.require_network("lpt_bound")
        return worst_value_network(instance, lpt_partition(instance.values[i], instance.n), i)
    raise ValueError(f"unknown emms mode {mode!r}")


def mms(instance: Instance, i: int, cap: int | None = None) -> tuple[Fraction, Fraction]:
    """``(raw, self_scaled)`` maximin shares.

    ``raw`` ignores externalities.  ``self_scaled`` is the maximin share of
    the values the agent gets from items it holds itself: ``w_ii * raw`` in
    the network model, the maximin share of ``V_{i,i}`` in the general one.
    """
    raw = maximin_value_exact(instance.values[i], instance.n, cap)
    if instance.is_network:
        return raw, instance.self_weight(i) * raw
    own = [instance.item_value(i, i, b) for b in range(instance.m)]
    return raw, maximin_value_exact(own, instance.n, cap)


def average_share(instance: Instance, i: int) -> Fraction:
    total = sum(
        (instance.item_value(j, i, b) for b in range(instance.m) for j in range(instance.n)),
        Fraction(0),
    )
    return total / instance.n


def extended_proportional_share(instance: Instance, i: int) -> Fraction:
    """Each item routed to whichever holder pleases agent ``i`` most, divided by n."""
    total = sum(
        (max(instance.item_value(j, i, b) for j in range(instance.n)) for b in range(instance.m)),
        Fraction(0),
    )
    return total / instance.n


# -- fixtures witnessing the separations ---------------------------------------------


def gap_instance(c, eps) -> Instance:
    """Three agents where agent 0's EMMS dwarfs its maximin share.

    Agent 0 values items ``(1, c/eps, c/eps)`` and keeps ``1 - 2 eps`` of
    its own weight, ``eps`` from each other agent.  Agents 1 and 2 share the
    same weight shape and value every item at 1.
    """
    c, eps = as_fraction(c), as_fraction(eps)
    if c < 1 or not 0 < eps < Fraction(1, 2):
        raise BadParameters(f"need c >= 1 and 0 < eps < 1/2, got c={c}, eps={eps}")
    big = c / eps
    values = [[1, big, big], [1, 1, 1], [1, 1, 1]]
    self_w = 1 - 2 * eps
    weights = [[self_w if j == i else eps for j in range(3)] for i in range(3)]
    return new_instance(values, weights)


def cmp_scenario(kind: str, n: int = 3, value=1) -> Instance:
    """Single item, general model.  ``"i"``: no cross values; ``"ii"``: cross values equal own."""
    value = as_fraction(value)
    if kind == "i":
        cross = [[[value if j == i else 0] for j in range(n)] for i in range(n)]
    elif kind == "ii":
        cross = [[[value] for _ in range(n)] for _ in range(n)]
    else:
        raise BadParameters(f"unknown scenario {kind!r}")
    return new_instance(None, cross_values=cross)


# -- reports ------------------------------------------------------------------------


@dataclass(frozen=True)
class AgentFairness:
    agent: int
    emms: Fraction
    emms_exact: bool
    mms_raw: Fraction | None
    mms_self_scaled: Fraction | None
    average_share: Fraction
    extended_proportional_share: Fraction
    utility: Fraction
    ratio: Fraction | None
    required: Fraction
    passed: bool


@dataclass(frozen=True)
class FairnessReport:
    alpha: Fraction
    agents: tuple[AgentFairness, ...]

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.agents)

    def rows(self) -> list[dict]:
        return [{k: _fmt(v) for k, v in asdict(a).items()} for a in self.agents]

    def to_csv(self) -> str:
        buf = io.StringIO()
        rows = self.rows()
        fields = list(AgentFairness.__dataclass_fields__)
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, Fraction):
        return str(v)
    if v is None:
        return ""
    return v


def check_allocation(
    instance: Instance,
    allocation: Allocation,
    alpha,
    mode: str = EXACT,
    cap: int | None = None,
    with_mms: bool = True,
) -> FairnessReport:
    """Per-agent shares and an ``utility >= alpha * EMMS`` verdict.

    With ``mode="lpt_bound"`` the EMMS column holds the LPT lower bound and
    is flagged as inexact; the verdict is then against that bound.
    """
    alpha = as_fraction(alpha)
    rows = []
    for i in range(instance.n):
        share = emms(instance, i, mode, cap)
        raw, scaled = mms(instance, i, cap) if with_mms else (None, None)
        u = allocation.utilities[i]
        need = alpha * share
        rows.append(
            AgentFairness(
                agent=i,
                emms=share,
                emms_exact=mode == EXACT,
                mms_raw=raw,
                mms_self_scaled=scaled,
                average_share=average_share(instance, i),
                extended_proportional_share=extended_proportional_share(instance, i),
                utility=u,
                ratio=u / share if share else None,
                required=need,
                passed=u >= need,
            )
        )
    return FairnessReport(alpha, tuple(rows))
