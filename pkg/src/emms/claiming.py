"""Bundle Claiming: alpha/2 (exact source) and alpha/4 (LPT source) EMMS allocations.

Every remaining agent carries an expectation level ``level`` (1-based) and
the sorted bundle values ``v`` of its reference partition; it is happy with
any bundle worth at least ``v[level] / 2``.  Each round hands the smallest
bundle that makes somebody happy to that agent, then every other agent files
the newcomer under one of its reference bundles or under ``F`` and raises its
level whenever ``F`` has grown too valuable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .allocation import Allocation, Partition, extreme_allocation, utilities, BEST, ENUMERATE
from .errors import InvariantBroken, WrongAgentCount
from .instance import Instance, influence_vector
from .partitioning import claiming_normal_form, lpt_partition, optimal_partition_exact

EXACT = "exact"
LPT = "lpt"
F = "F"


def min_expectation_bundle(values: Mapping[int, Fraction], threshold) -> tuple[int, ...] | None:
    """Fewest items worth at least ``threshold``, or None if everything together falls short.

    Greedy from the most valuable item down (ties: lower item index).

    >>> min_expectation_bundle({0: 5, 1: 3, 2: 2}, 6)
    (0, 1)
    """
    if threshold <= 0:
        return ()
    picked = []
    total = 0
    for b in sorted(values, key=lambda b: (-values[b], b)):
        picked.append(b)
        total += values[b]
        if total >= threshold:
            return tuple(sorted(picked))
    return None


def compatible_subset(values: Mapping[int, Fraction], v) -> tuple[int, ...] | None:
    """Smallest subset of keys whose summed value lies in ``[v/2, v]``.

    Exact enumeration by size; among equal sizes the first combination of
    sorted keys wins.
    """
    keys = sorted(values)
    lo, hi = Fraction(v) / 2, Fraction(v)
    for size in range(len(keys) + 1):
        for combo in itertools.combinations(keys, size):
            s = sum((values[k] for k in combo), Fraction(0))
            if lo <= s <= hi:
                return combo
    return None


@dataclass
class AgentState:
    """Bookkeeping one unsatisfied agent keeps about the satisfied ones."""

    agent: int
    ref_bundles: list[tuple[int, ...]]
    ref_values: list[Fraction]
    level: int = 1
    mapping: dict[int, object] = field(default_factory=dict)

    @property
    def expectation(self) -> Fraction:
        return self.ref_values[self.level - 1] / 2

    def group(self, target) -> list[int]:
        return sorted(k for k, t in self.mapping.items() if t == target)


@dataclass
class ClaimState:
    instance: Instance
    remaining: list[int]
    items: set[int]
    agents: dict[int, AgentState]
    bundles: dict[int, tuple[int, ...]] = field(default_factory=dict)
    satisfied: list[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.instance.n

    def held_value(self, observer: int, k: int) -> Fraction:
        return self.instance.value(observer, self.bundles[k])

    def group_value(self, observer: int, members) -> Fraction:
        return sum((self.held_value(observer, k) for k in members), Fraction(0))


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    lhs: Fraction
    rhs: Fraction
    note: str = ""

    @property
    def slack(self) -> Fraction:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class SatisfactionReport:
    agent: int
    level: int
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.ok]


def check_external_satisfaction(state: ClaimState, i: int) -> SatisfactionReport:
    """Validity of agent ``i``'s mapping, its externality bound, and feasibility.

    The mapping conditions, with ``v_j`` the agent's j-th reference value:

    (i)   every slot ``j`` below the current level holds satisfied agents worth at least ``v_j / 2``;
    (ii)  and at most ``v_j``;
    (iii) the unfiled group ``F`` is worth less than the current expectation.

    Condition (iii) is vacuous at a zero expectation; the agent then accepts
    the empty bundle.
    """
    inst = state.instance
    ag = state.agents[i]
    n = state.n
    checks = [CheckResult("level<=n", ag.level <= n, Fraction(ag.level), Fraction(n))]
    if set(ag.mapping) != set(state.satisfied):
        checks.append(CheckResult("mapping-covers-satisfied", False, Fraction(len(ag.mapping)), Fraction(len(state.satisfied))))
    for j in range(1, min(ag.level, n + 1)):
        got = state.group_value(i, ag.group(j))
        v = ag.ref_values[j - 1]
        checks.append(CheckResult(f"(i)@{j}", got >= v / 2, got, v / 2))
        checks.append(CheckResult(f"(ii)@{j}", got <= v, v, got))
    if ag.level <= n:
        expect = ag.expectation
        nf = state.group_value(i, ag.group(F))
        if expect == 0:
            checks.append(CheckResult("(iii)", True, expect, nf, "zero expectation"))
        else:
            checks.append(CheckResult("(iii)", nf < expect, expect, nf))
        remaining = inst.value(i, state.items)
        checks.append(CheckResult("feasible", remaining >= expect, remaining, expect))
    x = influence_vector(inst, i)
    external = sum((inst.weight(k, i) * state.held_value(i, k) for k in state.satisfied), Fraction(0))
    bound = sum((x[j] * ag.ref_values[j] for j in range(min(ag.level - 1, n))), Fraction(0)) / 2
    checks.append(CheckResult("external", external >= bound, external, bound))
    return SatisfactionReport(i, ag.level, tuple(checks))


def _min_meeting_subset(values: Mapping[int, Fraction], threshold: Fraction) -> list[int]:
    picked, total = [], Fraction(0)
    for k in sorted(values, key=lambda k: (-values[k], k)):
        picked.append(k)
        total += values[k]
        if total >= threshold:
            break
    return picked


def update_mapping(state: ClaimState, j: int) -> list[dict]:
    """Restore condition (iii) for agent ``j``; returns the list of moves made.

    A compatible subset of ``F`` is filed under the current level, which then
    rises.  Without one, the lone over-valued member of ``F`` must hold a
    single item that is also a whole reference bundle below the current
    level; it takes that slot and the slot's previous holders fall back to
    ``F``.  Anything else raises :class:`InvariantBroken`.
    """
    ag = state.agents[j]
    n = state.n
    events: list[dict] = []
    guard = 0
    while True:
        guard += 1
        if guard > 4 * n * n + 8:
            raise InvariantBroken(f"agent {j}: mapping update did not terminate")
        v = ag.ref_values[ag.level - 1]
        if v == 0:
            break
        nf = {k: state.held_value(j, k) for k in ag.group(F)}
        if sum(nf.values(), Fraction(0)) < v / 2:
            break
        delta = compatible_subset(nf, v)
        if delta is not None:
            for k in delta:
                ag.mapping[k] = ag.level
            events.append({"kind": "map", "agents": list(delta), "slot": ag.level})
            ag.level += 1
            if ag.level > n:
                raise InvariantBroken(f"agent {j}: expectation level rose past n={n}")
            continue
        delta = _min_meeting_subset(nf, v / 2)
        if len(delta) != 1:
            raise InvariantBroken(f"agent {j}: minimal meeting subset {delta} is not a single agent")
        k = delta[0]
        held = state.bundles[k]
        if len(held) != 1:
            raise InvariantBroken(f"agent {j}: over-valued bundle of agent {k} has {len(held)} items")
        slot = next(
            (s for s in range(1, ag.level) if ag.ref_bundles[s - 1] == held),
            None,
        )
        if slot is None:
            raise InvariantBroken(f"agent {j}: no reference singleton {held} below level {ag.level}")
        evicted = ag.group(slot)
        for e in evicted:
            ag.mapping[e] = F
        ag.mapping[k] = slot
        events.append({"kind": "swap", "agent": k, "slot": slot, "evicted": evicted})
    return events


def reference_partition(instance: Instance, i: int, source: str, cap: int | None = None) -> Partition:
    """Agent ``i``'s reference partition in claiming normal form, bundles sorted by value."""
    instance.require_network("bundle claiming")
    values = instance.values[i]
    if source == EXACT:
        part, _ = optimal_partition_exact(values, influence_vector(instance, i), cap)
    elif source == LPT:
        part = claiming_normal_form(values, lpt_partition(values, instance.n))
    else:
        raise ValueError(f"unknown partition source {source!r}")
    return part.sorted_bundles(values)


def initial_state(instance: Instance, source: str = EXACT, cap: int | None = None) -> ClaimState:
    agents = {}
    for i in range(instance.n):
        ref = reference_partition(instance, i, source, cap)
        agents[i] = AgentState(i, list(ref.bundles), ref.sorted_values(instance.values[i]))
    return ClaimState(instance, list(range(instance.n)), set(range(instance.m)), agents)


def _snapshot(state: ClaimState, i: int) -> dict:
    ag = state.agents[i]
    return {
        "level": ag.level,
        "mapping": {str(k): t for k, t in sorted(ag.mapping.items())},
        "F": ag.group(F),
    }


def _report_dict(rep: SatisfactionReport) -> dict:
    return {
        "ok": rep.ok,
        "failed": [f"{c.name}: {c.lhs} vs {c.rhs}" for c in rep.failures()],
    }


@dataclass(frozen=True)
class Trace:
    source: str
    reference_values: dict[int, tuple[Fraction, ...]]
    steps: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "reference_values": {str(i): [str(v) for v in vs] for i, vs in self.reference_values.items()},
            "steps": list(self.steps),
        }

    @property
    def invariants_ok(self) -> bool:
        return all(r["ok"] for step in self.steps for r in step["checks"].values())


def run_bc(
    instance: Instance,
    source: str = EXACT,
    cap: int | None = None,
    strict: bool = True,
) -> tuple[Allocation, Trace]:
    """Run Bundle Claiming and return the complete allocation with its trace.

    With ``strict`` every invariant check that fails raises
    :class:`InvariantBroken` on the spot; otherwise failures are only
    recorded in the trace.
    """
    instance.require_network("bundle claiming")
    state = initial_state(instance, source, cap)
    steps = []

    def run_checks() -> dict:
        out = {}
        for i in state.remaining:
            rep = check_external_satisfaction(state, i)
            if strict and not rep.ok:
                raise InvariantBroken(f"agent {i}: " + "; ".join(f"{c.name} {c.lhs} vs {c.rhs}" for c in rep.failures()))
            out[str(i)] = _report_dict(rep)
        return out

    steps.append({"step": 0, "checks": run_checks()})
    step = 0
    while state.remaining:
        step += 1
        candidates = {}
        for j in state.remaining:
            vals = {b: instance.values[j][b] for b in state.items}
            gamma = min_expectation_bundle(vals, state.agents[j].expectation)
            if gamma is None:
                raise InvariantBroken(f"agent {j}: remaining items cannot meet expectation")
            candidates[j] = gamma
        chosen = min(state.remaining, key=lambda j: (len(candidates[j]), j))
        bundle = candidates[chosen]
        chosen_level = state.agents[chosen].level
        state.remaining.remove(chosen)
        state.items.difference_update(bundle)
        state.bundles[chosen] = bundle
        state.satisfied.append(chosen)
        updates = {}
        for j in state.remaining:
            state.agents[j].mapping[chosen] = F
            updates[str(j)] = update_mapping(state, j)
        steps.append(
            {
                "step": step,
                "candidates": {str(j): list(g) for j, g in candidates.items()},
                "chosen": chosen,
                "chosen_level": chosen_level,
                "bundle": list(bundle),
                "updates": updates,
                "agents": {str(j): _snapshot(state, j) for j in state.remaining},
                "checks": run_checks(),
            }
        )

    last = state.satisfied[-1]
    leftovers = tuple(sorted(state.items))
    if leftovers:
        state.bundles[last] = tuple(sorted(state.bundles[last] + leftovers))
        steps[-1]["leftovers"] = list(leftovers)
    partition = Partition(tuple(state.bundles[i] for i in range(instance.n)))
    assignment = tuple(range(instance.n))
    allocation = Allocation(partition, assignment, utilities(instance, partition, assignment))
    trace = Trace(
        source,
        {i: tuple(ag.ref_values) for i, ag in state.agents.items()},
        tuple(steps),
    )
    return allocation, trace


def cut_and_choose(instance: Instance, cap: int | None = None) -> Allocation:
    """Two agents: the first cuts its EMMS-optimal partition, the second assigns it."""
    from .metrics import emms_partition

    if instance.n != 2:
        raise WrongAgentCount(f"cut and choose needs exactly 2 agents, got {instance.n}")
    cut, _ = emms_partition(instance, 0, cap)
    return extreme_allocation(instance, cut, 1, mode=BEST, method=ENUMERATE)


def guaranteed_bound(instance: Instance, i: int, reference_value: Fraction) -> Fraction:
    """Per-agent floor the claiming run promises: ``w_ii / 2`` times the reference worst value."""
    return instance.self_weight(i) * reference_value / 2
