"""Seeded random instances and sweep reports."""

from __future__ import annotations

import csv
import io
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .claiming import EXACT, LPT, cut_and_choose, run_bc
from .errors import BadConfig, InvariantBroken
from .instance import Instance, as_fraction, new_instance
from .metrics import emms

SCHEMA = "# emms-report schema=1"
COLUMNS = [
    "instance",
    "n",
    "m",
    "beta",
    "strategy",
    "agent",
    "self_weight",
    "emms",
    "utility",
    "ratio",
    "factor",
    "required",
    "passed",
    "invariants_ok",
]

BC_EXACT = "bc-exact"
BC_LPT = "bc-lpt"
CUT_AND_CHOOSE = "cut-and-choose"
STRATEGIES = (BC_EXACT, BC_LPT, CUT_AND_CHOOSE)


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    count: int = 100
    n_range: tuple[int, int] = (2, 4)
    m_range: tuple[int, int] = (4, 7)
    betas: tuple[Fraction, ...] = (Fraction(7, 10),)
    value_range: tuple[int, int] = (0, 20)
    strategies: tuple[str, ...] = (BC_EXACT,)
    alpha: Fraction | None = None
    cap: int | None = None
    weight_grain: int = 100

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(as_fraction(b) for b in self.betas))
        if self.alpha is not None:
            object.__setattr__(self, "alpha", as_fraction(self.alpha))
        if self.count < 0:
            raise BadConfig("count must be non-negative")
        if not self.betas or any(not 0 < b <= 1 for b in self.betas):
            raise BadConfig(f"every beta must lie in (0, 1], got {self.betas}")
        lo, hi = self.n_range
        if not 1 <= lo <= hi:
            raise BadConfig(f"bad n range {self.n_range}")
        mlo, mhi = self.m_range
        if not 0 <= mlo <= mhi or mhi < lo:
            raise BadConfig(f"bad m range {self.m_range}")
        vlo, vhi = self.value_range
        if not 0 <= vlo <= vhi:
            raise BadConfig(f"bad value range {self.value_range}")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise BadConfig(f"unknown strategy {s!r}")
        if self.weight_grain < 1:
            raise BadConfig("weight_grain must be positive")


def random_weights(rng: random.Random, n: int, beta: Fraction, grain: int = 100) -> list[list[Fraction]]:
    """Row-normalised incoming weights with every self weight at least ``beta``.

    The self weight is ``beta + (1 - beta) * k / grain``; the rest of the row
    is split in proportion to integer draws, so rows sum to 1 exactly.
    """
    rows = []
    for i in range(n):
        own = beta + (1 - beta) * Fraction(rng.randint(0, grain), grain)
        if n == 1:
            own = Fraction(1)
        draws = [rng.randint(0, grain) for _ in range(n - 1)]
        total = sum(draws)
        rest = 1 - own
        if total:
            others = [rest * d / total for d in draws]
        else:
            others = [rest / (n - 1)] * (n - 1) if n > 1 else []
        rows.append(others[:i] + [own] + others[i:])
    return rows


def generate_random(config: ExperimentConfig) -> Iterator[tuple[int, Fraction, Instance]]:
    """Yield ``(index, beta, instance)``; betas cycle through ``config.betas``.

    The item count is drawn from ``m_range`` but never below the agent count.
    """
    rng = random.Random(config.seed)
    for k in range(config.count):
        beta = config.betas[k % len(config.betas)]
        n = rng.randint(*config.n_range)
        m = rng.randint(max(config.m_range[0], n), max(config.m_range[1], n))
        values = [[rng.randint(*config.value_range) for _ in range(m)] for _ in range(n)]
        weights = random_weights(rng, n, beta, config.weight_grain)
        yield k, beta, new_instance(values, weights)


def strategy_factor(strategy: str) -> Fraction:
    return {BC_EXACT: Fraction(1, 2), BC_LPT: Fraction(1, 4), CUT_AND_CHOOSE: Fraction(1)}[strategy]


def allocate(instance: Instance, strategy: str, cap: int | None = None, strict: bool = False):
    """Run one strategy; returns ``(allocation, invariants_ok)``."""
    if strategy == CUT_AND_CHOOSE:
        return cut_and_choose(instance, cap), True
    source = EXACT if strategy == BC_EXACT else LPT
    allocation, trace = run_bc(instance, source, cap, strict=strict)
    return allocation, trace.invariants_ok


def _evaluate(job) -> list[list[str]]:
    config, k, beta, instance = job
    shares = [emms(instance, i, cap=config.cap) for i in range(instance.n)]
    rows = []
    for strategy in config.strategies:
        if strategy == CUT_AND_CHOOSE and instance.n != 2:
            continue
        try:
            allocation, inv_ok = allocate(instance, strategy, config.cap)
            utils = allocation.utilities
        except InvariantBroken:
            utils, inv_ok = None, False
        factor = strategy_factor(strategy) * (config.alpha if config.alpha is not None else beta)
        if strategy == CUT_AND_CHOOSE and config.alpha is None:
            factor = Fraction(1)
        for i in range(instance.n):
            u = utils[i] if utils is not None else None
            need = factor * shares[i]
            rows.append(
                [
                    str(k),
                    str(instance.n),
                    str(instance.m),
                    str(beta),
                    strategy,
                    str(i),
                    str(instance.self_weight(i)),
                    str(shares[i]),
                    "" if u is None else str(u),
                    "" if u is None or shares[i] == 0 else str(u / shares[i]),
                    str(factor),
                    str(need),
                    "1" if u is not None and u >= need else "0",
                    "1" if inv_ok else "0",
                ]
            )
    return rows


@dataclass
class ExperimentResult:
    rows: list[list[str]]
    summary: dict

    @property
    def ok(self) -> bool:
        return all(s["violations"] == 0 and s["invariant_failures"] == 0 for s in self.summary.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(SCHEMA + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(self.rows)
        return buf.getvalue()


def summarize(rows: list[list[str]], strategies) -> dict:
    col = {name: k for k, name in enumerate(COLUMNS)}
    out = {}
    for s in strategies:
        mine = [r for r in rows if r[col["strategy"]] == s]
        ratios = [Fraction(r[col["ratio"]]) for r in mine if r[col["ratio"]]]
        out[s] = {
            "rows": len(mine),
            "violations": sum(r[col["passed"]] == "0" for r in mine),
            "invariant_failures": len({r[col["instance"]] for r in mine if r[col["invariants_ok"]] == "0"}),
            "min_ratio": str(min(ratios)) if ratios else None,
            "median_ratio": str(statistics.median(ratios)) if ratios else None,
        }
    return out


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Evaluate every strategy on every generated instance.

    Rows come out ordered by ``(instance, strategy, agent)`` whatever ``jobs`` is.
    """
    work = [(config, k, beta, inst) for k, beta, inst in generate_random(config)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_evaluate, work, chunksize=8))
    else:
        chunks = [_evaluate(job) for job in work]
    rows = [r for chunk in chunks for r in chunk]
    return ExperimentResult(rows, summarize(rows, config.strategies))
