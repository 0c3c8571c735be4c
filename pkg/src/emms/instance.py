"""Problem instances for the general and network externalities models.

Orientation used everywhere in this package:

* ``values[i][b]``            value of item ``b`` to agent ``i``.
* ``weights[i][j]``           influence of agent ``j`` on agent ``i`` (``w_{j,i}``).
  Each row holds the incoming weights of one observer and sums to 1.
* ``cross_values[i][j][b]``   value agent ``i`` derives from item ``b``
  when it is given to agent ``j`` (``V_{j,i}({b})``), general model only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatch,
    GeneralFormUnsupported,
    NegativeValue,
    UnnormalizedWeights,
)

NETWORK = "network"
GENERAL = "general"


def as_fraction(x) -> Fraction:
    """Coerce ints, decimal strings, ``"p/q"`` strings and floats to an exact rational.

    Floats go through their shortest repr, so ``0.2`` becomes ``1/5``.

    >>> as_fraction("0.25"), as_fraction("3/4"), as_fraction(0.2)
    (Fraction(1, 4), Fraction(3, 4), Fraction(1, 5))
    """
    if isinstance(x, bool):
        raise TypeError(f"not a rational: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not a rational: {x!r}")


def _matrix(rows, what: str) -> tuple[tuple[Fraction, ...], ...]:
    try:
        return tuple(tuple(as_fraction(v) for v in row) for row in rows)
    except TypeError as exc:
        raise DimensionMismatch(f"{what}: {exc}") from None


@dataclass(frozen=True)
class Instance:
    values: tuple[tuple[Fraction, ...], ...]
    weights: tuple[tuple[Fraction, ...], ...] | None = None
    cross_values: tuple[tuple[tuple[Fraction, ...], ...], ...] | None = None

    def __post_init__(self):
        values = _matrix(self.values, "values")
        object.__setattr__(self, "values", values)
        n = len(values)
        if n == 0:
            raise DimensionMismatch("need at least one agent")
        m = len(values[0])
        for i, row in enumerate(values):
            if len(row) != m:
                raise DimensionMismatch(f"values row {i} has {len(row)} entries, expected {m}")
            for b, v in enumerate(row):
                if v < 0:
                    raise NegativeValue(f"values[{i}][{b}] = {v}")

        if (self.weights is None) == (self.cross_values is None):
            raise DimensionMismatch("give exactly one of weights (network) or cross_values (general)")

        if self.weights is not None:
            weights = _matrix(self.weights, "weights")
            if len(weights) != n:
                raise DimensionMismatch(f"weights has {len(weights)} rows, expected {n}")
            for i, row in enumerate(weights):
                if len(row) != n:
                    raise DimensionMismatch(f"weights row {i} has {len(row)} entries, expected {n}")
                for j, w in enumerate(row):
                    if w < 0:
                        raise NegativeValue(f"weights[{i}][{j}] = {w}")
                if sum(row) != 1:
                    raise UnnormalizedWeights(f"incoming weights of agent {i} sum to {sum(row)}, not 1")
            object.__setattr__(self, "weights", weights)
        else:
            cross = tuple(_matrix(block, f"cross_values[{i}]") for i, block in enumerate(self.cross_values))
            if len(cross) != n:
                raise DimensionMismatch(f"cross_values has {len(cross)} observers, expected {n}")
            for i, block in enumerate(cross):
                if len(block) != n:
                    raise DimensionMismatch(f"cross_values[{i}] has {len(block)} givers, expected {n}")
                for j, row in enumerate(block):
                    if len(row) != m:
                        raise DimensionMismatch(f"cross_values[{i}][{j}] has {len(row)} items, expected {m}")
                    for b, v in enumerate(row):
                        if v < 0:
                            raise NegativeValue(f"cross_values[{i}][{j}][{b}] = {v}")
            object.__setattr__(self, "cross_values", cross)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.values[0])

    @property
    def model(self) -> str:
        return NETWORK if self.weights is not None else GENERAL

    @property
    def is_network(self) -> bool:
        return self.weights is not None

    def require_network(self, what: str = "this operation") -> None:
        if not self.is_network:
            raise GeneralFormUnsupported(f"{what} is only defined for the network model")

    def weight(self, giver: int, observer: int) -> Fraction:
        self.require_network("weight")
        return self.weights[observer][giver]

    def self_weight(self, i: int) -> Fraction:
        return self.weight(i, i)

    def item_value(self, giver: int, observer: int, b: int) -> Fraction:
        """Value to ``observer`` of item ``b`` when given to ``giver``."""
        if self.weights is not None:
            return self.weights[observer][giver] * self.values[observer][b]
        return self.cross_values[observer][giver][b]

    def value(self, i: int, bundle: Iterable[int]) -> Fraction:
        """Plain valuation ``V_i(S)`` with no externality weighting."""
        row = self.values[i]
        return sum((row[b] for b in bundle), Fraction(0))

    def to_general(self) -> "Instance":
        """Equivalent general-form instance (``V_{j,i}({b}) = w_{j,i} V_i({b})``)."""
        if not self.is_network:
            return self
        cross = [
            [[self.weights[i][j] * v for v in self.values[i]] for j in range(self.n)]
            for i in range(self.n)
        ]
        return Instance(self.values, cross_values=cross)


def new_instance(
    values: Sequence[Sequence],
    weights: Sequence[Sequence] | None = None,
    cross_values: Sequence[Sequence[Sequence]] | None = None,
) -> Instance:
    """Build and validate an instance.

    With ``cross_values`` and no ``values``, pass ``values=None`` and the
    diagonal ``V_{i,i}`` is used as each agent's plain valuation.
    """
    if values is None:
        if cross_values is None:
            raise DimensionMismatch("values are required for the network model")
        values = [cross_values[i][i] for i in range(len(cross_values))]
    return Instance(values, weights=weights, cross_values=cross_values)


def influence_vector(instance: Instance, i: int) -> tuple[Fraction, ...]:
    """Incoming weights of agent ``i`` in non-decreasing order."""
    instance.require_network("influence_vector")
    return tuple(sorted(instance.weights[i]))


def bundle_value(instance: Instance, giver: int, observer: int, bundle: Iterable[int]) -> Fraction:
    """Additive value to ``observer`` of ``bundle`` held by ``giver``."""
    return sum((instance.item_value(giver, observer, b) for b in bundle), Fraction(0))


def is_self_reliant(instance: Instance, i: int, beta) -> bool:
    return instance.self_weight(i) >= as_fraction(beta)
