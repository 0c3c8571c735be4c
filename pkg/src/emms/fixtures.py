"""Small hand-made instances used by the tests and the CLI demos."""

from __future__ import annotations

from .allocation import Partition
from .instance import Instance, new_instance


def figure1_instance() -> Instance:
    """Five-agent influence graph.

    Agent 0 keeps 0.8 of its weight and takes 0.2 from agent 1.  Agents 3
    and 4 have sorted incoming weights ``[0, 0, 0.1, 0.4, 0.5]`` and
    ``[0, 0, 0.2, 0.25, 0.55]``.  Only those three rows are pinned; the rows
    of agents 1 and 2, the placement of agent 3's self weight, and all item
    values are filler.
    """
    weights = [
        ["0.8", "0.2", "0", "0", "0"],
        ["0.3", "0.7", "0", "0", "0"],
        ["0", "0.1", "0.9", "0", "0"],
        ["0", "0", "0.4", "0.5", "0.1"],
        ["0", "0", "0.2", "0.25", "0.55"],
    ]
    values = [
        [10, 5, 3, 2, 1],
        [1, 2, 3, 4, 5],
        [4, 4, 4, 4, 4],
        [6, 0, 2, 7, 1],
        [3, 9, 1, 1, 2],
    ]
    return new_instance(values, weights)


def figure1_partition() -> Partition:
    """One item per agent: bundle ``k`` is ``{k}``."""
    return Partition(tuple((k,) for k in range(5)))


def symmetric_pair() -> Instance:
    """Two agents valuing items ``[4, 3, 2, 1]``, self weight 0.8, cross weight 0.2."""
    return new_instance([[4, 3, 2, 1]] * 2, [["0.8", "0.2"], ["0.2", "0.8"]])
