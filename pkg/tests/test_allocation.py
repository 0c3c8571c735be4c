import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import general_instances, network_instances, partitions_of
from oracles import best_by_permutation, worst_by_permutation
from emms.allocation import (
    BEST,
    ENUMERATE,
    MATCHING,
    WORST,
    Partition,
    extreme_allocation,
    hungarian,
    utilities,
    worst_value_network,
    weighted_sorted_value,
)
from emms.errors import DimensionMismatch, EnumerationCapExceeded, GeneralFormUnsupported, NotABijection
from emms.fixtures import figure1_instance, figure1_partition
from emms.instance import new_instance
from emms.metrics import average_share, gap_instance
from emms.partitioning import lpt_partition


def test_figure1_utility():
    inst = figure1_instance()
    u = utilities(inst, figure1_partition(), range(5))
    assert u[0] == 9


def test_single_agent_utility():
    inst = new_instance([[2, 3]], [[1]])
    assert utilities(inst, Partition(((0, 1),)), [0]) == (5,)


def test_no_externality_utility_is_own_bundle():
    inst = new_instance([[2, 3, 4], [1, 1, 1]], [[1, 0], [0, 1]])
    part = Partition(((0, 2), (1,)))
    assert utilities(inst, part, [1, 0]) == (3, 2)


def test_not_a_bijection():
    inst = new_instance([[2, 3], [1, 1]], [[1, 0], [0, 1]])
    with pytest.raises(NotABijection):
        utilities(inst, Partition(((0,), (1,))), [0, 0])


def test_bad_partition_rejected():
    inst = new_instance([[2, 3], [1, 1]], [[1, 0], [0, 1]])
    with pytest.raises(DimensionMismatch):
        utilities(inst, Partition(((0,), (0, 1))), [0, 1])


def test_unique_allocation_for_one_agent():
    inst = new_instance([[2, 3]], [[1]])
    alloc = extreme_allocation(inst, Partition(((0, 1),)), 0)
    assert alloc.assignment == (0,)


def test_two_bundle_worst_gives_small_bundle():
    inst = new_instance([[3, 1], [0, 0]], [[1, 0], [0, 1]])
    part = Partition(((0,), (1,)))
    alloc = extreme_allocation(inst, part, 0, WORST, MATCHING)
    assert alloc.assignment == (1, 0)
    assert alloc.utilities[0] == 1


def test_gap_instance_worst_value():
    inst = gap_instance(10, "0.1")
    part = Partition(((0,), (1,), (2,)))
    for method in (MATCHING, ENUMERATE):
        assert extreme_allocation(inst, part, 0, WORST, method).utilities[0] == Fraction(104, 5)
    assert worst_value_network(inst, part, 0) == Fraction(104, 5)


def test_closed_form_examples():
    assert weighted_sorted_value([Fraction(1, 5), Fraction(4, 5)], [5, 5]) == 5
    x = [Fraction(1, 10), Fraction(1, 10), Fraction(4, 5)]
    assert weighted_sorted_value(x, [100, 100, 1]) == Fraction(104, 5)


def test_equal_bundles_give_common_value():
    inst = figure1_instance()
    values = [[2] * 5 for _ in range(5)]
    inst = new_instance(values, inst.weights)
    for i in range(5):
        assert worst_value_network(inst, figure1_partition(), i) == 2


def test_enumeration_cap():
    inst = new_instance([[1]] * 3, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    part = Partition(((0,), (), ()))
    with pytest.raises(EnumerationCapExceeded):
        extreme_allocation(inst, part, 0, method=ENUMERATE, cap=2)


def test_worst_value_network_rejects_general():
    inst = new_instance(None, cross_values=[[[1]]])
    with pytest.raises(GeneralFormUnsupported):
        worst_value_network(inst, Partition(((0,),)), 0)


def test_hungarian_small():
    cost = [[Fraction(4), Fraction(1), Fraction(3)], [Fraction(2), Fraction(0), Fraction(5)], [Fraction(3), Fraction(2), Fraction(2)]]
    total, cols = hungarian(cost)
    brute = min(sum(cost[r][p[r]] for r in range(3)) for p in itertools.permutations(range(3)))
    assert total == brute == 5
    assert sum(cost[r][cols[r]] for r in range(3)) == total


@st.composite
def instance_and_partition(draw, gen):
    inst = draw(gen)
    part = draw(partitions_of(inst.m, inst.n))
    return inst, part


@given(instance_and_partition(network_instances(n_max=5, m_max=6)))
def test_three_routes_to_worst_value_agree(case):
    inst, part = case
    for i in range(inst.n):
        by_enum = extreme_allocation(inst, part, i, WORST, ENUMERATE)
        by_match = extreme_allocation(inst, part, i, WORST, MATCHING)
        closed = worst_value_network(inst, part, i)
        oracle = worst_by_permutation(inst.values, inst.weights, None, part.bundles, i)
        assert by_enum.utilities[i] == by_match.utilities[i] == closed == oracle
        assert by_enum.assignment == by_match.assignment


@given(instance_and_partition(general_instances(n_max=5, m_max=5)))
def test_matching_equals_enumeration_general(case):
    inst, part = case
    for i in range(inst.n):
        for mode, oracle in ((WORST, worst_by_permutation), (BEST, best_by_permutation)):
            a = extreme_allocation(inst, part, i, mode, ENUMERATE)
            b = extreme_allocation(inst, part, i, mode, MATCHING)
            assert a.utilities[i] == b.utilities[i] == oracle(inst.values, None, inst.cross_values, part.bundles, i)
            assert a.assignment == b.assignment


@given(instance_and_partition(network_instances(n_max=4, m_max=5)))
def test_every_bijection_between_worst_and_best(case):
    inst, part = case
    for i in range(inst.n):
        lo = extreme_allocation(inst, part, i, WORST).utilities[i]
        hi = extreme_allocation(inst, part, i, BEST).utilities[i]
        for perm in itertools.permutations(range(inst.n)):
            assert lo <= utilities(inst, part, perm)[i] <= hi
        assert average_share(inst, i) <= hi


@given(instance_and_partition(network_instances(n_max=5, m_max=6)))
def test_tail_sum_bounded_by_kth_bundle(case):
    inst, part = case
    from emms.instance import influence_vector

    for i in range(inst.n):
        x = influence_vector(inst, i)
        v = part.sorted_values(inst.values[i])
        for k in range(inst.n):
            assert sum(x[j] * v[j] for j in range(k, inst.n)) <= v[k]


def test_lpt_partition_is_valid_partition():
    part = lpt_partition([3, 1, 4, 1, 5], 3)
    part.check(5, 3)
