import bisect
import functools

import pytest
from hypothesis import given, settings

import oracles
from fairdiv import (
    Allocation,
    Ordering,
    build_rank_table,
    make_instance,
    mask_of,
    rank,
    rank_leximin_allocate,
    rank_leximin_cmp,
    rank_tables,
    rank_vector,
)
from fairdiv.errors import BudgetExceeded
from fairdiv.model import enumerate_allocations, submasks
from fairdiv.tables import table2a, table2b
from strategies import instances


def _two(row_a, row_b=None):
    return make_instance([row_a, row_b or row_a])


def test_rank_table_examples():
    # oracle: the four subsets of {g1, g2}
    assert oracles.value((3, 1), []) == 0
    expected = sorted(oracles.value((3, 1), s) for s in oracles.powerset(range(2)))
    assert expected == [0, 1, 3, 4]
    assert build_rank_table(_two((3, 1)), 0).sorted_values == (0, 1, 3, 4)
    assert build_rank_table(_two((2, 2)), 0).sorted_values == (0, 2, 2, 4)
    assert build_rank_table(_two((2, 2)), 0, 0).sorted_values == (0,)


def test_rank_examples():
    assert oracles.rank((3, 1), range(2), {1}) == 2
    assert rank(build_rank_table(_two((3, 1)), 0), mask_of([1])) == 2
    assert oracles.rank((2, 2), range(2), {0}) == 3
    assert rank(build_rank_table(_two((2, 2)), 0), mask_of([0])) == 3
    table = build_rank_table(_two((5, 3, 1)), 0)
    assert rank(table, 0b111) == 8


def test_rank_outside_ground():
    table = build_rank_table(_two((3, 1)), 0, mask_of([0]))
    with pytest.raises(ValueError):
        rank(table, mask_of([1]))


def test_rank_table_budget(monkeypatch):
    monkeypatch.setattr("fairdiv.ranks.RANK_TABLE_BUDGET", 4)
    with pytest.raises(BudgetExceeded):
        build_rank_table(_two((1, 1, 1)), 0)


def test_cmp_examples_table2a():
    inst = table2a()
    tables = rank_tables(inst)
    a = Allocation.from_lists([[0], [1]], 2)
    b = Allocation.from_lists([[1], [0]], 2)
    empty = Allocation.from_lists([[], [0, 1]], 2)
    assert rank_vector(a, tables).sorted_ranks == (2, 3)
    assert rank_vector(b, tables).sorted_ranks == (2, 3)
    assert rank_leximin_cmp(a, b, tables) is Ordering.EQUIVALENT
    assert rank_leximin_cmp(empty, a, tables) is Ordering.PRECEDES
    assert rank_leximin_cmp(a, empty, tables) is Ordering.FOLLOWS
    assert rank_leximin_cmp(a, a, tables) is Ordering.EQUIVALENT


def test_rank_vector_order_ties_by_agent_index():
    inst = make_instance([[1, 1, 1], [1, 1, 1], [1, 1, 1]])
    vec = rank_vector(Allocation.from_lists([[0], [1], [2]], 3), rank_tables(inst))
    assert vec.order == (0, 1, 2)


def test_allocate_examples():
    assert rank_leximin_allocate(table2a()).to_lists() == [[0], [1]]
    assert rank_leximin_allocate(table2b()).to_lists() == [[0], [1]]
    single = make_instance([[5], [5]])
    assert rank_leximin_allocate(single).to_lists() == [[], [0]]


def _cmp_oracle_choice(inst):
    """Algorithm as written: sort every allocation with the comparator, keep the maximal block."""
    tables = rank_tables(inst)
    allocs = list(enumerate_allocations(inst))
    ordered = sorted(allocs, key=functools.cmp_to_key(lambda p, t: rank_leximin_cmp(p, t, tables)))
    top = ordered[-1]
    block = [a for a in allocs if rank_leximin_cmp(a, top, tables) is Ordering.EQUIVALENT]
    return min(block, key=lambda a: a.bundles)


@settings(max_examples=80, deadline=None)
@given(instances(max_n=3, max_m=4))
def test_allocate_matches_comparator_sort(inst):
    assert rank_leximin_allocate(inst) == _cmp_oracle_choice(inst)


@settings(max_examples=60, deadline=None)
@given(instances(max_n=3, max_m=4))
def test_allocate_matches_bruteforce_ranks(inst):
    got = rank_leximin_allocate(inst)
    optima = oracles.rank_leximin_optima(inst.values)
    expected = min(optima, key=oracles.mask_tuple)
    assert got.bundles == oracles.mask_tuple(expected)


@settings(max_examples=100, deadline=None)
@given(instances(max_n=2, max_m=5))
def test_rank_table_invariants(inst):
    table = build_rank_table(inst, 0)
    vals = table.sorted_values
    assert len(vals) == 2**inst.m
    assert list(vals) == sorted(vals)
    assert vals[0] == 0 and vals[-1] == inst.total
    for s in range(2**inst.m):
        assert rank(table, s) == oracles.rank(inst.values[0], range(inst.m), set(oracles_goods(s)))


def oracles_goods(mask):
    return [g for g in range(mask.bit_length()) if mask >> g & 1]


@settings(max_examples=100, deadline=None)
@given(instances(max_n=2, max_m=5))
def test_rank_matches_bisect_of_sorted_values(inst):
    table = build_rank_table(inst, 1)
    sums = inst.sums(1)
    for s in range(2**inst.m):
        assert rank(table, s) == bisect.bisect_right(sorted(sums), sums[s])


@settings(max_examples=40, deadline=None)
@given(instances(max_n=2, min_m=1, max_m=5))
def test_rank_over_subground(inst):
    ground = inst.full & 0b10110
    table = build_rank_table(inst, 0, ground)
    for s in submasks(ground):
        assert rank(table, s) == oracles.rank(inst.values[0], oracles_goods(ground), oracles_goods(s))
