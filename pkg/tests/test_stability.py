from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from fairdiv import (
    BudgetExceeded,
    NeighborSpec,
    audit_stability,
    check_equiv_stability,
    enumerate_neighbors,
    generate_equivalent,
    is_ordinally_equivalent,
    make_instance,
)
from fairdiv.stability import l1_distance, same_singleton_order
from fairdiv.tables import table2a, table3a
from strategies import instances


def test_neighbor_examples():
    assert enumerate_neighbors(table2a(), NeighborSpec(0, 4)) == [(997, 3), (998, 2), (999, 1)]
    tie = make_instance([[2, 2], [1, 3]])
    assert enumerate_neighbors(tie, NeighborSpec(0, 2)) == [(2, 2)]
    assert enumerate_neighbors(table3a(), NeighborSpec(1, 1)) == [(3, 2, 2, 2)]


def test_neighbor_examples_match_oracle():
    assert oracles.neighbors((999, 1), 4) == [(997, 3), (998, 2), (999, 1)]
    assert oracles.neighbors((2, 2), 2) == [(2, 2)]


def test_neighbor_spec_validation():
    for kwargs in ({"alpha": 0}, {"alpha": 2, "mode": "greedy"}, {"alpha": 2, "samples": 0}, {"alpha": 2, "floor": 0}):
        with pytest.raises(ValueError):
            NeighborSpec(agent=0, **kwargs)
    with pytest.raises(IndexError):
        enumerate_neighbors(table2a(), NeighborSpec(2, 4))


def test_neighbor_budget(monkeypatch):
    monkeypatch.setenv("FAIRDIV_BUDGET", "2")
    with pytest.raises(BudgetExceeded):
        enumerate_neighbors(table2a(), NeighborSpec(0, 4))


def test_any_order_mode_allows_crossing():
    inst = make_instance([[3, 2], [1, 4]])
    strict = enumerate_neighbors(inst, NeighborSpec(0, 2))
    loose = enumerate_neighbors(inst, NeighborSpec(0, 2, ordinal=False))
    assert strict == [(3, 2), (4, 1)]
    assert loose == [(2, 3), (3, 2), (4, 1)]


def test_sample_mode_is_seeded_subset():
    inst = make_instance([[10, 6, 4, 3, 2], [5, 5, 5, 5, 5]])
    full = set(enumerate_neighbors(inst, NeighborSpec(0, 6)))
    spec = NeighborSpec(0, 6, mode="sample", samples=10, seed=3)
    first = enumerate_neighbors(inst, spec)
    assert first == enumerate_neighbors(inst, spec)
    assert set(first) <= full and (10, 6, 4, 3, 2) in first
    assert first == sorted(first)


@settings(max_examples=60, deadline=None)
@given(instances(max_n=2, max_m=4, max_total=16), st.integers(1, 6), st.booleans())
def test_neighbors_match_oracle(inst, alpha, ordinal):
    spec = NeighborSpec(0, alpha, ordinal=ordinal)
    assert enumerate_neighbors(inst, spec) == oracles.neighbors(inst.values[0], alpha, ordinal=ordinal)


@settings(max_examples=40, deadline=None)
@given(instances(max_n=2, max_m=5, max_total=30), st.integers(1, 6))
def test_neighbor_monotone_in_alpha(inst, alpha):
    small = set(enumerate_neighbors(inst, NeighborSpec(1, alpha)))
    large = set(enumerate_neighbors(inst, NeighborSpec(1, alpha + 2)))
    assert small <= large
    assert inst.values[1] in small


def test_ordinal_equivalence_examples():
    assert is_ordinally_equivalent((3, 1), (6, 2))
    assert not is_ordinally_equivalent((5, 3, 1), (5, 4, 1))
    assert is_ordinally_equivalent((5, 3, 1), (5, 3, 1))
    with pytest.raises(ValueError):
        is_ordinally_equivalent((1, 2), (1, 2, 3))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=4), st.lists(st.integers(1, 6), min_size=4, max_size=4))
def test_ordinal_equivalence_matches_oracle(a, b):
    b = b[: len(a)]
    assert is_ordinally_equivalent(a, b) == oracles.same_bundle_order(a, b)


def test_same_singleton_order():
    assert same_singleton_order((3, 2, 2), (5, 1, 1))
    assert not same_singleton_order((3, 2, 2), (5, 2, 1))


def test_generate_equivalent_examples():
    sample = generate_equivalent(table2a(), 0, 3, seed=1)
    assert sample.rows[0] == (999, 1)
    assert len(sample.rows) == 3
    assert all(sum(r) == 1000 and r[0] > r[1] for r in sample.rows)
    tie = generate_equivalent(make_instance([[2, 2], [1, 3]]), 0, 5)
    assert tie.rows == [(2, 2)]
    assert tie.attempts > 0


def test_generate_equivalent_is_seeded():
    inst = make_instance([[9, 5, 3, 2, 1], [4, 4, 4, 4, 4]])
    a = generate_equivalent(inst, 0, 10, seed=5)
    assert a == generate_equivalent(inst, 0, 10, seed=5)
    assert len(set(a.rows)) == len(a.rows)
    for row in a.rows:
        assert sum(row) == 20 and oracles.same_bundle_order(inst.values[0], row)


def test_audit_leximin_table2a():
    report = audit_stability("leximin", table2a(), NeighborSpec(0, 4))
    assert report.worst_low_ratio == Fraction(1, 999)
    assert report.low_witness.report == (997, 3)
    assert report.epsilon == 999
    assert report.neighbor_count == 3
    assert not report.exact_stable


@pytest.mark.parametrize("algo", ["rank-leximin", "modified:leximin", "draft"])
def test_audit_stable_on_table2a(algo):
    report = audit_stability(algo, table2a(), NeighborSpec(0, 4))
    assert report.epsilon == 1 and report.exact_stable


def test_audit_parallel_matches_serial():
    inst = make_instance([[10, 6, 4, 3, 2], [2, 3, 4, 6, 10]])
    spec = NeighborSpec(0, 6)
    serial = audit_stability("leximin", inst, spec)
    parallel = audit_stability("leximin", inst, spec, jobs=2)
    assert [o.allocation for o in serial.outcomes] == [o.allocation for o in parallel.outcomes]
    assert serial.epsilon == parallel.epsilon


def test_audit_zero_truthful_utility_is_unbounded():
    # three identical agents, two goods: agent 0 gets nothing from leximin
    inst = make_instance([[1, 1], [1, 1], [1, 1]])
    report = audit_stability("leximin", inst, NeighborSpec(0, 2))
    assert report.truthful_utility == 0
    assert report.unbounded and report.epsilon is None
    assert report.to_json()["epsilon"] == "unbounded"


@settings(max_examples=30, deadline=None)
@given(instances(max_n=2, min_m=2, max_m=4, max_total=20), st.integers(1, 6))
def test_report_invariants(inst, alpha):
    report = audit_stability("mnw", inst, NeighborSpec(0, alpha))
    if report.unbounded:
        return
    assert report.worst_low_ratio <= 1 <= report.worst_high_ratio
    assert report.epsilon >= 1
    assert report.exact_stable == (report.epsilon == 1)
    for o in report.outcomes:
        assert o.distance == l1_distance(inst.values[0], o.report) <= alpha


def test_report_json_shape():
    doc = audit_stability("leximin", table2a(), NeighborSpec(0, 4)).to_json()
    assert doc["worst_low_ratio"]["num"] == 1 and doc["worst_low_ratio"]["den"] == 999
    assert doc["witnesses"]["low"]["report"] == [997, 3]
    assert doc["epsilon"]["decimal"] == "999"


def test_equiv_stability_examples():
    assert check_equiv_stability("rank-leximin", table2a(), 0).stable
    # (997, 3) orders every bundle like (999, 1), yet leximin hands agent A the small good
    lex = check_equiv_stability("leximin", table2a(), 0)
    assert not lex.stable
    assert all(v["allocation"] == [[1], [0]] and v["true_utility"] == 1 for v in lex.violations)
    assert is_ordinally_equivalent((999, 1), (997, 3))
    trivial = check_equiv_stability("mnw", make_instance([[2, 2], [1, 3]]), 0)
    assert trivial.stable and trivial.reports_tested == 1


@settings(max_examples=30, deadline=None)
@given(instances(max_n=2, min_m=2, max_m=5, max_total=40))
def test_draft_exactly_stable(inst):
    for agent in range(2):
        assert audit_stability("draft", inst, NeighborSpec(agent, max(1, inst.total // 3))).exact_stable
