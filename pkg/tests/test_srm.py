import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import example, oracle_set, random_sr
from matchkit.doubling import double
from matchkit.errors import ContractViolation, InputError
from matchkit.marriage import Rotation, gale_shapley, rotation_poset
from matchkit.srm import SrmFailure, make_row_policy, rotation_through_row, srm

a, b, c, d, e, f = 1, 2, 3, 4, 5, 6


@pytest.mark.parametrize("i, expected", [(1, ((1, 3), (2, 4))), (2, ((1, 2), (3, 4)))])
def test_unique_solutions(i, expected):
    outcome, _ = srm(example(i))
    assert outcome.ok and outcome.matching.pairs == expected
    assert oracle_set(example(i)) == {expected}


def test_example2_trace_records_both_tables():
    _, trace = srm(example(2))
    assert trace.start_gaps_original.gaps == (2, 1, 2, 1)
    assert trace.start_gaps.table == "trimmed"
    assert [s.rotation for s in trace.steps] == [Rotation(((2, c), (4, a)))]


def test_example3_highest_policy_order():
    outcome, trace = srm(example(3), "highest")
    assert outcome.matching.pairs == ((1, 2), (3, 6), (4, 5))
    assert [s.rotation for s in trace.steps] == [
        Rotation(((1, f), (6, b), (3, e))),
        Rotation(((2, d), (4, c), (5, a))),
        Rotation(((2, c), (4, a), (6, e))),
    ]
    lowest, _ = srm(example(3))
    assert lowest.ok and lowest.matching.pairs in oracle_set(example(3))


def test_example4_fails_in_the_loop():
    outcome, trace = srm(example(4))
    assert outcome.failure is SrmFailure.NEGATIVE_GAP_DURING_LOOP and not outcome.ok
    last = trace.steps[-1]
    assert last.rotation == Rotation(((1, e), (5, c), (3, a)))
    assert [j for j, g in enumerate(last.gaps.gaps, 1) if g < 0] == [1, 3, 5]


def test_rotation_through_row():
    d2 = double(example(2))
    assert rotation_through_row(d2, gale_shapley(d2.inner), 2) == Rotation(((2, c), (4, a)))
    d6 = double(example(6))
    assert rotation_through_row(d6, gale_shapley(d6.inner), 8).short() == "(8,2)"
    d1 = double(example(1))
    with pytest.raises(ContractViolation):
        rotation_through_row(d1, gale_shapley(d1.inner), 1)


def test_row_policies():
    assert make_row_policy("lowest")([2, 5]) == 2
    assert make_row_policy("highest")([2, 5]) == 5
    assert make_row_policy(lambda rows: rows[-1])([2, 5]) == 5
    with pytest.raises(InputError):
        make_row_policy("middle")
    r1 = make_row_policy("random", seed=3)
    r2 = make_row_policy("random", seed=3)
    rows = list(range(1, 20))
    assert [r1(rows) for _ in range(10)] == [r2(rows) for _ in range(10)]


def test_random_policy_reads_environment(monkeypatch):
    monkeypatch.setenv("MATCHKIT_SEED", "11")
    rows = list(range(1, 50))
    got = [make_row_policy("random")(rows) for _ in range(3)]
    assert got == [make_row_policy("random", seed=11)(rows) for _ in range(3)]


@settings(max_examples=120, deadline=None)
@given(st.sampled_from([2, 4, 6, 8]), st.integers(0, 10**9))
def test_srm_properties(n, seed):
    inst = random_sr(n, random.Random(seed))
    truth = oracle_set(inst)
    outcome, trace = srm(inst)
    assert outcome.ok == bool(truth)
    if outcome.ok:
        assert outcome.matching.pairs in truth
    for policy in ("highest", "random"):
        assert srm(inst, policy, seed=seed)[0].ok == outcome.ok
    if trace.start_gaps is None:
        return
    # trimmed gaps start nonnegative and each step lowers exactly the touched rows
    assert not trace.start_gaps.has_negative
    prev = trace.start_gaps.gaps
    for step in trace.steps:
        men, women = set(step.rotation.men), set(step.rotation.women)
        expected = tuple(g - (j in men) - (j in women) for j, g in enumerate(prev, 1))
        assert step.gaps.gaps == expected
        prev = expected
    assert len(trace.steps) <= len(rotation_poset(double(inst).inner))
