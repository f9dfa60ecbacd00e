import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import example, random_smi, random_sr
from matchkit.core import MarriageInstance, Matching, is_stable
from matchkit.dag import linear_extensions_sample
from matchkit.doubling import double
from matchkit.errors import ContractViolation
from matchkit.marriage import (Rotation, closed_subsets, eliminate, exposed_rotations, gale_shapley, matching_of,
                               rotation_poset, stable_matchings, stable_pairs, subset_of, trim)
from matchkit.oracle import brute_force_sm

a, b, c, d = 1, 2, 3, 4


def test_gs_examples():
    assert gale_shapley(double(example(1)).inner).pairs == ((1, c), (2, d), (3, a), (4, b))
    assert gale_shapley(double(example(2)).inner).pairs == ((1, b), (2, c), (3, d), (4, a))
    assert gale_shapley(double(example(6)).inner).wife == (8, 4, 5, 9, 7, 2, 1, 10, 6, 3)


def test_gs_incomplete_lists_leave_agents_single():
    inst = MarriageInstance([[1], [1], []], [[2, 1]])
    m = gale_shapley(inst)
    assert m.wife == (0, 1, 0)
    assert gale_shapley(inst, "woman").wife == (0, 1, 0)


def test_rotation_poset_sizes():
    assert len(rotation_poset(double(example(5)).inner)) == 12
    assert len(rotation_poset(double(example(1)).inner)) == 0
    p6 = rotation_poset(double(example(6)).inner)
    shorts = {p6[r].short() for r in p6.ids}
    assert {"(8,2)", "(2,3,6)"} <= shorts


def test_exposed_rotations_example2():
    inner = double(example(2)).inner
    m0 = gale_shapley(inner)
    assert exposed_rotations(inner, m0) == [Rotation(((2, c), (4, a)))]
    assert exposed_rotations(inner, gale_shapley(inner, "woman")) == []


def test_exposed_rotations_example6_top():
    # (2,3,6) waits behind (8,2); it is exposed right after (8,2) is eliminated
    inner = double(example(6)).inner
    m0 = gale_shapley(inner)
    top = exposed_rotations(inner, m0)
    assert [r.short() for r in top] == ["(8,2)"]
    after = exposed_rotations(inner, eliminate(m0, top[0], inner))
    assert "(2,3,6)" in [r.short() for r in after]


def test_exposed_rotations_rejects_unstable():
    inner = double(example(2)).inner
    with pytest.raises(ContractViolation):
        exposed_rotations(inner, Matching((2, 4, 1, 3), 4))


def test_eliminate_example2():
    inner = double(example(2)).inner
    m = eliminate(gale_shapley(inner), Rotation(((2, c), (4, a))), inner)
    assert m.pairs == ((1, b), (2, a), (3, d), (4, c))
    with pytest.raises(ContractViolation):
        eliminate(m, Rotation(((2, c), (4, a))), inner)


def test_first_layer_of_example6():
    p6 = rotation_poset(double(example(6)).inner)
    first = [p6.find([8, 2]), p6.find([2, 3, 6])]
    assert matching_of(p6, first).wife == (3, 4, 5, 9, 7, 8, 1, 10, 2, 6)
    assert matching_of(p6, []) == p6.base


def test_matching_of_rejects_open_subset():
    p6 = rotation_poset(double(example(6)).inner)
    with pytest.raises(ContractViolation):
        matching_of(p6, [p6.find([2, 3, 6])])


def test_stable_pairs():
    p2 = rotation_poset(double(example(2)).inner)
    assert sorted(w for m, w in stable_pairs(p2) if m == 1) == [b, d]
    oracle = brute_force_sm(double(example(2)).inner)
    assert {w for s in oracle.all_stable for m, w in s.pairs if m == 1} == {b, d}
    p6 = rotation_poset(double(example(6)).inner)
    assert sorted(w for m, w in stable_pairs(p6) if m == 7) == [1, 5]
    p1 = rotation_poset(double(example(1)).inner)
    assert stable_pairs(p1) == frozenset(p1.base.pairs)


def test_trim_example6_row7():
    inner = double(example(6)).inner
    t = trim(inner, rotation_poset(inner))
    assert t.men_prefs[6] == (1, 5)


def test_trim_zero_rotation_instance_keeps_only_m0():
    inner = double(example(1)).inner
    p = rotation_poset(inner)
    t = trim(inner, p)
    oracle = brute_force_sm(inner)
    stable = {pair for s in oracle.all_stable for pair in s.pairs}
    assert {(m, w) for m, row in enumerate(t.men_prefs, 1) for w in row} == stable
    assert all(len(row) == 1 for row in t.men_prefs)


def test_closed_subsets_counts():
    p5 = rotation_poset(double(example(5)).inner)
    assert sum(1 for _ in closed_subsets(p5)) == 42
    empty = rotation_poset(double(example(1)).inner)
    assert list(closed_subsets(empty)) == [frozenset()]


def _doubled_or_smi(seed: int):
    rng = random.Random(seed)
    if rng.random() < 0.5:
        return double(random_sr(rng.choice([2, 4, 6]), rng)).inner
    return random_smi(rng.randint(1, 6), rng.randint(1, 6), rng)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9))
def test_lattice_properties(seed):
    inst = _doubled_or_smi(seed)
    oracle = brute_force_sm(inst).all_stable
    m0 = gale_shapley(inst)
    mz = gale_shapley(inst, "woman")
    assert is_stable(inst, m0) and is_stable(inst, mz)
    mr, wr = inst.men_rank, inst.women_rank
    matched = {m for m, _ in m0.pairs}
    for s in oracle:
        assert {m for m, _ in s.pairs} == matched
        for m in range(1, inst.n_men + 1):
            assert mr[m][m0.wife[m - 1]] <= mr[m][s.wife[m - 1]] <= mr[m][mz.wife[m - 1]]
    p = rotation_poset(inst)
    produced = list(stable_matchings(p))
    assert len(produced) == len(set(produced)) == len(oracle)
    assert set(produced) == set(oracle)
    for s in closed_subsets(p):
        assert subset_of(p, matching_of(p, s)) == s


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_elimination_monotone_and_order_free(seed):
    rng = random.Random(seed)
    inst = _doubled_or_smi(seed)
    p = rotation_poset(inst)
    mr, wr = inst.men_rank, inst.women_rank
    for s in list(closed_subsets(p))[:20]:
        m = matching_of(p, s)
        for rot in exposed_rotations(inst, m):
            after = eliminate(m, rot, inst)
            assert is_stable(inst, after)
            moved = set(rot.men)
            for x in range(1, inst.n_men + 1):
                if x in moved:
                    assert mr[x][after.wife[x - 1]] > mr[x][m.wife[x - 1]]
                else:
                    assert after.wife[x - 1] == m.wife[x - 1]
            for w in rot.women:
                assert wr[w][after.husband[w - 1]] < wr[w][m.husband[w - 1]]
        # the same subset reached along three random linear extensions
        for _ in range(3):
            order = linear_extensions_sample(p.order, list(s), rng)
            wife = list(p.base.wife)
            for rid in order:
                for man, old, new in p[rid].moves():
                    assert wife[man - 1] == old
                    wife[man - 1] = new
            assert tuple(wife) == m.wife
