import random

import pytest

from helpers import example, random_smi, random_sr
from matchkit.core import MarriageInstance, RoommateInstance, is_stable
from matchkit.doubling import double
from matchkit.errors import OracleBoundExceeded
from matchkit.marriage import rotation_poset
from matchkit.oracle import brute_force_sm, brute_force_sp, brute_force_sr


@pytest.mark.parametrize("i, count", [(1, 1), (2, 1), (3, 2), (4, 0), (5, 6), (6, 7)])
def test_example_counts(i, count):
    inst = example(i)
    report = brute_force_sr(inst)
    assert report.count == count
    assert all(is_stable(inst, m) for m in report.all_stable)


def test_sp_counts_match_roommate_counts():
    for i in (1, 2, 3, 4, 5):
        report = brute_force_sp(double(example(i)))
        assert report.sp_count == brute_force_sr(example(i)).count


def test_bounds_refuse_large_instances():
    with pytest.raises(OracleBoundExceeded):
        brute_force_sr(random_sr(14, random.Random(1)))
    with pytest.raises(OracleBoundExceeded):
        brute_force_sm(double(example(6)).inner)
    inner = double(example(6)).inner
    assert brute_force_sm(inner, bound=10).count == rotation_poset(inner).order.count_closed_subsets() == 59


def test_trivial_instances():
    assert brute_force_sr(RoommateInstance([[2], [1]])).count == 1
    one = brute_force_sm(MarriageInstance([[1]], [[1]]))
    assert [m.wife for m in one.all_stable] == [(1,)]
    empty = brute_force_sm(MarriageInstance([[]], [[]]))
    assert [m.wife for m in empty.all_stable] == [(0,)]


def test_threads_agree_with_serial():
    for i in (3, 5, 6):
        assert brute_force_sr(example(i), threads=3) == brute_force_sr(example(i))
    inner = double(example(5)).inner
    assert brute_force_sm(inner, threads=2) == brute_force_sm(inner)
    smi = random_smi(5, 4, random.Random(3))
    assert brute_force_sm(smi, threads=2) == brute_force_sm(smi)
