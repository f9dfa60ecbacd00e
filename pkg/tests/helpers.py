"""Instance generators and the whole-pipeline cross-check used by several test files."""

from __future__ import annotations

import itertools
import random
from collections import Counter
from functools import lru_cache
from pathlib import Path

from matchkit.core import MarriageInstance, RoommateInstance, is_stable
from matchkit.doubling import double, dual_pairing, is_same_position, to_roommate_matching, xor_condition
from matchkit.errors import NoSpMatching
from matchkit.halfcut import (ReductionResult, avoids, enumerate_sp_via_xor, halfcut, halfcut_all_picks,
                              make_irreducible, prohibited_pairs, realize, serialize, sigma, smallest_man)
from matchkit.io import load_instance
from matchkit.marriage import matching_of, rotation_poset
from matchkit.oracle import brute_force_sm, brute_force_sr
from matchkit.srm import srm

DATA = Path(__file__).parent / "data"


@lru_cache(maxsize=None)
def example(i: int) -> RoommateInstance:
    return load_instance(DATA / f"example{i}.sr")


def random_sr(n: int, rng: random.Random) -> RoommateInstance:
    prefs = []
    for i in range(1, n + 1):
        row = [j for j in range(1, n + 1) if j != i]
        rng.shuffle(row)
        prefs.append(row)
    return RoommateInstance(prefs)


def all_sr4():
    """Every roommate instance on four agents (6**4 = 1296)."""
    rows = [list(itertools.permutations([j for j in range(1, 5) if j != i])) for i in range(1, 5)]
    for combo in itertools.product(*rows):
        yield RoommateInstance(combo)


def random_smi(n_men: int, n_women: int, rng: random.Random, density: float = 0.7) -> MarriageInstance:
    acc = {(m, w) for m in range(1, n_men + 1) for w in range(1, n_women + 1) if rng.random() < density}
    men = []
    for m in range(1, n_men + 1):
        row = [w for w in range(1, n_women + 1) if (m, w) in acc]
        rng.shuffle(row)
        men.append(row)
    women = []
    for w in range(1, n_women + 1):
        row = [m for m in range(1, n_men + 1) if (m, w) in acc]
        rng.shuffle(row)
        women.append(row)
    return MarriageInstance(men, women)


def perturbed_example6(rng: random.Random) -> RoommateInstance:
    """Example 6 with a few adjacent swaps and a random relabelling.

    Uniform random instances almost never carry a prohibited pair; small
    perturbations of Example 6 often do.
    """
    prefs = [list(r) for r in example(6).prefs]
    for _ in range(rng.randint(1, 6)):
        a, i = rng.randrange(10), rng.randrange(8)
        prefs[a][i], prefs[a][i + 1] = prefs[a][i + 1], prefs[a][i]
    perm = list(range(1, 11))
    rng.shuffle(perm)
    perm = [0] + perm
    new = [None] * 10
    for a in range(1, 11):
        new[perm[a] - 1] = [perm[x] for x in prefs[a - 1]]
    return RoommateInstance(new)


def oracle_set(instance: RoommateInstance) -> set:
    return {m.pairs for m in brute_force_sr(instance).all_stable}


def _violation_shape_ok(half, s) -> bool:
    p_prime = half.parent.poset
    lifted = sigma(half, s)
    for r2 in lifted:
        for r1 in p_prime.order.predecessors(r2):
            if r1 not in lifted and not (r1 not in half.kept and r2 in half.kept):
                return False
    return True


def check_half(doubled, half, truth: set, failures: list, tag: str, counter: Counter) -> None:
    """Half, prohibited-pair, serialization and decoding checks for one HalfCut run."""
    irr = half.parent
    p_prime, pairing = irr.poset, irr.pairing
    kept = half.kept
    if 2 * len(kept) != len(p_prime) or any((r in kept) == (pairing[r] in kept) for r in p_prime.rotations):
        failures.append(f"{tag}: half is not one rotation per dual pair")
    for s in p_prime.order.closed_subsets():
        if xor_condition(p_prime, pairing, s) and not half.poset.order.is_closed(s & kept):
            failures.append(f"{tag}: XOR-closed subset does not restrict to a closed subset")
    raw = prohibited_pairs(half, minimal=False)
    pairs = prohibited_pairs(half)
    for s in half.poset.order.closed_subsets():
        lifted_closed = p_prime.order.is_closed(sigma(half, s))
        if avoids(s, raw) != lifted_closed or avoids(s, pairs) != lifted_closed:
            failures.append(f"{tag}: prohibited-pair characterization fails on {sorted(s)}")
        if not lifted_closed and not _violation_shape_ok(half, s):
            failures.append(f"{tag}: violation pair with the wrong shape")
    if len(pairs) > 1:
        counter["multi"] += 1
        return
    counter["one" if pairs else "zero"] += 1
    ser = serialize(half, pairs[0] if pairs else None)
    sub = half.poset.order
    n_upper = sub.restrict(ser.upper).count_closed_subsets()
    n_lower = sub.restrict([ser.rename[x] for x in ser.lower]).count_closed_subsets() if pairs else 1
    if ser.poset.count_closed_subsets() != n_upper + n_lower - 1:
        failures.append(f"{tag}: serialized closed-subset count")
    realized = realize(ser)
    if not ser.poset.is_isomorphic(rotation_poset(realized.instance).order):
        failures.append(f"{tag}: realized POSET not isomorphic to the serialized POSET")
    elif pairs:
        counter["isomorphic-one-pair"] += 1
    red = ReductionResult(doubled.origin, doubled, irr, half, tuple(pairs), ser, realized)
    fibers = Counter()
    for _, r in red.decode_table():
        if not is_stable(doubled.origin, r):
            failures.append(f"{tag}: decoded matching {r} is unstable")
        fibers[r.pairs] += 1
    if set(fibers) != truth:
        failures.append(f"{tag}: decode image differs from the oracle")
    expected_double = ser.a_only().count_closed_subsets() - 1 if pairs else 0
    if any(v > 2 for v in fibers.values()) or sum(v == 2 for v in fibers.values()) != expected_double:
        failures.append(f"{tag}: fiber sizes")


def check_instance(instance: RoommateInstance, tag: str = "", counter: Counter | None = None,
                   all_picks: bool = False, sm_bound: int = 10) -> list[str]:
    """Every oracle cross-check for one roommate instance; returns failure descriptions."""
    failures: list[str] = []
    counter = Counter() if counter is None else counter
    truth = oracle_set(instance)
    outcome, _ = srm(instance)
    if outcome.ok != bool(truth):
        failures.append(f"{tag}: srm verdict {outcome.ok} but oracle found {len(truth)}")
    if outcome.ok and outcome.matching.pairs not in truth:
        failures.append(f"{tag}: srm output {outcome.matching} not oracle-stable")
    for policy in ("highest", "random"):
        if srm(instance, policy, seed=7)[0].ok != outcome.ok:
            failures.append(f"{tag}: srm verdict depends on the row policy ({policy})")
    doubled = double(instance)
    poset = rotation_poset(doubled.inner)
    report = brute_force_sm(doubled.inner, sm_bound)
    if poset.order.count_closed_subsets() != report.count:
        failures.append(f"{tag}: closed subsets {poset.order.count_closed_subsets()} vs {report.count} stable")
    pairing = dual_pairing(doubled, poset)
    xor_set = set()
    for s in poset.order.closed_subsets():
        m = matching_of(poset, s)
        if xor_condition(poset, pairing, s) != (m.is_perfect and is_same_position(doubled, m)):
            failures.append(f"{tag}: XOR condition disagrees with SP on {sorted(s)}")
        if xor_condition(poset, pairing, s):
            xor_set.add(to_roommate_matching(doubled, m).pairs)
    if xor_set != truth:
        failures.append(f"{tag}: XOR enumeration differs from the oracle")
    if {to_roommate_matching(doubled, m).pairs for m in enumerate_sp_via_xor(doubled, poset, pairing)} != truth:
        failures.append(f"{tag}: enumerate_sp_via_xor differs from the oracle")
    if not truth:
        counter["none"] += 1
        return failures
    try:
        irr = make_irreducible(poset, pairing)
    except NoSpMatching:
        failures.append(f"{tag}: make_irreducible found no SP matching although one exists")
        return failures
    if all_picks:
        halves = halfcut_all_picks(irr, limit=50)
    else:
        halves = [halfcut(irr, smallest_man)]
    for k, half in enumerate(halves):
        check_half(doubled, half, truth, failures, f"{tag}#{k}", counter)
    return failures
