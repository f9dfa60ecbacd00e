"""Stable roommates through same-position matchings of the doubled instance.

Run man-oriented Gale-Shapley on the doubled instance, then keep eliminating
a rotation through some positive-gap row until every gap is zero (success)
or some gap turns negative (no stable matching).  Gaps are measured on the
tables trimmed to stable pairs, where one elimination moves every affected
partner by exactly one position.
"""

from __future__ import annotations

import enum
import os
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .core import Matching, RoommateInstance, RoommateMatching
from .doubling import DoubledInstance, GapVector, double, gap_vector, to_roommate_matching
from .errors import ContractViolation, InputError, InternalInvariantError
from .marriage import Rotation, gale_shapley

RowPolicy = Callable[[Sequence[int]], int]


class SrmFailure(enum.Enum):
    NOT_PERFECT = "not-perfect"
    NEGATIVE_GAP_AT_START = "negative-gap-at-start"
    NEGATIVE_GAP_DURING_LOOP = "negative-gap-during-loop"


@dataclass(frozen=True)
class SrmOutcome:
    matching: RoommateMatching | None = None
    failure: SrmFailure | None = None
    sp_matching: Matching | None = None

    @property
    def ok(self) -> bool:
        return self.matching is not None


@dataclass(frozen=True)
class SrmStep:
    row: int
    rotation: Rotation
    gaps: GapVector
    through_row: bool = True


@dataclass
class SrmTrace:
    start: Matching | None = None
    start_gaps: GapVector | None = None
    start_gaps_original: GapVector | None = None
    steps: list[SrmStep] = field(default_factory=list)


def default_seed() -> int:
    return int(os.environ.get("MATCHKIT_SEED", "0"))


def make_row_policy(policy: str | RowPolicy = "lowest", seed: int | None = None) -> RowPolicy:
    if callable(policy):
        return policy
    if policy == "lowest":
        return min
    if policy == "highest":
        return max
    if policy == "random":
        rng = random.Random(default_seed() if seed is None else seed)
        return lambda rows: rows[rng.randrange(len(rows))]
    raise InputError(f"unknown row policy {policy!r}")


class _Walker:
    """Successor chasing on the full lists of the doubled instance.

    Search pointers only move forward: a woman skipped by man m keeps a
    partner she prefers to m for the rest of the run.
    """

    def __init__(self, doubled: DoubledInstance, matching: Matching, final: Matching):
        inst = doubled.inner
        self.prefs = inst.men_prefs
        self.mr = inst.men_rank
        self.wr = inst.women_rank
        self.wife = [0, *matching.wife]
        self.husband = [0, *matching.husband]
        self.zp = [-1] + [self.mr[m][w] for m, w in enumerate(final.wife, 1)]
        self.spos = [0] + [self.mr[m][w] + 1 for m, w in enumerate(matching.wife, 1)]

    def active(self, m: int) -> bool:
        return self.mr[m][self.wife[m]] < self.zp[m]

    def successor(self, m: int) -> int:
        row, wr, husband = self.prefs[m - 1], self.wr, self.husband
        p = self.spos[m]
        while p <= self.zp[m]:
            w = row[p]
            if wr[w][m] < wr[w][husband[w]]:
                self.spos[m] = p
                return husband[w]
            p += 1
        raise InternalInvariantError(f"man {m} has no successor")

    def cycle_from(self, m: int) -> list[int] | None:
        """Men of the exposed rotation the successor chain of ``m`` runs into."""
        if not self.active(m):
            return None
        seen = {}
        path = []
        x = m
        while x not in seen:
            seen[x] = len(path)
            path.append(x)
            x = self.successor(x)
        return path[seen[x]:]

    def rotation(self, cyc: list[int]) -> Rotation:
        return Rotation(tuple((x, self.wife[x]) for x in cyc))

    def eliminate(self, rot: Rotation) -> None:
        for m, _old, new in rot.moves():
            self.wife[m] = new
            self.husband[new] = m
            self.spos[m] = max(self.spos[m], self.mr[m][new] + 1)

    def matching(self) -> Matching:
        return Matching(tuple(self.wife[1:]), len(self.husband) - 1)


def find_rotation_through_row(walker: _Walker, row: int) -> tuple[Rotation, bool]:
    """An exposed rotation for a positive-gap ``row`` and whether it touches the row.

    A rotation containing man ``row`` or woman ``row`` is preferred (the man's
    side first).  Such a rotation need not be exposed yet: it may wait behind
    another rotation.  In that case the rotation the man's successor chain runs
    into is returned; eliminating it still lowers the total gap and the
    negative-gap test after it stays valid.
    """
    h = walker.husband[row]
    chains = [c for c in (walker.cycle_from(row), walker.cycle_from(h) if h else None) if c]
    for cyc in chains:
        if row in cyc or h in cyc:
            return walker.rotation(cyc), True
    if not chains:
        chains = [c for m in range(1, len(walker.wife)) if (c := walker.cycle_from(m))][:1]
    if not chains:
        raise InternalInvariantError(f"no exposed rotation while row {row} has a positive gap")
    return walker.rotation(chains[0]), False


def rotation_through_row(doubled: DoubledInstance, matching: Matching, row: int) -> Rotation:
    """Public form of the Step-3 locator on a stable matching of the doubled instance."""
    gaps = gap_vector(doubled, matching, "trimmed")
    if gaps.gaps[row - 1] <= 0:
        raise ContractViolation(f"row {row} has no positive gap")
    final = gale_shapley(doubled.inner, "woman")
    return find_rotation_through_row(_Walker(doubled, matching, final), row)[0]


def _trimmed_gaps(trimmed, wife, husband, n) -> list[int]:
    mr, wr = trimmed.men_rank, trimmed.women_rank
    return [wr[j][husband[j]] - mr[j][wife[j]] for j in range(1, n + 1)]


def srm(instance: RoommateInstance, row_policy: str | RowPolicy = "lowest",
        seed: int | None = None) -> tuple[SrmOutcome, SrmTrace]:
    pick = make_row_policy(row_policy, seed)
    trace = SrmTrace()
    doubled = double(instance)
    n = instance.n
    m0 = gale_shapley(doubled.inner, "man")
    trace.start = m0
    if not m0.is_perfect:
        return SrmOutcome(failure=SrmFailure.NOT_PERFECT), trace
    trace.start_gaps_original = gap_vector(doubled, m0, "original")
    trimmed = doubled.trimmed
    mz = gale_shapley(doubled.inner, "woman")
    walker = _Walker(doubled, m0, mz)
    gaps = _trimmed_gaps(trimmed, walker.wife, walker.husband, n)
    trace.start_gaps = GapVector(tuple(gaps), "trimmed")
    if any(g < 0 for g in gaps):
        return SrmOutcome(failure=SrmFailure.NEGATIVE_GAP_AT_START), trace
    mr, wr = trimmed.men_rank, trimmed.women_rank
    positive = {j for j, g in enumerate(gaps, 1) if g > 0}
    while positive:
        row = pick(sorted(positive))
        rot, direct = find_rotation_through_row(walker, row)
        walker.eliminate(rot)
        touched = set(rot.men) | set(rot.women)
        negative = False
        for j in touched:
            g = wr[j][walker.husband[j]] - mr[j][walker.wife[j]]
            gaps[j - 1] = g
            if g > 0:
                positive.add(j)
            else:
                positive.discard(j)
                negative = negative or g < 0
        trace.steps.append(SrmStep(row, rot, GapVector(tuple(gaps), "trimmed"), direct))
        if negative:
            return SrmOutcome(failure=SrmFailure.NEGATIVE_GAP_DURING_LOOP), trace
    sp = walker.matching()
    return SrmOutcome(to_roommate_matching(doubled, sp), sp_matching=sp), trace
