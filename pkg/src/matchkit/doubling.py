"""The doubled marriage instance of a roommate instance.

Agent ``p_j`` becomes man ``m_j`` and woman ``w_j``; both copies keep
``p_j``'s list, so the men's and women's tables are mirror images and row
``j`` of the doubled instance means the pair ``(m_j, w_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .core import MarriageInstance, Matching, RoommateInstance, RoommateMatching
from .errors import ContractViolation, InputError, InternalInvariantError
from .marriage import Rotation, RotationPoset, trim_to_stable_pairs


@dataclass(frozen=True, eq=False)
class DoubledInstance:
    origin: RoommateInstance
    inner: MarriageInstance

    @property
    def n(self) -> int:
        return self.origin.n

    @cached_property
    def trimmed(self) -> MarriageInstance:
        return trim_to_stable_pairs(self.inner)


def double(instance: RoommateInstance) -> DoubledInstance:
    d = DoubledInstance(instance, MarriageInstance(instance.prefs, instance.prefs))
    return d


@dataclass(frozen=True)
class GapVector:
    """Per-row gap (woman's partner position minus man's) and the table used."""

    gaps: tuple[int, ...]
    table: str

    @property
    def total(self) -> int:
        return sum(self.gaps)

    def positive_rows(self) -> list[int]:
        return [j for j, g in enumerate(self.gaps, 1) if g > 0]

    @property
    def has_negative(self) -> bool:
        return any(g < 0 for g in self.gaps)

    def __str__(self) -> str:
        return " ".join(map(str, self.gaps)) + f" total={self.total}"


def _table(doubled: DoubledInstance, table: str) -> MarriageInstance:
    if table == "original":
        return doubled.inner
    if table == "trimmed":
        return doubled.trimmed
    raise InputError(f"table must be 'original' or 'trimmed', not {table!r}")


def gap_vector(doubled: DoubledInstance, matching: Matching, table: str = "original") -> GapVector:
    if not matching.is_perfect or matching.n_men != doubled.n:
        raise InputError("gaps are only defined for perfect matchings of the doubled instance")
    inst = _table(doubled, table)
    mr, wr = inst.men_rank, inst.women_rank
    gaps = []
    for j in range(1, doubled.n + 1):
        w = matching.wife[j - 1]
        h = matching.husband[j - 1]
        if mr[j][w] >= len(inst.men_prefs[j - 1]) or wr[j][h] >= len(inst.women_prefs[j - 1]):
            raise InputError(f"row {j}: partner not on the {table} table")
        gaps.append(wr[j][h] - mr[j][w])
    return GapVector(tuple(gaps), table)


def is_same_position(doubled: DoubledInstance, matching: Matching) -> bool:
    return not any(gap_vector(doubled, matching).gaps)


def to_roommate_matching(doubled: DoubledInstance, sp_matching: Matching) -> RoommateMatching:
    """``p_j`` gets ``p_i`` whenever ``m_j`` holds ``w_i``."""
    if not is_same_position(doubled, sp_matching):
        raise ContractViolation("only same-position matchings map to roommate matchings")
    return RoommateMatching(sp_matching.wife)


def sp_matching_of(doubled: DoubledInstance, roommate: RoommateMatching) -> Matching:
    """Inverse of :func:`to_roommate_matching` for perfect roommate matchings."""
    return Matching(roommate.mate, doubled.n)


def dual_rotation(doubled: DoubledInstance, rotation: Rotation, poset: RotationPoset | None = None) -> Rotation:
    """Women's-view mirror of ``rotation`` rewritten from the men's side.

    For ``(m_i1, w_j1), ..., (m_ik, w_jk)`` this is
    ``(m_j2, w_i1), (m_j3, w_i2), ..., (m_j1, w_ik)``.
    """
    pairs = rotation.pairs
    k = len(pairs)
    if any(not (1 <= m <= doubled.n and 1 <= w <= doubled.n) for m, w in pairs):
        raise InputError("rotation does not belong to this doubled instance")
    dual = Rotation(tuple((pairs[(l + 1) % k][1], pairs[l][0]) for l in range(k)))
    if poset is not None:
        known = set(poset.rotations.values())
        if rotation not in known:
            raise InputError(f"rotation {rotation} is not a rotation of the instance")
        if dual not in known:
            raise InternalInvariantError(f"dual of {rotation} is not a rotation of the instance")
    return dual


def dual_pairing(doubled: DoubledInstance, poset: RotationPoset) -> dict[int, int]:
    by_rotation = {rot: rid for rid, rot in poset.rotations.items()}
    pairing = {}
    for rid, rot in poset.rotations.items():
        dual = dual_rotation(doubled, rot)
        if dual not in by_rotation:
            raise InternalInvariantError(f"dual of {rot} is not a rotation of the instance")
        pairing[rid] = by_rotation[dual]
    return pairing


def xor_condition(poset: RotationPoset, pairing: Mapping[int, int], subset) -> bool:
    """Exactly one of every dual pair ``{R, dual(R)}`` lies in ``subset``."""
    subset = frozenset(subset)
    for rid in poset.rotations:
        if (rid in subset) == (pairing[rid] in subset):
            return False
    return True
