"""Gale-Shapley, rotations and the rotation POSET for SM/SMI instances.

The POSET is built from one full elimination chain ``M_0 -> M_z`` found by
successor chasing, with the two classical precedence labels:

* a rotation that moves man ``m`` to woman ``w`` precedes the rotation that
  contains the pair ``(m, w)``;
* if ``w`` lies strictly between the old and new partner of ``m`` in a
  rotation ``rho``, the rotation that lifts ``w`` above ``m`` precedes ``rho``.

All order queries go through :class:`matchkit.dag.Poset`, i.e. through the
transitive closure of these edges.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from . import kernels
from .core import UNMATCHED, MarriageInstance, Matching, check_stability
from .dag import Poset
from .errors import ContractViolation, InputError, InternalInvariantError


@dataclass(frozen=True)
class Rotation:
    """Cyclic sequence of ``(man, woman)`` pairs; man i moves to woman i+1.

    Stored starting from the smallest man so that equal cycles compare equal.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(m), int(w)) for m, w in self.pairs)
        if len(pairs) < 2:
            raise InputError("a rotation needs at least two pairs")
        men = [m for m, _ in pairs]
        women = [w for _, w in pairs]
        if len(set(men)) != len(men) or len(set(women)) != len(women):
            raise InputError("rotation repeats a man or a woman")
        k = men.index(min(men))
        object.__setattr__(self, "pairs", pairs[k:] + pairs[:k])

    @property
    def men(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.pairs)

    @property
    def women(self) -> tuple[int, ...]:
        return tuple(w for _, w in self.pairs)

    def moves(self) -> Iterator[tuple[int, int, int]]:
        """``(man, old woman, new woman)`` for every man of the cycle."""
        k = len(self.pairs)
        for i, (m, w) in enumerate(self.pairs):
            yield m, w, self.pairs[(i + 1) % k][1]

    def short(self) -> str:
        """Second-entry shorthand, e.g. ``(4,5,2,8,3,6)``."""
        return "(" + ",".join(map(str, self.women)) + ")"

    def full(self) -> str:
        return ",".join(f"({m},{w})" for m, w in self.pairs)

    def __str__(self) -> str:
        return self.short()


@dataclass(frozen=True, eq=False)
class RotationPoset:
    """Rotations keyed by integer id, their order, and the base matching.

    For the full POSET of an instance the ids are ``0..k-1`` in a valid
    elimination order and ``base`` is the man-optimal matching; sub-POSETs keep
    the ids of the POSET they were cut from.
    """

    instance: MarriageInstance
    base: Matching
    rotations: Mapping[int, Rotation]
    order: Poset
    final: Matching | None = field(default=None)

    def __len__(self) -> int:
        return len(self.rotations)

    @property
    def ids(self) -> tuple[int, ...]:
        return self.order.labels

    @property
    def edges(self) -> frozenset:
        return self.order.edges

    def __getitem__(self, rid: int) -> Rotation:
        return self.rotations[rid]

    def find(self, women: Iterable[int]) -> int:
        """Id of the rotation whose second-entry cycle is ``women`` (any start)."""
        target = tuple(women)
        hits = []
        for rid, rot in self.rotations.items():
            ws = rot.women
            if len(ws) == len(target) and any(ws[i:] + ws[:i] == target for i in range(len(ws))):
                hits.append(rid)
        if len(hits) != 1:
            raise InputError(f"rotation {target} matches {len(hits)} rotations")
        return hits[0]

    def sub(self, keep: Iterable[int], base: Matching | None = None) -> RotationPoset:
        keep = list(keep)
        return RotationPoset(
            self.instance,
            self.base if base is None else base,
            {i: self.rotations[i] for i in self.order.linear_extension(keep)},
            self.order.restrict(keep),
        )


def gale_shapley(instance: MarriageInstance, orientation: str = "man") -> Matching:
    """Man-optimal (``"man"``) or woman-optimal (``"woman"``) stable matching."""
    if orientation == "man":
        pref, lens = instance.men_pref_array
        wife = kernels.gale_shapley(pref, lens, instance.women_rank_array)
        return Matching(tuple(wife[1:]), instance.n_women)
    if orientation == "woman":
        pref, lens = instance.women_pref_array
        husband = kernels.gale_shapley(pref, lens, instance.men_rank_array)
        return Matching.from_pairs(((m, w) for w, m in enumerate(husband[1:], 1) if m),
                                   instance.n_men, instance.n_women)
    raise InputError(f"orientation must be 'man' or 'woman', not {orientation!r}")


def _chase(instance: MarriageInstance, start: Matching, end: Matching) -> list[Rotation]:
    pref, _ = instance.men_pref_array
    rots = kernels.rotation_chase(pref, instance.men_rank_array, instance.women_rank_array,
                                  (0,) + start.wife, (0,) + end.wife)
    return [Rotation(tuple(r)) for r in rots]


def all_rotations(instance: MarriageInstance) -> tuple[Matching, Matching, list[Rotation]]:
    """``(M_0, M_z, rotations)`` with rotations in one valid elimination order."""
    m0 = gale_shapley(instance, "man")
    mz = gale_shapley(instance, "woman")
    return m0, mz, _chase(instance, m0, mz)


def _apply(wife: list[int], rotation: Rotation) -> None:
    for m, old, new in rotation.moves():
        if wife[m - 1] != old:
            raise ContractViolation(f"rotation {rotation.full()} is not exposed: man {m} is not with woman {old}")
        wife[m - 1] = new


def rotation_poset(instance: MarriageInstance) -> RotationPoset:
    """All rotations of ``instance`` and their precedence order; base = M_0."""
    m0, mz, rots = all_rotations(instance)
    mr, wr = instance.men_rank, instance.women_rank
    produced = {}
    # per woman: husbands' ranks after each rotation touching her (strictly improving)
    history: dict[int, list[tuple[int, int]]] = {}
    for rid, rot in enumerate(rots):
        for m, _old, new in rot.moves():
            produced[(m, new)] = rid
            history.setdefault(new, []).append((wr[new][m], rid))
    edges = set()
    base_rank = {w: wr[w][m0.husband[w - 1]] if m0.husband[w - 1] else UNMATCHED
                 for w in range(1, instance.n_women + 1)}
    neg_ranks = {w: [-r for r, _ in h] for w, h in history.items()}
    for rid, rot in enumerate(rots):
        for m, w in rot.pairs:
            src = produced.get((m, w))
            if src is not None:
                edges.add((src, rid))
        for m, old, new in rot.moves():
            row = instance.men_prefs[m - 1]
            for p in range(mr[m][old] + 1, mr[m][new]):
                w = row[p]
                r_m = wr[w][m]
                if base_rank[w] < r_m:
                    continue
                # first rotation after which w holds someone she prefers to m
                k = bisect.bisect_right(neg_ranks.get(w, []), -r_m)
                hist = history.get(w, [])
                if k >= len(hist):
                    raise InternalInvariantError(f"woman {w} never rejects man {m}")
                src = hist[k][1]
                if src != rid:
                    edges.add((src, rid))
    order = Poset(range(len(rots)), edges)
    return RotationPoset(instance, m0, dict(enumerate(rots)), order, mz)


def exposed_rotations(instance: MarriageInstance, matching: Matching) -> list[Rotation]:
    """Rotations that can be eliminated directly from a stable ``matching``.

    Successors are computed on the full preference lists; trimming them to
    stable pairs could hide a woman who still blocks an elimination.
    """
    if not check_stability(instance, matching).stable:
        raise ContractViolation("exposed_rotations needs a stable matching")
    mz = gale_shapley(instance, "woman")
    mr, wr = instance.men_rank, instance.women_rank
    husband = matching.husband
    succ = {}
    for m in range(1, instance.n_men + 1):
        w0 = matching.wife[m - 1]
        if not w0 or w0 == mz.wife[m - 1]:
            continue
        row = instance.men_prefs[m - 1]
        for p in range(mr[m][w0] + 1, mr[m][mz.wife[m - 1]] + 1):
            w = row[p]
            if wr[w][m] < wr[w][husband[w - 1]]:
                succ[m] = husband[w - 1]
                break
        else:
            raise InternalInvariantError(f"man {m} has no successor")
    found = []
    state: dict[int, int] = {}
    for start in sorted(succ):
        path = []
        m = start
        while m not in state:
            state[m] = 1
            path.append(m)
            m = succ[m]
        if state[m] == 1:
            cyc = path[path.index(m):]
            found.append(Rotation(tuple((x, matching.wife[x - 1]) for x in cyc)))
        for x in path:
            state[x] = 2
    return sorted(found, key=lambda r: r.pairs)


def eliminate(matching: Matching, rotation: Rotation, instance: MarriageInstance | None = None) -> Matching:
    """Shift every man of ``rotation`` to the next woman of the cycle.

    With ``instance`` given the rotation must be exposed in ``matching``;
    otherwise only membership of its pairs is checked.
    """
    if instance is not None and rotation not in exposed_rotations(instance, matching):
        raise ContractViolation(f"rotation {rotation.full()} is not exposed in {matching}")
    wife = list(matching.wife)
    _apply(wife, rotation)
    return Matching(tuple(wife), matching.n_women)


def stable_pairs(poset: RotationPoset) -> frozenset[tuple[int, int]]:
    """Pairs of the base matching plus every pair a rotation leaves or enters."""
    pairs = set(poset.base.pairs)
    for rot in poset.rotations.values():
        for m, old, new in rot.moves():
            pairs.add((m, old))
            pairs.add((m, new))
    return frozenset(pairs)


def trim(instance: MarriageInstance, poset: RotationPoset) -> MarriageInstance:
    """Drop every non-stable pair from both sides, keeping relative order."""
    keep = stable_pairs(poset)
    men = [[w for w in row if (m, w) in keep] for m, row in enumerate(instance.men_prefs, 1)]
    women = [[m for m in row if (m, w) in keep] for w, row in enumerate(instance.women_prefs, 1)]
    return MarriageInstance(men, women)


def trim_to_stable_pairs(instance: MarriageInstance) -> MarriageInstance:
    """Like :func:`trim` but only runs the elimination chain (no precedence edges)."""
    m0, mz, rots = all_rotations(instance)
    poset = RotationPoset(instance, m0, dict(enumerate(rots)), Poset(range(len(rots))), mz)
    return trim(instance, poset)


def closed_subsets(poset: RotationPoset) -> Iterator[frozenset[int]]:
    return poset.order.closed_subsets()


def matching_of(poset: RotationPoset, subset: Iterable[int]) -> Matching:
    """The stable matching reached from the base by eliminating ``subset``."""
    subset = frozenset(subset)
    if not subset <= set(poset.rotations):
        raise ContractViolation("subset mentions rotations outside the POSET")
    if not poset.order.is_closed(subset):
        raise ContractViolation("subset is not closed under precedence")
    wife = list(poset.base.wife)
    for rid in poset.order.linear_extension(subset):
        _apply(wife, poset.rotations[rid])
    return Matching(tuple(wife), poset.base.n_women)


def subset_of(poset: RotationPoset, matching: Matching) -> frozenset[int]:
    """Inverse of :func:`matching_of`: the rotations already eliminated."""
    mr = poset.instance.men_rank
    out = set()
    for rid, rot in poset.rotations.items():
        m, _old, new = next(rot.moves())
        w = matching.wife[m - 1]
        if w and mr[m][w] >= mr[m][new]:
            out.add(rid)
    if matching_of(poset, out) != matching:
        raise ContractViolation(f"{matching} is not a stable matching of this POSET")
    return frozenset(out)


def stable_matchings(poset: RotationPoset) -> Iterator[Matching]:
    for s in poset.order.closed_subsets():
        yield matching_of(poset, s)
