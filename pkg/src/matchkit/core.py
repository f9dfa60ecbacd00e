"""Instances, matchings, rank lookup and stability predicates.

Agents are 1-based integers throughout.  A roommate instance lists, for every
agent, all other agents in strict preference order.  A marriage instance may
have incomplete lists (SMI) but acceptability must be mutual.

Rank tables are precomputed once per instance: ``rank_table[a][b]`` is the
0-based position of ``b`` in ``a``'s list, ``UNLISTED`` if absent, and column
0 holds ``UNMATCHED`` so that "being single" compares worse than every listed
partner but better than an unacceptable one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

UNLISTED = 1 << 30
UNMATCHED = UNLISTED - 1


def _as_lists(prefs: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in prefs)


def _rank_array(prefs: Sequence[Sequence[int]], n_other: int) -> np.ndarray:
    table = np.full((len(prefs) + 1, n_other + 1), UNLISTED, dtype=np.int32)
    table[:, 0] = UNMATCHED
    for a, row in enumerate(prefs, 1):
        if row:
            table[a, list(row)] = np.arange(len(row), dtype=np.int32)
    return table


def _pref_array(prefs: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    """Padded 1-based preference matrix (-1 filler) and list lengths."""
    width = max((len(r) for r in prefs), default=0)
    table = np.full((len(prefs) + 1, max(width, 1)), -1, dtype=np.int32)
    lengths = np.zeros(len(prefs) + 1, dtype=np.int32)
    for a, row in enumerate(prefs, 1):
        if row:
            table[a, : len(row)] = row
        lengths[a] = len(row)
    return table, lengths


@dataclass(frozen=True)
class RoommateInstance:
    """Stable roommates instance with complete strict lists and even ``n``."""

    prefs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "prefs", _as_lists(self.prefs))
        n = len(self.prefs)
        if n < 2 or n % 2:
            raise InputError(f"roommate instance needs an even number of agents >= 2, got {n}")
        everyone = set(range(1, n + 1))
        for j, row in enumerate(self.prefs, 1):
            if len(set(row)) != len(row):
                raise InputError(f"agent {j}: duplicate entries in preference list")
            if set(row) != everyone - {j}:
                missing = sorted(everyone - {j} - set(row))
                extra = sorted(set(row) - (everyone - {j}))
                raise InputError(f"agent {j}: list must rank every other agent once (missing {missing}, invalid {extra})")

    @property
    def n(self) -> int:
        return len(self.prefs)

    @cached_property
    def rank_array(self) -> np.ndarray:
        return _rank_array(self.prefs, self.n)

    @cached_property
    def rank_table(self) -> list[list[int]]:
        return self.rank_array.tolist()

    def _check_agent(self, agent: int) -> None:
        if not 1 <= agent <= self.n:
            raise InputError(f"agent {agent} out of range 1..{self.n}")

    def rank(self, agent: int, candidate: int) -> int | None:
        """1-based position of ``candidate`` in ``agent``'s list, or None."""
        self._check_agent(agent)
        if not 1 <= candidate <= self.n:
            return None
        r = self.rank_table[agent][candidate]
        return None if r >= UNMATCHED else r + 1


@dataclass(frozen=True)
class MarriageInstance:
    """Stable marriage instance, possibly with incomplete lists (SMI)."""

    men_prefs: tuple[tuple[int, ...], ...]
    women_prefs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "men_prefs", _as_lists(self.men_prefs))
        object.__setattr__(self, "women_prefs", _as_lists(self.women_prefs))
        for side, prefs, bound in (("man", self.men_prefs, self.n_women),
                                   ("woman", self.women_prefs, self.n_men)):
            for a, row in enumerate(prefs, 1):
                if len(set(row)) != len(row):
                    raise InputError(f"{side} {a}: duplicate entries in preference list")
                bad = [x for x in row if not 1 <= x <= bound]
                if bad:
                    raise InputError(f"{side} {a}: entries out of range: {bad}")
        listed_by_men = {(m, w) for m, row in enumerate(self.men_prefs, 1) for w in row}
        listed_by_women = {(m, w) for w, row in enumerate(self.women_prefs, 1) for m in row}
        if listed_by_men != listed_by_women:
            m, w = min(listed_by_men ^ listed_by_women)
            raise InputError(f"acceptability is not mutual for man {m} and woman {w}")

    @property
    def n_men(self) -> int:
        return len(self.men_prefs)

    @property
    def n_women(self) -> int:
        return len(self.women_prefs)

    @cached_property
    def men_rank_array(self) -> np.ndarray:
        return _rank_array(self.men_prefs, self.n_women)

    @cached_property
    def women_rank_array(self) -> np.ndarray:
        return _rank_array(self.women_prefs, self.n_men)

    @cached_property
    def men_pref_array(self) -> tuple[np.ndarray, np.ndarray]:
        return _pref_array(self.men_prefs)

    @cached_property
    def women_pref_array(self) -> tuple[np.ndarray, np.ndarray]:
        return _pref_array(self.women_prefs)

    @cached_property
    def men_rank(self) -> list[list[int]]:
        return self.men_rank_array.tolist()

    @cached_property
    def women_rank(self) -> list[list[int]]:
        return self.women_rank_array.tolist()

    def swapped(self) -> MarriageInstance:
        """The same instance with the roles of men and women exchanged."""
        return MarriageInstance(self.women_prefs, self.men_prefs)

    def rank(self, agent: int, candidate: int, side: str = "man") -> int | None:
        prefs, ranks = (self.men_prefs, self.men_rank) if side == "man" else (self.women_prefs, self.women_rank)
        if not 1 <= agent <= len(prefs):
            raise InputError(f"{side} {agent} out of range 1..{len(prefs)}")
        if not 1 <= candidate < len(ranks[agent]):
            return None
        r = ranks[agent][candidate]
        return None if r >= UNMATCHED else r + 1

    def acceptable(self, man: int, woman: int) -> bool:
        return 1 <= man <= self.n_men and 1 <= woman <= self.n_women and self.men_rank[man][woman] < UNMATCHED


@dataclass(frozen=True)
class Matching:
    """A marriage matching seen from the men's side.

    ``wife[m - 1]`` is the woman matched to man ``m`` (0 when single); the
    tuple is the compact ``[8, 4, 5, ...]`` shorthand.
    """

    wife: tuple[int, ...]
    n_women: int

    def __post_init__(self):
        object.__setattr__(self, "wife", tuple(int(w) for w in self.wife))
        seen = [w for w in self.wife if w]
        if len(set(seen)) != len(seen):
            raise InputError("a woman is matched to two men")
        if any(not 0 <= w <= self.n_women for w in self.wife):
            raise InputError("woman index out of range")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], n_men: int, n_women: int) -> Matching:
        wife = [0] * n_men
        for m, w in pairs:
            if not 1 <= m <= n_men:
                raise InputError(f"man {m} out of range 1..{n_men}")
            if wife[m - 1]:
                raise InputError(f"man {m} appears in two pairs")
            wife[m - 1] = w
        return cls(tuple(wife), n_women)

    @cached_property
    def husband(self) -> tuple[int, ...]:
        h = [0] * self.n_women
        for m, w in enumerate(self.wife, 1):
            if w:
                h[w - 1] = m
        return tuple(h)

    @property
    def n_men(self) -> int:
        return len(self.wife)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((m, w) for m, w in enumerate(self.wife, 1) if w)

    def partner_of_man(self, m: int) -> int:
        return self.wife[m - 1]

    def partner_of_woman(self, w: int) -> int:
        return self.husband[w - 1]

    @property
    def is_perfect(self) -> bool:
        return all(self.wife) and all(self.husband)

    def __str__(self) -> str:
        return "[" + ", ".join(map(str, self.wife)) + "]"


@dataclass(frozen=True)
class RoommateMatching:
    """An involutive pairing of roommate agents; ``mate[j - 1] == 0`` is single."""

    mate: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mate", tuple(int(x) for x in self.mate))
        n = len(self.mate)
        for j, q in enumerate(self.mate, 1):
            if q == 0:
                continue
            if not 1 <= q <= n or q == j:
                raise InputError(f"agent {j} has invalid partner {q}")
            if self.mate[q - 1] != j:
                raise InputError(f"pairing is not involutive at agents {j} and {q}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], n: int) -> RoommateMatching:
        mate = [0] * n
        for a, b in pairs:
            for x in (a, b):
                if not 1 <= x <= n:
                    raise InputError(f"agent {x} out of range 1..{n}")
                if mate[x - 1]:
                    raise InputError(f"agent {x} appears in two pairs")
            if a == b:
                raise InputError(f"agent {a} paired with itself")
            mate[a - 1], mate[b - 1] = b, a
        return cls(tuple(mate))

    @property
    def n(self) -> int:
        return len(self.mate)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((j, q) for j, q in enumerate(self.mate, 1) if q and j < q)

    @property
    def is_perfect(self) -> bool:
        return all(self.mate)

    def __str__(self) -> str:
        return format_pairs(self.pairs)


def format_pairs(pairs: Iterable[tuple[int, int]]) -> str:
    return " ".join(f"{a}-{b}" for a, b in sorted(pairs))


@dataclass(frozen=True)
class StabilityReport:
    blocking_pairs: tuple[tuple[int, int], ...]
    unmatched: tuple[int, ...] = ()
    incomplete: bool = False

    @property
    def stable(self) -> bool:
        return not self.blocking_pairs and not self.incomplete


def _check_marriage_matching(instance: MarriageInstance, matching: Matching) -> None:
    if matching.n_men != instance.n_men or matching.n_women != instance.n_women:
        raise InputError("matching size does not fit the instance")
    for m, w in matching.pairs:
        if not instance.acceptable(m, w):
            raise InputError(f"pair ({m}, {w}) is not mutually acceptable")


def _check_roommate_matching(instance: RoommateInstance, matching: RoommateMatching) -> None:
    if matching.n != instance.n:
        raise InputError("matching size does not fit the instance")


def check_stability(instance, matching) -> StabilityReport:
    """Blocking pairs (lexicographic) plus, for SR, the incompleteness diagnostic."""
    if isinstance(instance, MarriageInstance):
        if not isinstance(matching, Matching):
            raise InputError("marriage instance needs a marriage Matching")
        _check_marriage_matching(instance, matching)
        mr, wr = instance.men_rank, instance.women_rank
        husband = matching.husband
        found = []
        for m, row in enumerate(instance.men_prefs, 1):
            rm = mr[m]
            cur = rm[matching.wife[m - 1]]
            for w in row:
                if rm[w] >= cur:
                    break
                if wr[w][m] < wr[w][husband[w - 1]]:
                    found.append((m, w))
        return StabilityReport(tuple(found))
    if isinstance(instance, RoommateInstance):
        if not isinstance(matching, RoommateMatching):
            raise InputError("roommate instance needs a RoommateMatching")
        _check_roommate_matching(instance, matching)
        rt = instance.rank_table
        mate = matching.mate
        found = []
        for p, row in enumerate(instance.prefs, 1):
            rp = rt[p]
            cur = rp[mate[p - 1]]
            for q in row:
                if rp[q] >= cur:
                    break
                if rt[q][p] < rt[q][mate[q - 1]]:
                    found.append((min(p, q), max(p, q)))
        unmatched = tuple(j for j, q in enumerate(mate, 1) if q == 0)
        return StabilityReport(tuple(sorted(set(found))), unmatched, bool(unmatched))
    raise InputError(f"unsupported instance type {type(instance).__name__}")


def blocking_pairs(instance, matching) -> tuple[tuple[int, int], ...]:
    return check_stability(instance, matching).blocking_pairs


def is_stable(instance, matching) -> bool:
    """No blocking pair; for roommates the matching must also be perfect."""
    return check_stability(instance, matching).stable
