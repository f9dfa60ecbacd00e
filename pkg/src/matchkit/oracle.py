"""Brute-force ground truth by exhaustive enumeration.

Shares nothing with the algorithms under test except the stability
predicates of :mod:`matchkit.core`.  Serial runs use the compiled
enumerators from :mod:`matchkit.kernels` when available; the pure-Python
searches below serve the process pool and act as their reference.  A partial assignment is abandoned as
soon as two already-placed agents block each other (such a pair blocks every
completion), and each complete candidate is then checked with
:func:`matchkit.core.is_stable`.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import kernels
from .core import MarriageInstance, Matching, RoommateInstance, RoommateMatching, is_stable
from .doubling import DoubledInstance, is_same_position
from .errors import OracleBoundExceeded

SR_BOUND = 12
SM_BOUND = 8


@dataclass(frozen=True)
class OracleReport:
    all_stable: tuple
    sp_stable: tuple | None = None

    @property
    def count(self) -> int:
        return len(self.all_stable)

    @property
    def sp_count(self) -> int | None:
        return None if self.sp_stable is None else len(self.sp_stable)


def _sr_search(instance: RoommateInstance, first: int | None = None) -> list[RoommateMatching]:
    n = instance.n
    rank = instance.rank_table
    mate = [0] * (n + 1)
    found = []

    def blocked(a: int) -> bool:
        ra = rank[a]
        for x in range(1, n + 1):
            if mate[x] and x != a and ra[x] < ra[mate[a]] and rank[x][a] < rank[x][mate[x]]:
                return True
        return False

    def rec() -> None:
        try:
            i = mate.index(0, 1)
        except ValueError:
            m = RoommateMatching(tuple(mate[1:]))
            if is_stable(instance, m):
                found.append(m)
            return
        for j in range(i + 1, n + 1):
            if mate[j] or (i == 1 and first is not None and j != first):
                continue
            mate[i], mate[j] = j, i
            if not blocked(i) and not blocked(j):
                rec()
            mate[i] = mate[j] = 0

    rec()
    return found


def _sr_branch(args) -> list[RoommateMatching]:
    prefs, first = args
    return _sr_search(RoommateInstance(prefs), first)


def _sr_kernel(instance: RoommateInstance) -> list[RoommateMatching]:
    if kernels.BACKEND != "cython":
        return _sr_search(instance)
    cands = (RoommateMatching(tuple(m)) for m in kernels.sr_stable_matchings(instance.rank_array, instance.n))
    return [m for m in cands if is_stable(instance, m)]


def brute_force_sr(instance: RoommateInstance, bound: int = SR_BOUND, threads: int = 1) -> OracleReport:
    """All stable (hence perfect) roommate matchings.

    ``threads > 1`` splits the search on agent 1's partner across processes.
    """
    n = instance.n
    if n > bound:
        raise OracleBoundExceeded(f"{n} agents exceeds the roommate bound {bound}")
    if threads > 1 and n > 2:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(_sr_branch, [(instance.prefs, j) for j in range(2, n + 1)])
            found = [m for part in parts for m in part]
    else:
        found = _sr_kernel(instance)
    return OracleReport(tuple(sorted(found, key=lambda m: m.mate)))


def _sm_search(instance: MarriageInstance, first: int | None = None) -> list[Matching]:
    mr, wr = instance.men_rank, instance.women_rank
    n_m = instance.n_men
    wife = [0] * (n_m + 1)
    husband = [0] * (instance.n_women + 1)
    found = []

    def blocked(m: int) -> bool:
        # pairs between m and women already held by earlier men, and the reverse
        rm = mr[m]
        for m2 in range(1, m):
            w2 = wife[m2]
            if w2 and rm[w2] < rm[wife[m]] and wr[w2][m] < wr[w2][m2]:
                return True
            w = wife[m]
            if w and mr[m2][w] < mr[m2][w2] and wr[w][m2] < wr[w][m]:
                return True
        return False

    def rec(m: int) -> None:
        if m > n_m:
            cand = Matching(tuple(wife[1:]), instance.n_women)
            if is_stable(instance, cand):
                found.append(cand)
            return
        options = instance.men_prefs[m - 1] + (0,)
        if m == 1 and first is not None:
            options = (first,)
        for w in options:
            if w and husband[w]:
                continue
            wife[m] = w
            if w:
                husband[w] = m
            if not blocked(m):
                rec(m + 1)
            if w:
                husband[w] = 0
        wife[m] = 0

    if n_m:
        rec(1)
    return found


def _sm_branch(args) -> list[Matching]:
    men, women, first = args
    return _sm_search(MarriageInstance(men, women), first)


def _sm_kernel(instance: MarriageInstance) -> list[Matching]:
    if kernels.BACKEND != "cython" or not instance.n_men:
        return _sm_search(instance)
    pref, lens = instance.men_pref_array
    raw = kernels.sm_stable_matchings(pref, lens, instance.men_rank_array, instance.women_rank_array)
    cands = (Matching(tuple(w), instance.n_women) for w in raw)
    return [m for m in cands if is_stable(instance, m)]


def brute_force_sm(instance: MarriageInstance, bound: int = SM_BOUND, threads: int = 1) -> OracleReport:
    """All stable matchings; for SMI every man may also stay single."""
    if max(instance.n_men, instance.n_women) > bound:
        raise OracleBoundExceeded(f"instance exceeds the marriage bound {bound}")
    if threads > 1 and instance.n_men:
        jobs = [(instance.men_prefs, instance.women_prefs, w) for w in instance.men_prefs[0] + (0,)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            found = [m for part in pool.map(_sm_branch, jobs) for m in part]
    else:
        found = _sm_kernel(instance)
    return OracleReport(tuple(sorted(found, key=lambda x: x.wife)))


def brute_force_sp(doubled: DoubledInstance, bound: int = SM_BOUND, threads: int = 1) -> OracleReport:
    """Stable matchings of the doubled instance and the same-position ones among them."""
    report = brute_force_sm(doubled.inner, bound, threads)
    sp = tuple(m for m in report.all_stable if m.is_perfect and is_same_position(doubled, m))
    return OracleReport(report.all_stable, sp)
