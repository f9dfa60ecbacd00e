"""From the rotation POSET of a doubled instance to a plain marriage instance.

Pipeline: irreducible POSET ``P'`` (forced rotations folded into the base),
HalfCut's half POSET ``P''`` (one rotation of every dual pair), prohibited
pairs, serialization of the single-pair case, and realization of the result
as a marriage instance whose stable matchings decode, through ``delta`` and
``sigma``, onto the same-position stable matchings of the doubled instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping

from .core import MarriageInstance, Matching, RoommateInstance, RoommateMatching
from .dag import Poset
from .doubling import DoubledInstance, double, dual_pairing, is_same_position, to_roommate_matching, xor_condition
from .errors import (ContractViolation, InputError, InternalInvariantError, MultipleProhibitedPairs,
                     NoSpMatching, NoStableMatching)
from .marriage import RotationPoset, matching_of, rotation_poset, subset_of
from .srm import srm

PickPolicy = Callable[[RotationPoset, list[int]], int]


# -- irreducible POSET ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IrreducibleResult:
    forced: frozenset[int]
    forbidden: frozenset[int]
    poset: RotationPoset
    pairing: Mapping[int, int]
    full: RotationPoset


def _violators(poset: RotationPoset, pairing: Mapping[int, int], alive: set[int]) -> set[int]:
    """Rotations R of ``alive`` with R < dual(R), or R below both R' and dual(R')."""
    order = poset.order
    out = set()
    for r in alive:
        below = order.successors(r) & alive
        if pairing[r] in below:
            out.add(r)
            continue
        if any(pairing[x] in below for x in below):
            out.add(r)
    return out


def make_irreducible(poset: RotationPoset, pairing: Mapping[int, int]) -> IrreducibleResult:
    """Fold every rotation an SP matching must eliminate into the base.

    A rotation that precedes its own dual, or precedes both members of some
    dual pair, is forced (with all its predecessors); the duals of forced
    rotations are forbidden.  Repeats until nothing changes.
    """
    order = poset.order
    for r, d in pairing.items():
        if r == d:
            raise NoSpMatching(f"rotation {poset[r]} is its own dual")
    forced: set[int] = set()
    alive = set(poset.rotations)
    while True:
        new = _violators(poset, pairing, alive)
        if not new:
            break
        forced |= order.down_closure(new)
        forbidden = {pairing[r] for r in forced}
        if forced & forbidden:
            raise NoSpMatching("a rotation is both forced and forbidden")
        alive = set(poset.rotations) - forced - forbidden
    forced_f = frozenset(forced)
    forbidden_f = frozenset(pairing[r] for r in forced)
    if forced_f & forbidden_f:
        raise NoSpMatching("a rotation is both forced and forbidden")
    # forbidden rotations pull their successors out with them
    if order.up_closure(forbidden_f) & (set(poset.rotations) - forbidden_f - forced_f):
        raise InternalInvariantError("a successor of a forbidden rotation survived")
    base = matching_of(poset, forced_f)
    p_prime = poset.sub(sorted(alive), base)
    return IrreducibleResult(forced_f, forbidden_f, p_prime, {r: pairing[r] for r in alive}, poset)


# -- HalfCut --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HalfPoset:
    poset: RotationPoset
    parent: IrreducibleResult
    picks: tuple[int, ...] = ()

    @property
    def kept(self) -> frozenset[int]:
        return frozenset(self.poset.rotations)


def smallest_man(poset: RotationPoset, candidates: list[int]) -> int:
    return min(candidates, key=lambda r: min(poset[r].men))


def pick_rotation(poset: RotationPoset, spec: str | Iterable[int] | None) -> PickPolicy:
    """Pick policy preferring the rotation written ``spec`` (second entries) when maximal."""
    if spec is None or spec == "auto":
        return smallest_man
    if isinstance(spec, str):
        spec = [int(t) for t in spec.strip("() ").split(",")]
    wanted = poset.find(spec)

    def policy(p: RotationPoset, candidates: list[int]) -> int:
        return wanted if wanted in candidates else smallest_man(p, candidates)

    return policy


def halfcut(irr: IrreducibleResult, pick: PickPolicy = smallest_man) -> HalfPoset:
    p = irr.poset
    order = p.order
    queue = set(p.rotations)
    kept: set[int] = set()
    picks = []
    while queue:
        tops = [r for r in order.labels if r in queue and not (order.predecessors(r) & queue)]
        r = pick(p, tops)
        if r not in tops:
            raise InputError(f"pick policy chose {p[r]}, which is not maximal")
        picks.append(r)
        part = ({r} | order.successors(r)) & queue
        duals = {irr.pairing[x] for x in part}
        if part & duals:
            raise InternalInvariantError("successors of a maximal rotation contain a dual pair")
        kept |= part
        queue -= part | duals
    return HalfPoset(p.sub(sorted(kept)), irr, tuple(picks))


def halfcut_all_picks(irr: IrreducibleResult, limit: int = 1000) -> list[HalfPoset]:
    """HalfCut under every sequence of maximal-rotation choices (at most ``limit`` runs)."""
    runs: list[HalfPoset] = []

    def rec(prefix: list[int]) -> None:
        if len(runs) >= limit:
            return
        branch: list[list[int]] = []

        def policy(p, cands):
            k = len(branch)
            branch.append(list(cands))
            return prefix[k] if k < len(prefix) else cands[0]

        h = halfcut(irr, policy)
        k = len(prefix)
        if k >= len(branch):
            runs.append(h)
            return
        for c in branch[k]:
            rec(prefix + [c])

    rec([])
    return runs


def sigma(half: HalfPoset, subset: Iterable[int]) -> frozenset[int]:
    """``S`` plus the dual of every rotation of ``P''`` outside ``S``."""
    subset = frozenset(subset)
    kept = half.kept
    if not subset <= kept:
        raise InputError("sigma takes a subset of the half POSET")
    pairing = half.parent.pairing
    return subset | frozenset(pairing[r] for r in kept - subset)


@dataclass(frozen=True, order=True)
class ProhibitedPair:
    r1: int
    r2: int


def prohibited_pairs(half: HalfPoset, minimal: bool = True) -> list[ProhibitedPair]:
    """Unordered pairs {R1, R2} of ``P''`` with dual(R2) before R1 in ``P'``.

    The relation is symmetric (duality reverses the order), so each pair is
    reported once, oriented so that ``r1`` has the smaller up-set in ``P''``
    (ties: earlier in the topological order).  Serialization deletes the
    branch of ``r1`` from the upper part.

    Only minimal pairs are kept: a pair whose members both lie at or below
    the members of another pair makes that other pair redundant, since a
    closed subset holding the larger pair holds the smaller one too.  Use
    ``minimal=False`` for the raw relation.
    """
    order = half.parent.poset.order
    pairing = half.parent.pairing
    kept = sorted(half.kept, key=order.index.__getitem__)
    sub = half.poset.order
    raw = [(a, b) for i, a in enumerate(kept) for b in kept[i + 1:] if order.precedes(pairing[b], a)]

    def le(x, y):
        return x == y or sub.precedes(x, y)

    if minimal:
        raw = [(a, b) for a, b in raw
               if not any((c, d) != (a, b) and ((le(c, a) and le(d, b)) or (le(c, b) and le(d, a)))
                          for c, d in raw)]
    found = []
    for a, b in raw:
        ua, ub = len(sub.up_closure([a])), len(sub.up_closure([b]))
        found.append(ProhibitedPair(a, b) if ua <= ub else ProhibitedPair(b, a))
    return found


def avoids(subset: Iterable[int], pairs: Iterable[ProhibitedPair]) -> bool:
    subset = set(subset)
    return not any(p.r1 in subset and p.r2 in subset for p in pairs)


# -- serialization -------------------------------------------------------------

@dataclass(frozen=True)
class Lower:
    """Renamed copy of a half-POSET rotation in the lower part."""

    rid: int


@dataclass(frozen=True, eq=False)
class SerializedPoset:
    half: HalfPoset
    pair: ProhibitedPair | None
    poset: Poset
    upper: tuple[int, ...]
    lower: tuple[Lower, ...]
    rename: Mapping[Lower, int]

    @property
    def upper_set(self) -> frozenset[int]:
        return frozenset(self.upper)

    def a_only(self) -> Poset:
        """Rotations of ``P''`` preceded by neither member of the pair."""
        sub = self.half.poset.order
        if self.pair is None:
            return sub
        gone = sub.up_closure([self.pair.r1, self.pair.r2])
        return sub.restrict([r for r in sub.labels if r not in gone])


def serialize(half: HalfPoset, pair: ProhibitedPair | None) -> SerializedPoset:
    """Upper part ``P''`` minus the branch of ``r1``; below it a renamed ``P''`` minus the branch of ``r2``.

    Every lower rotation succeeds every upper one.  Rotations reachable from
    both members can never be used and drop out of both parts.  With no
    pair the result is ``P''`` itself.
    """
    sub = half.poset.order
    if pair is None:
        return SerializedPoset(half, None, sub, tuple(sub.labels), (), {})
    raw = {frozenset((p.r1, p.r2)) for p in prohibited_pairs(half, minimal=False)}
    if frozenset((pair.r1, pair.r2)) not in raw:
        raise InputError(f"({half.poset[pair.r1]}, {half.poset[pair.r2]}) is not a prohibited pair")
    upper_keep = [r for r in sub.labels if r not in sub.up_closure([pair.r1])]
    lower_keep = [r for r in sub.labels if r not in sub.up_closure([pair.r2])]
    upper = sub.restrict(upper_keep)
    lower = sub.restrict(lower_keep)
    names = {r: Lower(r) for r in lower.labels}
    edges = list(upper.cover_edges())
    edges += [(names[a], names[b]) for a, b in lower.cover_edges()]
    edges += [(s, names[t]) for s in upper.sinks() for t in lower.maximal()]
    poset = Poset(list(upper.labels) + [names[r] for r in lower.labels], edges)
    return SerializedPoset(half, pair, poset, tuple(upper.labels), tuple(names[r] for r in lower.labels),
                           {v: k for k, v in names.items()})


def delta(ser: SerializedPoset, subset: Iterable[Hashable]) -> frozenset[int]:
    subset = frozenset(subset)
    if not subset <= set(ser.poset.labels) or not ser.poset.is_closed(subset):
        raise ContractViolation("delta needs a closed subset of the serialized POSET")
    if subset <= ser.upper_set:
        return subset
    return frozenset(ser.rename[x] for x in subset - ser.upper_set)


def label_text(ser: SerializedPoset, label: Hashable, full: bool = False) -> str:
    """Rotation text for a serialized label; lower copies get primed entries."""
    if isinstance(label, Lower):
        rot = ser.half.poset[label.rid]
        if full:
            return ",".join(f"({m}',{w}')" for m, w in rot.pairs)
        return "(" + ",".join(f"{w}'" for w in rot.women) + ")"
    rot = ser.half.poset[label]
    return rot.full() if full else rot.short()


# -- XOR enumeration -----------------------------------------------------------

def enumerate_sp_via_xor(doubled: DoubledInstance, poset: RotationPoset | None = None,
                         pairing: Mapping[int, int] | None = None) -> list[Matching]:
    """SP stable matchings of the doubled instance: closed subsets meeting the XOR condition."""
    if poset is None:
        poset = rotation_poset(doubled.inner)
    if pairing is None:
        pairing = dual_pairing(doubled, poset)
    out = []
    for s in poset.order.closed_subsets():
        if xor_condition(poset, pairing, s):
            m = matching_of(poset, s)
            if not (m.is_perfect and is_same_position(doubled, m)):
                raise InternalInvariantError(f"XOR subset gave a non-SP matching {m}")
            out.append(m)
    return out


# -- realization ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RealizedInstance:
    """Marriage instance whose rotation POSET is a verified copy of ``serialized.poset``."""

    instance: MarriageInstance
    man_names: tuple[str, ...]
    woman_names: tuple[str, ...]
    poset: RotationPoset
    labels: Mapping[int, Hashable]
    serialized: SerializedPoset
    gadgets: int = 0
    links: int = 0

    def subset(self, matching: Matching) -> frozenset:
        """Closed subset of the serialized POSET reached by a stable ``matching``."""
        return frozenset(self.labels[r] for r in subset_of(self.poset, matching))


def _restricted_lists(p_prime: RotationPoset, rids: Iterable[int]) -> dict[int, list[int]]:
    """Each man's partners over the rotations ``rids`` in elimination order."""
    rows: dict[int, list[int]] = {}
    for rid in p_prime.order.linear_extension(rids):
        for m, old, new in p_prime[rid].moves():
            row = rows.setdefault(m, [old])
            if row[-1] != old:
                row.append(old)
            row.append(new)
    return rows


class _Builder:
    def __init__(self, women_rank):
        self.women_rank = women_rank
        self.men: list[list] = []      # per man: list of woman keys
        self.man_key: dict = {}
        self.woman_key: dict = {}
        self.women_lists: dict = {}
        self.man_names: list[str] = []
        self.woman_names: list[str] = []

    def man(self, key, name):
        if key not in self.man_key:
            self.man_key[key] = len(self.men)
            self.men.append([])
            self.man_names.append(name)
        return self.man_key[key]

    def woman(self, key, name):
        if key not in self.woman_key:
            self.woman_key[key] = len(self.woman_names)
            self.woman_names.append(name)
            self.women_lists[self.woman_key[key]] = []
        return self.woman_key[key]

    def add_part(self, rows: dict[int, list[int]], tag: str, suffix: str):
        for m in sorted(rows):
            i = self.man((tag, m), f"{m}{suffix}")
            self.men[i] = [self.woman((tag, w), f"{w}{suffix}") for w in rows[m]]
        # women rank their suitors as in the source instance
        suitors: dict[int, list[int]] = {}
        for m in sorted(rows):
            for w in rows[m]:
                suitors.setdefault(w, []).append(m)
        for w, ms in suitors.items():
            ms.sort(key=lambda m: self.women_rank[w][m])
            self.women_lists[self.woman_key[(tag, w)]] = [self.man_key[(tag, m)] for m in ms]

    def instance(self) -> MarriageInstance:
        men = [[w + 1 for w in row] for row in self.men]
        women = [[m + 1 for m in self.women_lists[w]] for w in range(len(self.woman_names))]
        return MarriageInstance(men, women)


def _gadget_names(count: int) -> list[tuple[str, str]]:
    if count == 1:
        return [("a", "b")]
    return [(f"a{i}", f"b{i}") for i in range(1, count + 1)]


def _source_rotation(ser: SerializedPoset, label: Hashable) -> tuple[str, "Rotation"]:
    p_prime = ser.half.parent.poset
    if isinstance(label, Lower):
        return "L", p_prime[label.rid]
    return "U", p_prime[label]


def _insert_link(b: _Builder, x: tuple, y: tuple) -> bool:
    """Make rotation ``x`` precede ``y`` by a between-partners insertion.

    A woman of ``x``, who leaves ``v`` for someone better when ``x`` goes,
    is placed right after the old partner of a man of ``y``, and that man
    right above ``v`` on her list.  Only entries a splice never rewrites
    (old partners) are used as anchors.
    """
    (tx, rx), (ty, ry) = x, y
    for v, w, _new in rx.moves():
        wi, vi = b.woman_key[(tx, w)], b.man_key[(tx, v)]
        wl = b.women_lists[wi]
        for m, old, _ in ry.moves():
            mi = b.man_key[(ty, m)]
            row = b.men[mi]
            if wi in row:
                continue
            row.insert(row.index(b.woman_key[(ty, old)]) + 1, wi)
            wl.insert(wl.index(vi), mi)
            return True
    return False


def _splice(b: _Builder, x: tuple, y: tuple, names: tuple[str, str], used: set) -> bool:
    """Fresh man ``a`` and woman ``b`` splice a man of ``y`` into ``x``."""
    (tx, rx), (ty, ry) = x, y
    xs = [mv for mv in rx.moves() if (tx, mv[0]) not in used]
    ys = [mv for mv in ry.moves() if (ty, mv[0]) not in used]
    if not xs or not ys:
        return False
    (u, _w_u, w_next), (m2, w2, _) = xs[0], ys[0]
    used.update({(tx, u), (ty, m2)})
    ui, wi_next = b.man_key[(tx, u)], b.woman_key[(tx, w_next)]
    mi, wi2 = b.man_key[(ty, m2)], b.woman_key[(ty, w2)]
    an, bn = names
    gb = b.woman(("gadget", an), bn)
    ga = b.man(("gadget", an), an)
    b.men[ui] = [gb if w == wi_next else w for w in b.men[ui]]
    b.men[ga] = [wi2, wi_next]
    b.men[mi] = [gb] + b.men[mi]
    b.women_lists[gb] = [ui, mi]
    b.women_lists[wi2] = b.women_lists[wi2] + [ga]
    b.women_lists[wi_next] = [ga if m == ui else m for m in b.women_lists[wi_next]]
    return True


def realize(ser: SerializedPoset) -> RealizedInstance:
    """Marriage instance realizing the serialized POSET, built from the trimmed tables.

    The upper part keeps each involved man's partners over its rotations, the
    lower part is a renamed copy of the same construction, and the two are
    linked so that no lower root is exposed before every upper sink is gone:
    a fresh man ``a`` and woman ``b`` splice a lower-root man into an
    upper-sink rotation, e.g. ``(3,10)`` becomes ``(3,b,3',10)``.  When a
    rotation runs out of unused men the link is made instead by inserting the
    sink's woman between the root man's two partners.

    Restricting the tables can lose a precedence whose witness lay outside
    the kept rotations; every lost cover relation gets the same insertion.
    The result is checked against the serialized POSET and rejected loudly
    if the orders still differ.
    """
    p_prime = ser.half.parent.poset
    target = ser.poset
    b = _Builder(p_prime.instance.women_rank)
    b.add_part(_restricted_lists(p_prime, ser.upper), "U", "")
    if ser.lower:
        b.add_part(_restricted_lists(p_prime, [ser.rename[x] for x in ser.lower]), "L", "'")
    source = {}
    for label in target.labels:
        tag, rot = _source_rotation(ser, label)
        for m, w in rot.pairs:
            source[(b.man_key[(tag, m)], b.woman_key[(tag, w)])] = label

    wiring = [(x, y) for x, y in target.cover_edges() if not isinstance(x, Lower) and isinstance(y, Lower)]
    used: set = set()
    names = iter(_gadget_names(len(wiring)))
    gadgets = links = 0
    for x, y in wiring:
        sx, sy = _source_rotation(ser, x), _source_rotation(ser, y)
        if _splice(b, sx, sy, next(names), used):
            gadgets += 1
        elif _insert_link(b, sx, sy):
            links += 1
        else:
            raise InternalInvariantError(f"cannot link {label_text(ser, x)} to {label_text(ser, y)}")

    covers = target.cover_edges()
    for _ in range(len(covers) + 1):
        inst = b.instance()
        poset = rotation_poset(inst)
        labels = {}
        for rid, rot in poset.rotations.items():
            hit = {source[(m - 1, w - 1)] for m, w in rot.pairs if (m - 1, w - 1) in source}
            if len(hit) != 1:
                raise InternalInvariantError(f"realized rotation {rot.full()} matches {len(hit)} source rotations")
            labels[rid] = hit.pop()
        if len(set(labels.values())) != len(target) or len(labels) != len(target):
            raise InternalInvariantError("realized instance does not have one rotation per serialized rotation")
        back = {v: k for k, v in labels.items()}
        for a in poset.ids:
            for c in poset.ids:
                if poset.order.precedes(a, c) and not target.precedes(labels[a], labels[c]):
                    raise InternalInvariantError("realized instance orders rotations the serialized POSET leaves free")
        missing = [(x, y) for x, y in covers if not poset.order.precedes(back[x], back[y])]
        if not missing:
            return RealizedInstance(inst, tuple(b.man_names), tuple(b.woman_names), poset, labels, ser,
                                    gadgets, links)
        for x, y in missing:
            if not _insert_link(b, _source_rotation(ser, x), _source_rotation(ser, y)):
                raise InternalInvariantError(f"cannot link {label_text(ser, x)} to {label_text(ser, y)}")
            links += 1
    raise InternalInvariantError("realized rotation order differs from the serialized POSET")


# -- end to end ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReductionResult:
    """Roommate instance reduced to ``marriage_out`` plus the decoding chain.

    decode: stable matching of ``marriage_out`` -> closed subset of the
    serialized POSET -> ``delta`` -> closed subset of ``P''`` -> ``sigma`` ->
    closed subset of ``P'`` -> SP matching of the doubled instance -> roommate
    matching.
    """

    origin: RoommateInstance
    doubled: DoubledInstance
    irreducible: IrreducibleResult
    half: HalfPoset
    pairs: tuple[ProhibitedPair, ...]
    serialized: SerializedPoset
    realized: RealizedInstance

    @property
    def marriage_out(self) -> MarriageInstance:
        return self.realized.instance

    def decode_subset(self, subset: Iterable[Hashable]) -> RoommateMatching:
        s = delta(self.serialized, subset)
        lifted = sigma(self.half, s)
        p_prime = self.irreducible.poset
        if not p_prime.order.is_closed(lifted):
            raise InternalInvariantError(f"sigma image of {sorted(s)} is not closed")
        sp = matching_of(p_prime, lifted)
        return to_roommate_matching(self.doubled, sp)

    def decode(self, matching: Matching) -> RoommateMatching:
        return self.decode_subset(self.realized.subset(matching))

    def decode_table(self) -> list[tuple[Matching, RoommateMatching]]:
        """Every stable matching of ``marriage_out`` with its roommate matching."""
        out = []
        for s in self.realized.poset.order.closed_subsets():
            m = matching_of(self.realized.poset, s)
            out.append((m, self.decode_subset(self.realized.labels[r] for r in s)))
        return out


def reduce(instance: RoommateInstance, pick: PickPolicy | str | None = None) -> ReductionResult:
    outcome, _ = srm(instance)
    if not outcome.ok:
        raise NoStableMatching(f"no stable matching ({outcome.failure.value})")
    doubled = double(instance)
    poset = rotation_poset(doubled.inner)
    irr = make_irreducible(poset, dual_pairing(doubled, poset))
    if pick is None or isinstance(pick, str):
        pick = pick_rotation(irr.poset, pick)
    half = halfcut(irr, pick)
    pairs = prohibited_pairs(half)
    if len(pairs) > 1:
        raise MultipleProhibitedPairs(len(pairs))
    ser = serialize(half, pairs[0] if pairs else None)
    return ReductionResult(instance, doubled, irr, half, tuple(pairs), ser, realize(ser))
