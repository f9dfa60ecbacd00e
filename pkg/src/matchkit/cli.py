"""``matchkit`` command line.

Exit codes: 0 success or stable, 1 no stable matching or unstable, 2 usage
or input error, 3 more than one prohibited pair (unsupported reduction).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .core import MarriageInstance, Matching, RoommateInstance, RoommateMatching, check_stability
from .dag import Poset
from .doubling import double, dual_pairing, gap_vector, to_roommate_matching
from .errors import InputError, MatchkitError, MultipleProhibitedPairs, NoStableMatching, OracleBoundExceeded
from .halfcut import (Lower, halfcut, halfcut_all_picks, label_text, make_irreducible, pick_rotation, prohibited_pairs, reduce,
                      enumerate_sp_via_xor, SerializedPoset, serialize)
from .io import load_instance, render_instance
from .marriage import Rotation, RotationPoset, gale_shapley, rotation_poset
from .oracle import brute_force_sm, brute_force_sr
from .srm import srm

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_SCOPE = 0, 1, 2, 3


class Out:
    """Collects the human text or the single-line record for one command."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines: list[str] = []
        self.record: dict = {}

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def emit(self, command: str) -> None:
        if self.as_json:
            print(json.dumps({"command": command, **self.record}, separators=(",", ":")))
        else:
            for text in self.lines:
                print(text)


# -- rendering -------------------------------------------------------------------

def _woman_name(w: int, letters: bool) -> str:
    return chr(ord("a") + w - 1) if letters else str(w)


def _letters(args, n: int, doubled: bool) -> bool:
    return doubled and n <= 26 and not args.numeric


def render_marriage(m: Matching, letters: bool) -> str:
    return " ".join(f"{a}-{_woman_name(w, letters)}" for a, w in m.pairs)


def render_rotation(rot: Rotation, full: bool, letters: bool) -> str:
    if full:
        return ",".join(f"({m},{_woman_name(w, letters)})" for m, w in rot.pairs)
    return rot.short()


def _rotation_dot(title: str, labels: dict, edges) -> str:
    out = [f'digraph "{title}" {{', "  rankdir=TB;", "  node [shape=box];"]
    for key, text in labels.items():
        out.append(f'  "{key}" [label="{text}"];')
    for a, b in edges:
        out.append(f'  "{a}" -> "{b}";')
    out.append("}")
    return "\n".join(out)


def poset_dot(title: str, poset: RotationPoset, full: bool = False, letters: bool = False) -> str:
    labels = {f"r{r}": render_rotation(poset[r], full, letters) for r in poset.ids}
    return _rotation_dot(title, labels, [(f"r{a}", f"r{b}") for a, b in poset.order.cover_edges()])


def _ser_key(label) -> str:
    return f"l{label.rid}" if isinstance(label, Lower) else f"r{label}"


def serialized_dot(ser: SerializedPoset) -> str:
    labels = {_ser_key(x): label_text(ser, x) for x in ser.poset.labels}
    return _rotation_dot("serialized", labels, [(_ser_key(a), _ser_key(b)) for a, b in ser.poset.cover_edges()])


def parse_matching(text: str, n: int, n_women: int | None = None):
    pairs = []
    for token in text.replace(",", " ").split():
        a, sep, b = token.partition("-")
        if not sep:
            raise InputError(f"bad pair {token!r}; expected 'a-b'")
        if n_women is not None and b.isalpha() and len(b) == 1:
            b = str(ord(b.lower()) - ord("a") + 1)
        try:
            pairs.append((int(a), int(b)))
        except ValueError:
            raise InputError(f"bad pair {token!r}; expected 'a-b'") from None
    if n_women is None:
        return RoommateMatching.from_pairs(pairs, n)
    return Matching.from_pairs(pairs, n, n_women)


# -- commands --------------------------------------------------------------------

def _need_sr(inst, name: str) -> RoommateInstance:
    if not isinstance(inst, RoommateInstance):
        raise InputError(f"{name} needs a roommate ('sr') instance")
    return inst


def _marriage(inst) -> tuple[MarriageInstance, bool]:
    """The marriage instance to work on and whether it is a doubled one."""
    if isinstance(inst, RoommateInstance):
        return double(inst).inner, True
    return inst, False


def cmd_solve_sr(args, out: Out) -> int:
    inst = _need_sr(load_instance(args.file), "solve-sr")
    outcome, trace = srm(inst, args.policy)
    if args.trace and not args.json:
        letters = _letters(args, inst.n, True)
        for step in trace.steps:
            note = "" if step.through_row else " (via successor chain)"
            out.line(f"# row {step.row}: eliminate {render_rotation(step.rotation, args.full_rotations, letters)}{note} -> {step.gaps}")
    if outcome.ok:
        out.line(str(outcome.matching))
        out.record.update(status="stable", matching=[list(p) for p in outcome.matching.pairs])
        return EXIT_OK
    out.line("NO STABLE MATCHING")
    out.record.update(status="none", reason=outcome.failure.value)
    return EXIT_NO


def cmd_solve_sm(args, out: Out) -> int:
    inst = load_instance(args.file)
    marriage, doubled = _marriage(inst)
    m = gale_shapley(marriage, args.orientation)
    out.line(render_marriage(m, _letters(args, marriage.n_women, doubled)))
    out.record.update(status="stable", matching=[list(p) for p in m.pairs])
    return EXIT_OK


def cmd_gaps(args, out: Out) -> int:
    inst = _need_sr(load_instance(args.file), "gaps")
    d = double(inst)
    m0 = gale_shapley(d.inner, "man")
    if not m0.is_perfect:
        out.line("NOT PERFECT")
        out.record.update(status="not-perfect")
        return EXIT_NO
    g = gap_vector(d, m0, args.table)
    out.line(str(g))
    out.record.update(table=g.table, gaps=list(g.gaps), total=g.total)
    return EXIT_OK


def cmd_rotations(args, out: Out) -> int:
    inst = load_instance(args.file)
    marriage, doubled = _marriage(inst)
    p = rotation_poset(marriage)
    letters = _letters(args, marriage.n_women, doubled)
    dual = dual_pairing(double(inst), p) if doubled else {}
    rows = []
    for r in p.ids:
        text = render_rotation(p[r], args.full_rotations, letters)
        extra = f"  dual r{dual[r]}" if doubled else ""
        out.line(f"r{r} {text}{extra}")
        rows.append({"id": r, "pairs": [list(x) for x in p[r].pairs], **({"dual": dual[r]} if doubled else {})})
    out.record.update(rotations=rows)
    return EXIT_OK


def cmd_poset(args, out: Out) -> int:
    inst = load_instance(args.file)
    marriage, doubled = _marriage(inst)
    p = rotation_poset(marriage)
    letters = _letters(args, marriage.n_women, doubled)
    if args.dot:
        out.line(poset_dot("P", p, args.full_rotations, letters))
    else:
        for r in p.ids:
            out.line(f"r{r} {render_rotation(p[r], args.full_rotations, letters)}")
        for a, b in p.order.cover_edges():
            out.line(f"r{a} -> r{b}")
    out.record.update(rotations=len(p), edges=[list(e) for e in p.order.cover_edges()],
                      closed_subsets=p.order.count_closed_subsets())
    return EXIT_OK


def _half(inst: RoommateInstance, pick):
    d = double(inst)
    p = rotation_poset(d.inner)
    irr = make_irreducible(p, dual_pairing(d, p))
    return irr, halfcut(irr, pick_rotation(irr.poset, pick))


def cmd_halfcut(args, out: Out) -> int:
    inst = _need_sr(load_instance(args.file), "halfcut")
    irr, half = _half(inst, args.pick)
    p = irr.full
    if args.all_picks:
        seen = {}
        for h in halfcut_all_picks(irr):
            key = tuple(p[r].short() for r in h.picks)
            seen[key] = len(prohibited_pairs(h))
        for key, count in seen.items():
            out.line(f"picks {' '.join(key)}: {count} prohibited pair(s)")
        out.record.update(runs=[{"picks": list(k), "prohibited": c} for k, c in seen.items()])
        return EXIT_OK
    pairs = prohibited_pairs(half)
    if args.dot:
        out.line(poset_dot("P''", half.poset, args.full_rotations))
    else:
        out.line("forced: " + " ".join(p[r].short() for r in sorted(irr.forced)))
        out.line(f"irreducible: {len(irr.poset)} rotations")
        out.line("half: " + " ".join(p[r].short() for r in half.poset.ids))
        for a, b in half.poset.order.cover_edges():
            out.line(f"  {p[a].short()} -> {p[b].short()}")
        out.line(f"closed subsets: {half.poset.order.count_closed_subsets()}")
        out.line("prohibited: " + (" ".join(f"{{{p[x.r1].short()},{p[x.r2].short()}}}" for x in pairs) or "none"))
    out.record.update(forced=[p[r].short() for r in sorted(irr.forced)],
                      irreducible=len(irr.poset), half=[p[r].short() for r in half.poset.ids],
                      prohibited=[[p[x.r1].short(), p[x.r2].short()] for x in pairs])
    return EXIT_OK


def cmd_reduce(args, out: Out) -> int:
    inst = _need_sr(load_instance(args.file), "reduce")
    res = reduce(inst, args.pick)
    text = render_instance(res.marriage_out)
    names = res.realized
    header = ["# men: " + " ".join(f"{i}={n}" for i, n in enumerate(names.man_names, 1)),
              "# women: " + " ".join(f"{i}={n}" for i, n in enumerate(names.woman_names, 1))]
    if args.output:
        Path(args.output).write_text("\n".join(header) + "\n" + text, encoding="utf-8")
    else:
        for line in header + text.splitlines():
            out.line(line)
    table = res.decode_table()
    if args.dot:
        out.line(serialized_dot(res.serialized))
    out.line(f"# {len(table)} stable matchings -> {len({r.pairs for _, r in table})} roommate matchings")
    for m, r in table:
        named = " ".join(f"{names.man_names[a - 1]}-{names.woman_names[w - 1]}" for a, w in m.pairs)
        out.line(f"{named}  ->  {r}")
    out.record.update(prohibited=len(res.pairs), stable=len(table),
                      decode=[{"marriage": list(m.wife), "roommate": [list(p) for p in r.pairs]} for m, r in table])
    return EXIT_OK


def cmd_enumerate(args, out: Out) -> int:
    inst = load_instance(args.file)
    if isinstance(inst, MarriageInstance):
        if args.via != "oracle":
            raise InputError("marriage instances only support --via oracle")
        found = [str(m) for m in brute_force_sm(inst, args.bound or 8, threads=args.threads).all_stable]
    elif args.via == "oracle":
        found = [str(m) for m in brute_force_sr(inst, args.bound or 12, threads=args.threads).all_stable]
    elif args.via == "xor":
        d = double(inst)
        found = [str(to_roommate_matching(d, m)) for m in enumerate_sp_via_xor(d)]
    else:
        try:
            res = reduce(inst, args.pick)
        except NoStableMatching:
            found = []
        else:
            found = [str(r) for _, r in res.decode_table()]
    found = sorted(set(found))
    for line in found:
        out.line(line)
    out.record.update(via=args.via, matchings=found)
    return EXIT_OK if found else EXIT_NO


def cmd_verify(args, out: Out) -> int:
    inst = load_instance(args.file)
    if isinstance(inst, RoommateInstance):
        m = parse_matching(args.matching, inst.n)
    else:
        m = parse_matching(args.matching, inst.n_men, inst.n_women)
    rep = check_stability(inst, m)
    if rep.stable:
        out.line("STABLE")
    else:
        out.line("UNSTABLE")
        if rep.incomplete:
            out.line("incomplete: " + " ".join(map(str, rep.unmatched)))
        for a, b in rep.blocking_pairs:
            out.line(f"blocking: {a}-{b}")
    out.record.update(stable=rep.stable, blocking=[list(p) for p in rep.blocking_pairs],
                      unmatched=list(rep.unmatched))
    return EXIT_OK if rep.stable else EXIT_NO


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print one single-line JSON record")
    common.add_argument("--threads", type=int, default=1, help="worker processes for brute-force enumeration")
    common.add_argument("--numeric", action="store_true", help="print women as numbers even for small doubled instances")
    common.add_argument("--full-rotations", action="store_true", help="print rotations as full (man,woman) pairs")

    parser = argparse.ArgumentParser(prog="matchkit", description="Stable marriage and roommates toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-sr", parents=[common], help="solve a roommates instance")
    p.add_argument("file")
    p.add_argument("--policy", choices=["lowest", "highest", "random"], default="lowest")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_solve_sr)

    p = sub.add_parser("solve-sm", parents=[common], help="Gale-Shapley (doubled instance for sr files)")
    p.add_argument("file")
    p.add_argument("--orientation", choices=["man", "woman"], default="man")
    p.set_defaults(func=cmd_solve_sm)

    p = sub.add_parser("gaps", parents=[common], help="row gaps of the man-optimal doubled matching")
    p.add_argument("file")
    p.add_argument("--table", choices=["original", "trimmed"], default="original")
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("rotations", parents=[common], help="list rotations")
    p.add_argument("file")
    p.set_defaults(func=cmd_rotations)

    p = sub.add_parser("poset", parents=[common], help="rotation POSET")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_poset)

    p = sub.add_parser("halfcut", parents=[common], help="irreducible and half POSETs")
    p.add_argument("file")
    p.add_argument("--pick", default="auto", help="maximal rotation to take first, e.g. '(3,4)', or 'auto'")
    p.add_argument("--dot", action="store_true")
    p.add_argument("--all-picks", action="store_true", help="report prohibited pairs for every pick sequence")
    p.set_defaults(func=cmd_halfcut)

    p = sub.add_parser("reduce", parents=[common], help="reduce a roommates instance to a marriage instance")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--pick", default="auto")
    p.add_argument("--dot", action="store_true", help="also print the serialized POSET")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("enumerate", parents=[common], help="all stable matchings")
    p.add_argument("file")
    p.add_argument("--via", choices=["oracle", "xor", "reduction"], default="oracle")
    p.add_argument("--pick", default="auto")
    p.add_argument("--bound", type=int)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", parents=[common], help="check a matching for stability")
    p.add_argument("file")
    p.add_argument("--matching", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Out(args.json)
    try:
        code = args.func(args, out)
    except MultipleProhibitedPairs as exc:
        print(f"matchkit: {exc}", file=sys.stderr)
        out.record.update(status="out-of-scope", prohibited=exc.count)
        code = EXIT_SCOPE
        if not args.json:
            return code
    except NoStableMatching as exc:
        out.lines = ["NO STABLE MATCHING"]
        out.record.update(status="none")
        print(f"matchkit: {exc}", file=sys.stderr)
        code = EXIT_NO
    except (InputError, OracleBoundExceeded, OSError) as exc:
        print(f"matchkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MatchkitError as exc:
        print(f"matchkit: internal error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.emit(args.command)
    return code


if __name__ == "__main__":
    sys.exit(main())
