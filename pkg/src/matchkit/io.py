"""Plain-text instance files.

::

    # roommates: header then one line per agent
    sr 4
    1: 2 3 4
    2: 3 4 1
    ...

    # marriage with incomplete lists: section markers separate the sides
    smi 2 2
    men
    1: 1 2
    2: 2
    women
    1: 1
    2: 1 2

``#`` starts a comment; blank lines are ignored.  Every agent must appear
exactly once.  Errors carry 1-based line numbers.
"""

from __future__ import annotations

from pathlib import Path

from .core import MarriageInstance, RoommateInstance
from .errors import InputError, ParseError


def _content_lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _int(token: str, no: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", no) from None
    if value < 1:
        raise ParseError(f"agent ids are positive, got {value}", no)
    return value


def _row(line: str, no: int, count: int, rows: dict) -> None:
    head, sep, rest = line.partition(":")
    if not sep:
        raise ParseError("expected '<agent>: <list>'", no)
    agent = _int(head.strip(), no)
    if agent > count:
        raise ParseError(f"agent {agent} exceeds declared count {count}", no)
    if agent in rows:
        raise ParseError(f"agent {agent} listed twice", no)
    entries = [_int(t, no) for t in rest.split()]
    if len(set(entries)) != len(entries):
        dup = next(x for x in entries if entries.count(x) > 1)
        raise ParseError(f"agent {agent}: duplicate entry {dup}", no)
    rows[agent] = (entries, no)


def parse_instance(text: str) -> RoommateInstance | MarriageInstance:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty instance file")
    no, header = lines[0]
    words = header.split()
    kind = words[0].lower()
    if kind == "sr":
        if len(words) != 2:
            raise ParseError("header must be 'sr <n>'", no)
        n = _int(words[1], no)
        if n % 2:
            raise ParseError(f"roommate instances need an even number of agents, got {n}", no)
        rows: dict = {}
        for no, line in lines[1:]:
            _row(line, no, n, rows)
        missing = sorted(set(range(1, n + 1)) - set(rows))
        if missing:
            raise ParseError(f"no preference line for agents {missing}")
        for agent, (entries, no) in rows.items():
            if agent in entries:
                raise ParseError(f"agent {agent} lists itself", no)
            if any(x > n for x in entries):
                raise ParseError(f"agent {agent}: entry out of range 1..{n}", no)
            if len(entries) != n - 1:
                raise ParseError(f"agent {agent}: list must rank all {n - 1} other agents", no)
        return RoommateInstance([rows[j][0] for j in range(1, n + 1)])
    if kind == "smi":
        if len(words) != 3:
            raise ParseError("header must be 'smi <n_men> <n_women>'", no)
        n_men, n_women = _int(words[1], no), _int(words[2], no)
        sides = {"men": {}, "women": {}}
        current = None
        for no, line in lines[1:]:
            if line.lower() in sides:
                current = line.lower()
                continue
            if current is None:
                raise ParseError("expected 'men' or 'women' section marker", no)
            _row(line, no, n_men if current == "men" else n_women, sides[current])
        for side, count, other in (("men", n_men, n_women), ("women", n_women, n_men)):
            missing = sorted(set(range(1, count + 1)) - set(sides[side]))
            if missing:
                raise ParseError(f"no preference line for {side} {missing}")
            for agent, (entries, no) in sides[side].items():
                if any(x > other for x in entries):
                    raise ParseError(f"{side} {agent}: entry out of range 1..{other}", no)
        try:
            return MarriageInstance([sides["men"][m][0] for m in range(1, n_men + 1)],
                                    [sides["women"][w][0] for w in range(1, n_women + 1)])
        except InputError as exc:
            raise ParseError(str(exc)) from None
    raise ParseError(f"unknown problem kind {words[0]!r} (expected 'sr' or 'smi')", no)


def load_instance(path: str | Path) -> RoommateInstance | MarriageInstance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def render_instance(instance: RoommateInstance | MarriageInstance) -> str:
    if isinstance(instance, RoommateInstance):
        lines = [f"sr {instance.n}"]
        lines += [f"{j}: " + " ".join(map(str, row)) for j, row in enumerate(instance.prefs, 1)]
    else:
        lines = [f"smi {instance.n_men} {instance.n_women}", "men"]
        lines += [f"{m}: " + " ".join(map(str, row)) for m, row in enumerate(instance.men_prefs, 1)]
        lines.append("women")
        lines += [f"{w}: " + " ".join(map(str, row)) for w, row in enumerate(instance.women_prefs, 1)]
    return "\n".join(line.rstrip() for line in lines) + "\n"
