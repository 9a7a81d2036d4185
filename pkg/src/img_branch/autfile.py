"""Plain-text automaton files.

Example::

    automaton IMG(z^2+i)
    alphabet 0 1
    identity 1
    state 1: 0/0 -> 1, 1/1 -> 1
    state a: 0/1 -> 1, 1/0 -> 1
    state b: 0/0 -> a, 1/1 -> c
    state c: 0/0 -> b, 1/1 -> 1

``#`` starts a comment. ``alphabet`` defaults to ``0 1``; ``identity`` is
optional. Each transition is ``input/output -> next``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .mealy import AutomatonError, MealyAutomaton

_NAME = re.compile(r"[A-Za-z0-9_']+")
_TRANSITION = re.compile(r"\s*(\d+)\s*/\s*(\d+)\s*->\s*([A-Za-z0-9_']+)\s*")

SHIPPED = "img_z2_i.aut"


class AutomatonFormatError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class ParsedAutomaton:
    name: str | None
    automaton: MealyAutomaton


def parse_automaton(text: str) -> ParsedAutomaton:
    title = None
    alphabet: list[int] | None = None
    identity: tuple[str, int, int] | None = None
    states: dict[str, dict[int, tuple[int, str, int, int]]] = {}
    order: list[str] = []
    where: dict[str, tuple[int, int]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        body = line.lstrip()
        if not body:
            continue
        col0 = len(line) - len(body) + 1
        keyword, _, rest = body.partition(" ")
        rest_col = col0 + len(keyword) + 1
        if keyword == "automaton":
            title = rest.strip() or None
        elif keyword == "alphabet":
            try:
                alphabet = [int(tok) for tok in rest.split()]
            except ValueError:
                raise AutomatonFormatError("alphabet letters must be integers", lineno, rest_col) from None
            if alphabet != list(range(len(alphabet))) or len(alphabet) < 2:
                raise AutomatonFormatError("alphabet must be 0 1 ... d-1 with d >= 2", lineno, rest_col)
        elif keyword == "identity":
            name = rest.strip()
            if not _NAME.fullmatch(name):
                raise AutomatonFormatError(f"bad state name {name!r}", lineno, rest_col)
            identity = (name, lineno, rest_col)
        elif keyword == "state":
            head, colon, arrows = rest.partition(":")
            name = head.strip()
            if not colon:
                raise AutomatonFormatError("expected ':' after state name", lineno, rest_col + len(rest))
            if not _NAME.fullmatch(name):
                raise AutomatonFormatError(f"bad state name {name!r}", lineno, rest_col)
            if name in states:
                raise AutomatonFormatError(f"state {name!r} defined twice", lineno, rest_col)
            states[name] = {}
            order.append(name)
            where[name] = (lineno, col0)
            col = rest_col + len(head) + 1
            for piece in arrows.split(","):
                m = _TRANSITION.fullmatch(piece)
                if not m:
                    raise AutomatonFormatError("expected 'input/output -> next'", lineno, col)
                x, y = int(m.group(1)), int(m.group(2))
                if x in states[name]:
                    raise AutomatonFormatError(
                        f"state {name!r} has two transitions on input {x}", lineno, col + m.start(1)
                    )
                states[name][x] = (y, m.group(3), lineno, col + m.start(3))
                col += len(piece) + 1
        else:
            raise AutomatonFormatError(f"unknown keyword {keyword!r}", lineno, col0)

    if not order:
        raise AutomatonFormatError("no states", max(1, len(text.splitlines())), 1)
    letters = alphabet or [0, 1]
    d = len(letters)
    outputs, targets = [], []
    for name in order:
        row = states[name]
        lineno, col = where[name]
        if sorted(row) != letters:
            raise AutomatonFormatError(f"state {name!r} needs one transition per letter 0..{d - 1}", lineno, col)
        outs = []
        tgts = []
        for x in letters:
            y, nxt, tl, tc = row[x]
            if y >= d:
                raise AutomatonFormatError(f"output {y} outside the alphabet", tl, tc)
            if nxt not in states:
                raise AutomatonFormatError(f"unknown state {nxt!r}", tl, tc)
            outs.append(y)
            tgts.append(order.index(nxt))
        if sorted(outs) != letters:
            raise AutomatonError(f"state {name!r} is not invertible: outputs {outs} (line {lineno})")
        outputs.append(tuple(outs))
        targets.append(tuple(tgts))
    ident = None
    if identity is not None:
        name, lineno, col = identity
        if name not in states:
            raise AutomatonFormatError(f"unknown identity state {name!r}", lineno, col)
        ident = order.index(name)
    return ParsedAutomaton(title, MealyAutomaton(tuple(order), tuple(outputs), tuple(targets), ident))


def format_automaton(automaton: MealyAutomaton, name: str | None = None) -> str:
    lines = []
    if name:
        lines.append(f"automaton {name}")
    lines.append("alphabet " + " ".join(str(x) for x in range(automaton.degree)))
    if automaton.identity_state is not None:
        lines.append(f"identity {automaton.names[automaton.identity_state]}")
    for q, state in enumerate(automaton.names):
        arrows = ", ".join(
            f"{x}/{automaton.outputs[q][x]} -> {automaton.names[automaton.targets[q][x]]}"
            for x in range(automaton.degree)
        )
        lines.append(f"state {state}: {arrows}")
    return "\n".join(lines) + "\n"


def import_automaton(path: str | Path) -> MealyAutomaton:
    return parse_automaton(Path(path).read_text(encoding="utf-8")).automaton


def shipped_text() -> str:
    return resources.files("img_branch.data").joinpath(SHIPPED).read_text(encoding="utf-8")


def shipped_automaton() -> MealyAutomaton:
    return parse_automaton(shipped_text()).automaton


def isomorphic(a: MealyAutomaton, b: MealyAutomaton) -> bool:
    """Same automaton up to renaming states (names matched by a bijection)."""
    if len(a) != len(b) or a.degree != b.degree:
        return False
    ea, eb = a.elements(), b.elements()
    used = set()
    for name, g in ea.items():
        hit = next((m for m, h in eb.items() if m not in used and h == g), None)
        if hit is None:
            return False
        used.add(hit)
    return True
