"""Formal words over named generators, with formal inverses.

Parity functions treat words as monoid elements: nothing here reduces a
word unless asked to.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

S_G = ("a", "b", "c")
S_K = ("x", "y", "z", "t", "w")

ALPHABETS = {"G": S_G, "K": S_K}

_TOKEN = re.compile(r"\s*([A-Za-z])(?:\^(-?\d+)|(⁻¹))?\s*")


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class GenWord:
    alphabet: str
    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        allowed = ALPHABETS.get(self.alphabet)
        for name, exp in self.letters:
            if exp not in (1, -1):
                raise WordError(f"exponent {exp} is not +-1")
            if allowed is not None and name not in allowed:
                raise WordError(f"letter {name!r} not in alphabet {self.alphabet}")

    @classmethod
    def parse(cls, text: str, alphabet: str = "G") -> "GenWord":
        """Parse ``"c x c y^-1 x^-1"``, ``"cxcy⁻¹x⁻¹"`` or ``"x^-2"`` style words."""
        letters = []
        pos = 0
        text = text.strip()
        if text in ("", "1"):
            return cls(alphabet)
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise WordError(f"cannot parse {text!r} at column {pos + 1}")
            name, exp = m.group(1), m.group(2)
            k = -1 if m.group(3) else int(exp) if exp is not None else 1
            letters += [(name, 1 if k > 0 else -1)] * abs(k)
            pos = m.end()
        return cls(alphabet, tuple(letters))

    def __str__(self):
        if not self.letters:
            return "1"
        return "".join(n if e == 1 else f"{n}^-1" for n, e in self.letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "GenWord") -> "GenWord":
        if other.alphabet != self.alphabet:
            raise WordError("alphabet mismatch")
        return GenWord(self.alphabet, self.letters + other.letters)

    def __mul__(self, k: int) -> "GenWord":
        return GenWord(self.alphabet, self.letters * k)

    def inverse(self) -> "GenWord":
        return GenWord(self.alphabet, tuple((n, -e) for n, e in reversed(self.letters)))

    def reversed(self) -> "GenWord":
        """Letter reversal; equals the inverse when every letter is an involution."""
        return GenWord(self.alphabet, tuple(reversed(self.letters)))

    def is_positive(self) -> bool:
        return all(e == 1 for _, e in self.letters)

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.letters)

    def free_reduce(self) -> "GenWord":
        out: list[tuple[str, int]] = []
        for n, e in self.letters:
            if out and out[-1] == (n, -e):
                out.pop()
            else:
                out.append((n, e))
        return GenWord(self.alphabet, tuple(out))

    def reduce_involutions(self) -> "GenWord":
        """For S_G words: drop inverses and cancel ``aa`` pairs."""
        out: list[str] = []
        for n, _ in self.letters:
            if out and out[-1] == n:
                out.pop()
            else:
                out.append(n)
        return gword("".join(out))


def gword(text: str) -> GenWord:
    return GenWord.parse(text, "G")


def kword(text: str) -> GenWord:
    return GenWord.parse(text, "K")


def commutator_word(u: GenWord, v: GenWord) -> GenWord:
    """``[u, v] = u v u^-1 v^-1``."""
    return u + v + u.inverse() + v.inverse()


def evaluate(word: GenWord, values: Mapping[str, object]):
    """Product of the letters' values, leftmost letter acting last."""
    from .mealy import identity, inverse

    result = None
    inverses: dict[str, object] = {}
    for name, e in word.letters:
        g = values[name]
        if e == -1:
            if name not in inverses:
                inverses[name] = inverse(g)
            g = inverses[name]
        result = g if result is None else result * g
    if result is None:
        return identity()
    return result


PHI = {"a": "b", "b": "c", "c": "aba"}


def phi(word: GenWord) -> GenWord:
    if word.alphabet != "G":
        raise WordError("phi is defined on S_G words")
    if not word.is_positive():
        raise WordError("phi is a monoid map on positive words")
    return gword("".join(PHI[n] for n in word.names()))


def phi_power(word: GenWord, k: int) -> GenWord:
    for _ in range(k):
        word = phi(word)
    return word


def ell(word: GenWord) -> int:
    """Parity of the number of ``a`` and ``c`` letters."""
    return sum(1 for n in word.names() if n in ("a", "c")) % 2


def beta(word: GenWord) -> int:
    """Parity of the number of ``b`` letters."""
    return sum(1 for n in word.names() if n == "b") % 2


def e_word(word: GenWord | Iterable) -> int:
    """Length parity; exponent signs are ignored."""
    return len(tuple(word)) % 2


RELATOR_ROOTS = (
    "a",
    "acac",
    "cabcba",  # [c,ab] = c ab c ba
    "cbabcbab",  # [c,bab]
    "cababacababa",  # [c,ababa]
    "cabababcbababa",  # [c,ababab]
    "cbabababcbababab",  # [c,bababab]
)


def relator_roots() -> list[GenWord]:
    return [gword(r) for r in RELATOR_ROOTS]


def relator_stream(depth: int) -> list[tuple[int, int, GenWord]]:
    """``(n, root index, phi^n(R')^2)`` for ``n = 0..depth`` over the seven roots."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    out = []
    current = relator_roots()
    for n in range(depth + 1):
        for i, r in enumerate(current):
            out.append((n, i, r * 2))
        current = [phi(r) for r in current]
    return out


def relators_text(depth: int) -> str:
    return "".join(str(w) + "\n" for _, _, w in relator_stream(depth))
