"""Shared resources for IMG(z^2 + i): generators, the subgroup K, the coset
transversal and cached level quotients."""

from __future__ import annotations

from functools import lru_cache

from . import levels
from .levels import LeafPermutation, PermGroup, truncate
from .mealy import MealyAutomaton, TreeElement, build_base_automaton
from .words import S_K, GenWord, evaluate, gword, kword

# S_K generators as S_G words (built from x = [a,b], y = [b,c])
K_DEFINITIONS = {
    "x": "abab",
    "y": "bcbc",
    "z": "a y a",
    "t": "c x c y^-1 x^-1",
    "w": "a t a",
}

TRANSVERSAL = (
    "", "a", "ac", "aca", "acac", "cac", "ca", "c",
    "b", "ba", "bac", "baca", "bacac", "bcac", "bca", "bc",
)

# s_{u,b} for u in the <a,c> row, as S_K words
SCHREIER_B_ROWS = {
    "": "",
    "a": "x",
    "ac": "z^-1 x",
    "aca": "w",
    "acac": "y^-1 w",
    "cac": "z^-1 t x",
    "ca": "t x",
    "c": "y^-1",
}


@lru_cache(maxsize=None)
def base_automaton() -> MealyAutomaton:
    return build_base_automaton()


@lru_cache(maxsize=None)
def generators() -> dict[str, TreeElement]:
    els = base_automaton().elements()
    return {name: els[name] for name in ("a", "b", "c")}


def identity() -> TreeElement:
    return base_automaton().element("1")


@lru_cache(maxsize=None)
def k_as_g_words() -> dict[str, GenWord]:
    """Each S_K generator spelled over S_G (free of inverses, involutions cancelled)."""
    out: dict[str, GenWord] = {}
    for name in S_K:
        text = K_DEFINITIONS[name]
        if all(ch in "abc" for ch in text):
            out[name] = gword(text)
            continue
        w = GenWord("G")
        for tok in GenWord.parse(text, "mixed").letters:
            letter, exp = tok
            piece = out[letter] if letter in out else gword(letter)
            w = w + (piece if exp == 1 else piece.reversed())
        out[name] = w.reduce_involutions()
    return out


def to_g_word(word: GenWord) -> GenWord:
    """Expand an S_K word over S_G (``s^-1`` spelled as the reversal of ``s``)."""
    if word.alphabet == "G":
        return word
    table = k_as_g_words()
    out = GenWord("G")
    for name, exp in word.letters:
        out = out + (table[name] if exp == 1 else table[name].reversed())
    return out


@lru_cache(maxsize=None)
def k_generators() -> dict[str, TreeElement]:
    gens = generators()
    return {name: evaluate(w, gens) for name, w in k_as_g_words().items()}


def element(word: GenWord | str, alphabet: str | None = None) -> TreeElement:
    if isinstance(word, str):
        alphabet = alphabet or ("K" if any(ch in "xyztw" for ch in word) else "G")
        word = GenWord.parse(word, alphabet)
    values = dict(generators())
    values.update(k_generators())
    return evaluate(word, values)


def transversal() -> list[GenWord]:
    return [gword(t) for t in TRANSVERSAL]


# -- level quotients --------------------------------------------------------


@lru_cache(maxsize=None)
def g_level(n: int) -> PermGroup:
    g = generators()
    G = PermGroup(n, [truncate(g[s], n) for s in ("a", "b", "c")])
    G.order()
    return G


@lru_cache(maxsize=None)
def word_perm(word: str, n: int) -> LeafPermutation:
    """Level-n image of an S_G word, multiplied out at the level."""
    gens = {s: truncate(e, n) for s, e in generators().items()}
    p = LeafPermutation.identity(n)
    for ch in word:
        p = p * gens[ch]
    return p


@lru_cache(maxsize=None)
def k_level(n: int) -> PermGroup:
    """pi_n(K) as the normal closure of the transversal conjugates of x, y."""
    kg = k_generators()
    seeds = []
    for t in TRANSVERSAL:
        tp = word_perm(t, n)
        for s in ("x", "y"):
            seeds.append(tp * truncate(kg[s], n) * ~tp)
    return levels.normal_closure(seeds, g_level(n))


@lru_cache(maxsize=None)
def k_level_xyztw(n: int) -> PermGroup:
    """pi_n(K) generated by the five S_K generators."""
    kg = k_generators()
    H = PermGroup(n, [truncate(kg[s], n) for s in S_K])
    H.order()
    return H


@lru_cache(maxsize=None)
def k_prime_level(n: int) -> PermGroup:
    """pi_n(K') = derived subgroup of pi_n(K), from the five-generator form."""
    return levels.derived_subgroup(k_level_xyztw(n))


@lru_cache(maxsize=None)
def stabilizer_level(n: int, m: int) -> PermGroup:
    """pi_n(St_G(m))."""
    return levels.kernel_to_level(g_level(n), m)


def clear_caches() -> None:
    """Drop every cached generator and level group (for cold timings)."""
    for f in (base_automaton, generators, k_as_g_words, k_generators, g_level, word_perm,
              k_level, k_level_xyztw, k_prime_level, stabilizer_level):
        f.cache_clear()
