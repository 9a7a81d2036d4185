"""Reidemeister-Schreier data for K inside IMG(z^2 + i) and the parity maps
ell, beta, e."""

from __future__ import annotations

import random
from functools import lru_cache

from . import img
from .levels import truncate
from .mealy import TreeElement, equal
from .report import Report
from .words import (
    GenWord,
    beta,
    e_word,
    ell,
    gword,
    kword,
    phi,
    relator_roots,
    relator_stream,
)

SchreierWord = tuple[tuple[str, str], ...]  # ((t, alpha), ...) symbols s_{t,alpha}

_LETTERS = ("a", "b", "c")


class TransversalError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def _coset_table() -> tuple[dict[bytes, int], tuple[tuple[int, ...], ...]]:
    """Cosets of pi_3(K) in pi_3(G), indexed by the transversal, with the
    action of right multiplication by a, b, c."""
    K3 = img.k_level(3)
    keys: dict[bytes, int] = {}
    for i, t in enumerate(img.TRANSVERSAL):
        k = K3.coset_key(img.word_perm(t, 3))
        if k in keys:
            raise TransversalError(f"{t!r} and {img.TRANSVERSAL[keys[k]]!r} share a coset")
        keys[k] = i
    table = []
    for t in img.TRANSVERSAL:
        row = []
        for s in _LETTERS:
            k = K3.coset_key(img.word_perm(t + s, 3))
            if k not in keys:
                raise TransversalError(f"no representative for {t + s!r}")
            row.append(keys[k])
        table.append(tuple(row))
    return keys, tuple(table)


def coset_index(word: GenWord) -> int:
    """Index in the transversal of the coset ``word K``."""
    _, table = _coset_table()
    i = 0
    for name, _ in word.letters:  # involutions: a^-1 = a
        i = table[i][_LETTERS.index(name)]
    return i


def representative(word: GenWord) -> GenWord:
    """The transversal word ``t`` with ``word t^-1`` in K (decided at level 3)."""
    return gword(img.TRANSVERSAL[coset_index(word)])


def representative_by_membership(word: GenWord) -> GenWord:
    """Slow twin of ``representative``: test ``word t^-1`` in pi_3(K) directly."""
    K3 = img.k_level(3)
    p = truncate(img.element(word), 3)
    hits = [t for t in img.TRANSVERSAL if p * ~img.word_perm(t, 3) in K3]
    if len(hits) != 1:
        raise TransversalError(f"{len(hits)} representatives for {word}")
    return gword(hits[0])


def schreier_word(t: str, alpha: str) -> GenWord:
    """``t alpha R(t alpha)^-1`` as an S_G word (inverse spelled as reversal)."""
    r = representative(gword(t + alpha))
    return gword(t + alpha) + r.reversed()


def schreier_generator(t: str, alpha: str) -> TreeElement:
    return img.element(schreier_word(t, alpha))


@lru_cache(maxsize=None)
def schreier_table() -> dict[tuple[str, str], GenWord]:
    """``(t, alpha) -> S_K word`` for s_{t,alpha}."""
    table = {}
    for t in img.TRANSVERSAL:
        for alpha in _LETTERS:
            if alpha != "b":
                table[(t, alpha)] = GenWord("K")
            elif t.startswith("b"):
                table[(t, alpha)] = kword(img.SCHREIER_B_ROWS[t[1:]]).inverse()
            else:
                table[(t, alpha)] = kword(img.SCHREIER_B_ROWS[t])
    return table


def tau(word: GenWord) -> SchreierWord:
    """Reidemeister rewriting of a positive S_G word into Schreier symbols."""
    if word.alphabet != "G" or not word.is_positive():
        raise ValueError("tau is defined on positive S_G words")
    _, table = _coset_table()
    out = []
    i = 0
    for name, _ in word.letters:
        out.append((img.TRANSVERSAL[i], name))
        i = table[i][_LETTERS.index(name)]
    return tuple(out)


@lru_cache(maxsize=None)
def _symbol_parity() -> dict[tuple[str, str], int]:
    return {key: e_word(w) for key, w in schreier_table().items()}


def e_schreier(symbols: SchreierWord) -> int:
    """e of a Schreier-symbol word: each symbol counts the length of its S_K word."""
    par = _symbol_parity()
    return sum(par[s] for s in symbols) % 2


def e_tau_parity(word: GenWord) -> int:
    """``e(tau(word))`` without materializing the symbol list."""
    _, table = _coset_table()
    par = _symbol_parity()
    i, acc = 0, 0
    for name, _ in word.letters:
        acc ^= par[(img.TRANSVERSAL[i], name)]
        i = table[i][_LETTERS.index(name)]
    return acc


def conjugate_by_transversal(t: str, R: GenWord) -> GenWord:
    """``t R t^-1`` with ``t^-1`` spelled as the letter reversal of ``t``."""
    tw = gword(t)
    return tw + R + tw.reversed()


def e_conjugated_formula(t: str, R: GenWord) -> int:
    tw = gword(t)
    return (beta(R) * ell(tw) + e_tau_parity(R) + beta(tw) * ell(R)) % 2


# -- verification reports ----------------------------------------------------


def verify_transversal() -> Report:
    rep = Report("transversal")
    keys, _ = _coset_table()
    rep.add("16 distinct cosets of pi_3(K)", len(keys) == 16, cosets=len(keys))
    for t in img.TRANSVERSAL:
        u = t[1:] if t.startswith("b") else t
        rep.add(f"{t or '1'} has the form b^e u", set(u) <= {"a", "c"}, word=t or "1")
    return rep


def verify_schreier_table() -> Report:
    rep = Report("schreier-table")
    for u, kw in img.SCHREIER_B_ROWS.items():
        s = schreier_generator(u, "b")
        target = img.element(kword(kw)) if kw else img.identity()
        rep.add(
            f"s_({u or '1'},b) = {kw or '1'}",
            equal(s, target),
            g_word=str(schreier_word(u, "b")),
            k_word=kw or "1",
        )
        sb = schreier_generator("b" + u, "b")
        rep.add(f"s_(b{u},b) = s_({u or '1'},b)^-1", equal(sb, ~s))
    for t in img.TRANSVERSAL:
        for alpha in ("a", "c"):
            rep.add(
                f"s_({t or '1'},{alpha}) = 1",
                schreier_generator(t, alpha).is_identity(),
            )
    return rep


def verify_representatives() -> Report:
    """Examples of the representative map from the stalpha argument."""
    rep = Report("representative")
    for u in img.TRANSVERSAL[:8]:
        rep.add(f"R({u or '1'}b) = b{u}", str(representative(gword(u + "b"))) == str(gword("b" + u)))
        rep.add(f"R(b{u}b) = {u or '1'}", str(representative(gword("b" + u + "b"))) == str(gword(u)))
    rep.add("R(abab) = 1", len(representative(gword("abab"))) == 0)
    return rep


def verify_e_ell_link() -> Report:
    rep = Report("e-ell-link")
    table = schreier_table()
    for t in img.TRANSVERSAL:
        e = e_word(table[(t, "b")])
        rep.add(f"e(s_({t or '1'},b)) = ell({t or '1'})", e == ell(gword(t)), e=e, ell=ell(gword(t)))
    return rep


def verify_e_descends(depth: int = 6) -> Report:
    """All Reidemeister-Schreier relators of K have even e-parity."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    rep = Report("e-descends")
    table = schreier_table()
    for t in img.TRANSVERSAL:
        sw = schreier_word(t, "b")
        par = (e_tau_parity(sw) + e_word(table[(t, "b")])) % 2
        rep.add(f"e(tau(s_({t or '1'},b)) s^-1) = 0", par == 0, g_word=str(sw))
    worst = 0
    for n, i, R in relator_stream(depth):
        worst = max(worst, len(R))
        for t in img.TRANSVERSAL:
            par = e_tau_parity(conjugate_by_transversal(t, R))
            rep.add(f"e(tau(t R t^-1)) = 0 [n={n}, root={i}, t={t or '1'}]", par == 0, parity=par)
    rep.summary.update(
        depth=depth,
        first_family=len(img.TRANSVERSAL),
        conjugated_relators=len(rep.items) - len(img.TRANSVERSAL),
        longest_relator=worst,
    )
    return rep


def random_positive_word(rng: random.Random, max_len: int, min_len: int = 0) -> GenWord:
    k = rng.randint(min_len, max_len)
    return gword("".join(rng.choice(_LETTERS) for _ in range(k)))


def verify_conjugation_formula(samples: int = 100, max_len: int = 12, seed: int = 0) -> Report:
    rep = Report("e-tau-conjugation-formula")
    rng = random.Random(seed)
    for _ in range(samples):
        t = rng.choice(img.TRANSVERSAL)
        R = random_positive_word(rng, max_len)
        lhs = e_tau_parity(conjugate_by_transversal(t, R))
        rhs = e_conjugated_formula(t, R)
        rep.add(f"t={t or '1'}, R={R}", lhs == rhs, lhs=lhs, rhs=rhs)
    rep.summary.update(samples=samples, seed=seed)
    return rep


def verify_squared_words(samples: int = 200, max_len: int = 10, seed: int = 0) -> Report:
    rep = Report("e-tau-squared-words")
    rng = random.Random(seed)
    for _ in range(samples):
        Rp = random_positive_word(rng, max_len)
        lhs = e_tau_parity(Rp * 2)
        rep.add(f"R'={Rp}", lhs == ell(Rp) * beta(Rp), lhs=lhs, rhs=ell(Rp) * beta(Rp))
    for Rp in relator_roots():
        rep.add(f"beta({Rp}) = 0", beta(Rp) == 0)
    rep.summary.update(samples=samples, seed=seed)
    return rep


def verify_phi_duality(samples: int = 500, max_len: int = 20, seed: int = 0) -> Report:
    rep = Report("ell-beta-phi")
    rng = random.Random(seed)
    bad = 0
    for _ in range(samples):
        w = random_positive_word(rng, max_len)
        p = phi(w)
        if not (ell(p) == beta(w) and beta(p) == ell(w)):
            bad += 1
            rep.add(f"w={w}", False)
    rep.add(f"{samples} random words", bad == 0, failures=bad)
    return rep


def verify_ell_beta_descend(samples: int = 100, max_len: int = 12, seed: int = 0) -> Report:
    """ell and beta agree on a word and its transversal representative."""
    rep = Report("ell-beta-descend")
    rng = random.Random(seed)
    bad = []
    for _ in range(samples):
        w = random_positive_word(rng, max_len)
        r = representative(w)
        if (ell(w), beta(w)) != (ell(r), beta(r)):
            bad.append(str(w))
    rep.add(f"{samples} random words", not bad, failures=bad)
    for s in ("abab", "bcbc"):
        w = gword(s)
        rep.add(f"ell({s}) = beta({s}) = 0", ell(w) == beta(w) == 0)
    return rep


def verify_relators(depth: int = 3) -> Report:
    """Every relator phi^n(R')^2 with n <= depth is trivial in the automaton group."""
    rep = Report("relators-trivial")
    for n, i, R in relator_stream(depth):
        rep.add(f"n={n}, root={i}", img.element(R).is_identity(), length=len(R))
    return rep




def clear_caches() -> None:
    for f in (_coset_table, schreier_table, _symbol_parity):
        f.cache_clear()
