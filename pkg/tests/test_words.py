import pytest
from hypothesis import given, strategies as st

from img_branch.words import (
    GenWord,
    WordError,
    beta,
    commutator_word,
    e_word,
    ell,
    gword,
    kword,
    phi,
    phi_power,
    relator_roots,
    relator_stream,
    relators_text,
)

pos_words = st.text(alphabet="abc", max_size=30).map(gword)


def test_parse_forms():
    assert str(GenWord.parse("c x c y^-1 x^-1", "mixed")) == "cxcy^-1x^-1"
    assert kword("x^-2").letters == (("x", -1), ("x", -1))
    assert kword("y⁻¹") == kword("y^-1")
    assert len(kword("1")) == 0 and len(gword("")) == 0
    with pytest.raises(WordError):
        kword("q")
    with pytest.raises(WordError):
        gword("a$b")


def test_word_operations():
    w = kword("x y^-1")
    assert w.inverse() == kword("y x^-1")
    assert (w + w.inverse()).free_reduce() == GenWord("K")
    assert gword("abba").reduce_involutions() == GenWord("G")
    assert str(commutator_word(kword("x"), kword("y"))) == "xyx^-1y^-1"
    assert (gword("ab") * 3) == gword("ababab")


def test_phi_substitution():
    assert phi(gword("abc")) == gword("bcaba")
    assert phi_power(gword("a"), 3) == gword("aba")
    with pytest.raises(WordError):
        phi(kword("x"))
    with pytest.raises(WordError):
        phi(GenWord("G", (("a", -1),)))


def test_parities():
    assert ell(gword("abcacb")) == 0  # four letters from {a, c}
    assert beta(gword("abcacb")) == 0
    assert ell(gword("abcab")) == 1
    assert ell(gword("acb")) == 0 and beta(gword("acb")) == 1
    assert e_word(kword("x y^-1 z")) == 1
    assert e_word(kword("x^-2")) == 0


def test_relator_roots_have_even_b_count():
    roots = relator_roots()
    assert len(roots) == 7
    assert all(beta(r) == 0 for r in roots)
    assert str(roots[2]) == "cabcba"


def test_relator_stream_shape():
    stream = relator_stream(2)
    assert len(stream) == 21
    n, i, w = stream[-1]
    assert (n, i) == (2, 6)
    assert w == phi_power(relator_roots()[6], 2) * 2
    assert relators_text(0).splitlines()[0] == "aa"
    with pytest.raises(ValueError):
        relator_stream(-1)


@given(pos_words)
def test_phi_swaps_ell_and_beta(w):
    p = phi(w)
    assert ell(p) == beta(w)
    assert beta(p) == ell(w)


@given(pos_words, st.integers(0, 5))
def test_parity_of_powers(w, n):
    assert ell(w * n) == (n * ell(w)) % 2
    assert beta(w * n) == (n * beta(w)) % 2
