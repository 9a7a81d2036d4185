from pathlib import Path

import pytest

from img_branch import autfile as F
from img_branch.levels import PermGroup, truncate
from img_branch.mealy import AutomatonError, build_base_automaton, order_up_to

DATA = Path(__file__).parent / "data"


def test_shipped_file_reproduces_base_automaton():
    A = F.shipped_automaton()
    assert F.isomorphic(A, build_base_automaton())
    assert F.parse_automaton(F.shipped_text()).name == "IMG(z^2+i)"


def test_round_trip():
    A = build_base_automaton()
    assert F.parse_automaton(F.format_automaton(A, "demo")).automaton == A


def test_relabeled_file_is_isomorphic():
    text = """
    identity e
    state q: 0/0 -> r, 1/1 -> e   # plays c
    state p: 0/1 -> e, 1/0 -> e
    state r: 0/0 -> p, 1/1 -> q
    state e: 0/0 -> e, 1/1 -> e
    """
    A = F.parse_automaton(text).automaton
    assert F.isomorphic(A, build_base_automaton())


def test_grigorchuk_file_loads():
    A = F.import_automaton(DATA / "grigorchuk.aut")
    assert A.names == ("a", "b", "c", "d", "e")
    gens = A.elements()
    assert [order_up_to(gens[s], 8) for s in "abcd"] == [2, 2, 2, 2]
    assert order_up_to(gens["a"] * gens["b"], 64) == 16
    orders = [PermGroup(n, [truncate(gens[s], n) for s in "abcd"]).order() for n in (1, 2, 3, 4)]
    assert orders == [2, 8, 2**7, 2**12]


def test_two_zero_outputs_is_invertibility_error():
    with pytest.raises(AutomatonError, match="'s'"):
        F.parse_automaton("state s: 0/0 -> s, 1/0 -> s")


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("state a: 0/1 -> a, 1/0 -> q", 1, 27),
        ("\nstate a 0/1 -> a", 2, 17),
        ("state a: 0/1 -> a\n", 1, 1),
        ("alphabet 0 1\nbogus", 2, 1),
        ("state a: 0/1 -> a, 1-0 -> a", 1, 19),
        ("state a: 0/1 -> a, 0/0 -> a", 1, 20),
        ("identity z\nstate a: 0/1 -> a, 1/0 -> a", 1, 10),
        ("alphabet 0 2", 1, 10),
        ("", 1, 1),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(F.AutomatonFormatError) as info:
        F.parse_automaton(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert f"line {line}, column {column}" in str(info.value)


def test_larger_alphabet():
    text = "alphabet 0 1 2\nstate r: 0/1 -> r, 1/2 -> r, 2/0 -> r"
    A = F.parse_automaton(text).automaton
    assert A.degree == 3
    assert order_up_to(A.element("r"), 5) == 3
