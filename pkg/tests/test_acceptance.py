"""Acceptance criteria, one test each. Every test records a PASS/FAIL line
that is printed in the terminal summary; timings are measured cold."""

import random
import time

import pytest

from img_branch import branch as B, img, levels, presentation as P, structure as S
from img_branch.branch import AbVector, SubgroupZ4_5
from img_branch.levels import truncate
from img_branch.mealy import act, equal, order_up_to, section
from img_branch.words import S_K, beta, ell, gword

RESULTS: list[str] = []


def cold():
    img.clear_caches()
    P.clear_caches()


@pytest.fixture
def criterion(request):
    """Yields a recorder; the test body runs cold and within the limit."""
    state = {}

    def record(number, title, limit, ok, detail=""):
        state.update(number=number, title=title, limit=limit, ok=ok, detail=detail)

    cold()
    start = time.perf_counter()
    yield record
    elapsed = time.perf_counter() - start
    ok = state.get("ok", False) and elapsed < state.get("limit", 0)
    line = (
        f"AC-{state.get('number', '?'):>2} {'PASS' if ok else 'FAIL'}  {state.get('title', request.node.name)}"
        f"  [{elapsed:.2f}s < {state.get('limit', 0)}s]  {state.get('detail', '')}".rstrip()
    )
    RESULTS.append(line)
    print(line)
    assert elapsed < state["limit"], f"time limit exceeded: {elapsed:.2f}s"


def test_ac01_orders(criterion):
    got = {s: order_up_to(img.element(s), 8) for s in ("a", "b", "c", "ac")}
    got.update({s: order_up_to(g, 8) for s, g in img.k_generators().items()})
    bca = order_up_to(img.element("bca"), 128)
    ok = got == {"a": 2, "b": 2, "c": 2, "ac": 4, **dict.fromkeys(S_K, 4)} and bca is None
    criterion(1, "orders", 1, ok, f"{got}, bca: none <= 128")
    assert ok


def test_ac02_section_identities(criterion):
    bad = [g for g, l, r in B.SECTION_IDENTITIES if not equal(img.element(g), B.pair(l, r))]
    ok = not bad and len(B.SECTION_IDENTITIES) == 11
    criterion(2, "section identities", 1, ok, f"{len(B.SECTION_IDENTITIES)} identities")
    assert ok


def test_ac03_conjugation_table(criterion):
    rep = B.verify_conjugation_table()
    ok = rep.ok and len(B.CONJUGATION_TABLE) == 15
    criterion(3, "conjugation table", 1, ok, "15 identities")
    assert ok


def test_ac04_index_anchor(criterion):
    indices = {n: levels.index(img.g_level(n), img.k_level(n)) for n in range(3, 9)}
    fp = levels.quotient_fingerprint(img.g_level(3), img.k_level(3))
    ok = set(indices.values()) == {16} and fp == S.c2_times_d4_fingerprint()
    criterion(4, "index anchor", 30, ok, f"indices {indices}, G/K fingerprint {fp.as_dict()}")
    assert ok


def test_ac05_stabilizer_absorption(criterion):
    st = levels.kernel_to_level(img.g_level(6), 5)
    Kp = img.k_prime_level(6)
    gens = st.strong_generators()
    ok = all(g in Kp for g in gens)
    criterion(5, "stabilizer absorption", 60, ok, f"{len(gens)} strong generators of pi_6(St_G(5))")
    assert ok


def test_ac06_abelian_invariants(criterion):
    inv = {n: levels.abelian_invariants(img.k_level_xyztw(n)).divisors for n in (5, 6, 7, 8)}
    rel = all(B.verify_relations_mod_derived(n).ok for n in (5, 6, 7, 8))
    ok = set(inv.values()) == {(4, 4, 4)} and rel
    criterion(6, "abelian invariants", 120, ok, f"{inv}, [t]=[y]^2 and [w]=[z]^2: {rel}")
    assert ok


def test_ac07_parity_suite(criterion):
    desc = P.verify_e_descends(6)
    first = [i for i in desc.items if i["check"].startswith("e(tau(s_")]
    conj = [i for i in desc.items if i["check"].startswith("e(tau(t R")]
    formula = P.verify_conjugation_formula(100, 12, seed=0)
    squared = P.verify_squared_words(200, 10, seed=0)
    ok = (
        desc.ok and len(first) == 16 and len(conj) == 7 * 16 * 7
        and formula.ok and len(formula.items) == 100
        and squared.ok and sum(i["check"].startswith("R'=") for i in squared.items) == 200
    )
    criterion(7, "parity suite", 30, ok, f"{len(first)} + {len(conj)} relator checks, 100 formula, 200 squared")
    assert ok


def test_ac08_schreier_table(criterion):
    rep = P.verify_schreier_table()
    rows = [i for i in rep.items if ",b) =" in i["check"] and not i["check"].endswith(")^-1")]
    trivial = [i for i in rep.items if i["check"].endswith(",a) = 1") or i["check"].endswith(",c) = 1")]
    ok = rep.ok and len(rows) == 8 and len(trivial) == 32
    criterion(8, "Schreier table", 5, ok, f"{len(rows)} rows, {len(trivial)} trivial s_(t,a), s_(t,c)")
    assert ok


def test_ac09_branch_kernel(criterion):
    sc = B.sigma_chain()
    expected = [
        SubgroupZ4_5.span([AbVector.parse("z"), AbVector.parse("w")]),
        SubgroupZ4_5.span([AbVector.parse("2z+w"), AbVector.parse("w")]),
        SubgroupZ4_5.span([AbVector.parse("2z+w")]),
    ]
    orders = [H.order() for H in sc.chain[1:]]
    level5 = B.verify_sigma_images_at_level(5)
    ok = (
        sc.chain[1:] == expected and orders == [16, 8, 4]
        and sc.fixed == expected[2] and sc.generator == AbVector.parse("2z+w")
        and level5.ok
    )
    criterion(9, "branch kernel", 10, ok, f"orders {orders}, A = <{sc.generator}>, level 5 consistent: {level5.ok}")
    assert ok


def test_ac10_no_csp(criterion):
    rep = B.no_csp_obstruction((5, 6, 7, 8), phi_depth=6)
    kms = B.verify_K_mod_scriptK()
    idx = rep.summary["level_indices"]
    ok = (
        rep.ok and rep.summary["K_mod_Kprime"] == 1024
        and idx == {5: 64, 6: 64, 7: 64, 8: 64}
        and kms.ok and kms.summary["scriptK_mod_Kprime"] == 64
    )
    criterion(10, "no-CSP assembly", 60, ok, f"[K:K'] = 1024 vs level indices {idx}, [scriptK:K'] = 64")
    assert ok


def test_ac11_property_suites(criterion):
    rng = random.Random(2024)

    def word():
        return gword("".join(rng.choice("abc") for _ in range(rng.randint(0, 14))))

    def el(w):
        return img.element(w) if len(w) else img.identity()

    sections_ok = truncations_ok = True
    for _ in range(200):
        g, h = el(word()), el(word())
        v = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 6)))
        sections_ok &= equal(section(g * h, v), section(g, act(h, v)) * section(h, v))
    for _ in range(200):
        g, h = el(word()), el(word())
        n = rng.randint(1, 6)
        truncations_ok &= truncate(g * h, n) == truncate(g, n) * truncate(h, n)
    suite = []
    for n in range(1, 6):
        suite += [img.g_level(n), img.k_level(n), img.k_prime_level(n)]
        suite += [img.stabilizer_level(n, m) for m in range(n)]
    small = [G for G in suite if G.order() <= 10_000]
    oracle_ok = all(G.order() == len(G.elements(10_001)) for G in small)
    st_ok = img.stabilizer_level(5, 4).order() == img.stabilizer_level(4, 3).order() ** 2
    ok = sections_ok and truncations_ok and oracle_ok and st_ok
    criterion(
        11, "property suites", 120, ok,
        f"200 section pairs, 200 truncation pairs, {len(small)} subgroups vs enumeration, St product {st_ok}",
    )
    assert ok


def test_parities_used_by_ac07_are_nontrivial():
    # guard against a vacuous parity suite: ell and beta do vary on words
    assert {ell(gword(w)) for w in ("a", "b")} == {0, 1}
    assert {beta(gword(w)) for w in ("a", "b")} == {0, 1}
