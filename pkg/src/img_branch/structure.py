"""Finite-level structure of the group: element orders, the index of K, the
stabilizer chain facts and the abelianization of the level images of K."""

from __future__ import annotations

import itertools
from typing import Sequence

from . import img, levels
from .levels import Fingerprint, fingerprint_from_table, truncate
from .mealy import order_up_to
from .report import Report


def _dihedral4_mul(p, q):
    # elements (r, f) = rot^r flip^f acting on Z_4; flip rot flip = rot^-1
    r1, f1 = p
    r2, f2 = q
    return ((r1 + (-r2 if f1 else r2)) % 4, f1 ^ f2)


def c2_times_d4_fingerprint() -> Fingerprint:
    """Brute-force fingerprint of C_2 x D_4 from its multiplication table."""
    els = [(e, (r, f)) for e in range(2) for r in range(4) for f in range(2)]

    def mul(p, q):
        return ((p[0] + q[0]) % 2, _dihedral4_mul(p[1], q[1]))

    gens = [(1, (0, 0)), (0, (1, 0)), (0, (0, 1))]
    return fingerprint_from_table(els, mul, (0, (0, 0)), gens)


def d4_fingerprint() -> Fingerprint:
    els = [(r, f) for r in range(4) for f in range(2)]
    return fingerprint_from_table(els, _dihedral4_mul, (0, 0), [(1, 0), (0, 1)])


def c4_power_fingerprint(k: int) -> Fingerprint:
    els = list(itertools.product(range(4), repeat=k))

    def mul(p, q):
        return tuple((a + b) % 4 for a, b in zip(p, q))

    gens = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    return fingerprint_from_table(els, mul, (0,) * k, gens)


def verify_orders(torsion_bound: int = 128) -> Report:
    rep = Report("orders")
    for word, expected in (("a", 2), ("b", 2), ("c", 2), ("ac", 4), ("ca", 4)):
        k = order_up_to(img.element(word), 8)
        rep.add(f"|{word}| = {expected}", k == expected, order=k)
    for name, g in img.k_generators().items():
        k = order_up_to(g, 8)
        rep.add(f"|{name}| = 4", k == 4, order=k)
    gens = img.generators()
    ac = levels.PermGroup(3, [truncate(gens["a"], 3), truncate(gens["c"], 3)])
    fp = levels.quotient_fingerprint(ac, levels.PermGroup(3))
    rep.add("<a,c> is dihedral of order 8", fp == d4_fingerprint(), fingerprint=fp.as_dict())
    k = order_up_to(img.element("bca"), torsion_bound)
    rep.add(f"bca has no order <= {torsion_bound}", k is None, bound=torsion_bound)
    return rep


def verify_not_torsion(torsion_bound: int = 128) -> Report:
    """``(bca)^2 = (abc, cab)`` with ``abc``, ``cab`` conjugate to ``bca``: a
    finite order m would force m even and m/2 a multiple of m."""
    from .branch import pair
    from .mealy import equal

    rep = Report("not-torsion")
    bca = img.element("bca")
    rep.add("(bca)^2 = (abc, cab)", equal(bca * bca, pair("abc", "cab")))
    rep.add("abc = a (bca) a", equal(img.element("abc"), img.element("a bca a")))
    rep.add("cab = c (abc) c", equal(img.element("cab"), img.element("c abc c")))
    k = order_up_to(bca, torsion_bound)
    rep.add(f"bca has no order <= {torsion_bound}", k is None, bound=torsion_bound)
    return rep


def verify_k_contains_st3(max_level: int = 8, budget: int = levels.DEFAULT_ENUM_BUDGET) -> Report:
    rep = Report("k-contains-st3")
    G3, K3 = img.g_level(3), img.k_level(3)
    idx = levels.index(G3, K3)
    rep.add("[pi_3(G) : pi_3(K)] = 16", idx == 16, index=idx)
    rep.add("pi_3(K) normal in pi_3(G)", K3.is_normal_in(G3))
    fp = levels.quotient_fingerprint(G3, K3, budget)
    rep.add("pi_3(G)/pi_3(K) matches C_2 x D_4", fp == c2_times_d4_fingerprint(), fingerprint=fp.as_dict())
    for n in range(4, max_level + 1):
        G, K = img.g_level(n), img.k_level(n)
        idx = levels.index(G, K)
        rep.add(f"[pi_{n}(G) : pi_{n}(K)] = 16", idx == 16, index=idx)
        st3 = img.stabilizer_level(n, 3)
        rep.add(f"pi_{n}(St_G(3)) <= pi_{n}(K)", st3.is_subgroup_of(K), order=st3.order())
    rep.summary["index"] = 16
    return rep


def verify_k_seed(levels_: Sequence[int] = (3, 4, 5, 6, 7, 8)) -> Report:
    """The transversal-conjugate seed and the five generators give the same pi_n(K)."""
    rep = Report("k-seed")
    for n in levels_:
        a, b = img.k_level(n), img.k_level_xyztw(n)
        same = a.order() == b.order() and b.is_subgroup_of(a)
        rep.add(f"pi_{n}(<x,y>^G) = pi_{n}(<x,y,z,t,w>)", same, order=a.order())
        rep.add(f"pi_{n}(K) normal in pi_{n}(G)", b.is_normal_in(img.g_level(n)))
    return rep


def verify_stabilizer_absorption(n0: int = 5) -> Report:
    """pi_{n0+1}(St_G(n0)) <= pi_{n0+1}(K'), generator by generator."""
    rep = Report("stabilizer-absorption")
    n = n0 + 1
    st = img.stabilizer_level(n, n0)
    Kp = img.k_prime_level(n)
    gens = st.strong_generators()
    missing = [i for i, g in enumerate(gens) if g not in Kp]
    rep.add(
        f"strong generators of pi_{n}(St_G({n0})) lie in pi_{n}(K')",
        not missing,
        generators=len(gens),
        missing=missing,
        stabilizer_order=st.order(),
    )
    return rep


def verify_pin_k_ab(levels_: Sequence[int] = (5, 6, 7, 8), budget: int = levels.DEFAULT_ENUM_BUDGET) -> Report:
    from .branch import verify_relations_mod_derived

    rep = Report("pin-k-ab")
    for n in levels_:
        inv = levels.abelian_invariants(img.k_level_xyztw(n), budget)
        rep.add(f"pi_{n}(K)^ab = C_4^3", tuple(inv.divisors) == (4, 4, 4), invariants=list(inv.divisors))
        rep.merge(verify_relations_mod_derived(n))
        kg = img.k_generators()
        Kp = img.k_prime_level(n)
        xyz = levels.PermGroup(n, [truncate(kg[s], n) for s in ("x", "y", "z")] + Kp.strong_generators())
        rep.add(
            f"[x], [y], [z] generate pi_{n}(K)^ab",
            xyz.order() == img.k_level_xyztw(n).order(),
        )
    fp = levels.quotient_fingerprint(img.k_level_xyztw(5), img.k_prime_level(5), budget)
    rep.add("pi_5(K)^ab fingerprint matches C_4^3", fp == c4_power_fingerprint(3), fingerprint=fp.as_dict())
    return rep


def verify_st_product(pairs: Sequence[tuple[int, int]] = ((4, 3), (5, 3), (6, 4))) -> Report:
    """Finite witnesses of St_G(n) = St_G(m)^(2^(n-m)) for n >= m >= 3."""
    rep = Report("st-product")
    for n, m in pairs:
        big = img.stabilizer_level(n + 1, n).order()
        small = img.stabilizer_level(m + 1, m).order()
        rep.add(
            f"|pi_{n + 1}(St_G({n}))| = |pi_{m + 1}(St_G({m}))|^{2 ** (n - m)}",
            big == small ** (2 ** (n - m)),
            left=big,
            right=small,
        )
    return rep
