"""The branching subgroup K = <x, y, z, t, w>: section identities, the
conjugation table, the Z_4^5 model of K/K', the map g -> (1, g) on it and
the finite witnesses for the missing congruence subgroup property."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from . import img, levels, presentation
from .levels import embed_at_vertex, truncate
from .mealy import TreeElement, at_vertex, equal, from_sections, order_up_to
from .report import Report
from .words import S_K, GenWord, e_word, kword

MOD = 4
BASIS = S_K  # coordinate order (x, y, z, t, w)


class CertificateError(ValueError):
    pass


# -- elements and identities ---------------------------------------------------


def k_generators() -> dict[str, TreeElement]:
    return img.k_generators()


def pair(left: TreeElement | str, right: TreeElement | str) -> TreeElement:
    """The element with trivial root permutation and sections ``(left, right)``."""
    left = img.element(left) if isinstance(left, str) else left
    right = img.element(right) if isinstance(right, str) else right
    return from_sections([left, right])


SECTION_IDENTITIES = (
    # (element word, left section word, right section word)
    ("y", "x", "1"),
    ("z", "1", "x"),
    ("t", "y", "1"),
    ("w", "1", "y"),
    ("bcabca", "abc", "cab"),  # (bca)^2
    ("t y^-2", "y x^-2", "1"),
    ("w z^-2", "1", "y x^-2"),
    ("y t^-1", "x y^-1", "1"),
    ("z w^-1", "1", "x y^-1"),
    ("y^2", "x^2", "1"),
    ("z^2", "1", "x^2"),
)


def verify_section_identities() -> Report:
    rep = Report("section-identities")
    for g, left, right in SECTION_IDENTITIES:
        ok = equal(img.element(g), pair(left, right))
        rep.add(f"{g} = ({left}, {right})", ok)
    return rep


def verify_generator_orders(bound: int = 8) -> Report:
    rep = Report("generator-orders")
    for name, g in k_generators().items():
        k = order_up_to(g, bound)
        rep.add(f"|{name}| = 4", k == 4, order=k)
    return rep


CONJUGATION_TABLE = {
    ("a", "x"): "x^-1", ("b", "x"): "x^-1", ("c", "x"): "t x y",
    ("a", "y"): "z", ("b", "y"): "y^-1", ("c", "y"): "y^-1",
    ("a", "z"): "y", ("b", "z"): "x^-1 z^-1 x", ("c", "z"): "z",
    ("a", "t"): "w", ("b", "t"): "x^-1 t^-1 x", ("c", "t"): "t^-1",
    ("a", "w"): "t", ("b", "w"): "w^-1", ("c", "w"): "w",
}


def verify_conjugation_table() -> Report:
    rep = Report("conjugation-table")
    gens = img.generators()
    kg = k_generators()
    for (alpha, s), rhs in CONJUGATION_TABLE.items():
        lhs = gens[alpha] * kg[s] * gens[alpha]
        rw = kword(rhs)
        rep.add(f"{alpha}{s}{alpha} = {rhs}", equal(lhs, img.element(rw)), e_rhs=e_word(rw))
        rep.add(f"e({alpha}{s}{alpha}) = 1", e_word(rw) == 1)
    return rep


def section_parity_membership(w0: GenWord | str, w1: GenWord | str, g: TreeElement) -> bool:
    """Membership of ``g = (w0, w1)`` in the even-parity subgroup, given
    certified section words.  Raises ``CertificateError`` if ``g`` does not
    have these sections."""
    w0 = kword(w0) if isinstance(w0, str) else w0
    w1 = kword(w1) if isinstance(w1, str) else w1
    if not equal(g, pair(img.element(w0), img.element(w1))):
        raise CertificateError("section words do not match the element")
    return e_word(w0) == 0 and e_word(w1) == 0


# [s, s'] with certified S_K section words (left, right)
COMMUTATOR_SECTIONS = (
    ("x", "y", "y^-1 x^-1 t^-1 x^-1", ""),  # ([ca, x], 1)
    ("x", "z", "", "w x^-1 z x^-1"),  # (1, [ac, x])
    ("x", "t", "z y^-1", ""),  # ([ca, y], 1)
    ("x", "w", "", "z^-1 y^-1"),  # (1, [ac, y])
    ("y", "z", "", ""),
    ("y", "t", "x y x^-1 y^-1", ""),  # ([x, y], 1)
    ("y", "w", "", ""),
    ("z", "t", "", ""),
    ("z", "w", "", "x y x^-1 y^-1"),  # (1, [x, y])
    ("t", "w", "", ""),
)

# section forms over S_G, as stated for the first four commutators
COMMUTATOR_G_FORMS = {
    ("x", "y"): ("ca x ac x^-1", "1"),
    ("x", "z"): ("1", "ac x ca x^-1"),
    ("x", "t"): ("ca y ac y^-1", "1"),
    ("x", "w"): ("1", "ac y ca y^-1"),
}


def commutator(g: TreeElement, h: TreeElement) -> TreeElement:
    """``[g, h] = g h g^-1 h^-1``."""
    return g * h * ~g * ~h


def verify_commutator_parities() -> Report:
    rep = Report("commutator-parities")
    kg = k_generators()
    for s, s2, left, right in COMMUTATOR_SECTIONS:
        c = commutator(kg[s], kg[s2])
        if not (left or right):
            rep.add(f"[{s},{s2}] = 1", c.is_identity())
            continue
        try:
            even = section_parity_membership(left, right, c)
            rep.add(f"[{s},{s2}] = ({left or 1}, {right or 1})", True)
        except CertificateError:
            even = False
            rep.add(f"[{s},{s2}] = ({left or 1}, {right or 1})", False)
        rep.add(f"[{s},{s2}] sections have even e", even)
        g_form = COMMUTATOR_G_FORMS.get((s, s2))
        if g_form:
            ok = equal(c, pair(img.element(g_form[0], "mixed"), img.element(g_form[1], "mixed")))
            rep.add(f"[{s},{s2}] = ({g_form[0]}, {g_form[1]})", ok)
    return rep


# -- K/K' as Z_4^5 -------------------------------------------------------------


@dataclass(frozen=True)
class AbVector:
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != len(BASIS):
            raise ValueError("AbVector needs five coordinates")
        object.__setattr__(self, "coords", tuple(c % MOD for c in self.coords))

    @classmethod
    def basis(cls, name: str) -> "AbVector":
        return cls(tuple(int(b == name) for b in BASIS))

    @classmethod
    def zero(cls) -> "AbVector":
        return cls((0,) * len(BASIS))

    @classmethod
    def parse(cls, text: str) -> "AbVector":
        """``"2z+w"``, ``"-w-2z"`` style sums of basis letters."""
        coords = dict.fromkeys(BASIS, 0)
        text = text.replace(" ", "").replace("-", "+-")
        for term in filter(None, text.split("+")):
            sign = -1 if term.startswith("-") else 1
            term = term.lstrip("-")
            name = term[-1]
            k = int(term[:-1]) if term[:-1] else 1
            coords[name] += sign * k
        return cls(tuple(coords[b] for b in BASIS))

    def __add__(self, other: "AbVector") -> "AbVector":
        return AbVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "AbVector":
        return AbVector(tuple(-a for a in self.coords))

    def __sub__(self, other: "AbVector") -> "AbVector":
        return self + (-other)

    def __rmul__(self, k: int) -> "AbVector":
        return AbVector(tuple(k * a for a in self.coords))

    def parity(self) -> int:
        return sum(self.coords) % 2

    def word(self) -> GenWord:
        """Representing S_K word ``x^a y^b z^c t^d w^e`` (non-negative exponents)."""
        return GenWord("K", tuple((b, 1) for b, k in zip(BASIS, self.coords) for _ in range(k)))

    def __str__(self):
        terms = [f"{k if k != 1 else ''}{b}" for b, k in zip(BASIS, self.coords) if k]
        return "+".join(terms) or "0"


# images of the basis under g -> (1, g), in K/K'
SIGMA_IMAGES = {
    "x": "z",
    "y": "w",
    "z": "-w",
    "t": "-w-2z",
    "w": "2z-w",
}


@dataclass(frozen=True)
class SigmaMap:
    columns: tuple[AbVector, ...]

    @classmethod
    def default(cls) -> "SigmaMap":
        return cls(tuple(AbVector.parse(SIGMA_IMAGES[b]) for b in BASIS))

    def __call__(self, v: AbVector) -> AbVector:
        out = AbVector.zero()
        for k, col in zip(v.coords, self.columns):
            out = out + k * col
        return out

    def matrix(self) -> list[list[int]]:
        return [[col.coords[i] for col in self.columns] for i in range(len(BASIS))]


def sigma_apply(v: AbVector, sigma: SigmaMap | None = None) -> AbVector:
    return (sigma or SigmaMap.default())(v)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return a, 1, 0
    g, s, t = _xgcd(b, a % b)
    return g, t, s - (a // b) * t


def _normalize(v: list[int], c: int, n: int) -> list[int]:
    g = gcd(v[c], n)
    unit = next(u for u in range(1, n) if gcd(u, n) == 1 and u * v[c] % n == g)
    return [unit * x % n for x in v]


def howell_form(rows: Iterable[Sequence[int]], modulus: int = MOD) -> tuple[tuple[int, ...], ...]:
    """Howell normal form of the span of ``rows`` in ``(Z/modulus)^k``.

    Unique for a given submodule: echelon rows whose pivots divide the
    modulus, entries above a pivot reduced below it, and every row's
    annihilator multiple absorbed by the rows beneath it.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return ()
    ncols = len(rows[0])
    n = modulus
    pivots: dict[int, list[int]] = {}
    work = [[x % n for x in r] for r in rows]
    while work:
        v = work.pop()
        for c in range(ncols):
            if v[c] == 0:
                continue
            if c not in pivots:
                p = _normalize(v, c, n)
                pivots[c] = p
                work.append([(n // p[c]) * x % n for x in p])
                break
            p = pivots[c]
            g, s, t = _xgcd(p[c], v[c])
            new_p = [(s * a + t * b) % n for a, b in zip(p, v)]
            v = [((v[c] // g) * a - (p[c] // g) * b) % n for a, b in zip(p, v)]
            new_p = _normalize(new_p, c, n)
            if new_p != p:
                pivots[c] = new_p
                work.append([(n // new_p[c]) * x % n for x in new_p])
    cols = sorted(pivots)
    for c in cols:
        d = pivots[c][c]
        for r in cols:
            if r >= c:
                break
            q = pivots[r][c] // d
            if q:
                pivots[r] = [(a - q * b) % n for a, b in zip(pivots[r], pivots[c])]
    return tuple(tuple(pivots[c]) for c in cols)


@dataclass(frozen=True)
class SubgroupZ4_5:
    """Subgroup of Z_4^5 held in Howell form."""

    rows: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, vectors: Iterable[AbVector]) -> "SubgroupZ4_5":
        return cls(howell_form([v.coords for v in vectors]))

    @classmethod
    def full(cls) -> "SubgroupZ4_5":
        return cls.span(AbVector.basis(b) for b in BASIS)

    def order(self) -> int:
        r = 1
        for row in self.rows:
            lead = next(x for x in row if x)
            r *= MOD // lead
        return r

    def generators(self) -> list[AbVector]:
        return [AbVector(r) for r in self.rows]

    def elements(self) -> set[AbVector]:
        gens = self.generators()
        out = set()
        for ks in itertools.product(range(MOD), repeat=len(gens)):
            v = AbVector.zero()
            for k, g in zip(ks, gens):
                v = v + k * g
            out.add(v)
        return out

    def __contains__(self, v: AbVector) -> bool:
        return SubgroupZ4_5.span(self.generators() + [v]) == self

    def image(self, sigma: SigmaMap) -> "SubgroupZ4_5":
        return SubgroupZ4_5.span(sigma(g) for g in self.generators())

    def cyclic_generator(self) -> AbVector | None:
        """Lexicographically first element of order ``|A|``, if any."""
        size = self.order()
        for v in sorted(self.elements(), key=lambda u: u.coords):
            if SubgroupZ4_5.span([v]).order() == size:
                return v
        return None

    def __str__(self):
        return "<" + ", ".join(str(AbVector(r)) for r in self.rows) + ">"


@dataclass
class SigmaChain:
    chain: list[SubgroupZ4_5]
    fixed: SubgroupZ4_5
    generator: AbVector | None

    @property
    def stabilized_at(self) -> int:
        return len(self.chain) - 1


def sigma_chain(sigma: SigmaMap | None = None, max_steps: int = 32) -> SigmaChain:
    """``sigma^k(Z_4^5)`` for k = 0, 1, ... until two consecutive terms agree."""
    sigma = sigma or SigmaMap.default()
    chain = [SubgroupZ4_5.full()]
    for _ in range(max_steps):
        nxt = chain[-1].image(sigma)
        if nxt == chain[-1]:
            break
        chain.append(nxt)
    else:
        raise RuntimeError("sigma chain did not stabilize")
    A = chain[-1]
    return SigmaChain(chain, A, A.cyclic_generator())


def verify_sigma_chain() -> Report:
    rep = Report("sigma-chain")
    sigma = SigmaMap.default()
    for b in BASIS:
        rep.add(
            f"sigma({b}) = {SIGMA_IMAGES[b]}",
            sigma(AbVector.basis(b)) == AbVector.parse(SIGMA_IMAGES[b]),
        )
    fixed = AbVector.parse("2z+w")
    rep.add("sigma(2z+w) = 2z+w", sigma(fixed) == fixed)
    sc = sigma_chain(sigma)
    expected = [
        ("<z, w>", ["z", "w"], 16),
        ("<2z+w, w>", ["2z+w", "w"], 8),
        ("<2z+w>", ["2z+w"], 4),
    ]
    for k, (label, gens, size) in enumerate(expected, start=1):
        H = SubgroupZ4_5.span(AbVector.parse(g) for g in gens)
        got = sc.chain[k] if k < len(sc.chain) else sc.fixed
        rep.add(f"sigma^{k}(K/K') = {label}", got == H and got.order() == size, order=got.order(), form=str(got))
    for k in range(1, len(sc.chain)):
        rep.add(
            f"sigma^{k} image inside sigma^{k - 1} image",
            all(g in sc.chain[k - 1] for g in sc.chain[k].generators()),
        )
    rep.add("stabilizes at step 3", sc.stabilized_at == 3, step=sc.stabilized_at)
    rep.add("A = <2z+w> of order 4", sc.fixed == SubgroupZ4_5.span([fixed]) and sc.fixed.order() == 4)
    rep.add("A cyclic, generated by 2z+w", sc.generator == fixed, generator=str(sc.generator))
    rep.summary.update(
        chain=[str(H) for H in sc.chain], orders=[H.order() for H in sc.chain], A=str(sc.fixed)
    )
    return rep


def _vector_perm(v: AbVector, n: int) -> levels.LeafPermutation:
    kg = k_generators()
    p = levels.LeafPermutation.identity(n)
    for name, k in zip(BASIS, v.coords):
        p = p * truncate(kg[name], n) ** k
    return p


def verify_sigma_images_at_level(n: int = 5) -> Report:
    """Image of ``(1, s)`` equals the image of ``sigma(s)`` in pi_n(K)/pi_n(K')."""
    if not 5 <= n <= 8:
        raise ValueError("level must be in 5..8")
    rep = Report(f"sigma-images-level-{n}")
    K, Kp = img.k_level(n), img.k_prime_level(n)
    sigma = SigmaMap.default()
    ident = img.identity()
    for b in BASIS:
        lifted = truncate(pair(ident, k_generators()[b]), n)
        target = _vector_perm(sigma(AbVector.basis(b)), n)
        rep.add(f"(1,{b}) in pi_{n}(K)", lifted in K)
        rep.add(
            f"[(1,{b})] = [{SIGMA_IMAGES[b]}] in pi_{n}(K)^ab",
            Kp.coset_key(lifted) == Kp.coset_key(target),
        )
    return rep


def verify_relations_mod_derived(n: int) -> Report:
    """``[t] = [y]^2`` and ``[w] = [z]^2`` in pi_n(K)^ab."""
    rep = Report(f"pi{n}-relations")
    kg = k_generators()
    Kp = img.k_prime_level(n)
    for a, b in (("t", "y"), ("w", "z")):
        ok = Kp.coset_key(truncate(kg[a], n)) == Kp.coset_key(truncate(kg[b], n) ** 2)
        rep.add(f"[{a}] = [{b}]^2 in pi_{n}(K)^ab", ok)
    return rep


def verify_K_mod_scriptK() -> Report:
    rep = Report("K-mod-even-parity")
    for g, left, right in SECTION_IDENTITIES[7:]:
        rep.add(f"{g} = ({left}, {right})", equal(img.element(g), pair(left, right)))
    x = k_generators()["x"]
    for k in range(1, 5):
        ok = equal(x**k, pair(img.element("ca" * k), img.element("ac" * k)))
        rep.add(f"x^{k} = ((ca)^{k}, (ac)^{k})", ok)
    rep.add("x^4 = 1", (x**4).is_identity())
    G3, K3 = img.g_level(3), img.k_level(3)
    for w in ("ac", "ca"):
        o = levels.quotient_element_order(G3, K3, img.word_perm(w, 3))
        rep.add(f"|{w} K| = 4 in G/K", o == 4, order=o)
    # x^a lies in K_1 only for a = 0: (ca)^a is in K iff a = 0 mod 4
    for k in range(1, 4):
        in_k = img.word_perm("ca" * k, 3) in K3 and img.word_perm("ac" * k, 3) in K3
        rep.add(f"x^{k} not in K_1", not in_k)
    quotient = 4 * 2 * 2
    rep.summary.update(K_mod_scriptK=quotient, scriptK_mod_Kprime=4**5 // quotient)
    rep.add("[scriptK : K'] = 4^5 / 16 = 64", 4**5 // quotient == 64)
    return rep


def geometric_product_generators(S: Sequence[TreeElement], n: int) -> list[TreeElement]:
    """``(1, ..., s, ..., 1)_n`` for every ``s`` in ``S`` and every level-n vertex."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for s in S:
        for v in itertools.product(range(s.degree), repeat=n):
            out.append(at_vertex(s, v))
    return out


def verify_regular_branch(levels_: Sequence[int] = (3, 5, 7)) -> Report:
    """Finite witnesses of K_1 <= K: every (1,s), (s,1) lies in pi_L(K)."""
    rep = Report("regular-branch")
    kg = k_generators()
    gens = geometric_product_generators([kg[s] for s in S_K], 1)
    for L in levels_:
        K = img.k_level(L)
        ok = all(truncate(g, L) in K for g in gens)
        rep.add(f"K_1 generators in pi_{L}(K)", ok, count=len(gens))
    return rep


def verify_rigid_kernel_witness(ns: Sequence[int] = (1, 2), depth: int = 4, max_level: int = 8) -> Report:
    """``RiSt_G(n) >= K_n >= (St_G(3))_n`` checked at level ``n + depth``."""
    rep = Report("rigid-kernel-witness")
    kg = k_generators()
    for n in ns:
        L = min(n + depth, max_level)
        kn = [truncate(g, L) for g in geometric_product_generators([kg[s] for s in S_K], n)]
        Kn = levels.PermGroup(L, kn)
        G = img.g_level(L)
        rep.add(f"K_{n} <= G at level {L}", all(p in G for p in kn))
        rep.add(f"K_{n} <= K at level {L}", all(p in img.k_level(L) for p in kn))
        supported = all(_support_within_one_subtree(p, n) for p in kn)
        rep.add(f"K_{n} generators supported in single level-{n} subtrees", supported)
        st3 = img.stabilizer_level(L - n, 3).strong_generators()
        embedded = [
            embed_at_vertex(s, v, L)
            for v in itertools.product(range(2), repeat=n)
            for s in st3
        ]
        rep.add(
            f"(St_G(3))_{n} <= K_{n} at level {L}",
            all(p in Kn for p in embedded),
            generators=len(embedded),
        )
        rep.add(
            f"|pi_{L}((St_G(3))_{n})| = |pi_{L}(St_G({n + 3}))|",
            img.stabilizer_level(L - n, 3).order() ** (2**n) == img.stabilizer_level(L, n + 3).order(),
        )
    return rep


def _support_within_one_subtree(p: levels.LeafPermutation, n: int) -> bool:
    moved = [i for i in range(p.images.size) if p.images[i] != i]
    if not moved:
        return True
    shift = p.n - n
    blocks = {i >> shift for i in moved}
    return len(blocks) == 1 and all((int(p.images[i]) >> shift) == (i >> shift) for i in moved)


def verify_kk_c45(depth: int = 6) -> Report:
    """Ingredients of K/K' = C_4^5: five order-4 generators, e well defined
    on K, and ``t y^-2``, ``w z^-2`` outside the even-parity subgroup."""
    rep = Report("kk-c45")
    rep.merge(verify_generator_orders(), "orders")
    e_rep = presentation.verify_e_descends(depth)
    rep.add("e descends to K", e_rep.ok, checks=len(e_rep.items))
    ty = img.element("t y^-2")
    wz = img.element("w z^-2")
    rep.add("t y^-2 = (y x^-2, 1) and not in scriptK", not section_parity_membership("y x^-2", "", ty))
    rep.add("w z^-2 = (1, y x^-2) and not in scriptK", not section_parity_membership("", "y x^-2", wz))
    rep.add("commutator sections even (K' <= scriptK)", verify_commutator_parities().ok)
    rep.add("pi_5(K)^ab relations are the only candidates", verify_relations_mod_derived(5).ok)
    rep.summary["K_mod_Kprime"] = 4**5 if rep.ok else None
    return rep


def no_csp_obstruction(levels_: Sequence[int] = (5, 6, 7, 8), phi_depth: int = 6) -> Report:
    rep = Report("no-csp")
    indices = {}
    for n in levels_:
        K, Kp = img.k_level_xyztw(n), img.k_prime_level(n)
        idx = levels.index(K, Kp)
        indices[n] = idx
        rep.add(f"[pi_{n}(K) : pi_{n}(K')] = 64", idx == 64, index=idx)
    kk = verify_kk_c45(phi_depth)
    rep.add("K/K' = C_4^5 (conditional on orders and e-parity)", kk.ok)
    target = 4**5
    rep.add(
        "index gap 1024 != 64: St_G(n) never inside K'",
        kk.ok and all(i != target for i in indices.values()),
        K_mod_Kprime=target,
        level_indices=indices,
    )
    rep.merge(verify_rigid_kernel_witness(), "rigid kernel")
    rep.summary.update(K_mod_Kprime=target, level_indices=indices)
    return rep
