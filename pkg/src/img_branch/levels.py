"""Level quotients as permutation groups on the leaves of the truncated tree.

Stabilizer chains use a base adapted to the binary tree: the vertices of
levels ``0..n-1`` in breadth-first order.  An element of the chain subgroup
``U_i`` has trivial local permutation at the first ``i`` vertices, so it fixes
vertex ``i`` and its local bit there is a homomorphism; each basic orbit thus
has size one or two and the order of a group is ``2**(number of pivots)``.
Only binary trees are handled here.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .mealy import TreeElement

DEFAULT_ENUM_BUDGET = 2**20

_DTYPE = np.int64


class LevelError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class LeafPermutation:
    """Permutation of the ``2**n`` level-n vertices (leaf ``i`` has its level-1
    letter as most significant bit)."""

    __slots__ = ("n", "images", "_key")

    def __init__(self, n: int, images):
        arr = np.asarray(images, dtype=_DTYPE)
        if arr.shape != (2**n,):
            raise LevelError(f"expected {2**n} images, got shape {arr.shape}")
        arr.setflags(write=False)
        self.n = n
        self.images = arr
        self._key = None

    @classmethod
    def identity(cls, n: int) -> "LeafPermutation":
        return cls(n, np.arange(2**n))

    def check(self) -> None:
        if not np.array_equal(np.sort(self.images), np.arange(2**self.n)):
            raise LevelError("not a permutation")

    def __mul__(self, other: "LeafPermutation") -> "LeafPermutation":
        # (p * q)(i) = p(q(i))
        if self.n != other.n:
            raise LevelError("level mismatch")
        return LeafPermutation(self.n, self.images[other.images])

    def __invert__(self) -> "LeafPermutation":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(self.images.size)
        return LeafPermutation(self.n, inv)

    def __pow__(self, k: int) -> "LeafPermutation":
        if k < 0:
            return (~self) ** (-k)
        result, base = LeafPermutation.identity(self.n), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(self.images.size)))

    def key(self) -> bytes:
        if self._key is None:
            self._key = self.images.tobytes()
        return self._key

    def __eq__(self, other):
        return isinstance(other, LeafPermutation) and self.n == other.n and self.key() == other.key()

    def __hash__(self):
        return hash((self.n, self.key()))

    def __repr__(self):
        return f"LeafPermutation({self.n}, {format_cycles(self)})"

    def block_action(self, m: int) -> "LeafPermutation":
        """Induced permutation of the level-m prefixes."""
        if m > self.n:
            raise LevelError("m must not exceed n")
        shift = self.n - m
        return LeafPermutation(m, self.images[:: 2**shift] >> shift)

    def is_tree_compatible(self) -> bool:
        for m in range(1, self.n):
            shift = self.n - m
            pre = self.images >> shift
            if not np.array_equal(pre, np.repeat(pre[:: 2**shift], 2**shift)):
                return False
        return True


def format_cycles(p: LeafPermutation) -> str:
    img = p.images
    seen = set()
    out = []
    for i in range(img.size):
        if i in seen or img[i] == i:
            continue
        cyc = [i]
        j = int(img[i])
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = int(img[j])
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def parse_cycles(text: str, n: int) -> LeafPermutation:
    img = np.arange(2**n)
    for chunk in text.replace(")", ")\n").split("\n"):
        chunk = chunk.strip()
        if not chunk or chunk == "()":
            continue
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise LevelError(f"bad cycle {chunk!r}")
        pts = [int(s) for s in chunk[1:-1].replace(",", " ").split()]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a] = b
    p = LeafPermutation(n, img)
    p.check()
    return p


def truncate(g: TreeElement, n: int) -> LeafPermutation:
    if n < 1:
        raise LevelError("n must be >= 1")
    if g.degree != 2:
        raise LevelError("level engine supports the binary tree only")
    return LeafPermutation(n, g.leaf_images(n))


class _TreeBase:
    """Index arrays for reading local bits at the BFS-ordered vertices."""

    _cache: dict[int, "_TreeBase"] = {}

    def __init__(self, n: int):
        firsts, shifts = [], []
        for k in range(n):
            firsts.append(np.arange(2**k, dtype=_DTYPE) << (n - k))
            shifts.append(np.full(2**k, n - k - 1, dtype=_DTYPE))
        self.first = np.concatenate(firsts)
        self.shift = np.concatenate(shifts)
        self.size = self.first.size
        self.level_start = [2**k - 1 for k in range(n + 1)]

    @classmethod
    def get(cls, n: int) -> "_TreeBase":
        if n not in cls._cache:
            cls._cache[n] = cls(n)
        return cls._cache[n]

    def bits(self, g: np.ndarray) -> np.ndarray:
        return (g[self.first] >> self.shift) & 1

    def lead(self, g: np.ndarray) -> int:
        b = self.bits(g)
        j = int(np.argmax(b))
        return j if b[j] else -1


def _inv(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    out[a] = np.arange(a.size, dtype=a.dtype)
    return out


class PermGroup:
    """Subgroup of ``Aut(T^n)`` given by generators; the stabilizer chain is
    built on demand and extended incrementally."""

    def __init__(self, n: int, generators: Iterable[LeafPermutation] = ()):
        self.n = n
        self.generators: list[LeafPermutation] = []
        for g in generators:
            if g.n != n:
                raise LevelError(f"generator at level {g.n}, group at level {n}")
            if not g.is_tree_compatible():
                raise LevelError("generator does not preserve the tree structure")
            self.generators.append(g)
        self._base = _TreeBase.get(n)
        self._built = False
        self._pivot: dict[int, np.ndarray] = {}
        self._pivot_inv: dict[int, np.ndarray] = {}
        self._strong: list[np.ndarray] = []
        self._lead: list[int] = []
        self._done: dict[int, int] = {}

    def __repr__(self):
        return f"PermGroup(n={self.n}, gens={len(self.generators)})"

    # -- stabilizer chain ---------------------------------------------------

    def _sift(self, g: np.ndarray) -> tuple[np.ndarray, int]:
        base = self._base
        while True:
            j = base.lead(g)
            if j < 0:
                return g, -1
            hinv = self._pivot_inv.get(j)
            if hinv is None:
                return g, j
            g = hinv[g]

    def _add_strong(self, g: np.ndarray, j: int) -> None:
        self._strong.append(g)
        self._lead.append(j)
        if j not in self._pivot:
            self._pivot[j] = g
            self._pivot_inv[j] = _inv(g)

    def _close(self) -> None:
        # Schreier generators level by level, deepest pivot first; any new
        # strong generator lies deeper than the level that produced it, so
        # sweeping again until nothing changes reaches the fixed point.
        changed = True
        while changed:
            changed = False
            for i in sorted(self._pivot, reverse=True):
                h, hinv = self._pivot[i], self._pivot_inv[i]
                k = self._done.get(i, 0)
                while k < len(self._strong):
                    s, lead = self._strong[k], self._lead[k]
                    k += 1
                    if lead < i:
                        continue
                    if lead == i:
                        cands = [h[s]] if s is h else [s[hinv], h[s]]
                    else:
                        cands = [h[s[hinv]]]
                    for c in cands:
                        r, j = self._sift(c)
                        if j >= 0:
                            self._add_strong(r, j)
                            changed = True
                self._done[i] = k

    def _ensure(self) -> None:
        if self._built:
            return
        for g in self.generators:
            r, j = self._sift(g.images)
            if j >= 0:
                self._add_strong(r, j)
        self._close()
        self._built = True

    def add_generator(self, g: LeafPermutation) -> bool:
        """Append ``g``; returns False if it was already a member."""
        if g.n != self.n:
            raise LevelError("level mismatch")
        self._ensure()
        r, j = self._sift(g.images)
        self.generators.append(g)
        if j < 0:
            return False
        self._add_strong(r, j)
        self._close()
        return True

    @property
    def base_levels(self) -> list[int]:
        self._ensure()
        return sorted(self._pivot)

    def strong_generators(self) -> list[LeafPermutation]:
        self._ensure()
        return [LeafPermutation(self.n, s) for s in self._strong]

    def pivots(self) -> list[LeafPermutation]:
        self._ensure()
        return [LeafPermutation(self.n, self._pivot[j]) for j in sorted(self._pivot)]

    def order(self) -> int:
        self._ensure()
        return 2 ** len(self._pivot)

    def __contains__(self, p: LeafPermutation) -> bool:
        if p.n != self.n:
            raise LevelError(f"level mismatch: {p.n} vs {self.n}")
        self._ensure()
        return self._sift(p.images)[1] < 0

    def coset_key(self, p: LeafPermutation | np.ndarray) -> bytes:
        """Canonical representative of the left coset ``p H``, as bytes.

        Right multiplication by a pivot ``h_i`` clears bit ``i`` and leaves
        the earlier bits alone (``h_i`` fixes those vertices).
        """
        self._ensure()
        g = p.images if isinstance(p, LeafPermutation) else p
        bits = self._base.bits
        for j in sorted(self._pivot):
            if bits(g)[j]:
                g = g[self._pivot[j]]
        return g.tobytes()

    def coset_rep(self, p: LeafPermutation) -> LeafPermutation:
        return LeafPermutation(self.n, np.frombuffer(self.coset_key(p), dtype=_DTYPE))

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(g in other for g in self.generators)

    def is_normal_in(self, other: "PermGroup") -> bool:
        return all(g * h * ~g in self for g in other.generators for h in self.generators)

    def elements(self, budget: int = DEFAULT_ENUM_BUDGET) -> list[LeafPermutation]:
        """Brute-force closure under generator multiplication."""
        ident = LeafPermutation.identity(self.n)
        seen = {ident.key(): ident}
        queue = deque([ident])
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = g * x
                if y.key() not in seen:
                    if len(seen) >= budget:
                        raise BudgetExceeded(f"more than {budget} elements")
                    seen[y.key()] = y
                    queue.append(y)
        return list(seen.values())

    def export_cycles(self) -> str:
        """One generator per line in cycle notation."""
        return "".join(format_cycles(g) + "\n" for g in self.generators)


def schreier_sims(G: PermGroup) -> PermGroup:
    if not G.generators:
        raise LevelError("generators must be non-empty")
    G._ensure()
    return G


def order(G: PermGroup) -> int:
    return G.order()


def contains(G: PermGroup, p: LeafPermutation) -> bool:
    return p in G


def index(G: PermGroup, H: PermGroup) -> int:
    if H.n != G.n:
        raise LevelError("level mismatch")
    for h in H.generators:
        if h not in G:
            raise LevelError("H is not contained in G")
    return G.order() // H.order()


def normal_closure(S: Sequence[LeafPermutation], G: PermGroup) -> PermGroup:
    for s in S:
        if s not in G:
            raise LevelError("normal closure seed is not in G")
    H = PermGroup(G.n, S)
    H._ensure()
    queue = deque(S)
    while queue:
        h = queue.popleft()
        for g in G.generators:
            c = g * h * ~g
            if H.add_generator(c):
                queue.append(c)
            else:
                H.generators.pop()
    return H


def commutator(g: LeafPermutation, h: LeafPermutation) -> LeafPermutation:
    return g * h * ~g * ~h


def derived_subgroup(G: PermGroup) -> PermGroup:
    gens = G.generators
    comms = [commutator(g, h) for i, g in enumerate(gens) for h in gens[i + 1 :]]
    comms = [c for c in comms if not c.is_identity()]
    if not comms:
        return PermGroup(G.n, [LeafPermutation.identity(G.n)])
    return normal_closure(comms, G)


def kernel_to_level(G: PermGroup, m: int) -> PermGroup:
    """Elements of ``G`` acting trivially on level ``m``.

    In the tree-adapted chain this is the chain subgroup past the last
    vertex of level ``m-1``, generated by the strong generators there.
    """
    if not 0 <= m < G.n:
        raise LevelError("need 0 <= m < n")
    G._ensure()
    start = G._base.level_start[m]
    gens = [LeafPermutation(G.n, s) for s, j in zip(G._strong, G._lead) if j >= start]
    K = PermGroup(G.n, gens or [LeafPermutation.identity(G.n)])
    return K


def _coset_table(G: PermGroup, H: PermGroup, budget: int):
    """Enumerate ``G/H`` (``H`` normal): canonical keys, reps and generator images."""
    n = G.n
    ident = np.arange(2**n, dtype=_DTYPE)
    k0 = H.coset_key(ident)
    keys = {k0: 0}
    reps = [ident]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for g in G.generators:
            y = g.images[reps[i]]
            k = H.coset_key(y)
            if k not in keys:
                if len(keys) >= budget:
                    raise BudgetExceeded(f"quotient has more than {budget} elements")
                keys[k] = len(reps)
                reps.append(np.frombuffer(k, dtype=_DTYPE))
                queue.append(keys[k])
    return keys, reps


class _Quotient:
    def __init__(self, G: PermGroup, H: PermGroup, budget: int):
        self.H = H
        self.keys, self.reps = _coset_table(G, H, budget)
        self.gen_idx = [self.index_of(g.images) for g in G.generators]
        self._mul: dict[tuple[int, int], int] = {}

    def __len__(self):
        return len(self.reps)

    def index_of(self, g: np.ndarray) -> int:
        return self.keys[self.H.coset_key(g)]

    def mul(self, i: int, j: int) -> int:
        k = self._mul.get((i, j))
        if k is None:
            k = self._mul[(i, j)] = self.index_of(self.reps[i][self.reps[j]])
        return k

    def element_order(self, i: int) -> int:
        k, cur = 1, i
        while cur != 0:
            cur = self.mul(cur, i)
            k += 1
        return k


def _prime_factors(m: int) -> list[int]:
    out, p = [], 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def invariants_from_orders(orders: Sequence[int]) -> tuple[int, ...]:
    """Elementary divisors of a finite abelian group from its element orders.

    For each prime ``p``, ``#{g : g^(p^k) = 1} = p^(sum_i min(e_i, k))``.
    """
    size = len(orders)
    divisors = []
    for p in _prime_factors(size):
        logs = [0]
        k = 1
        while True:
            q = p**k
            cnt = sum(1 for o in orders if q % o == 0)
            lg = _ilog(cnt, p)
            logs.append(lg)
            if cnt == p ** _valuation(size, p):
                break
            k += 1
        ranks = [logs[k] - logs[k - 1] for k in range(1, len(logs))] + [0]
        for k in range(1, len(ranks)):
            divisors += [p**k] * (ranks[k - 1] - ranks[k])
    return tuple(sorted(divisors))


def _valuation(m: int, p: int) -> int:
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


def _ilog(m: int, p: int) -> int:
    v = _valuation(m, p)
    if p**v != m:
        raise ArithmeticError(f"{m} is not a power of {p}")
    return v


@dataclass(frozen=True)
class AbelianInvariants:
    divisors: tuple[int, ...]

    @property
    def order(self) -> int:
        r = 1
        for d in self.divisors:
            r *= d
        return r

    def __iter__(self):
        return iter(self.divisors)


def abelian_invariants(G: PermGroup, budget: int = DEFAULT_ENUM_BUDGET) -> AbelianInvariants:
    D = derived_subgroup(G)
    Q = _Quotient(G, D, budget)
    orders = [Q.element_order(i) for i in range(len(Q))]
    return AbelianInvariants(invariants_from_orders(orders))


@dataclass(frozen=True)
class Fingerprint:
    order: int
    abelian: bool
    center: int
    histogram: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "abelian": self.abelian,
            "center": self.center,
            "histogram": {str(k): v for k, v in self.histogram},
        }


def fingerprint_from_table(elements: Sequence, mul, identity, gens: Sequence) -> Fingerprint:
    """Fingerprint of an abstract finite group given by a multiplication."""
    orders = Counter()
    for x in elements:
        k, cur = 1, x
        while cur != identity:
            cur = mul(cur, x)
            k += 1
        orders[k] += 1
    center = sum(1 for x in elements if all(mul(x, g) == mul(g, x) for g in gens))
    abelian = all(mul(g, h) == mul(h, g) for g in gens for h in gens)
    return Fingerprint(len(elements), abelian, center, tuple(sorted(orders.items())))


def quotient_fingerprint(G: PermGroup, H: PermGroup, budget: int = DEFAULT_ENUM_BUDGET) -> Fingerprint:
    if not H.is_subgroup_of(G) or not H.is_normal_in(G):
        raise LevelError("H is not a normal subgroup of G")
    Q = _Quotient(G, H, budget)
    return fingerprint_from_table(range(len(Q)), Q.mul, 0, Q.gen_idx)


def quotient_element_order(G: PermGroup, H: PermGroup, p: LeafPermutation) -> int:
    """Order of ``pH`` in ``G/H`` (``H`` normal)."""
    target = H.coset_key(np.arange(2**H.n, dtype=_DTYPE))
    k, cur = 1, p.images
    while H.coset_key(cur) != target:
        cur = p.images[cur]
        k += 1
    return k


def embed_at_vertex(p: LeafPermutation, vertex: Sequence[int], n: int) -> LeafPermutation:
    """Level-n permutation acting as ``p`` below ``vertex`` and trivially elsewhere."""
    m = len(vertex)
    if p.n != n - m:
        raise LevelError("p must live at level n - len(vertex)")
    v = 0
    for x in vertex:
        v = 2 * v + x
    img = np.arange(2**n, dtype=_DTYPE)
    off = v << (n - m)
    img[off : off + 2 ** (n - m)] = off + p.images
    return LeafPermutation(n, img)
