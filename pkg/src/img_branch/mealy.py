"""Tree automorphisms as states of invertible Mealy automata.

An element acts on a vertex ``x w`` (``x`` the first letter) by
``g(x w) = out(x) g|_x(w)``.  Products act on the left: ``(g * h)(v) = g(h(v))``,
so sections obey ``(gh)|_v = g|_{h(v)} h|_v``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_STATE_BUDGET = 200_000

_state_budget = DEFAULT_STATE_BUDGET


class AutomatonError(ValueError):
    pass


class StateBudgetExceeded(RuntimeError):
    pass


def set_state_budget(budget: int) -> None:
    global _state_budget
    if budget < 1:
        raise ValueError("state budget must be positive")
    _state_budget = budget


def get_state_budget() -> int:
    return _state_budget


@dataclass(frozen=True)
class MealyAutomaton:
    """Finite invertible transducer over the alphabet ``{0, ..., d-1}``.

    ``outputs[q][x]`` is the letter written when state ``q`` reads ``x`` and
    ``targets[q][x]`` the state entered afterwards.
    """

    names: tuple[str, ...]
    outputs: tuple[tuple[int, ...], ...]
    targets: tuple[tuple[int, ...], ...]
    identity_state: int | None = None

    def __post_init__(self):
        n = len(self.names)
        if not n:
            raise AutomatonError("automaton has no states")
        if len(self.outputs) != n or len(self.targets) != n:
            raise AutomatonError("state tables have inconsistent lengths")
        if len(set(self.names)) != n:
            raise AutomatonError("duplicate state names")
        d = len(self.outputs[0])
        for q in range(n):
            if len(self.outputs[q]) != d or len(self.targets[q]) != d:
                raise AutomatonError(f"state {self.names[q]!r}: transition not total")
            if sorted(self.outputs[q]) != list(range(d)):
                raise AutomatonError(
                    f"state {self.names[q]!r}: outputs {list(self.outputs[q])} are not a permutation"
                )
            for r in self.targets[q]:
                if not 0 <= r < n:
                    raise AutomatonError(f"state {self.names[q]!r}: target {r} out of range")
        if self.identity_state is not None:
            i = self.identity_state
            if self.outputs[i] != tuple(range(d)) or self.targets[i] != (i,) * d:
                raise AutomatonError(f"state {self.names[i]!r} is not an identity state")

    @property
    def degree(self) -> int:
        return len(self.outputs[0])

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no state named {name!r}") from None

    def element(self, state: int | str) -> "TreeElement":
        if isinstance(state, str):
            state = self.index(state)
        return TreeElement(self, state)

    def elements(self) -> dict[str, "TreeElement"]:
        return {name: TreeElement(self, q) for q, name in enumerate(self.names)}

    def transitions(self):
        """Yield ``(state, input, output, next_state)`` name tuples."""
        for q, name in enumerate(self.names):
            for x in range(self.degree):
                yield name, x, self.outputs[q][x], self.names[self.targets[q][x]]


def build_base_automaton() -> MealyAutomaton:
    """The four-state automaton generating IMG(z^2 + i)."""
    return MealyAutomaton(
        names=("1", "a", "b", "c"),
        outputs=((0, 1), (1, 0), (0, 1), (0, 1)),
        targets=((0, 0), (0, 0), (1, 3), (2, 0)),
        identity_state=0,
    )


def minimize(automaton: MealyAutomaton) -> tuple[MealyAutomaton, list[int]]:
    """Moore partition refinement.

    Returns the quotient automaton and the map old state -> new state.  Two
    states share a class iff they define the same tree automorphism.
    """
    n = len(automaton)
    outs = automaton.outputs
    tgts = automaton.targets
    # initial partition by local permutation
    labels: dict = {}
    cls = [labels.setdefault(outs[q], len(labels)) for q in range(n)]
    count = len(labels)
    while True:
        labels = {}
        new = [labels.setdefault((cls[q], tuple(cls[r] for r in tgts[q])), len(labels)) for q in range(n)]
        if len(labels) == count:
            cls = new
            break
        cls, count = new, len(labels)

    # class numbering in order of first appearance keeps the result deterministic
    reps: dict[int, int] = {}
    for q in range(n):
        reps.setdefault(cls[q], q)
    names, new_outs, new_tgts = [], [], []
    for c, q in reps.items():
        names.append(automaton.names[q])
        new_outs.append(outs[q])
        new_tgts.append(tuple(cls[r] for r in tgts[q]))
    ident = None
    d = automaton.degree
    for c in range(len(names)):
        if new_outs[c] == tuple(range(d)) and new_tgts[c] == (c,) * d:
            ident = c
            break
    return MealyAutomaton(tuple(names), tuple(new_outs), tuple(new_tgts), ident), cls


def _canonical(outputs, targets, start) -> tuple:
    """BFS renumbering from ``start``; a hashable form of a minimized automaton."""
    order = {start: 0}
    queue = deque([start])
    rows = []
    while queue:
        q = queue.popleft()
        for r in targets[q]:
            if r not in order:
                order[r] = len(order)
                queue.append(r)
        rows.append((outputs[q], tuple(order[r] for r in targets[q])))
    return tuple(rows)


@dataclass(frozen=True, eq=False)
class TreeElement:
    """A state of an invertible automaton, viewed as a tree automorphism.

    ``==`` and ``hash`` compare automorphisms, not automaton presentations.
    """

    automaton: MealyAutomaton
    state: int
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @cached_property
    def canonical(self) -> tuple:
        reach = _reachable(self.automaton, [self.state])
        sub = _restrict(self.automaton, reach)
        mini, cls = minimize(sub)
        return _canonical(mini.outputs, mini.targets, cls[0])

    @classmethod
    def from_canonical(cls, rows: tuple) -> "TreeElement":
        d = len(rows[0][0])
        names = tuple(f"q{i}" for i in range(len(rows)))
        outs = tuple(r[0] for r in rows)
        tgts = tuple(r[1] for r in rows)
        ident = next(
            (i for i, (o, t) in enumerate(rows) if o == tuple(range(d)) and t == (i,) * d), None
        )
        el = cls(MealyAutomaton(names, outs, tgts, ident), 0)
        el.__dict__["canonical"] = rows
        return el

    def reduced(self) -> "TreeElement":
        """Same automorphism on its own minimized, canonically numbered automaton."""
        return TreeElement.from_canonical(self.canonical)

    @property
    def degree(self) -> int:
        return self.automaton.degree

    @property
    def num_states(self) -> int:
        return len(self.canonical)

    @property
    def root_permutation(self) -> tuple[int, ...]:
        return self.automaton.outputs[self.state]

    def is_identity(self) -> bool:
        d = self.degree
        ident = tuple(range(d))
        return all(self.automaton.outputs[q] == ident for q in _reachable(self.automaton, [self.state]))

    def __eq__(self, other):
        if not isinstance(other, TreeElement):
            return NotImplemented
        return self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)

    def __repr__(self):
        name = self.automaton.names[self.state]
        return f"TreeElement({name!r}, states={self.num_states})"

    def __mul__(self, other: "TreeElement") -> "TreeElement":
        return compose(self, other)

    def __invert__(self) -> "TreeElement":
        return inverse(self)

    def __pow__(self, k: int) -> "TreeElement":
        return power(self, k)

    def section(self, v: Sequence[int]) -> "TreeElement":
        return section(self, v)

    def __call__(self, v: Sequence[int]) -> tuple[int, ...]:
        return act(self, v)

    def local_permutation(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.automaton.outputs[_walk(self.automaton, self.state, v)]

    def leaf_images(self, n: int) -> np.ndarray:
        """Images of the ``d**n`` level-n vertices, most significant letter first."""
        key = ("leaves", n)
        if key not in self._cache:
            self._cache[key] = _leaf_images(self.automaton, self.state, n)
        return self._cache[key]


def _reachable(automaton: MealyAutomaton, starts: Iterable[int]) -> list[int]:
    seen = dict.fromkeys(starts)
    queue = deque(seen)
    while queue:
        q = queue.popleft()
        for r in automaton.targets[q]:
            if r not in seen:
                seen[r] = None
                queue.append(r)
    return list(seen)


def _restrict(automaton: MealyAutomaton, states: list[int]) -> MealyAutomaton:
    pos = {q: i for i, q in enumerate(states)}
    ident = automaton.identity_state
    return MealyAutomaton(
        tuple(automaton.names[q] for q in states),
        tuple(automaton.outputs[q] for q in states),
        tuple(tuple(pos[r] for r in automaton.targets[q]) for q in states),
        pos.get(ident) if ident is not None else None,
    )


def _walk(automaton: MealyAutomaton, q: int, v: Sequence[int]) -> int:
    for x in v:
        q = automaton.targets[q][x]
    return q


def _leaf_images(automaton: MealyAutomaton, start: int, n: int) -> np.ndarray:
    d = automaton.degree
    memo: dict[tuple[int, int], np.ndarray] = {}

    def go(q: int, k: int) -> np.ndarray:
        if k == 0:
            return np.zeros(1, dtype=np.int64)
        hit = memo.get((q, k))
        if hit is not None:
            return hit
        block = d ** (k - 1)
        out = automaton.outputs[q]
        parts = [out[x] * block + go(automaton.targets[q][x], k - 1) for x in range(d)]
        res = np.concatenate(parts)
        memo[(q, k)] = res
        return res

    return go(start, n)


def _from_table(outs: list, tgts: list) -> TreeElement:
    d = len(outs[0])
    names = tuple(f"q{i}" for i in range(len(outs)))
    ident = next(
        (i for i in range(len(outs)) if outs[i] == tuple(range(d)) and tgts[i] == (i,) * d), None
    )
    auto = MealyAutomaton(names, tuple(outs), tuple(tuple(t) for t in tgts), ident)
    return TreeElement(auto, 0).reduced()


def compose(g: TreeElement, h: TreeElement) -> TreeElement:
    """The element ``v -> g(h(v))``, realized on the minimized product automaton."""
    if g.degree != h.degree:
        raise AutomatonError("degree mismatch")
    d = g.degree
    ga, ha = g.automaton, h.automaton
    budget = _state_budget
    index = {(g.state, h.state): 0}
    pairs = [(g.state, h.state)]
    outs: list[tuple[int, ...]] = []
    tgts: list[list[int]] = []
    i = 0
    while i < len(pairs):
        p, q = pairs[i]
        i += 1
        hq, gp = ha.outputs[q], ga.outputs[p]
        outs.append(tuple(gp[hq[x]] for x in range(d)))
        row = []
        for x in range(d):
            nxt = (ga.targets[p][hq[x]], ha.targets[q][x])
            j = index.get(nxt)
            if j is None:
                j = index[nxt] = len(pairs)
                pairs.append(nxt)
                if len(pairs) > budget:
                    raise StateBudgetExceeded(
                        f"product automaton exceeded {budget} states"
                    )
            row.append(j)
        tgts.append(row)
    return _from_table(outs, tgts)


def inverse(g: TreeElement) -> TreeElement:
    a = g.automaton
    d = a.degree
    reach = _reachable(a, [g.state])
    pos = {q: i for i, q in enumerate(reach)}
    outs, tgts = [], []
    for q in reach:
        out = a.outputs[q]
        inv = [0] * d
        for x in range(d):
            inv[out[x]] = x
        outs.append(tuple(inv))
        # reading y, the inverse state undoes q on input inv[y]
        tgts.append([pos[a.targets[q][inv[y]]] for y in range(d)])
    return _from_table(outs, tgts)


def identity(degree: int = 2) -> TreeElement:
    return TreeElement.from_canonical(((tuple(range(degree)), (0,) * degree),))


def power(g: TreeElement, k: int) -> TreeElement:
    if k < 0:
        return power(inverse(g), -k)
    result = identity(g.degree)
    base = g
    while k:
        if k & 1:
            result = compose(result, base)
        k >>= 1
        if k:
            base = compose(base, base)
    return result


def section(g: TreeElement, v: Sequence[int]) -> TreeElement:
    return TreeElement(g.automaton, _walk(g.automaton, g.state, v))


def act(g: TreeElement, v: Sequence[int]) -> tuple[int, ...]:
    a, q = g.automaton, g.state
    out = []
    for x in v:
        out.append(a.outputs[q][x])
        q = a.targets[q][x]
    return tuple(out)


def equal(g: TreeElement, h: TreeElement) -> bool:
    return compose(g, inverse(h)).is_identity()


def order_up_to(g: TreeElement, max_k: int) -> int | None:
    """Least ``k <= max_k`` with ``g**k`` trivial, or ``None``."""
    if max_k < 1:
        raise ValueError("max_k must be positive")
    current = g
    for k in range(1, max_k + 1):
        if current.is_identity():
            return k
        if k < max_k:
            current = compose(current, g)
    return None


def root_perm_parity_at_levels(g: TreeElement, n: int) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Local permutation of ``g`` at every vertex of level ``< n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = g.degree
    result = {}
    frontier = [((), g.state)]
    for _ in range(n):
        nxt = []
        for v, q in frontier:
            result[v] = g.automaton.outputs[q]
            for x in range(d):
                nxt.append((v + (x,), g.automaton.targets[q][x]))
        frontier = nxt
    return result


def from_sections(sections: Sequence[TreeElement], root: Sequence[int] | None = None) -> TreeElement:
    """The element ``(g_0, ..., g_{d-1}) root`` built as a fresh automaton."""
    d = len(sections)
    root = tuple(range(d)) if root is None else tuple(root)
    outs: list[tuple[int, ...]] = [root]
    tgts: list[list[int]] = [[0] * d]
    for x, s in enumerate(sections):
        reach = _reachable(s.automaton, [s.state])
        base = len(outs)
        pos = {q: base + i for i, q in enumerate(reach)}
        for q in reach:
            outs.append(s.automaton.outputs[q])
            tgts.append([pos[r] for r in s.automaton.targets[q]])
        tgts[0][x] = pos[s.state]
    return _from_table(outs, tgts)


def at_vertex(s: TreeElement, v: Sequence[int]) -> TreeElement:
    """Element acting as ``s`` below ``v`` and trivially elsewhere."""
    g = s
    ident = identity(s.degree)
    for x in reversed(tuple(v)):
        secs = [ident] * s.degree
        secs[x] = g
        g = from_sections(secs)
    return g
