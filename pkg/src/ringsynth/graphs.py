"""Graphs over domain values: locality graphs, action graphs and the
pieces of machinery the synthesizer and checker need from them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .spec_model import LocalityRelation

__all__ = [
    "DivisibilityError",
    "LabeledGraph",
    "InTree",
    "ClosedWalk",
    "locality_graph",
    "strongly_connected_components",
    "cycle_vertices",
    "cycle_core",
    "spanning_in_tree",
    "closed_walks",
    "walk_states",
]


class DivisibilityError(ValueError):
    """Walk length does not divide the ring size."""


Arc = tuple[int, int, Optional[int]]


@dataclass(frozen=True)
class LabeledGraph:
    """Directed multigraph on ``0..m-1``.

    Locality graphs carry ``None`` labels; action graphs label each arc
    ``(a, c)`` with the guard value ``b``.
    """

    m: int
    arcs: frozenset[Arc] = frozenset()
    vertices: Optional[frozenset[int]] = None

    def __post_init__(self):
        arcs = frozenset((int(a), int(c), None if b is None else int(b)) for a, c, b in self.arcs)
        for a, c, b in arcs:
            if not (0 <= a < self.m and 0 <= c < self.m and (b is None or 0 <= b < self.m)):
                raise ValueError(f"arc {(a, c, b)} outside domain 0..{self.m - 1}")
        object.__setattr__(self, "arcs", arcs)
        if self.vertices is None:
            object.__setattr__(self, "vertices", frozenset(range(self.m)))
        else:
            object.__setattr__(self, "vertices", frozenset(self.vertices))

    def pairs(self) -> set[tuple[int, int]]:
        return {(a, c) for a, c, _ in self.arcs}

    def successors(self) -> dict[int, list[int]]:
        succ: dict[int, set[int]] = {v: set() for v in self.vertices}
        for a, c, _ in self.arcs:
            succ[a].add(c)
        return {v: sorted(ws) for v, ws in succ.items()}

    def has_arc(self, a: int, c: int) -> bool:
        return any(x == a and y == c for x, y, _ in self.arcs)


@dataclass
class InTree:
    """Tree whose arcs point from child to parent, sinking at ``root``."""

    root: int
    parent: dict[int, int] = field(default_factory=dict)

    @property
    def vertices(self) -> set[int]:
        return {self.root} | set(self.parent)

    def children(self) -> dict[int, list[int]]:
        kids: dict[int, list[int]] = {v: [] for v in self.vertices}
        for child, par in self.parent.items():
            kids.setdefault(par, []).append(child)
        return {v: sorted(k) for v, k in kids.items()}

    def leaves(self) -> set[int]:
        """Non-root vertices without children."""
        has_child = set(self.parent.values())
        return {v for v in self.parent if v not in has_child}

    def depth(self, v: int) -> int:
        steps = 0
        while v != self.root:
            v = self.parent[v]
            steps += 1
            if steps > len(self.parent):
                raise ValueError("parent map contains a cycle")
        return steps

    def is_valid(self) -> bool:
        if self.root in self.parent:
            return False
        try:
            for v in self.parent:
                self.depth(v)
        except (KeyError, ValueError):
            return False
        return True

    def copy(self) -> "InTree":
        return InTree(self.root, dict(self.parent))


@dataclass(frozen=True)
class ClosedWalk:
    vertices: tuple[int, ...]

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("closed walks have length >= 1")

    def __len__(self) -> int:
        return len(self.vertices)


def locality_graph(rel: LocalityRelation) -> LabeledGraph:
    return LabeledGraph(rel.m, frozenset((a, b, None) for a, b in rel.pairs))


def strongly_connected_components(vertices: Iterable[int], succ: dict[int, list[int]]) -> list[set[int]]:
    """Tarjan's algorithm, iterative; components come out in reverse topological order."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[set[int]] = []
    counter = 0
    for root in sorted(vertices):
        if root in index:
            continue
        work = [(root, iter(succ.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            w = next(it, None)
            if w is not None:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def cycle_vertices(g: LabeledGraph) -> set[int]:
    """Vertices lying on at least one cycle (self-loops included)."""
    succ = g.successors()
    found = {a for a, c, _ in g.arcs if a == c}
    for comp in strongly_connected_components(g.vertices, succ):
        if len(comp) > 1:
            found |= comp
    return found


def cycle_core(g: LabeledGraph, gamma: int) -> LabeledGraph:
    """Arcs of ``g`` inside ``gamma``'s strongly connected component, self-loops dropped.

    Every such arc lies on a closed walk through ``gamma``.  A trivial
    component yields the bare vertex ``{gamma}``.
    """
    if not 0 <= gamma < g.m:
        raise ValueError(f"gamma={gamma} outside domain")
    loopless = {(a, c, b) for a, c, b in g.arcs if a != c}
    succ: dict[int, set[int]] = {v: set() for v in range(g.m)}
    for a, c, _ in loopless:
        succ[a].add(c)
    comp = next(
        c for c in strongly_connected_components(range(g.m), {v: sorted(ws) for v, ws in succ.items()})
        if gamma in c
    )
    if len(comp) == 1:
        return LabeledGraph(g.m, frozenset(), frozenset({gamma}))
    arcs = frozenset(arc for arc in loopless if arc[0] in comp and arc[1] in comp)
    return LabeledGraph(g.m, arcs, frozenset(comp))


def spanning_in_tree(core: LabeledGraph, gamma: int) -> InTree:
    """Breadth-first in-tree of ``core`` rooted at ``gamma``.

    The search walks arcs backwards from ``gamma``.  Each newly reached
    vertex takes the smallest-numbered parent among the vertices of the
    previous BFS layer, so the result is unique.
    """
    preds: dict[int, set[int]] = {v: set() for v in core.vertices}
    for a, c, _ in core.arcs:
        if a != c:
            preds[c].add(a)
    depth = {gamma: 0}
    tree = InTree(gamma)
    layer = [gamma]
    while layer:
        reached: dict[int, int] = {}
        for par in sorted(layer):
            for child in sorted(preds[par]):
                if child not in depth and child not in reached:
                    reached[child] = par
        for child, par in reached.items():
            depth[child] = depth[par] + 1
            tree.parent[child] = par
        layer = sorted(reached)
    return tree


def closed_walks(g: LabeledGraph, length: int) -> list[ClosedWalk]:
    """Every closed walk with exactly *length* arcs; each rotation counts separately.

    Parallel arcs with different labels do not multiply walks: a walk is a
    vertex sequence.
    """
    if length < 1:
        raise ValueError("walk length must be >= 1")
    succ = g.successors()
    out: list[ClosedWalk] = []
    for start in sorted(g.vertices):
        path = [start]

        def extend():
            last = path[-1]
            if len(path) == length:
                if start in succ[last]:
                    out.append(ClosedWalk(tuple(path)))
                return
            for nxt in succ[last]:
                path.append(nxt)
                extend()
                path.pop()

        extend()
    return out


def walk_states(walk: ClosedWalk, n: int) -> set[tuple[int, ...]]:
    """All rotations of the ring state that repeats *walk* ``n / len(walk)`` times."""
    size = len(walk)
    if n < 1 or n % size:
        raise DivisibilityError(f"walk length {size} does not divide ring size {n}")
    base = walk.vertices * (n // size)
    return {base[k:] + base[:k] for k in range(size)}
