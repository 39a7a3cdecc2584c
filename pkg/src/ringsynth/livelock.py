"""Propagation-level livelock analysis of action graphs.

A propagation is a walk through the action graph, i.e. a sequence of
actions where each one writes the value the next one reads as its
predecessor.  A ring livelocks exactly when some family of ``m > 1``
periodic propagations with a common period lead each other in a circle;
that condition is undecidable in general, so the search here is bounded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .graphs import strongly_connected_components
from .protocol import Action, Protocol

__all__ = [
    "Propagation",
    "LivelockWitness",
    "NoneWithinBounds",
    "leads",
    "propagation_leads",
    "periodic_propagations",
    "find_circular_leads",
    "structurally_livelock_free",
]


@dataclass(frozen=True)
class Propagation:
    actions: tuple[Action, ...]
    period: Optional[int] = None

    def __post_init__(self):
        acts = self.actions
        for x, y in zip(acts, acts[1:]):
            if x.c != y.a:
                raise ValueError(f"{tuple(x)} does not feed {tuple(y)}")
        if self.period is not None and acts and acts[-1].c != acts[0].a:
            raise ValueError("periodic propagation must close up")

    @property
    def periodic(self) -> bool:
        return self.period is not None

    def __len__(self) -> int:
        return len(self.actions)


@dataclass(frozen=True)
class LivelockWitness:
    """``m`` period-``n`` propagations, each leading the next modulo ``m``."""

    n: int
    propagations: tuple[Propagation, ...]

    found = True

    @property
    def m(self) -> int:
        return len(self.propagations)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "m": self.m,
                "propagations": [[list(a) for a in prop.actions] for prop in self.propagations],
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class NoneWithinBounds:
    """No witness with ``n <= n_max`` and ``m <= m_max``; not a proof of livelock-freedom."""

    n_max: int
    m_max: int

    found = False


def leads(first: Action, second: Action) -> bool:
    """``(a, b, c)`` leads ``(d, e, f)`` iff ``e == c``."""
    return second.b == first.c


def propagation_leads(first: Propagation, second: Propagation) -> bool:
    return len(first) == len(second) and all(leads(x, y) for x, y in zip(first.actions, second.actions))


def periodic_propagations(p: Protocol, n: int) -> list[Propagation]:
    """All closed action walks of length *n*; rotations are distinct propagations."""
    if n < 1:
        raise ValueError("period must be >= 1")
    by_src: dict[int, list[Action]] = {}
    for act in p.sorted_actions():
        by_src.setdefault(act.a, []).append(act)
    out: list[Propagation] = []
    walk: list[Action] = []

    def extend(first: Action) -> None:
        if len(walk) == n:
            if walk[-1].c == first.a:
                out.append(Propagation(tuple(walk), n))
            return
        for nxt in by_src.get(walk[-1].c, ()):
            walk.append(nxt)
            extend(first)
            walk.pop()

    for first in p.sorted_actions():
        walk.append(first)
        extend(first)
        walk.pop()
    return out


def _simple_cycle(succ: list[list[int]], m_max: int) -> Optional[list[int]]:
    """First simple cycle with 2..m_max nodes, rooted at its smallest node."""
    size = len(succ)
    for start in range(size):
        path = [start]
        on_path = {start}

        def dfs(v: int) -> Optional[list[int]]:
            for w in succ[v]:
                if w == start and len(path) >= 2:
                    return list(path)
                if w > start and w not in on_path and len(path) < m_max:
                    path.append(w)
                    on_path.add(w)
                    found = dfs(w)
                    if found:
                        return found
                    path.pop()
                    on_path.discard(w)
            return None

        found = dfs(start)
        if found:
            return found
    return None


def find_circular_leads(p: Protocol, n_max: int, m_max: int) -> Union[LivelockWitness, NoneWithinBounds]:
    """Search periods ``1..n_max`` for ``2..m_max`` propagations leading each other in a circle."""
    if n_max < 1 or m_max < 1:
        raise ValueError("bounds must be >= 1")
    for n in range(1, n_max + 1):
        props = periodic_propagations(p, n)
        if len(props) < 2:
            continue
        succ = [
            [j for j, other in enumerate(props) if j != i and propagation_leads(prop, other)]
            for i, prop in enumerate(props)
        ]
        cycle = _simple_cycle(succ, m_max)
        if cycle:
            return LivelockWitness(n, tuple(props[i] for i in cycle))
    return NoneWithinBounds(n_max, m_max)


def structurally_livelock_free(p: Protocol) -> bool:
    """True iff the action graph's only cycles are self-loops, all at one vertex.

    With no longer cycles every periodic propagation repeats a self-loop
    action at that vertex, and such a family cannot lead itself around.
    """
    loops = {a.a for a in p.actions if a.a == a.c}
    if len(loops) > 1:
        return False
    succ: dict[int, list[int]] = {v: [] for v in range(p.m)}
    for a in p.actions:
        if a.a != a.c:
            succ[a.a].append(a.c)
    return all(len(comp) == 1 for comp in strongly_connected_components(range(p.m), succ))
