"""Fixed-size explicit-state checking of ring protocols.

A ring of ``N`` copies of the template process runs under interleaving
semantics: in each step one enabled process ``i`` fires the action guarded
by ``(x[i-1], x[i])``.  States are encoded as base-``M`` integers, process 0
in the least significant digit.

The exploration kernel is compiled with Cython when the extension is
available; ``RINGSYNTH_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional, Union

from ..protocol import Action, Protocol
from ..spec_model import LocalityRelation, ProblemSpec
from . import _pykernel

try:
    if os.environ.get("RINGSYNTH_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernel
except ImportError:
    _ckernel = None

KERNEL = "cython" if _ckernel is not None else "python"

DEFAULT_BUDGET = 2 ** 24

__all__ = [
    "KERNEL",
    "DEFAULT_BUDGET",
    "BudgetExceeded",
    "RingSizeError",
    "WellFormedReport",
    "Holds",
    "DeadlockCounterexample",
    "LivelockCounterexample",
    "Verdict",
    "encode",
    "decode",
    "successors",
    "well_formed",
    "predicate_states",
    "check_leadsto",
    "check_convergence",
    "check_closure",
]


class BudgetExceeded(RuntimeError):
    """``M**N`` exceeds the configured state-space budget."""


class RingSizeError(ValueError):
    """Rings need at least two processes."""


RingState = tuple[int, ...]


@dataclass(frozen=True)
class Holds:
    n: int
    explored: int = 0

    holds = True

    def to_dict(self) -> dict:
        return {"n": self.n, "verdict": "holds", "explored": self.explored}


@dataclass(frozen=True)
class DeadlockCounterexample:
    """Path from an ``R``-state to a deadlocked state outside ``Q``."""

    n: int
    path: tuple[RingState, ...]
    explored: int = 0

    holds = False

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "verdict": "deadlock",
            "explored": self.explored,
            "path": [list(s) for s in self.path],
        }


@dataclass(frozen=True)
class LivelockCounterexample:
    """Lasso: ``stem`` runs from an ``R``-state to ``loop[0]``; ``loop`` stays outside ``Q``
    and ends where it started (``loop[-1] == loop[0]``)."""

    n: int
    stem: tuple[RingState, ...]
    loop: tuple[RingState, ...]
    explored: int = 0

    holds = False

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "verdict": "livelock",
            "explored": self.explored,
            "stem": [list(s) for s in self.stem],
            "loop": [list(s) for s in self.loop],
        }


Verdict = Union[Holds, DeadlockCounterexample, LivelockCounterexample]


def verdict_json(verdict: Verdict) -> str:
    return json.dumps(verdict.to_dict(), sort_keys=True)


def encode(state, m: int) -> int:
    code = 0
    for v in reversed(state):
        code = code * m + v
    return code


def decode(code: int, m: int, n: int) -> RingState:
    out = []
    for _ in range(n):
        code, d = divmod(code, m)
        out.append(d)
    return tuple(out)


def successors(p: Protocol, state) -> list[tuple[int, RingState]]:
    """Enabled moves ``(process, next_state)`` in process order."""
    n = len(state)
    table = p.transition_table()
    out = []
    for i in range(n):
        c = table[state[i - 1] * p.m + state[i]]
        if c >= 0:
            nxt = list(state)
            nxt[i] = c
            out.append((i, tuple(nxt)))
    return out


@dataclass
class WellFormedReport:
    determinism: list[tuple[Action, Action]] = field(default_factory=list)
    self_disabling: list[tuple[Action, Action]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.determinism or self.self_disabling)

    def __bool__(self) -> bool:
        return self.ok


def well_formed(p: Protocol) -> WellFormedReport:
    """Check determinism and self-disabling.

    An action ``(a, b, b)`` counts as a self-disabling violation against
    itself: firing it leaves it enabled.
    """
    report = WellFormedReport()
    acts = p.sorted_actions()
    by_guard: dict[tuple[int, int], list[Action]] = {}
    for act in acts:
        by_guard.setdefault((act.a, act.b), []).append(act)
    for group in by_guard.values():
        for i, x in enumerate(group):
            for y in group[i + 1:]:
                report.determinism.append((x, y))
    for x in acts:
        for y in by_guard.get((x.a, x.c), ()):
            report.self_disabling.append((x, y))
    return report


def _check_ring(m: int, n: int, budget: int) -> None:
    if n < 2:
        raise RingSizeError("a ring needs at least 2 processes")
    if m ** n > budget:
        raise BudgetExceeded(f"{m}^{n} states exceed the budget of {budget}")


def _predicate_codes(rel: LocalityRelation, n: int) -> list[int]:
    """Sorted codes of ring states with ``rel(x[i-1], x[i])`` for every ``i``."""
    m = rel.m
    succ = {a: [b for b in range(m) if (a, b) in rel.pairs] for a in range(m)}
    codes = []
    powers = [m ** i for i in range(n)]

    def extend(first, last, depth, code):
        if depth == n:
            if (last, first) in rel.pairs:
                codes.append(code)
            return
        for nxt in succ[last]:
            extend(first, nxt, depth + 1, code + nxt * powers[depth])

    for first in range(m):
        extend(first, first, 1, first)
    codes.sort()
    return codes


def predicate_states(rel: LocalityRelation, n: int, budget: int = DEFAULT_BUDGET) -> set[RingState]:
    _check_ring(rel.m, n, budget)
    return {decode(c, rel.m, n) for c in _predicate_codes(rel, n)}


def _kernel(name: Optional[str]):
    if name is None:
        return _ckernel or _pykernel
    if name == "python":
        return _pykernel
    if name == "cython":
        if _ckernel is None:
            raise RuntimeError("compiled kernel is not available")
        return _ckernel
    raise ValueError(f"unknown kernel {name!r}")


def _explore(p: Protocol, init_codes: list[int], q: LocalityRelation, n: int, kernel) -> Verdict:
    kind, stem, loop, explored = _kernel(kernel).explore(
        p.m, n, p.transition_table(), [int(v) for v in q.table()], init_codes
    )
    dec = lambda codes: tuple(decode(c, p.m, n) for c in codes)
    if kind == _pykernel.HOLDS:
        return Holds(n, explored)
    if kind == _pykernel.DEADLOCK:
        return DeadlockCounterexample(n, dec(stem), explored)
    return LivelockCounterexample(n, dec(stem), dec(loop), explored)


def check_leadsto(
    p: Protocol, spec: ProblemSpec, n: int, budget: int = DEFAULT_BUDGET, kernel: Optional[str] = None
) -> Verdict:
    """Decide whether every execution of *p* on *n* processes from ``R`` reaches ``Q``.

    ``Q``-states are absorbing.  The verdict is refuted by a reachable
    deadlock outside ``Q`` (reported first, with a shortest path) or by a
    reachable cycle outside ``Q``.
    """
    if p.m != spec.m:
        raise ValueError("protocol and spec disagree on the domain size")
    _check_ring(spec.m, n, budget)
    return _explore(p, _predicate_codes(spec.r, n), spec.q, n, kernel)


def check_convergence(
    p: Protocol, q: LocalityRelation, n: int, budget: int = DEFAULT_BUDGET, kernel: Optional[str] = None
) -> Verdict:
    """``true ~> Q``: every state eventually reaches ``Q``."""
    _check_ring(q.m, n, budget)
    return _explore(p, list(range(q.m ** n)), q, n, kernel)


def check_closure(
    p: Protocol, rel: LocalityRelation, n: int, budget: int = DEFAULT_BUDGET, kernel: Optional[str] = None
) -> bool:
    """True iff no transition of *p* leaves the conjunctive predicate of *rel*."""
    _check_ring(rel.m, n, budget)
    hit = _kernel(kernel).first_exit(
        rel.m, n, p.transition_table(), [int(v) for v in rel.table()], _predicate_codes(rel, n)
    )
    return hit is None
