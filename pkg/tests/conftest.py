"""Shared fixtures and a deliberately naive reference checker."""

from __future__ import annotations

import itertools
from pathlib import Path

import pytest
from hypothesis import strategies as st

from ringsynth.protocol import Action, Protocol, load_protocol
from ringsynth.spec_model import LocalityRelation, ProblemSpec, load_spec

FIXTURES = Path(__file__).parent / "fixtures"

CASES = ("sumnot2", "sumtwo", "parity", "agreement")

REFERENCE = {
    "sumnot2": {(0, 2, 3), (3, 3, 2), (2, 0, 2)},
    "sumtwo": {(0, 3, 1), (1, 0, 3), (1, 2, 3), (2, 1, 3), (3, 0, 3), (3, 1, 3), (3, 2, 3)},
    "parity": {(1, 3, 2), (3, 1, 2), (2, 1, 2), (2, 3, 2)},
    "agreement": {(0, 2, 1), (3, 1, 2), (2, 0, 1), (2, 3, 1), (1, 0, 1), (1, 2, 1), (1, 3, 1)},
}

# the stabilizer used to introduce propagations, over M=3
STABILIZER = Protocol(3, frozenset(Action(*a) for a in [(0, 2, 1), (1, 1, 2), (2, 0, 1)]))


def spec_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


def protocol_path(name: str) -> Path:
    return FIXTURES / f"{name}-protocol.json"


@pytest.fixture(scope="session")
def specs() -> dict[str, ProblemSpec]:
    return {name: load_spec(spec_path(name)) for name in CASES}


@pytest.fixture(scope="session")
def reference() -> dict[str, Protocol]:
    return {name: load_protocol(protocol_path(name)) for name in CASES}


def brute_states(rel: LocalityRelation, n: int) -> set[tuple[int, ...]]:
    return {
        s for s in itertools.product(range(rel.m), repeat=n) if all((s[i - 1], s[i]) in rel.pairs for i in range(n))
    }


def brute_leadsto(p: Protocol, spec: ProblemSpec, n: int, init=None) -> str:
    """'holds', 'deadlock' or 'livelock', by plain set-based search.

    Shares no code with the library's kernels.
    """
    delta = {(a, b): c for a, b, c in p.actions}
    in_q = lambda s: all((s[i - 1], s[i]) in spec.q.pairs for i in range(n))

    def succ(s):
        for i in range(n):
            c = delta.get((s[i - 1], s[i]))
            if c is not None:
                yield s[:i] + (c,) + s[i + 1:]

    frontier = set(brute_states(spec.r, n) if init is None else init)
    seen = set()
    while frontier:
        s = frontier.pop()
        if s in seen:
            continue
        seen.add(s)
        if in_q(s):
            continue
        nxt = set(succ(s))
        if not nxt:
            return "deadlock"
        frontier |= nxt - seen
    # repeatedly drop non-Q states all of whose successors are already resolved
    region = {s for s in seen if not in_q(s)}
    changed = True
    while changed:
        changed = False
        for s in list(region):
            if not any(t in region for t in succ(s)):
                region.discard(s)
                changed = True
    return "livelock" if region else "holds"


def admissible(spec: ProblemSpec, n_max: int) -> list[int]:
    return [n for n in range(2, n_max + 1) if brute_states(spec.r, n)]


@st.composite
def relations(draw, m=None, min_m=2, max_m=4):
    m = draw(st.integers(min_m, max_m)) if m is None else m
    pairs = draw(st.frozensets(st.tuples(st.integers(0, m - 1), st.integers(0, m - 1))))
    return LocalityRelation(m, pairs)


def random_spec(rng, m: int, density: float = 0.4) -> ProblemSpec:
    """A random spec that passes validation with a nonempty ``R``."""
    from ringsynth.spec_model import OverlapError, validate_spec
    import warnings

    while True:
        r = LocalityRelation(m, {(a, b) for a in range(m) for b in range(m) if rng.random() < density})
        q = LocalityRelation(m, {(a, b) for a in range(m) for b in range(m) if rng.random() < density})
        spec = ProblemSpec(m, r, q)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                report = validate_spec(spec)
        except OverlapError:
            continue
        if report.r_nonempty:
            return spec
