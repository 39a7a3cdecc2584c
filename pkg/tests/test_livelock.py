import itertools
import json
import logging
import random

import pytest
from hypothesis import given, settings, strategies as st

from ringsynth.livelock import (
    LivelockWitness,
    NoneWithinBounds,
    Propagation,
    find_circular_leads,
    leads,
    periodic_propagations,
    propagation_leads,
    structurally_livelock_free,
)
from ringsynth.protocol import Action, Protocol
from ringsynth.synthesis import syn_leadsto
from ringsynth.verifier import successors, well_formed

from conftest import STABILIZER

log = logging.getLogger(__name__)


def proto(m, triples):
    return Protocol(m, frozenset(Action(*t) for t in triples))


def test_leads_examples():
    assert leads(Action(0, 2, 1), Action(1, 1, 2))
    assert not leads(Action(0, 2, 1), Action(1, 0, 2))


@given(st.tuples(*[st.integers(0, 5)] * 5))
def test_leads_definition(t):
    a, b, c, d, f = t
    assert leads(Action(a, b, c), Action(d, c, f))


def test_stabilizer_period_two():
    props = periodic_propagations(STABILIZER, 2)
    assert Propagation((Action(1, 1, 2), Action(2, 0, 1)), 2) in props


def test_empty_protocol_has_no_propagations():
    assert periodic_propagations(proto(3, []), 3) == []


def test_propagation_validates_chain():
    with pytest.raises(ValueError):
        Propagation((Action(0, 2, 1), Action(2, 0, 1)))
    with pytest.raises(ValueError):
        Propagation((Action(0, 2, 1),), 1)


def test_stabilizer_bounded_search():
    assert find_circular_leads(STABILIZER, 6, 6) == NoneWithinBounds(6, 6)


def test_hand_built_two_family_witness():
    # (0,1,0) and (1,0,1) lead each other: each writes the other's guard
    p = proto(2, [(0, 1, 0), (1, 0, 1)])
    found = find_circular_leads(p, 4, 4)
    assert isinstance(found, LivelockWitness) and found.m == 2
    props = found.propagations
    for i in range(found.m):
        assert propagation_leads(props[i - 1], props[i])
    data = json.loads(found.to_json())
    assert data["m"] == 2 and data["n"] == found.n


def test_structural_examples():
    assert not structurally_livelock_free(proto(2, [(0, 1, 1), (1, 0, 0)]))
    assert structurally_livelock_free(proto(3, []))
    assert not structurally_livelock_free(proto(3, [(0, 1, 0), (2, 1, 2)]))  # loops at two vertices


def test_synthesized_fixtures(specs):
    for spec in specs.values():
        out = syn_leadsto(spec)
        assert structurally_livelock_free(out.protocol)
        assert find_circular_leads(out.protocol, 6, 6) == NoneWithinBounds(6, 6)
        for prop in periodic_propagations(out.protocol, 1):
            assert prop.actions[0].a == prop.actions[0].c == out.protocol.gamma


def random_protocol(rng, m, k):
    acts = {}
    for _ in range(50):
        if len(acts) == k:
            break
        a, b = rng.randrange(m), rng.randrange(m)
        c = rng.choice([v for v in range(m) if v != b])
        trial = dict(acts)
        trial[(a, b)] = c
        p = proto(m, [(x, y, z) for (x, y), z in trial.items()])
        if well_formed(p).ok:
            acts = trial
    return proto(m, [(x, y, z) for (x, y), z in acts.items()])


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 3), st.integers(0, 5))
def test_structural_freedom_implies_no_witness(seed, m, k):
    p = random_protocol(random.Random(seed), m, k)
    if structurally_livelock_free(p):
        assert not find_circular_leads(p, 8, 8).found


def has_cycle(p, n):
    """Does the n-process ring have any cycle of states? Peel off states that cannot stay forever."""
    alive = set(itertools.product(range(p.m), repeat=n))
    succ = {s: {t for _, t in successors(p, s)} for s in alive}
    changed = True
    while changed:
        dead = {s for s in alive if not succ[s] & alive}
        alive -= dead
        changed = bool(dead)
    return bool(alive)


def test_cross_validation_logged(caplog):
    # witnesses should show up as livelock cycles at some small N; misses are logged only
    rng = random.Random(2024)
    witnessed = agreed = 0
    with caplog.at_level(logging.INFO):
        for _ in range(200):
            m = rng.randint(2, 3)
            p = random_protocol(rng, m, rng.randint(1, 5))
            found = find_circular_leads(p, 4, 4)
            if not found.found:
                continue
            witnessed += 1
            hit = any(has_cycle(p, n) for n in range(2, 9) if m**n <= 7000)
            agreed += hit
            if not hit:
                log.info("witness without a livelock at N<=8: %s", sorted(p.actions))
    log.info("cross-validation: %d of %d witnesses reproduced", agreed, witnessed)
    assert witnessed > 0
