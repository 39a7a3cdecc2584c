import random

import pytest
from hypothesis import given, settings, strategies as st

from ringsynth import verifier
from ringsynth.graphs import closed_walks, locality_graph, walk_states
from ringsynth.protocol import Action, Protocol
from ringsynth.spec_model import LocalityRelation, ProblemSpec, eval_relation_expr
from ringsynth.verifier import (
    BudgetExceeded,
    DeadlockCounterexample,
    Holds,
    LivelockCounterexample,
    RingSizeError,
    check_closure,
    check_convergence,
    check_leadsto,
    decode,
    encode,
    predicate_states,
    successors,
    well_formed,
)

from conftest import STABILIZER, brute_leadsto, brute_states, relations

KERNELS = ["python"] + (["cython"] if verifier.KERNEL == "cython" else [])


def proto(m, triples):
    return Protocol(m, frozenset(Action(*t) for t in triples))


def rel(m, pairs):
    return LocalityRelation(m, frozenset(pairs))


def test_well_formed_examples():
    assert well_formed(STABILIZER).ok
    report = well_formed(proto(4, [(0, 1, 2), (0, 1, 3)]))
    assert report.determinism and not report.ok
    report = well_formed(proto(4, [(0, 1, 2), (0, 2, 3)]))
    assert report.self_disabling and not report.determinism


def test_encoding_round_trip():
    for code in range(81):
        assert encode(decode(code, 3, 4), 3) == code
    assert encode((1, 0, 0), 3) == 1  # process 0 is the least significant digit


@pytest.mark.parametrize("kernel", KERNELS)
def test_reference_sumnot2_holds(specs, reference, kernel):
    for n in (2, 4, 6, 8):
        assert check_leadsto(reference["sumnot2"], specs["sumnot2"], n, kernel=kernel).holds


def test_reference_parity(specs, reference):
    # the reference list has no action for (1,1) or (3,3): all-odd rings deadlock
    for n in range(2, 7):
        verdict = check_leadsto(reference["parity"], specs["parity"], n)
        assert isinstance(verdict, DeadlockCounterexample)
        assert verdict.path[-1] in {(1,) * n, (3,) * n}


def test_complete_parity_holds(specs):
    full = proto(4, [(1, 1, 2), (1, 3, 2), (3, 1, 2), (3, 3, 2), (2, 1, 2), (2, 3, 2)])
    for n in range(2, 9):
        assert check_leadsto(full, specs["parity"], n).holds


def test_empty_protocol_deadlocks(specs):
    verdict = check_leadsto(proto(4, []), specs["sumnot2"], 2)
    assert isinstance(verdict, DeadlockCounterexample) and len(verdict.path) == 1
    verdict = check_convergence(proto(2, []), rel(2, {(1, 1)}), 2)
    assert isinstance(verdict, DeadlockCounterexample)


def test_convergence_examples(specs, reference):
    q = eval_relation_expr("(p+s)!=2", 3)
    for n in range(2, 7):
        assert check_convergence(STABILIZER, q, n).holds
    verdict = check_convergence(reference["sumnot2"], specs["sumnot2"].q, 4)
    assert isinstance(verdict, DeadlockCounterexample)
    assert verdict.path[-1] == (0, 0, 0, 0)


def test_closure_examples():
    assert check_closure(STABILIZER, LocalityRelation.full(3), 3)
    assert check_closure(STABILIZER, eval_relation_expr("(p+s)!=2", 3), 3)
    assert not check_closure(proto(2, [(1, 1, 0)]), rel(2, {(1, 1)}), 2)


def test_predicate_states_examples(specs):
    r = specs["sumnot2"].r
    assert predicate_states(r, 4) == {(0, 2, 0, 2), (2, 0, 2, 0)}
    assert predicate_states(r, 3) == set()
    assert len(predicate_states(LocalityRelation.full(2), 2)) == 4


def test_guards():
    with pytest.raises(RingSizeError):
        check_convergence(STABILIZER, LocalityRelation.full(3), 1)
    with pytest.raises(BudgetExceeded):
        check_convergence(STABILIZER, LocalityRelation.full(3), 8, budget=1000)


@settings(max_examples=100, deadline=None)
@given(relations(), st.integers(2, 6))
def test_predicate_states_match_walks(r, n):
    g = locality_graph(r)
    walks = set()
    for length in range(1, n + 1):
        if n % length == 0:
            for w in closed_walks(g, length):
                walks |= walk_states(w, n)
    assert predicate_states(r, n) == walks == brute_states(r, n)


def random_protocol(rng, m):
    table = {}
    for a in range(m):
        for b in range(m):
            if rng.random() < 0.5:
                table[(a, b)] = rng.choice([c for c in range(m) if c != b])
    return proto(m, [(a, b, c) for (a, b), c in table.items()])


def random_problem(rng, m):
    r = rel(m, {(a, b) for a in range(m) for b in range(m) if rng.random() < 0.5})
    q = rel(m, {(a, b) for a in range(m) for b in range(m) if rng.random() < 0.5})
    return ProblemSpec(m, r, q)


def replay(p, spec, verdict):
    n = verdict.n
    in_q = lambda s: all(spec.q(s[i - 1], s[i]) for i in range(n))
    if isinstance(verdict, DeadlockCounterexample):
        path = verdict.path
        assert not successors(p, path[-1]) and not in_q(path[-1])
    else:
        path = verdict.stem
        loop = verdict.loop
        assert loop[0] == path[-1] == loop[-1] and len(loop) >= 2
        assert all(not in_q(s) for s in loop)
        for s, t in zip(loop, loop[1:]):
            assert t in {x for _, x in successors(p, s)}
    assert all(spec.r(path[0][i - 1], path[0][i]) for i in range(n))
    for s, t in zip(path, path[1:]):
        assert not in_q(s)
        assert t in {x for _, x in successors(p, s)}


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 3), st.integers(2, 5))
def test_against_brute_force(seed, m, n):
    rng = random.Random(seed)
    p, spec = random_protocol(rng, m), random_problem(rng, m)
    expected = brute_leadsto(p, spec, n)
    verdicts = [check_leadsto(p, spec, n, kernel=k) for k in KERNELS]
    assert all(v == verdicts[0] for v in verdicts)  # kernels agree exactly
    verdict = verdicts[0]
    kind = {Holds: "holds", DeadlockCounterexample: "deadlock", LivelockCounterexample: "livelock"}[type(verdict)]
    # any deadlock is reported before livelocks; the oracle stops at the first deadlock it meets
    assert (kind == "holds") == (expected == "holds")
    if kind != "holds":
        if expected == "deadlock":
            assert kind == "deadlock"
        replay(p, spec, verdict)


def rotate(s, k):
    return s[k:] + s[:k]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 3), st.integers(2, 5), st.integers(1, 4))
def test_rotation_symmetry(seed, m, n, k):
    rng = random.Random(seed)
    p, spec = random_protocol(rng, m), random_problem(rng, m)
    verdict = check_leadsto(p, spec, n)
    if isinstance(verdict, DeadlockCounterexample):
        k %= n
        moved = tuple(rotate(s, k) for s in verdict.path)
        replay(p, spec, DeadlockCounterexample(n, moved))
    elif isinstance(verdict, LivelockCounterexample):
        k %= n
        replay(
            p,
            spec,
            LivelockCounterexample(n, tuple(rotate(s, k) for s in verdict.stem), tuple(rotate(s, k) for s in verdict.loop)),
        )


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["sumnot2", "sumtwo", "agreement"]), st.integers(0, 2**32 - 1))
def test_larger_target_keeps_holding(specs, reference, name, seed):
    spec = specs[name]
    rng = random.Random(seed)
    extra = {(a, b) for a in range(4) for b in range(4) if rng.random() < 0.3}
    bigger = ProblemSpec(4, spec.r, spec.q | rel(4, extra))
    for n in (2, 4, 6):
        if check_leadsto(reference[name], spec, n).holds:
            assert check_leadsto(reference[name], bigger, n).holds


def test_verdict_json():
    text = verifier.verdict_json(Holds(4, 10))
    assert text == '{"explored": 10, "n": 4, "verdict": "holds"}'


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 3), st.integers(2, 5))
def test_deadlock_path_is_shortest(seed, m, n):
    rng = random.Random(seed)
    p, spec = random_protocol(rng, m), random_problem(rng, m)
    verdict = check_leadsto(p, spec, n)
    if not isinstance(verdict, DeadlockCounterexample):
        return
    in_q = lambda s: all(spec.q(s[i - 1], s[i]) for i in range(n))
    layer, seen, depth = set(brute_states(spec.r, n)), set(), 0
    while layer:
        if any(not in_q(s) and not successors(p, s) for s in layer):
            break
        seen |= layer
        layer = {t for s in layer if not in_q(s) for _, t in successors(p, s)} - seen
        depth += 1
    assert len(verdict.path) == depth + 1


def test_pure_python_fallback_selected_at_import():
    import os
    import subprocess
    import sys

    env = dict(os.environ, RINGSYNTH_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import ringsynth.verifier as v; print(v.KERNEL)"], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "python"
