"""Synthesis of parameterized ring protocols guaranteeing ``R ~> Q``.

For each candidate sink value ``gamma`` with ``q(gamma, gamma)`` the
synthesizer builds a tree of arcs sinking to ``gamma`` (plus a self-loop
there), labels each arc with the guard values that may fire it, and emits
one action per label.  A candidate fails when the tree has no leaf on a
cycle of ``r``'s locality graph or some arc gets no label; the next
candidate is tried in ascending order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

from .graphs import InTree, LabeledGraph, cycle_core, cycle_vertices, locality_graph, spanning_in_tree
from .protocol import Action, Protocol
from .spec_model import DomainError, LocalityRelation, ProblemSpec

__all__ = [
    "Action",
    "Protocol",
    "LabelingFailure",
    "Skeleton",
    "Solution",
    "NoSolution",
    "GammaFailure",
    "SynthesisOutcome",
    "build_skeleton",
    "label_tree",
    "syn_leadsto",
    "exists_solution",
    "syn_disjunctive_R",
    "syn_conjunctive_R",
    "syn_conjunctive_Q",
    "syn_disjunctive_Q",
    "DEFAULT_SELFCHECK_N",
]

DEFAULT_SELFCHECK_N = 6


class LabelingFailure(Exception):
    def __init__(self, arc: tuple[int, int]):
        self.arc = arc
        super().__init__(f"arc {arc[0]}->{arc[1]} admits no label")


@dataclass
class Skeleton:
    """Every intermediate tree of one synthesis attempt, kept for ``--explain``."""

    gamma: int
    core: LabeledGraph
    tree: InTree  # spanning tree of the core
    non_r_values: set[int]  # values on no cycle of r's locality graph
    pruned: set[int]  # tree leaves among non_r_values, detached
    trimmed: InTree  # after pruning and the arcs straight to gamma
    attached: dict[int, int]  # v -> leaf, for values with r(v, gamma)
    unattached: list[int]  # values with r(v, gamma) and no leaf other than themselves
    final: InTree  # the skeleton; gamma's self-loop is implicit
    labels: dict[tuple[int, int], list[int]] = field(default_factory=dict)

    def leaves(self) -> set[int]:
        return self.final.leaves()

    def arcs(self) -> list[tuple[int, int]]:
        return sorted(self.final.parent.items()) + [(self.gamma, self.gamma)]

    def explain(self) -> str:
        def fmt(tree):
            arcs = ", ".join(f"{c}->{p}" for c, p in sorted(tree.parent.items()))
            return f"root {tree.root}: {{{arcs}}}"

        lines = [
            f"gamma = {self.gamma}",
            f"core vertices = {sorted(self.core.vertices)}",
            f"tau   (spanning tree)  {fmt(self.tree)}",
            f"values on no r-cycle = {sorted(self.non_r_values)}; pruned leaves = {sorted(self.pruned)}",
            f"tau'  (trimmed)        {fmt(self.trimmed)}",
            f"attached to leaves = {dict(sorted(self.attached.items()))}; skipped = {self.unattached}",
            f"tau'' (skeleton)       {fmt(self.final)} + self-loop {self.gamma}->{self.gamma}",
            f"leaves = {sorted(self.leaves())}",
        ]
        for arc, labs in sorted(self.labels.items()):
            lines.append(f"  label {arc[0]}->{arc[1]}: {labs}")
        return "\n".join(lines)


@dataclass
class GammaFailure:
    gamma: Optional[int]
    reason: str

    def __str__(self) -> str:
        if self.gamma is None:
            return self.reason
        return f"gamma={self.gamma}: {self.reason}"


@dataclass
class Solution:
    protocol: Protocol
    skeleton: Skeleton
    failures: list[GammaFailure] = field(default_factory=list)
    via: Optional[int] = None  # which disjunct/conjunct run succeeded, for the variants

    ok = True


@dataclass
class NoSolution:
    failures: list[GammaFailure] = field(default_factory=list)

    ok = False

    def trace(self) -> str:
        return "\n".join(str(f) for f in self.failures)


SynthesisOutcome = Union[Solution, NoSolution]


def _validate_tree(tree: InTree, core: LabeledGraph, gamma: int) -> None:
    if tree.root != gamma:
        raise ValueError(f"tree is rooted at {tree.root}, expected gamma={gamma}")
    if set(tree.vertices) != set(core.vertices) or not tree.is_valid():
        raise ValueError("tree must span exactly the core vertices and sink to gamma")
    for child, par in tree.parent.items():
        if not core.has_arc(child, par):
            raise ValueError(f"tree arc {child}->{par} is not an arc of the core")


def build_skeleton(
    spec: ProblemSpec,
    gamma: int,
    tree: Optional[InTree] = None,
    attach: Optional[Mapping[int, int]] = None,
) -> Skeleton:
    """Construct the tree skeleton for *gamma* (labels are filled in by :func:`label_tree`).

    A value ``v`` with ``r(v, gamma)`` may not point at ``gamma`` directly;
    it hangs below the smallest leaf ``l`` with ``not r(v, l)``, or below the
    smallest other leaf when every leaf is ``r``-related to it.

    *tree* replaces the default breadth-first spanning tree of the core and
    *attach* pins the leaf chosen for such a ``v``; both exist to reproduce
    a particular hand derivation.
    """
    m, r = spec.m, spec.r
    core = cycle_core(locality_graph(spec.q), gamma)
    if tree is None:
        tree = spanning_in_tree(core, gamma)
    else:
        _validate_tree(tree, core, gamma)

    non_r = set(range(m)) - cycle_vertices(locality_graph(r))
    pruned = tree.leaves() & non_r
    trimmed = InTree(gamma, {c: p for c, p in tree.parent.items() if c not in pruned})

    for v in range(m):
        if v in core.vertices or v in pruned:
            continue
        if not r(v, gamma):
            trimmed.parent[v] = gamma

    final = trimmed.copy()
    leaves = sorted(trimmed.leaves())
    attached: dict[int, int] = {}
    unattached: list[int] = []
    attach = dict(attach or {})
    for v in range(m):
        if v == gamma or not r(v, gamma) or v in trimmed.parent:
            continue
        if v in attach:
            leaf = attach.pop(v)
            if leaf not in leaves or leaf == v:
                raise ValueError(f"{leaf} is not a leaf of the trimmed tree usable for {v}")
        else:
            usable = [l for l in leaves if l != v]
            leaf = next((l for l in usable if not r(v, l)), usable[0] if usable else None)
        if leaf is None:
            unattached.append(v)
        else:
            final.parent[v] = leaf
            attached[v] = leaf
    if attach:
        raise ValueError(f"attachments for values that need none: {sorted(attach)}")
    return Skeleton(gamma, core, tree, non_r, pruned, trimmed, attached, unattached, final)


def label_tree(skel: Skeleton, spec: ProblemSpec) -> dict[tuple[int, int], list[int]]:
    """Guard labels for every skeleton arc ``(a, c)``.

    Leaves take ``b != c`` with ``r(a, b) and not q(a, b)``; every other arc,
    the self-loop included, takes ``b != c`` with ``not q(a, b)``.
    """
    leaves = skel.leaves()
    labels: dict[tuple[int, int], list[int]] = {}
    for a, c in skel.arcs():
        if a in leaves:
            labs = [b for b in range(spec.m) if b != c and spec.r(a, b) and not spec.q(a, b)]
        else:
            labs = [b for b in range(spec.m) if b != c and not spec.q(a, b)]
        if not labs:
            raise LabelingFailure((a, c))
        labels[(a, c)] = labs
    skel.labels = labels
    return labels


def _selfcheck(p: Protocol, spec: ProblemSpec, max_n: int) -> Optional[str]:
    from . import verifier

    for n in range(2, max_n + 1):
        if spec.m ** n > verifier.DEFAULT_BUDGET:
            break
        verdict = verifier.check_leadsto(p, spec, n)
        if not verdict.holds:
            return f"self-check refuted at N={n}: {verdict.to_dict()['verdict']}"
    return None


def _attempt(spec, gamma, tree, attach, selfcheck_n) -> Union[Solution, GammaFailure]:
    skel = build_skeleton(spec, gamma, tree, attach)
    r_cycle_values = cycle_vertices(locality_graph(spec.r))
    if not skel.leaves() & r_cycle_values:
        return GammaFailure(gamma, "no leaf of the skeleton lies on a cycle of r")
    try:
        labels = label_tree(skel, spec)
    except LabelingFailure as exc:
        return GammaFailure(gamma, str(exc))
    actions = frozenset(Action(a, b, c) for (a, c), labs in labels.items() for b in labs)
    protocol = Protocol(spec.m, actions, gamma, provenance=skel)
    if selfcheck_n:
        problem = _selfcheck(protocol, spec, selfcheck_n)
        if problem:
            return GammaFailure(gamma, problem)
    return Solution(protocol, skel)


def syn_leadsto(
    spec: ProblemSpec,
    gamma: Optional[int] = None,
    tree: Optional[InTree] = None,
    attach: Optional[Mapping[int, int]] = None,
    selfcheck_n: int = DEFAULT_SELFCHECK_N,
    candidates: Optional[Sequence[int]] = None,
) -> SynthesisOutcome:
    """Synthesize a protocol for ``spec.r ~> spec.q``.

    Candidates for ``gamma`` are the values with a ``q`` self-loop, tried in
    ascending order; *gamma* pins a single one.  With ``selfcheck_n >= 2``
    each candidate solution is also model checked for ring sizes
    ``2..selfcheck_n`` and rejected on a counterexample; ``0`` disables this.
    """
    loops = [v for v in range(spec.m) if spec.q(v, v)]
    if candidates is not None:
        loops = [v for v in loops if v in set(candidates)]
    if gamma is not None:
        if not 0 <= gamma < spec.m:
            raise DomainError(f"gamma={gamma} outside domain")
        if gamma not in loops:
            return NoSolution([GammaFailure(gamma, f"q({gamma},{gamma}) does not hold")])
        loops = [gamma]
    elif tree is not None or attach:
        raise ValueError("an explicit tree or attachment needs a pinned gamma")
    if not loops:
        return NoSolution([GammaFailure(None, "no γ with q(γ,γ)")])
    failures: list[GammaFailure] = []
    for g in loops:
        result = _attempt(spec, g, tree, attach, selfcheck_n)
        if isinstance(result, Solution):
            result.failures = failures
            return result
        failures.append(result)
    return NoSolution(failures)


def exists_solution(spec: ProblemSpec, selfcheck_n: int = DEFAULT_SELFCHECK_N) -> bool:
    return isinstance(syn_leadsto(spec, selfcheck_n=selfcheck_n), Solution)


def _first_success(runs) -> SynthesisOutcome:
    failures: list[GammaFailure] = []
    for idx, outcome in runs:
        if isinstance(outcome, Solution):
            outcome.via = idx
            outcome.failures = failures + outcome.failures
            return outcome
        failures.extend(GammaFailure(f.gamma, f"[run {idx}] {f.reason}") for f in outcome.failures)
    return NoSolution(failures)


def syn_disjunctive_R(specs: Sequence[ProblemSpec], selfcheck_n: int = DEFAULT_SELFCHECK_N) -> SynthesisOutcome:
    """``(R1 or ... or Rk) ~> Q`` by solving each ``Ri ~> Q`` in turn; ``via`` names the winner."""
    if len(specs) < 2:
        raise ValueError("need at least two R predicates")
    q, m = specs[0].q, specs[0].m
    if any(s.m != m or s.q != q for s in specs):
        raise ValueError("disjuncts must share the domain and q")
    return _first_success((i, syn_leadsto(s, selfcheck_n=selfcheck_n)) for i, s in enumerate(specs))


def syn_conjunctive_R(
    rs: Sequence[LocalityRelation], q: LocalityRelation, m: int, selfcheck_n: int = DEFAULT_SELFCHECK_N
) -> SynthesisOutcome:
    """``(R1 and ... and Rk) ~> Q``: intersect the ``r`` relations, then solve once."""
    if len(rs) < 2:
        raise ValueError("need at least two R predicates")
    r = rs[0]
    for other in rs[1:]:
        r = r & other
    return syn_leadsto(ProblemSpec(m, r, q), selfcheck_n=selfcheck_n)


def syn_conjunctive_Q(
    r: LocalityRelation,
    q1: LocalityRelation,
    q2: LocalityRelation,
    m: int,
    selfcheck_n: int = DEFAULT_SELFCHECK_N,
) -> SynthesisOutcome:
    """``R ~> (Q1 and Q2)``: gamma must carry a self-loop in both ``q1`` and ``q2``."""
    both = q1 & q2
    if not both.pairs:
        return NoSolution([GammaFailure(None, "q1 and q2 share no pair")])
    common = [v for v in range(m) if q1(v, v) and q2(v, v)]
    return syn_leadsto(ProblemSpec(m, r, both), selfcheck_n=selfcheck_n, candidates=common)


def syn_disjunctive_Q(
    r: LocalityRelation,
    q1: LocalityRelation,
    q2: LocalityRelation,
    m: int,
    selfcheck_n: int = DEFAULT_SELFCHECK_N,
) -> SynthesisOutcome:
    """``R ~> (Q1 or Q2)`` by solving ``R ~> Q1``, then ``R ~> Q2``."""
    return _first_success(
        (i, syn_leadsto(ProblemSpec(m, r, q), selfcheck_n=selfcheck_n)) for i, q in enumerate((q1, q2))
    )
