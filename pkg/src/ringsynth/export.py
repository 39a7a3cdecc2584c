"""DOT and Promela renderings."""

from __future__ import annotations

from .graphs import LabeledGraph
from .protocol import Protocol
from .spec_model import LocalityRelation, ProblemSpec

__all__ = ["to_dot", "to_promela", "relation_to_promela"]


def to_dot(g: LabeledGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for v in sorted(g.vertices):
        lines.append(f'  "{v}";')
    for a, c, b in sorted(g.arcs, key=lambda arc: (arc[0], arc[1], -1 if arc[2] is None else arc[2])):
        attr = "" if b is None else f' [label="{b}"]'
        lines.append(f'  "{a}" -> "{c}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _local(rel: LocalityRelation, prev: str, cur: str) -> str:
    if not rel.pairs:
        return "false"
    if len(rel.pairs) == rel.m * rel.m:
        return "true"
    terms = [f"({prev} == {a} && {cur} == {b})" for a, b in sorted(rel.pairs)]
    return "(" + " || ".join(terms) + ")"


def relation_to_promela(rel: LocalityRelation, n: int) -> str:
    """The conjunctive predicate over ``x[0..n-1]``, expanded index by index."""
    parts = [_local(rel, f"x[{(i - 1) % n}]", f"x[{i}]") for i in range(n)]
    return " && ".join(parts)


def to_promela(spec: ProblemSpec, p: Protocol, n: int) -> str:
    """A SPIN model of *p* on a ring of *n* processes with ``[] (R -> <> Q)``.

    ``init`` picks an arbitrary state, blocks unless ``R`` holds, then starts
    the processes; SPIN's default interleaving matches the checker.
    """
    if n < 2:
        raise ValueError("a ring needs at least 2 processes")
    if p.m != spec.m:
        raise ValueError("protocol and spec disagree on the domain size")
    m = spec.m
    title = spec.name or "ring"
    out = [
        f"/* {title}: {len(p.actions)} actions, M = {m}, N = {n} */",
        f"#define N {n}",
        "byte x[N];",
        f"#define R_HOLDS ({relation_to_promela(spec.r, n)})",
        f"#define Q_HOLDS ({relation_to_promela(spec.q, n)})",
        "",
        "proctype P(byte i) {",
        "  do",
    ]
    if p.actions:
        for a, b, c in p.sorted_actions():
            out.append(f"  :: atomic {{ (x[(i + N - 1) % N] == {a} && x[i] == {b}) -> x[i] = {c} }}")
    else:
        out.append("  :: false /* no actions: the process never moves */")
    out += ["  od", "}", "", "init {", "  atomic {"]
    for i in range(n):
        choices = " ".join(f":: x[{i}] = {v};" for v in range(m))
        out.append(f"    if {choices} fi;")
    out.append("    R_HOLDS;")
    for i in range(n):
        out.append(f"    run P({i});")
    out += ["  }", "}", "", "ltl prop { [] (R_HOLDS -> <> Q_HOLDS) }", ""]
    return "\n".join(out)
