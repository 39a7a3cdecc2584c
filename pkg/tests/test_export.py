import re

import pydot
import pytest

from ringsynth.export import relation_to_promela, to_dot, to_promela
from ringsynth.graphs import locality_graph
from ringsynth.protocol import Protocol
from ringsynth.spec_model import LocalityRelation


def parse(text):
    graphs = pydot.graph_from_dot_data(text)
    assert graphs and len(graphs) == 1
    return graphs[0]


def arcs(g):
    return {(e.get_source().strip('"'), e.get_destination().strip('"'), (e.get("label") or "").strip('"')) for e in g.get_edges()}


def test_dot_locality_q(specs):
    g = parse(to_dot(locality_graph(specs["sumnot2"].q), "locality_q"))
    assert len(g.get_nodes()) == 4
    edges = arcs(g)
    assert len(edges) == 11 and ("2", "2", "") in edges


def test_dot_empty_relation():
    g = parse(to_dot(locality_graph(LocalityRelation(3, frozenset()))))
    assert len(g.get_nodes()) == 3 and not g.get_edges()


def test_dot_parity_action_graph(reference):
    g = parse(to_dot(reference["parity"].action_graph(), "action"))
    assert arcs(g) == {("1", "2", "3"), ("3", "2", "1"), ("2", "2", "1"), ("2", "2", "3")}


def test_promela_structure(specs, reference):
    text = to_promela(specs["sumnot2"], reference["sumnot2"], 4)
    assert "#define N 4" in text and "byte x[N];" in text
    assert len(re.findall(r":: atomic \{", text)) == 3
    assert len(re.findall(r"run P\(\d\);", text)) == 4
    assert "ltl prop { [] (R_HOLDS -> <> Q_HOLDS) }" in text
    r_line = next(line for line in text.splitlines() if line.startswith("#define R_HOLDS"))
    assert r_line.count("x[3] == ") == 4  # twice as predecessor of x[0], twice as the cell after x[2]
    assert text.count("{") == text.count("}")


def test_promela_empty_protocol(specs):
    text = to_promela(specs["parity"], Protocol(4, frozenset()), 5)
    assert ":: false" in text and "atomic {" in text.split("init")[1]
    assert text.count("{") == text.count("}")


def test_promela_relation_constants():
    assert relation_to_promela(LocalityRelation.full(2), 2) == "true && true"
    assert relation_to_promela(LocalityRelation(2, frozenset()), 2) == "false && false"


def test_promela_rejects_tiny_ring(specs, reference):
    with pytest.raises(ValueError):
        to_promela(specs["parity"], reference["parity"], 1)
