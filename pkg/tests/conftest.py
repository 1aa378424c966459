from __future__ import annotations

import pytest
from hypothesis import strategies as st

from impactlab.callgraph import CallEdge, CallGraph, MethodNode, NodeKind, fig1_graph
from impactlab.learning import WeightedCallGraph
from impactlab.minilang import corpus_source, load_corpus


@pytest.fixture
def fig1() -> CallGraph:
    return fig1_graph()


@pytest.fixture
def fig1_program():
    return load_corpus("fig1")


@pytest.fixture
def fig1_source() -> str:
    return corpus_source("fig1")


def make_graph(apps, tests, edges, cha_edges=()) -> CallGraph:
    nodes = [MethodNode(a, a, NodeKind.APPLICATION) for a in apps]
    nodes += [MethodNode(t, t, NodeKind.TEST) for t in tests]
    es = [CallEdge(c, d) for c, d in edges] + [CallEdge(c, d, True) for c, d in cha_edges]
    return CallGraph(nodes, es)


@st.composite
def graphs(draw, max_nodes: int = 8, self_loops: bool = True) -> CallGraph:
    n = draw(st.integers(1, max_nodes))
    ids = [f"n{i}" for i in range(n)]
    kinds = draw(st.lists(st.sampled_from(list(NodeKind)), min_size=n, max_size=n))
    pairs = [(a, b) for a in ids for b in ids if self_loops or a != b]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 3 * n))) if pairs else []
    cha = draw(st.lists(st.booleans(), min_size=len(chosen), max_size=len(chosen)))
    nodes = [MethodNode(i, i, k) for i, k in zip(ids, kinds)]
    return CallGraph(nodes, [CallEdge(a, b, c) for (a, b), c in zip(chosen, cha)])


@st.composite
def weighted_graphs(draw, max_nodes: int = 8) -> WeightedCallGraph:
    g = draw(graphs(max_nodes))
    palette = st.one_of(st.sampled_from([0.0, 0.1, 0.2, 0.5, 1.0]), st.floats(0.0, 1.0))
    ws = draw(st.lists(palette, min_size=len(g.edges), max_size=len(g.edges)))
    return WeightedCallGraph(g, dict(zip(g.edge_keys(), ws)))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
