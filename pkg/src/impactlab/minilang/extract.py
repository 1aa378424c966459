"""Static call-graph extraction from MiniLang programs."""

from __future__ import annotations

from ..callgraph import CallEdge, CallGraph, MethodNode, NodeKind
from .syntax import Call, FunctionKind, Program, VCall, preorder


def extract_call_graph(program: Program, with_cha: bool) -> CallGraph:
    """One node per function; one edge per resolved call site.

    Virtual calls produce an edge to every implementor of the interface when
    ``with_cha`` is set, and nothing otherwise.
    """
    nodes = [
        MethodNode(f.name, f.name, NodeKind.TEST if f.kind is FunctionKind.TEST else NodeKind.APPLICATION)
        for f in program.functions
    ]
    interfaces = program.interfaces
    edges: list[CallEdge] = []
    for f in program.functions:
        for e in preorder(f.body):
            if isinstance(e, Call):
                edges.append(CallEdge(f.name, e.func, via_cha=False))
            elif isinstance(e, VCall) and with_cha:
                edges.extend(CallEdge(f.name, impl, via_cha=True) for impl in interfaces[e.interface])
    return CallGraph(nodes, edges)
