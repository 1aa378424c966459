"""Call graph model: nodes are methods, edges point from caller to callee.

Impact flows against the edge direction. A change in a callee can break
its callers and, transitively, the tests sitting at the roots of the graph.
"""

from __future__ import annotations

import enum
import hashlib
import io
import json
import logging
from collections import deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import IO, NamedTuple, Union

from .errors import GraphFormatError, GraphIntegrityError, UnknownNodeError

log = logging.getLogger(__name__)

GRAPH_FORMAT = "cig-graph"
FORMAT_VERSION = 1
DEFAULT_PATH_CAP = 10_000

Edge = tuple[str, str]
Source = Union[bytes, str, IO[bytes], IO[str]]


class NodeKind(enum.Enum):
    APPLICATION = "app"
    TEST = "test"


@dataclass(frozen=True, order=True)
class MethodNode:
    id: str
    name: str
    kind: NodeKind

    @property
    def is_test(self) -> bool:
        return self.kind is NodeKind.TEST


@dataclass(frozen=True, order=True)
class CallEdge:
    caller: str
    callee: str
    via_cha: bool = False

    @property
    def key(self) -> Edge:
        return (self.caller, self.callee)


class PathSet(NamedTuple):
    """Simple paths from a changed node to a test, in impact orientation.

    Each path starts at the changed node and ends at the test, so consecutive
    ids ``(a, b)`` correspond to the call edge ``b -> a``.
    """

    paths: list[tuple[str, ...]]
    truncated: bool

    def edges(self) -> set[Edge]:
        out: set[Edge] = set()
        for path in self.paths:
            for callee, caller in zip(path, path[1:]):
                out.add((caller, callee))
        return out


class CallGraph:
    """Immutable directed graph of ``MethodNode`` linked by ``CallEdge``.

    Duplicate edges collapse into one; the merged edge is flagged ``via_cha``
    only if every duplicate was.
    """

    def __init__(self, nodes: Iterable[MethodNode] = (), edges: Iterable[CallEdge] = ()) -> None:
        node_map: dict[str, MethodNode] = {}
        for node in nodes:
            prior = node_map.get(node.id)
            if prior is not None and prior != node:
                raise GraphIntegrityError(f"conflicting definitions for node {node.id!r}")
            node_map[node.id] = node
        edge_map: dict[Edge, CallEdge] = {}
        for edge in edges:
            for end in (edge.caller, edge.callee):
                if end not in node_map:
                    raise GraphIntegrityError(f"edge {edge.caller!r}->{edge.callee!r} references missing node {end!r}")
            prior_edge = edge_map.get(edge.key)
            if prior_edge is not None:
                edge = CallEdge(edge.caller, edge.callee, prior_edge.via_cha and edge.via_cha)
            edge_map[edge.key] = edge

        self._nodes = dict(sorted(node_map.items()))
        self._edges = dict(sorted(edge_map.items()))
        callers: dict[str, list[str]] = {n: [] for n in self._nodes}
        callees: dict[str, list[str]] = {n: [] for n in self._nodes}
        for caller, callee in self._edges:
            callers[callee].append(caller)
            callees[caller].append(callee)
        # Sorted once here so every traversal is order-deterministic.
        self._callers = {n: tuple(sorted(v)) for n, v in callers.items()}
        self._callees = {n: tuple(sorted(v)) for n, v in callees.items()}
        self._path_cache: dict[tuple[str, str, int], PathSet] = {}
        self._edge_cache: dict[tuple[str, str, int], frozenset[Edge]] = {}

    # -- accessors -----------------------------------------------------------

    @property
    def nodes(self) -> tuple[MethodNode, ...]:
        return tuple(self._nodes.values())

    @property
    def edges(self) -> tuple[CallEdge, ...]:
        return tuple(self._edges.values())

    def node_ids(self) -> list[str]:
        return list(self._nodes)

    def node(self, node_id: str) -> MethodNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def __contains__(self, node_id: object) -> bool:
        return node_id in self._nodes

    def has_edge(self, caller: str, callee: str) -> bool:
        return (caller, callee) in self._edges

    def edge(self, caller: str, callee: str) -> CallEdge:
        return self._edges[(caller, callee)]

    def edge_keys(self) -> list[Edge]:
        return list(self._edges)

    def callers(self, node_id: str) -> tuple[str, ...]:
        self.node(node_id)
        return self._callers[node_id]

    def callees(self, node_id: str) -> tuple[str, ...]:
        self.node(node_id)
        return self._callees[node_id]

    def test_ids(self) -> list[str]:
        return [n.id for n in self._nodes.values() if n.is_test]

    def application_ids(self) -> list[str]:
        return [n.id for n in self._nodes.values() if not n.is_test]

    def is_test(self, node_id: str) -> bool:
        return self.node(node_id).is_test

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CallGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((tuple(self._nodes.values()), tuple(self._edges.values())))

    def __repr__(self) -> str:
        return f"CallGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"

    # -- traversal -----------------------------------------------------------

    def transitive_impact_set(self, node_id: str) -> set[str]:
        """Tests from which ``node_id`` is reachable along call edges."""
        start = self.node(node_id)
        seen = {start.id}
        queue = deque([start.id])
        while queue:
            current = queue.popleft()
            for caller in self._callers[current]:
                if caller not in seen:
                    seen.add(caller)
                    queue.append(caller)
        return {n for n in seen if self._nodes[n].is_test}

    def simple_paths(self, m: str, t: str, cap: int = DEFAULT_PATH_CAP) -> PathSet:
        """Enumerate simple paths from ``t`` down to ``m``, reported from ``m`` up to ``t``.

        Paths come out in lexicographic order of their id sequences; at most
        ``cap`` are returned and ``truncated`` tells whether more exist.
        """
        if cap < 1:
            raise ValueError("cap must be >= 1")
        self.node(m)
        self.node(t)
        key = (m, t, cap)
        cached = self._path_cache.get(key)
        if cached is not None:
            return PathSet(list(cached.paths), cached.truncated)

        paths: list[tuple[str, ...]] = []
        truncated = False
        path = [m]
        on_path = {m}
        # Explicit stack of caller iterators keeps deep graphs off the Python stack.
        stack: list[Iterator[str]] = [iter(self._callers[m])]
        if m == t:
            paths.append((m,))
            stack = []
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if nxt in on_path:
                continue
            if nxt == t:
                if len(paths) == cap:
                    truncated = True
                    break
                paths.append(tuple(path) + (t,))
                continue
            path.append(nxt)
            on_path.add(nxt)
            stack.append(iter(self._callers[nxt]))
        if truncated:
            log.warning("simple path enumeration %s -> %s truncated at %d paths", m, t, cap)
        result = PathSet(paths, truncated)
        self._path_cache[key] = result
        return PathSet(list(paths), truncated)

    def path_edges(self, m: str, t: str, cap: int = DEFAULT_PATH_CAP) -> frozenset[Edge]:
        """Union of the call edges lying on the simple paths between ``m`` and ``t``."""
        key = (m, t, cap)
        cached = self._edge_cache.get(key)
        if cached is None:
            cached = self._edge_cache[key] = frozenset(self.simple_paths(m, t, cap).edges())
        return cached

    def strip_cha(self) -> CallGraph:
        return CallGraph(self.nodes, (e for e in self.edges if not e.via_cha))


def transitive_impact_set(g: CallGraph, n: str) -> set[str]:
    return g.transitive_impact_set(n)


def simple_paths(g: CallGraph, m: str, t: str, cap: int = DEFAULT_PATH_CAP) -> PathSet:
    return g.simple_paths(m, t, cap)


def strip_cha(g: CallGraph) -> CallGraph:
    """Copy of ``g`` without the edges that only dynamic-dispatch resolution produced."""
    return g.strip_cha()


# -- serialization -----------------------------------------------------------


def _lines(source: Source) -> Iterator[str]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    for raw in source:
        yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def read_jsonl(source: Source, expected_format: str) -> tuple[dict | None, list[tuple[int, dict]]]:
    """Split a versioned JSON-lines file into its header and numbered body records.

    Blank lines are skipped. A completely empty stream has no header and no body.
    """
    header: dict | None = None
    body: list[tuple[int, dict]] = []
    for lineno, raw in enumerate(_lines(source), start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc.msg}", lineno) from None
        if not isinstance(obj, dict):
            raise GraphFormatError("expected a JSON object", lineno)
        if header is None:
            if obj.get("format") != expected_format:
                raise GraphFormatError(f"expected header with format {expected_format!r}", lineno)
            if obj.get("version") != FORMAT_VERSION:
                raise GraphFormatError(f"unsupported version {obj.get('version')!r}", lineno)
            header = obj
            continue
        body.append((lineno, obj))
    return header, body


def _field(obj: dict, key: str, kind: type, lineno: int):
    value = obj.get(key)
    if not isinstance(value, kind) or (kind is not bool and isinstance(value, bool)):
        raise GraphFormatError(f"field {key!r} must be {kind.__name__}", lineno)
    return value


def load_graph(source: Source) -> CallGraph:
    nodes: list[MethodNode] = []
    edges: list[tuple[int, CallEdge]] = []
    seen_ids: set[str] = set()
    _, body = read_jsonl(source, GRAPH_FORMAT)
    for lineno, obj in body:
        if set(obj) == {"node"} and isinstance(obj["node"], dict):
            spec = obj["node"]
            node_id = _field(spec, "id", str, lineno)
            name = _field(spec, "name", str, lineno)
            kind_text = _field(spec, "kind", str, lineno)
            try:
                kind = NodeKind(kind_text)
            except ValueError:
                raise GraphFormatError(f"unknown node kind {kind_text!r}", lineno) from None
            if node_id in seen_ids:
                raise GraphFormatError(f"duplicate node id {node_id!r}", lineno)
            seen_ids.add(node_id)
            nodes.append(MethodNode(node_id, name, kind))
        elif set(obj) == {"edge"} and isinstance(obj["edge"], dict):
            spec = obj["edge"]
            edge = CallEdge(
                _field(spec, "caller", str, lineno),
                _field(spec, "callee", str, lineno),
                _field(spec, "via_cha", bool, lineno) if "via_cha" in spec else False,
            )
            edges.append((lineno, edge))
        else:
            raise GraphFormatError("expected a 'node' or 'edge' record", lineno)
    for lineno, edge in edges:
        for end in (edge.caller, edge.callee):
            if end not in seen_ids:
                raise GraphIntegrityError(f"line {lineno}: edge references missing node {end!r}")
    return CallGraph(nodes, (e for _, e in edges))


def save_graph(g: CallGraph) -> bytes:
    lines = [json.dumps({"format": GRAPH_FORMAT, "version": FORMAT_VERSION})]
    for node in g.nodes:
        lines.append(json.dumps({"node": {"id": node.id, "name": node.name, "kind": node.kind.value}}))
    for edge in g.edges:
        lines.append(json.dumps({"edge": {"caller": edge.caller, "callee": edge.callee, "via_cha": edge.via_cha}}))
    return ("\n".join(lines) + "\n").encode("utf-8")


def graph_hash(g: CallGraph) -> str:
    """Content digest of the canonical serialization."""
    return hashlib.sha256(save_graph(g)).hexdigest()


def fig1_graph() -> CallGraph:
    """The four-method example: mul, pow, fac and op, each with one test.

    ``op`` reaches ``mul`` only through a call that static extraction cannot
    resolve, so there is no ``op -> mul`` edge.
    """
    apps = ["mul", "pow", "fac", "op"]
    nodes = [MethodNode(a, a, NodeKind.APPLICATION) for a in apps]
    nodes += [MethodNode(f"test_{a}", f"test_{a}", NodeKind.TEST) for a in apps]
    edges = [CallEdge(f"test_{a}", a) for a in apps]
    edges += [CallEdge("pow", "mul"), CallEdge("fac", "mul")]
    return CallGraph(nodes, edges)
