"""Learning per-edge propagation weights from observed impacts.

Weights start at 0 (nothing propagates). For each training record and each
test it broke, the edges on the simple paths between the mutated method and
that test are updated, either set to 1 (binary) or moved halfway toward the
empirical probability that a change at the method breaks the test
(dichotomic).
"""

from __future__ import annotations

import enum
import json
import logging
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .callgraph import DEFAULT_PATH_CAP, FORMAT_VERSION, CallGraph, Edge, Source, read_jsonl
from .errors import GraphFormatError, GraphIntegrityError, ImpactLabError
from .mutation import MutationRecord

log = logging.getLogger(__name__)

WEIGHTS_FORMAT = "cig-weights"


class Algorithm(str, enum.Enum):
    BINARY = "binary"
    DICHOTOMIC = "dichotomic"


class WeightedCallGraph:
    """A call graph plus one weight in [0, 1] per edge."""

    def __init__(self, graph: CallGraph, weights: Mapping[Edge, float] | None = None) -> None:
        self.graph = graph
        self.weights: dict[Edge, float] = {key: 0.0 for key in graph.edge_keys()}
        if weights:
            for key, w in weights.items():
                if key not in self.weights:
                    raise GraphIntegrityError(f"weight given for missing edge {key[0]!r}->{key[1]!r}")
                if not 0.0 <= w <= 1.0:
                    raise ValueError(f"weight {w} for {key} is outside [0, 1]")
                self.weights[key] = float(w)

    def weight(self, caller: str, callee: str) -> float:
        return self.weights[(caller, callee)]

    def copy(self) -> WeightedCallGraph:
        return WeightedCallGraph(self.graph, self.weights)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedCallGraph):
            return NotImplemented
        return self.graph == other.graph and self.weights == other.weights

    def __repr__(self) -> str:
        nonzero = sum(1 for w in self.weights.values() if w > 0)
        return f"WeightedCallGraph({self.graph!r}, nonzero={nonzero})"


@dataclass(frozen=True)
class EmpiricalProbabilityTable:
    """Impact frequencies per (test, mutated method) pair.

    ``beta[m]`` counts the records mutating ``m``; ``alpha[(t, m)]`` counts
    those among them whose impact set contains ``t``.
    """

    alpha: Mapping[tuple[str, str], int]
    beta: Mapping[str, int]

    def p(self, t: str, m: str) -> float:
        if m not in self.beta:
            raise KeyError(m)
        return self.alpha.get((t, m), 0) / self.beta[m]

    @property
    def probabilities(self) -> dict[tuple[str, str], float]:
        return {(t, m): a / self.beta[m] for (t, m), a in self.alpha.items()}


def init_weights(g: CallGraph) -> WeightedCallGraph:
    return WeightedCallGraph(g)


def empirical_probabilities(records: Sequence[MutationRecord]) -> EmpiricalProbabilityTable:
    if not records:
        raise ImpactLabError("cannot estimate probabilities from an empty training set")
    beta: Counter[str] = Counter()
    alpha: Counter[tuple[str, str]] = Counter()
    for r in records:
        beta[r.m] += 1
        for t in r.ais:
            alpha[(t, r.m)] += 1
    return EmpiricalProbabilityTable(dict(alpha), dict(beta))


def _check_pair(w: WeightedCallGraph, m: str, t: str) -> None:
    w.graph.node(m)
    if not w.graph.is_test(t):
        raise GraphIntegrityError(f"{t!r} is not a test node")


def _path_edges(w: WeightedCallGraph, m: str, t: str, cap: int) -> frozenset[Edge]:
    return w.graph.path_edges(m, t, cap)


def update_binary(w: WeightedCallGraph, m: str, t: str, cap: int = DEFAULT_PATH_CAP) -> None:
    """Set every edge on a path between ``m`` and ``t`` to 1."""
    _check_pair(w, m, t)
    for edge in _path_edges(w, m, t, cap):
        w.weights[edge] = 1.0


def update_dichotomic(w: WeightedCallGraph, m: str, t: str, p: float, cap: int = DEFAULT_PATH_CAP) -> None:
    """Move every edge on a path between ``m`` and ``t`` halfway toward ``p``.

    An edge shared by several paths for the same pair moves once.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} is outside [0, 1]")
    _check_pair(w, m, t)
    weights = w.weights
    for edge in _path_edges(w, m, t, cap):
        weights[edge] = (weights[edge] + p) / 2


def train(
    g: CallGraph,
    records: Sequence[MutationRecord],
    algo: Algorithm | str,
    cap: int = DEFAULT_PATH_CAP,
) -> WeightedCallGraph:
    """Learn weights from ``records`` in order; tests within a record go in id order."""
    algo = Algorithm(algo)
    w = init_weights(g)
    for r in records:
        g.node(r.m)
        for t in r.ais:
            g.node(t)
    table = empirical_probabilities(records) if algo is Algorithm.DICHOTOMIC and records else None
    for r in records:
        for t in sorted(r.ais):
            if table is None:
                update_binary(w, r.m, t, cap)
            else:
                update_dichotomic(w, r.m, t, table.p(t, r.m), cap)
    return w


# -- weight files ------------------------------------------------------------


def save_weights(w: WeightedCallGraph) -> bytes:
    lines = [json.dumps({"format": WEIGHTS_FORMAT, "version": FORMAT_VERSION})]
    for (caller, callee), weight in sorted(w.weights.items()):
        lines.append(json.dumps({"w": {"caller": caller, "callee": callee, "weight": weight}}))
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_weights(source: Source, g: CallGraph) -> WeightedCallGraph:
    """Read a weight dump onto ``g``; edges absent from the file keep weight 0."""
    _, body = read_jsonl(source, WEIGHTS_FORMAT)
    weights: dict[Edge, float] = {}
    for lineno, obj in body:
        spec = obj.get("w")
        if set(obj) != {"w"} or not isinstance(spec, dict):
            raise GraphFormatError("expected a 'w' record", lineno)
        caller, callee, weight = spec.get("caller"), spec.get("callee"), spec.get("weight")
        if not isinstance(caller, str) or not isinstance(callee, str):
            raise GraphFormatError("'caller' and 'callee' must be strings", lineno)
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise GraphFormatError("'weight' must be a number", lineno)
        if not 0.0 <= weight <= 1.0:
            raise GraphFormatError(f"weight {weight} is outside [0, 1]", lineno)
        if not g.has_edge(caller, callee):
            raise GraphIntegrityError(f"line {lineno}: no edge {caller!r}->{callee!r} in the graph")
        weights[(caller, callee)] = float(weight)
    return WeightedCallGraph(g, weights)


def planted_weights(g: CallGraph, probabilities: Mapping[Edge, float]) -> WeightedCallGraph:
    return WeightedCallGraph(g, probabilities)


def edges_touched(g: CallGraph, records: Iterable[MutationRecord], cap: int = DEFAULT_PATH_CAP) -> set[Edge]:
    """Edges lying on some path for some (m, t) training pair."""
    out: set[Edge] = set()
    pairs = defaultdict(set)
    for r in records:
        pairs[r.m].update(r.ais)
    for m, tests in pairs.items():
        for t in tests:
            out |= g.path_edges(m, t, cap)
    return out
