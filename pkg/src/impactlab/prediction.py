"""Predicting the tests a change breaks, with and without learned weights."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .callgraph import CallGraph
from .learning import WeightedCallGraph

DEFAULT_THRESHOLD = 0.2


@dataclass(frozen=True)
class Prediction:
    changed: str
    threshold: float
    cis: frozenset[str]

    def to_json(self) -> str:
        return json.dumps({"changed": self.changed, "threshold": self.threshold, "cis": sorted(self.cis)})


def predict(w: WeightedCallGraph, n: str, th: float = DEFAULT_THRESHOLD) -> Prediction:
    """Walk from ``n`` to its callers across edges whose weight is at least ``th``.

    A node counts as visited only once it is entered through a qualifying
    edge, so a caller blocked on one low-weight edge stays reachable through
    another. ``n`` itself is never part of the result.
    """
    if not 0.0 <= th <= 1.0:
        raise ValueError(f"threshold {th} is outside [0, 1]")
    g = w.graph
    g.node(n)
    weights = w.weights
    visited = {n}
    queue = deque([n])
    cis: set[str] = set()
    while queue:
        current = queue.popleft()
        for caller in g.callers(current):
            if caller in visited or weights[(caller, current)] < th:
                continue
            visited.add(caller)
            queue.append(caller)
            if g.is_test(caller):
                cis.add(caller)
    cis.discard(n)
    return Prediction(n, th, frozenset(cis))


def predict_tc(g: CallGraph, n: str) -> Prediction:
    """Transitive-closure baseline: every test that can reach ``n``, except ``n``."""
    return Prediction(n, 0.0, frozenset(g.transitive_impact_set(n) - {n}))
