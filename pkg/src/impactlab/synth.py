"""Synthetic ground truth: random layered call graphs with planted propagation odds.

Each edge carries a true probability of passing a change on to its caller.
Simulated mutations spread upward by one independent coin flip per edge,
which gives datasets whose ideal weights are known.
"""

from __future__ import annotations

import random
from collections import deque
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .callgraph import CallEdge, CallGraph, Edge, MethodNode, NodeKind
from .errors import GenerationError
from .learning import WeightedCallGraph
from .mutation import MutationRecord

SYNTH_OPERATOR = "SYN"
MIN_REACHABLE = 0.9
MAX_ATTEMPTS = 200


@dataclass(frozen=True)
class SynthParams:
    apps: int
    tests: int
    density: float
    palette: tuple[float, ...] = (0.0, 0.5, 0.9)
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "palette", tuple(float(p) for p in self.palette))
        if self.apps < 1 or self.tests < 1:
            raise ValueError("apps and tests must both be >= 1")
        if not 0.0 < self.density <= 1.0:
            raise GenerationError(f"density {self.density} is outside (0, 1]")
        if not self.palette or any(not 0.0 <= p <= 1.0 for p in self.palette):
            raise ValueError("palette must be a non-empty set of probabilities in [0, 1]")


@dataclass(frozen=True)
class PlantedModel:
    graph: CallGraph
    true_prob: Mapping[Edge, float] = field(default_factory=dict)

    def weights(self) -> WeightedCallGraph:
        return WeightedCallGraph(self.graph, self.true_prob)


def _ids(prefix: str, count: int) -> list[str]:
    width = len(str(count - 1))
    return [f"{prefix}{i:0{width}d}" for i in range(count)]


def _reachable_fraction(g: CallGraph, apps: Sequence[str], tests: Sequence[str]) -> float:
    seen = set(tests)
    queue = deque(tests)
    while queue:
        for callee in g.callees(queue.popleft()):
            if callee not in seen:
                seen.add(callee)
                queue.append(callee)
    return sum(1 for a in apps if a in seen) / len(apps)


def generate_model(params: SynthParams) -> PlantedModel:
    """Random DAG where tests call application nodes and app ``i`` may call app ``j > i``.

    Each candidate edge is present with probability ``density``. Draws are
    repeated until at least 90% of the application nodes are reachable from
    some test.
    """
    rng = random.Random(params.seed)
    apps = _ids("a", params.apps)
    tests = _ids("t", params.tests)
    nodes = [MethodNode(a, a, NodeKind.APPLICATION) for a in apps]
    nodes += [MethodNode(t, t, NodeKind.TEST) for t in tests]
    candidates = [(t, a) for t in tests for a in apps]
    candidates += [(apps[i], apps[j]) for i in range(len(apps)) for j in range(i + 1, len(apps))]
    for _ in range(MAX_ATTEMPTS):
        chosen = [pair for pair in candidates if rng.random() < params.density]
        g = CallGraph(nodes, (CallEdge(c, d) for c, d in chosen))
        if _reachable_fraction(g, apps, tests) >= MIN_REACHABLE:
            probs = {key: rng.choice(params.palette) for key in g.edge_keys()}
            return PlantedModel(g, probs)
    raise GenerationError(
        f"no graph with {MIN_REACHABLE:.0%} reachable application nodes after {MAX_ATTEMPTS} attempts "
        f"(density {params.density} is too low)"
    )


def simulate_mutation(model: PlantedModel, m: str, rng: random.Random) -> frozenset[str]:
    """Tests reached from ``m`` when every traversed edge fires with its true probability."""
    g = model.graph
    reached = {m}
    queue = deque([m])
    while queue:
        current = queue.popleft()
        for caller in g.callers(current):
            if rng.random() < model.true_prob[(caller, current)] and caller not in reached:
                reached.add(caller)
                queue.append(caller)
    return frozenset(n for n in reached if g.is_test(n))


def node_rng(seed: int, node_id: str) -> random.Random:
    """Independent stream per node, derived from the run seed and the node id."""
    return random.Random(f"{seed}/{node_id}")


def simulate_dataset(model: PlantedModel, mutations_per_node: int, seed: int) -> list[MutationRecord]:
    if mutations_per_node < 1:
        raise ValueError("mutations_per_node must be >= 1")
    records = []
    for m in model.graph.application_ids():
        rng = node_rng(seed, m)
        for k in range(mutations_per_node):
            records.append(MutationRecord(f"{m}#{k}", m, SYNTH_OPERATOR, simulate_mutation(model, m, rng)))
    return records
