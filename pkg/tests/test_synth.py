import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impactlab.callgraph import CallEdge, CallGraph, MethodNode, NodeKind, transitive_impact_set
from impactlab.errors import GenerationError
from impactlab.synth import (
    PlantedModel,
    SynthParams,
    generate_model,
    node_rng,
    simulate_dataset,
    simulate_mutation,
)


def chain_model(probs):
    """t <- a0 <- a1 <- ... with the given firing probability on each hop, callee first."""
    n = len(probs)
    apps = [f"a{i}" for i in range(n)]
    nodes = [MethodNode(a, a, NodeKind.APPLICATION) for a in apps] + [MethodNode("t", "t", NodeKind.TEST)]
    callers = ["t"] + apps[:-1]
    # edge i runs from callers[i] down to apps[i]; a mutation starts at the deepest app
    edges = [CallEdge(c, d) for c, d in zip(callers, apps)]
    true_prob = {(c, d): p for (c, d), p in zip(zip(callers, apps), probs)}
    return PlantedModel(CallGraph(nodes, edges), true_prob), apps[-1]


class TestGenerate:
    def test_minimal(self):
        model = generate_model(SynthParams(apps=1, tests=1, density=1.0, seed=0))
        assert list(model.graph.edge_keys()) == [("t0", "a0")]
        assert model.true_prob[("t0", "a0")] in (0.0, 0.5, 0.9)

    def test_deterministic(self):
        p = SynthParams(apps=15, tests=5, density=0.2, seed=3)
        assert generate_model(p) == generate_model(p)
        assert generate_model(p).graph != generate_model(SynthParams(15, 5, 0.2, seed=4)).graph

    def test_layered_and_palette_closed(self):
        palette = (0.0, 0.3, 0.9)
        model = generate_model(SynthParams(apps=25, tests=6, density=0.2, palette=palette, seed=2))
        g = model.graph
        for caller, callee in g.edge_keys():
            assert not g.is_test(callee)
            if not g.is_test(caller):
                assert caller < callee  # zero-padded ids keep index order
        assert set(model.true_prob.values()) <= set(palette)
        assert set(model.true_prob) == set(g.edge_keys())

    def test_reachability(self):
        model = generate_model(SynthParams(apps=40, tests=10, density=0.1, seed=1))
        g = model.graph
        reached = {a for a in g.application_ids() if transitive_impact_set(g, a)}
        assert len(reached) >= 0.9 * 40

    def test_density_out_of_range(self):
        with pytest.raises(GenerationError):
            SynthParams(apps=3, tests=2, density=0.0)
        with pytest.raises(GenerationError):
            SynthParams(apps=3, tests=2, density=1.5)

    def test_unreachable_density(self):
        with pytest.raises(GenerationError):
            generate_model(SynthParams(apps=60, tests=20, density=0.001, seed=0))

    @pytest.mark.parametrize("kwargs", [{"apps": 0}, {"tests": 0}, {"palette": ()}, {"palette": (1.2,)}])
    def test_bad_params(self, kwargs):
        base = {"apps": 3, "tests": 2, "density": 0.5}
        with pytest.raises(ValueError):
            SynthParams(**{**base, **kwargs})


class TestSimulate:
    def test_certain_chain(self):
        model, m = chain_model([1.0, 1.0, 1.0])
        assert simulate_mutation(model, m, random.Random(0)) == {"t"}

    def test_zero_chain(self):
        model, m = chain_model([1.0, 0.0, 1.0])
        rng = random.Random(0)
        assert all(simulate_mutation(model, m, rng) == frozenset() for _ in range(100))

    def test_single_edge_frequency(self):
        model, m = chain_model([0.5])
        rng = random.Random(11)
        hits = sum(bool(simulate_mutation(model, m, rng)) for _ in range(10_000))
        assert abs(hits / 10_000 - 0.5) <= 0.02

    def test_path_probability_is_product(self):
        model, m = chain_model([0.9, 0.5, 0.8])
        rng = random.Random(5)
        freq = sum(bool(simulate_mutation(model, m, rng)) for _ in range(20_000)) / 20_000
        assert freq == pytest.approx(0.9 * 0.5 * 0.8, abs=0.015)

    def test_dataset_deterministic_and_shaped(self):
        model = generate_model(SynthParams(apps=10, tests=4, density=0.3, seed=2))
        a = simulate_dataset(model, 3, seed=9)
        assert a == simulate_dataset(model, 3, seed=9)
        assert len(a) == 30
        assert {r.operator for r in a} == {"SYN"}
        assert a[0].mutant == "a0#0"

    def test_node_streams_are_independent(self):
        model = generate_model(SynthParams(apps=10, tests=4, density=0.3, seed=2))
        full = simulate_dataset(model, 4, seed=1)
        assert [r.ais for r in full if r.m == "a3"] == [
            simulate_mutation(model, "a3", rng) for rng in [node_rng(1, "a3")] for _ in range(4)
        ]

    def test_bad_count(self):
        model, _ = chain_model([1.0])
        with pytest.raises(ValueError):
            simulate_dataset(model, 0, seed=0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 1000), st.sampled_from([(0.0, 1.0), (0.5,), (0.1, 0.9)]))
    def test_ais_within_closure(self, seed, palette):
        model = generate_model(SynthParams(apps=12, tests=4, density=0.3, palette=palette, seed=seed))
        for r in simulate_dataset(model, 2, seed):
            assert r.ais <= transitive_impact_set(model.graph, r.m)
