import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impactlab.errors import GraphFormatError, GraphIntegrityError, RedBaselineError
from impactlab.minilang import extract_call_graph, load_corpus, parse, run_tests, trace_tests
from impactlab.minilang.syntax import IntLit, preorder
from impactlab.mutation import (
    ALL_OPERATORS,
    MutationRecord,
    MutationSite,
    Operator,
    build_dataset,
    check_dataset,
    compute_record,
    enumerate_sites,
    load_dataset,
    make_mutant,
    require_green,
    sample_mutants,
    save_dataset,
)

from .conftest import make_graph

TESTS = "fn test_a() { assert(true) }"


def sites(src: str, op: str) -> list[str]:
    return [s.variant for s in enumerate_sites(parse(src + " " + TESTS), op)]


class TestOperators:
    def test_aor_on_product(self):
        assert sites("fn f(a, b) { a * b }", "AOR") == ["add", "sub", "div", "mod", "lhs", "rhs"]

    def test_ror_on_int_comparison(self):
        assert sites("fn f(x, y) { x < y }", "ROR") == ["le", "gt", "ge", "eq", "ne", "true", "false"]

    def test_ror_on_bool_comparison(self):
        assert sites("fn f(x, y) { (x < y) == true }", "ROR")[:1] == ["ne"]

    def test_lcr_absent_without_logic(self):
        assert sites("fn f(a, b) { a * b }", "LCR") == []

    def test_lcr(self):
        assert sites("fn f(p, q) { p && q }", "LCR") == ["swap", "true", "false", "lhs", "rhs"]

    def test_abs_and_uoi_follow_types(self):
        # a, b and a*b are integers; nothing boolean to negate
        assert sites("fn f(a, b) { a * b }", "ABS") == ["abs"] * 3
        assert sites("fn f(a, b) { a * b }", "UOI") == ["neg", "inc", "dec"] * 3
        assert sites("fn f(p) { !p }", "UOI") == ["not", "not"]

    def test_tests_are_never_mutated(self):
        assert enumerate_sites(parse("fn test_a() { assert(1 + 1 == 2) }"), "AOR") == []

    def test_fig1_population_sizes(self, fig1_program):
        # three Arith nodes (a*b, n-1, n-2) and four comparisons in pow and fac
        assert len(enumerate_sites(fig1_program, "AOR")) == 3 * 6
        assert len(enumerate_sites(fig1_program, "ROR")) == 4 * 7
        assert len(enumerate_sites(fig1_program, "LCR")) == 0

    @pytest.mark.parametrize("op", ALL_OPERATORS)
    def test_mutants_parse_and_differ(self, fig1_program, op):
        for site in enumerate_sites(fig1_program, op)[:40]:
            mutant = make_mutant(fig1_program, site)
            assert mutant.program != fig1_program
            assert site.function not in [t.name for t in fig1_program.tests()]

    def test_ids_are_injective(self, fig1_program):
        ids = [s.mutant_id for op in ALL_OPERATORS for s in enumerate_sites(fig1_program, op)]
        assert len(ids) == len(set(ids))
        assert "AOR:mul:0:add" in ids


class TestSampling:
    def test_exhaustion(self, fig1_program):
        out = sample_mutants(fig1_program, "AOR", 100, seed=1)
        assert len(out) == 18 and out.exhausted

    def test_partial(self, fig1_program):
        out = sample_mutants(fig1_program, "AOR", 5, seed=1)
        assert len(out) == 5 and not out.exhausted
        assert len({m.id for m in out}) == 5

    def test_zero(self, fig1_program):
        assert sample_mutants(fig1_program, "AOR", 0, seed=1) == []

    def test_deterministic(self, fig1_program):
        a = [m.id for m in sample_mutants(fig1_program, "UOI", 10, seed=7)]
        b = [m.id for m in sample_mutants(fig1_program, "UOI", 10, seed=7)]
        assert a == b

    def test_seed_matters(self, fig1_program):
        draws = {tuple(m.id for m in sample_mutants(fig1_program, "UOI", 10, seed=s)) for s in range(5)}
        assert len(draws) > 1

    def test_roughly_uniform(self, fig1_program):
        counts = {s.mutant_id: 0 for s in enumerate_sites(fig1_program, "AOR")}
        for seed in range(900):
            for m in sample_mutants(fig1_program, "AOR", 6, seed):
                counts[m.id] += 1
        # each site expected 900 * 6 / 18 = 300 times
        assert all(200 < c < 400 for c in counts.values())


class TestRecords:
    def test_broken_mul_breaks_every_test(self, fig1_program):
        g = extract_call_graph(fig1_program, with_cha=True)
        site = MutationSite("mul", 0, Operator.AOR, "add")
        rec = compute_record(fig1_program, make_mutant(fig1_program, site), g)
        assert rec.m == "mul" and rec.operator == "AOR" and rec.mutant == "AOR:mul:0:add"
        assert rec.ais == {"test_mul", "test_pow", "test_fac", "test_op"}

    def test_equivalent_mutant(self, fig1_program):
        g = extract_call_graph(fig1_program, with_cha=True)
        loc = preorder(fig1_program.function("pow").body).index(IntLit(3))
        rec = compute_record(fig1_program, make_mutant(fig1_program, MutationSite("pow", loc, Operator.ABS, "abs")), g)
        assert rec.ais == frozenset()

    def test_fac_mutants_only_break_test_fac(self, fig1_program):
        g = extract_call_graph(fig1_program, with_cha=True)
        for op in ALL_OPERATORS:
            for site in enumerate_sites(fig1_program, op):
                if site.function == "fac":
                    assert compute_record(fig1_program, make_mutant(fig1_program, site), g).ais <= {"test_fac"}

    @pytest.mark.parametrize("name", ["fig1", "arith", "shapes", "access"])
    def test_ais_within_dynamic_reach(self, name):
        p = load_corpus(name)
        g = extract_call_graph(p, with_cha=True)
        traces = trace_tests(p)
        for rec in build_dataset(p, g, cap=30, seed=3):
            for t in rec.ais:
                assert rec.m in traces[t].invoked

    def test_mutation_point_must_be_application(self, fig1_program):
        g = make_graph([], ["mul"], [])
        site = MutationSite("mul", 0, Operator.AOR, "add")
        with pytest.raises(GraphIntegrityError):
            compute_record(fig1_program, make_mutant(fig1_program, site), g)

    def test_red_baseline(self, fig1_source):
        with pytest.raises(RedBaselineError, match="test_mul"):
            require_green(parse(fig1_source.replace("mul(2, 3) == 6", "mul(2, 3) == 7")))


class TestDataset:
    def test_order_and_jobs_invariance(self, fig1_program):
        g = extract_call_graph(fig1_program, with_cha=True)
        serial = build_dataset(fig1_program, g, ["AOR", "ROR"], cap=10, seed=2)
        parallel = build_dataset(fig1_program, g, ["AOR", "ROR"], cap=10, seed=2, jobs=2)
        assert serial == parallel
        assert [r.operator for r in serial] == ["AOR"] * 10 + ["ROR"] * 10

    def test_round_trip(self, fig1_program):
        g = extract_call_graph(fig1_program, with_cha=True)
        records = build_dataset(fig1_program, g, ["AOR"], cap=100)
        h, again = load_dataset(save_dataset(records, "abc"))
        assert h == "abc" and again == records

    def test_bad_record(self):
        text = '{"format":"cig-mutations","version":1,"graph_hash":"x"}\n{"record":{"mutant":"a","m":"b","op":"AOR","ais":"t"}}\n'
        with pytest.raises(GraphFormatError) as info:
            load_dataset(text)
        assert info.value.line == 2

    def test_check_dataset(self, fig1):
        check_dataset([MutationRecord("x", "mul", "AOR", {"test_mul"})], fig1)
        with pytest.raises(GraphIntegrityError, match="ghost"):
            check_dataset([MutationRecord("x", "mul", "AOR", {"ghost"})], fig1)
        with pytest.raises(GraphIntegrityError):
            check_dataset([MutationRecord("x", "test_mul", "AOR", set())], fig1)

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from(ALL_OPERATORS), st.integers(0, 30), st.integers(0, 10**6))
    def test_every_sampled_mutant_runs(self, op, n, seed):
        p = load_corpus("arith")
        for m in sample_mutants(p, op, n, seed):
            assert len(run_tests(m.program)) == len(p.tests())
