"""First-order mutants of MiniLang programs and the impact they cause.

Five operator families are supported: ABS (absolute value insertion), AOR
(arithmetic operator replacement), LCR (logical connector replacement), ROR
(relational operator replacement) and UOI (unary operator insertion). Every
legal rewrite at every site is enumerated with a stable variant tag, so a
mutant id such as ``AOR:mul:0:add`` can be replayed across runs.
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import random
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .callgraph import FORMAT_VERSION, CallGraph, Source, read_jsonl
from .errors import GraphFormatError, GraphIntegrityError, RedBaselineError
from .minilang.interpreter import run_tests
from .minilang.printer import render_program
from .minilang.syntax import (
    ARITH_OPS,
    Abs,
    Arith,
    BoolLit,
    Expr,
    IntLit,
    Logic,
    Neg,
    Not,
    Program,
    Rel,
    preorder,
    replace_at,
)
from .minilang.types import BOOL, INT, expression_types

log = logging.getLogger(__name__)

MUTATIONS_FORMAT = "cig-mutations"


class Operator(str, enum.Enum):
    ABS = "ABS"
    AOR = "AOR"
    LCR = "LCR"
    ROR = "ROR"
    UOI = "UOI"


ALL_OPERATORS = tuple(Operator)

_ARITH_TAGS = {"+": "add", "-": "sub", "*": "mul", "/": "div", "%": "mod"}
_REL_TAGS = {"<": "lt", "<=": "le", ">": "gt", ">=": "ge", "==": "eq", "!=": "ne"}
_TAG_ARITH = {v: k for k, v in _ARITH_TAGS.items()}
_TAG_REL = {v: k for k, v in _REL_TAGS.items()}


@dataclass(frozen=True, order=True)
class MutationSite:
    function: str
    location: int
    operator: Operator
    variant: str

    @property
    def mutant_id(self) -> str:
        return f"{self.operator.value}:{self.function}:{self.location}:{self.variant}"


@dataclass(frozen=True)
class Mutant:
    id: str
    base_hash: str
    site: MutationSite
    program: Program


@dataclass(frozen=True)
class MutationRecord:
    """One element of the training data: where the change was and which tests broke."""

    mutant: str
    m: str
    operator: str
    ais: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ais", frozenset(self.ais))


class MutantList(list):
    """A list of mutants that remembers whether sampling ran out of candidates."""

    exhausted: bool = False


def program_hash(program: Program) -> str:
    return hashlib.sha256(render_program(program).encode("utf-8")).hexdigest()


def rewrite(node: Expr, op: Operator, variant: str) -> Expr:
    """The replacement expression for ``node`` under one variant tag."""
    if op is Operator.ABS:
        return Abs(node)
    if op is Operator.UOI:
        if variant == "neg":
            return Neg(node)
        if variant == "inc":
            return Arith("+", node, IntLit(1))
        if variant == "dec":
            return Arith("-", node, IntLit(1))
        return Not(node)
    if variant in ("true", "false"):
        return BoolLit(variant == "true")
    if variant == "lhs":
        return node.lhs  # type: ignore[union-attr]
    if variant == "rhs":
        return node.rhs  # type: ignore[union-attr]
    if op is Operator.AOR:
        return Arith(_TAG_ARITH[variant], node.lhs, node.rhs)  # type: ignore[union-attr]
    if op is Operator.LCR:
        return Logic("||" if node.op == "&&" else "&&", node.lhs, node.rhs)  # type: ignore[union-attr]
    return Rel(_TAG_REL[variant], node.lhs, node.rhs)  # type: ignore[union-attr]


def _variants(node: Expr, ty: str | None, op: Operator, operand_ty: str | None) -> list[str]:
    if op is Operator.ABS:
        return ["abs"] if ty == INT else []
    if op is Operator.UOI:
        if ty == INT:
            return ["neg", "inc", "dec"]
        return ["not"] if ty == BOOL else []
    if op is Operator.AOR and isinstance(node, Arith):
        return [_ARITH_TAGS[o] for o in ARITH_OPS if o != node.op] + ["lhs", "rhs"]
    if op is Operator.LCR and isinstance(node, Logic):
        return ["swap", "true", "false", "lhs", "rhs"]
    if op is Operator.ROR and isinstance(node, Rel):
        if operand_ty == INT:
            others = [_REL_TAGS[o] for o in _REL_TAGS if o != node.op]
        else:
            # Ordering comparisons on booleans would not type-check.
            others = [_REL_TAGS["!=" if node.op == "==" else "=="]]
        return others + ["true", "false"]
    return []


def enumerate_sites(program: Program, op: Operator | str) -> list[MutationSite]:
    """Every legal (location, variant) for ``op`` in application functions, in source order."""
    op = Operator(op)
    types = expression_types(program)
    sites: list[MutationSite] = []
    for fn in program.functions:
        if fn.is_test:
            continue
        nodes = preorder(fn.body)
        fn_types = types[fn.name]
        for loc, node in enumerate(nodes):
            operand_ty = None
            if isinstance(node, Rel):
                rhs_loc = loc + 1 + len(preorder(node.lhs))
                operand_ty = fn_types[loc + 1] or fn_types[rhs_loc]
            for variant in _variants(node, fn_types[loc], op, operand_ty):
                if rewrite(node, op, variant) == node:
                    continue
                sites.append(MutationSite(fn.name, loc, op, variant))
    return sites


def apply_site(program: Program, site: MutationSite) -> Program:
    fn = program.function(site.function)
    node = preorder(fn.body)[site.location]
    body = replace_at(fn.body, site.location, rewrite(node, site.operator, site.variant))
    return program.replace_function(type(fn)(fn.name, fn.params, body))


def make_mutant(program: Program, site: MutationSite, base_hash: str | None = None) -> Mutant:
    return Mutant(site.mutant_id, base_hash or program_hash(program), site, apply_site(program, site))


def sample_mutants(program: Program, op: Operator | str, n: int, seed: int) -> MutantList:
    """Draw ``min(n, population)`` distinct mutants uniformly without replacement.

    The result is ordered as the population (source order), independent of
    draw order, and flags ``exhausted`` when the whole population was taken.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    population = enumerate_sites(program, op)
    k = min(n, len(population))
    chosen = sorted(random.Random(seed).sample(range(len(population)), k))
    base_hash = program_hash(program)
    out = MutantList(make_mutant(program, population[i], base_hash) for i in chosen)
    out.exhausted = n >= len(population)
    if out.exhausted and n > 0:
        log.info("%s: requested %d mutants, population has only %d", Operator(op).value, n, len(population))
    return out


def require_green(program: Program) -> None:
    failing = [o.test for o in run_tests(program) if not o.passed]
    if failing:
        raise RedBaselineError(f"base program fails its own tests: {', '.join(failing)}")


def compute_record(base: Program, mutant: Mutant, g: CallGraph) -> MutationRecord:
    """Run the suite on the mutant; the failing tests form its actual impact set.

    ``base`` is assumed green (see ``require_green``).
    """
    m = mutant.site.function
    if m not in g:
        raise GraphIntegrityError(f"mutated function {m!r} has no node in the call graph")
    if g.is_test(m):
        raise GraphIntegrityError(f"mutation point {m!r} is a test node")
    ais = frozenset(o.test for o in run_tests(mutant.program) if not o.passed)
    for t in ais:
        if t not in g or not g.is_test(t):
            raise GraphIntegrityError(f"failing test {t!r} is not a test node of the graph")
    return MutationRecord(mutant.id, m, mutant.site.operator.value, ais)


def _record_job(args: tuple[Program, Mutant, CallGraph]) -> MutationRecord:
    return compute_record(*args)


def build_dataset(
    program: Program,
    g: CallGraph,
    operators: Iterable[Operator | str] = ALL_OPERATORS,
    cap: int = 600,
    seed: int = 0,
    jobs: int = 1,
) -> list[MutationRecord]:
    """Sample up to ``cap`` mutants per operator and compute each one's impact set.

    Output order is operator order, then source order, whatever ``jobs`` is.
    """
    require_green(program)
    mutants: list[Mutant] = []
    for op in operators:
        mutants.extend(sample_mutants(program, op, cap, seed))
    jobs_args = [(program, mutant, g) for mutant in mutants]
    if jobs > 1 and len(jobs_args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_record_job, jobs_args, chunksize=16))
    return [compute_record(*a) for a in jobs_args]


# -- dataset files -----------------------------------------------------------


def save_dataset(records: Sequence[MutationRecord], graph_hash: str) -> bytes:
    lines = [json.dumps({"format": MUTATIONS_FORMAT, "version": FORMAT_VERSION, "graph_hash": graph_hash})]
    for r in records:
        lines.append(
            json.dumps({"record": {"mutant": r.mutant, "m": r.m, "op": r.operator, "ais": sorted(r.ais)}})
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_dataset(source: Source) -> tuple[str | None, list[MutationRecord]]:
    """Parse a mutation dataset; returns ``(graph_hash, records)``."""
    header, body = read_jsonl(source, MUTATIONS_FORMAT)
    records = []
    for lineno, obj in body:
        rec = obj.get("record")
        if set(obj) != {"record"} or not isinstance(rec, dict):
            raise GraphFormatError("expected a 'record' object", lineno)
        mutant, m, op, ais = rec.get("mutant"), rec.get("m"), rec.get("op"), rec.get("ais")
        if not (isinstance(mutant, str) and isinstance(m, str) and isinstance(op, str)):
            raise GraphFormatError("record needs string fields 'mutant', 'm' and 'op'", lineno)
        if not isinstance(ais, list) or not all(isinstance(t, str) for t in ais):
            raise GraphFormatError("record field 'ais' must be a list of strings", lineno)
        records.append(MutationRecord(mutant, m, op, frozenset(ais)))
    graph_hash = header.get("graph_hash") if header else None
    return graph_hash, records


def check_dataset(records: Iterable[MutationRecord], g: CallGraph) -> None:
    """Raise ``GraphIntegrityError`` unless every record fits ``g``."""
    for r in records:
        if r.m not in g:
            raise GraphIntegrityError(f"record {r.mutant!r}: mutation point {r.m!r} is not in the graph")
        if g.is_test(r.m):
            raise GraphIntegrityError(f"record {r.mutant!r}: mutation point {r.m!r} is a test node")
        for t in r.ais:
            if t not in g or not g.is_test(t):
                raise GraphIntegrityError(f"record {r.mutant!r}: {t!r} is not a test node of the graph")
