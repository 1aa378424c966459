"""MiniLang: a tiny deterministic language with tests and virtual dispatch."""

from importlib import resources

from .extract import extract_call_graph
from .interpreter import FailReason, TestOutcome, TestStatus, run_tests, trace_tests
from .parser import parse
from .printer import render_program
from .syntax import FunctionDef, FunctionKind, Program

__all__ = [
    "FailReason",
    "FunctionDef",
    "FunctionKind",
    "Program",
    "TestOutcome",
    "TestStatus",
    "corpus_names",
    "corpus_source",
    "extract_call_graph",
    "load_corpus",
    "parse",
    "render_program",
    "run_tests",
    "trace_tests",
]


def corpus_names() -> list[str]:
    """Names of the bundled example programs, without the ``.mini`` suffix."""
    root = resources.files("impactlab") / "corpus"
    return sorted(p.name[: -len(".mini")] for p in root.iterdir() if p.name.endswith(".mini"))


def corpus_source(name: str) -> str:
    return (resources.files("impactlab") / "corpus" / f"{name}.mini").read_text(encoding="utf-8")


def load_corpus(name: str) -> Program:
    return parse(corpus_source(name))
