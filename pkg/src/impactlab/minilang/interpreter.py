"""Big-step evaluator and test runner.

Integers are signed 64-bit and wrap on overflow; division truncates toward
zero and the remainder takes the dividend's sign. A virtual call runs the
first declared implementor of its interface.
"""

from __future__ import annotations

import enum
import sys
from dataclasses import dataclass, field

from .syntax import (
    Abs,
    Arith,
    Assert,
    BoolLit,
    Call,
    Expr,
    If,
    IntLit,
    Logic,
    Neg,
    Not,
    Program,
    Rel,
    Seq,
    Var,
    VCall,
)

DEFAULT_STEP_BUDGET = 100_000
MAX_CALL_DEPTH = 400

_MOD = 1 << 64
_HALF = 1 << 63


def wrap64(x: int) -> int:
    return ((x + _HALF) % _MOD) - _HALF


class TestStatus(enum.Enum):
    __test__ = False

    PASS = "pass"
    FAIL = "fail"


class FailReason(enum.Enum):
    ASSERTION_FAILED = "assertion_failed"
    DIVISION_BY_ZERO = "division_by_zero"
    # Also covers call-depth exhaustion, the other face of runaway recursion.
    STEP_LIMIT_EXCEEDED = "step_limit_exceeded"


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # keep pytest from collecting this class

    test: str
    status: TestStatus
    reason: FailReason | None = None

    def __post_init__(self) -> None:
        if (self.status is TestStatus.FAIL) != (self.reason is not None):
            raise ValueError("a failing outcome needs a reason and a passing one must not have one")

    @property
    def passed(self) -> bool:
        return self.status is TestStatus.PASS


class _Abort(Exception):
    def __init__(self, reason: FailReason) -> None:
        self.reason = reason


@dataclass
class CallTrace:
    """Dynamic call observations for a single test execution."""

    pairs: set[tuple[str, str]] = field(default_factory=set)
    invoked: set[str] = field(default_factory=set)


class Interpreter:
    def __init__(self, program: Program, step_budget: int = DEFAULT_STEP_BUDGET) -> None:
        self.program = program
        self.step_budget = step_budget
        self.interfaces = program.interfaces
        self.steps = 0
        self.depth = 0
        self.trace: CallTrace | None = None

    def run_test(self, name: str, trace: CallTrace | None = None) -> TestOutcome:
        self.steps = 0
        self.depth = 0
        self.trace = trace
        try:
            self.invoke(None, name, ())
        except _Abort as abort:
            return TestOutcome(name, TestStatus.FAIL, abort.reason)
        return TestOutcome(name, TestStatus.PASS)

    def invoke(self, caller: str | None, name: str, args: tuple) -> int | bool:
        fn = self.program.function(name)
        if self.trace is not None:
            self.trace.invoked.add(name)
            if caller is not None:
                self.trace.pairs.add((caller, name))
        self.depth += 1
        if self.depth > MAX_CALL_DEPTH:
            raise _Abort(FailReason.STEP_LIMIT_EXCEEDED)
        try:
            return self.eval(fn.body, dict(zip(fn.params, args)), name)
        finally:
            self.depth -= 1

    def eval(self, e: Expr, env: dict, fn: str) -> int | bool:
        self.steps += 1
        if self.steps > self.step_budget:
            raise _Abort(FailReason.STEP_LIMIT_EXCEEDED)
        match e:
            case IntLit(v):
                return wrap64(v)
            case BoolLit(v):
                return v
            case Var(name):
                return env[name]
            case Arith(op, l, r):
                return self.arith(op, self.eval(l, env, fn), self.eval(r, env, fn))
            case Logic("&&", l, r):
                return self.eval(l, env, fn) and self.eval(r, env, fn)
            case Logic("||", l, r):
                return self.eval(l, env, fn) or self.eval(r, env, fn)
            case Rel(op, l, r):
                a, b = self.eval(l, env, fn), self.eval(r, env, fn)
                if op == "<":
                    return a < b
                if op == "<=":
                    return a <= b
                if op == ">":
                    return a > b
                if op == ">=":
                    return a >= b
                if op == "==":
                    return a == b
                return a != b
            case Not(x):
                return not self.eval(x, env, fn)
            case Neg(x):
                return wrap64(-self.eval(x, env, fn))
            case Abs(x):
                return wrap64(abs(self.eval(x, env, fn)))
            case If(c, t, o):
                return self.eval(t if self.eval(c, env, fn) else o, env, fn)
            case Call(name, args):
                values = tuple(self.eval(a, env, fn) for a in args)
                return self.invoke(fn, name, values)
            case VCall(iface, args):
                values = tuple(self.eval(a, env, fn) for a in args)
                return self.invoke(fn, self.interfaces[iface][0], values)
            case Assert(x):
                if not self.eval(x, env, fn):
                    raise _Abort(FailReason.ASSERTION_FAILED)
                return True
            case Seq(a, b):
                self.eval(a, env, fn)
                return self.eval(b, env, fn)
        raise AssertionError(f"unhandled node {e!r}")

    @staticmethod
    def arith(op: str, a: int, b: int) -> int:
        if op == "+":
            return wrap64(a + b)
        if op == "-":
            return wrap64(a - b)
        if op == "*":
            return wrap64(a * b)
        if b == 0:
            raise _Abort(FailReason.DIVISION_BY_ZERO)
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        if op == "/":
            return wrap64(q)
        return wrap64(a - b * q)


class _RecursionHeadroom:
    def __enter__(self) -> None:
        self.prior = sys.getrecursionlimit()
        sys.setrecursionlimit(max(self.prior, 40 * MAX_CALL_DEPTH + 1000))

    def __exit__(self, *exc) -> None:
        sys.setrecursionlimit(self.prior)


def run_tests(program: Program, step_budget: int = DEFAULT_STEP_BUDGET) -> list[TestOutcome]:
    """Run every test function in declaration order."""
    interp = Interpreter(program, step_budget)
    with _RecursionHeadroom():
        return [interp.run_test(t.name) for t in program.tests()]


def trace_tests(program: Program, step_budget: int = DEFAULT_STEP_BUDGET) -> dict[str, CallTrace]:
    """Run every test while recording which functions call which."""
    interp = Interpreter(program, step_budget)
    traces: dict[str, CallTrace] = {}
    with _RecursionHeadroom():
        for t in program.tests():
            traces[t.name] = CallTrace()
            interp.run_test(t.name, traces[t.name])
    return traces
