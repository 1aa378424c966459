"""Two-type (int/bool) inference for MiniLang.

Parameters carry no annotations, so their types are solved by a fixpoint
over usage sites and call arguments. Inference is what lets the mutation
operators tell numeric expressions from boolean ones.
"""

from __future__ import annotations

from ..errors import MiniLangError
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
    preorder,
)

INT = "int"
BOOL = "bool"


class _Solver:
    def __init__(self, program: Program) -> None:
        self.program = program
        self.params: dict[tuple[str, str], str | None] = {
            (f.name, p): None for f in program.functions for p in f.params
        }
        self.returns: dict[str, str | None] = {f.name: None for f in program.functions}
        self.changed = False
        self.fn = ""

    def fail(self, message: str) -> MiniLangError:
        return MiniLangError(f"type error in {self.fn!r}: {message}")

    def set_param(self, name: str, ty: str) -> None:
        key = (self.fn, name)
        current = self.params[key]
        if current is None:
            self.params[key] = ty
            self.changed = True
        elif current != ty:
            raise self.fail(f"parameter {name!r} used as both {current} and {ty}")

    def require(self, e: Expr, ty: str) -> None:
        actual = self.infer(e)
        if actual is None:
            if isinstance(e, Var):
                self.set_param(e.name, ty)
            return
        if actual != ty:
            raise self.fail(f"expected {ty}, found {actual}")

    def infer(self, e: Expr) -> str | None:
        match e:
            case IntLit():
                return INT
            case BoolLit():
                return BOOL
            case Var(name):
                return self.params[(self.fn, name)]
            case Arith(_, l, r):
                self.require(l, INT)
                self.require(r, INT)
                return INT
            case Neg(x) | Abs(x):
                self.require(x, INT)
                return INT
            case Logic(_, l, r):
                self.require(l, BOOL)
                self.require(r, BOOL)
                return BOOL
            case Not(x) | Assert(x):
                self.require(x, BOOL)
                return BOOL
            case Rel(op, l, r):
                if op in ("==", "!="):
                    lt, rt = self.infer(l), self.infer(r)
                    if lt is not None and rt is not None and lt != rt:
                        raise self.fail(f"cannot compare {lt} with {rt}")
                    known = lt or rt
                    if known is not None:
                        self.require(l, known)
                        self.require(r, known)
                else:
                    self.require(l, INT)
                    self.require(r, INT)
                return BOOL
            case If(c, t, o):
                self.require(c, BOOL)
                tt, ot = self.infer(t), self.infer(o)
                if tt is not None and ot is not None and tt != ot:
                    raise self.fail(f"if branches have types {tt} and {ot}")
                known = tt or ot
                if known is not None:
                    self.require(t, known)
                    self.require(o, known)
                return known
            case Seq(a, b):
                self.infer(a)
                return self.infer(b)
            case Call(name, args):
                self.unify_args(self.program.function(name).params, name, args)
                return self.returns[name]
            case VCall(iface, args):
                impls = self.program.interfaces[iface]
                result = None
                for impl in impls:
                    self.unify_args(self.program.function(impl).params, impl, args)
                    rt = self.returns[impl]
                    if rt is not None:
                        if result is not None and result != rt:
                            raise self.fail(f"implementors of {iface!r} return different types")
                        result = rt
                return result
        raise AssertionError(f"unhandled node {e!r}")

    def unify_args(self, params: tuple[str, ...], callee: str, args: tuple[Expr, ...]) -> None:
        for param, arg in zip(params, args):
            want = self.params[(callee, param)]
            have = self.infer(arg)
            if want is not None:
                self.require(arg, want)
            elif have is not None:
                self.params[(callee, param)] = have
                self.changed = True

    def solve(self) -> None:
        while True:
            self.changed = False
            for f in self.program.functions:
                self.fn = f.name
                rt = self.infer(f.body)
                prior = self.returns[f.name]
                if rt is not None and prior is None:
                    self.returns[f.name] = rt
                    self.changed = True
                elif rt is not None and prior != rt:
                    raise self.fail(f"return type changes from {prior} to {rt}")
            if not self.changed:
                return


def check_types(program: Program) -> None:
    """Raise ``MiniLangError`` if the program is not consistently typed."""
    _Solver(program).solve()


def expression_types(program: Program) -> dict[str, list[str | None]]:
    """Per function, the inferred type of each expression in preorder.

    ``None`` marks an expression whose type is unconstrained, such as an
    unused parameter.
    """
    solver = _Solver(program)
    solver.solve()
    out: dict[str, list[str | None]] = {}
    for f in program.functions:
        solver.fn = f.name
        out[f.name] = [solver.infer(e) for e in preorder(f.body)]
    return out
