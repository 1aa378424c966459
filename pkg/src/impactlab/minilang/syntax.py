"""MiniLang abstract syntax.

Expression nodes are frozen dataclasses so structurally equal trees compare
equal. A node's location is its preorder index inside the enclosing function
body; ``preorder`` and ``replace_at`` are the two primitives built on it.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Union

ARITH_OPS = ("+", "-", "*", "/", "%")
LOGIC_OPS = ("&&", "||")
REL_OPS = ("<", "<=", ">", ">=", "==", "!=")
TEST_PREFIX = "test_"


class FunctionKind(enum.Enum):
    APPLICATION = "app"
    TEST = "test"


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Arith:
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Logic:
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Rel:
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Not:
    expr: Expr


@dataclass(frozen=True)
class Neg:
    expr: Expr


@dataclass(frozen=True)
class Abs:
    expr: Expr


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Expr
    orelse: Expr


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class VCall:
    interface: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Assert:
    expr: Expr


@dataclass(frozen=True)
class Seq:
    first: Expr
    second: Expr


Expr = Union[IntLit, BoolLit, Var, Arith, Logic, Rel, Not, Neg, Abs, If, Call, VCall, Assert, Seq]


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple[str, ...]
    body: Expr

    @property
    def kind(self) -> FunctionKind:
        return FunctionKind.TEST if self.name.startswith(TEST_PREFIX) else FunctionKind.APPLICATION

    @property
    def is_test(self) -> bool:
        return self.kind is FunctionKind.TEST


@dataclass(frozen=True)
class Program:
    functions: tuple[FunctionDef, ...] = ()
    interface_items: tuple[tuple[str, tuple[str, ...]], ...] = ()
    _by_name: Mapping[str, FunctionDef] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_name", MappingProxyType({f.name: f for f in self.functions}))

    def __reduce__(self):
        # the name index is derived state and a mappingproxy cannot be pickled
        return (type(self), (self.functions, self.interface_items))

    @property
    def interfaces(self) -> Mapping[str, tuple[str, ...]]:
        return dict(self.interface_items)

    def function(self, name: str) -> FunctionDef:
        return self._by_name[name]

    def has_function(self, name: str) -> bool:
        return name in self._by_name

    def tests(self) -> list[FunctionDef]:
        return [f for f in self.functions if f.is_test]

    def replace_function(self, fn: FunctionDef) -> Program:
        functions = tuple(fn if f.name == fn.name else f for f in self.functions)
        return Program(functions, self.interface_items)


def children(e: Expr) -> tuple[Expr, ...]:
    match e:
        case Arith(_, l, r) | Logic(_, l, r) | Rel(_, l, r):
            return (l, r)
        case Not(x) | Neg(x) | Abs(x) | Assert(x):
            return (x,)
        case If(c, t, o):
            return (c, t, o)
        case Call(_, args) | VCall(_, args):
            return args
        case Seq(a, b):
            return (a, b)
    return ()


def with_children(e: Expr, kids: tuple[Expr, ...]) -> Expr:
    match e:
        case Arith(op, _, _):
            return Arith(op, *kids)
        case Logic(op, _, _):
            return Logic(op, *kids)
        case Rel(op, _, _):
            return Rel(op, *kids)
        case Not(_):
            return Not(*kids)
        case Neg(_):
            return Neg(*kids)
        case Abs(_):
            return Abs(*kids)
        case Assert(_):
            return Assert(*kids)
        case If(_, _, _):
            return If(*kids)
        case Call(name, _):
            return Call(name, tuple(kids))
        case VCall(name, _):
            return VCall(name, tuple(kids))
        case Seq(_, _):
            return Seq(*kids)
    return e


def preorder(e: Expr) -> list[Expr]:
    out: list[Expr] = []
    stack = [e]
    while stack:
        node = stack.pop()
        out.append(node)
        stack.extend(reversed(children(node)))
    return out


def replace_at(e: Expr, index: int, new: Expr) -> Expr:
    """Return ``e`` with the subtree at preorder ``index`` swapped for ``new``."""
    counter = 0

    def go(node: Expr) -> Expr:
        nonlocal counter
        if counter == index:
            counter += len(preorder(node))
            return new
        counter += 1
        kids = children(node)
        if not kids:
            return node
        return with_children(node, tuple(go(k) for k in kids))

    if not 0 <= index < len(preorder(e)):
        raise IndexError(f"no expression at preorder index {index}")
    return go(e)


def seq(exprs: list[Expr]) -> Expr:
    """Right-nested sequence of one or more expressions."""
    out = exprs[-1]
    for e in reversed(exprs[:-1]):
        out = Seq(e, out)
    return out
