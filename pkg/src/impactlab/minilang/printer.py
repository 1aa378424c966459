"""Pretty printer whose output parses back to an equal AST."""

from __future__ import annotations

from .syntax import (
    Abs,
    Arith,
    Assert,
    BoolLit,
    Call,
    Expr,
    FunctionDef,
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

# Binding strength, loosest first.
_LOGIC, _REL, _ADD, _MUL, _UNARY, _ATOM = range(1, 7)


def _level(e: Expr) -> int:
    match e:
        case Logic():
            return _LOGIC
        case Rel():
            return _REL
        case Arith(op, _, _):
            return _ADD if op in "+-" else _MUL
        case Not() | Neg() | Abs():
            return _UNARY
    return _ATOM


def _block(e: Expr) -> str:
    items = []
    while isinstance(e, Seq):
        items.append(render(e.first))
        e = e.second
    items.append(render(e))
    return "{" + "; ".join(items) + "}"


def _at(e: Expr, level: int) -> str:
    text = render(e)
    return f"({text})" if _level(e) < level else text


def render(e: Expr) -> str:
    match e:
        case IntLit(v):
            return str(v)
        case BoolLit(v):
            return "true" if v else "false"
        case Var(name):
            return name
        case Logic(op, l, r):
            return f"{_at(l, _LOGIC)} {op} {_at(r, _REL)}"
        case Rel(op, l, r):
            return f"{_at(l, _ADD)} {op} {_at(r, _ADD)}"
        case Arith(op, l, r):
            lvl = _level(e)
            return f"{_at(l, lvl)} {op} {_at(r, lvl + 1)}"
        case Not(x):
            return "!" + _at(x, _UNARY)
        case Neg(x):
            return "-" + _at(x, _UNARY)
        case Abs(x):
            return f"abs({render(x)})"
        case If(c, t, o):
            return f"if ({render(c)}) {_block(t)} else {_block(o)}"
        case Call(name, args):
            return f"{name}({', '.join(render(a) for a in args)})"
        case VCall(name, args):
            return f"{name}::({', '.join(render(a) for a in args)})"
        case Assert(x):
            return f"assert({render(x)})"
        case Seq():
            # A sequence can only sit in block position; parenthesizing would not re-parse.
            raise ValueError("sequence outside of a block")
    raise AssertionError(f"unhandled node {e!r}")


def render_function(fn: FunctionDef) -> str:
    return f"fn {fn.name}({', '.join(fn.params)}) {_block(fn.body)}"


def render_program(program: Program) -> str:
    lines = [f"interface {name} = {', '.join(impls)}" for name, impls in program.interface_items]
    lines += [render_function(fn) for fn in program.functions]
    return "\n".join(lines) + ("\n" if lines else "")
