"""Tokenizer and recursive-descent parser for MiniLang sources."""

from __future__ import annotations

import re
from typing import NamedTuple

from ..errors import MiniLangError
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
    Var,
    VCall,
    seq,
)
from .types import check_types

KEYWORDS = {"fn", "interface", "if", "else", "assert", "abs", "true", "false"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>::|&&|\|\||<=|>=|==|!=|[-+*/%<>!(){},;=])
    """,
    re.VERBOSE,
)


class Token(NamedTuple):
    kind: str  # "int", "name", "kw", "op", "eof"
    text: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise MiniLangError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        text = match.group()
        column = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = match.end()
        elif kind == "name":
            tokens.append(Token("kw" if text in KEYWORDS else "name", text, line, column))
        elif kind in ("int", "op"):
            tokens.append(Token(kind, text, line, column))
        pos = match.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, source: str) -> None:
        self.tokens = tokenize(source)
        self.pos = 0
        # Name uses are resolved after the whole file is read; functions may be used before definition.
        self.uses: list[tuple[str, str, Token, int | None, str]] = []

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Token | None = None) -> MiniLangError:
        tok = tok or self.tok
        return MiniLangError(message, tok.line, tok.column)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def expect_name(self) -> Token:
        if self.tok.kind != "name":
            found = self.tok.text or "end of input"
            raise self.error(f"expected identifier, found {found!r}")
        return self.advance()

    # -- declarations --------------------------------------------------------

    def program(self) -> tuple[list[tuple[FunctionDef, Token]], list[tuple[str, tuple[Token, ...], Token]]]:
        functions: list[tuple[FunctionDef, Token]] = []
        interfaces: list[tuple[str, tuple[Token, ...], Token]] = []
        while self.tok.kind != "eof":
            if self.at("fn"):
                functions.append(self.fndef())
            elif self.at("interface"):
                self.advance()
                name_tok = self.expect_name()
                self.expect("=")
                impls = [self.expect_name()]
                while self.at(","):
                    self.advance()
                    impls.append(self.expect_name())
                interfaces.append((name_tok.text, tuple(impls), name_tok))
            else:
                raise self.error(f"expected 'fn' or 'interface', found {self.tok.text!r}")
        return functions, interfaces

    def fndef(self) -> tuple[FunctionDef, Token]:
        self.expect("fn")
        name_tok = self.expect_name()
        self.expect("(")
        params: list[str] = []
        if not self.at(")"):
            params.append(self.expect_name().text)
            while self.at(","):
                self.advance()
                params.append(self.expect_name().text)
        self.expect(")")
        if len(set(params)) != len(params):
            raise self.error(f"duplicate parameter in {name_tok.text!r}", name_tok)
        self.current = (name_tok.text, set(params))
        body = self.block()
        return FunctionDef(name_tok.text, tuple(params), body), name_tok

    def block(self) -> Expr:
        self.expect("{")
        exprs = [self.expr()]
        while self.at(";"):
            self.advance()
            exprs.append(self.expr())
        self.expect("}")
        return seq(exprs)

    # -- expressions ---------------------------------------------------------

    def expr(self) -> Expr:
        lhs = self.relational()
        while self.at("&&") or self.at("||"):
            op = self.advance().text
            lhs = Logic(op, lhs, self.relational())
        return lhs

    def relational(self) -> Expr:
        lhs = self.additive()
        if self.tok.kind == "op" and self.tok.text in ("<", "<=", ">", ">=", "==", "!="):
            op = self.advance().text
            lhs = Rel(op, lhs, self.additive())
            if self.tok.kind == "op" and self.tok.text in ("<", "<=", ">", ">=", "==", "!="):
                raise self.error("relational operators do not chain; add parentheses")
        return lhs

    def additive(self) -> Expr:
        lhs = self.multiplicative()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            lhs = Arith(op, lhs, self.multiplicative())
        return lhs

    def multiplicative(self) -> Expr:
        lhs = self.unary()
        while self.at("*") or self.at("/") or self.at("%"):
            op = self.advance().text
            lhs = Arith(op, lhs, self.unary())
        return lhs

    def unary(self) -> Expr:
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        if self.at("-"):
            self.advance()
            return Neg(self.unary())
        if self.at("abs"):
            self.advance()
            return Abs(self.unary())
        return self.primary()

    def args(self) -> tuple[Expr, ...]:
        self.expect("(")
        out: list[Expr] = []
        if not self.at(")"):
            out.append(self.expr())
            while self.at(","):
                self.advance()
                out.append(self.expr())
        self.expect(")")
        return tuple(out)

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text))
        if self.at("true") or self.at("false"):
            self.advance()
            return BoolLit(tok.text == "true")
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.block()
            self.expect("else")
            return If(cond, then, self.block())
        if self.at("assert"):
            self.advance()
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return Assert(inner)
        if tok.kind == "name":
            self.advance()
            if self.at("::"):
                self.advance()
                args = self.args()
                self.uses.append(("vcall", tok.text, tok, len(args), self.current[0]))
                return VCall(tok.text, args)
            if self.at("("):
                args = self.args()
                self.uses.append(("call", tok.text, tok, len(args), self.current[0]))
                return Call(tok.text, args)
            if tok.text not in self.current[1]:
                raise self.error(f"unknown identifier {tok.text!r}", tok)
            return Var(tok.text)
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")


def parse(source: str) -> Program:
    """Parse MiniLang text into a validated ``Program``."""
    parser = _Parser(source)
    fn_entries, iface_entries = parser.program()

    functions: dict[str, FunctionDef] = {}
    for fn, tok in fn_entries:
        if fn.name in functions:
            raise MiniLangError(f"duplicate function {fn.name!r}", tok.line, tok.column)
        if fn.is_test and fn.params:
            raise MiniLangError(f"test function {fn.name!r} must not take parameters", tok.line, tok.column)
        functions[fn.name] = fn
    interfaces: dict[str, tuple[str, ...]] = {}
    for name, impls, tok in iface_entries:
        if name in interfaces or name in functions:
            raise MiniLangError(f"duplicate name {name!r}", tok.line, tok.column)
        names = tuple(t.text for t in impls)
        if len(set(names)) != len(names):
            raise MiniLangError(f"interface {name!r} lists an implementor twice", tok.line, tok.column)
        for impl in impls:
            target = functions.get(impl.text)
            if target is None:
                raise MiniLangError(f"unknown identifier {impl.text!r}", impl.line, impl.column)
            if target.is_test:
                raise MiniLangError(f"test function {impl.text!r} cannot implement {name!r}", impl.line, impl.column)
        interfaces[name] = names

    for kind, name, tok, arity, owner in parser.uses:
        if kind == "vcall":
            if name not in interfaces:
                raise MiniLangError(f"unknown identifier {name!r}", tok.line, tok.column)
            for impl in interfaces[name]:
                if len(functions[impl].params) != arity:
                    raise MiniLangError(
                        f"{name}::(...) passes {arity} arguments but {impl!r} takes {len(functions[impl].params)}",
                        tok.line,
                        tok.column,
                    )
            continue
        target = functions.get(name)
        if target is None:
            raise MiniLangError(f"unknown identifier {name!r}", tok.line, tok.column)
        if target.is_test:
            raise MiniLangError(f"test function {name!r} cannot be called from {owner!r}", tok.line, tok.column)
        if len(target.params) != arity:
            raise MiniLangError(
                f"{name!r} takes {len(target.params)} arguments, {arity} given", tok.line, tok.column
            )

    program = Program(tuple(functions.values()), tuple(interfaces.items()))
    check_types(program)
    return program
