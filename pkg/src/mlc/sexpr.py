"""Reader for the concrete s-expression syntax.

    e ::= INT | #t | #f | SYMBOL | (lambda (SYMBOL) e) | (e e)
        | (let ((SYMBOL e)) e) | (if e e e) | (begin e e) | (PRIM e e)
        | (box e) | (unbox e) | (set-box! e e) | (cons e e) | (car e)
        | (cdr e) | (AS e) | (SA e)

Printing lives in :func:`mlc.terms.show`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import (AS, ARITY, SA, App, Begin, Bool, If, Int, Lam, Let, Op,
                    Term, Var, free_vars, show)

KEYWORDS = {"lambda", "let", "if", "begin", "AS", "SA"} | set(ARITY)

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_INT = re.compile(r"-?\d+$")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg, self.line, self.col = msg, line, col
        super().__init__(f"{line}:{col}: {msg}" if line else msg)


class ArityError(ParseError):
    pass


class ScopeError(ValueError):
    """Raised for programs with free variables."""


@dataclass
class _Atom:
    text: str
    line: int
    col: int


@dataclass
class _List:
    items: list
    line: int
    col: int


def _read(text: str) -> list:
    stack: list = [_List([], 1, 1)]
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        tok = m.group(0)
        if tok == "(":
            stack.append(_List([], line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].items.append(done)
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1].items.append(_Atom(tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    if len(stack) > 1:
        open_ = stack[-1]
        raise ParseError("unclosed '('", open_.line, open_.col)
    return stack[0].items


def _symbol(node, allow_fresh: bool) -> str:
    if not isinstance(node, _Atom):
        raise ParseError("expected a variable name", node.line, node.col)
    name = node.text
    if name in KEYWORDS or name.startswith("#") or _INT.match(name):
        raise ParseError(f"{name!r} cannot be used as a variable", node.line, node.col)
    if "%" in name and not allow_fresh:
        raise ParseError(f"'%' is reserved for generated names: {name!r}", node.line, node.col)
    return name


def _convert(node, allow_fresh: bool) -> Term:
    if isinstance(node, _Atom):
        t = node.text
        if _INT.match(t):
            return Int(int(t))
        if t == "#t":
            return Bool(True)
        if t == "#f":
            return Bool(False)
        if t.startswith("#l") and t[2:].isdigit():
            raise ParseError("locations only arise at run time", node.line, node.col)
        return Var(_symbol(node, allow_fresh))

    items = node.items
    if not items:
        raise ParseError("empty form", node.line, node.col)
    head = items[0]
    kw = head.text if isinstance(head, _Atom) else None

    def arity(n):
        if len(items) != n + 1:
            raise ArityError(f"{kw} expects {n} subform(s), got {len(items) - 1}",
                             node.line, node.col)

    def sub(i):
        return _convert(items[i], allow_fresh)

    if kw == "lambda":
        arity(2)
        params = items[1]
        if not isinstance(params, _List) or len(params.items) != 1:
            raise ArityError("lambda takes exactly one parameter", node.line, node.col)
        return Lam(_symbol(params.items[0], allow_fresh), sub(2))
    if kw == "let":
        arity(2)
        binds = items[1]
        if (not isinstance(binds, _List) or len(binds.items) != 1
                or not isinstance(binds.items[0], _List) or len(binds.items[0].items) != 2):
            raise ArityError("let takes exactly one binding ((x e))", node.line, node.col)
        name_node, bound = binds.items[0].items
        return Let(_symbol(name_node, allow_fresh), _convert(bound, allow_fresh), sub(2))
    if kw == "if":
        arity(3)
        return If(sub(1), sub(2), sub(3))
    if kw == "begin":
        arity(2)
        return Begin(sub(1), sub(2))
    if kw == "AS":
        arity(1)
        return AS(sub(1))
    if kw == "SA":
        arity(1)
        return SA(sub(1))
    if kw in ARITY:
        arity(ARITY[kw])
        return Op(kw, tuple(sub(i) for i in range(1, len(items))))
    if len(items) != 2:
        raise ArityError(f"application takes exactly one argument, got {len(items) - 1}",
                         node.line, node.col)
    return App(sub(0), sub(1))


def parse(text: str, allow_fresh: bool = True) -> Term:
    """Parse exactly one term.  ``allow_fresh=False`` additionally rejects the
    generated-name character '%', as required for user programs."""
    forms = _read(text)
    if len(forms) != 1:
        raise ParseError(f"expected one term, found {len(forms)}")
    return _convert(forms[0], allow_fresh)


def parse_program(text: str) -> Term:
    """Parse a closed user program."""
    t = parse(text, allow_fresh=False)
    free = free_vars(t)
    if free:
        raise ScopeError("unbound variable(s): " + ", ".join(sorted(free)))
    return t


__all__ = ["parse", "parse_program", "show", "ParseError", "ArityError", "ScopeError"]
