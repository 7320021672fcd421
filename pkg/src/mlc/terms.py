"""Abstract syntax shared by the source language, the ANF target and the
boundary terms that glue them together.

Nodes are untagged: the same ``App`` node is a source application or a target
computation depending on where it sits.  The language of a position is fixed
by the nearest enclosing boundary (``AS`` opens a source region, ``SA`` opens
a target region) and, at the root, by the configuration.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import ClassVar, Iterable, Optional

SOURCE = "S"
TARGET = "T"

ARITY = {
    "+": 2, "-": 2, "*": 2, "<": 2, "eq?": 2,
    "box": 1, "unbox": 1, "set-box!": 2,
    "cons": 2, "car": 1, "cdr": 1,
}
PRIMS = ("+", "-", "*", "<", "eq?")
HEAP_OPS = ("box", "unbox", "set-box!", "cons", "car", "cdr")


class Term:
    """Base class.  Subclasses expose ``kids()`` and ``with_kids()`` so paths
    can address any subterm generically."""

    __slots__ = ()
    family: ClassVar[str] = "shared"

    def kids(self) -> tuple:
        return ()

    def with_kids(self, kids) -> "Term":
        return self

    def __str__(self):
        return show(self)


@dataclass(frozen=True, slots=True)
class Int(Term):
    value: int


@dataclass(frozen=True, slots=True)
class Bool(Term):
    value: bool


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Loc(Term):
    """Heap location; only ever produced by reduction."""
    index: int
    family: ClassVar[str] = "runtime"


@dataclass(frozen=True, slots=True)
class Lam(Term):
    param: str
    body: Term

    def kids(self):
        return (self.body,)

    def with_kids(self, kids):
        return Lam(self.param, kids[0])


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term

    def kids(self):
        return (self.fn, self.arg)

    def with_kids(self, kids):
        return App(kids[0], kids[1])


@dataclass(frozen=True, slots=True)
class Let(Term):
    name: str
    bound: Term
    body: Term

    def kids(self):
        return (self.bound, self.body)

    def with_kids(self, kids):
        return Let(self.name, kids[0], kids[1])


@dataclass(frozen=True, slots=True)
class If(Term):
    test: Term
    then: Term
    orelse: Term

    def kids(self):
        return (self.test, self.then, self.orelse)

    def with_kids(self, kids):
        return If(kids[0], kids[1], kids[2])


@dataclass(frozen=True, slots=True)
class Begin(Term):
    first: Term
    second: Term
    family: ClassVar[str] = "source"

    def kids(self):
        return (self.first, self.second)

    def with_kids(self, kids):
        return Begin(kids[0], kids[1])


@dataclass(frozen=True, slots=True)
class Op(Term):
    """Primitive or heap operation applied to ``ARITY[op]`` operands."""
    op: str
    args: tuple

    def kids(self):
        return self.args

    def with_kids(self, kids):
        return Op(self.op, tuple(kids))


@dataclass(frozen=True, slots=True)
class AS(Term):
    """Target on the outside, source on the inside."""
    body: Term
    family: ClassVar[str] = "boundary"

    def kids(self):
        return (self.body,)

    def with_kids(self, kids):
        return AS(kids[0])


@dataclass(frozen=True, slots=True)
class SA(Term):
    """Source on the outside, target on the inside."""
    body: Term
    family: ClassVar[str] = "boundary"

    def kids(self):
        return (self.body,)

    def with_kids(self, kids):
        return SA(kids[0])


LEAVES = (Int, Bool, Var, Loc)
HOLE = Var("%hole")


# ---------------------------------------------------------------------------
# paths


def term_at(t: Term, path: Iterable[int]) -> Term:
    for i in path:
        t = t.kids()[i]
    return t


def replace_at(t: Term, path, new: Term) -> Term:
    path = tuple(path)
    if not path:
        return new
    kids = list(t.kids())
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return t.with_kids(kids)


def child_lang(t: Term, lang: str) -> str:
    """Language of the children of ``t`` when ``t`` sits in ``lang``."""
    if isinstance(t, AS):
        return SOURCE
    if isinstance(t, SA):
        return TARGET
    return lang


def size(t: Term) -> int:
    return 1 + sum(size(k) for k in t.kids())


def has_boundary(t: Term) -> bool:
    if isinstance(t, (AS, SA)):
        return True
    return any(has_boundary(k) for k in t.kids())


def locations(t: Term, acc: Optional[list] = None) -> list:
    """Locations in preorder, first occurrence only."""
    if acc is None:
        acc = []
    if isinstance(t, Loc):
        if t.index not in acc:
            acc.append(t.index)
    for k in t.kids():
        locations(k, acc)
    return acc


# ---------------------------------------------------------------------------
# variables


def free_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.param}
    if isinstance(t, Let):
        return free_vars(t.bound) | (free_vars(t.body) - {t.name})
    out = set()
    for k in t.kids():
        out |= free_vars(k)
    return out


def all_names(t: Term, acc: Optional[set] = None) -> set:
    if acc is None:
        acc = set()
    if isinstance(t, Var):
        acc.add(t.name)
    elif isinstance(t, Lam):
        acc.add(t.param)
    elif isinstance(t, Let):
        acc.add(t.name)
    for k in t.kids():
        all_names(k, acc)
    return acc


_SUFFIX = re.compile(r"%(\d+)$")


def base_name(name: str) -> str:
    return name.split("%", 1)[0] or "x"


class NameSupply:
    """Draws names of the form ``base%n``.  User programs cannot contain '%',
    so drawn names never collide with them; the avoid-set covers the rest."""

    def __init__(self, counter: int = 0, prefix: str = "t", avoid: Iterable[str] = ()):
        self.counter = counter
        self.prefix = prefix
        self.avoid = set(avoid)

    @classmethod
    def after(cls, *terms: Term, prefix: str = "t") -> "NameSupply":
        """A supply whose counter starts past every suffix used in ``terms``."""
        names: set = set()
        for t in terms:
            all_names(t, names)
        top = -1
        for n in names:
            m = _SUFFIX.search(n)
            if m:
                top = max(top, int(m.group(1)))
        return cls(top + 1, prefix, names)

    def fresh(self, base: Optional[str] = None) -> str:
        base = base_name(base) if base else self.prefix
        while True:
            name = f"{base}%{self.counter}"
            self.counter += 1
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def _wrap_value(v: Term, origin: Optional[str], here: str) -> Term:
    # Functions cross a language boundary wrapped; first-order values are shared.
    if origin is None or origin == here or not isinstance(v, Lam):
        return v
    return SA(v) if here == SOURCE else AS(v)


def substitute(t: Term, x: str, v: Term, lang: Optional[str] = None,
               supply: Optional[NameSupply] = None) -> Term:
    """Capture-avoiding ``t[x := v]``.

    With ``lang`` given, ``t`` and ``v`` are taken to live in that language and
    any copy of a function value that lands across a boundary is wrapped in
    the boundary that converts it.
    """
    vfv = free_vars(v)
    box = [supply]

    def fresh(base):
        if box[0] is None:
            box[0] = NameSupply.after(t, v)
        return box[0].fresh(base)

    def go(t, here):
        if isinstance(t, Var):
            return _wrap_value(v, lang, here) if t.name == x else t
        if isinstance(t, (Int, Bool, Loc)):
            return t
        if isinstance(t, Lam):
            if t.param == x:
                return t
            if t.param in vfv:
                p = fresh(t.param)
                return Lam(p, go(rename(t.body, t.param, p), here))
            return Lam(t.param, go(t.body, here))
        if isinstance(t, Let):
            bound = go(t.bound, here)
            if t.name == x:
                return Let(t.name, bound, t.body)
            if t.name in vfv:
                n = fresh(t.name)
                return Let(n, bound, go(rename(t.body, t.name, n), here))
            return Let(t.name, bound, go(t.body, here))
        inner = child_lang(t, here)
        return t.with_kids([go(k, inner) for k in t.kids()])

    return go(t, lang or SOURCE)


def rename(t: Term, old: str, new: str) -> Term:
    """Rename free occurrences of ``old``; ``new`` must be fresh."""
    return substitute(t, old, Var(new))


# ---------------------------------------------------------------------------
# alpha equivalence


def alpha_key(t: Term, locmap: Optional[dict] = None) -> str:
    """Printed form with bound variables renamed canonically in binding
    order.  Two terms are alpha-equivalent iff their keys are equal.  With a
    ``locmap``, locations are renamed through it as well."""
    out: list = []
    counter = [0]

    def go(t, env):
        if isinstance(t, Var):
            out.append(env.get(t.name, t.name))
        elif isinstance(t, Int):
            out.append(str(t.value))
        elif isinstance(t, Bool):
            out.append("#t" if t.value else "#f")
        elif isinstance(t, Loc):
            out.append(f"#l{locmap[t.index] if locmap is not None else t.index}")
        elif isinstance(t, Lam):
            b = f"@{counter[0]}"
            counter[0] += 1
            out.append(f"(lambda ({b}) ")
            go(t.body, {**env, t.param: b})
            out.append(")")
        elif isinstance(t, Let):
            b = f"@{counter[0]}"
            counter[0] += 1
            out.append(f"(let (({b} ")
            go(t.bound, env)
            out.append(")) ")
            go(t.body, {**env, t.name: b})
            out.append(")")
        else:
            out.append("(" + _head(t))
            for k in t.kids():
                out.append(" ")
                go(k, env)
            out.append(")")

    go(t, {})
    return "".join(out)


def alpha_eq(a: Term, b: Term) -> bool:
    return alpha_key(a) == alpha_key(b)


def _head(t: Term) -> str:
    if isinstance(t, Op):
        return t.op
    if isinstance(t, App):
        return ""
    return {If: "if", Begin: "begin", AS: "AS", SA: "SA"}[type(t)]


# ---------------------------------------------------------------------------
# printing


def show(t: Term) -> str:
    """Concrete s-expression syntax; ``parse(show(t)) == t`` for
    location-free terms."""
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Bool):
        return "#t" if t.value else "#f"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Loc):
        return f"#l{t.index}"
    if isinstance(t, Lam):
        return f"(lambda ({t.param}) {show(t.body)})"
    if isinstance(t, Let):
        return f"(let (({t.name} {show(t.bound)})) {show(t.body)})"
    if isinstance(t, App):
        return f"({show(t.fn)} {show(t.arg)})"
    return "(" + " ".join([_head(t)] + [show(k) for k in t.kids()]) + ")"


# ---------------------------------------------------------------------------
# grammar classes


class SynClass(enum.Enum):
    SourceExpr = "SourceExpr"
    SourceValue = "SourceValue"
    TargetValue = "TargetValue"
    TargetComp = "TargetComp"
    TargetExpr = "TargetExpr"
    TargetRuntimeExpr = "TargetRuntimeExpr"
    Mixed = "Mixed"


def _arity_ok(t: Term) -> bool:
    return not isinstance(t, Op) or ARITY.get(t.op) == len(t.args)


# Source grammar, extended with SA.

def is_src_value(t: Term) -> bool:
    if isinstance(t, LEAVES):
        return True
    if isinstance(t, Lam):
        return is_src_expr(t.body)
    if isinstance(t, SA):
        return is_rt_plain_value(t.body)
    return False


def is_src_expr(t: Term) -> bool:
    if isinstance(t, LEAVES):
        return True
    if isinstance(t, SA):
        return is_rt_expr(t.body)
    if isinstance(t, AS):
        return False
    if not _arity_ok(t):
        return False
    return all(is_src_expr(k) for k in t.kids())


# Static ANF grammar: no boundaries, no let of an expression.

def is_tgt_value(t: Term) -> bool:
    if isinstance(t, LEAVES):
        return True
    return isinstance(t, Lam) and is_tgt_expr(t.body)


def is_tgt_comp(t: Term) -> bool:
    if is_tgt_value(t):
        return True
    if isinstance(t, App):
        return is_tgt_value(t.fn) and is_tgt_value(t.arg)
    if isinstance(t, Op):
        return _arity_ok(t) and all(is_tgt_value(a) for a in t.args)
    if isinstance(t, If):
        return is_tgt_value(t.test) and is_tgt_expr(t.then) and is_tgt_expr(t.orelse)
    return False


def is_tgt_expr(t: Term) -> bool:
    while isinstance(t, Let):
        if not is_tgt_comp(t.bound):
            return False
        t = t.body
    return is_tgt_comp(t)


# Runtime target grammar: boundaries allowed, let may bind an expression.

def is_rt_plain_value(t: Term) -> bool:
    """A target value that is not itself a boundary."""
    if isinstance(t, LEAVES):
        return True
    return isinstance(t, Lam) and is_rt_expr(t.body)


def is_rt_value(t: Term) -> bool:
    if isinstance(t, AS):
        return is_src_value(t.body)
    return is_rt_plain_value(t)


def is_rt_comp(t: Term) -> bool:
    if is_rt_value(t):
        return True
    if isinstance(t, AS):
        return is_src_expr(t.body)
    if isinstance(t, App):
        return is_rt_value(t.fn) and is_rt_value(t.arg)
    if isinstance(t, Op):
        return _arity_ok(t) and all(is_rt_value(a) for a in t.args)
    if isinstance(t, If):
        return is_rt_value(t.test) and is_rt_expr(t.then) and is_rt_expr(t.orelse)
    return False


def is_rt_expr(t: Term) -> bool:
    if isinstance(t, Let):
        return is_rt_expr(t.bound) and is_rt_expr(t.body)
    return is_rt_comp(t)


def classify(t: Term) -> set:
    """Every grammar class ``t`` inhabits.  The three static target classes
    are boundary-free; boundary terms are target members only through the
    runtime class."""
    out = set()
    if is_src_expr(t):
        out.add(SynClass.SourceExpr)
    if is_src_value(t):
        out.add(SynClass.SourceValue)
    if is_tgt_value(t):
        out.add(SynClass.TargetValue)
    if is_tgt_comp(t):
        out.add(SynClass.TargetComp)
    if is_tgt_expr(t):
        out.add(SynClass.TargetExpr)
    if is_rt_expr(t):
        out.add(SynClass.TargetRuntimeExpr)
    if has_boundary(t):
        out.add(SynClass.Mixed)
    return out
