"""Reference ANF conversion, written independently of the rewrite engine.

A one-pass continuation-based normalizer.  The continuation says what the
surrounding context will do with the result:

* ``_Tail``    the result is the whole expression;
* ``_Bind``    the result is bound by a let, so a computation (including an
               ``if``) may be used as is;
* ``_Demand``  the context needs a value, so computations are named by a
               fresh let and an ``if`` copies the context into both branches.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from ..terms import (App, Begin, Bool, If, Int, Lam, Let, Loc, Op, Term, Var)


@dataclass
class _Tail:
    def give(self, c: Term) -> Term:
        return c


@dataclass
class _Bind:
    name: str
    rest: Callable[[], Term]

    def give(self, c: Term) -> Term:
        return Let(self.name, c, self.rest())


@dataclass
class _Demand:
    use: Callable[[Term], Term]
    fresh: Callable[[str], str]

    def give(self, c: Term) -> Term:
        if _is_value(c):
            return self.use(c)
        t = self.fresh("t")
        return Let(t, c, self.use(Var(t)))


def _is_value(t: Term) -> bool:
    return isinstance(t, (Int, Bool, Var, Loc, Lam))


class _Normalizer:
    def __init__(self):
        self.counter = itertools.count()

    def fresh(self, base: str) -> str:
        return f"{base}%r{next(self.counter)}"

    def uniquify(self, t: Term, env: dict) -> Term:
        """Give every binder a distinct name so no step can capture."""
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        if isinstance(t, Lam):
            x = self.fresh(t.param)
            return Lam(x, self.uniquify(t.body, {**env, t.param: x}))
        if isinstance(t, Let):
            x = self.fresh(t.name)
            return Let(x, self.uniquify(t.bound, env),
                       self.uniquify(t.body, {**env, t.name: x}))
        kids = t.kids()
        return t.with_kids([self.uniquify(k, env) for k in kids]) if kids else t

    def value(self, v: Term) -> Term:
        if isinstance(v, Lam):
            return Lam(v.param, self.norm(v.body, _Tail()))
        return v

    def norm(self, e: Term, k) -> Term:
        if _is_value(e):
            return k.give(self.value(e))
        if isinstance(e, Let):
            return self.norm(e.bound, _Bind(e.name, lambda: self.norm(e.body, k)))
        if isinstance(e, Begin):
            return self.norm(Let(self.fresh("_"), e.first, e.second), k)
        if isinstance(e, If):
            return self.norm(e.test, _Demand(lambda t: self.join(k, t, e), self.fresh))
        if isinstance(e, (App, Op)):
            return self.names(list(e.kids()), [], lambda vs: k.give(e.with_kids(vs)))
        raise ValueError(f"cannot normalize {type(e).__name__}")

    def join(self, k, test: Term, e: If) -> Term:
        if isinstance(k, _Demand):
            return If(test, self.norm(e.then, k), self.norm(e.orelse, k))
        return k.give(If(test, self.norm(e.then, _Tail()), self.norm(e.orelse, _Tail())))

    def names(self, todo: list, done: list, use) -> Term:
        if not todo:
            return use(done)
        head, rest = todo[0], todo[1:]
        return self.norm(head, _Demand(lambda v: self.names(rest, done + [v], use), self.fresh))


def reference_anf(s: Term) -> Term:
    """ANF of a boundary-free source program.  Binder names differ from
    ``compile_aot``; compare up to alpha after let-flattening."""
    n = _Normalizer()
    return n.norm(n.uniquify(s, {}), _Tail())
