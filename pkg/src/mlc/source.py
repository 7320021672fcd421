"""Call-by-value, heap-based small-step semantics of the source language.

Evaluation contexts are represented as paths:

    E ::= [] | (E e) | (v E) | (PRIM E e) | (PRIM v E) | (if E e e)
        | (let ((x E)) e) | (begin E e) | (box E) | (unbox E)
        | (set-box! E e) | (set-box! v E) | (cons E e) | (cons v E)
        | (car E) | (cdr E)
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .machine import EMPTY, Configuration, Outcome, Status, contract
from .terms import (SOURCE, App, Begin, Bool, If, Int, Lam, Let, Loc, Op, Term,
                    replace_at, substitute)


def is_value(t: Term) -> bool:
    return isinstance(t, (Int, Bool, Loc, Lam))


def eval_positions(t: Term) -> tuple:
    """Child indices that are evaluation positions, in evaluation order."""
    if isinstance(t, App):
        return (0, 1)
    if isinstance(t, Op):
        return tuple(range(len(t.args)))
    if isinstance(t, (Let, If, Begin)):
        return (0,)
    return ()


class Decomposition(NamedTuple):
    status: str                 # "value", "redex" or "stuck"
    path: Optional[tuple] = None
    redex: Optional[Term] = None


def src_decompose(e: Term) -> Decomposition:
    if is_value(e):
        return Decomposition("value")
    path = []
    t = e
    while True:
        if not isinstance(t, (App, Op, Let, If, Begin)):
            # free variable or boundary in evaluation position
            return Decomposition("stuck", tuple(path), t)
        kids = t.kids()
        for i in eval_positions(t):
            if not is_value(kids[i]):
                path.append(i)
                t = kids[i]
                break
        else:
            return Decomposition("redex", tuple(path), t)


def src_contract(heap, redex: Term):
    if isinstance(redex, Let):
        return heap, substitute(redex.body, redex.name, redex.bound, SOURCE)
    if isinstance(redex, Begin):
        return heap, redex.second
    return contract(heap, redex, SOURCE)


def src_step(c: Configuration):
    """One contraction; returns the next configuration, ``Status.VALUE`` or
    ``Status.STUCK``."""
    d = src_decompose(c.term)
    if d.status == "value":
        return Status.VALUE
    if d.status == "stuck":
        return Status.STUCK
    r = src_contract(c.heap, d.redex)
    if r is None:
        return Status.STUCK
    heap, new = r
    return Configuration(heap, replace_at(c.term, d.path, new), c.root)


def src_eval(c: Configuration, fuel: int) -> Outcome:
    if isinstance(c, Term):
        c = Configuration(EMPTY, c)
    steps = 0
    while True:
        nxt = src_step(c)
        if nxt is Status.VALUE:
            return Outcome(Status.VALUE, c, steps)
        if nxt is Status.STUCK:
            return Outcome(Status.STUCK, c, steps)
        if steps >= fuel:
            return Outcome(Status.FUEL, c, steps)
        c = nxt
        steps += 1
