"""The ANF target: static grammar check and a stackless small-step machine.

ANF is not closed under beta, so at run time a let may bind a whole
expression.  The machine only ever inspects the outermost let and its head:

    let x = v in e               ->  e[x := v]
    let x = (let y = n in e1) in e2
                                 ->  let y = n in (let x = e1 in e2)
    let x = n in e               ->  let x = n' in e     (n contracts to n')
"""

from __future__ import annotations

from .machine import EMPTY, Configuration, Outcome, Status, contract
from .terms import (TARGET, Bool, Int, Lam, Let, Loc, NameSupply, Term, Var,
                    free_vars, is_tgt_expr, rename, substitute)


def anf_check(t: Term) -> bool:
    """True iff ``t`` is generated by the static ANF grammar."""
    return is_tgt_expr(t)


def is_value(t: Term) -> bool:
    return isinstance(t, (Int, Bool, Loc, Lam))


def flatten_let(node: Let) -> Let:
    inner = node.bound
    y, e1 = inner.name, inner.body
    if y != node.name and y in free_vars(node.body):
        new = NameSupply.after(node).fresh(y)
        e1 = rename(e1, y, new)
        y = new
    return Let(y, inner.bound, Let(node.name, e1, node.body))


def tgt_contract(heap, node: Term):
    """Contract at a let-spine site.  ``None`` means stuck."""
    if isinstance(node, Let):
        h = node.bound
        if is_value(h) or isinstance(h, Var):
            return heap, substitute(node.body, node.name, h, TARGET)
        if isinstance(h, Let):
            return heap, flatten_let(node)
        r = contract(heap, h, TARGET)
        if r is None:
            return None
        heap, new = r
        return heap, Let(node.name, new, node.body)
    return contract(heap, node, TARGET)


def spine_walk(t: Term) -> list:
    """Nodes inspected to find the next contraction: the root and, when the
    root is a let, its head.  Never more."""
    return [t, t.bound] if isinstance(t, Let) else [t]


def tgt_step(c: Configuration):
    t = c.term
    if is_value(t):
        return Status.VALUE
    r = tgt_contract(c.heap, t)
    if r is None:
        return Status.STUCK
    heap, new = r
    return Configuration(heap, new, c.root)


def tgt_eval(c: Configuration, fuel: int) -> Outcome:
    if isinstance(c, Term):
        c = Configuration(EMPTY, c, TARGET)
    steps = 0
    while True:
        nxt = tgt_step(c)
        if nxt is Status.VALUE:
            return Outcome(Status.VALUE, c, steps)
        if nxt is Status.STUCK:
            return Outcome(Status.STUCK, c, steps)
        if steps >= fuel:
            return Outcome(Status.FUEL, c, steps)
        c = nxt
        steps += 1


def flatten(t: Term) -> Term:
    """Canonical let-flattening: no let binds another let anywhere."""
    kids = t.kids()
    if kids:
        t = t.with_kids([flatten(k) for k in kids])
    while isinstance(t, Let) and isinstance(t.bound, Let):
        t = flatten_let(t)
        t = Let(t.name, t.bound, flatten(t.body))
    return t
