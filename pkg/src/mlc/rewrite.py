"""The multi-language reduction relation as an enumerable set of redex sites.

Four families of steps:

* evaluation steps (``SrcStep``, ``TgtStep``, ``LetFlatten``) at the unique
  evaluation position of the whole configuration; these are the only steps
  that read or write the heap;
* translation steps: A-reductions and structural translations, fired at any
  ``AS`` node, including under binders;
* boundary cancellation ``AS(SA e) -> e`` and ``SA(AS e) -> e`` anywhere;
* ``SA`` of a target value, which turns it into a source value.
"""

from __future__ import annotations

import contextlib
import enum
import hashlib
from dataclasses import dataclass, field
from typing import Optional

from .machine import Configuration
from .source import eval_positions, src_contract
from .target import tgt_contract
from .terms import (AS, HOLE, SA, SOURCE, TARGET, App, Begin, Bool, If, Int, Lam,
                    Let, Loc, NameSupply, Op, Term, Var, child_lang, free_vars,
                    rename, replace_at, show, term_at)


class RuleName(enum.Enum):
    SrcStep = "SrcStep"
    TgtStep = "TgtStep"
    ALift = "ALift"
    ALetAssoc = "ALetAssoc"
    AJoinIf = "AJoinIf"
    ABeginSeq = "ABeginSeq"
    TValConst = "TValConst"
    TValLam = "TValLam"
    TCompStruct = "TCompStruct"
    TLetBind = "TLetBind"
    LetFlatten = "LetFlatten"
    CancelSA_AS = "CancelSA_AS"
    CancelAS_SA = "CancelAS_SA"
    SAValConst = "SAValConst"
    SAValLam = "SAValLam"


_ORDER = {r: i for i, r in enumerate(RuleName)}

EVAL_RULES = frozenset({RuleName.SrcStep, RuleName.TgtStep, RuleName.LetFlatten})
A_RULES = frozenset({RuleName.ALift, RuleName.ALetAssoc, RuleName.AJoinIf, RuleName.ABeginSeq})
T_RULES = frozenset({RuleName.TValConst, RuleName.TValLam, RuleName.TCompStruct, RuleName.TLetBind})
CANCEL_RULES = frozenset({RuleName.CancelSA_AS, RuleName.CancelAS_SA})
SA_VALUE_RULES = frozenset({RuleName.SAValConst, RuleName.SAValLam})
# What ahead-of-time compilation normalizes.
TRANSLATION_RULES = A_RULES | T_RULES | CANCEL_RULES


class SiteError(ValueError):
    """The site does not (or no longer) match the term."""


class Mutation(enum.Enum):
    """Deliberately broken rule variants used as negative controls."""
    NONE = "none"
    LIFT_NOT_FRESH = "lift-not-fresh"
    TCOMP_SKIP_BOUNDARY = "tcomp-skip-boundary"
    JOINIF_SWAP = "joinif-swap"


_mutation = Mutation.NONE


def active_mutation() -> Mutation:
    return _mutation


def set_mutation(m: Mutation) -> None:
    global _mutation
    _mutation = Mutation(m)


@contextlib.contextmanager
def mutated(m: Mutation):
    old = _mutation
    set_mutation(m)
    try:
        yield
    finally:
        set_mutation(old)


@dataclass(frozen=True)
class RedexSite:
    path: tuple
    rule: RuleName
    subterm: Term = field(compare=False, repr=False)
    binders: tuple = field(default=(), compare=False, repr=False)
    # precomputed (heap_in, heap_out, replacement) for evaluation steps
    payload: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def digest(self) -> str:
        return hashlib.sha1(show(self.subterm).encode()).hexdigest()[:12]

    @property
    def avoid(self) -> frozenset:
        return frozenset(self.binders)

    def sort_key(self):
        return (self.path, _ORDER[self.rule])


# ---------------------------------------------------------------------------
# translation: A-reductions and structural rules


def _plain_tgt_value(t: Term) -> bool:
    return isinstance(t, (Int, Bool, Var, Loc, Lam))


def _aval(t: Term) -> bool:
    """Value for the purpose of translation (variables included)."""
    if isinstance(t, (Int, Bool, Var, Loc, Lam)):
        return True
    return isinstance(t, SA) and _plain_tgt_value(t.body)


def _simple_bound(t: Term) -> bool:
    """Let-bound terms that translate to a single target computation."""
    if _aval(t) or isinstance(t, SA):
        return True
    if isinstance(t, (App, Op)):
        return all(_aval(k) for k in t.kids())
    return isinstance(t, If) and _aval(t.test)


def a_decompose(s: Term):
    """Split a non-value source term into ``E[r]`` for translation.

    Returns ``(kind, path, r)``; ``path`` addresses ``r`` inside ``s`` and is
    the evaluation context ``E``.  ``kind`` is one of ``letbind`` (a root let
    whose bound term is simple), ``flat``, ``if``, ``let``, ``begin`` or ``sa``.
    """
    path: list = []
    t = s
    while True:
        root = not path
        if isinstance(t, SA):
            return "sa", tuple(path), t
        if isinstance(t, Let):
            if not root:
                return "let", tuple(path), t
            if _simple_bound(t.bound):
                return "letbind", (), t
            path.append(0)
            t = t.bound
            continue
        if isinstance(t, Begin):
            return "begin", tuple(path), t
        if isinstance(t, If):
            if _aval(t.test):
                return "if", tuple(path), t
            path.append(0)
            t = t.test
            continue
        if isinstance(t, (App, Op)):
            for i, k in enumerate(t.kids()):
                if not _aval(k):
                    path.append(i)
                    t = k
                    break
            else:
                return "flat", tuple(path), t
            continue
        return None


def a_rule(s: Term) -> Optional[RuleName]:
    """The translation rule enabled at ``AS(s)``, if any (at most one)."""
    if isinstance(s, SA):
        return None
    if _aval(s):
        return RuleName.TValLam if isinstance(s, Lam) else RuleName.TValConst
    d = a_decompose(s)
    if d is None:
        return None
    kind, path, _ = d
    if kind == "letbind":
        return RuleName.TLetBind
    if kind == "flat":
        return RuleName.TCompStruct if not path else RuleName.ALift
    if kind == "if":
        return RuleName.TCompStruct if not path else RuleName.AJoinIf
    if kind == "let":
        return RuleName.ALetAssoc
    if kind == "begin":
        return RuleName.ABeginSeq
    return RuleName.ALift if path else None


def _tcomp(s: Term) -> Term:
    if isinstance(s, If):
        then = s.then if _mutation is Mutation.TCOMP_SKIP_BOUNDARY else AS(s.then)
        return If(AS(s.test), then, AS(s.orelse))
    return s.with_kids([AS(k) for k in s.kids()])


def a_reduce(node: Term, rule: Optional[RuleName] = None) -> Term:
    """Apply the translation rule enabled at ``node = AS(s)``; returns the
    replacement for ``node``."""
    if not isinstance(node, AS):
        raise SiteError("translation site is not an AS boundary")
    s = node.body
    enabled = a_rule(s)
    if enabled is None or (rule is not None and rule is not enabled):
        raise SiteError(f"{rule.value if rule else 'translation'} not enabled at {show(node)}")
    if enabled is RuleName.TValConst:
        return s
    if enabled is RuleName.TValLam:
        return Lam(s.param, AS(s.body))
    kind, path, r = a_decompose(s)
    if enabled is RuleName.TLetBind:
        return Let(s.name, AS(s.bound), AS(s.body))
    if enabled is RuleName.TCompStruct:
        return _tcomp(s)
    supply = NameSupply.after(s)
    if enabled is RuleName.ALift:
        x = "t" if _mutation is Mutation.LIFT_NOT_FRESH else supply.fresh("t")
        return Let(x, AS(r), AS(replace_at(s, path, Var(x))))
    if enabled is RuleName.ALetAssoc:
        y, e2 = r.name, r.body
        if y in free_vars(replace_at(s, path, HOLE)):
            new = supply.fresh(y)
            e2 = rename(e2, y, new)
            y = new
        return AS(Let(y, r.bound, replace_at(s, path, e2)))
    if enabled is RuleName.AJoinIf:
        a, b = replace_at(s, path, r.then), replace_at(s, path, r.orelse)
        if _mutation is Mutation.JOINIF_SWAP:
            a, b = b, a
        return AS(If(r.test, a, b))
    if enabled is RuleName.ABeginSeq:
        return AS(replace_at(s, path, Let(supply.fresh("_"), r.first, r.second)))
    raise SiteError(f"unhandled rule {enabled}")


def boundary_cancel(node: Term) -> Term:
    if isinstance(node, SA) and isinstance(node.body, AS):
        return node.body.body
    if isinstance(node, AS) and isinstance(node.body, SA):
        return node.body.body
    raise SiteError(f"no boundary cancellation at {show(node)}")


def sa_value_step(node: Term) -> Term:
    if not isinstance(node, SA) or not _plain_tgt_value(node.body):
        raise SiteError(f"not SA of a target value: {show(node)}")
    v = node.body
    if isinstance(v, Lam):
        return Lam(v.param, SA(v.body))
    return v


# ---------------------------------------------------------------------------
# the evaluation position


def _src_val(t):
    return isinstance(t, (Int, Bool, Loc, Lam))


def _comp_status(h: Term) -> str:
    if isinstance(h, (App, Op)):
        kids = h.kids()
        if any(isinstance(k, AS) for k in kids):
            return "blocked"
        return "redex" if all(_src_val(k) for k in kids) else "stuck"
    if isinstance(h, If):
        if isinstance(h.test, AS):
            return "blocked"
        return "redex" if _src_val(h.test) else "stuck"
    return "stuck"


def find_eval(t: Term, lang: str, path: tuple = ()):
    """Locate the evaluation position.  Returns ``(status, path, lang)`` with
    status ``value``, ``redex``, ``blocked`` (waiting on a translation or
    boundary step) or ``stuck``."""
    while True:
        if _src_val(t):
            return ("value", path, lang)
        if isinstance(t, Var):
            return ("stuck", path, lang)
        if lang == SOURCE:
            if isinstance(t, SA):
                if _plain_tgt_value(t.body):
                    return ("blocked", path, lang)
                t, path, lang = t.body, path + (0,), TARGET
                continue
            if isinstance(t, AS):
                return ("stuck", path, lang)
            kids = t.kids()
            for i in eval_positions(t):
                if not _src_val(kids[i]):
                    t, path = kids[i], path + (i,)
                    break
            else:
                return ("redex", path, lang)
            continue
        # target: only the let spine is ever inspected
        if isinstance(t, AS):
            r = find_eval(t.body, SOURCE, path + (0,))
            return ("blocked", path, lang) if r[0] == "value" else r
        if isinstance(t, Let):
            h = t.bound
            if _src_val(h) or isinstance(h, Let):
                return ("redex", path, lang)
            if isinstance(h, AS):
                r = find_eval(h.body, SOURCE, path + (0, 0))
                return ("blocked", path, lang) if r[0] == "value" else r
            return (_comp_status(h), path, lang)
        return (_comp_status(t), path, lang)


def lang_at(term: Term, root: str, path) -> str:
    lang = root
    for i in path:
        lang = child_lang(term, lang)
        term = term.kids()[i]
    return lang


def _eval_site(c: Configuration) -> Optional[RedexSite]:
    status, path, lang = find_eval(c.term, c.root)
    if status != "redex":
        return None
    node = term_at(c.term, path)
    r = src_contract(c.heap, node) if lang == SOURCE else tgt_contract(c.heap, node)
    if r is None:
        return None
    if lang == SOURCE:
        rule = RuleName.SrcStep
    elif isinstance(node, Let) and isinstance(node.bound, Let):
        rule = RuleName.LetFlatten
    else:
        rule = RuleName.TgtStep
    return RedexSite(path, rule, node, (), (c.heap, r[0], r[1]))


def eval_status(c: Configuration) -> str:
    return find_eval(c.term, c.root)[0]


# ---------------------------------------------------------------------------
# enumeration and stepping


def _structural_sites(t: Term, lang: str, path: tuple, binders: tuple, out: list,
                      include: frozenset):
    if isinstance(t, AS):
        inner = t.body
        if isinstance(inner, SA):
            if RuleName.CancelAS_SA in include:
                out.append(RedexSite(path, RuleName.CancelAS_SA, t, binders))
        else:
            rule = a_rule(inner)
            if rule is not None and rule in include:
                out.append(RedexSite(path, rule, t, binders))
    elif isinstance(t, SA):
        inner = t.body
        if isinstance(inner, AS):
            if RuleName.CancelSA_AS in include:
                out.append(RedexSite(path, RuleName.CancelSA_AS, t, binders))
        elif _plain_tgt_value(inner):
            rule = RuleName.SAValLam if isinstance(inner, Lam) else RuleName.SAValConst
            if rule in include:
                out.append(RedexSite(path, rule, t, binders))
    inner_lang = child_lang(t, lang)
    if isinstance(t, Lam):
        _structural_sites(t.body, inner_lang, path + (0,), binders + (t.param,), out, include)
        return
    if isinstance(t, Let):
        _structural_sites(t.bound, inner_lang, path + (0,), binders, out, include)
        _structural_sites(t.body, inner_lang, path + (1,), binders + (t.name,), out, include)
        return
    for i, k in enumerate(t.kids()):
        _structural_sites(k, inner_lang, path + (i,), binders, out, include)


ALL_RULES = frozenset(RuleName)


def enumerate_redexes(c: Configuration, include: frozenset = ALL_RULES) -> list:
    """Every enabled site, in preorder of path and then rule order."""
    out: list = []
    if include & EVAL_RULES:
        site = _eval_site(c)
        if site is not None and site.rule in include:
            out.append(site)
    if include - EVAL_RULES:
        _structural_sites(c.term, c.root, (), (), out, include)
    out.sort(key=RedexSite.sort_key)
    return out


def ml_step(c: Configuration, site: RedexSite) -> Configuration:
    try:
        node = term_at(c.term, site.path)
    except (IndexError, AttributeError):
        raise SiteError(f"path {site.path} does not exist") from None
    if node is not site.subterm and node != site.subterm:
        raise SiteError(f"stale site {site.rule.value} at {site.path}")
    rule = site.rule
    heap = c.heap
    if rule in EVAL_RULES:
        if site.payload is not None and site.payload[0] is c.heap:
            _, heap, new = site.payload
        else:
            fresh = _eval_site(c)
            if fresh is None or fresh.path != site.path or fresh.rule is not rule:
                raise SiteError(f"{rule.value} not enabled at {site.path}")
            _, heap, new = fresh.payload
    elif rule in CANCEL_RULES:
        new = boundary_cancel(node)
    elif rule in SA_VALUE_RULES:
        new = sa_value_step(node)
    else:
        new = a_reduce(node, rule)
    return Configuration(heap, replace_at(c.term, site.path, new), c.root)
