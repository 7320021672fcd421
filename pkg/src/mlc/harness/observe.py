"""Observables of finished runs and canonical keys for configurations."""

from __future__ import annotations

from dataclasses import dataclass

from ..machine import Configuration, Heap, Outcome, Status
from ..terms import AS, SA, SOURCE, TARGET, Bool, Int, Lam, Loc, Term, alpha_key


@dataclass(frozen=True)
class IntVal:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class BoolVal:
    value: bool

    def __str__(self):
        return "#t" if self.value else "#f"


@dataclass(frozen=True)
class ProcTag:
    def __str__(self):
        return "<procedure>"


@dataclass(frozen=True)
class HeapShape:
    """Shape of the data reachable from a location.  ``shape`` is a nested
    tuple; cells are numbered in first-visit order so shared and cyclic
    structure is preserved but concrete addresses are not."""
    shape: tuple

    def __str__(self):
        return _show_shape(self.shape)


@dataclass(frozen=True)
class Divergent:
    def __str__(self):
        return "<divergent>"


@dataclass(frozen=True)
class StuckTag:
    def __str__(self):
        return "<stuck>"


def _value_shape(heap: Heap, v: Term, seen: dict):
    while isinstance(v, (AS, SA)):
        v = v.body
    if isinstance(v, Int):
        return ("int", v.value)
    if isinstance(v, Bool):
        return ("bool", v.value)
    if isinstance(v, Loc):
        if v.index in seen:
            return ("ref", seen[v.index])
        seen[v.index] = len(seen)
        cell = heap.cells[v.index]
        return (cell.kind, seen[v.index]) + tuple(_value_shape(heap, s, seen) for s, _ in cell.slots)
    return ("proc",)


def _show_shape(s: tuple) -> str:
    tag = s[0]
    if tag == "int":
        return str(s[1])
    if tag == "bool":
        return "#t" if s[1] else "#f"
    if tag == "proc":
        return "<procedure>"
    if tag == "ref":
        return f"#{s[1]}#"
    return "(" + " ".join([tag] + [_show_shape(x) for x in s[2:]]) + ")"


def observe(outcome: Outcome):
    """The observable result of a run."""
    if outcome.status is Status.FUEL:
        return Divergent()
    if outcome.status is Status.STUCK:
        return StuckTag()
    c = outcome.config
    v = c.term
    if isinstance(v, Int):
        return IntVal(v.value)
    if isinstance(v, Bool):
        return BoolVal(v.value)
    if isinstance(v, Loc):
        return HeapShape(_value_shape(c.heap, v, {}))
    if isinstance(v, Lam):
        return ProcTag()
    return StuckTag()


# ---------------------------------------------------------------------------
# canonical configuration keys


def _locs_in_order(t: Term, out: list):
    if isinstance(t, Loc):
        out.append(t.index)
    for k in t.kids():
        _locs_in_order(k, out)


class KeyCache:
    """Memoizes the translation normal form of heap closures, which is what
    makes two heaps that differ only in how far a stored closure has been
    translated compare equal."""

    def __init__(self):
        self.closures: dict = {}

    def closure(self, v: Term, lang: str) -> Term:
        key = (v, lang)
        got = self.closures.get(key)
        if got is None:
            from ..strategies import normalize_translations
            got = normalize_translations(AS(v) if lang == SOURCE else v, TARGET)
            self.closures[key] = got
        return got


def config_key(c: Configuration, cache: KeyCache | None = None) -> tuple:
    """Canonical key: equal for configurations that are the same up to
    alpha-renaming, heap address permutation, garbage, and the translation
    state of closures stored in the heap."""
    cache = cache or KeyCache()
    order: list = []
    _locs_in_order(c.term, order)
    locmap: dict = {}
    queue = []
    for i in order:
        if i not in locmap:
            locmap[i] = len(locmap)
            queue.append(i)
    cells = []
    while queue:
        i = queue.pop(0)
        cell = c.heap.cells[i]
        slots = []
        for v, lang in cell.slots:
            if isinstance(v, Lam) or isinstance(v, (AS, SA)):
                v = cache.closure(v, lang)
                lang = TARGET
            more: list = []
            _locs_in_order(v, more)
            for j in more:
                if j not in locmap:
                    locmap[j] = len(locmap)
                    queue.append(j)
            slots.append(v)
        cells.append((cell.kind, tuple(slots)))
    keyed = tuple((kind, tuple(alpha_key(v, locmap) for v in slots)) for kind, slots in cells)
    return (c.root, alpha_key(c.term, locmap), keyed)
