"""Heap, configurations and the primitive contractions both languages share.

The two languages have identical memory models, so ``box``/``cons`` and the
arithmetic primitives are implemented once here.  Each heap slot remembers
which language stored it: a function read back from the other side is
handed out wrapped in the boundary that converts it.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field

from .terms import (AS, SA, SOURCE, App, Bool, If, Int, Lam, Loc, Op, Term,
                    show, substitute)


@dataclass(frozen=True, slots=True)
class Cell:
    kind: str               # "box" or "pair"
    slots: tuple            # ((value, lang), ...)

    def values(self) -> tuple:
        return tuple(v for v, _ in self.slots)


@dataclass(frozen=True, slots=True)
class Heap:
    cells: tuple = ()

    def __len__(self):
        return len(self.cells)

    def __getitem__(self, loc: int) -> Cell:
        return self.cells[loc]

    def alloc(self, cell: Cell) -> tuple["Heap", Loc]:
        return Heap(self.cells + (cell,)), Loc(len(self.cells))

    def update(self, loc: int, cell: Cell) -> "Heap":
        cells = list(self.cells)
        cells[loc] = cell
        return Heap(tuple(cells))

    def show(self) -> str:
        parts = []
        for i, c in enumerate(self.cells):
            parts.append(f"#l{i}=({c.kind} " + " ".join(show(v) for v in c.values()) + ")")
        return "{" + ", ".join(parts) + "}"


EMPTY = Heap()


@dataclass(frozen=True, slots=True)
class Configuration:
    heap: Heap
    term: Term
    root: str = SOURCE      # language of the root position

    def digest(self) -> str:
        text = f"{self.root}|{show(self.term)}|{self.heap.show()}"
        return hashlib.sha1(text.encode()).hexdigest()[:16]


class Status(enum.Enum):
    VALUE = "value"
    STUCK = "stuck"
    FUEL = "fuel-exhausted"


@dataclass
class Outcome:
    status: Status
    config: Configuration
    steps: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def value(self) -> Term:
        return self.config.term


def _read_slot(slot: tuple, lang: str) -> Term:
    v, stored = slot
    if isinstance(v, Lam) and stored != lang:
        return SA(v) if lang == SOURCE else AS(v)
    return v


def _eqv(a: Term, b: Term):
    if isinstance(a, Lam) or isinstance(b, Lam):
        return None
    if type(a) is not type(b):
        return Bool(False)
    if isinstance(a, Loc):
        return Bool(a.index == b.index)
    return Bool(a.value == b.value)


def contract(heap: Heap, node: Term, lang: str):
    """Contract an application, ``if`` or operation whose operands are
    values.  Returns ``(heap, term)`` or ``None`` when the redex is stuck."""
    if isinstance(node, App):
        if isinstance(node.fn, Lam):
            return heap, substitute(node.fn.body, node.fn.param, node.arg, lang)
        return None
    if isinstance(node, If):
        if isinstance(node.test, Bool):
            return heap, node.then if node.test.value else node.orelse
        return None
    if not isinstance(node, Op):
        return None
    op, args = node.op, node.args
    if op in ("+", "-", "*", "<"):
        a, b = args
        if not (isinstance(a, Int) and isinstance(b, Int)):
            return None
        if op == "+":
            return heap, Int(a.value + b.value)
        if op == "-":
            return heap, Int(a.value - b.value)
        if op == "*":
            return heap, Int(a.value * b.value)
        return heap, Bool(a.value < b.value)
    if op == "eq?":
        r = _eqv(*args)
        return None if r is None else (heap, r)
    if op == "box":
        return heap.alloc(Cell("box", ((args[0], lang),)))
    if op == "cons":
        return heap.alloc(Cell("pair", ((args[0], lang), (args[1], lang))))
    loc = args[0]
    if not isinstance(loc, Loc) or loc.index >= len(heap):
        return None
    cell = heap[loc.index]
    if op == "unbox" and cell.kind == "box":
        return heap, _read_slot(cell.slots[0], lang)
    if op == "set-box!" and cell.kind == "box":
        return heap.update(loc.index, Cell("box", ((args[1], lang),))), args[1]
    if op == "car" and cell.kind == "pair":
        return heap, _read_slot(cell.slots[0], lang)
    if op == "cdr" and cell.kind == "pair":
        return heap, _read_slot(cell.slots[1], lang)
    return None
