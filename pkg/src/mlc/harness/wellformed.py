"""Well-formedness of multi-language configurations.

A syntactic judgment stands in for typing: the term is closed, its root
matches the grammar of the root language (source terms may embed target code
only under SA, target terms may embed source code only under AS), every
location points into the heap, and every heap slot holds a closed value of
the language that stored it.
"""

from __future__ import annotations

from ..machine import Configuration
from ..terms import (AS, SA, SOURCE, Loc, Term, free_vars, is_rt_expr,
                     is_rt_value, is_src_expr, is_src_value, show)


def _locs(t: Term, out: set):
    if isinstance(t, Loc):
        out.add(t.index)
    for k in t.kids():
        _locs(k, out)
    return out


def violations(c: Configuration) -> list:
    """Reasons ``c`` is ill-formed; empty when it is well-formed."""
    out = []
    t = c.term
    fv = free_vars(t)
    if fv:
        out.append(f"free variables {sorted(fv)}")
    ok = is_src_expr(t) if c.root == SOURCE else is_rt_expr(t)
    if not ok:
        out.append(f"root is not a {'source' if c.root == SOURCE else 'target'} term: {show(t)}")
    n = len(c.heap)
    for i in sorted(_locs(t, set())):
        if i >= n:
            out.append(f"dangling location #l{i}")
    for i, cell in enumerate(c.heap.cells):
        for v, lang in cell.slots:
            if isinstance(v, (AS, SA)):
                out.append(f"boundary stored at top of slot in #l{i}")
            elif not (is_src_value(v) if lang == SOURCE else is_rt_value(v)):
                out.append(f"slot of #l{i} is not a {lang} value: {show(v)}")
            if free_vars(v):
                out.append(f"slot of #l{i} is open")
            for j in _locs(v, set()):
                if j >= n:
                    out.append(f"dangling location #l{j} in #l{i}")
    return out


def well_formed(c: Configuration) -> bool:
    return not violations(c)
