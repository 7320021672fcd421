"""Seeded, type-directed generation of closed source programs and contexts.

Programs are generated against a small simple type discipline so that most of
them run to a value; ``ill_typed_rate`` occasionally plants a wrongly typed
leaf to exercise stuck states.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..terms import (HOLE, App, Begin, Bool, If, Int, Lam, Let, Op, Term, Var,
                     replace_at, term_at)

INT, BOOL = "int", "bool"

OMEGA = App(Lam("w", App(Var("w"), Var("w"))), Lam("w", App(Var("w"), Var("w"))))


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_size: int = 30
    max_if_depth: int = 3
    allow_effects: bool = True
    ill_typed_rate: float = 0.02
    diverge_rate: float = 0.0     # chance an if-branch is replaced by a divergent term

    def derive(self, i: int, **changes) -> "GenConfig":
        """Config for the ``i``-th case of a batch seeded by this one."""
        fields = dict(self.__dict__)
        fields["seed"] = self.seed * 1_000_003 + i
        fields.update(changes)
        return GenConfig(**fields)


def min_size(ty) -> int:
    if ty in (INT, BOOL):
        return 1
    if ty[0] == "fun":
        return 1 + min_size(ty[2])
    if ty[0] == "box":
        return 1 + min_size(ty[1])
    return 1 + min_size(ty[1]) + min_size(ty[2])


def show_type(ty) -> str:
    if isinstance(ty, str):
        return ty
    return "(" + " ".join([ty[0]] + [show_type(t) for t in ty[1:]]) + ")"


class _Gen:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.names = 0

    def fresh(self, base: str) -> str:
        self.names += 1
        return f"{base}{self.names}"

    def rand_type(self, budget: int, depth: int = 0):
        r = self.rng.random()
        options = [(INT, 5), (BOOL, 2)]
        if depth < 2:
            options.append((("fun", INT, INT), 2))
            options.append((("pair", INT, INT), 1))
            options.append((("fun", INT, ("fun", INT, INT)), 0.5))
            if self.cfg.allow_effects:
                options.append((("box", INT), 2))
                options.append((("box", ("fun", INT, INT)), 0.3))
                options.append((("pair", ("box", INT), BOOL), 0.3))
        options = [(t, w) for t, w in options if min_size(t) <= budget] or [(INT, 1)]
        total = sum(w for _, w in options)
        r *= total
        for t, w in options:
            r -= w
            if r < 0:
                return t
        return options[0][0]

    def split(self, budget: int, mins: list) -> list:
        """Divide ``budget`` among children, each at least its minimum."""
        extra = budget - sum(mins)
        parts = list(mins)
        for _ in range(max(0, extra)):
            if self.rng.random() < 0.85:
                parts[self.rng.randrange(len(parts))] += 1
        return parts

    # -- leaves --------------------------------------------------------------

    def const(self, ty, env, budget, d=0):
        if ty == INT:
            return Int(self.rng.randint(-3, 9))
        if ty == BOOL:
            return Bool(self.rng.random() < 0.5)
        if ty[0] == "fun":
            x = self.fresh("x")
            return Lam(x, self.gen(ty[2], {**env, x: ty[1]}, budget - 1, d))
        if ty[0] == "box":
            return Op("box", (self.gen(ty[1], env, budget - 1, d),))
        a, b = self.split(budget - 1, [min_size(ty[1]), min_size(ty[2])])
        return Op("cons", (self.gen(ty[1], env, a, d), self.gen(ty[2], env, b, d)))

    def leaf(self, ty, env, budget, d=0):
        if self.rng.random() < self.cfg.ill_typed_rate:
            return Bool(True) if ty == INT else Int(self.rng.randint(0, 3))
        vars_ = [x for x, t in env.items() if t == ty]
        if vars_ and self.rng.random() < 0.7:
            return Var(self.rng.choice(sorted(vars_)))
        return self.const(ty, env, budget, d)

    # -- compound forms -------------------------------------------------------

    def gen(self, ty, env: dict, budget: int, if_depth: int) -> Term:
        budget = max(budget, min_size(ty))
        if budget <= min_size(ty) or self.rng.random() < 0.12:
            return self.leaf(ty, env, budget, if_depth)
        rem = budget - 1
        m = min_size(ty)
        opts = []
        if rem >= 1 + m:
            opts += ["let"] * 3
        if rem >= 2 + m:
            opts += ["app_lam"] * 2
        if rem >= 1 + m and (self.cfg.allow_effects or self.rng.random() < 0.5):
            opts.append("begin")
        if if_depth < self.cfg.max_if_depth and rem >= 1 + 2 * m:
            opts += ["if"] * 2
        funs = [x for x, t in env.items() if isinstance(t, tuple) and t[0] == "fun" and t[2] == ty]
        if funs and rem >= 2:
            opts += ["app_var"] * 3
        if ty == INT and rem >= 2:
            opts += ["arith"] * 4
            if rem >= 3:
                opts += ["car"]
            if self.cfg.allow_effects:
                opts += ["unbox"] * 2
        if ty == BOOL and rem >= 2:
            opts += ["cmp"] * 3
        if isinstance(ty, tuple):
            opts += [ty[0]] * 4
        if not opts:
            return self.leaf(ty, env, budget, if_depth)
        kind = self.rng.choice(opts)
        return getattr(self, "_" + kind)(ty, env, rem, if_depth)

    def _let(self, ty, env, rem, d):
        bty = self.rand_type(rem - min_size(ty))
        a, b = self.split(rem, [min_size(bty), min_size(ty)])
        x = self.fresh("v")
        bound = self.gen(bty, env, a, d)
        return Let(x, bound, self.gen(ty, {**env, x: bty}, b, d))

    def _app_lam(self, ty, env, rem, d):
        aty = self.rand_type(rem - 1 - min_size(ty))
        body_b, arg_b = self.split(rem - 1, [min_size(ty), min_size(aty)])
        x = self.fresh("y")
        body = self.gen(ty, {**env, x: aty}, body_b, d)
        return App(Lam(x, body), self.gen(aty, env, arg_b, d))

    def _app_var(self, ty, env, rem, d):
        funs = sorted(x for x, t in env.items()
                      if isinstance(t, tuple) and t[0] == "fun" and t[2] == ty)
        f = self.rng.choice(funs)
        return App(Var(f), self.gen(env[f][1], env, rem - 1, d))

    def _begin(self, ty, env, rem, d):
        boxes = sorted(x for x, t in env.items() if isinstance(t, tuple) and t[0] == "box")
        first_b, second_b = self.split(rem, [1, min_size(ty)])
        if boxes and self.cfg.allow_effects and first_b >= 2 and self.rng.random() < 0.7:
            b = self.rng.choice(boxes)
            first = Op("set-box!", (Var(b), self.gen(env[b][1], env, first_b - 2, d)))
        else:
            fty = self.rand_type(first_b)
            first = self.gen(fty, env, first_b, d)
        return Begin(first, self.gen(ty, env, second_b, d))

    def _if(self, ty, env, rem, d):
        c, a, b = self.split(rem, [1, min_size(ty), min_size(ty)])
        test = self.gen(BOOL, env, c, d + 1)
        then, orelse = self.gen(ty, env, a, d + 1), self.gen(ty, env, b, d + 1)
        if self.cfg.diverge_rate and self.rng.random() < self.cfg.diverge_rate:
            if self.rng.random() < 0.5:
                then = OMEGA
            else:
                orelse = OMEGA
        return If(test, then, orelse)

    def _arith(self, ty, env, rem, d):
        a, b = self.split(rem, [1, 1])
        op = self.rng.choice(["+", "+", "-", "*"])
        return Op(op, (self.gen(INT, env, a, d), self.gen(INT, env, b, d)))

    def _cmp(self, ty, env, rem, d):
        a, b = self.split(rem, [1, 1])
        op = self.rng.choice(["<", "eq?"])
        return Op(op, (self.gen(INT, env, a, d), self.gen(INT, env, b, d)))

    def _car(self, ty, env, rem, d):
        other = INT if rem < 4 else self.rand_type(rem - 2, depth=2)
        if self.rng.random() < 0.5:
            return Op("car", (self.gen(("pair", INT, other), env, rem, d),))
        return Op("cdr", (self.gen(("pair", other, INT), env, rem, d),))

    def _unbox(self, ty, env, rem, d):
        return Op("unbox", (self.gen(("box", INT), env, rem, d),))

    def _fun(self, ty, env, rem, d):
        x = self.fresh("x")
        return Lam(x, self.gen(ty[2], {**env, x: ty[1]}, rem, d))

    def _box(self, ty, env, rem, d):
        return Op("box", (self.gen(ty[1], env, rem, d),))

    def _pair(self, ty, env, rem, d):
        a, b = self.split(rem, [min_size(ty[1]), min_size(ty[2])])
        return Op("cons", (self.gen(ty[1], env, a, d), self.gen(ty[2], env, b, d)))


def gen_typed(cfg: GenConfig, ty=None):
    """``(program, type)`` for a closed program of at most ``cfg.max_size`` nodes."""
    g = _Gen(cfg)
    budget = max(1, cfg.max_size)
    if ty is None:
        ty = g.rand_type(budget)
    return g.gen(ty, {}, budget, 0), ty


def gen_program(cfg: GenConfig) -> Term:
    return gen_typed(cfg)[0]


def _var_paths(t: Term, name: str, path=()):
    if isinstance(t, Var) and t.name == name:
        yield path
    for i, k in enumerate(t.kids()):
        yield from _var_paths(k, name, path + (i,))


def gen_context(cfg: GenConfig, hole_type=INT) -> Term:
    """A closed program with exactly one hole (``terms.HOLE``) where a term of
    ``hole_type`` fits.  The hole may land under binders."""
    g = _Gen(cfg)
    h = "hole0"
    budget = max(2, cfg.max_size)
    ty = g.rand_type(budget)
    body = g.gen(ty, {h: hole_type}, budget, 0)
    paths = list(_var_paths(body, h))
    if not paths or g.rng.random() < 0.25:
        return Let(h, HOLE, body)
    chosen = g.rng.choice(paths)
    for p in paths:
        if p != chosen:
            body = replace_at(body, p, g.const(hole_type, {}, min_size(hole_type) + 1))
    return replace_at(body, chosen, HOLE)


def plug(ctx: Term, t: Term) -> Term:
    """Fill the hole; no renaming, contexts may capture."""
    for p in _var_paths(ctx, HOLE.name):
        return replace_at(ctx, p, t)
    raise ValueError("context has no hole")


__all__ = ["GenConfig", "gen_program", "gen_typed", "gen_context", "plug", "OMEGA",
           "term_at"]
