"""Command-line entry point: ``mlc compile``, ``mlc run`` and ``mlc check``."""

from __future__ import annotations

import argparse
import os
import sys

from .harness.checks import (check_confluence, check_full_abstraction,
                             check_oracle, correctness_and_subject)
from .harness.gen import GenConfig
from .harness.observe import observe
from .machine import EMPTY, Configuration, Status
from .rewrite import Mutation, enumerate_redexes, mutated
from .sexpr import ParseError, ScopeError, parse_program
from .strategies import (AOT_THEN_RUN, EAGER, INTERP_ONLY, TRANSLATE_ON_APPLY,
                         StepBudgetExceeded, random_interleave, run)
from .terms import show

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FUEL, EXIT_STUCK = 0, 1, 2, 3, 4


def _emit(text: str):
    """Write to stdout; a reader that went away (``| head``) is not an error."""
    try:
        sys.stdout.write(text)
        sys.stdout.flush()
    except BrokenPipeError:
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())


def _load(path: str):
    try:
        with open(path) as f:
            return parse_program(f.read())
    except (ParseError, ScopeError) as e:
        print(f"mlc: {path}: {e}", file=sys.stderr)
    except OSError as e:
        print(f"mlc: {e}", file=sys.stderr)
    return None


def cmd_compile(args) -> int:
    from .strategies import compile_aot
    prog = _load(args.file)
    if prog is None:
        return EXIT_USAGE
    try:
        out = compile_aot(prog)
    except StepBudgetExceeded as e:
        print(f"mlc: {e}", file=sys.stderr)
        return EXIT_FUEL
    with open(args.output, "w") as f:
        f.write(show(out) + "\n")
    return EXIT_OK


def _policy(args):
    if args.mode == "interp":
        return INTERP_ONLY
    if args.mode == "aot":
        return AOT_THEN_RUN
    if args.policy == "eager":
        return EAGER
    if args.policy == "random":
        return random_interleave(args.p_translate, args.seed)
    return TRANSLATE_ON_APPLY


def cmd_run(args) -> int:
    prog = _load(args.file)
    if prog is None:
        return EXIT_USAGE
    fuel = args.n if args.list_redexes else args.fuel
    try:
        outcome, trace = run(Configuration(EMPTY, prog), _policy(args), fuel)
    except StepBudgetExceeded as e:
        print(f"mlc: {e}", file=sys.stderr)
        return EXIT_FUEL
    if args.trace:
        with open(args.trace, "w") as f:
            f.write(trace.jsonl(args.trace_terms))
    if args.list_redexes:
        c = outcome.config
        lines = [f"after {outcome.steps} steps: {show(c.term)}"]
        lines += [f"{s.rule.value} {list(s.path)} {show(s.subterm)}" for s in enumerate_redexes(c)]
        _emit("\n".join(lines) + "\n")
        return EXIT_OK
    _emit(f"{observe(outcome)}\n")
    return {Status.VALUE: EXIT_OK, Status.FUEL: EXIT_FUEL, Status.STUCK: EXIT_STUCK}[outcome.status]


def cmd_check(args) -> int:
    if args.count < 0 or args.size < 1 or args.join_depth < 1 or args.fuel < 1 or args.contexts < 0:
        print("mlc: --count and --contexts must be >= 0; --size, --join-depth and --fuel >= 1",
              file=sys.stderr)
        return EXIT_USAGE
    cfg = GenConfig(seed=args.seed, max_size=args.size)
    with mutated(Mutation(args.mutation)):
        if args.kind == "oracle":
            rep = check_oracle(cfg, args.count)
        elif args.kind == "confluence":
            rep = check_confluence(cfg, args.count, args.join_depth)
        elif args.kind == "ctxequiv":
            rep = check_full_abstraction(cfg, args.count, args.contexts, args.fuel)
        else:
            corr, subj = correctness_and_subject(cfg, args.count, args.fuel,
                                                 track_wf=args.kind == "subject")
            rep = corr if args.kind == "correctness" else subj
    _emit(rep.summary() + "\n" + rep.jsonl())
    if args.findings:
        with open(args.findings, "w") as f:
            f.write(rep.jsonl())
    return EXIT_OK if rep.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mlc", description="Compilation as multi-language semantics.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile a source program to ANF")
    c.add_argument("file")
    c.add_argument("-o", "--output", required=True)
    c.set_defaults(func=cmd_compile)

    r = sub.add_parser("run", help="run a source program")
    r.add_argument("file")
    r.add_argument("--mode", choices=["interp", "aot", "jit"], default="jit")
    r.add_argument("--policy", choices=["eager", "onapply", "random"], default="onapply")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--p-translate", type=float, default=0.5)
    r.add_argument("--fuel", type=int, default=10_000)
    r.add_argument("--trace", metavar="FILE")
    r.add_argument("--trace-terms", action="store_true")
    r.add_argument("--list-redexes", action="store_true",
                   help="take --n policy steps, then list every enabled site")
    r.add_argument("--n", type=int, default=0)
    r.set_defaults(func=cmd_run)

    k = sub.add_parser("check", help="run a property checker")
    k.add_argument("kind", choices=["confluence", "correctness", "subject", "oracle", "ctxequiv"])
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--count", type=int, default=1000)
    k.add_argument("--size", type=int, default=30)
    k.add_argument("--join-depth", type=int, default=8)
    k.add_argument("--fuel", type=int, default=10_000)
    k.add_argument("--contexts", type=int, default=50)
    k.add_argument("--findings", metavar="FILE", help="also write findings as JSON lines")
    k.add_argument("--mutation", choices=[m.value for m in Mutation], default="none",
                   help="run against a deliberately broken rule (negative control)")
    k.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
