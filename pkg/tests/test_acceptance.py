"""Acceptance criteria 1-8 at full scale.  Each test prints one line:

    ACCEPTANCE <n> PASS|FAIL <name>: <evidence>
"""

import time

import pytest

from mlc.harness.checks import (cancellation_terms, check_cancellation,
                                check_confluence, check_full_abstraction,
                                check_normal_forms, check_oracle,
                                correctness_and_subject)
from mlc.harness.gen import GenConfig
from mlc.rewrite import Mutation, mutated

SEED = 42
CFG = GenConfig(seed=SEED, max_size=30)


@pytest.fixture
def report(capsys):
    def emit(n, name, ok, evidence):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'} {name}: {evidence}")
        return ok
    return emit


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


@pytest.fixture(scope="module")
def execution():
    """Criteria 2 and 4 share one batch of runs."""
    return timed(correctness_and_subject, CFG, 1000, 10_000)


def test_1_oracle_equivalence(report):
    rep, dt = timed(check_oracle, CFG, 1000)
    ok = rep.ok and rep.cases == 1000 and dt < 60
    assert report(1, "oracle-equivalence", ok, f"{rep.summary()} time={dt:.1f}s limit=60s")


def test_2_whole_program_correctness(report, execution):
    (corr, _), dt = execution
    ok = corr.ok and corr.cases == 1000 and dt < 180
    assert report(2, "whole-program-correctness", ok,
                  f"{corr.summary()} policies=aot,onapply,random x3 time={dt:.1f}s limit=180s")


def test_3_confluence_sampling(report):
    rep, dt = timed(check_confluence, CFG, 500, join_depth=8)
    ok = rep.ok and rep.cases == 500 and dt < 180
    for f in rep.failures:
        print(f.json())
    assert report(3, "confluence", ok, f"{rep.summary()} join_depth=8 time={dt:.1f}s limit=180s")


def test_4_subject_reduction(report, execution):
    (_, subj), _ = execution
    ok = subj.ok and subj.cases == 1000
    assert report(4, "subject-reduction", ok, f"{subj.summary()}")


def test_5_normal_form_purity(report):
    rep = check_normal_forms(CFG, 1000)
    ok = rep.ok and rep.cases == 1000
    assert report(5, "normal-form-purity", ok, rep.summary())


def test_6_cancellation_identities(report):
    rep = check_cancellation(cancellation_terms(max_size=10, per_size=100))
    assert report(6, "cancellation-identities", rep.ok, rep.summary() + " sizes=1..10")


def test_7_full_abstraction_fuzz(report):
    rep, dt = timed(check_full_abstraction, CFG, 100, 50, fuel=10_000)
    ok = rep.ok and rep.cases == 100 * 50
    assert report(7, "full-abstraction-easy-direction", ok, f"{rep.summary()} time={dt:.1f}s")


def _detectors():
    yield "1", lambda: check_oracle(CFG, 1000)
    both = {}

    def run_both():
        if not both:
            both["r"] = correctness_and_subject(CFG, 1000, 10_000)
        return both["r"]
    yield "2", lambda: run_both()[0]
    yield "3", lambda: check_confluence(CFG, 500, join_depth=8)
    yield "4", lambda: run_both()[1]


@pytest.mark.parametrize("mutation", [Mutation.LIFT_NOT_FRESH, Mutation.TCOMP_SKIP_BOUNDARY,
                                      Mutation.JOINIF_SWAP], ids=lambda m: m.value)
def test_8_negative_controls(report, mutation):
    caught = []
    with mutated(mutation):
        for name, check in _detectors():
            rep = check()
            if not rep.ok:
                caught.append(f"criterion {name} ({len(rep.failures)} findings)")
                break
    assert report(8, f"negative-control[{mutation.value}]", bool(caught),
                  caught[0] if caught else "not detected by criteria 1-4")
