#!/usr/bin/env python3
"""
Tests for model execution, trace reuse and the trans-dimensional correction.
Run with ``python test_trace.py`` or ``pytest``.
"""

import math
import os
import sys
import logging

import pytest

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.models import programs
from src.runtime.distributions import InverseGamma, Normal, Poisson
from src.runtime.trace import (
    Address,
    Chain,
    fresh_records,
    run_model,
    stale_records,
    transdim_correction,
)

# Configure logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

M = Address("m", 0)
V = Address("v", 0)


def _switching_program(ctx):
    """Samples 'z' from a Normal or a Poisson depending on 'flag'."""
    flag = ctx.sample_at("flag", Normal(0.0, 1.0))
    dist = Normal(0.0, 1.0) if flag < 0 else Poisson(3.0)
    ctx.predict("z", ctx.sample_at("z", dist))


def test_normal_mean_1_log_likelihood():
    chain = Chain(0)
    trace = run_model(programs.normal_mean_1, forced=(M, 0.0), chain=chain)
    assert trace.total_ll == pytest.approx(-0.918938533 + (-0.918938533 - 12.5), abs=1e-8)
    assert trace.observes_ll == pytest.approx(-0.918938533 - 12.5, abs=1e-8)
    assert trace.predicts["m"] == 0.0


def test_each_execution_costs_one_ll_evaluation():
    chain = Chain(1)
    for expected in range(1, 6):
        run_model(programs.normal_mean_2, chain=chain)
        assert chain.ll_count == expected


def test_replay_is_deterministic():
    chain = Chain(2)
    for prog in (programs.normal_mean_3, programs.branching, programs.hmm, programs.marsaglia):
        first = run_model(prog, chain=chain)
        replay = run_model(prog, first.choices, chain=chain)
        again = run_model(prog, first.choices, chain=chain)
        assert [r.value for r in replay.choices.values()] == [r.value for r in first.choices.values()]
        assert replay.total_ll == first.total_ll == again.total_ll
        assert not any(r.fresh for r in replay.choices.values())


def test_normal_mean_3_dimension_depends_on_sign():
    chain = Chain(3)
    positive = run_model(programs.normal_mean_3, forced=(M, 1.0), chain=chain)
    negative = run_model(programs.normal_mean_3, forced=(M, -1.0), chain=chain)
    assert positive.size == 1
    assert negative.size == 2
    assert V in negative.choices


def test_marsaglia_addresses_come_in_pairs():
    chain = Chain(4)
    for _ in range(50):
        trace = run_model(programs.marsaglia, chain=chain)
        xs = [a for a in trace.choices if a.base == "x"]
        ys = [a for a in trace.choices if a.base == "y"]
        assert len(xs) == len(ys)
        assert trace.size == 2 * len(xs)
        assert [a.occurrence for a in xs] == list(range(len(xs)))


def test_out_of_support_value_aborts_execution():
    chain = Chain(5)
    trace = run_model(programs.gauss_mean_hard, forced=(M, -1.0), chain=chain)
    assert not trace.is_possible
    assert trace.total_ll == -math.inf
    assert trace.size == 1
    assert "m" not in trace.predicts
    assert chain.ll_count == 1


def test_zero_rate_branch_is_impossible():
    chain = Chain(6)
    base = run_model(programs.branching, forced=(Address("pois1", 0), 0), chain=chain)
    trace = run_model(programs.branching, base.choices, forced=(Address("pois2", 0), 0), chain=chain)
    assert trace.value("pois1") == 0
    assert trace.total_ll == -math.inf
    assert not trace.is_possible


def test_variant_change_draws_fresh():
    chain = Chain(7)
    normal_branch = run_model(_switching_program, forced=(Address("flag", 0), -1.0), chain=chain)
    poisson_branch = run_model(
        _switching_program, normal_branch.choices, forced=(Address("flag", 0), 1.0), chain=chain
    )
    z = Address("z", 0)
    assert poisson_branch.choices[z].fresh
    assert isinstance(poisson_branch.choices[z].dist, Poisson)
    # z changed variant, so it is both stale and fresh
    assert [r.address for r in stale_records(normal_branch, poisson_branch, Address("flag", 0))] == [z]
    assert [r.address for r in fresh_records(normal_branch, poisson_branch, Address("flag", 0))] == [z]


def test_stale_fresh_duality_and_correction():
    chain = Chain(8)
    old = run_model(programs.normal_mean_3, forced=(M, -1.0), chain=chain)
    new = run_model(programs.normal_mean_3, old.choices, forced=(M, 1.0), chain=chain)

    assert [r.address for r in stale_records(old, new, M)] == [V]
    assert fresh_records(old, new, M) == []
    assert fresh_records(new, old, M) == stale_records(old, new, M)

    v = old.value("v")
    expected = math.log(2) + InverseGamma(3.0, 1.0).log_prob(v) - math.log(1)
    assert transdim_correction(old, new, M) == pytest.approx(expected, abs=1e-12)
    assert transdim_correction(new, old, M) == -transdim_correction(old, new, M)


def test_fresh_cache_fixes_new_draws_within_a_move():
    chain = Chain(9)
    old = run_model(programs.normal_mean_3, forced=(M, 1.0), chain=chain)
    cache = {}
    first = run_model(programs.normal_mean_3, old.choices, forced=(M, -0.5), chain=chain, fresh=cache)
    second = run_model(programs.normal_mean_3, old.choices, forced=(M, -1.5), chain=chain, fresh=cache)
    assert first.choices[V].fresh and second.choices[V].fresh
    assert first.value("v") == second.value("v")


def test_trace_is_read_only():
    trace = run_model(programs.normal_mean_1, chain=Chain(10))
    with pytest.raises(TypeError):
        trace.choices[M] = None


def main():
    """Run every test and report a summary."""
    logger.info("🧪 Trace tests")
    logger.info("=" * 50)

    tests = [
        ("NormalMean1 log-likelihood", test_normal_mean_1_log_likelihood),
        ("LL-evaluation counter", test_each_execution_costs_one_ll_evaluation),
        ("Replay determinism", test_replay_is_deterministic),
        ("NormalMean3 dimensionality", test_normal_mean_3_dimension_depends_on_sign),
        ("Marsaglia addressing", test_marsaglia_addresses_come_in_pairs),
        ("Early abort", test_out_of_support_value_aborts_execution),
        ("Zero-rate branch", test_zero_rate_branch_is_impossible),
        ("Variant change", test_variant_change_draws_fresh),
        ("Stale/fresh duality", test_stale_fresh_duality_and_correction),
        ("Fresh cache", test_fresh_cache_fixes_new_draws_within_a_move),
        ("Read-only traces", test_trace_is_read_only),
    ]

    passed = 0
    for name, test in tests:
        try:
            test()
            logger.info(f"✅ {name}: PASSED")
            passed += 1
        except Exception as e:
            logger.error(f"❌ {name}: FAILED - {e}")

    logger.info(f"📊 Test Results: {passed}/{len(tests)} tests passed")
    if passed != len(tests):
        sys.exit(1)


if __name__ == "__main__":
    main()
