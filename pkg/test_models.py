#!/usr/bin/env python3
"""
Tests for the benchmark models, their oracles and the Iris loader.
Run with ``python test_models.py`` or ``pytest``.
"""

import math
import os
import sys
import logging
import tempfile

import numpy as np
import pytest

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.errors import DatasetError, DatasetParseError, OracleCoverageError, UnknownModelError
from src.models import benchmarks, oracles, programs
from src.models.benchmarks import BenchmarkModel, get_model, list_models
from src.models.iris import load_iris
from src.runtime.distributions import Normal, Poisson
from src.runtime.trace import Address, Chain, run_model

# Configure logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

IRIS_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "iris.csv")


def _iris_lines():
    with open(IRIS_FILE) as handle:
        return [line for line in handle if line.strip()]


def test_grid_matches_closed_form():
    grid = oracles.grid_posterior(oracles.normal_mean_1_log_density, oracles.NORMAL_MEAN_GRID)
    exact = Normal(2.5, math.sqrt(0.5))
    assert np.max(np.abs(grid.cdf(grid.grid) - exact.cdf(grid.grid))) < 1e-4
    assert grid.mean == pytest.approx(2.5, abs=1e-6)


def test_normal_mean_3_grid_is_normalized():
    model = benchmarks.normal_mean_3()
    assert model.oracle.total_mass() == pytest.approx(1.0, abs=1e-6)
    assert model.oracle.cdf(-10.0) == 0.0
    assert model.oracle.cdf(10.0) == 1.0


def test_variance_integral_matches_student_t():
    m = np.array([-3.0, -1.0, 0.0, 2.5, 5.0])
    numeric = oracles.variance_integrated_log_likelihood(m)
    closed = oracles.student_t_log_likelihood(m)
    assert np.allclose(numeric, closed, atol=1e-6)


def test_narrow_grid_raises_coverage_error():
    with pytest.raises(OracleCoverageError):
        oracles.grid_posterior(oracles.normal_mean_1_log_density, oracles.GridSpec(-1.0, 1.0, 0.001))


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        oracles.GridSpec(1.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        oracles.GridSpec(0.0, 1.0, 0.0)


def test_conjugate_oracles():
    assert benchmarks.normal_mean_1().oracle.mean == pytest.approx(2.5)
    assert benchmarks.normal_mean_1().oracle.variance == pytest.approx(0.5)
    marsaglia = benchmarks.marsaglia().oracle
    assert marsaglia.mean == pytest.approx(7.25)
    assert marsaglia.variance == pytest.approx(5.0 / 6.0)


def test_branching_enumeration():
    oracle = oracles.branching_posterior()
    assert oracle.probs.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(oracle.probs >= 0.0)
    # above the threshold the likelihood is constant, so the prior ratio survives
    prior = Poisson(4.0)
    expected = math.exp(prior.log_prob(5) - prior.log_prob(6))
    assert oracle.probs[5] / oracle.probs[6] == pytest.approx(expected, rel=1e-9)
    assert oracle.pmf_on([0, len(oracle.probs) + 3])[1] == 0.0


def test_hmm_oracles_agree():
    enumerated = oracles.hmm_path_marginals()
    recursed = oracles.hmm_forward_backward()
    assert enumerated.tables.shape == (10, 3)
    assert np.allclose(enumerated.tables.sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(enumerated.tables, recursed.tables, atol=1e-10)
    # the -5.0 observation favours the state with emission mean -1
    assert np.argmax(recursed.tables[5]) == 0


def test_fibonacci():
    assert [programs.fibonacci(n) for n in range(8)] == [0, 1, 1, 2, 3, 5, 8, 13]
    assert programs.fibonacci(12) == 144


def test_models_are_trans_dimensional():
    chain = Chain(0)
    for prog in (programs.normal_mean_3, programs.branching, programs.marsaglia):
        sizes = {run_model(prog, chain=chain).size for _ in range(300)}
        assert len(sizes) >= 2


def test_normal_mean_3_positive_branch_has_one_choice():
    trace = run_model(programs.normal_mean_3, forced=(Address("m", 0), 1.0), chain=Chain(1))
    assert trace.size == 1


def test_programs_are_pure():
    chain = Chain(2)
    for name in ("gauss_mean_easy", "gauss_mean_hard", "normal_mean_1", "branching_full", "hmm", "marsaglia"):
        prog = getattr(programs, name)
        first = run_model(prog, chain=chain)
        a = run_model(prog, first.choices, chain=chain)
        b = run_model(prog, first.choices, chain=chain)
        assert a.total_ll == b.total_ll
        assert [r.value for r in a.choices.values()] == [r.value for r in b.choices.values()]


def test_classifier_programs():
    chain = Chain(3)
    logistic = get_model("logistic_regression_setosa")
    trace = run_model(logistic.program, chain=chain)
    assert trace.size == 5
    assert trace.predicts["probs"].shape == (150,)
    assert logistic.labels.sum() == 50

    nn = get_model("bayes_nn_versicolor")
    trace = run_model(nn.program, chain=chain)
    assert trace.size == 33
    assert np.all((trace.predicts["probs"] >= 0.0) & (trace.predicts["probs"] <= 1.0))


def test_registry():
    names = list_models()
    assert "normal_mean_3" in names
    assert "bayes_nn_virginica" in names
    assert "logistic_regression_versicolor" in names
    assert get_model("branching_full").oracle is get_model("branching").oracle
    with pytest.raises(UnknownModelError):
        get_model("dp_mixture")
    with pytest.raises(UnknownModelError):
        get_model("bayes_nn_daisy")


def test_metric_must_match_oracle():
    with pytest.raises(ValueError):
        BenchmarkModel("bad", programs.normal_mean_1, oracles.branching_posterior(), ("m",), "KS")
    with pytest.raises(ValueError):
        BenchmarkModel("bad", programs.normal_mean_1, None, ("m",), "MSE")


def test_load_bundled_iris():
    dataset = load_iris(IRIS_FILE)
    assert len(dataset) == 150
    assert dataset.class_counts() == {"setosa": 50, "versicolor": 50, "virginica": 50}
    assert tuple(dataset.features[0]) == (5.1, 3.5, 1.4, 0.2)
    assert dataset.labels[0] == "setosa"


def test_iris_wrong_row_count():
    lines = _iris_lines()
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "iris.csv")
        with open(path, "w") as handle:
            handle.writelines(lines[:-1])
        with pytest.raises(DatasetError):
            load_iris(path)


def test_iris_malformed_row_reports_line():
    lines = _iris_lines()
    lines[2] = "4.7,3.2,oops,0.2,Iris-setosa\n"
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "iris.csv")
        with open(path, "w") as handle:
            handle.writelines(lines)
        with pytest.raises(DatasetParseError) as info:
            load_iris(path)
    assert info.value.line_number == 3
    assert ":3:" in str(info.value)


def main():
    """Run every test and report a summary."""
    logger.info("🧪 Model and oracle tests")
    logger.info("=" * 50)

    tests = [
        ("Grid against closed form", test_grid_matches_closed_form),
        ("NormalMean3 normalization", test_normal_mean_3_grid_is_normalized),
        ("Variance integral against Student-t", test_variance_integral_matches_student_t),
        ("Grid coverage", test_narrow_grid_raises_coverage_error),
        ("Grid validation", test_grid_spec_validation),
        ("Conjugate oracles", test_conjugate_oracles),
        ("Branching enumeration", test_branching_enumeration),
        ("HMM oracles", test_hmm_oracles_agree),
        ("Fibonacci", test_fibonacci),
        ("Trans-dimensional models", test_models_are_trans_dimensional),
        ("NormalMean3 positive branch", test_normal_mean_3_positive_branch_has_one_choice),
        ("Program purity", test_programs_are_pure),
        ("Classifier programs", test_classifier_programs),
        ("Registry", test_registry),
        ("Metric and oracle agreement", test_metric_must_match_oracle),
        ("Bundled Iris", test_load_bundled_iris),
        ("Iris row count", test_iris_wrong_row_count),
        ("Iris parse errors", test_iris_malformed_row_reports_line),
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
