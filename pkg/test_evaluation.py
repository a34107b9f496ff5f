#!/usr/bin/env python3
"""
Tests for the convergence metrics, the experiment runner, CSV reporting and
the command-line interface.
Run with ``python test_evaluation.py`` or ``pytest``.
"""

import math
import os
import sys
import logging
import tempfile

import numpy as np
import pytest
from scipy import stats

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.cli.main import main as cli_main
from src.evaluation.experiment import (
    ConvergenceCurve,
    QuartileSummary,
    compute_curve,
    default_checkpoints,
    pmf_kl,
    quartiles,
    run_experiment,
)
from src.evaluation.metrics import empirical_pmf, kl_divergence, ks_statistic, mse
from src.evaluation.reporting import emit_csv, flatten_predicts, posterior_histogram
from src.inference.samples import Sample
from src.inference.scheduler import KernelSpec, run_inference
from src.models import benchmarks
from src.models.oracles import PmfOracle

# Configure logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def _read(path):
    with open(path) as handle:
        return handle.read()


def test_ks_statistic_examples():
    uniform = stats.uniform(0.0, 4.0).cdf
    assert ks_statistic([1.0, 2.0, 3.0], uniform) == pytest.approx(0.25)
    assert ks_statistic([2.0], uniform) == pytest.approx(0.5)

    n = 40
    normal = stats.norm(0.0, 1.0)
    points = normal.ppf((np.arange(1, n + 1) - 0.5) / n)
    assert ks_statistic(points, normal.cdf) == pytest.approx(0.5 / n)

    with pytest.raises(ValueError):
        ks_statistic([], uniform)


def test_ks_statistic_is_bounded():
    rng = np.random.default_rng(0)
    value = ks_statistic(rng.normal(5.0, 1.0, 100), stats.norm(0.0, 1.0).cdf)
    assert 0.0 <= value <= 1.0


def test_kl_divergence_examples():
    assert kl_divergence([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]) == 0.0
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2))
    assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf
    with pytest.raises(ValueError):
        kl_divergence([1.0], [0.5, 0.5])


def test_empirical_pmf():
    assert np.allclose(empirical_pmf([0, 0, 1, 3], 4), [0.5, 0.25, 0.0, 0.25])
    with pytest.raises(ValueError):
        empirical_pmf([0, 5], 4)


def test_pmf_kl_extends_support():
    oracle = PmfOracle(np.array([0.5, 0.5]))
    assert pmf_kl(np.array([0, 1, 0, 1]), oracle) == 0.0
    assert pmf_kl(np.array([0, 1, 2]), oracle) == math.inf


def test_mse_examples():
    assert mse([0.0, 1.0], [0, 1]) == 0.0
    assert mse([0.5, 0.5, 0.5], [0, 1, 1]) == pytest.approx(0.25)
    assert mse([1.0, 0.0], [0, 1]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        mse([0.5], [0, 1])


def test_quartiles():
    assert quartiles([0.0, 1.0, 2.0, 3.0, 4.0]) == (1.0, 2.0, 3.0)
    assert quartiles([0.3]) == (0.3, 0.3, 0.3)
    p25, median, p75 = quartiles([0.1, math.inf, math.inf])
    assert median == math.inf and p75 == math.inf
    assert p25 <= median <= p75
    assert all(math.isnan(q) for q in quartiles([math.nan]))


def test_default_checkpoints():
    checkpoints = default_checkpoints(10000)
    assert checkpoints[0] == 100
    assert checkpoints[-1] == 10000
    assert len(checkpoints) <= 20
    assert all(b > a for a, b in zip(checkpoints, checkpoints[1:]))
    assert default_checkpoints(50)[0] == 1


def test_curve_uses_every_sample_up_to_checkpoint():
    model = benchmarks.normal_mean_1()
    samples = [Sample(c, {"m": m}) for c, m in ((2, 2.0), (3, 3.0), (6, 2.5), (9, 1.0))]
    curve = compute_curve(model, samples, [1, 3, 8, 9])
    values = curve.values
    assert math.isnan(values[0])
    assert values[1] == pytest.approx(ks_statistic([2.0, 3.0], model.oracle.cdf))
    assert values[2] == pytest.approx(ks_statistic([2.0, 3.0, 2.5], model.oracle.cdf))
    assert values[3] == pytest.approx(ks_statistic([2.0, 3.0, 2.5, 1.0], model.oracle.cdf))


def test_mse_curve_uses_running_mean():
    model = benchmarks.logistic_regression("setosa")
    ones = np.ones(150)
    samples = [Sample(1, {"probs": ones}), Sample(2, {"probs": np.zeros(150)})]
    curve = compute_curve(model, samples, [1, 2])
    assert curve.values[0] == pytest.approx(mse(ones, model.labels))
    assert curve.values[1] == pytest.approx(0.25)


def test_curve_requires_increasing_counts():
    with pytest.raises(ValueError):
        ConvergenceCurve(0, "mh", ((10, 0.5), (10, 0.4)))


def test_experiment_rejects_unsorted_checkpoints():
    model = benchmarks.normal_mean_1()
    for bad in ([100, 50, 500], [100, 100, 500], [0, 10], [10, 600]):
        with pytest.raises(ValueError):
            run_experiment(model, [KernelSpec("mh")], budget=500, n_runs=2, base_seed=0, checkpoints=bad)


def test_single_run_quartiles_collapse():
    model = benchmarks.normal_mean_1()
    summaries = run_experiment(model, [KernelSpec("mh")], budget=500, n_runs=1, base_seed=0)
    rows = summaries["mh"].rows
    assert len(rows) > 0
    assert all(p25 == median == p75 for _, p25, median, p75 in rows)


def test_metric_decreases_for_correct_kernels():
    model = benchmarks.normal_mean_1()
    summaries = run_experiment(model, [KernelSpec("mh"), KernelSpec("slice")], budget=5000, n_runs=5, base_seed=1)
    for summary in summaries.values():
        medians = list(summary.medians().values())
        assert medians[-1] < medians[0]
        assert all(p25 <= median <= p75 for _, p25, median, p75 in summary.rows)


def test_failed_chains_are_excluded():
    def broken(ctx):
        raise RuntimeError("model bug")

    model = benchmarks.normal_mean_1()
    bad = benchmarks.BenchmarkModel("broken", broken, model.oracle, ("m",), "KS")
    summaries = run_experiment(bad, [KernelSpec("slice")], budget=100, n_runs=2, base_seed=0)
    assert summaries["slice"].excluded_runs == (0, 1)
    assert summaries["slice"].rows == ()


def test_experiment_is_deterministic():
    model = benchmarks.branching()
    specs = [KernelSpec("mh"), KernelSpec.parse("mix:0.5")]
    with tempfile.TemporaryDirectory() as tmp:
        paths = [os.path.join(tmp, f"run{i}.csv") for i in range(3)]
        for path, workers in zip(paths, (1, 1, 2)):
            summaries = run_experiment(model, specs, budget=2000, n_runs=3, base_seed=5, workers=workers)
            emit_csv(summaries, path)
        contents = [_read(path) for path in paths]
    assert contents[0] == contents[1] == contents[2]
    assert contents[0].startswith("ll_count,kernel,p25,median,p75\n")


def test_quartile_csv_layout():
    summary = QuartileSummary("slice", ((10, 0.1, 0.2, 0.3), (20, 0.05, math.inf, math.inf)))
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "quartiles.csv")
        emit_csv(summary, path)
        lines = _read(path).splitlines()
    assert lines == ["ll_count,kernel,p25,median,p75", "10,slice,0.1,0.2,0.3", "20,slice,0.05,inf,inf"]


def test_empty_curve_writes_header_only():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "curve.csv")
        emit_csv(ConvergenceCurve(0, "mh"), path)
        assert _read(path) == "run_id,kernel,ll_count,metric\n"


def test_sample_stream_flattens_vectors():
    assert flatten_predicts({"probs": np.array([0.25, 0.75]), "m": 1.5}) == [
        ("probs[0]", 0.25), ("probs[1]", 0.75), ("m", 1.5)
    ]
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "samples.csv")
        emit_csv([Sample(1, {"m": 0.5}), Sample(4, {"m": 1.25})], path)
        assert _read(path) == "ll_count,name,value\n1,m,0.5\n4,m,1.25\n"


def test_histogram_masses_sum_to_one():
    model = benchmarks.normal_mean_1()
    samples = run_inference(model.program, KernelSpec("slice"), budget=20000, seed=2)
    histogram = posterior_histogram(samples, "m", bins=30)
    assert histogram.masses.sum() == pytest.approx(1.0, abs=1e-9)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "hist.csv")
        emit_csv(histogram, path)
        lines = _read(path).splitlines()
    assert lines[0] == "bin_lo,bin_hi,mass"
    assert len(lines) == 31


def test_unwritable_path_names_the_path():
    path = os.path.join(tempfile.gettempdir(), "no-such-directory-for-csv", "out.csv")
    with pytest.raises(OSError) as info:
        emit_csv(ConvergenceCurve(0, "mh"), path)
    assert "out.csv" in str(info.value)


def test_cli_commands():
    with tempfile.TemporaryDirectory() as tmp:
        samples_csv = os.path.join(tmp, "samples.csv")
        assert cli_main(["run", "--model", "normal_mean_1", "--kernel", "mh", "--budget", "50", "--csv", samples_csv]) == 0
        lines = _read(samples_csv).splitlines()
        assert lines[0] == "ll_count,name,value"
        assert len(lines) == 51

        out = os.path.join(tmp, "experiment.csv")
        args = ["experiment", "--model", "branching", "--kernels", "mh,slice", "--budget", "300",
                "--runs", "2", "--seed", "1", "--out", out]
        assert cli_main(args) == 0
        assert _read(out).startswith("ll_count,kernel,p25,median,p75\n")

        hist = os.path.join(tmp, "hist.csv")
        args = ["posterior", "--model", "normal_mean_1", "--kernel", "slice", "--budget", "500",
                "--bins", "10", "--out", hist]
        assert cli_main(args) == 0
        assert len(_read(hist).splitlines()) == 11

        # vector predicts are histogrammed one element at a time
        hmm_hist = os.path.join(tmp, "hmm.csv")
        args = ["posterior", "--model", "hmm", "--kernel", "slice", "--budget", "300",
                "--bins", "5", "--predict", "states[3]", "--out", hmm_hist]
        assert cli_main(args) == 0
        assert len(_read(hmm_hist).splitlines()) == 6
        args = ["posterior", "--model", "hmm", "--kernel", "slice", "--budget", "300",
                "--predict", "states", "--out", hmm_hist]
        assert cli_main(args) == 1
        args = ["posterior", "--model", "hmm", "--kernel", "slice", "--budget", "300", "--out", hmm_hist]
        assert cli_main(args) == 1

    assert cli_main(["list-models"]) == 0
    assert cli_main(["run", "--model", "no_such_model", "--budget", "10"]) == 1


def main():
    """Run every test and report a summary."""
    logger.info("🧪 Evaluation tests")
    logger.info("=" * 50)

    tests = [
        ("KS statistic examples", test_ks_statistic_examples),
        ("KS statistic bounds", test_ks_statistic_is_bounded),
        ("KL divergence examples", test_kl_divergence_examples),
        ("Empirical pmf", test_empirical_pmf),
        ("Pmf KL support", test_pmf_kl_extends_support),
        ("MSE examples", test_mse_examples),
        ("Quartiles", test_quartiles),
        ("Default checkpoints", test_default_checkpoints),
        ("Running-average curve", test_curve_uses_every_sample_up_to_checkpoint),
        ("Running-mean MSE curve", test_mse_curve_uses_running_mean),
        ("Curve validation", test_curve_requires_increasing_counts),
        ("Single-run quartiles", test_single_run_quartiles_collapse),
        ("Convergence direction", test_metric_decreases_for_correct_kernels),
        ("Failed chains", test_failed_chains_are_excluded),
        ("Experiment determinism", test_experiment_is_deterministic),
        ("Quartile CSV", test_quartile_csv_layout),
        ("Empty curve CSV", test_empty_curve_writes_header_only),
        ("Sample stream CSV", test_sample_stream_flattens_vectors),
        ("Histogram CSV", test_histogram_masses_sum_to_one),
        ("CSV write errors", test_unwritable_path_names_the_path),
        ("Command-line interface", test_cli_commands),
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
