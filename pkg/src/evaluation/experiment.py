"""
Multi-seed convergence experiments.

Every chain is scored at a schedule of LL-evaluation checkpoints with the
running average of all samples recorded so far; the curves of independent
chains are then summarized by their quartiles at each checkpoint.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_config
from ..inference.samples import Sample
from ..inference.scheduler import KernelSpec, run_inference
from ..models.benchmarks import BenchmarkModel
from ..models.oracles import MarginalsOracle, PmfOracle
from .metrics import empirical_pmf, kl_divergence, ks_statistic, mse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConvergenceCurve:
    """Metric of one chain at increasing LL-evaluation counts."""

    run_id: int
    kernel: str
    checkpoints: Tuple[Tuple[int, float], ...] = ()

    def __post_init__(self):
        counts = [c for c, _ in self.checkpoints]
        if any(b <= a for a, b in zip(counts, counts[1:])):
            raise ValueError(f"curve ll_counts must be strictly increasing, got {counts}")

    @property
    def values(self) -> List[float]:
        return [value for _, value in self.checkpoints]


@dataclass(frozen=True)
class QuartileSummary:
    """
    Quartiles of the metric across runs of one kernel.

    Attributes:
        kernel: Kernel label
        rows: (ll_count, p25, median, p75) per checkpoint
        curves: The per-run curves the rows summarize
        excluded_runs: Seeds of chains that failed and were left out
    """

    kernel: str
    rows: Tuple[Tuple[int, float, float, float], ...]
    curves: Tuple[ConvergenceCurve, ...] = ()
    excluded_runs: Tuple[int, ...] = field(default_factory=tuple)

    def medians(self) -> Dict[int, float]:
        return {ll_count: median for ll_count, _, median, _ in self.rows}


def default_checkpoints(budget: int, count: Optional[int] = None) -> List[int]:
    """Logarithmically spaced checkpoints from budget/100 to budget."""
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")
    count = count or get_config()["experiment"]["checkpoints"]
    points = np.geomspace(max(1.0, budget / 100.0), budget, count)
    return [int(c) for c in np.unique(np.round(points).astype(int))]


def _predict_array(samples: Sequence[Sample], name: str, dtype=float) -> np.ndarray:
    return np.array([np.asarray(s.predicts[name], dtype=dtype) for s in samples])


class _MetricTracker:
    """Scores prefixes of one chain's samples against the model's reference."""

    def __init__(self, model: BenchmarkModel, samples: Sequence[Sample]):
        self.model = model
        name = model.predict_names[0]
        if model.metric == "KS":
            self.values = _predict_array(samples, name)
        elif model.metric == "KL":
            self.values = _predict_array(samples, name, dtype=int)
        else:
            # running sums make every prefix mean O(1)
            self.values = np.cumsum(_predict_array(samples, name), axis=0)

    def score(self, k: int) -> float:
        """Metric of the first ``k`` samples."""
        model = self.model
        if model.metric == "KS":
            return ks_statistic(self.values[:k], model.oracle.cdf)
        if model.metric == "MSE":
            return mse(self.values[k - 1] / k, model.labels)
        if isinstance(model.oracle, MarginalsOracle):
            return marginals_kl(self.values[:k], model.oracle)
        return pmf_kl(self.values[:k], model.oracle)


def pmf_kl(values: np.ndarray, oracle: PmfOracle) -> float:
    support_size = max(len(oracle.probs), int(np.max(values)) + 1)
    return kl_divergence(empirical_pmf(values, support_size), oracle.pmf_on(np.arange(support_size)))


def marginals_kl(states: np.ndarray, oracle: MarginalsOracle, reduce=np.mean) -> float:
    """KL between empirical and reference state marginals at each step, reduced over steps."""
    states = np.asarray(states, dtype=int)
    n_states = oracle.tables.shape[1]
    per_step = [
        kl_divergence(empirical_pmf(states[:, t], n_states), oracle.tables[t])
        for t in range(oracle.tables.shape[0])
    ]
    return float(reduce(per_step))


def compute_curve(
    model: BenchmarkModel,
    samples: Sequence[Sample],
    checkpoints: Sequence[int],
    run_id: int = 0,
    kernel: str = "",
) -> ConvergenceCurve:
    """
    Score the running average of a chain at each checkpoint.

    The metric at checkpoint c uses every sample recorded with ll_count <= c;
    a checkpoint before the first sample scores NaN.
    """
    ll_counts = np.array([s.ll_count for s in samples])
    tracker = _MetricTracker(model, samples) if samples else None
    points = []
    for c in checkpoints:
        k = int(np.searchsorted(ll_counts, c, side="right"))
        points.append((int(c), tracker.score(k) if k > 0 else math.nan))
    return ConvergenceCurve(run_id, kernel, tuple(points))


def _quantile(sorted_values: np.ndarray, q: float) -> float:
    # linear interpolation that keeps +inf endpoints instead of producing nan
    pos = q * (len(sorted_values) - 1)
    lo, hi = int(math.floor(pos)), int(math.ceil(pos))
    frac = pos - lo
    if frac == 0.0 or sorted_values[lo] == sorted_values[hi]:
        return float(sorted_values[lo])
    if math.isinf(sorted_values[hi]):
        return math.inf
    return float(sorted_values[lo] + (sorted_values[hi] - sorted_values[lo]) * frac)


def quartiles(values: Sequence[float]) -> Tuple[float, float, float]:
    """(p25, median, p75) of the non-NaN values; NaN when there are none."""
    arr = np.asarray(values, dtype=float)
    arr = np.sort(arr[~np.isnan(arr)])
    if arr.size == 0:
        return math.nan, math.nan, math.nan
    return _quantile(arr, 0.25), _quantile(arr, 0.5), _quantile(arr, 0.75)


def summarize(kernel: str, curves: Sequence[ConvergenceCurve], excluded: Sequence[int] = ()) -> QuartileSummary:
    rows = []
    if curves:
        for j, (ll_count, _) in enumerate(curves[0].checkpoints):
            rows.append((ll_count, *quartiles([curve.values[j] for curve in curves])))
    return QuartileSummary(kernel, tuple(rows), tuple(curves), tuple(excluded))


def run_chain(model: BenchmarkModel, spec: KernelSpec, budget: int, seed: int, checkpoints: Sequence[int]) -> ConvergenceCurve:
    samples = run_inference(model.program, spec, budget, seed)
    return compute_curve(model, samples, checkpoints, run_id=seed, kernel=spec.label)


def _run_chain_safely(model, spec, budget, seed, checkpoints) -> Optional[ConvergenceCurve]:
    try:
        return run_chain(model, spec, budget, seed, checkpoints)
    except Exception as e:
        logger.warning(f"Excluding chain {spec.label} seed {seed} of {model.name}: {type(e).__name__}: {e}")
        return None


def run_experiment(
    model: BenchmarkModel,
    specs: Sequence[KernelSpec],
    budget: int,
    n_runs: int,
    base_seed: int,
    checkpoints: Optional[Sequence[int]] = None,
    workers: Optional[int] = None,
) -> Dict[str, QuartileSummary]:
    """
    Run ``n_runs`` independent chains per kernel and summarize their curves.

    Args:
        model: Benchmark model
        specs: Kernels to compare
        budget: LL-evaluation budget per chain
        n_runs: Chains per kernel; run i uses seed base_seed + i
        base_seed: Seed of the first run
        checkpoints: LL counts to score at (default: default_checkpoints(budget))
        workers: Parallel processes (default from configuration); results are
            independent of the worker count

    Returns:
        Kernel label -> QuartileSummary, in the order of ``specs``
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be at least 1, got {n_runs}")
    checkpoints = list(checkpoints) if checkpoints is not None else default_checkpoints(budget)
    if not checkpoints or checkpoints[0] < 1 or checkpoints[-1] > budget:
        raise ValueError(f"checkpoints must lie in [1, {budget}]")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError(f"checkpoints must be strictly increasing, got {checkpoints}")
    workers = workers or get_config()["experiment"]["workers"]
    seeds = [base_seed + i for i in range(n_runs)]

    logger.info(
        f"Experiment on {model.name}: kernels {[s.label for s in specs]}, budget {budget}, "
        f"{n_runs} runs, {workers} worker(s)"
    )

    summaries: Dict[str, QuartileSummary] = {}
    for spec in specs:
        jobs = [(model, spec, budget, seed, checkpoints) for seed in seeds]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_run_chain_safely, *zip(*jobs)))
        else:
            results = [_run_chain_safely(*job) for job in jobs]

        curves = [curve for curve in results if curve is not None]
        excluded = [seed for seed, curve in zip(seeds, results) if curve is None]
        if excluded:
            logger.warning(f"Kernel {spec.label}: {len(excluded)} of {n_runs} chains excluded")
        summaries[spec.label] = summarize(spec.label, curves, excluded)
        logger.info(f"Kernel {spec.label} done: {len(curves)} chains summarized")

    return summaries
