"""
Oracle posteriors of the benchmark models.

Three shapes of ground truth are used by the evaluation layer:

- CdfOracle / GridCdf: a cdf over the predicted real value, compared by KS
- PmfOracle: a pmf over 0..K for a discrete predicted value, compared by KL
- MarginalsOracle: per-step state marginals of the HMM, compared by KL

Closed forms come from conjugate updates; everything else is computed by
trapezoidal grid integration or by exhaustive enumeration.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.special import logsumexp

from data.benchmark_constants import BRANCHING, GAUSS_MEAN_HARD, HMM, NORMAL_MEAN
from ..errors import OracleCoverageError
from ..runtime.distributions import Normal, Poisson
from .programs import fibonacci

logger = logging.getLogger(__name__)

LogDensity = Callable[[np.ndarray], np.ndarray]

# log-spaced variance grid used to integrate v out of the NormalMean models
_LOG_VARIANCE_GRID = np.linspace(math.log(1e-4), math.log(1e4), 4001)
_GRID_CHUNK = 512


@dataclass(frozen=True)
class CdfOracle:
    """Closed-form posterior of a continuous predicted value."""

    dist: Normal

    def cdf(self, x):
        return self.dist.cdf(x)

    @property
    def mean(self) -> float:
        return self.dist.mean

    @property
    def variance(self) -> float:
        return self.dist.std ** 2


@dataclass(frozen=True)
class PmfOracle:
    """Posterior masses of a discrete predicted value over 0..len(probs)-1."""

    probs: np.ndarray

    def pmf_on(self, support: Sequence[int]) -> np.ndarray:
        """Masses at ``support``; values outside the table get 0."""
        support = np.asarray(support, dtype=int)
        inside = (support >= 0) & (support < len(self.probs))
        result = np.zeros(len(support))
        result[inside] = self.probs[support[inside]]
        return result


@dataclass(frozen=True)
class MarginalsOracle:
    """Per-step posterior state marginals, shape (steps, states)."""

    tables: np.ndarray


@dataclass(frozen=True)
class GridSpec:
    """Uniform integration grid from ``lo`` to ``hi`` with spacing ``step``."""

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.hi > self.lo):
            raise ValueError(f"grid needs finite lo < hi, got ({self.lo}, {self.hi})")
        if not (self.step > 0.0 and self.step < self.hi - self.lo):
            raise ValueError(f"grid step must be positive and below the grid width, got {self.step}")

    @property
    def size(self) -> int:
        return int(round((self.hi - self.lo) / self.step)) + 1

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.size)

    def widened(self, factor: float) -> "GridSpec":
        """Grid ``factor`` times wider around the same centre, with the same number of points."""
        centre = 0.5 * (self.lo + self.hi)
        half = 0.5 * factor * (self.hi - self.lo)
        return GridSpec(centre - half, centre + half, self.step * factor)


@dataclass(frozen=True)
class GridCdf:
    """Normalized posterior on a grid; the cdf interpolates linearly between grid points."""

    grid: np.ndarray
    density: np.ndarray
    cdf_values: np.ndarray

    def cdf(self, x):
        result = np.interp(x, self.grid, self.cdf_values, left=0.0, right=1.0)
        return float(result) if np.ndim(x) == 0 else result

    def total_mass(self) -> float:
        return float(trapezoid(self.density, self.grid))

    @property
    def mean(self) -> float:
        return float(trapezoid(self.grid * self.density, self.grid))


def _unnormalized_mass(log_density: LogDensity, grid: GridSpec, shift: Optional[float] = None):
    x = grid.points()
    logd = np.asarray(log_density(x), dtype=float)
    if shift is None:
        finite = logd[np.isfinite(logd)]
        if finite.size == 0:
            raise OracleCoverageError(f"log density is -inf everywhere on [{grid.lo}, {grid.hi}]")
        shift = float(finite.max())
    weights = np.exp(logd - shift)
    return x, weights, float(trapezoid(weights, x)), shift


def grid_posterior(
    log_density: LogDensity,
    grid: GridSpec,
    coverage_tol: float = 1e-4,
    reference_factor: float = 10.0,
) -> GridCdf:
    """
    Normalize an unnormalized posterior log density on a uniform grid.

    Args:
        log_density: Vectorized log density of the predicted variable (any constant offset)
        grid: Integration grid
        coverage_tol: Largest fraction of mass the grid may miss
        reference_factor: Width of the reference grid relative to ``grid``

    Returns:
        The grid cdf

    Raises:
        OracleCoverageError: The grid holds less than 1 - coverage_tol of the mass
            found on the wider reference grid
    """
    reference = grid.widened(reference_factor)
    ref_x, ref_w, _, shift = _unnormalized_mass(log_density, reference)
    x, weights, mass, _ = _unnormalized_mass(log_density, grid, shift)
    # grid mass measured on the reference discretization so both use the same rule
    inside = (ref_x >= grid.lo) & (ref_x <= grid.hi)
    ref_mass = float(trapezoid(ref_w, ref_x))
    ref_inside = float(trapezoid(np.where(inside, ref_w, 0.0), ref_x))

    if not (ref_mass > 0.0 and mass > 0.0) or ref_inside < (1.0 - coverage_tol) * ref_mass:
        logger.error(f"Grid [{grid.lo}, {grid.hi}] covers {ref_inside / max(ref_mass, 1e-300):.6f} of the reference mass")
        raise OracleCoverageError(
            f"grid [{grid.lo}, {grid.hi}] misses more than {coverage_tol} of the posterior mass"
        )

    density = weights / mass
    cdf_values = cumulative_trapezoid(density, x, initial=0.0)
    cdf_values /= cdf_values[-1]
    return GridCdf(grid=x, density=density, cdf_values=cdf_values)


def conjugate_normal_posterior(
    prior_mean: float, prior_variance: float, noise_variance: float, observations: Sequence[float]
) -> Normal:
    """Posterior of a normal mean with a normal prior and known noise variance."""
    precision = 1.0 / prior_variance + len(observations) / noise_variance
    mean = (prior_mean / prior_variance + math.fsum(observations) / noise_variance) / precision
    return Normal(mean, math.sqrt(1.0 / precision))


def variance_integrated_log_likelihood(m: np.ndarray) -> np.ndarray:
    """log of the integral over v of InvGamma(v) N(y; m, v), by trapezoid in log v."""
    t = _LOG_VARIANCE_GRID
    v = np.exp(t)
    # the log-v substitution contributes the Jacobian dv = v dt
    log_prior = stats.invgamma.logpdf(v, NORMAL_MEAN["variance_shape"], scale=NORMAL_MEAN["variance_scale"]) + t
    y = NORMAL_MEAN["observation"]

    m = np.atleast_1d(np.asarray(m, dtype=float))
    result = np.empty_like(m)
    for start in range(0, len(m), _GRID_CHUNK):
        block = m[start:start + _GRID_CHUNK, None]
        log_integrand = log_prior[None, :] + stats.norm.logpdf(y, loc=block, scale=np.sqrt(v)[None, :])
        peak = log_integrand.max(axis=1, keepdims=True)
        result[start:start + _GRID_CHUNK] = np.log(trapezoid(np.exp(log_integrand - peak), t, axis=1)) + peak[:, 0]
    return result


def student_t_log_likelihood(m: np.ndarray) -> np.ndarray:
    """
    Closed form of the variance-integrated likelihood: y - m follows a Student-t
    with 2a degrees of freedom and scale sqrt(b / a).
    """
    a, b = NORMAL_MEAN["variance_shape"], NORMAL_MEAN["variance_scale"]
    return stats.t.logpdf(NORMAL_MEAN["observation"], df=2.0 * a, loc=m, scale=math.sqrt(b / a))


def _mean_log_prior(m: np.ndarray) -> np.ndarray:
    return stats.norm.logpdf(m, NORMAL_MEAN["prior_mean"], NORMAL_MEAN["prior_std"])


def normal_mean_1_log_density(m: np.ndarray) -> np.ndarray:
    y, noise = NORMAL_MEAN["observation"], math.sqrt(NORMAL_MEAN["noise_variance"])
    return _mean_log_prior(m) + stats.norm.logpdf(y, m, noise)


def normal_mean_2_log_density(m: np.ndarray) -> np.ndarray:
    return _mean_log_prior(m) + variance_integrated_log_likelihood(m)


def normal_mean_3_log_density(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    fixed = stats.norm.logpdf(NORMAL_MEAN["observation"], m, math.sqrt(NORMAL_MEAN["fixed_variance"]))
    negative = m < 0
    loglik = fixed.copy()
    if np.any(negative):
        loglik[negative] = variance_integrated_log_likelihood(m[negative])
    return _mean_log_prior(m) + loglik


def gauss_mean_hard_log_density(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    ys = np.asarray(GAUSS_MEAN_HARD["observations"])
    loglik = stats.norm.logpdf(ys[None, :], m[:, None], GAUSS_MEAN_HARD["noise_std"]).sum(axis=1)
    in_prior = (m >= GAUSS_MEAN_HARD["prior_lo"]) & (m <= GAUSS_MEAN_HARD["prior_hi"])
    return np.where(in_prior, loglik, -np.inf)


# Grids over the mean; each holds all but a negligible fraction of its posterior.
NORMAL_MEAN_GRID = GridSpec(-10.0, 10.0, 0.001)
GAUSS_MEAN_HARD_GRID = GridSpec(0.0, 10.0, 0.001)


def branching_posterior(tail_mass: float = 1e-10) -> PmfOracle:
    """
    Posterior over pois1 by enumerating every (pois1, pois2) pair of the
    Poisson prior truncated where its remaining mass drops below ``tail_mass``.
    """
    prior = Poisson(BRANCHING["rate"])
    k_max = 0
    while prior.cdf(k_max) < 1.0 - tail_mass:
        k_max += 1
    ks = np.arange(k_max + 1)
    log_prior = np.array([prior.log_prob(int(k)) for k in ks])
    y = BRANCHING["observation"]

    log_weights = np.empty(len(ks))
    for pois1 in ks:
        if pois1 > BRANCHING["threshold"]:
            log_weights[pois1] = log_prior[pois1] + Poisson(BRANCHING["high_branch_rate"]).log_prob(y)
            continue
        base = fibonacci(BRANCHING["fib_multiplier"] * int(pois1))
        terms = [
            log_prior[pois2] + Poisson(base + pois2).log_prob(y)
            for pois2 in ks
            if base + pois2 > 0
        ]
        log_weights[pois1] = log_prior[pois1] + (logsumexp(terms) if terms else -np.inf)

    probs = np.exp(log_weights - logsumexp(log_weights))
    return PmfOracle(probs / probs.sum())


def _hmm_log_tables():
    initial = np.log(np.asarray(HMM["initial"]))
    with np.errstate(divide="ignore"):
        transitions = np.log(np.asarray(HMM["transitions"]))
    obs = np.asarray(HMM["observations"])
    emissions = stats.norm.logpdf(obs[:, None], np.asarray(HMM["emission_means"])[None, :], HMM["emission_std"])
    return initial, transitions, emissions


def hmm_path_marginals() -> MarginalsOracle:
    """Per-step state marginals by enumerating all S^T state paths."""
    initial, transitions, emissions = _hmm_log_tables()
    steps, states = emissions.shape
    paths = np.array(list(itertools.product(range(states), repeat=steps)))

    log_w = initial[paths[:, 0]] + emissions[0, paths[:, 0]]
    for t in range(1, steps):
        log_w += transitions[paths[:, t - 1], paths[:, t]] + emissions[t, paths[:, t]]
    weights = np.exp(log_w - logsumexp(log_w))

    tables = np.stack([np.bincount(paths[:, t], weights=weights, minlength=states) for t in range(steps)])
    return MarginalsOracle(tables / tables.sum(axis=1, keepdims=True))


def hmm_forward_backward() -> MarginalsOracle:
    """Per-step state marginals by the forward-backward recursions in log space."""
    initial, transitions, emissions = _hmm_log_tables()
    steps, states = emissions.shape

    alpha = np.empty((steps, states))
    alpha[0] = initial + emissions[0]
    for t in range(1, steps):
        alpha[t] = logsumexp(alpha[t - 1][:, None] + transitions, axis=0) + emissions[t]

    beta = np.zeros((steps, states))
    for t in range(steps - 2, -1, -1):
        beta[t] = logsumexp(transitions + (emissions[t + 1] + beta[t + 1])[None, :], axis=1)

    log_marginals = alpha + beta
    log_marginals -= logsumexp(log_marginals, axis=1, keepdims=True)
    return MarginalsOracle(np.exp(log_marginals))
