"""
The benchmark model programs.

Each program takes a ModelContext and nothing else (classifier programs are
bound to their data with functools.partial). Model constants give normal
variances; the Normal primitive takes a standard deviation, so variances are
converted here.
"""

import math
from typing import List

import numpy as np
from scipy.special import expit

from data.benchmark_constants import (
    BRANCHING,
    CLASSIFIERS,
    GAUSS_MEAN_EASY,
    GAUSS_MEAN_HARD,
    HMM,
    MARSAGLIA,
    NORMAL_MEAN,
)
from ..runtime.distributions import Bernoulli, Categorical, InverseGamma, Normal, Poisson, Uniform
from ..runtime.trace import ModelContext


def gauss_mean_easy(ctx: ModelContext) -> None:
    m = ctx.sample_at("m", Normal(GAUSS_MEAN_EASY["prior_mean"], GAUSS_MEAN_EASY["prior_std"]))
    ctx.predict("m", m)


def gauss_mean_hard(ctx: ModelContext) -> None:
    m = ctx.sample_at("m", Uniform(GAUSS_MEAN_HARD["prior_lo"], GAUSS_MEAN_HARD["prior_hi"]))
    noise = Normal(m, GAUSS_MEAN_HARD["noise_std"])
    for y in GAUSS_MEAN_HARD["observations"]:
        ctx.observe_at(noise, y)
    ctx.predict("m", m)


def _mean_prior() -> Normal:
    return Normal(NORMAL_MEAN["prior_mean"], NORMAL_MEAN["prior_std"])


def _variance_prior() -> InverseGamma:
    return InverseGamma(NORMAL_MEAN["variance_shape"], NORMAL_MEAN["variance_scale"])


def normal_mean_1(ctx: ModelContext) -> None:
    m = ctx.sample_at("m", _mean_prior())
    ctx.observe_at(Normal(m, math.sqrt(NORMAL_MEAN["noise_variance"])), NORMAL_MEAN["observation"])
    ctx.predict("m", m)


def normal_mean_2(ctx: ModelContext) -> None:
    m = ctx.sample_at("m", _mean_prior())
    v = ctx.sample_at("v", _variance_prior())
    ctx.observe_at(Normal(m, math.sqrt(v)), NORMAL_MEAN["observation"])
    ctx.predict("m", m)


def normal_mean_3(ctx: ModelContext) -> None:
    m = ctx.sample_at("m", _mean_prior())
    if m < 0:
        v = ctx.sample_at("v", _variance_prior())
    else:
        v = NORMAL_MEAN["fixed_variance"]
    ctx.observe_at(Normal(m, math.sqrt(v)), NORMAL_MEAN["observation"])
    ctx.predict("m", m)


def fibonacci(n: int) -> int:
    """fib(0) = 0, fib(1) = 1; non-positive n gives 0."""
    a, b = 0, 1
    for _ in range(max(n, 0)):
        a, b = b, a + b
    return a


def _branching_rate(pois1: int, pois2: int) -> float:
    if pois1 > BRANCHING["threshold"]:
        return BRANCHING["high_branch_rate"]
    return fibonacci(BRANCHING["fib_multiplier"] * pois1) + pois2


def _observe_branching(ctx: ModelContext, rate: float) -> None:
    if rate <= 0:
        # Poisson(0) puts all its mass on 0, so the observation is impossible
        ctx.factor(float("-inf"))
    else:
        ctx.observe_at(Poisson(rate), BRANCHING["observation"])


def branching(ctx: ModelContext) -> None:
    count_prior = Poisson(BRANCHING["rate"])
    pois1 = ctx.sample_at("pois1", count_prior)
    if pois1 > BRANCHING["threshold"]:
        rate = BRANCHING["high_branch_rate"]
    else:
        rate = _branching_rate(pois1, ctx.sample_at("pois2", count_prior))
    _observe_branching(ctx, rate)
    ctx.predict("pois1", pois1)


def branching_full(ctx: ModelContext) -> None:
    """Branching with pois2 always sampled, used or not."""
    count_prior = Poisson(BRANCHING["rate"])
    pois1 = ctx.sample_at("pois1", count_prior)
    pois2 = ctx.sample_at("pois2", count_prior)
    _observe_branching(ctx, _branching_rate(pois1, pois2))
    ctx.predict("pois1", pois1)


def hmm(ctx: ModelContext) -> None:
    emissions = [Normal(mean, HMM["emission_std"]) for mean in HMM["emission_means"]]
    transitions = [Categorical(row) for row in HMM["transitions"]]

    states: List[int] = []
    state_dist = Categorical(HMM["initial"])
    for y in HMM["observations"]:
        state = ctx.sample_at("state", state_dist)
        ctx.observe_at(emissions[state], y)
        states.append(state)
        state_dist = transitions[state]
    ctx.predict("states", states)


def marsaglia_normal(ctx: ModelContext, mean: float, variance: float) -> float:
    """Polar-method normal draw: retry uniform pairs until they fall inside the unit disc."""
    d = Uniform(MARSAGLIA["uniform_lo"], MARSAGLIA["uniform_hi"])
    while True:
        x = ctx.sample_at("x", d)
        y = ctx.sample_at("y", d)
        s = x * x + y * y
        if 0.0 < s < 1.0:
            return mean + math.sqrt(variance) * x * math.sqrt(-2.0 * math.log(s) / s)


def marsaglia(ctx: ModelContext) -> None:
    mu = marsaglia_normal(ctx, MARSAGLIA["prior_mean"], MARSAGLIA["prior_variance"])
    noise = Normal(mu, math.sqrt(MARSAGLIA["noise_variance"]))
    for y in MARSAGLIA["observations"]:
        ctx.observe_at(noise, y)
    ctx.predict("mu", mu)


def _weight_prior() -> Normal:
    return Normal(CLASSIFIERS["weight_prior_mean"], CLASSIFIERS["weight_prior_std"])


def _observe_labels(ctx: ModelContext, probs: np.ndarray, labels: np.ndarray) -> None:
    ctx.predict("probs", probs)
    for p, label in zip(probs, labels):
        ctx.observe_at(Bernoulli(float(p)), int(label))


def logistic_regression(ctx: ModelContext, features: np.ndarray, labels: np.ndarray) -> None:
    prior = _weight_prior()
    weights = np.array([ctx.sample_at("w", prior) for _ in range(features.shape[1])])
    bias = ctx.sample_at("b", prior)
    _observe_labels(ctx, expit(features @ weights + bias), labels)


def bayes_nn(ctx: ModelContext, features: np.ndarray, labels: np.ndarray) -> None:
    """Fully connected network with tanh hidden layers and a logistic output neuron."""
    prior = _weight_prior()
    sizes = [features.shape[1], *CLASSIFIERS["hidden_layers"], 1]
    activations = features
    for layer, (n_in, n_out) in enumerate(zip(sizes[:-1], sizes[1:]), 1):
        weights = np.array([ctx.sample_at(f"w{layer}", prior) for _ in range(n_in * n_out)]).reshape(n_in, n_out)
        bias = np.array([ctx.sample_at(f"b{layer}", prior) for _ in range(n_out)])
        pre_activation = activations @ weights + bias
        activations = expit(pre_activation) if layer == len(sizes) - 1 else np.tanh(pre_activation)
    _observe_labels(ctx, activations[:, 0], labels)
