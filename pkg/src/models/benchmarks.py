"""
The benchmark model catalogue and registry.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from data.benchmark_constants import CLASSIFIERS, GAUSS_MEAN_EASY, MARSAGLIA, NORMAL_MEAN
from ..errors import UnknownModelError
from ..runtime.distributions import Normal
from ..runtime.trace import ModelProgram
from . import oracles, programs
from .iris import load_iris
from .oracles import CdfOracle, GridCdf, MarginalsOracle, PmfOracle

logger = logging.getLogger(__name__)

Oracle = Union[CdfOracle, GridCdf, PmfOracle, MarginalsOracle, None]

METRICS = ("KS", "KL", "MSE")
_ORACLE_TYPES = {
    "KS": (CdfOracle, GridCdf),
    "KL": (PmfOracle, MarginalsOracle),
}


@dataclass(frozen=True)
class BenchmarkModel:
    """
    A model program together with how its inference is scored.

    Attributes:
        name: Registry name
        program: The model program
        oracle: Ground-truth posterior (None for MSE-scored models)
        predict_names: Predicted values the metric reads, in order
        metric: "KS", "KL" or "MSE"
        labels: 0/1 targets of MSE-scored models
        description: One-line summary for listings
    """

    name: str
    program: ModelProgram
    oracle: Oracle
    predict_names: Tuple[str, ...]
    metric: str
    labels: Optional[np.ndarray] = None
    description: str = ""

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"Unknown metric {self.metric!r} for model {self.name}")
        if self.metric == "MSE":
            if self.oracle is not None or self.labels is None:
                raise ValueError(f"MSE-scored model {self.name} needs labels and no oracle")
        elif not isinstance(self.oracle, _ORACLE_TYPES[self.metric]):
            raise ValueError(f"{self.metric}-scored model {self.name} has oracle {type(self.oracle).__name__}")


def gauss_mean_easy() -> BenchmarkModel:
    prior = Normal(GAUSS_MEAN_EASY["prior_mean"], GAUSS_MEAN_EASY["prior_std"])
    return BenchmarkModel(
        "gauss_mean_easy", programs.gauss_mean_easy, CdfOracle(prior), ("m",), "KS",
        description="Normal mean with no observations: the posterior is the N(0, 1) prior",
    )


@functools.lru_cache(maxsize=None)
def _gauss_mean_hard_oracle() -> GridCdf:
    return oracles.grid_posterior(oracles.gauss_mean_hard_log_density, oracles.GAUSS_MEAN_HARD_GRID)


def gauss_mean_hard() -> BenchmarkModel:
    return BenchmarkModel(
        "gauss_mean_hard", programs.gauss_mean_hard, _gauss_mean_hard_oracle(), ("m",), "KS",
        description="Normal mean with a Uniform(0, 10000) prior and 31 observations",
    )


def normal_mean_1() -> BenchmarkModel:
    posterior = oracles.conjugate_normal_posterior(
        NORMAL_MEAN["prior_mean"], NORMAL_MEAN["prior_std"] ** 2,
        NORMAL_MEAN["noise_variance"], [NORMAL_MEAN["observation"]],
    )
    return BenchmarkModel(
        "normal_mean_1", programs.normal_mean_1, CdfOracle(posterior), ("m",), "KS",
        description="m ~ N(0, 1), observe N(m, 1) = 5",
    )


@functools.lru_cache(maxsize=None)
def _normal_mean_2_oracle() -> GridCdf:
    return oracles.grid_posterior(oracles.normal_mean_2_log_density, oracles.NORMAL_MEAN_GRID)


def normal_mean_2() -> BenchmarkModel:
    return BenchmarkModel(
        "normal_mean_2", programs.normal_mean_2, _normal_mean_2_oracle(), ("m",), "KS",
        description="m ~ N(0, 1), v ~ InvGamma(3, 1), observe N(m, v) = 5",
    )


@functools.lru_cache(maxsize=None)
def _normal_mean_3_oracle() -> GridCdf:
    return oracles.grid_posterior(oracles.normal_mean_3_log_density, oracles.NORMAL_MEAN_GRID)


def normal_mean_3() -> BenchmarkModel:
    return BenchmarkModel(
        "normal_mean_3", programs.normal_mean_3, _normal_mean_3_oracle(), ("m",), "KS",
        description="NormalMean2 where v is sampled only when m < 0 (otherwise v = 1/3)",
    )


@functools.lru_cache(maxsize=None)
def _branching_oracle() -> PmfOracle:
    return oracles.branching_posterior()


def branching() -> BenchmarkModel:
    return BenchmarkModel(
        "branching", programs.branching, _branching_oracle(), ("pois1",), "KL",
        description="pois2 is sampled only when pois1 <= 4; observe Poisson(rate) = 6",
    )


def branching_full() -> BenchmarkModel:
    return BenchmarkModel(
        "branching_full", programs.branching_full, _branching_oracle(), ("pois1",), "KL",
        description="Branching with both Poissons always sampled (fixed dimension)",
    )


@functools.lru_cache(maxsize=None)
def _hmm_oracle() -> MarginalsOracle:
    return oracles.hmm_forward_backward()


def hmm() -> BenchmarkModel:
    return BenchmarkModel(
        "hmm", programs.hmm, _hmm_oracle(), ("states",), "KL",
        description="3-state HMM with normal emissions over 10 observations",
    )


def marsaglia() -> BenchmarkModel:
    posterior = oracles.conjugate_normal_posterior(
        MARSAGLIA["prior_mean"], MARSAGLIA["prior_variance"],
        MARSAGLIA["noise_variance"], MARSAGLIA["observations"],
    )
    return BenchmarkModel(
        "marsaglia", programs.marsaglia, CdfOracle(posterior), ("mu",), "KS",
        description="Normal mean whose prior is drawn by the polar rejection method",
    )


def logistic_regression(species: str, iris_path: Optional[str] = None) -> BenchmarkModel:
    dataset = load_iris(iris_path)
    labels = dataset.binary_labels(species)
    program = functools.partial(programs.logistic_regression, features=dataset.features, labels=labels)
    return BenchmarkModel(
        f"logistic_regression_{species}", program, None, ("probs",), "MSE", labels,
        description=f"Bayesian logistic regression, Iris {species} vs rest",
    )


def bayes_nn(species: str, iris_path: Optional[str] = None) -> BenchmarkModel:
    dataset = load_iris(iris_path)
    labels = dataset.binary_labels(species)
    program = functools.partial(programs.bayes_nn, features=dataset.features, labels=labels)
    return BenchmarkModel(
        f"bayes_nn_{species}", program, None, ("probs",), "MSE", labels,
        description=f"Bayesian neural network 4-4-2-1, Iris {species} vs rest",
    )


_FIXED_MODELS: Dict[str, Callable[[], BenchmarkModel]] = {
    "gauss_mean_easy": gauss_mean_easy,
    "gauss_mean_hard": gauss_mean_hard,
    "normal_mean_1": normal_mean_1,
    "normal_mean_2": normal_mean_2,
    "normal_mean_3": normal_mean_3,
    "branching": branching,
    "branching_full": branching_full,
    "hmm": hmm,
    "marsaglia": marsaglia,
}

_CLASSIFIERS: Dict[str, Callable[..., BenchmarkModel]] = {
    "logistic_regression": logistic_regression,
    "bayes_nn": bayes_nn,
}


def list_models() -> List[str]:
    """Every registry name, fixed models first."""
    names = list(_FIXED_MODELS)
    for prefix in _CLASSIFIERS:
        names.extend(f"{prefix}_{species}" for species in CLASSIFIERS["classes"])
    return names


def get_model(name: str, iris_path: Optional[str] = None) -> BenchmarkModel:
    """
    Build a benchmark model by registry name.

    Args:
        name: One of ``list_models()``
        iris_path: Iris CSV for the classifier models (default from configuration)

    Raises:
        UnknownModelError: The name is not in the catalogue
    """
    if name in _FIXED_MODELS:
        model = _FIXED_MODELS[name]()
    else:
        for prefix, builder in _CLASSIFIERS.items():
            species = name[len(prefix) + 1:] if name.startswith(prefix + "_") else None
            if species in CLASSIFIERS["classes"]:
                model = builder(species, iris_path)
                break
        else:
            raise UnknownModelError(f"Unknown model {name!r}; available: {', '.join(list_models())}")

    logger.info(f"Built model {model.name} (metric {model.metric})")
    return model
