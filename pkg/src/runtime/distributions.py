"""
Stochastic primitives used by model programs and by the slice sampler.

Each distribution is an immutable value with an exact log-density (or
log-mass), a sampler driven by a numpy Generator, and cdf/quantile functions.
log_prob is scalar and kept on the math module because it sits on the model
execution hot path; cdf and quantile go through scipy.special and accept
scalars or numpy arrays.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Sequence, Tuple, Union

import numpy as np
from scipy import special

from ..errors import DistributionError

NEG_INF = float("-inf")
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

ArrayLike = Union[float, int, np.ndarray]


def _check_probability(p: ArrayLike) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"quantile probability must lie in [0, 1], got {p!r}")
    return arr


def _same_shape(result: np.ndarray, like: ArrayLike):
    if np.ndim(like) == 0:
        return result.item()
    return result


def _is_integer(x: Any) -> bool:
    if isinstance(x, (bool, np.bool_)):
        return True
    try:
        return float(x).is_integer()
    except (TypeError, ValueError, OverflowError):
        return False


class Distribution(ABC):
    """Common interface of every stochastic primitive."""

    is_discrete: ClassVar[bool] = False

    @abstractmethod
    def log_prob(self, x: Any) -> float:
        """Log density (continuous) or log mass (discrete); -inf outside the support."""

    @abstractmethod
    def draw(self, rng: np.random.Generator) -> Any:
        """Draw one value using the caller's random stream."""

    @abstractmethod
    def cdf(self, x: ArrayLike) -> ArrayLike:
        """P(X <= x)."""

    @abstractmethod
    def quantile(self, p: ArrayLike) -> ArrayLike:
        """Generalized inverse of the cdf."""

    @property
    def kind(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class Normal(Distribution):
    """Normal distribution parameterized by mean and standard deviation."""

    mean: float
    std: float

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise DistributionError(f"Normal mean must be finite, got {self.mean}")
        if not (math.isfinite(self.std) and self.std > 0.0):
            raise DistributionError(f"Normal std must be positive, got {self.std}")

    def log_prob(self, x: Any) -> float:
        z = (x - self.mean) / self.std
        return -_HALF_LOG_2PI - math.log(self.std) - 0.5 * z * z

    def draw(self, rng: np.random.Generator) -> float:
        return float(rng.normal(self.mean, self.std))

    def cdf(self, x: ArrayLike) -> ArrayLike:
        z = (np.asarray(x, dtype=float) - self.mean) / self.std
        return _same_shape(special.ndtr(z), x)

    def quantile(self, p: ArrayLike) -> ArrayLike:
        arr = _check_probability(p)
        return _same_shape(self.mean + self.std * special.ndtri(arr), p)


@dataclass(frozen=True)
class Uniform(Distribution):
    """Continuous uniform distribution on [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.hi > self.lo):
            raise DistributionError(f"Uniform needs finite lo < hi, got ({self.lo}, {self.hi})")

    def log_prob(self, x: Any) -> float:
        if self.lo <= x <= self.hi:
            return -math.log(self.hi - self.lo)
        return NEG_INF

    def draw(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.lo, self.hi))

    def cdf(self, x: ArrayLike) -> ArrayLike:
        arr = (np.asarray(x, dtype=float) - self.lo) / (self.hi - self.lo)
        return _same_shape(np.clip(arr, 0.0, 1.0), x)

    def quantile(self, p: ArrayLike) -> ArrayLike:
        arr = _check_probability(p)
        return _same_shape(self.lo + arr * (self.hi - self.lo), p)


@dataclass(frozen=True)
class InverseGamma(Distribution):
    """Inverse-gamma distribution with shape a and scale b: density b^a / G(a) x^(-a-1) exp(-b/x)."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (math.isfinite(self.shape) and self.shape > 0.0):
            raise DistributionError(f"InverseGamma shape must be positive, got {self.shape}")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise DistributionError(f"InverseGamma scale must be positive, got {self.scale}")

    def log_prob(self, x: Any) -> float:
        if not x > 0.0:
            return NEG_INF
        a, b = self.shape, self.scale
        return a * math.log(b) - math.lgamma(a) - (a + 1.0) * math.log(x) - b / x

    def draw(self, rng: np.random.Generator) -> float:
        return float(self.scale / rng.gamma(self.shape, 1.0))

    def cdf(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            upper = special.gammaincc(self.shape, self.scale / np.where(arr > 0.0, arr, 1.0))
        return _same_shape(np.where(arr > 0.0, upper, 0.0), x)

    def quantile(self, p: ArrayLike) -> ArrayLike:
        arr = _check_probability(p)
        with np.errstate(divide="ignore"):
            result = self.scale / special.gammainccinv(self.shape, arr)
        return _same_shape(result, p)


class _IntegerSupport(Distribution):
    """Shared cdf/quantile machinery for distributions on the integers 0..n."""

    is_discrete: ClassVar[bool] = True

    @abstractmethod
    def _upper_support(self) -> float:
        """Largest integer that can carry mass."""

    @abstractmethod
    def _scalar_cdf(self, k: int) -> float:
        """P(X <= k) for an integer k >= 0."""

    def cdf(self, x: ArrayLike) -> ArrayLike:
        arr = np.floor(np.asarray(x, dtype=float))
        flat = np.array([self._scalar_cdf(int(k)) if k >= 0 else 0.0 for k in np.minimum(arr, self._upper_support()).ravel()])
        return _same_shape(flat.reshape(arr.shape), x)

    def quantile(self, p: ArrayLike) -> ArrayLike:
        arr = _check_probability(p)
        flat = np.array([self._scalar_quantile(float(q)) for q in arr.ravel()], dtype=int)
        return _same_shape(flat.reshape(arr.shape), p)

    def _scalar_quantile(self, p: float) -> int:
        """Smallest support point k with mass > 0 and cdf(k) >= p."""
        k = 0
        total = 0.0
        limit = self._upper_support()
        while k <= limit:
            mass = math.exp(self.log_prob(k))
            total += mass
            if mass > 0.0 and total >= p:
                return k
            k += 1
        return int(min(k, limit))

    def draw(self, rng: np.random.Generator) -> int:
        # 1 - random() lies in (0, 1], so zero-mass points are never returned
        return self._scalar_quantile(1.0 - rng.random())


@dataclass(frozen=True)
class Poisson(_IntegerSupport):
    """Poisson distribution with a positive rate."""

    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0.0):
            raise DistributionError(f"Poisson rate must be positive, got {self.rate}")

    def log_prob(self, x: Any) -> float:
        if not _is_integer(x) or x < 0:
            return NEG_INF
        k = int(x)
        return k * math.log(self.rate) - self.rate - math.lgamma(k + 1.0)

    def _upper_support(self) -> float:
        # far past any representable tail mass for the rates used here
        return self.rate + 40.0 * math.sqrt(self.rate) + 100.0

    def _scalar_cdf(self, k: int) -> float:
        return float(special.pdtr(k, self.rate))


@dataclass(frozen=True)
class Bernoulli(_IntegerSupport):
    """Bernoulli distribution on {0, 1}."""

    p: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise DistributionError(f"Bernoulli p must lie in [0, 1], got {self.p}")

    def log_prob(self, x: Any) -> float:
        if x == 1:
            return math.log(self.p) if self.p > 0.0 else NEG_INF
        if x == 0:
            return math.log1p(-self.p) if self.p < 1.0 else NEG_INF
        return NEG_INF

    def draw(self, rng: np.random.Generator) -> int:
        return 1 if rng.random() < self.p else 0

    def _upper_support(self) -> float:
        return 1.0

    def _scalar_cdf(self, k: int) -> float:
        return 1.0 - self.p if k == 0 else 1.0


@dataclass(frozen=True, init=False)
class Categorical(_IntegerSupport):
    """Distribution over the indices 0..len(probs)-1."""

    probs: Tuple[float, ...]

    def __init__(self, probs: Sequence[float]):
        object.__setattr__(self, "probs", tuple(float(p) for p in probs))
        self.__post_init__()

    def __post_init__(self):
        if len(self.probs) == 0:
            raise DistributionError("Categorical needs at least one category")
        if any(not (p >= 0.0) for p in self.probs):
            raise DistributionError(f"Categorical probabilities must be non-negative, got {self.probs}")
        if abs(math.fsum(self.probs) - 1.0) > 1e-9:
            raise DistributionError(f"Categorical probabilities must sum to 1, got {math.fsum(self.probs)}")

    def log_prob(self, x: Any) -> float:
        if not _is_integer(x) or not 0 <= x < len(self.probs):
            return NEG_INF
        p = self.probs[int(x)]
        return math.log(p) if p > 0.0 else NEG_INF

    def _upper_support(self) -> float:
        return float(len(self.probs) - 1)

    def _scalar_cdf(self, k: int) -> float:
        return min(1.0, math.fsum(self.probs[: k + 1]))
