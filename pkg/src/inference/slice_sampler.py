"""
Trans-dimensional slice sampling over program traces.

One slice step picks a random choice of the current trace uniformly and
slices along that single coordinate: an auxiliary height under the trace
likelihood, an interval around the current value found by exponential
step-out, and shrinkage until a candidate lands above the height. Every
candidate is a full re-execution of the program with the selected choice
pinned, scored with the trans-dimensional correction relative to the trace
the move started from.

Continuous choices are sliced on their natural support. Discrete choices are
sliced on a uniform coordinate q in [0, 1) mapped through the prior quantile
function, starting from the fixed interval [0, 1]; coordinates outside
[0, 1) score -inf.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Protocol, Tuple

import numpy as np

from ..errors import DegenerateSliceError, SliceWidthError
from ..runtime.distributions import NEG_INF
from ..runtime.trace import Address, Chain, FreshCache, ModelProgram, Trace, run_model, transdim_correction

logger = logging.getLogger(__name__)

# maps out-of-range quantile coordinates outside every integer support
_OUT_OF_SUPPORT = -1


@dataclass
class SliceConfig:
    """
    Tuning of the slice kernel.

    Attributes:
        initial_width: Width w of the randomly positioned initial window
        max_stepout_doublings: Doublings allowed before the slice is declared unbounded
        max_shrink_iters: Shrinkage candidates allowed before the slice is declared degenerate
        halve_initial_width: Halve w while either x - w or x + w lies below the height
            before stepping out (off by default; makes the width state-dependent)
    """

    initial_width: float = 1.0
    max_stepout_doublings: int = 60
    max_shrink_iters: int = 1000
    halve_initial_width: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.initial_width) and self.initial_width > 0.0):
            raise ValueError(f"initial_width must be positive, got {self.initial_width}")
        if self.max_stepout_doublings < 1:
            raise ValueError(f"max_stepout_doublings must be positive, got {self.max_stepout_doublings}")
        if self.max_shrink_iters < 1:
            raise ValueError(f"max_shrink_iters must be positive, got {self.max_shrink_iters}")


@dataclass
class KernelMove:
    """
    Bookkeeping of one kernel transition.

    ``selection_prob`` is the probability 1/|D| of picking ``selected``;
    ``aux_randoms`` collects the uniforms the move consumed, whose count is
    the dimension of the move's auxiliary randomness.
    """

    selected: Address
    selection_prob: float
    rng: np.random.Generator = field(repr=False)
    aux_randoms: List[float] = field(default_factory=list)

    @classmethod
    def select(cls, trace: Trace, rng: np.random.Generator) -> "KernelMove":
        addresses = list(trace.choices)
        selected = addresses[int(rng.integers(len(addresses)))]
        return cls(selected=selected, selection_prob=1.0 / len(addresses), rng=rng)

    def random(self) -> float:
        u = float(self.rng.random())
        self.aux_randoms.append(u)
        return u


def corrected_ll(
    old: Trace,
    candidate_value: Any,
    selected: Address,
    prog: ModelProgram,
    chain: Chain,
    fresh: Optional[FreshCache] = None,
    correct: bool = True,
) -> Tuple[Trace, float]:
    """
    Re-execute the program with ``selected`` pinned to ``candidate_value``.

    Args:
        old: Trace the move started from; its other values are reused
        candidate_value: Value pinned at the selected address
        selected: Address being sliced
        prog: Model program
        chain: Chain paying the LL evaluation
        fresh: Cache of fresh draws shared across the candidates of one move
        correct: Apply the trans-dimensional correction (False reproduces the naive kernel)

    Returns:
        (new trace, its total_ll plus the correction relative to ``old``)
    """
    new = run_model(prog, old.choices, forced=(selected, candidate_value), chain=chain, fresh=fresh)
    if not new.is_possible or selected not in new.choices:
        return new, NEG_INF
    if not correct:
        return new, new.total_ll
    return new, new.total_ll + transdim_correction(old, new, selected)


class UniformSource(Protocol):
    """Anything handing out uniforms on [0, 1): a numpy Generator or a KernelMove."""

    def random(self) -> float: ...


def log_height(ll: float, uniforms: UniformSource) -> float:
    """Log of a height drawn uniformly from (0, exp(ll)]."""
    return ll + math.log(1.0 - uniforms.random())


class SliceTarget:
    """
    The one-dimensional function sliced by a move: candidate coordinates of
    the selected choice scored against the move's originating trace.

    Scores are cached per coordinate so that step-out endpoints revisited by
    the doubling acceptance check are not re-executed; step-out places every
    endpoint on the lattice origin + j * width so those revisits hit the
    cache exactly. Fresh draws made for addresses absent from the originating
    trace are shared by every candidate of the move.
    """

    def __init__(self, old: Trace, selected: Address, prog: ModelProgram, chain: Chain, correct: bool = True):
        self.old = old
        self.selected = selected
        self.prog = prog
        self.chain = chain
        self.correct = correct
        self.prior = old.choices[selected].dist
        self.discrete = self.prior.is_discrete
        # (origin, width) of the doubling lattice, set by step_out on continuous choices
        self.window: Optional[Tuple[float, float]] = None
        self._fresh: FreshCache = {}
        self._cache: Dict[float, Tuple[Trace, float]] = {}

    def lattice(self, j: int) -> float:
        origin, width = self.window
        return origin + j * width

    def lattice_index(self, coord: float) -> int:
        origin, width = self.window
        return int(round((coord - origin) / width))

    def value_at(self, coord: float) -> Any:
        if not self.discrete:
            return coord
        if not 0.0 <= coord < 1.0:
            return _OUT_OF_SUPPORT
        return self.prior.quantile(coord)

    def evaluate(self, coord: float) -> Tuple[Trace, float]:
        if coord in self._cache:
            return self._cache[coord]
        trace, score = corrected_ll(
            self.old, self.value_at(coord), self.selected, self.prog, self.chain, self._fresh, self.correct
        )
        if self.discrete and score > NEG_INF:
            # the quantile embedding already carries the prior of the selected choice
            score -= trace.choices[self.selected].log_prob
        self._cache[coord] = (trace, score)
        return trace, score

    def score(self, coord: float) -> float:
        return self.evaluate(coord)[1]

    def current_score(self) -> float:
        record = self.old.choices[self.selected]
        if self.discrete:
            return self.old.total_ll - record.log_prob
        return self.old.total_ll

    def current_coordinate(self, move: KernelMove) -> float:
        """The coordinate of the current value; for discrete choices a uniform draw within its cdf step."""
        value = self.old.choices[self.selected].value
        if not self.discrete:
            return value
        upper = self.prior.cdf(value)
        lower = self.prior.cdf(value - 1)
        return lower + move.random() * (upper - lower)


def _target(target: Optional[SliceTarget], old: Trace, selected: Address, prog: ModelProgram, chain: Chain) -> SliceTarget:
    if target is not None:
        return target
    return SliceTarget(old, selected, prog, chain)


def _halved_width(target: SliceTarget, x: float, logu: float, cfg: SliceConfig) -> float:
    w = cfg.initial_width
    for _ in range(cfg.max_stepout_doublings):
        if target.score(x - w) > logu and target.score(x + w) > logu:
            break
        w /= 2.0
    return w


def step_out(
    selected: Address,
    x: float,
    logu: float,
    old: Trace,
    prog: ModelProgram,
    cfg: SliceConfig,
    chain: Chain,
    target: Optional[SliceTarget] = None,
    move: Optional[KernelMove] = None,
) -> Tuple[float, float]:
    """
    Find an interval around ``x`` whose endpoints both lie on or below the height.

    The initial window of width w is placed uniformly at random around x;
    while either endpoint is still above the height, a randomly chosen side is
    extended by the current width, doubling the interval. Discrete choices
    live on the quantile coordinate, whose interval is [0, 1] from the start:
    both endpoints are still scored so that every step pays for them, but
    nothing is grown.

    Raises:
        SliceWidthError: The doubling limit was reached with an endpoint still above the height
    """
    target = _target(target, old, selected, prog, chain)
    move = move or KernelMove(selected, 1.0 / old.size, chain.rng)

    if target.discrete:
        target.score(0.0)
        target.score(1.0)
        return 0.0, 1.0

    width = _halved_width(target, x, logu, cfg) if cfg.halve_initial_width else cfg.initial_width
    target.window = (x - width * move.random(), width)

    j_lo, j_hi = 0, 1
    lo_above = target.score(target.lattice(j_lo)) > logu
    hi_above = target.score(target.lattice(j_hi)) > logu

    for _ in range(cfg.max_stepout_doublings):
        if not (lo_above or hi_above):
            break
        if move.random() < 0.5:
            j_lo -= j_hi - j_lo
            lo_above = target.score(target.lattice(j_lo)) > logu
        else:
            j_hi += j_hi - j_lo
            hi_above = target.score(target.lattice(j_hi)) > logu

    if not (lo_above or hi_above):
        return target.lattice(j_lo), target.lattice(j_hi)
    logger.error(
        f"Step-out for {selected} exceeded {cfg.max_stepout_doublings} doublings "
        f"(interval [{target.lattice(j_lo)}, {target.lattice(j_hi)}])"
    )
    raise SliceWidthError(
        f"slice around {selected} still open after {cfg.max_stepout_doublings} doublings; target may be flat or improper"
    )


def _doubling_accepts(target: SliceTarget, x0: float, x1: float, logu: float, lo: float, hi: float) -> bool:
    """Whether stepping out from ``x1`` could have produced the interval [lo, hi]."""
    if target.window is None:
        return True
    j_lo, j_hi = target.lattice_index(lo), target.lattice_index(hi)
    diverged = False
    while j_hi - j_lo > 1:
        j_mid = (j_lo + j_hi) // 2
        mid = target.lattice(j_mid)
        if (x0 < mid) != (x1 < mid):
            diverged = True
        if x1 < mid:
            j_hi = j_mid
        else:
            j_lo = j_mid
        if diverged and logu >= target.score(target.lattice(j_lo)) and logu >= target.score(target.lattice(j_hi)):
            return False
    return True


def shrink_sample(
    selected: Address,
    x: float,
    logu: float,
    x_l: float,
    x_r: float,
    old: Trace,
    prog: ModelProgram,
    cfg: SliceConfig,
    chain: Chain,
    target: Optional[SliceTarget] = None,
    move: Optional[KernelMove] = None,
) -> Tuple[Trace, Any]:
    """
    Draw candidates uniformly from [x_l, x_r], shrinking the side beyond each
    rejected candidate towards ``x``, until one lies above the height.

    Returns:
        (trace of the accepted candidate, the accepted value)

    Raises:
        DegenerateSliceError: No candidate accepted within ``cfg.max_shrink_iters``
    """
    target = _target(target, old, selected, prog, chain)
    move = move or KernelMove(selected, 1.0 / old.size, chain.rng)
    lo, hi = x_l, x_r

    for _ in range(cfg.max_shrink_iters):
        candidate = lo + move.random() * (hi - lo)
        trace, score = target.evaluate(candidate)
        if score > logu and _doubling_accepts(target, x, candidate, logu, x_l, x_r):
            return trace, target.value_at(candidate)
        if candidate > x:
            hi = candidate
        else:
            lo = candidate

    logger.error(f"Shrinkage for {selected} found no point above the slice in {cfg.max_shrink_iters} candidates")
    raise DegenerateSliceError(f"slice around {selected} collapsed after {cfg.max_shrink_iters} shrink iterations")


def slice_step(
    current: Trace,
    prog: ModelProgram,
    cfg: SliceConfig,
    chain: Chain,
    correct: bool = True,
) -> Trace:
    """
    One trans-dimensional slice transition on a uniformly selected choice.

    Args:
        current: Current trace (finite likelihood)
        prog: Model program
        cfg: Slice configuration
        chain: Chain paying the LL evaluations
        correct: Apply the trans-dimensional correction to every candidate

    Returns:
        The trace of the accepted candidate
    """
    move = KernelMove.select(current, chain.rng)
    target = SliceTarget(current, move.selected, prog, chain, correct)

    x = target.current_coordinate(move)
    logu = log_height(target.current_score(), move)
    x_l, x_r = step_out(move.selected, x, logu, current, prog, cfg, chain, target, move)
    new, _ = shrink_sample(move.selected, x, logu, x_l, x_r, current, prog, cfg, chain, target, move)
    return new


def naive_slice_step(current: Trace, prog: ModelProgram, cfg: SliceConfig, chain: Chain) -> Trace:
    """Slice transition that compares traces of different dimension without correction."""
    return slice_step(current, prog, cfg, chain, correct=False)
