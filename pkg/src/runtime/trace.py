"""
Execution traces for probabilistic programs.

A model program is an ordinary Python callable that receives a ModelContext
and declares its random choices through ``ctx.sample_at(base, dist)``, its
conditioning through ``ctx.observe_at(dist, value)`` and its outputs through
``ctx.predict(name, value)``. Running it under ``run_model`` produces an
immutable Trace: the database of addressed choices plus the log-likelihood
P*(x) of the execution.

Re-executions reuse the values of a previous trace wherever the program
visits the same address with the same distribution variant, which is what
single-site kernels need to change one variable at a time.
"""

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from .distributions import NEG_INF, Distribution


@dataclass(frozen=True, order=True)
class Address:
    """Stable identity of a random choice: the site name plus its visit count in one execution."""

    base: str
    occurrence: int = 0

    def __str__(self) -> str:
        return f"{self.base}#{self.occurrence}"


@dataclass(frozen=True)
class ChoiceRecord:
    """One random choice of a trace, scored under the parameters in force when it was visited."""

    address: Address
    dist: Distribution
    value: Any
    log_prob: float
    fresh: bool = False


@dataclass(frozen=True)
class Trace:
    """
    One execution of a model program.

    Attributes:
        choices: Address -> ChoiceRecord in execution order
        observes_ll: Sum of the log-likelihoods of all conditioning statements
        predicts: Values recorded through ``predict``
        total_ll: Sum of every choice log_prob plus observes_ll
    """

    choices: Mapping[Address, ChoiceRecord]
    observes_ll: float
    predicts: Mapping[str, Any]
    total_ll: float

    @property
    def size(self) -> int:
        return len(self.choices)

    @property
    def is_possible(self) -> bool:
        return self.total_ll > NEG_INF

    def value(self, base: str, occurrence: int = 0) -> Any:
        return self.choices[Address(base, occurrence)].value

    def addresses(self) -> List[Address]:
        return list(self.choices)


ForcedValue = Tuple[Address, Any]
FreshCache = Dict[Tuple[Address, type], Any]


class Chain:
    """
    Per-chain state shared by every kernel: the random stream and the
    likelihood-evaluation counter. A chain is owned by exactly one thread.
    """

    def __init__(self, seed: Optional[int] = None, rng: Optional[np.random.Generator] = None):
        self.seed = seed
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.ll_count = 0


class _ImpossibleExecution(Exception):
    """Internal signal: the execution reached a -inf term and is abandoned."""


class ModelContext:
    """
    The handle a model program receives. It records choices, observations
    and predictions for one execution.
    """

    def __init__(
        self,
        reuse: Optional[Mapping[Address, ChoiceRecord]],
        forced: Optional[ForcedValue],
        rng: np.random.Generator,
        fresh: Optional[FreshCache] = None,
    ):
        self._reuse = reuse or {}
        self._forced = forced
        self._rng = rng
        self._fresh = fresh
        self._counters: Dict[str, int] = {}
        self.choices: Dict[Address, ChoiceRecord] = {}
        self.choices_ll = 0.0
        self.observes_ll = 0.0
        self.predicts: Dict[str, Any] = {}

    def _next_address(self, base: str) -> Address:
        occurrence = self._counters.get(base, 0)
        self._counters[base] = occurrence + 1
        return Address(base, occurrence)

    def sample_at(self, base: str, dist: Distribution) -> Any:
        """
        Visit the random choice named ``base``.

        Returns the pinned value if this address is forced, the previous value
        if the reuse database holds one drawn from the same distribution
        variant, and a fresh draw from ``dist`` otherwise.
        """
        address = self._next_address(base)
        variant = type(dist)
        fresh = False

        if self._forced is not None and self._forced[0] == address:
            value = self._forced[1]
        else:
            previous = self._reuse.get(address)
            if previous is not None and type(previous.dist) is variant:
                value = previous.value
            else:
                fresh = True
                key = (address, variant)
                if self._fresh is not None and key in self._fresh:
                    value = self._fresh[key]
                else:
                    value = dist.draw(self._rng)
                    if self._fresh is not None:
                        self._fresh[key] = value

        log_prob = dist.log_prob(value)
        self.choices[address] = ChoiceRecord(address, dist, value, log_prob, fresh)
        self.choices_ll += log_prob
        if log_prob == NEG_INF:
            raise _ImpossibleExecution(address)
        return value

    def observe_at(self, dist: Distribution, observed: Any) -> None:
        """Condition the execution on ``observed`` having been drawn from ``dist``."""
        self.factor(dist.log_prob(observed))

    def factor(self, log_weight: float) -> None:
        """Add an explicit log weight to the observation likelihood."""
        self.observes_ll += log_weight
        if log_weight == NEG_INF:
            raise _ImpossibleExecution("factor")

    def predict(self, name: str, value: Any) -> None:
        """Record an output of this execution; later calls with the same name overwrite."""
        self.predicts[name] = value

    def finish(self, possible: bool = True) -> Trace:
        total_ll = self.choices_ll + self.observes_ll if possible else NEG_INF
        return Trace(
            choices=MappingProxyType(self.choices),
            observes_ll=self.observes_ll,
            predicts=MappingProxyType(self.predicts),
            total_ll=total_ll,
        )


ModelProgram = Callable[[ModelContext], Any]


def run_model(
    prog: ModelProgram,
    reuse: Optional[Mapping[Address, ChoiceRecord]] = None,
    forced: Optional[ForcedValue] = None,
    *,
    chain: Chain,
    fresh: Optional[FreshCache] = None,
) -> Trace:
    """
    Execute a model program once and return its trace.

    Args:
        prog: The model program
        reuse: Choice database whose values are replayed where variants match
        forced: Optional (address, value) pinned for this execution
        chain: Owner of the random stream and the LL-evaluation counter
        fresh: Optional cache of fresh draws shared by several executions of one move

    Returns:
        The trace of the execution; total_ll is -inf if any term was -inf, in
        which case execution stopped at that term.
    """
    chain.ll_count += 1
    ctx = ModelContext(reuse, forced, chain.rng, fresh)
    try:
        prog(ctx)
    except _ImpossibleExecution:
        return ctx.finish(possible=False)
    return ctx.finish()


def _shared(record: ChoiceRecord, other: Mapping[Address, ChoiceRecord]) -> bool:
    match = other.get(record.address)
    return match is not None and type(match.dist) is type(record.dist)


def stale_records(old: Trace, new: Trace, selected: Optional[Address] = None) -> List[ChoiceRecord]:
    """Choices of ``old`` that ``new`` does not reuse, excluding the selected address."""
    return [r for a, r in old.choices.items() if a != selected and not _shared(r, new.choices)]


def fresh_records(old: Trace, new: Trace, selected: Optional[Address] = None) -> List[ChoiceRecord]:
    """Choices of ``new`` not reused from ``old``, excluding the selected address."""
    return stale_records(new, old, selected)


def _sum_log_probs(records: Iterable[ChoiceRecord]) -> float:
    total = 0.0
    for record in records:
        total += record.log_prob
    return total


def transdim_correction(old: Trace, new: Trace, selected: Optional[Address] = None) -> float:
    """
    Log factor log(|D| p_stale / (|D'| p_fresh)) for a move from ``old`` to ``new``.

    The selected variable's own prior terms are left to the kernel.
    """
    forward = math.log(old.size) + _sum_log_probs(stale_records(old, new, selected))
    backward = math.log(new.size) + _sum_log_probs(fresh_records(old, new, selected))
    return forward - backward
