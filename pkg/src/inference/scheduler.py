"""
Kernel composition and budgeted inference loops.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Optional

from ..runtime.trace import Chain, ModelProgram, Trace
from .metropolis import initialize_trace, mh_step
from .samples import Sample
from .slice_sampler import SliceConfig, naive_slice_step, slice_step

logger = logging.getLogger(__name__)

KERNEL_KINDS = ("mh", "slice", "naive-slice", "mixture")


@dataclass
class KernelSpec:
    """
    Which transition kernel a chain runs.

    Attributes:
        kind: One of "mh", "slice", "naive-slice", "mixture"
        mh_weight: Probability of a Metropolis step in a mixture (beta)
        slice: Configuration of the slice kernel
    """

    kind: str = "slice"
    mh_weight: float = 0.0
    slice: SliceConfig = field(default_factory=SliceConfig)

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"Unknown kernel kind {self.kind!r}; expected one of {', '.join(KERNEL_KINDS)}")
        if not 0.0 <= self.mh_weight <= 1.0:
            raise ValueError(f"mixture mh_weight must lie in [0, 1], got {self.mh_weight}")

    @classmethod
    def parse(cls, text: str, slice_config: Optional[SliceConfig] = None) -> "KernelSpec":
        """Parse the CLI form: ``mh``, ``slice``, ``naive-slice`` or ``mix:BETA``."""
        text = text.strip()
        config = slice_config or SliceConfig()
        if text.startswith("mix:"):
            try:
                weight = float(text[4:])
            except ValueError:
                raise ValueError(f"Mixture weight in {text!r} is not a number")
            return cls("mixture", weight, config)
        return cls(text, 0.0, config)

    @property
    def label(self) -> str:
        if self.kind == "mixture":
            return f"mix:{self.mh_weight:g}"
        return self.kind


def ll_counter(chain: Chain) -> int:
    """LL evaluations the chain has spent so far."""
    return chain.ll_count


def _choose_kernel(spec: KernelSpec, chain: Chain) -> str:
    if spec.kind != "mixture":
        return spec.kind
    # a coin with a certain outcome consumes no randomness
    if spec.mh_weight >= 1.0:
        return "mh"
    if spec.mh_weight <= 0.0:
        return "slice"
    return "mh" if chain.rng.random() < spec.mh_weight else "slice"


def transition(trace: Trace, prog: ModelProgram, kernel: str, spec: KernelSpec, chain: Chain) -> Trace:
    """Apply one step of the named kernel."""
    if kernel == "mh":
        return mh_step(trace, prog, chain)
    if kernel == "slice":
        return slice_step(trace, prog, spec.slice, chain)
    if kernel == "naive-slice":
        return naive_slice_step(trace, prog, spec.slice, chain)
    raise ValueError(f"Unknown kernel {kernel!r}")


def iter_inference(prog: ModelProgram, spec: KernelSpec, budget: int, chain: Chain) -> Iterator[Sample]:
    """
    Stream samples from one chain until its LL counter reaches ``budget``.

    The step that crosses the budget is completed; every step records one
    sample carrying the cumulative LL count.
    """
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")

    trace = initialize_trace(prog, chain)
    yield Sample(chain.ll_count, dict(trace.predicts))

    while chain.ll_count < budget:
        kernel = _choose_kernel(spec, chain)
        trace = transition(trace, prog, kernel, spec, chain)
        yield Sample(chain.ll_count, dict(trace.predicts), kernel)


def run_inference(prog: ModelProgram, spec: KernelSpec, budget: int, seed: Optional[int] = None) -> List[Sample]:
    """
    Run one chain with a fresh seeded random stream.

    Args:
        prog: Model program
        spec: Kernel specification
        budget: LL-evaluation budget
        seed: Seed of the chain's random stream

    Returns:
        The recorded samples in order
    """
    chain = Chain(seed)
    try:
        samples = list(iter_inference(prog, spec, budget, chain))
    except Exception as e:
        logger.error(f"Chain with kernel {spec.label} and seed {seed} failed after {chain.ll_count} LL evaluations: {e}")
        raise

    logger.info(f"Chain {spec.label} (seed {seed}) finished: {len(samples)} samples, {chain.ll_count} LL evaluations")
    return samples
