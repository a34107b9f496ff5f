"""
Single-site Metropolis-Hastings with proposals from the prior.

Each step picks one random choice of the current trace uniformly, redraws it
from the distribution it was recorded with, re-executes the program reusing
every other value and accepts with the trans-dimensional acceptance ratio.
"""

import logging
import math
from typing import List, Optional

from ..errors import ImpossibleModelError
from ..runtime.trace import Chain, ModelProgram, Trace, run_model, transdim_correction
from .samples import Sample

logger = logging.getLogger(__name__)

MAX_INIT_ATTEMPTS = 10_000


def initialize_trace(prog: ModelProgram, chain: Chain, max_attempts: int = MAX_INIT_ATTEMPTS) -> Trace:
    """
    Forward-sample the program from its priors until the trace is possible.

    Args:
        prog: Model program
        chain: Chain whose rng and LL counter are used
        max_attempts: Consecutive impossible traces tolerated

    Returns:
        The first trace with finite likelihood
    """
    for attempt in range(1, max_attempts + 1):
        trace = run_model(prog, chain=chain)
        if trace.is_possible:
            if attempt > 1:
                logger.info(f"Initial trace found after {attempt} attempts")
            return trace

    logger.error(f"No possible trace in {max_attempts} forward executions")
    raise ImpossibleModelError(f"impossible model: {max_attempts} consecutive initial traces had -inf likelihood")


def mh_step(current: Trace, prog: ModelProgram, chain: Chain) -> Trace:
    """
    One single-site Metropolis-Hastings transition.

    Returns the new trace on acceptance and ``current`` itself on rejection.
    """
    addresses = list(current.choices)
    selected = addresses[int(chain.rng.integers(len(addresses)))]
    record = current.choices[selected]
    proposal = record.dist.draw(chain.rng)

    new = run_model(prog, current.choices, forced=(selected, proposal), chain=chain)
    if not new.is_possible or selected not in new.choices:
        return current

    log_alpha = (
        new.total_ll
        - current.total_ll
        + transdim_correction(current, new, selected)
        + record.log_prob
        - new.choices[selected].log_prob
    )
    if log_alpha >= 0.0:
        return new
    u = chain.rng.random()
    if u > 0.0 and math.log(u) < log_alpha:
        return new
    return current


def run_mh(prog: ModelProgram, budget: int, chain: Optional[Chain] = None, seed: Optional[int] = None) -> List[Sample]:
    """
    Run Metropolis-Hastings until ``budget`` likelihood evaluations are spent.

    Args:
        prog: Model program
        budget: LL-evaluation budget (>= 1)
        chain: Chain to run on; built from ``seed`` when omitted
        seed: Seed for a new chain

    Returns:
        One Sample per step, starting with the initial trace
    """
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")
    chain = chain or Chain(seed)

    trace = initialize_trace(prog, chain)
    samples = [Sample(chain.ll_count, dict(trace.predicts))]
    while chain.ll_count < budget:
        trace = mh_step(trace, prog, chain)
        samples.append(Sample(chain.ll_count, dict(trace.predicts), "mh"))

    logger.info(f"Metropolis-Hastings finished: {len(samples)} samples, {chain.ll_count} LL evaluations")
    return samples
