from dataclasses import dataclass, field
from typing import Any, Dict


@dataclass(frozen=True)
class Sample:
    """
    One recorded posterior sample.

    Attributes:
        ll_count: Cumulative LL evaluations of the chain when the sample was recorded
        predicts: The predict map of the chain's current trace
        kernel: Kernel that produced the transition ("init" for the initial trace)
    """

    ll_count: int
    predicts: Dict[str, Any] = field(default_factory=dict)
    kernel: str = "init"
