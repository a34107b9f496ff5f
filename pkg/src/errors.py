"""
Exceptions raised by the SliceTrace runtime, inference engines and benchmarks.
"""


class SliceTraceError(Exception):
    """Base class for every error raised by this package."""


class DistributionError(SliceTraceError, ValueError):
    """A distribution was constructed with parameters outside their constraints."""


class ImpossibleModelError(SliceTraceError):
    """Forward sampling never produced a trace with finite likelihood."""


class SliceWidthError(SliceTraceError):
    """Step-out exceeded its doubling limit; the slice is unbounded or the target flat."""


class DegenerateSliceError(SliceTraceError):
    """Shrinkage exceeded its iteration limit without finding a point on the slice."""


class OracleCoverageError(SliceTraceError):
    """A grid oracle misses too much posterior mass compared with a wider reference grid."""


class DatasetError(SliceTraceError):
    """A dataset file does not have the expected composition."""


class DatasetParseError(DatasetError):
    """A dataset row could not be parsed."""

    def __init__(self, path: str, line_number: int, message: str):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {message}")


class UnknownModelError(SliceTraceError, KeyError):
    """The requested benchmark model is not in the catalogue."""
