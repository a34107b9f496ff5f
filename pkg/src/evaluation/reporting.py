"""
CSV artifacts: quartile summaries, convergence curves, sample streams and
posterior histograms.

Floats are written with repr so the output is byte-identical for identical
inputs; infinite metrics appear as ``inf``.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Iterator, List, Mapping, Sequence, TextIO, Tuple, Union

import numpy as np

from ..inference.samples import Sample
from .experiment import ConvergenceCurve, QuartileSummary

logger = logging.getLogger(__name__)

QUARTILE_HEADER = ("ll_count", "kernel", "p25", "median", "p75")
CURVE_HEADER = ("run_id", "kernel", "ll_count", "metric")
SAMPLE_HEADER = ("ll_count", "name", "value")
HISTOGRAM_HEADER = ("bin_lo", "bin_hi", "mass")


@dataclass(frozen=True)
class PosteriorHistogram:
    """Histogram of a predicted value; masses are bin counts over the sample count."""

    name: str
    edges: np.ndarray
    masses: np.ndarray

    def rows(self) -> Iterator[Tuple[float, float, float]]:
        for lo, hi, mass in zip(self.edges[:-1], self.edges[1:], self.masses):
            yield float(lo), float(hi), float(mass)


def _scalar_predict(sample: Sample, name: str) -> float:
    if name in sample.predicts:
        value = sample.predicts[name]
        if np.ndim(value) != 0:
            raise ValueError(f"predict {name!r} is a vector; pick one element such as {name}[0]")
        return float(value)
    flat = dict(flatten_predicts(sample.predicts))
    if name not in flat:
        raise ValueError(f"no scalar predict {name!r}; available: {', '.join(flat)}")
    return float(flat[name])


def posterior_histogram(samples: Sequence[Sample], name: str, bins: int = 50) -> PosteriorHistogram:
    """Histogram of the scalar predict ``name`` over all samples; ``states[3]`` selects one vector element."""
    if bins < 1:
        raise ValueError(f"bins must be positive, got {bins}")
    values = np.array([_scalar_predict(s, name) for s in samples])
    if values.size == 0:
        raise ValueError("posterior_histogram needs at least one sample")
    counts, edges = np.histogram(values, bins=bins)
    return PosteriorHistogram(name, edges, counts / values.size)


def _format(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def flatten_predicts(predicts: Mapping[str, Any]) -> List[Tuple[str, Any]]:
    """Predict entries as (name, scalar); vector values become ``name[i]``."""
    rows = []
    for name, value in predicts.items():
        if np.ndim(value) == 0:
            rows.append((name, value))
        else:
            rows.extend((f"{name}[{i}]", item) for i, item in enumerate(np.ravel(value)))
    return rows


def _quartile_rows(summaries: Iterable[QuartileSummary]):
    for summary in summaries:
        for ll_count, p25, median, p75 in summary.rows:
            yield ll_count, summary.kernel, p25, median, p75


def _curve_rows(curves: Iterable[ConvergenceCurve]):
    for curve in curves:
        for ll_count, metric in curve.checkpoints:
            yield curve.run_id, curve.kernel, ll_count, metric


def _sample_rows(samples: Iterable[Sample]):
    for sample in samples:
        for name, value in flatten_predicts(sample.predicts):
            yield sample.ll_count, name, value


def _write_rows(handle: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(v) for v in row])


def write_samples(samples: Iterable[Sample], handle: TextIO) -> None:
    """Write a sample stream to an open text handle."""
    _write_rows(handle, SAMPLE_HEADER, _sample_rows(samples))


def _write(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    try:
        with open(path, "w", newline="") as handle:
            _write_rows(handle, header, rows)
    except OSError as e:
        logger.error(f"Failed to write CSV {path}: {e}")
        raise OSError(e.errno, f"cannot write CSV {path}: {e.strerror}", str(path)) from e
    logger.info(f"Wrote {path}")


def emit_csv(data: Any, path: Union[str, Path]) -> None:
    """
    Write a QuartileSummary (or a sequence/mapping of them), a ConvergenceCurve
    (or a sequence of them), a PosteriorHistogram, or a sample stream as CSV.

    Raises:
        OSError: The file cannot be written; the message names the path
    """
    if isinstance(data, Mapping):
        data = list(data.values())
    if isinstance(data, (QuartileSummary, ConvergenceCurve, Sample)):
        data = [data]

    if isinstance(data, PosteriorHistogram):
        _write(path, HISTOGRAM_HEADER, data.rows())
        return

    items = list(data)
    if items and all(isinstance(item, QuartileSummary) for item in items):
        _write(path, QUARTILE_HEADER, _quartile_rows(items))
    elif items and all(isinstance(item, ConvergenceCurve) for item in items):
        _write(path, CURVE_HEADER, _curve_rows(items))
    elif all(isinstance(item, Sample) for item in items):
        _write(path, SAMPLE_HEADER, _sample_rows(items))
    else:
        raise TypeError(f"emit_csv cannot write {type(items[0]).__name__} items")
