import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from data.benchmark_constants import IRIS
from ..config import get_config
from ..errors import DatasetError, DatasetParseError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IrisDataset:
    """
    The Iris measurements with their species labels.

    Attributes:
        features: (150, 4) array of raw, unstandardized measurements
        labels: Species name per row ("setosa", "versicolor" or "virginica")
    """

    features: np.ndarray
    labels: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)

    def binary_labels(self, species: str) -> np.ndarray:
        """0/1 labels for a one-vs-rest task on ``species``."""
        if species not in IRIS["labels"].values():
            raise ValueError(f"Unknown Iris class {species!r}")
        return np.array([1 if label == species else 0 for label in self.labels], dtype=int)

    def class_counts(self) -> dict:
        counts = {}
        for label in self.labels:
            counts[label] = counts.get(label, 0) + 1
        return counts


def _parse_row(row: List[str], path: str, line_number: int) -> Tuple[List[float], str]:
    if len(row) != 5:
        raise DatasetParseError(path, line_number, f"expected 4 features and a label, got {len(row)} fields")
    try:
        features = [float(value) for value in row[:4]]
    except ValueError as e:
        raise DatasetParseError(path, line_number, f"non-numeric feature: {e}")
    label = IRIS["labels"].get(row[4].strip())
    if label is None:
        raise DatasetParseError(path, line_number, f"unknown label {row[4].strip()!r}")
    return features, label


def load_iris(path: Optional[Union[str, Path]] = None) -> IrisDataset:
    """
    Load the Iris dataset from a UCI-format CSV file.

    Args:
        path: CSV path; defaults to ``IRIS_PATH`` or the bundled copy

    Returns:
        The parsed dataset, features not standardized

    Raises:
        DatasetParseError: A row is malformed (message carries the line number)
        DatasetError: The file does not hold 150 rows, 50 per class
    """
    path = str(path or get_config()["data"]["iris_path"])
    features, labels = [], []

    try:
        with open(path, newline="") as handle:
            for line_number, row in enumerate(csv.reader(handle), 1):
                if not row or all(not field.strip() for field in row):
                    continue
                values, label = _parse_row(row, path, line_number)
                features.append(values)
                labels.append(label)
    except OSError as e:
        logger.error(f"Failed to read Iris file {path}: {e}")
        raise

    if len(labels) != IRIS["rows"]:
        raise DatasetError(f"{path}: expected {IRIS['rows']} rows, found {len(labels)}")

    dataset = IrisDataset(np.array(features, dtype=float), tuple(labels))
    counts = dataset.class_counts()
    if any(count != IRIS["rows_per_class"] for count in counts.values()) or len(counts) != 3:
        raise DatasetError(f"{path}: expected {IRIS['rows_per_class']} rows per class, found {counts}")

    logger.info(f"Loaded {len(dataset)} Iris rows from {path}")
    return dataset
