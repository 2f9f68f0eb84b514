"""Shared domain containers.

All containers validate on construction and hold read-only float64/int8
arrays, so a value that exists is a value that satisfies its invariants.
They are immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NonBinaryLabel,
    NonFinite,
    PixelOutOfRange,
    ShapeMismatch,
)


def _frozen(data: np.ndarray, dtype) -> np.ndarray:
    out = np.ascontiguousarray(data, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Image:
    """H x W x 3 raster with real-valued channels in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        data = _frozen(self.data, np.float64)
        if data.ndim != 3 or data.shape[2] != 3 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ShapeMismatch(f"expected (H, W, 3) pixel array, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise NonFinite("image contains NaN or infinite pixels")
        if data.min() < 0.0 or data.max() > 1.0:
            raise PixelOutOfRange("pixel values must lie in [0, 1]")
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class LabelVector:
    """Binary presence vector over C classes."""

    data: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.data)
        if raw.ndim != 1 or raw.shape[0] < 1:
            raise ShapeMismatch(f"expected 1-d label vector, got shape {raw.shape}")
        if not np.isin(raw, (0, 1)).all():
            raise NonBinaryLabel("label entries must be 0 or 1")
        object.__setattr__(self, "data", _frozen(raw, np.int8))

    @property
    def num_classes(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class LabelMatrix:
    """n x C binary ground-truth matrix; rows share one C."""

    data: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.data)
        if raw.ndim != 2 or raw.shape[1] < 1:
            raise ShapeMismatch(f"expected (n, C) label matrix, got shape {raw.shape}")
        if not np.isin(raw, (0, 1)).all():
            raise NonBinaryLabel("label entries must be 0 or 1")
        object.__setattr__(self, "data", _frozen(raw, np.int8))

    @classmethod
    def from_rows(cls, rows: list[LabelVector]) -> "LabelMatrix":
        widths = {r.num_classes for r in rows}
        if len(widths) != 1:
            raise ShapeMismatch(f"label rows disagree on C: {sorted(widths)}")
        return cls(np.stack([r.data for r in rows]))

    @property
    def num_rows(self) -> int:
        return self.data.shape[0]

    @property
    def num_classes(self) -> int:
        return self.data.shape[1]

    def row(self, i: int) -> LabelVector:
        return LabelVector(self.data[i])


@dataclass(frozen=True)
class ScoreMatrix:
    """n x C real confidence matrix; entries unbounded but finite."""

    data: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.data, dtype=np.float64)
        if raw.ndim != 2 or raw.shape[1] < 1:
            raise ShapeMismatch(f"expected (n, C) score matrix, got shape {raw.shape}")
        if not np.all(np.isfinite(raw)):
            raise NonFinite("score matrix contains NaN or infinite entries")
        object.__setattr__(self, "data", _frozen(raw, np.float64))

    @property
    def num_rows(self) -> int:
        return self.data.shape[0]

    @property
    def num_classes(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class Sample:
    """One training example: an image and its label vector."""

    image: Image
    labels: LabelVector

    def with_labels_width(self, num_classes: int) -> "Sample":
        if self.labels.num_classes != num_classes:
            raise DimensionMismatch(
                f"sample has {self.labels.num_classes} classes, dataset has {num_classes}"
            )
        return self


def validate_pair(scores: ScoreMatrix | np.ndarray, labels: LabelMatrix | np.ndarray) -> None:
    """Check that scores and labels form an evaluable (n, C) pair.

    Raises ShapeMismatch when n or C differ, NonFinite for NaN/Inf scores,
    NonBinaryLabel for non-binary label entries. Accepts either the wrapper
    types (already validated on construction) or raw arrays.
    """
    s = scores.data if isinstance(scores, ScoreMatrix) else np.asarray(scores, dtype=np.float64)
    y = labels.data if isinstance(labels, LabelMatrix) else np.asarray(labels)
    if s.ndim != 2 or y.ndim != 2:
        raise ShapeMismatch(f"expected 2-d matrices, got {s.shape} and {y.shape}")
    if s.shape != y.shape:
        raise ShapeMismatch(f"scores {s.shape} vs labels {y.shape}")
    if not np.all(np.isfinite(s)):
        raise NonFinite("score matrix contains NaN or infinite entries")
    if not np.isin(y, (0, 1)).all():
        raise NonBinaryLabel("label entries must be 0 or 1")
