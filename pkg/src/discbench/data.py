"""Frozen-feature datasets: container, FZF1 binary file format, splits, scaling.

FZF1 layout (little-endian throughout):

    magic   4 bytes ASCII ``FZF1``
    version u32, currently 1
    backbone_name   u32 byte length + UTF-8 bytes
    dataset_name    u32 byte length + UTF-8 bytes
    N, D, C         u32 each
    features        N*D float32, row-major
    labels          N   u32

Features are stored as float32 and widened to float64 on load; everything
downstream runs in double precision.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    CorruptFileError,
    DimensionError,
    FileFormatError,
    TruncatedFileError,
)
from .numerics import as_matrix

MAGIC = b"FZF1"
VERSION = 1

STD_EPSILON = 1e-8


@dataclass(frozen=True)
class FeatureDataset:
    """N x D feature matrix with integer labels in [0, num_classes)."""

    features: np.ndarray
    labels: np.ndarray
    num_classes: int
    backbone_name: str = ""
    dataset_name: str = ""

    def __post_init__(self):
        feats = as_matrix(self.features, "features")
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.shape[0] != feats.shape[0]:
            raise DimensionError(
                f"labels shape {labels.shape} does not match {feats.shape[0]} rows"
            )
        if self.num_classes < 1:
            raise ValueError("num_classes must be >= 1")
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise ValueError("labels must lie in [0, num_classes)")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_indices(self) -> list[np.ndarray]:
        """Row indices per class, ascending class order."""
        return [np.flatnonzero(self.labels == c) for c in range(self.num_classes)]


def _read_exact(fh, n: int, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise TruncatedFileError(f"file ended while reading {what}")
    return buf


def _read_string(fh, what: str) -> str:
    (length,) = struct.unpack("<I", _read_exact(fh, 4, what + " length"))
    return _read_exact(fh, length, what).decode("utf-8")


def read_feature_file(path) -> FeatureDataset:
    """Load an FZF1 file, widening the stored float32 features to float64."""
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != MAGIC:
            raise FileFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        (version,) = struct.unpack("<I", _read_exact(fh, 4, "version"))
        if version != VERSION:
            raise FileFormatError(f"unsupported version {version}")
        backbone = _read_string(fh, "backbone_name")
        dataset = _read_string(fh, "dataset_name")
        n, d, c = struct.unpack("<III", _read_exact(fh, 12, "header counts"))
        if n < 1 or d < 1 or c < 1:
            raise CorruptFileError(f"non-positive header counts N={n} D={d} C={c}")
        feats = np.frombuffer(
            _read_exact(fh, 4 * n * d, "feature payload"), dtype="<f4"
        ).reshape(n, d)
        labels = np.frombuffer(_read_exact(fh, 4 * n, "label payload"), dtype="<u4")
        if fh.read(1):
            raise TruncatedFileError("trailing bytes after declared payload")
    if labels.size and labels.max() >= c:
        raise CorruptFileError(f"label {labels.max()} out of range for C={c}")
    return FeatureDataset(
        features=feats.astype(np.float64),
        labels=labels.astype(np.int64),
        num_classes=c,
        backbone_name=backbone,
        dataset_name=dataset,
    )


def write_feature_file(dataset: FeatureDataset, path) -> None:
    """Write a dataset as FZF1; read_feature_file round-trips it bit-exactly."""
    feats32 = np.ascontiguousarray(dataset.features, dtype="<f4")
    labels32 = np.ascontiguousarray(dataset.labels, dtype="<u4")
    backbone = dataset.backbone_name.encode("utf-8")
    name = dataset.dataset_name.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(backbone)))
        fh.write(backbone)
        fh.write(struct.pack("<I", len(name)))
        fh.write(name)
        fh.write(
            struct.pack(
                "<III", dataset.n_samples, dataset.n_features, dataset.num_classes
            )
        )
        fh.write(feats32.tobytes())
        fh.write(labels32.tobytes())


def stratified_subsample(
    dataset: FeatureDataset, fraction: float, seed: int
) -> FeatureDataset:
    """Keep ``max(1, floor(fraction * n_c))`` samples of every class.

    Selection is reproducible across implementations: one PCG64 stream seeded
    with ``seed`` draws a uniform key per sample, class by class in ascending
    class order, and the smallest keys win (ties broken by original index).
    The surviving rows keep their original dataset order. ``fraction == 1``
    returns the input unchanged.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    if fraction == 1.0:
        return dataset
    rng = np.random.default_rng(seed)
    kept: list[np.ndarray] = []
    for idx in dataset.class_indices():
        if idx.size == 0:
            continue
        keys = rng.random(idx.size)
        k = max(1, math.floor(fraction * idx.size))
        winners = np.lexsort((idx, keys))[:k]
        kept.append(idx[winners])
    keep = np.sort(np.concatenate(kept))
    return FeatureDataset(
        features=dataset.features[keep],
        labels=dataset.labels[keep],
        num_classes=dataset.num_classes,
        backbone_name=dataset.backbone_name,
        dataset_name=dataset.dataset_name,
    )


@dataclass(frozen=True)
class Standardizer:
    """Per-column affine map to zero mean, unit variance.

    Uses the population (1/N) standard deviation. Columns with std below
    STD_EPSILON get std 1.0 so constant features pass through as zeros
    instead of being dropped.
    """

    means: np.ndarray
    stds: np.ndarray

    @classmethod
    def fit(cls, features) -> "Standardizer":
        feats = as_matrix(features, "features")
        means = feats.mean(axis=0)
        stds = feats.std(axis=0)  # population, ddof=0
        stds = np.where(stds < STD_EPSILON, 1.0, stds)
        return cls(means=means, stds=stds)

    def transform(self, features) -> np.ndarray:
        feats = as_matrix(features, "features")
        if feats.shape[1] != self.means.shape[0]:
            raise DimensionError(
                f"expected {self.means.shape[0]} columns, got {feats.shape[1]}"
            )
        return (feats - self.means) / self.stds
