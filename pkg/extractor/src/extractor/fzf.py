"""Streaming writer for the FZF1 feature file format.

Layout (little-endian):

    magic "FZF1" | u32 version (1) | u32 len + backbone name | u32 len +
    dataset name | u32 N | u32 D | u32 C | N*D float32 features (row-major)
    | N u32 labels

The header needs N, D, C up front, so the writer takes them at construction
and verifies the streamed batches add up before the labels go out.
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .errors import ExtractorError

MAGIC = b"FZF1"
VERSION = 1


class FeatureFileWriter:
    """Write features batch by batch, then the labels; use as a context
    manager so a failed extraction does not leave a valid-looking file."""

    def __init__(self, path, backbone_name: str, dataset_name: str,
                 n: int, d: int, c: int):
        if min(n, d, c) < 1:
            raise ExtractorError(f"non-positive header counts N={n} D={d} C={c}")
        self.path = path
        self.n, self.d, self.c = n, d, c
        self.rows_written = 0
        self.finished = False
        self._fh = open(path, "wb")
        backbone = backbone_name.encode("utf-8")
        dataset = dataset_name.encode("utf-8")
        self._fh.write(MAGIC)
        self._fh.write(struct.pack("<I", VERSION))
        self._fh.write(struct.pack("<I", len(backbone)))
        self._fh.write(backbone)
        self._fh.write(struct.pack("<I", len(dataset)))
        self._fh.write(dataset)
        self._fh.write(struct.pack("<III", n, d, c))

    def write_batch(self, features: np.ndarray) -> None:
        feats = np.ascontiguousarray(features, dtype="<f4")
        if feats.ndim != 2 or feats.shape[1] != self.d:
            raise ExtractorError(
                f"batch shape {feats.shape} does not match D={self.d}"
            )
        if self.rows_written + feats.shape[0] > self.n:
            raise ExtractorError(f"more than the declared {self.n} rows streamed")
        self._fh.write(feats.tobytes())
        self.rows_written += feats.shape[0]

    def finish(self, labels) -> None:
        labels = np.ascontiguousarray(labels, dtype="<u4")
        if self.rows_written != self.n:
            raise ExtractorError(
                f"streamed {self.rows_written} rows, header declared {self.n}"
            )
        if labels.shape != (self.n,):
            raise ExtractorError(f"labels shape {labels.shape}, expected ({self.n},)")
        if labels.size and labels.max() >= self.c:
            raise ExtractorError(f"label {labels.max()} out of range for C={self.c}")
        self._fh.write(labels.tobytes())
        self._fh.close()
        self.finished = True

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if not self._fh.closed:
            self._fh.close()
        if not self.finished:
            # drop the partial file rather than leaving a truncated payload
            try:
                os.unlink(self.path)
            except OSError:
                pass
        return False
