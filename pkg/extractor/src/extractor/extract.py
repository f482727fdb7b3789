"""Extraction jobs: frozen backbone forward passes streamed into FZF1 files.

A job is deterministic end to end: fixed dataset order, eval-mode model,
no augmentation, no shuffling, and a seeded init when random weights are
requested, so running the same job twice produces byte-identical output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .backbones import EXPECTED_DIMS, build_backbone, make_transform
from .datasets import DATASETS, SPLITS, load_split
from .errors import ClassMapMismatchError, DimensionMismatchError, ExtractorError
from .fzf import FeatureFileWriter


@dataclass(frozen=True)
class ExtractionJob:
    backbone: str
    dataset: str
    split: str
    output_path: Path
    batch_size: int = 64
    device: str = "cpu"

    def __post_init__(self):
        if self.backbone not in EXPECTED_DIMS:
            raise ExtractorError(
                f"unknown backbone {self.backbone!r}, expected one of "
                f"{tuple(EXPECTED_DIMS)}"
            )
        if self.dataset not in DATASETS:
            raise ExtractorError(
                f"unknown dataset {self.dataset!r}, expected one of {DATASETS}"
            )
        if self.split not in SPLITS:
            raise ExtractorError(
                f"unknown split {self.split!r}, expected one of {SPLITS}"
            )
        if self.batch_size < 1:
            raise ExtractorError("batch_size must be >= 1")


def class_map_path(output_path) -> Path:
    """Sidecar JSON next to the feature file: class name -> label index."""
    return Path(str(output_path) + ".classes.json")


def _class_map_payload(dataset_name: str, class_names: list[str]) -> str:
    return json.dumps(
        {"dataset": dataset_name, "classes": list(class_names)}, sort_keys=True
    ) + "\n"


def _check_existing_class_map(path: Path, payload: str) -> None:
    if path.exists() and path.read_text() != payload:
        raise ClassMapMismatchError(
            f"existing class map {path} disagrees with this dataset's classes; "
            f"remove it or write to a different output path"
        )


def _to_pil(item) -> Image.Image:
    if isinstance(item, np.ndarray):
        return Image.fromarray(item)
    return Image.open(item).convert("RGB")


def extract(job: ExtractionJob, data_root="data",
            weights: str = "pretrained", seed: int = 0) -> Path:
    """Run one job; returns the output path.

    The class-name sidecar is verified against any existing one before the
    (potentially long) forward passes start and written after they finish.
    """
    split_data = load_split(job.dataset, job.split, data_root)
    n = len(split_data.images)
    num_classes = len(split_data.class_names)
    expected_d = EXPECTED_DIMS[job.backbone]

    sidecar = class_map_path(job.output_path)
    payload = _class_map_payload(split_data.dataset_name, split_data.class_names)
    _check_existing_class_map(sidecar, payload)

    model = build_backbone(job.backbone, weights=weights, seed=seed).to(job.device)
    preprocess = make_transform()

    with FeatureFileWriter(
        job.output_path, job.backbone, split_data.dataset_name,
        n, expected_d, num_classes,
    ) as writer:
        with torch.no_grad():
            for start in range(0, n, job.batch_size):
                items = split_data.images[start : start + job.batch_size]
                batch = torch.stack([preprocess(_to_pil(item)) for item in items])
                feats = model(batch.to(job.device))
                if feats.ndim != 2 or feats.shape[1] != expected_d:
                    raise DimensionMismatchError(
                        f"{job.backbone} produced features of shape "
                        f"{tuple(feats.shape)}, expected width {expected_d}"
                    )
                writer.write_batch(feats.cpu().numpy())
        writer.finish(split_data.labels)

    sidecar.write_text(payload)
    return Path(job.output_path)
