"""Local dataset readers: CIFAR-100 (python pickle) and Tiny ImageNet (folders).

Both readers return images in a fixed, documented order with labels mapped
through the sorted class-name list, so the label integers are stable across
splits and across runs regardless of on-disk enumeration order. Nothing here
downloads anything; a missing dataset raises with the exact steps to fetch
and unpack it.
"""

from __future__ import annotations

import pickle
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetMissingError, ExtractorError

DATASETS = ("cifar100", "tiny_imagenet")
SPLITS = ("train", "test")

CIFAR100_DIR = "cifar-100-python"
CIFAR100_URL = "https://www.cs.toronto.edu/~kriz/cifar-100-python.tar.gz"
TINY_DIR = "tiny-imagenet-200"
TINY_URL = "http://cs231n.stanford.edu/tiny-imagenet-200.zip"


@dataclass(frozen=True)
class LoadedSplit:
    """One split ready for extraction: ``images[i]`` is either an HWC uint8
    array or an image file path; ``labels[i]`` indexes ``class_names``."""

    images: list
    labels: np.ndarray
    class_names: list[str]  # canonical (sorted) order
    dataset_name: str
    split: str


def _canonical_order(names: list[str]) -> tuple[list[str], dict[str, int]]:
    ordered = sorted(names)
    return ordered, {name: i for i, name in enumerate(ordered)}


def _missing(dataset: str, expected: Path, url: str, unpack: str) -> DatasetMissingError:
    return DatasetMissingError(
        f"{dataset} not found at {expected}; download {url} and {unpack} "
        f"so that {expected} exists, then re-run"
    )


def load_cifar100(root: Path, split: str) -> LoadedSplit:
    base = Path(root) / CIFAR100_DIR
    batch_path = base / split  # pickle files are literally "train" and "test"
    meta_path = base / "meta"
    if not batch_path.is_file() or not meta_path.is_file():
        raise _missing("cifar100", base, CIFAR100_URL, "extract the tarball")
    with open(meta_path, "rb") as fh:
        meta = pickle.load(fh, encoding="latin1")
    names = list(meta["fine_label_names"])
    ordered, index_of = _canonical_order(names)
    with open(batch_path, "rb") as fh:
        batch = pickle.load(fh, encoding="latin1")
    data = np.asarray(batch["data"], dtype=np.uint8)
    raw_labels = np.asarray(batch["fine_labels"], dtype=np.int64)
    if data.ndim != 2 or data.shape[1] != 3072:
        raise ExtractorError(f"cifar100 {split} data has shape {data.shape}")
    if raw_labels.shape[0] != data.shape[0]:
        raise ExtractorError("cifar100 labels do not match image count")
    # pickle rows are CHW-flattened; keep file order, convert to HWC
    images = [row.reshape(3, 32, 32).transpose(1, 2, 0) for row in data]
    remap = np.array([index_of[name] for name in names], dtype=np.int64)
    return LoadedSplit(
        images=images,
        labels=remap[raw_labels],
        class_names=ordered,
        dataset_name="cifar100",
        split=split,
    )


def load_tiny_imagenet(root: Path, split: str) -> LoadedSplit:
    base = Path(root) / TINY_DIR
    wnids_path = base / "wnids.txt"
    if not wnids_path.is_file():
        raise _missing("tiny_imagenet", base, TINY_URL, "unzip the archive")
    wnids = [line.strip() for line in wnids_path.read_text().splitlines() if line.strip()]
    ordered, index_of = _canonical_order(wnids)

    images: list[Path] = []
    labels: list[int] = []
    if split == "train":
        # sorted wnid directories, sorted filenames inside each
        for wnid in ordered:
            img_dir = base / "train" / wnid / "images"
            if not img_dir.is_dir():
                raise _missing("tiny_imagenet", img_dir, TINY_URL, "unzip the archive")
            for path in sorted(img_dir.iterdir()):
                if path.is_file():
                    images.append(path)
                    labels.append(index_of[wnid])
    else:
        # the labeled evaluation split ships as val/; rows follow the
        # annotation file's line order
        ann_path = base / "val" / "val_annotations.txt"
        if not ann_path.is_file():
            raise _missing("tiny_imagenet", ann_path, TINY_URL, "unzip the archive")
        for line in ann_path.read_text().splitlines():
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) < 2:
                raise ExtractorError(f"malformed val annotation line: {line!r}")
            filename, wnid = fields[0], fields[1]
            if wnid not in index_of:
                raise ExtractorError(f"val annotation references unknown wnid {wnid}")
            images.append(base / "val" / "images" / filename)
            labels.append(index_of[wnid])
    if not images:
        raise ExtractorError(f"tiny_imagenet {split} split contains no images")
    return LoadedSplit(
        images=images,
        labels=np.asarray(labels, dtype=np.int64),
        class_names=ordered,
        dataset_name="tiny_imagenet",
        split=split,
    )


def load_split(dataset: str, split: str, root) -> LoadedSplit:
    if dataset not in DATASETS:
        raise ExtractorError(f"unknown dataset {dataset!r}, expected one of {DATASETS}")
    if split not in SPLITS:
        raise ExtractorError(f"unknown split {split!r}, expected one of {SPLITS}")
    if dataset == "cifar100":
        return load_cifar100(Path(root), split)
    return load_tiny_imagenet(Path(root), split)
