"""Fabricated miniature datasets so every test runs offline in seconds."""

from __future__ import annotations

import pickle

import numpy as np
import pytest
from PIL import Image


def fabricate_cifar100(root, train_labels=(5, 0, 99, 17), test_labels=(3, 99, 0)):
    """Directory shaped like the real pickle archive, 4 train / 3 test images.

    Class names are deliberately NOT in sorted order so the canonical
    relabeling is exercised: name for raw label i is class_{99-i:02d}.
    """
    rng = np.random.default_rng(7)
    base = root / "cifar-100-python"
    base.mkdir(parents=True, exist_ok=True)
    names = [f"class_{99 - i:02d}" for i in range(100)]
    with open(base / "meta", "wb") as fh:
        pickle.dump({"fine_label_names": names}, fh)
    for split, labels in (("train", train_labels), ("test", test_labels)):
        data = rng.integers(0, 256, size=(len(labels), 3072), dtype=np.uint8)
        with open(base / split, "wb") as fh:
            pickle.dump({"data": data, "fine_labels": list(labels)}, fh)
    return base


def fabricate_tiny_imagenet(root):
    """Four wnids listed in scrambled order, one train image each (one of
    them grayscale), three val images."""
    rng = np.random.default_rng(11)
    base = root / "tiny-imagenet-200"
    wnids = ["n02", "n00", "n03", "n01"]  # scrambled on purpose
    base.mkdir(parents=True, exist_ok=True)
    (base / "wnids.txt").write_text("\n".join(wnids) + "\n")
    for i, wnid in enumerate(wnids):
        img_dir = base / "train" / wnid / "images"
        img_dir.mkdir(parents=True)
        arr = rng.integers(0, 256, size=(16, 12, 3), dtype=np.uint8)
        image = Image.fromarray(arr)
        if i == 0:
            image = image.convert("L")  # grayscale exercises convert("RGB")
        image.save(img_dir / f"{wnid}_0.JPEG")
    val_dir = base / "val" / "images"
    val_dir.mkdir(parents=True)
    rows = [("val_1.JPEG", "n03"), ("val_0.JPEG", "n00"), ("val_2.JPEG", "n02")]
    for filename, _ in rows:
        arr = rng.integers(0, 256, size=(20, 20, 3), dtype=np.uint8)
        Image.fromarray(arr).save(val_dir / filename)
    annotations = "\n".join(
        f"{filename}\t{wnid}\t0\t0\t10\t10" for filename, wnid in rows
    )
    (base / "val" / "val_annotations.txt").write_text(annotations + "\n")
    return base


@pytest.fixture()
def cifar_root(tmp_path):
    fabricate_cifar100(tmp_path)
    return tmp_path


@pytest.fixture()
def tiny_root(tmp_path):
    fabricate_tiny_imagenet(tmp_path)
    return tmp_path
