"""Backbone registry: torchvision models with the classifier head removed.

Each entry maps a backbone name to its constructor, its ImageNet checkpoint,
the attribute holding the classification head, and the feature width the
global-average-pool output must have. Replacing the head with Identity makes
``model(x)`` return the pooled penultimate features directly.
"""

from __future__ import annotations

import torch
from torch import nn
from torchvision import models
from torchvision.transforms import InterpolationMode, transforms

from .errors import ExtractorError, WeightsUnavailableError

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)

EXPECTED_DIMS = {
    "resnet18": 512,
    "resnet50": 2048,
    "mobilenetv3_small": 576,
    "efficientnet_b0": 1280,
}

# name -> (constructor, pretrained weights, head attribute)
_REGISTRY = {
    "resnet18": (models.resnet18, models.ResNet18_Weights.IMAGENET1K_V1, "fc"),
    "resnet50": (models.resnet50, models.ResNet50_Weights.IMAGENET1K_V1, "fc"),
    "mobilenetv3_small": (
        models.mobilenet_v3_small,
        models.MobileNet_V3_Small_Weights.IMAGENET1K_V1,
        "classifier",
    ),
    "efficientnet_b0": (
        models.efficientnet_b0,
        models.EfficientNet_B0_Weights.IMAGENET1K_V1,
        "classifier",
    ),
}

WEIGHT_MODES = ("pretrained", "random")


def build_backbone(name: str, weights: str = "pretrained", seed: int = 0) -> nn.Module:
    """Frozen eval-mode backbone whose forward yields pooled features.

    ``weights="pretrained"`` loads the ImageNet checkpoint (cached under
    $TORCH_HOME, downloaded on first use); ``"random"`` seeds torch and uses
    the fresh initialization, which keeps smoke tests offline.
    """
    if name not in _REGISTRY:
        raise ExtractorError(
            f"unknown backbone {name!r}, expected one of {tuple(_REGISTRY)}"
        )
    if weights not in WEIGHT_MODES:
        raise ExtractorError(
            f"weights must be one of {WEIGHT_MODES}, got {weights!r}"
        )
    ctor, checkpoint, head_attr = _REGISTRY[name]
    if weights == "random":
        torch.manual_seed(seed)
        model = ctor(weights=None)
    else:
        try:
            model = ctor(weights=checkpoint)
        except Exception as exc:
            raise WeightsUnavailableError(
                f"could not load pretrained weights for {name}: {exc}; "
                f"either place the checkpoint file under "
                f"$TORCH_HOME/hub/checkpoints/ (default ~/.cache/torch/hub/"
                f"checkpoints/) on a machine with access to "
                f"download.pytorch.org, or pass --weights random"
            ) from exc
    setattr(model, head_attr, nn.Identity())
    model.eval()
    for parameter in model.parameters():
        parameter.requires_grad_(False)
    return model


def make_transform() -> transforms.Compose:
    """Fixed eval transform: bilinear 224x224 resize (antialiased), float
    scaling, ImageNet channel normalization. No augmentation anywhere."""
    return transforms.Compose(
        [
            transforms.Resize(
                (224, 224),
                interpolation=InterpolationMode.BILINEAR,
                antialias=True,
            ),
            transforms.ToTensor(),
            transforms.Normalize(IMAGENET_MEAN, IMAGENET_STD),
        ]
    )
