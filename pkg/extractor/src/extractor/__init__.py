"""Frozen-backbone feature extraction into FZF1 feature files.

Images pass through an ImageNet-pretrained (or randomly initialized)
torchvision backbone in eval mode with the classifier head removed; the
global-average-pool output is written as float32 rows. No augmentation, no
shuffling: a job run twice produces byte-identical files.
"""

__version__ = "0.1.0"
