"""Command-line entry point: one extraction job per invocation."""

from __future__ import annotations

import argparse
import sys

from .backbones import EXPECTED_DIMS, WEIGHT_MODES
from .datasets import DATASETS, SPLITS
from .errors import ExtractorError
from .extract import ExtractionJob, extract


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extract",
        description="Export frozen-backbone features to an FZF1 feature file.",
    )
    parser.add_argument("--backbone", required=True, choices=sorted(EXPECTED_DIMS))
    parser.add_argument("--dataset", required=True, choices=DATASETS)
    parser.add_argument("--split", required=True, choices=SPLITS)
    parser.add_argument("--out", required=True, help="output .fzf path")
    parser.add_argument("--data-root", default="data",
                        help="directory holding the unpacked dataset (default: data)")
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--device", default="cpu",
                        help="torch device string (default: cpu)")
    parser.add_argument("--weights", choices=WEIGHT_MODES, default="pretrained",
                        help="pretrained ImageNet checkpoint or seeded random init")
    parser.add_argument("--seed", type=int, default=0,
                        help="init seed for --weights random (default: 0)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = ExtractionJob(
        backbone=args.backbone,
        dataset=args.dataset,
        split=args.split,
        output_path=args.out,
        batch_size=args.batch_size,
        device=args.device,
    )
    try:
        path = extract(job, data_root=args.data_root,
                       weights=args.weights, seed=args.seed)
    except (ExtractorError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path} (D={EXPECTED_DIMS[args.backbone]})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
