"""Generate synthetic shared-covariance Gaussian features in FZF1 format.

Writes train/test feature files that exercise the full benchmark roster
without any image data: class means live in a low-variance subspace while a
block of nuisance coordinates carries most of the total variance, so
variance-driven and discriminant-driven reductions disagree visibly.

Usage:
    python scripts/make_synthetic_features.py --out-dir features/
    discbench run --train features/train.fzf --test features/test.fzf
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from discbench.data import write_feature_file
from discbench.synthetic import make_gaussian_dataset


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--classes", type=int, default=10)
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--nuisance-dims", type=int, default=16,
                        help="leading coordinates with high class-independent variance")
    parser.add_argument("--nuisance-std", type=float, default=5.0)
    parser.add_argument("--mean-std", type=float, default=0.9,
                        help="spread of class means in the informative coordinates")
    parser.add_argument("--per-class", type=int, default=200)
    parser.add_argument("--test-per-class", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", type=Path, default=Path("features"))
    args = parser.parse_args(argv)

    if not 0 <= args.nuisance_dims < args.dim:
        parser.error("--nuisance-dims must lie in [0, dim)")

    rng = np.random.default_rng(args.seed)
    variances = np.ones(args.dim)
    variances[: args.nuisance_dims] = args.nuisance_std**2
    means = np.zeros((args.classes, args.dim))
    means[:, args.nuisance_dims:] = rng.normal(
        scale=args.mean_std, size=(args.classes, args.dim - args.nuisance_dims)
    )
    covariance = np.diag(variances)

    train = make_gaussian_dataset(
        args.classes, args.per_class, args.dim,
        means=means, covariance=covariance, seed=args.seed + 1,
    )
    test = make_gaussian_dataset(
        args.classes, args.test_per_class, args.dim,
        means=means, covariance=covariance, seed=args.seed + 2,
    )

    args.out_dir.mkdir(parents=True, exist_ok=True)
    train_path = args.out_dir / "train.fzf"
    test_path = args.out_dir / "test.fzf"
    write_feature_file(train, train_path)
    write_feature_file(test, test_path)
    print(f"wrote {train_path} ({train.n_samples} rows) and "
          f"{test_path} ({test.n_samples} rows), D={args.dim}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
