"""Command-line driver: benchmark runs, sweeps, significance, Pareto reports.

The DISCBENCH_THREADS environment variable caps numeric parallelism. It is
applied at import time, before numpy first loads, because BLAS pools size
themselves once per process; that is also why this module (and the package
root) import nothing heavy at the top.

Config files are plain ``key=value`` lines ('#' starts a comment); keys
mirror the flag names (train, test, methods, seeds, out, timing, out_dim,
lfda_k, nca_max_iter, rda_k, dsb_rounds, dsb_growth, reg_c, fractions,
repeats, dims, results, baseline). Command-line flags take precedence.
"""

from __future__ import annotations

import argparse
import os
import sys

_BLAS_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
)


def _cap_threads() -> None:
    value = os.environ.get("DISCBENCH_THREADS", "").strip()
    if value.isdigit() and int(value) >= 1:
        for var in _BLAS_VARS:
            os.environ[var] = value


_cap_threads()

import numpy as np  # noqa: E402  (deliberately after the thread cap)

from . import bench  # noqa: E402
from .data import read_feature_file  # noqa: E402
from .errors import DiscbenchError  # noqa: E402

DEFAULT_METHODS = ",".join(bench.BENCH_METHODS)
DEFAULT_SEEDS = "0,1,2,3,4"
DEFAULT_FRACTIONS = "0.1,0.25,0.5,1.0"


def _read_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"bad config line (expected key=value): {raw!r}")
            values[key.strip()] = value.strip()
    return values


def _pick(flag_value, config: dict[str, str], key: str, default, parse):
    if flag_value is not None:
        return flag_value
    if key in config:
        return parse(config[key])
    return default


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _parse_ints(text: str) -> list[int]:
    return [int(t) for t in _split(text)]


def _parse_floats(text: str) -> list[float]:
    return [float(t) for t in _split(text)]


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _check_threads_env() -> str | None:
    value = os.environ.get("DISCBENCH_THREADS")
    if value is not None and not (value.strip().isdigit() and int(value) >= 1):
        return f"DISCBENCH_THREADS must be a positive integer, got {value!r}"
    return None


def _build_specs(args, config) -> list[bench.MethodSpec] | str:
    """MethodSpec list from merged flag/config values, or an error string."""
    methods = _split(_pick(args.methods, config, "methods", DEFAULT_METHODS, str))
    if not methods:
        return "no methods given"
    unknown = [m for m in methods if m not in bench.BENCH_METHODS]
    if unknown:
        return (
            f"unknown method(s) {', '.join(unknown)}; valid methods: "
            f"{', '.join(bench.BENCH_METHODS)}"
        )
    out_dim = _pick(args.out_dim, config, "out_dim", None, int)
    lfda_k = _pick(args.lfda_k, config, "lfda_k", 7, int)
    nca_max_iter = _pick(args.nca_max_iter, config, "nca_max_iter", 50, int)
    rda_k = _pick(args.rda_k, config, "rda_k", None, int)
    dsb_rounds = _pick(args.dsb_rounds, config, "dsb_rounds", 2, int)
    dsb_growth = _pick(args.dsb_growth, config, "dsb_growth", 2.0, float)
    reg_c = _pick(args.reg_c, config, "reg_c", 1.0, float)
    return [
        bench.MethodSpec(
            name=m,
            out_dim=out_dim,
            lfda_neighbors=lfda_k,
            nca_max_iter=nca_max_iter,
            rda_components=rda_k,
            dsb_rounds=dsb_rounds,
            dsb_weight_growth=dsb_growth,
            reg_c=reg_c,
        )
        for m in methods
    ]


def _load_run_inputs(args, config):
    """(train, test, seeds, timing, out_path) or an error string."""
    train_path = _pick(args.train, config, "train", None, str)
    test_path = _pick(args.test, config, "test", None, str)
    if not train_path or not test_path:
        return "both --train and --test feature files are required"
    seeds = _parse_ints(_pick(args.seeds, config, "seeds", DEFAULT_SEEDS, str))
    if not seeds:
        return "no seeds given"
    if args.no_timing:
        timing = False
    else:
        timing = _pick(None, config, "timing", True, _parse_bool)
    out_path = _pick(args.out, config, "out", "results.csv", str)
    train = read_feature_file(train_path)
    test = read_feature_file(test_path)
    if train.n_features != test.n_features or train.num_classes != test.num_classes:
        return "train and test files disagree on D or C"
    return train, test, seeds, timing, out_path


def _print_method_summary(records) -> None:
    by_method: dict[str, list[bench.TrialRecord]] = {}
    order: list[str] = []
    failed = 0
    for record in records:
        if record.method not in by_method:
            by_method[record.method] = []
            order.append(record.method)
        if record.status == "ok":
            by_method[record.method].append(record)
        else:
            failed += 1
    print(f"{'method':<10} {'accuracy (%)':>16} {'time (s)':>10} {'n':>4}")
    for method in order:
        rows = by_method[method]
        if not rows:
            print(f"{method:<10} {'-':>16} {'-':>10} {0:>4}")
            continue
        accs = np.array([r.accuracy for r in rows]) * 100.0
        secs = float(np.mean([r.total_seconds for r in rows]))
        cell = f"{accs.mean():.2f} ± {accs.std():.2f}"
        print(f"{method:<10} {cell:>16} {secs:>10.2f} {len(rows):>4}")
    if failed:
        print(f"{failed} trial(s) did not complete (see status column)")


def _exit_code(records) -> int:
    return 0 if all(r.status == "ok" for r in records) else 2


def cmd_run(args) -> int:
    config = _read_config(args.config) if args.config else {}
    specs = _build_specs(args, config)
    if isinstance(specs, str):
        return _fail(specs)
    loaded = _load_run_inputs(args, config)
    if isinstance(loaded, str):
        return _fail(loaded)
    train, test, seeds, timing, out_path = loaded
    records = bench.run_suite(specs, train, test, seeds, timing, out_path=out_path)
    _print_method_summary(records)
    if out_path:
        print(f"rows appended to {out_path}")
    return _exit_code(records)


def cmd_sweep_dims(args) -> int:
    config = _read_config(args.config) if args.config else {}
    specs = _build_specs(args, config)
    if isinstance(specs, str):
        return _fail(specs)
    dims_text = _pick(args.dims, config, "dims", "", str)
    dims = _parse_ints(dims_text)
    if not dims:
        return _fail("a non-empty --dims list is required")
    loaded = _load_run_inputs(args, config)
    if isinstance(loaded, str):
        return _fail(loaded)
    train, test, seeds, timing, out_path = loaded
    records = []
    for spec in specs:
        records.extend(
            bench.sweep_dims(spec, train, test, dims, seeds, timing, out_path)
        )
    print(f"{'method':<10} {'d':>5} {'accuracy (%)':>14} {'n':>4}")
    for spec in specs:
        for dim in dims:
            rows = [
                r
                for r in records
                if r.method == spec.name and r.out_dim == dim and r.status == "ok"
            ]
            if rows:
                mean = float(np.mean([r.accuracy for r in rows])) * 100.0
                print(f"{spec.name:<10} {dim:>5} {mean:>14.2f} {len(rows):>4}")
            else:
                print(f"{spec.name:<10} {dim:>5} {'-':>14} {0:>4}")
    return _exit_code(records)


def cmd_sweep_fraction(args) -> int:
    config = _read_config(args.config) if args.config else {}
    specs = _build_specs(args, config)
    if isinstance(specs, str):
        return _fail(specs)
    fractions = _parse_floats(
        _pick(args.fractions, config, "fractions", DEFAULT_FRACTIONS, str)
    )
    if not fractions:
        return _fail("a non-empty --fractions list is required")
    repeats = _pick(args.repeats, config, "repeats", 3, int)
    loaded = _load_run_inputs(args, config)
    if isinstance(loaded, str):
        return _fail(loaded)
    train, test, seeds, timing, out_path = loaded
    records = bench.sweep_fraction(
        specs, train, test, fractions, repeats, seeds, timing, out_path
    )
    print(f"{'method':<10} {'fraction':>9} {'accuracy (%)':>14} {'n':>4}")
    for spec in specs:
        for fraction in fractions:
            rows = [
                r
                for r in records
                if r.method == spec.name
                and r.fraction == fraction
                and r.status == "ok"
            ]
            if rows:
                mean = float(np.mean([r.accuracy for r in rows])) * 100.0
                print(f"{spec.name:<10} {fraction:>9} {mean:>14.2f} {len(rows):>4}")
            else:
                print(f"{spec.name:<10} {fraction:>9} {'-':>14} {0:>4}")
    return _exit_code(records)


def cmd_significance(args) -> int:
    records = bench.read_records(args.results)
    results = bench.significance_report(records, baseline=args.baseline)
    print(
        f"{'method':<10} {'delta (pts)':>12} {'t-test p':>12} "
        f"{'wilcoxon p':>12} {'n':>4}"
    )
    for row in results:
        print(
            f"{row.method_a:<10} {row.mean_delta:>12.2f} "
            f"{row.t_p_value:>12.6f} {row.wilcoxon_p_value:>12.6f} "
            f"{row.n_seeds:>4}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write("method,baseline,delta_pct,t_p_value,wilcoxon_p_value,n\n")
            for row in results:
                handle.write(
                    f"{row.method_a},{row.method_b},{row.mean_delta:.6f},"
                    f"{row.t_p_value:.9f},{row.wilcoxon_p_value:.9f},"
                    f"{row.n_seeds}\n"
                )
        print(f"report written to {args.out}")
    return 0


def cmd_pareto(args) -> int:
    records = bench.read_records(args.results)
    entries = bench.aggregate_means(records)
    if not entries:
        return _fail("no completed rows in the results file")
    result = bench.pareto_frontier(entries)
    print(f"{'method':<10} {'accuracy (%)':>14} {'time (s)':>10} {'pareto':>8}")
    for entry in result.entries:
        flag = "no" if entry.dominated else "yes"
        print(
            f"{entry.method:<10} {entry.mean_accuracy * 100.0:>14.2f} "
            f"{entry.mean_time:>10.2f} {flag:>8}"
        )

    groups: dict[tuple[str, str], list[bench.TrialRecord]] = {}
    for record in records:
        groups.setdefault((record.backbone, record.dataset), []).append(record)
    if len(groups) > 1:
        counts: dict[str, int] = {}
        for rows in groups.values():
            means = bench.aggregate_means(rows)
            if not means:
                continue
            for entry in bench.pareto_frontier(means).entries:
                if not entry.dominated:
                    counts[entry.method] = counts.get(entry.method, 0) + 1
        total = len(groups)
        print(f"\nper-group frontier counts (/{total}):")
        for entry in result.entries:
            print(f"{entry.method:<10} {counts.get(entry.method, 0):>3}/{total}")
    return 0


def _add_shared_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--train", help="training feature file (FZF1)")
    parser.add_argument("--test", help="test feature file (FZF1)")
    parser.add_argument(
        "--methods",
        help=f"comma-separated method list (default: {DEFAULT_METHODS})",
    )
    parser.add_argument(
        "--seeds", help=f"comma-separated seed list (default: {DEFAULT_SEEDS})"
    )
    parser.add_argument(
        "--out",
        help="results CSV path, rows are appended (default: results.csv)",
    )
    parser.add_argument("--config", help="key=value config file (flags win)")
    parser.add_argument(
        "--no-timing",
        action="store_true",
        help="record 0.0 for all time fields (byte-reproducible output)",
    )
    parser.add_argument(
        "--out-dim",
        type=int,
        dest="out_dim",
        help="projection dimension override (default: C-1; full uses D)",
    )
    parser.add_argument(
        "--lfda-k", type=int, dest="lfda_k", help="lfda neighbor count (default: 7)"
    )
    parser.add_argument(
        "--nca-max-iter",
        type=int,
        dest="nca_max_iter",
        help="nca iteration cap (default: 50)",
    )
    parser.add_argument(
        "--rda-k",
        type=int,
        dest="rda_k",
        help="rda residual components (default: 20 if D<=1024 else 30)",
    )
    parser.add_argument(
        "--dsb-rounds",
        type=int,
        dest="dsb_rounds",
        help="dsb boosting rounds (default: 2)",
    )
    parser.add_argument(
        "--dsb-growth",
        type=float,
        dest="dsb_growth",
        help="dsb misclassification weight growth (default: 2.0)",
    )
    parser.add_argument(
        "--reg-c",
        type=float,
        dest="reg_c",
        help="classifier inverse regularization (default: 1.0)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discbench",
        description="Supervised dimensionality reduction benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the multi-seed benchmark suite")
    _add_shared_run_flags(run)
    run.set_defaults(handler=cmd_run)

    dims = sub.add_parser("sweep-dims", help="sweep the projection dimension")
    _add_shared_run_flags(dims)
    dims.add_argument("--dims", help="comma-separated dimension list (required)")
    dims.set_defaults(handler=cmd_sweep_dims)

    frac = sub.add_parser("sweep-fraction", help="sweep the training fraction")
    _add_shared_run_flags(frac)
    frac.add_argument(
        "--fractions",
        help=f"comma-separated fraction list (default: {DEFAULT_FRACTIONS})",
    )
    frac.add_argument(
        "--repeats",
        type=int,
        help="subsample repeats per fraction (default: 3)",
    )
    frac.set_defaults(handler=cmd_sweep_fraction)

    sig = sub.add_parser(
        "significance", help="paired tests of each method against a baseline"
    )
    sig.add_argument("--results", required=True, help="results CSV to analyze")
    sig.add_argument(
        "--baseline", default="lda", help="baseline method (default: lda)"
    )
    sig.add_argument("--out", help="write a machine-readable report CSV here")
    sig.set_defaults(handler=cmd_significance)

    par = sub.add_parser(
        "pareto", help="accuracy/time Pareto analysis of a results CSV"
    )
    par.add_argument("--results", required=True, help="results CSV to analyze")
    par.set_defaults(handler=cmd_pareto)
    return parser


def main(argv=None) -> int:
    threads_error = _check_threads_env()
    if threads_error:
        return _fail(threads_error)
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (DiscbenchError, OSError, ValueError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
