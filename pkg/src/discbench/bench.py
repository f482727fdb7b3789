"""Benchmark protocol: timed multi-seed trials, sweeps, and the analyses.

A trial is fit -> transform -> standardize -> train head -> evaluate, with
wall-clock timing split into the reduction stage (fit plus both transforms)
and the training stage (standardizer plus classifier). Failures inside a
stage become tagged rows rather than aborting a suite, so sweeps keep going
when a subsample degenerates or a dimension exceeds capacity.

Results serialize to CSV with the exact header

    method,backbone,dataset,seed,fraction,out_dim,accuracy,fit_seconds,train_seconds,total_seconds,status

accuracy carries 6 decimals; status is "ok", "degenerate", or "error:<stage>".
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .classifier import accuracy, predict, train_classifier
from .data import FeatureDataset, Standardizer, stratified_subsample
from .errors import DegenerateClassError, DiscbenchError, UndefinedCorrelationError
from .extensions import DsbConfig, RdaConfig, fit_dsb, fit_rda
from .reducers import ReducerConfig, fit, transform

BENCH_METHODS = (
    "full",
    "pca",
    "lda",
    "pca_lda",
    "rlda",
    "lfda",
    "nca",
    "rda",
    "dsb",
)
DEFAULT_SEEDS = (0, 1, 2, 3, 4)
DEFAULT_FRACTIONS = (0.1, 0.25, 0.5, 1.0)
CSV_FIELDS = (
    "method",
    "backbone",
    "dataset",
    "seed",
    "fraction",
    "out_dim",
    "accuracy",
    "fit_seconds",
    "train_seconds",
    "total_seconds",
    "status",
)


@dataclass(frozen=True)
class MethodSpec:
    """One benchmark entry: a method name plus every tunable it may need.

    ``out_dim=None`` applies the protocol default: C - 1 for every reduction
    method, D for "full" (which ignores the field).
    """

    name: str
    out_dim: int | None = None
    lfda_neighbors: int = 7
    nca_max_iter: int = 50
    rda_components: int | None = None
    rda_reconstruction: str = "least_squares"
    dsb_rounds: int = 2
    dsb_weight_growth: float = 2.0
    reg_c: float = 1.0
    classifier_max_iter: int = 5000
    classifier_tol: float = 1e-6

    def __post_init__(self):
        if self.name not in BENCH_METHODS:
            raise ValueError(
                f"unknown method {self.name!r}, expected one of {BENCH_METHODS}"
            )


@dataclass(frozen=True)
class TrialRecord:
    """One (method, seed) outcome; field order matches the CSV schema."""

    method: str
    backbone: str
    dataset: str
    seed: int
    fraction: float
    out_dim: int
    accuracy: float
    fit_seconds: float
    train_seconds: float
    total_seconds: float
    status: str = "ok"

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy must be in [0, 1]")
        if self.total_seconds < self.fit_seconds + self.train_seconds - 1e-6:
            raise ValueError("total_seconds below fit + train")


@dataclass(frozen=True)
class SignificanceResult:
    method_a: str
    method_b: str
    mean_delta: float  # percentage points, method_a minus method_b
    t_p_value: float
    wilcoxon_p_value: float
    n_seeds: int


@dataclass(frozen=True)
class ParetoEntry:
    method: str
    mean_accuracy: float
    mean_time: float
    dominated: bool


@dataclass(frozen=True)
class ParetoResult:
    entries: tuple[ParetoEntry, ...]


def fit_method(spec: MethodSpec, train: FeatureDataset, seed: int):
    """Dispatch a MethodSpec to the right fit routine with protocol defaults."""
    base_dim = spec.out_dim
    if base_dim is None and spec.name != "full":
        base_dim = train.num_classes - 1
    if spec.name == "rda":
        return fit_rda(
            train,
            RdaConfig(
                residual_components=spec.rda_components,
                out_dim=base_dim,
                reconstruction=spec.rda_reconstruction,
            ),
        )
    if spec.name == "dsb":
        return fit_dsb(
            train,
            DsbConfig(
                rounds=spec.dsb_rounds,
                weight_growth=spec.dsb_weight_growth,
                out_dim=base_dim,
            ),
        )
    return fit(
        ReducerConfig(
            method=spec.name,
            out_dim=None if spec.name == "full" else base_dim,
            lfda_neighbors=spec.lfda_neighbors,
            nca_max_iter=spec.nca_max_iter,
            seed=seed,
        ),
        train,
    )


def run_trial(
    spec: MethodSpec,
    train: FeatureDataset,
    test: FeatureDataset,
    seed: int,
    timing: bool = True,
    fraction: float = 1.0,
) -> TrialRecord:
    """Run one fit/standardize/train/evaluate pass and time its stages.

    Module errors become tagged rows: a degenerate class yields status
    "degenerate", anything else "error:<stage>"; such rows carry accuracy 0
    and whatever dimensions/times were known at failure. With ``timing=False``
    all time fields are written as 0.0 so outputs are byte-reproducible.
    """
    out_dim = 0
    fit_seconds = train_seconds = 0.0
    acc = 0.0
    start = time.perf_counter()
    stage = "fit"
    try:
        projection = fit_method(spec, train, seed)
        out_dim = projection.out_dim
        train_z = transform(projection, train.features)
        test_z = transform(projection, test.features)
        fit_seconds = time.perf_counter() - start

        stage = "train"
        train_start = time.perf_counter()
        standardizer = Standardizer.fit(train_z)
        model = train_classifier(
            standardizer.transform(train_z),
            train.labels,
            reg_c=spec.reg_c,
            max_iter=spec.classifier_max_iter,
            tol=spec.classifier_tol,
            seed=seed,
        )
        train_seconds = time.perf_counter() - train_start

        stage = "eval"
        acc = accuracy(
            predict(model, standardizer.transform(test_z)), test.labels
        )
        status = "ok"
    except DegenerateClassError:
        status = "degenerate"
    except (DiscbenchError, ValueError):
        status = f"error:{stage}"
    total_seconds = time.perf_counter() - start
    if not timing:
        fit_seconds = train_seconds = total_seconds = 0.0
    return TrialRecord(
        method=spec.name,
        backbone=train.backbone_name,
        dataset=train.dataset_name,
        seed=seed,
        fraction=fraction,
        out_dim=out_dim,
        accuracy=acc,
        fit_seconds=fit_seconds,
        train_seconds=train_seconds,
        total_seconds=total_seconds,
        status=status,
    )


def run_suite(
    methods,
    train: FeatureDataset,
    test: FeatureDataset,
    seeds=DEFAULT_SEEDS,
    timing: bool = True,
    out_path=None,
) -> list[TrialRecord]:
    """One trial per (method, seed); rows append to ``out_path`` as they
    complete when given."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("seeds must be non-empty")
    records = []
    for spec in methods:
        for seed in seeds:
            record = run_trial(spec, train, test, seed, timing)
            records.append(record)
            if out_path is not None:
                append_records(out_path, [record])
    return records


def sweep_fraction(
    methods,
    train: FeatureDataset,
    test: FeatureDataset,
    fractions=DEFAULT_FRACTIONS,
    repeats: int = 3,
    seeds=DEFAULT_SEEDS,
    timing: bool = True,
    out_path=None,
) -> list[TrialRecord]:
    """Training-set-size sweep: subsample per (fraction, repeat), then run
    every (method, seed) trial on the subsample. The subsample seed is the
    repeat index, so repeat r draws the same membership at every fraction."""
    fractions = list(fractions)
    if not fractions:
        raise ValueError("fractions must be non-empty")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("seeds must be non-empty")
    records = []
    for fraction in fractions:
        for repeat in range(repeats):
            subsample = stratified_subsample(train, fraction, seed=repeat)
            for spec in methods:
                for seed in seeds:
                    record = run_trial(
                        spec, subsample, test, seed, timing, fraction=fraction
                    )
                    records.append(record)
                    if out_path is not None:
                        append_records(out_path, [record])
    return records


def sweep_dims(
    method: MethodSpec,
    train: FeatureDataset,
    test: FeatureDataset,
    dims,
    seeds=DEFAULT_SEEDS,
    timing: bool = True,
    out_path=None,
) -> list[TrialRecord]:
    """Output-dimension sweep for one method; capacity violations become
    tagged rows and the sweep continues."""
    dims = list(dims)
    if not dims:
        raise ValueError("dims must be non-empty")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("seeds must be non-empty")
    records = []
    for dim in dims:
        spec = replace(method, out_dim=dim)
        for seed in seeds:
            record = run_trial(spec, train, test, seed, timing)
            records.append(record)
            if out_path is not None:
                append_records(out_path, [record])
    return records


def paired_t_test(a, b) -> tuple[float, float]:
    """Two-sided paired t-test with explicit zero-variance conventions.

    sd = 0 with zero mean delta gives (0, 1); sd = 0 with nonzero mean gives
    (signed inf, 0), the deterministic-method regime where every seed
    repeats the same accuracy.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ValueError("need two equal-length vectors with n >= 2")
    delta = a - b
    n = delta.size
    mean = float(delta.mean())
    sd = float(delta.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, mean), 0.0
    t_stat = mean / (sd / math.sqrt(n))
    df = n - 1
    # survival of Student-t via the regularized incomplete beta
    p_value = float(special.betainc(df / 2.0, 0.5, df / (df + t_stat * t_stat)))
    return t_stat, p_value


def _average_ranks(magnitudes: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties averaged."""
    order = np.argsort(magnitudes, kind="stable")
    ranks = np.empty(magnitudes.size, dtype=np.float64)
    position = 0
    while position < magnitudes.size:
        stop = position
        while (
            stop + 1 < magnitudes.size
            and magnitudes[order[stop + 1]] == magnitudes[order[position]]
        ):
            stop += 1
        ranks[order[position : stop + 1]] = (position + stop) / 2.0 + 1.0
        position = stop + 1
    return ranks


def wilcoxon_signed_rank(a, b) -> float:
    """Exact two-sided signed-rank p-value.

    Zero differences are dropped (all zero -> p = 1); tied magnitudes get
    averaged ranks. The null distribution of the doubled statistic is built
    by subset-sum convolution over doubled ranks (always integers), which
    enumerates all 2^n sign assignments exactly for any n.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size < 1:
        raise ValueError("need two equal-length vectors with n >= 1")
    delta = a - b
    delta = delta[delta != 0.0]
    n = delta.size
    if n == 0:
        return 1.0
    ranks = _average_ranks(np.abs(delta))
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    observed = int(np.rint(2.0 * ranks[delta > 0].sum()))
    total = int(doubled.sum())

    counts = [0] * (total + 1)
    counts[0] = 1
    for rank2 in doubled.tolist():
        for value in range(total, rank2 - 1, -1):
            counts[value] += counts[value - rank2]
    observed_dev = abs(2 * observed - total)
    extreme = sum(
        count
        for value, count in enumerate(counts)
        if abs(2 * value - total) >= observed_dev
    )
    return extreme / float(2**n)


def pareto_frontier(entries) -> ParetoResult:
    """Mark each (method, mean accuracy, mean time) entry dominated when some
    other entry is no worse on both axes and better on at least one."""
    entries = [(str(m), float(acc), float(t)) for m, acc, t in entries]
    if not entries:
        raise ValueError("entries must be non-empty")
    result = []
    for i, (method, acc, seconds) in enumerate(entries):
        dominated = any(
            other_t <= seconds
            and other_acc >= acc
            and (other_t < seconds or other_acc > acc)
            for j, (_, other_acc, other_t) in enumerate(entries)
            if j != i
        )
        result.append(ParetoEntry(method, acc, seconds, dominated))
    return ParetoResult(entries=tuple(result))


def ratio_correlation(records) -> float:
    """Pearson r between D/(C-1) and LDA's accuracy gain over full features.

    Groups ok rows by (backbone, dataset); each group must contain both an
    "lda" and a "full" method. The ratio comes from the recorded dimensions
    (full rows carry D, lda rows carry C - 1), the gain from the difference
    of mean accuracies.
    """
    groups: dict[tuple[str, str], dict[str, list[TrialRecord]]] = {}
    for record in records:
        if record.status != "ok" or record.method not in ("lda", "full"):
            continue
        bucket = groups.setdefault((record.backbone, record.dataset), {})
        bucket.setdefault(record.method, []).append(record)

    ratios = []
    gains = []
    for bucket in groups.values():
        if "lda" not in bucket or "full" not in bucket:
            continue
        lda_rows, full_rows = bucket["lda"], bucket["full"]
        ratios.append(full_rows[0].out_dim / lda_rows[0].out_dim)
        gains.append(
            float(np.mean([r.accuracy for r in lda_rows]))
            - float(np.mean([r.accuracy for r in full_rows]))
        )
    if len(ratios) < 3:
        raise ValueError(
            "ratio correlation needs at least 3 (backbone, dataset) groups "
            "with both lda and full rows"
        )
    x = np.asarray(ratios)
    y = np.asarray(gains)
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise UndefinedCorrelationError("a series has zero variance")
    return float(np.corrcoef(x, y)[0, 1])


def significance_report(records, baseline: str = "lda") -> list[SignificanceResult]:
    """Per-method paired comparison against a baseline method.

    Rows pair on (backbone, dataset, fraction, seed); only ok rows count.
    Methods with fewer than 2 pairs in common with the baseline are skipped.
    """
    by_method: dict[str, dict[tuple, float]] = {}
    order: list[str] = []
    for record in records:
        if record.status != "ok":
            continue
        key = (record.backbone, record.dataset, record.fraction, record.seed)
        if record.method not in by_method:
            by_method[record.method] = {}
            order.append(record.method)
        by_method[record.method][key] = record.accuracy
    if baseline not in by_method:
        raise ValueError(f"baseline method {baseline!r} not present in records")

    base = by_method[baseline]
    results = []
    for method in order:
        if method == baseline:
            continue
        shared = sorted(set(by_method[method]) & set(base))
        if len(shared) < 2:
            continue
        a = np.array([by_method[method][k] for k in shared])
        b = np.array([base[k] for k in shared])
        _, t_p = paired_t_test(a, b)
        results.append(
            SignificanceResult(
                method_a=method,
                method_b=baseline,
                mean_delta=float((a - b).mean()) * 100.0,
                t_p_value=t_p,
                wilcoxon_p_value=wilcoxon_signed_rank(a, b),
                n_seeds=len(shared),
            )
        )
    return results


def aggregate_means(records) -> list[tuple[str, float, float]]:
    """(method, mean accuracy, mean total seconds) over ok rows, in
    first-appearance order."""
    sums: dict[str, list[float]] = {}
    order: list[str] = []
    for record in records:
        if record.status != "ok":
            continue
        if record.method not in sums:
            sums[record.method] = [0.0, 0.0, 0.0]
            order.append(record.method)
        entry = sums[record.method]
        entry[0] += record.accuracy
        entry[1] += record.total_seconds
        entry[2] += 1.0
    return [
        (m, sums[m][0] / sums[m][2], sums[m][1] / sums[m][2]) for m in order
    ]


def write_records(path, records, append: bool = False) -> None:
    """Write (or append) trial rows in the external CSV schema."""
    mode = "a" if append else "w"
    with open(path, mode, newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        if not append or handle.tell() == 0:
            writer.writerow(CSV_FIELDS)
        for r in records:
            writer.writerow(
                [
                    r.method,
                    r.backbone,
                    r.dataset,
                    r.seed,
                    r.fraction,
                    r.out_dim,
                    f"{r.accuracy:.6f}",
                    f"{r.fit_seconds:.6f}",
                    f"{r.train_seconds:.6f}",
                    f"{r.total_seconds:.6f}",
                    r.status,
                ]
            )


def append_records(path, records) -> None:
    write_records(path, records, append=True)


def read_records(path) -> list[TrialRecord]:
    """Parse a results CSV back into TrialRecord rows."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != list(CSV_FIELDS):
            raise ValueError(f"unexpected results header: {header}")
        records = []
        for row in reader:
            if len(row) != len(CSV_FIELDS):
                raise ValueError(f"malformed results row: {row}")
            records.append(
                TrialRecord(
                    method=row[0],
                    backbone=row[1],
                    dataset=row[2],
                    seed=int(row[3]),
                    fraction=float(row[4]),
                    out_dim=int(row[5]),
                    accuracy=float(row[6]),
                    fit_seconds=float(row[7]),
                    train_seconds=float(row[8]),
                    total_seconds=float(row[9]),
                    status=row[10],
                )
            )
    return records
