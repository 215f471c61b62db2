"""Leave-one-out cross-validation against the historical-mean benchmark.

Each fold refits the model on the other n-1 points and predicts the held-out
point. The benchmark predicts the held-out point as the arithmetic mean of
the training fold's performance values ("trainfold-mean", the default) or of
performances from strictly earlier years across all regions
("prior-years-mean"); folds with no earlier year have no benchmark prediction
and are excluded from the benchmark metrics.

Errors are summarized as mean absolute error and the sample (n-1) standard
deviation of the absolute errors, both in percentage points. The relative
inaccuracy of the benchmark is computed from the unrounded MAEs and only
rounded for display.
"""
from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from pathlib import Path

from workforecast.errors import (
    EmptyFolds,
    InvalidConfig,
    RankDeficientDesign,
    RankDeficientFold,
    TooFewObservations,
)
from workforecast.features import FeatureConfig, FeatureRow
from workforecast.model import fit, predict
from workforecast.perf import PerformanceRow

BENCHMARK_MODES = ("trainfold-mean", "prior-years-mean")

STD_DEFINITION = "sample (n-1) standard deviation of the absolute errors"


@dataclass(frozen=True)
class FoldResult:
    """One held-out point: its actual value, both predictions, both errors."""

    region_id: str
    year: int
    actual: float
    pred_model: float
    pred_benchmark: float | None
    abs_err_model: float
    abs_err_benchmark: float | None


@dataclass(frozen=True)
class EvalReport:
    folds: tuple[FoldResult, ...]
    mae_model_pct: float
    mae_benchmark_pct: float | None
    std_model_pct: float
    std_benchmark_pct: float | None
    relative_inaccuracy_pct: float | None
    benchmark_mode: str
    feature_config: FeatureConfig
    scope: str = "pooled"


def build_dataset(
    feature_rows: list[FeatureRow],
    performance_rows: list[PerformanceRow],
) -> list[tuple[FeatureRow, float]]:
    """Inner-join features with performance on (region, year), sorted."""
    targets = {(row.region_id, row.entry_year): row.performance for row in performance_rows}
    pairs = [
        (row, targets[(row.region_id, row.year)])
        for row in feature_rows
        if (row.region_id, row.year) in targets
    ]
    pairs.sort(key=lambda pair: (pair[0].region_id, pair[0].year))
    return pairs


def relative_inaccuracy(mae_model: float | None, mae_benchmark: float | None) -> float | None:
    """(mae_benchmark / mae_model - 1) * 100; undefined when mae_model is 0."""
    if mae_model is None or mae_benchmark is None or mae_model == 0.0:
        return None
    return (mae_benchmark / mae_model - 1.0) * 100.0


def metrics(
    folds: list[FoldResult] | tuple[FoldResult, ...],
) -> tuple[float, float | None, float, float | None, float | None]:
    """(mae_model_pct, mae_benchmark_pct, std_model_pct, std_benchmark_pct, relative_inaccuracy_pct).

    Benchmark metrics cover only folds that have a benchmark prediction and
    are None when no fold does. A single fold has no sample spread, so its
    std is reported as 0.
    """
    if not folds:
        raise EmptyFolds("no folds to summarize")
    model_errors = [fold.abs_err_model for fold in folds]
    benchmark_errors = [fold.abs_err_benchmark for fold in folds if fold.abs_err_benchmark is not None]

    mae_model = statistics.fmean(model_errors) * 100.0
    std_model = statistics.stdev(model_errors) * 100.0 if len(model_errors) > 1 else 0.0
    if benchmark_errors:
        mae_benchmark = statistics.fmean(benchmark_errors) * 100.0
        std_benchmark = statistics.stdev(benchmark_errors) * 100.0 if len(benchmark_errors) > 1 else 0.0
    else:
        mae_benchmark = None
        std_benchmark = None
    return mae_model, mae_benchmark, std_model, std_benchmark, relative_inaccuracy(mae_model, mae_benchmark)


def _benchmark_prediction(
    mode: str,
    train: list[tuple[FeatureRow, float]],
    dataset: list[tuple[FeatureRow, float]],
    test_row: FeatureRow,
) -> float | None:
    if mode == "trainfold-mean":
        return statistics.fmean(target for _, target in train)
    earlier = [target for row, target in dataset if row.year < test_row.year]
    return statistics.fmean(earlier) if earlier else None


def loocv(
    dataset: list[tuple[FeatureRow, float]],
    config: FeatureConfig,
    benchmark_mode: str = "trainfold-mean",
) -> EvalReport:
    """Run one fold per data point; fold i trains on the other n-1 points."""
    if benchmark_mode not in BENCHMARK_MODES:
        raise InvalidConfig(
            f"unknown benchmark mode {benchmark_mode!r}; expected one of {', '.join(BENCHMARK_MODES)}"
        )
    n = len(dataset)
    if n < 4:
        raise TooFewObservations(f"leave-one-out needs at least 4 data points, got {n}")
    data = sorted(dataset, key=lambda pair: (pair[0].region_id, pair[0].year))

    folds = []
    for i, (row, actual) in enumerate(data):
        train = data[:i] + data[i + 1:]
        try:
            model = fit(train, config)
        except RankDeficientDesign as err:
            raise RankDeficientFold(
                f"training fold for ({row.region_id}, {row.year}) is rank deficient: {err}",
                region=row.region_id,
                year=row.year,
            ) from err
        pred_model = predict(model, row, config)
        pred_benchmark = _benchmark_prediction(benchmark_mode, train, data, row)
        folds.append(
            FoldResult(
                region_id=row.region_id,
                year=row.year,
                actual=actual,
                pred_model=pred_model,
                pred_benchmark=pred_benchmark,
                abs_err_model=abs(pred_model - actual),
                abs_err_benchmark=abs(pred_benchmark - actual) if pred_benchmark is not None else None,
            )
        )
    mae_model, mae_benchmark, std_model, std_benchmark, relative = metrics(folds)
    return EvalReport(
        folds=tuple(folds),
        mae_model_pct=mae_model,
        mae_benchmark_pct=mae_benchmark,
        std_model_pct=std_model,
        std_benchmark_pct=std_benchmark,
        relative_inaccuracy_pct=relative,
        benchmark_mode=benchmark_mode,
        feature_config=config,
        scope="pooled",
    )


def loocv_per_region(
    dataset: list[tuple[FeatureRow, float]],
    config: FeatureConfig,
    benchmark_mode: str = "trainfold-mean",
) -> EvalReport:
    """Leave-one-out within each region separately, folds merged for the summary."""
    regions: dict[str, list[tuple[FeatureRow, float]]] = {}
    for row, target in dataset:
        regions.setdefault(row.region_id, []).append((row, target))

    folds: list[FoldResult] = []
    for region in sorted(regions):
        subset = regions[region]
        if len(subset) < 4:
            raise TooFewObservations(
                f"region {region!r} has only {len(subset)} data points; "
                f"per-region leave-one-out needs at least 4"
            )
        folds.extend(loocv(subset, config, benchmark_mode).folds)
    folds.sort(key=lambda fold: (fold.region_id, fold.year))
    mae_model, mae_benchmark, std_model, std_benchmark, relative = metrics(folds)
    return EvalReport(
        folds=tuple(folds),
        mae_model_pct=mae_model,
        mae_benchmark_pct=mae_benchmark,
        std_model_pct=std_model,
        std_benchmark_pct=std_benchmark,
        relative_inaccuracy_pct=relative,
        benchmark_mode=benchmark_mode,
        feature_config=config,
        scope="per-region",
    )


def report_to_dict(report: EvalReport) -> dict:
    return {
        "benchmark_mode": report.benchmark_mode,
        "scope": report.scope,
        "feature_config": report.feature_config.as_dict(),
        "std_definition": STD_DEFINITION,
        "folds": [
            {
                "region": fold.region_id,
                "year": fold.year,
                "actual": fold.actual,
                "pred_model": fold.pred_model,
                "pred_benchmark": fold.pred_benchmark,
                "abs_err_model": fold.abs_err_model,
                "abs_err_benchmark": fold.abs_err_benchmark,
            }
            for fold in report.folds
        ],
        "mae_model_pct": report.mae_model_pct,
        "mae_benchmark_pct": report.mae_benchmark_pct,
        "std_model_pct": report.std_model_pct,
        "std_benchmark_pct": report.std_benchmark_pct,
        "relative_inaccuracy_pct": report.relative_inaccuracy_pct,
    }


def save_report_json(report: EvalReport, path: str | Path, run_config: dict | None = None) -> None:
    payload = report_to_dict(report)
    if run_config is not None:
        payload["run_config"] = run_config
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_report_json(path: str | Path) -> EvalReport:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    folds = tuple(
        FoldResult(
            region_id=entry["region"],
            year=int(entry["year"]),
            actual=float(entry["actual"]),
            pred_model=float(entry["pred_model"]),
            pred_benchmark=None if entry["pred_benchmark"] is None else float(entry["pred_benchmark"]),
            abs_err_model=float(entry["abs_err_model"]),
            abs_err_benchmark=(
                None if entry["abs_err_benchmark"] is None else float(entry["abs_err_benchmark"])
            ),
        )
        for entry in payload["folds"]
    )
    return EvalReport(
        folds=folds,
        mae_model_pct=float(payload["mae_model_pct"]),
        mae_benchmark_pct=(
            None if payload["mae_benchmark_pct"] is None else float(payload["mae_benchmark_pct"])
        ),
        std_model_pct=float(payload["std_model_pct"]),
        std_benchmark_pct=(
            None if payload["std_benchmark_pct"] is None else float(payload["std_benchmark_pct"])
        ),
        relative_inaccuracy_pct=(
            None
            if payload["relative_inaccuracy_pct"] is None
            else float(payload["relative_inaccuracy_pct"])
        ),
        benchmark_mode=payload["benchmark_mode"],
        feature_config=FeatureConfig.from_dict(payload["feature_config"]),
        scope=payload.get("scope", "pooled"),
    )
