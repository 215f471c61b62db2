"""Baselining transforms and plot-data emission.

The tool emits plot DATA as CSV, never rendered images. Four files are
produced, one per headline chart: demand by region, unemployment by region,
baselined population growth, and per-point actual vs model vs benchmark
predictions baselined by each region's first observed performance.

Baselining expresses a series relative to a reference year, either by
subtracting the baseline value (differences, natural for errors in
percentage points) or dividing by it (ratios, natural for growth).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from workforecast.errors import InvalidConfig, MissingBaselineYear, ZeroBaseline
from workforecast.evaluate import EvalReport
from workforecast.features import FeatureConfig, FeatureRow
from workforecast.ingest import RegionalSeries
from workforecast.perf import PerformanceRow

BASELINE_MODES = ("difference", "ratio")

FIGURE_FILENAMES = {
    "demand": "fig1_demand.csv",
    "unemployment": "fig2_unemployment.csv",
    "population": "fig3_population.csv",
    "eval": "fig4_eval.csv",
}


@dataclass(frozen=True)
class BaselinedSeries:
    """A series re-expressed relative to its value at the baseline year."""

    label: str
    baseline_year: int
    baseline_value: float
    mode: str
    points: tuple[tuple[int, float], ...]


def baseline(
    series: Mapping[int, float],
    baseline_year: int,
    mode: str,
    label: str = "",
) -> BaselinedSeries:
    """Subtract (difference mode) or divide by (ratio mode) the baseline value."""
    if mode not in BASELINE_MODES:
        raise InvalidConfig(f"unknown baseline mode {mode!r}; expected one of {', '.join(BASELINE_MODES)}")
    if baseline_year not in series:
        raise MissingBaselineYear(
            f"baseline year {baseline_year} is not in the series" + (f" {label!r}" if label else ""),
            year=baseline_year,
        )
    base = float(series[baseline_year])
    if mode == "ratio" and base == 0.0:
        raise ZeroBaseline(
            f"cannot baseline by ratio: value at {baseline_year} is zero"
            + (f" in series {label!r}" if label else ""),
            year=baseline_year,
        )
    if mode == "difference":
        points = tuple((year, float(series[year]) - base) for year in sorted(series))
    else:
        points = tuple((year, float(series[year]) / base) for year in sorted(series))
    return BaselinedSeries(
        label=label, baseline_year=baseline_year, baseline_value=base, mode=mode, points=points
    )


def unbaseline(baselined: BaselinedSeries) -> dict[int, float]:
    """Invert `baseline` using the stored baseline value."""
    if baselined.mode == "difference":
        return {year: value + baselined.baseline_value for year, value in baselined.points}
    return {year: value * baselined.baseline_value for year, value in baselined.points}


def _write_rows(path: Path, header: tuple[str, ...], rows: list[list], comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if comment is not None:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _default_population_baseline_year(series_by_region: dict[str, RegionalSeries]) -> int:
    """Earliest year covered by every region."""
    common: set[int] | None = None
    for series in series_by_region.values():
        years = set(series.years)
        common = years if common is None else common & years
    if not common:
        raise MissingBaselineYear("no year is shared by all regions; pass an explicit baseline year")
    return min(common)


def emit_figure_data(
    series_by_region: dict[str, RegionalSeries],
    feature_rows: list[FeatureRow],
    feature_config: FeatureConfig,
    performance_rows: list[PerformanceRow],
    eval_report: EvalReport,
    out_dir: str | Path,
    baseline_year: int | None = None,
    population_mode: str = "ratio",
    performance_mode: str = "difference",
) -> dict[str, Path]:
    """Write the four plot-data CSVs into out_dir and return their paths.

    Population is baselined at `baseline_year` (default: the earliest year
    shared by all regions). The evaluation chart is baselined per region by
    the region's first observed performance value.
    """
    for mode in (population_mode, performance_mode):
        if mode not in BASELINE_MODES:
            raise InvalidConfig(
                f"unknown baseline mode {mode!r}; expected one of {', '.join(BASELINE_MODES)}"
            )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {key: out / name for key, name in FIGURE_FILENAMES.items()}

    # demand, as built under the active feature configuration
    _write_rows(
        paths["demand"],
        ("region", "year", "value"),
        [[row.region_id, row.year, repr(row.demand)] for row in sorted(feature_rows, key=lambda r: (r.region_id, r.year))],
        comment=f"normalized={int(feature_config.normalize)}",
    )

    # long-term unemployed head-counts over the full covered years
    unemployment_rows = []
    for region in sorted(series_by_region):
        series = series_by_region[region]
        for year in series.years:
            unemployment_rows.append([region, year, series.unemployed_6m[year]])
    _write_rows(paths["unemployment"], ("region", "year", "value"), unemployment_rows)

    # total population baselined at a common year
    pop_year = baseline_year if baseline_year is not None else _default_population_baseline_year(series_by_region)
    population_rows = []
    for region in sorted(series_by_region):
        series = series_by_region[region]
        totals = {year: float(sum(series.population[year].values())) for year in series.years}
        baselined = baseline(totals, pop_year, population_mode, label=region)
        population_rows.extend([region, year, repr(value)] for year, value in baselined.points)
    _write_rows(paths["population"], ("region", "year", "ratio"), population_rows)

    # actual vs model vs benchmark, baselined by each region's first performance
    first_performance: dict[str, float] = {}
    for row in sorted(performance_rows, key=lambda r: (r.region_id, r.entry_year)):
        first_performance.setdefault(row.region_id, row.performance)
    eval_rows = []
    for fold in eval_report.folds:
        if fold.region_id not in first_performance:
            raise MissingBaselineYear(
                f"region {fold.region_id!r} has no performance rows to baseline against",
                region=fold.region_id,
            )
        base = first_performance[fold.region_id]
        if performance_mode == "ratio" and base == 0.0:
            raise ZeroBaseline(
                f"region {fold.region_id!r}: first performance is zero, cannot baseline by ratio",
                region=fold.region_id,
            )

        def rebase(value: float | None) -> str:
            if value is None:
                return ""
            return repr(value - base) if performance_mode == "difference" else repr(value / base)

        eval_rows.append(
            [fold.region_id, fold.year, rebase(fold.actual), rebase(fold.pred_model), rebase(fold.pred_benchmark)]
        )
    _write_rows(
        paths["eval"],
        ("region", "year", "actual_baselined", "model_baselined", "benchmark_baselined"),
        eval_rows,
    )
    return paths
