"""Experiment orchestration: run every dataset x forecaster cell, write reports.

Outputs under ``output_dir``:

* ``summary.csv``: one row per cell (and per sweep value/replicate), with
  metric and timing columns. Timing columns are inherently nondeterministic
  and are excluded from golden-file comparisons.
* ``reports/<...>.json``: full EvalReport per successful cell.
* ``manifest.json``: run status plus every error, once, with identifiers.
* ``plots/time_vs_mae.csv``: scatter data of compute cost against MAE.
* ``plots/noise_sweep.csv`` (sweeps only): per-cell rows, and
  ``plots/noise_sweep_mean.csv`` with replicate/dataset-averaged curves.
* ``cost_comparison.txt`` (LLM runs only): the two cost-efficiency
  inequalities with explicit pass/fail verdicts.
* ``transcripts.jsonl``: raw LLM traffic when any LLM forecaster runs.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import (
    AdapterConfig,
    DatasetConfig,
    ExperimentConfig,
    ForecasterConfig,
)
from .data_io import generate_function_series, load_csv
from .errors import CastlabError
from .eval import (
    EvalReport,
    Forecaster,
    compare_cost_families,
    run_last_sample,
    run_sliding,
)
from .forecasters import (
    LastValueForecaster,
    LinearSingleShotForecaster,
    LlmPromptForecaster,
    PolynomialExtrapolator,
    SeasonalRepeatForecaster,
)
from .llm.adapters import HttpChatAdapter, LlmAdapter, MockAdapter, TranscriptWriter
from .noise import NoiseSpec
from .series import TimeSeries

SUMMARY_COLUMNS = (
    "dataset",
    "forecaster",
    "family",
    "protocol",
    "metric_space",
    "sweep_parameter",
    "sweep_value",
    "replicate",
    "window_count",
    "mae",
    "mse",
    "train_seconds",
    "infer_seconds",
)

TIMING_COLUMNS = ("train_seconds", "infer_seconds")


@dataclass(frozen=True)
class Cell:
    dataset: DatasetConfig
    forecaster: ForecasterConfig
    sweep_value: float | None = None
    replicate: int = 0


@dataclass
class CellResult:
    cell: Cell
    report: EvalReport | None = None
    family: str = "domain"
    error: str | None = None


@dataclass
class ExperimentResult:
    status: int
    output_dir: Path
    results: list[CellResult]
    summary_path: Path
    manifest_path: Path
    cost_lines: list[str]


def _build_adapter(cfg: AdapterConfig) -> LlmAdapter:
    if cfg.type == "mock":
        if cfg.responses is not None:
            return MockAdapter(list(cfg.responses))
        return MockAdapter.from_file(cfg.fixture)
    return HttpChatAdapter(
        endpoint=cfg.endpoint,
        model=cfg.model,
        api_key_env=cfg.api_key_env,
        timeout_seconds=cfg.timeout_seconds,
    )


def build_forecaster(
    cfg: ForecasterConfig, transcript: TranscriptWriter | None = None
) -> Forecaster:
    """Fresh forecaster instance for one cell (linear forecasters are stateful)."""
    if cfg.linear is not None:
        return LinearSingleShotForecaster(cfg.linear, name=cfg.name)
    if cfg.baseline is not None:
        b = cfg.baseline
        if b.type == "last_value":
            return LastValueForecaster(name=cfg.name)
        if b.type == "seasonal_repeat":
            return SeasonalRepeatForecaster(period=b.period, name=cfg.name)
        return PolynomialExtrapolator(degree=b.degree, fit_span=b.fit_span, name=cfg.name)
    assert cfg.llm is not None
    return LlmPromptForecaster(
        adapter=_build_adapter(cfg.llm.adapter),
        style=cfg.llm.style,
        decoding=cfg.llm.decoding,
        decimals=cfg.llm.decimals,
        shots=cfg.llm.shots,
        multi_turn=cfg.llm.multi_turn,
        transcript=transcript,
        channel_concurrency=cfg.llm.channel_concurrency,
        name=cfg.name,
    )


def _load_dataset(cfg: DatasetConfig) -> TimeSeries:
    if cfg.csv_path is not None:
        return load_csv(cfg.csv_path, layout=cfg.csv_layout)
    assert cfg.function is not None
    return generate_function_series(cfg.function)


def _cell_noise(config: ExperimentConfig, cell: Cell) -> NoiseSpec | None:
    noise = config.noise
    if noise is None:
        return None
    if cell.sweep_value is not None and config.sweep is not None:
        field = config.sweep.parameter.split(".", 1)[1]
        noise = replace(noise, **{field: cell.sweep_value})
    if cell.replicate:
        noise = replace(noise, seed=noise.seed + cell.replicate)
    return noise


def _run_cell(config: ExperimentConfig, cell: Cell, transcript: TranscriptWriter | None) -> CellResult:
    forecaster = build_forecaster(cell.forecaster, transcript)
    result = CellResult(cell=cell, family=forecaster.family)
    try:
        series = _load_dataset(cell.dataset)
        runner = run_last_sample if config.protocol == "last_sample" else run_sliding
        result.report = runner(
            series,
            config.task,
            forecaster,
            split=config.split,
            metric_space=config.metric_space,
            dataset_name=cell.dataset.name,
            noise=_cell_noise(config, cell),
            noise_filter=config.noise_filter,
        )
    except (CastlabError, FileNotFoundError, ValueError) as exc:
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def _summary_row(config: ExperimentConfig, res: CellResult) -> dict:
    row = {
        "dataset": res.cell.dataset.name,
        "forecaster": res.cell.forecaster.name,
        "family": res.family,
        "protocol": config.protocol,
        "metric_space": config.metric_space,
        "sweep_parameter": config.sweep.parameter if config.sweep else "",
        "sweep_value": "" if res.cell.sweep_value is None else repr(res.cell.sweep_value),
        "replicate": res.cell.replicate,
        "window_count": res.report.window_count if res.report else "",
        "mae": repr(res.report.mae) if res.report else "",
        "mse": repr(res.report.mse) if res.report else "",
        "train_seconds": f"{res.report.cost.train_seconds:.6f}" if res.report else "",
        "infer_seconds": f"{res.report.cost.infer_seconds:.6f}" if res.report else "",
    }
    return row


def _write_summary(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def _write_plots(config: ExperimentConfig, results: list[CellResult], plots_dir: Path) -> None:
    plots_dir.mkdir(parents=True, exist_ok=True)
    ok = [r for r in results if r.report is not None]

    with open(plots_dir / "time_vs_mae.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["total_seconds", "infer_seconds", "mae", "dataset", "forecaster", "family"])
        for r in ok:
            writer.writerow(
                [
                    f"{r.report.cost.total_seconds:.6f}",
                    f"{r.report.cost.infer_seconds:.6f}",
                    repr(r.report.mae),
                    r.cell.dataset.name,
                    r.cell.forecaster.name,
                    r.family,
                ]
            )

    if config.sweep is None:
        return
    with open(plots_dir / "noise_sweep.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["parameter", "value", "forecaster", "dataset", "replicate", "mae", "mse"])
        for r in ok:
            writer.writerow(
                [
                    config.sweep.parameter,
                    repr(r.cell.sweep_value),
                    r.cell.forecaster.name,
                    r.cell.dataset.name,
                    r.cell.replicate,
                    repr(r.report.mae),
                    repr(r.report.mse),
                ]
            )
    # Replicate- and dataset-averaged curve per forecaster, one row per value.
    with open(plots_dir / "noise_sweep_mean.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["parameter", "value", "forecaster", "mean_mae", "mean_mse", "runs"])
        for fc in config.forecasters:
            for value in config.sweep.values:
                cell_reports = [
                    r.report
                    for r in ok
                    if r.cell.forecaster.name == fc.name and r.cell.sweep_value == value
                ]
                if not cell_reports:
                    continue
                writer.writerow(
                    [
                        config.sweep.parameter,
                        repr(value),
                        fc.name,
                        repr(float(np.mean([rep.mae for rep in cell_reports]))),
                        repr(float(np.mean([rep.mse for rep in cell_reports]))),
                        len(cell_reports),
                    ]
                )


def _report_filename(res: CellResult) -> str:
    parts = [res.cell.dataset.name, res.cell.forecaster.name]
    if res.cell.sweep_value is not None:
        parts.append(f"v{res.cell.sweep_value}")
    if res.cell.replicate:
        parts.append(f"r{res.cell.replicate}")
    stem = "_".join(p.replace("/", "-").replace(" ", "-") for p in parts)
    return f"{stem}.json"


def _cost_comparison_lines(results: list[CellResult]) -> list[str]:
    """The two cost-efficiency inequalities, when an LLM family ran."""
    by_family: dict[str, list] = {}
    for r in results:
        if r.report is not None:
            by_family.setdefault(r.family, []).append(r.report.cost)
    if "llm" not in by_family:
        return []
    comparison = compare_cost_families(
        llm_records=by_family["llm"],
        domain_records=by_family.get("domain"),
        linear_records=by_family.get("linear"),
    )
    return comparison.lines()


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run the full grid; collect errors instead of failing mid-batch.

    Returns status 0 when every cell succeeded, 1 otherwise; the manifest
    itemizes each failed cell exactly once.
    """
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "reports").mkdir(exist_ok=True)

    uses_llm = any(f.llm is not None for f in config.forecasters)
    transcript = TranscriptWriter(out / "transcripts.jsonl") if uses_llm else None

    cells: list[Cell] = []
    sweep_values: list[float | None] = [None]
    replicates = 1
    if config.sweep is not None:
        sweep_values = list(config.sweep.values)
        replicates = config.sweep.replicates
    for ds in config.datasets:
        for fc in config.forecasters:
            for value in sweep_values:
                for rep in range(replicates if value is not None else 1):
                    cells.append(Cell(dataset=ds, forecaster=fc, sweep_value=value, replicate=rep))

    # ThreadPoolExecutor.map preserves input order, so summary rows come out
    # in the same deterministic cell order either way.
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda c: _run_cell(config, c, transcript), cells))
    else:
        results = [_run_cell(config, c, transcript) for c in cells]

    rows = [_summary_row(config, r) for r in results]
    summary_path = out / "summary.csv"
    _write_summary(summary_path, rows)

    for r in results:
        if r.report is not None:
            (out / "reports" / _report_filename(r)).write_text(
                json.dumps(r.report.to_dict(), indent=2), encoding="utf-8"
            )

    _write_plots(config, results, out / "plots")

    cost_lines = _cost_comparison_lines(results)
    if cost_lines:
        (out / "cost_comparison.txt").write_text("\n".join(cost_lines) + "\n", encoding="utf-8")

    errors = [
        {
            "dataset": r.cell.dataset.name,
            "forecaster": r.cell.forecaster.name,
            "sweep_value": r.cell.sweep_value,
            "replicate": r.cell.replicate,
            "error": r.error,
        }
        for r in results
        if r.error is not None
    ]
    status = 0 if not errors else 1
    manifest = {
        "status": "ok" if status == 0 else "errors",
        "cells": len(results),
        "failed": len(errors),
        "protocol": config.protocol,
        "metric_space": config.metric_space,
        "seed": config.seed,
        "errors": errors,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")

    return ExperimentResult(
        status=status,
        output_dir=out,
        results=results,
        summary_path=summary_path,
        manifest_path=manifest_path,
        cost_lines=cost_lines,
    )
