"""k-fold cross-validation comparing the one-stage and two-stage models.

Records are shuffled deterministically by seed and split into near-equal
folds. For every fold both variants train on the complement — the one-stage
variant is the stage-1 regressor alone on structured features, the
two-stage variant adds the text model — and are scored on the held-out fold
by RMSE and Pearson correlation. Aggregates report mean and sample standard
deviation across folds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import EmptyVectorsError, LengthMismatchError, TooFewRecordsError
from .pipeline import fit_two_stage, predict_two_stage
from .records import ClassifiedRecord, ListingCategory
from .regressors import RegressorSpec, fit, predict
from .structured import encode_structured, fit_location_encoder
from .text import TextConfig

VARIANTS = ("one_stage", "two_stage")


def rmse(predicted: np.ndarray, actual: np.ndarray) -> float:
    """Root mean squared error between two equal-length vectors."""
    predicted = np.asarray(predicted, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    if predicted.shape != actual.shape:
        raise LengthMismatchError(
            f"length mismatch: {predicted.shape} vs {actual.shape}"
        )
    if predicted.size == 0:
        raise EmptyVectorsError("rmse needs at least one point")
    difference = predicted - actual
    return float(np.sqrt(np.mean(difference * difference)))


def pearson(predicted: np.ndarray, actual: np.ndarray) -> float | None:
    """Pearson correlation, or None when either vector has zero variance."""
    predicted = np.asarray(predicted, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    if predicted.shape != actual.shape:
        raise LengthMismatchError(
            f"length mismatch: {predicted.shape} vs {actual.shape}"
        )
    if predicted.size < 2:
        return None
    dp = predicted - predicted.mean()
    da = actual - actual.mean()
    denom = float(np.sqrt(np.sum(dp * dp) * np.sum(da * da)))
    if denom == 0.0:
        return None
    return float(np.sum(dp * da) / denom)


@dataclass(frozen=True)
class FoldResult:
    fold: int
    variant: str
    rmse: float
    correlation: float | None


@dataclass(frozen=True)
class VariantAggregate:
    rmse_mean: float
    rmse_std: float
    corr_mean: float | None
    corr_std: float | None


@dataclass(frozen=True)
class EvaluationReport:
    """Per-fold metrics plus per-variant aggregates and run metadata."""

    folds: tuple[FoldResult, ...]
    aggregates: dict[str, VariantAggregate]
    metadata: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {
            "metadata": dict(self.metadata),
            "folds": [
                {
                    "fold": f.fold,
                    "variant": f.variant,
                    "rmse": f.rmse,
                    "correlation": f.correlation,
                }
                for f in self.folds
            ],
            "aggregates": {
                variant: {
                    "rmse_mean": agg.rmse_mean,
                    "rmse_std": agg.rmse_std,
                    "corr_mean": agg.corr_mean,
                    "corr_std": agg.corr_std,
                }
                for variant, agg in self.aggregates.items()
            },
        }


def _aggregate(results: list[FoldResult]) -> VariantAggregate:
    rmses = np.array([r.rmse for r in results], dtype=np.float64)
    correlations = [r.correlation for r in results if r.correlation is not None]
    corr_mean = float(np.mean(correlations)) if correlations else None
    corr_std = (
        float(np.std(correlations, ddof=1)) if len(correlations) >= 2 else None
    )
    return VariantAggregate(
        rmse_mean=float(np.mean(rmses)),
        rmse_std=float(np.std(rmses, ddof=1)) if rmses.size >= 2 else 0.0,
        corr_mean=corr_mean,
        corr_std=corr_std,
    )


def cross_validate(
    records: list[ClassifiedRecord],
    category: ListingCategory,
    stage1_spec: RegressorSpec,
    text_config: TextConfig | None = None,
    folds: int = 10,
    seed: int = 0,
) -> EvaluationReport:
    """Deterministic k-fold comparison of the two variants.

    Every record lands in exactly one test fold. Text features (vocabulary,
    TF-IDF, correlation filter) are refit inside each training fold so no
    held-out text leaks into the model.
    """
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if len(records) < folds:
        raise TooFewRecordsError(
            f"need at least {folds} records for {folds} folds, got {len(records)}"
        )
    text_config = text_config or TextConfig()

    order = np.random.default_rng(seed).permutation(len(records))
    parts = np.array_split(order, folds)

    results: list[FoldResult] = []
    undefined = {variant: 0 for variant in VARIANTS}
    for fold_index, held_out in enumerate(parts):
        mask = np.ones(len(records), dtype=bool)
        mask[held_out] = False
        train = [records[i] for i in np.flatnonzero(mask)]
        test = [records[i] for i in held_out]
        actual = np.array([r.price for r in test], dtype=np.float64)

        predictions = {
            "one_stage": _fit_predict_one_stage(train, test, stage1_spec),
            "two_stage": predict_two_stage(
                fit_two_stage(train, stage1_spec, text_config), test
            ),
        }
        for variant in VARIANTS:
            correlation = pearson(predictions[variant], actual)
            if correlation is None:
                undefined[variant] += 1
            results.append(
                FoldResult(
                    fold=fold_index,
                    variant=variant,
                    rmse=rmse(predictions[variant], actual),
                    correlation=correlation,
                )
            )

    aggregates = {
        variant: _aggregate([r for r in results if r.variant == variant])
        for variant in VARIANTS
    }
    metadata = {
        "dataset": category.label,
        "stage1_kind": stage1_spec.kind,
        "folds": folds,
        "seed": seed,
        "record_count": len(records),
        "undefined_correlations": undefined,
    }
    return EvaluationReport(tuple(results), aggregates, metadata)


def _fit_predict_one_stage(
    train: list[ClassifiedRecord],
    test: list[ClassifiedRecord],
    stage1_spec: RegressorSpec,
) -> np.ndarray:
    encoder = fit_location_encoder(train)
    model = fit(
        stage1_spec,
        encode_structured(train, encoder),
        np.array([r.price for r in train], dtype=np.float64),
    )
    return predict(model, encode_structured(test, encoder))


def render_report_table(report: dict[str, Any], spread: str = "std") -> str:
    """Two-column table comparing the variants, one row per metric.

    ``spread`` picks what follows the ``+/-``: fold standard deviation
    (default) or the standard error of the mean.
    """
    if spread not in ("std", "stderr"):
        raise ValueError(f"unknown spread: {spread!r}")
    meta = report["metadata"]
    aggregates = report["aggregates"]
    scale = 1.0
    if spread == "stderr":
        scale = 1.0 / float(np.sqrt(meta["folds"]))

    def cell(mean: float | None, std: float | None, decimals: int) -> str:
        if mean is None:
            return "undefined"
        if std is None:
            return f"{mean:.{decimals}f}"
        return f"{mean:.{decimals}f} +/- {std * scale:.{decimals}f}"

    one, two = aggregates["one_stage"], aggregates["two_stage"]
    rows = [
        ("RMSE", cell(one["rmse_mean"], one["rmse_std"], 3), cell(two["rmse_mean"], two["rmse_std"], 3)),
        ("Correlation", cell(one["corr_mean"], one["corr_std"], 3), cell(two["corr_mean"], two["corr_std"], 3)),
    ]
    header = ("Metric", "w/o text-mining", "with text mining")
    widths = [
        max(len(header[i]), *(len(row[i]) for row in rows)) for i in range(3)
    ]
    lines = [
        f"dataset={meta['dataset']} stage1={meta['stage1_kind']} "
        f"folds={meta['folds']} seed={meta['seed']}",
        "  ".join(header[i].ljust(widths[i]) for i in range(3)).rstrip(),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(3)).rstrip())
    return "\n".join(lines)
