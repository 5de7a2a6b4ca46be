"""The two-stage model: structured features predict a base price, text
features predict what is left.

Stage 1 fits any of the three regressors on the structured encoding against
price. Its in-sample predictions are subtracted from the actual prices and
the differences become the training target for stage 2, which is always a
linear model over TF-IDF text features so every term carries an
interpretable weight. Applying the model sums the two components.

Model files are a single JSON document written by a canonical serialiser
(17-significant-digit floats, fixed key order), so saving the same model
twice is byte-identical and a load/save round trip preserves predictions
bitwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import FormatVersionError
from .records import ClassifiedRecord, CleaningConfig
from .regressors import (
    FittedRegressor,
    LinearModel,
    RegressorSpec,
    fit,
    fitted_from_params,
    predict,
)
from .structured import (
    FeatureMatrix,
    LocationEncoder,
    encode_structured,
    fit_location_encoder,
)
from .text import Document, TextConfig, TextVocabulary, correlation_filter, fit_vocabulary, tfidf_encode

FORMAT_VERSION = 1

STAGE2_RIDGE_LAMBDA = 1e-8


@dataclass(frozen=True, eq=False)
class TwoStageModel:
    """Everything needed to reproduce predictions: encoders plus both fits."""

    location_encoder: LocationEncoder
    text_config: TextConfig
    vocabulary: TextVocabulary
    kept_text_columns: tuple[str, ...]
    stage1: FittedRegressor
    stage2: LinearModel
    cleaning_config: CleaningConfig

    def __post_init__(self) -> None:
        if self.stage2.kind != "linear":
            raise ValueError("stage 2 must be a linear model")
        vocab_terms = set(self.vocabulary.terms)
        if not set(self.kept_text_columns) <= vocab_terms:
            raise ValueError("kept text columns must come from the vocabulary")
        object.__setattr__(self, "kept_text_columns", tuple(self.kept_text_columns))


def _documents(records: list[ClassifiedRecord]) -> list[Document]:
    return [(record.title, record.description) for record in records]


def _encode_kept_text(model: TwoStageModel, records: list[ClassifiedRecord]) -> FeatureMatrix:
    # TF normalisation runs over the full vocabulary, exactly as at fit time;
    # the correlation filter only selects columns afterwards.
    full = tfidf_encode(_documents(records), model.vocabulary, model.text_config)
    return full.select(list(model.kept_text_columns))


def fit_two_stage(
    records: list[ClassifiedRecord],
    stage1_spec: RegressorSpec,
    text_config: TextConfig | None = None,
    *,
    cleaning_config: CleaningConfig | None = None,
    residual_mode: str = "in_sample",
) -> TwoStageModel:
    """Fit both stages on cleaned records.

    ``residual_mode`` selects how the stage-2 target is produced:
    ``in_sample`` (default) applies the fitted stage-1 model back to its own
    training records; ``out_of_fold`` derives each residual from a stage-1
    model that never saw the record, for callers worried about leakage.
    """
    if len(records) < 2:
        raise ValueError("fitting needs at least 2 records")
    if residual_mode not in ("in_sample", "out_of_fold"):
        raise ValueError(f"unknown residual_mode: {residual_mode!r}")
    text_config = text_config or TextConfig()

    encoder = fit_location_encoder(records)
    structured = encode_structured(records, encoder)
    price = np.array([record.price for record in records], dtype=np.float64)
    stage1 = fit(stage1_spec, structured, price)

    if residual_mode == "in_sample":
        base = predict(stage1, structured)
    else:
        base = _out_of_fold_base(records, structured, price, stage1_spec)
    residual_target = price - base

    documents = _documents(records)
    vocabulary = fit_vocabulary(documents, text_config)
    text_matrix = tfidf_encode(documents, vocabulary, text_config)
    kept_matrix, _ = correlation_filter(text_matrix, text_config.correlation_threshold)
    stage2 = fit(
        RegressorSpec("linear", {"ridge_lambda": STAGE2_RIDGE_LAMBDA}),
        kept_matrix,
        residual_target,
    )

    return TwoStageModel(
        location_encoder=encoder,
        text_config=text_config,
        vocabulary=vocabulary,
        kept_text_columns=kept_matrix.column_names,
        stage1=stage1,
        stage2=stage2,
        cleaning_config=cleaning_config or CleaningConfig(),
    )


def _out_of_fold_base(
    records: list[ClassifiedRecord],
    structured: FeatureMatrix,
    price: np.ndarray,
    stage1_spec: RegressorSpec,
    folds: int = 5,
) -> np.ndarray:
    """Stage-1 predictions where each record is scored by a model fit without it."""
    n = len(records)
    folds = min(folds, n)
    parts = np.array_split(
        np.random.default_rng(stage1_spec.seed).permutation(n), folds
    )
    base = np.zeros(n, dtype=np.float64)
    for held_out in parts:
        mask = np.ones(n, dtype=bool)
        mask[held_out] = False
        train = FeatureMatrix(structured.column_names, structured.values[mask])
        fold_model = fit(stage1_spec, train, price[mask])
        test = FeatureMatrix(structured.column_names, structured.values[held_out])
        base[held_out] = predict(fold_model, test)
    return base


def predict_stage1_only(model: TwoStageModel, records: list[ClassifiedRecord]) -> np.ndarray:
    """The structured-features price component alone."""
    structured = encode_structured(records, model.location_encoder)
    return predict(model.stage1, structured)


def predict_stage2_component(model: TwoStageModel, records: list[ClassifiedRecord]) -> np.ndarray:
    """The text-features price component alone.

    A record containing no vocabulary term encodes to an all-zero row, so
    its contribution is exactly the stage-2 intercept.
    """
    return predict(model.stage2, _encode_kept_text(model, records))


def predict_two_stage(model: TwoStageModel, records: list[ClassifiedRecord]) -> np.ndarray:
    """Final prediction: the sum of the two components."""
    return predict_stage1_only(model, records) + predict_stage2_component(model, records)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def model_to_document(model: TwoStageModel) -> dict[str, Any]:
    """Plain-JSON representation; key order is part of the file format."""
    stage2_weights = {
        name: float(weight)
        for name, weight in zip(model.stage2.column_names, model.stage2.weights)
    }
    config = model.text_config
    cleaning = model.cleaning_config
    return {
        "format_version": FORMAT_VERSION,
        "stage1": {"kind": model.stage1.kind, "params": model.stage1.to_params()},
        "stage2": {"weights": stage2_weights, "intercept": float(model.stage2.intercept)},
        "vocabulary": {
            "terms": list(model.vocabulary.terms),
            "doc_frequency": list(model.vocabulary.doc_frequency),
            "corpus_size": model.vocabulary.corpus_size,
        },
        "location_encoder": {"locations": list(model.location_encoder.locations)},
        "text_config": {
            "min_token_length": config.min_token_length,
            "ngram_max": config.ngram_max,
            "df_min_fraction": config.df_min_fraction,
            "df_max_fraction": config.df_max_fraction,
            "correlation_threshold": config.correlation_threshold,
            "tf_norm": config.tf_norm,
            "stopwords": sorted(config.stopwords),
        },
        "cleaning_config": {
            "rent_avg_min": cleaning.rent_avg_min,
            "rent_avg_max": cleaning.rent_avg_max,
            "sale_avg_min": cleaning.sale_avg_min,
            "sale_avg_max": cleaning.sale_avg_max,
        },
    }


def model_from_document(document: Any) -> TwoStageModel:
    """Rebuild a model from its JSON document; validates the format version."""
    if not isinstance(document, dict):
        raise FormatVersionError("model document must be a JSON object")
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatVersionError(
            f"model format version mismatch: expected {FORMAT_VERSION}, got {version!r}"
        )
    try:
        stage1 = fitted_from_params(document["stage1"]["kind"], document["stage1"]["params"])
        stage2_doc = document["stage2"]
        kept = tuple(stage2_doc["weights"])
        stage2 = LinearModel(
            column_names=kept,
            weights=np.array([stage2_doc["weights"][t] for t in kept], dtype=np.float64),
            intercept=float(stage2_doc["intercept"]),
        )
        vocab_doc = document["vocabulary"]
        vocabulary = TextVocabulary(
            terms=tuple(vocab_doc["terms"]),
            doc_frequency=tuple(vocab_doc["doc_frequency"]),
            corpus_size=int(vocab_doc["corpus_size"]),
        )
        config_doc = document["text_config"]
        text_config = TextConfig(
            min_token_length=int(config_doc["min_token_length"]),
            ngram_max=int(config_doc["ngram_max"]),
            df_min_fraction=float(config_doc["df_min_fraction"]),
            df_max_fraction=float(config_doc["df_max_fraction"]),
            stopwords=frozenset(config_doc["stopwords"]),
            correlation_threshold=float(config_doc["correlation_threshold"]),
            tf_norm=str(config_doc["tf_norm"]),
        )
        cleaning_doc = document["cleaning_config"]
        cleaning = CleaningConfig(
            rent_avg_min=float(cleaning_doc["rent_avg_min"]),
            rent_avg_max=float(cleaning_doc["rent_avg_max"]),
            sale_avg_min=float(cleaning_doc["sale_avg_min"]),
            sale_avg_max=float(cleaning_doc["sale_avg_max"]),
        )
        encoder = LocationEncoder(tuple(document["location_encoder"]["locations"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatVersionError(f"malformed model document: {exc}") from exc
    return TwoStageModel(
        location_encoder=encoder,
        text_config=text_config,
        vocabulary=vocabulary,
        kept_text_columns=kept,
        stage1=stage1,
        stage2=stage2,
        cleaning_config=cleaning,
    )


def _format_float(value: float) -> str:
    if not np.isfinite(value):
        raise ValueError("model documents cannot contain non-finite numbers")
    return format(float(value), ".17g")


def _canonical_json(value: Any) -> str:
    """Deterministic JSON: insertion-ordered keys, 17-significant-digit floats."""
    if value is None or isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_canonical_json(item) for item in value) + "]"
    if isinstance(value, dict):
        parts = (
            json.dumps(str(key), ensure_ascii=False) + ":" + _canonical_json(item)
            for key, item in value.items()
        )
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def serialize_model_document(document: dict[str, Any]) -> bytes:
    return (_canonical_json(document) + "\n").encode("utf-8")


def save_model(model: TwoStageModel, path: str | Path) -> None:
    """Write the model as canonical JSON; repeated saves are byte-identical."""
    Path(path).write_bytes(serialize_model_document(model_to_document(model)))


def load_model_document(path: str | Path) -> dict[str, Any]:
    """Read and version-check a model file without rebuilding the model."""
    try:
        text = Path(path).read_text("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatVersionError(f"not a model file: {exc}") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatVersionError(f"not a model file: {exc}") from exc
    if not isinstance(document, dict) or document.get("format_version") != FORMAT_VERSION:
        raise FormatVersionError(
            f"model format version mismatch: expected {FORMAT_VERSION}"
        )
    return document


def load_model(path: str | Path) -> TwoStageModel:
    return model_from_document(load_model_document(path))
