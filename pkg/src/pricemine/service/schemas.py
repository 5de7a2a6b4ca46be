"""Request/response models for the HTTP service.

The wire format mirrors the core types one-to-one: records carry the seven
listing fields, models travel as their JSON document (the same document the
model file stores), and every response is plain JSON.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field

CategoryLabel = Literal["apartment_rent", "apartment_sale", "house_rent", "house_sale"]

RegressorKind = Literal["linear", "mlp", "svr"]


class RecordPayload(BaseModel):
    title: str
    description: str
    beds: int = Field(ge=0)
    baths: int = Field(ge=0)
    size: int = Field(gt=0)
    location: str = Field(min_length=1)
    price: int = Field(gt=0)


class QueryRecordPayload(BaseModel):
    """A record used only for prediction; price may be omitted."""

    title: str = ""
    description: str = ""
    beds: int = Field(default=0, ge=0)
    baths: int = Field(default=0, ge=0)
    size: int = Field(default=1, gt=0)
    location: str = Field(default="unknown", min_length=1)
    price: int = Field(default=1, gt=0)


class CleaningOptions(BaseModel):
    rent_avg_min: float = Field(default=10_000.0, gt=0)
    rent_avg_max: float = Field(default=100_000.0, gt=0)
    sale_avg_min: float = Field(default=100_000.0, gt=0)
    sale_avg_max: float = Field(default=1_000_000.0, gt=0)


class TextOptions(BaseModel):
    min_token_length: int = Field(default=4, ge=1)
    ngram_max: int = Field(default=2, ge=1)
    df_min_fraction: float = Field(default=0.01, ge=0.0, lt=1.0)
    df_max_fraction: float = Field(default=0.5, gt=0.0, le=1.0)
    correlation_threshold: float = Field(default=0.99, gt=0.0, le=1.0)
    tf_norm: Literal["l2", "token_count"] = "l2"
    stopwords: list[str] | None = None


class RegressorOptions(BaseModel):
    kind: RegressorKind = "linear"
    hyperparameters: dict[str, Any] = Field(default_factory=dict)
    seed: int = 0


class HealthResponse(BaseModel):
    status: str
    version: str


class CleanRequest(BaseModel):
    records: list[RecordPayload]
    category: CategoryLabel
    cleaning: CleaningOptions = Field(default_factory=CleaningOptions)


class CleanResponse(BaseModel):
    records: list[RecordPayload]
    input_count: int
    after_dedup: int
    after_threshold: int


class TrainRequest(BaseModel):
    records: list[RecordPayload] = Field(min_length=2)
    stage1: RegressorOptions = Field(default_factory=RegressorOptions)
    text: TextOptions = Field(default_factory=TextOptions)
    cleaning: CleaningOptions = Field(default_factory=CleaningOptions)
    residual_mode: Literal["in_sample", "out_of_fold"] = "in_sample"


class TrainResponse(BaseModel):
    model: dict[str, Any]
    stage1_rmse: float
    two_stage_rmse: float
    record_count: int
    text_feature_count: int


class EvaluateRequest(BaseModel):
    records: list[RecordPayload] = Field(min_length=2)
    category: CategoryLabel
    stage1: RegressorOptions = Field(default_factory=RegressorOptions)
    text: TextOptions = Field(default_factory=TextOptions)
    folds: int = Field(default=10, ge=2)
    seed: int = 0


class EvaluateResponse(BaseModel):
    metadata: dict[str, Any]
    folds: list[dict[str, Any]]
    aggregates: dict[str, dict[str, float | None]]


class PredictRequest(BaseModel):
    model: dict[str, Any]
    records: list[QueryRecordPayload]


class PredictResponse(BaseModel):
    predicted: list[float]
    stage1_component: list[float]
    stage2_component: list[float]


class KeywordsRequest(BaseModel):
    model: dict[str, Any]
    top_k: int = Field(default=10, ge=1)


class KeywordEntry(BaseModel):
    term: str
    weight: float


class KeywordsResponse(BaseModel):
    positive: list[KeywordEntry]
    negative: list[KeywordEntry]
    top_k: int


class HighlightRequest(BaseModel):
    model: dict[str, Any]
    record: QueryRecordPayload


class HighlightTokenPayload(BaseModel):
    text: str
    color: tuple[float, float, float]
    score: float


class HighlightResponse(BaseModel):
    tokens: list[HighlightTokenPayload]


class SynthRequest(BaseModel):
    count: int = Field(default=2000, ge=1)
    category: CategoryLabel = "apartment_rent"
    seed: int = 0
    noise_sigma: float = Field(default=5000.0, ge=0.0)
    keyword_count: int = Field(default=20, ge=0, le=20)
    effect_min: float = Field(default=5000.0, gt=0.0)
    effect_max: float = Field(default=20000.0, gt=0.0)


class SynthResponse(BaseModel):
    records: list[RecordPayload]
    keyword_effects: dict[str, float]
