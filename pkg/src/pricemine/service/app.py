"""FastAPI application exposing the training, evaluation and reporting API.

Endpoints are stateless: models travel inside the request as their JSON
document, so any instance can serve any request. Core-level errors map to
HTTP 400 with the error class name in the detail string.
"""

from __future__ import annotations

from importlib import metadata

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import evaluation, keywords, pipeline, synth
from ..errors import PricemineError
from ..records import ClassifiedRecord, CleaningConfig, ListingCategory, clean_with_counts
from ..regressors import RegressorSpec
from ..text import TextConfig, default_stopwords
from . import schemas


def _version() -> str:
    try:
        return metadata.version("pricemine")
    except metadata.PackageNotFoundError:
        return "unknown"


def _to_record(payload: schemas.RecordPayload | schemas.QueryRecordPayload) -> ClassifiedRecord:
    return ClassifiedRecord(
        title=payload.title,
        description=payload.description,
        beds=payload.beds,
        baths=payload.baths,
        size=payload.size,
        location=payload.location,
        price=payload.price,
    )


def _to_payload(record: ClassifiedRecord) -> schemas.RecordPayload:
    return schemas.RecordPayload(
        title=record.title,
        description=record.description,
        beds=record.beds,
        baths=record.baths,
        size=record.size,
        location=record.location,
        price=record.price,
    )


def _cleaning_config(options: schemas.CleaningOptions) -> CleaningConfig:
    return CleaningConfig(
        rent_avg_min=options.rent_avg_min,
        rent_avg_max=options.rent_avg_max,
        sale_avg_min=options.sale_avg_min,
        sale_avg_max=options.sale_avg_max,
    )


def _text_config(options: schemas.TextOptions) -> TextConfig:
    stopwords = (
        default_stopwords() if options.stopwords is None else frozenset(options.stopwords)
    )
    return TextConfig(
        min_token_length=options.min_token_length,
        ngram_max=options.ngram_max,
        df_min_fraction=options.df_min_fraction,
        df_max_fraction=options.df_max_fraction,
        stopwords=stopwords,
        correlation_threshold=options.correlation_threshold,
        tf_norm=options.tf_norm,
    )


def _regressor_spec(options: schemas.RegressorOptions) -> RegressorSpec:
    return RegressorSpec(
        kind=options.kind,
        hyperparameters=dict(options.hyperparameters),
        seed=options.seed,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="pricemine",
        version=_version(),
        description="Two-stage price regression for real-estate classifieds.",
    )

    @app.exception_handler(PricemineError)
    async def _core_error(_: Request, exc: PricemineError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"detail": f"{type(exc).__name__}: {exc}"},
        )

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=_version())

    @app.post("/clean", response_model=schemas.CleanResponse)
    def clean_records(request: schemas.CleanRequest) -> schemas.CleanResponse:
        records = [_to_record(r) for r in request.records]
        category = ListingCategory.parse(request.category)
        cleaned, counts = clean_with_counts(records, category, _cleaning_config(request.cleaning))
        return schemas.CleanResponse(
            records=[_to_payload(r) for r in cleaned],
            input_count=counts.input,
            after_dedup=counts.after_dedup,
            after_threshold=counts.after_threshold,
        )

    @app.post("/train", response_model=schemas.TrainResponse)
    def train(request: schemas.TrainRequest) -> schemas.TrainResponse:
        records = [_to_record(r) for r in request.records]
        model = pipeline.fit_two_stage(
            records,
            _regressor_spec(request.stage1),
            _text_config(request.text),
            cleaning_config=_cleaning_config(request.cleaning),
            residual_mode=request.residual_mode,
        )
        price = np.array([r.price for r in records], dtype=np.float64)
        stage1_pred = pipeline.predict_stage1_only(model, records)
        full_pred = stage1_pred + pipeline.predict_stage2_component(model, records)
        return schemas.TrainResponse(
            model=pipeline.model_to_document(model),
            stage1_rmse=evaluation.rmse(stage1_pred, price),
            two_stage_rmse=evaluation.rmse(full_pred, price),
            record_count=len(records),
            text_feature_count=len(model.kept_text_columns),
        )

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(request: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
        records = [_to_record(r) for r in request.records]
        report = evaluation.cross_validate(
            records,
            ListingCategory.parse(request.category),
            _regressor_spec(request.stage1),
            _text_config(request.text),
            folds=request.folds,
            seed=request.seed,
        )
        return schemas.EvaluateResponse(**report.to_dict())

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict_prices(request: schemas.PredictRequest) -> schemas.PredictResponse:
        model = pipeline.model_from_document(request.model)
        records = [_to_record(r) for r in request.records]
        stage1 = pipeline.predict_stage1_only(model, records)
        stage2 = pipeline.predict_stage2_component(model, records)
        return schemas.PredictResponse(
            predicted=list(stage1 + stage2),
            stage1_component=list(stage1),
            stage2_component=list(stage2),
        )

    @app.post("/keywords", response_model=schemas.KeywordsResponse)
    def keyword_report(request: schemas.KeywordsRequest) -> schemas.KeywordsResponse:
        model = pipeline.model_from_document(request.model)
        table = keywords.keyword_table(model, request.top_k).to_dict()
        return schemas.KeywordsResponse(**table)

    @app.post("/highlight", response_model=schemas.HighlightResponse)
    def highlight_record(request: schemas.HighlightRequest) -> schemas.HighlightResponse:
        model = pipeline.model_from_document(request.model)
        doc = keywords.highlight(model, _to_record(request.record))
        return schemas.HighlightResponse(**doc.to_dict())

    @app.post("/synth", response_model=schemas.SynthResponse)
    def synth_corpus(request: schemas.SynthRequest) -> schemas.SynthResponse:
        corpus = synth.generate_corpus(
            count=request.count,
            category=ListingCategory.parse(request.category),
            seed=request.seed,
            noise_sigma=request.noise_sigma,
            keyword_count=request.keyword_count,
            effect_min=request.effect_min,
            effect_max=request.effect_max,
        )
        return schemas.SynthResponse(
            records=[_to_payload(r) for r in corpus.records],
            keyword_effects=corpus.keyword_effects,
        )

    return app


app = create_app()
