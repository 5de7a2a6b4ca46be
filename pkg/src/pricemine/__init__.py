"""pricemine: two-stage price regression for real-estate classifieds.

Structured features (beds, baths, size, one-hot location) predict a base
price; TF-IDF n-gram features over the listing text predict the remainder,
so every term ends up with an interpretable price weight.
"""

from .errors import PricemineError
from .evaluation import EvaluationReport, cross_validate, pearson, rmse
from .ingest import IngestReport, read_csv, read_jsonl, write_csv
from .keywords import (
    HighlightedDocument,
    KeywordTable,
    highlight,
    keyword_table,
    render_html,
)
from .pipeline import (
    TwoStageModel,
    fit_two_stage,
    load_model,
    predict_stage1_only,
    predict_stage2_component,
    predict_two_stage,
    save_model,
)
from .records import (
    ClassifiedRecord,
    CleaningConfig,
    ListingCategory,
    average_price_per_bedroom,
    clean,
    clean_with_counts,
    deduplicate,
)
from .regressors import FittedRegressor, RegressorSpec, fit, linear_weights, predict
from .structured import FeatureMatrix, LocationEncoder, encode_structured, fit_location_encoder
from .synth import SynthCorpus, generate_corpus
from .text import TextConfig, TextVocabulary, correlation_filter, fit_vocabulary, tfidf_encode, tokenize

__version__ = "0.1.0"

__all__ = [
    "ClassifiedRecord",
    "CleaningConfig",
    "EvaluationReport",
    "FeatureMatrix",
    "FittedRegressor",
    "HighlightedDocument",
    "IngestReport",
    "KeywordTable",
    "ListingCategory",
    "LocationEncoder",
    "PricemineError",
    "RegressorSpec",
    "SynthCorpus",
    "TextConfig",
    "TextVocabulary",
    "TwoStageModel",
    "average_price_per_bedroom",
    "clean",
    "clean_with_counts",
    "correlation_filter",
    "cross_validate",
    "deduplicate",
    "encode_structured",
    "fit",
    "fit_location_encoder",
    "fit_two_stage",
    "fit_vocabulary",
    "generate_corpus",
    "highlight",
    "keyword_table",
    "linear_weights",
    "load_model",
    "pearson",
    "predict",
    "predict_stage1_only",
    "predict_stage2_component",
    "predict_two_stage",
    "read_csv",
    "read_jsonl",
    "render_html",
    "rmse",
    "save_model",
    "tfidf_encode",
    "tokenize",
    "write_csv",
]
