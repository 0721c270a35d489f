"""claimsift: corpus construction and multi-label classification of
sustainability claims in fashion-brand text.

Public surface re-exported here: the corpus pipeline, the trainable
TF-IDF + one-vs-rest SVM baseline, multi-label metrics, the Bayesian
hyperparameter-optimization engine, and the session-based HTTP service.
"""

from .classify import (
    PredictionSet,
    ScoreMatrix,
    export_scores,
    import_scores,
    keyword_classify,
    sigmoid,
    threshold_predict,
)
from .corpus import (
    filter_passages,
    is_english,
    load_documents,
    load_passages,
    segment_sentences,
    split_dataset,
    window_passages,
)
from .hpo import (
    ConfigSpace,
    ForestSurrogate,
    ParamSpec,
    Trial,
    encode_config,
    fit_surrogate,
    load_space,
    log_ei,
    optimize,
    sample_config,
    suggest,
    surrogate_predict,
    tune_svm_baseline,
)
from .metrics import ClassCounts, MetricsReport, class_counts, evaluate
from .schema import (
    DatasetSplit,
    Document,
    KeywordLexicon,
    LabelSchema,
    Passage,
    default_lexicon,
    default_schema,
    load_lexicon,
    load_schema,
)
from .service import AnalysisResult, ServiceConfig, create_app, source_link
from .svm import OvrSvmEnsemble, svm_predict, train_ovr_svm
from .tfidf import SparseVector, TfidfModel, fit_tfidf, tfidf_transform

__version__ = "0.1.0"
