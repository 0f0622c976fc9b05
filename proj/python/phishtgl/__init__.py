"""Temporal graph contrastive learning for blockchain phishing detection.

Thin wrapper around the C++ core. The heavy operations (graph construction,
feature extraction, contrastive pretraining, boosted-tree classification,
fund-flow tracing) all run natively; JSON-producing calls are decoded into
plain Python structures here.
"""

import json as _json

from ._core import (
    ContrastiveConfig,
    Dataset,
    EntityCategory,
    EntityLabels,
    EvalProtocol,
    FeatureConfig,
    GbdtConfig,
    Htamg,
    LogFormat,
    ModelConfig,
    NeighborSample,
    PhishtglError,
    PipelineConfig,
    RawTransaction,
    SplitMode,
    SyntheticConfig,
    SyntheticData,
    TraceConfig,
    TxCategory,
    auc_score,
    build_graph,
    compute_metrics,
    extract_features,
    filter_and_categorize,
    gen_synthetic,
    parse_jsonl,
    parse_log_string,
    serialize_jsonl,
)
from ._core import aggregate_traces_json as _aggregate_traces_json
from ._core import run_experiment_json as _run_experiment_json
from ._core import trace_funds_json as _trace_funds_json


def run_experiment(dataset, config):
    """Full protocol run; returns the metrics report as a dict."""
    return _json.loads(_run_experiment_json(dataset, config))


def trace_funds(ledger, root, labels=None, config=None, token="ETH"):
    """Taint-trace stolen funds from one root; returns the trace tree."""
    return _json.loads(
        _trace_funds_json(ledger, root, labels or EntityLabels(), config or TraceConfig(), token)
    )


def aggregate_traces(ledger, roots, labels=None, config=None, token="ETH"):
    """Trace several roots and bucket leaf amounts by destination category."""
    return _json.loads(
        _aggregate_traces_json(
            ledger, list(roots), labels or EntityLabels(), config or TraceConfig(), token
        )
    )


__all__ = [
    "ContrastiveConfig",
    "Dataset",
    "EntityCategory",
    "EntityLabels",
    "EvalProtocol",
    "FeatureConfig",
    "GbdtConfig",
    "Htamg",
    "LogFormat",
    "ModelConfig",
    "NeighborSample",
    "PhishtglError",
    "PipelineConfig",
    "RawTransaction",
    "SplitMode",
    "SyntheticConfig",
    "SyntheticData",
    "TraceConfig",
    "TxCategory",
    "aggregate_traces",
    "auc_score",
    "build_graph",
    "compute_metrics",
    "extract_features",
    "filter_and_categorize",
    "gen_synthetic",
    "parse_jsonl",
    "parse_log_string",
    "run_experiment",
    "serialize_jsonl",
    "trace_funds",
]
