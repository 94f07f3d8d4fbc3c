"""Keyphrase evaluation metrics (Python bindings)."""

import json

from ._core import (
    KpevalError,
    __version__,
    bootstrap_ci,
    dup_token_ratio,
    emb_sim,
    exact_match_prf,
    kendall_tau,
    normalize,
    parse_phrase_list,
    pearson,
    porter_stem,
    r_precision,
    rouge_l_prf,
    sem_cov,
    sem_prf,
    sem_prf_from_similarities,
    spearman,
    substring_match_prf,
)
from ._core import run_eval as _run_eval


def evaluate(instances, **kwargs):
    """Runs an evaluation and returns the parsed report records.

    Keyword arguments: embeddings, stub_scorer, dimensions, k, base, alpha,
    timestamp, workers.
    """
    report = {"metadata": None, "documents": [], "skips": [], "aggregate": None}
    for line in _run_eval(str(instances), **kwargs).splitlines():
        rec = json.loads(line)
        kind = rec.pop("type")
        if kind == "document":
            report["documents"].append(rec)
        elif kind == "skip":
            report["skips"].append(rec)
        else:
            report[kind] = rec
    return report


__all__ = [name for name in dir() if not name.startswith("_")]
