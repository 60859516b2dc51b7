"""Glue between featurization, training and evaluation.

A trained model records the featurizer settings plus digests of every list
that shapes the feature space. Rebuilding a featurizer for a model checks
those digests so train and serve cannot silently drift apart.
"""

from __future__ import annotations

import time
from typing import Optional

import numpy as np

from .dataset import LabeledDataset, class_summary
from .errors import CorruptModel, DigestMismatch
from .features import SCHEMA_VERSION, Featurizer
from .forest import ForestConfig, ForestModel, fit_forest
from .lexical import N_LEXICAL, LexicalConfig, lexical_schema_digest
from .metrics import EvalReport, evaluate_scores
from .parsing import SuffixList
from .trigrams import TrigramConfig


def featurizer_meta(fz: Featurizer) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "layout": "trigrams,lexical",
        "bucket_count": fz.bucket_count,
        "hash_seed": fz.tri_cfg.hash_seed if fz.tri_cfg is not None else 0,
        "hash": "murmur3_x86_32",
        "trigram_values": "counts",
        "n_lexical": N_LEXICAL,
        "lexical_schema_digest": lexical_schema_digest(),
        "suspicious_tlds_digest": fz.lex_cfg.suspicious_tlds_digest,
        "top_domains_digest": fz.lex_cfg.top_domains_digest,
        "suffix_list_digest": fz.suffix_list.digest,
    }


def featurizer_for_model(
    model: ForestModel,
    lex_cfg: Optional[LexicalConfig] = None,
    suffix_list: Optional[SuffixList] = None,
) -> Featurizer:
    """Rebuild the training-time featurizer, verifying list digests."""
    meta = model.featurizer
    try:
        bucket_count = int(meta["bucket_count"])
        hash_seed = int(meta["hash_seed"])
    except (KeyError, TypeError, ValueError):
        raise CorruptModel("featurizer settings") from None
    if meta.get("schema_version") != SCHEMA_VERSION:
        raise DigestMismatch(f"feature schema version {meta.get('schema_version')} != {SCHEMA_VERSION}")
    lex_cfg = lex_cfg if lex_cfg is not None else LexicalConfig.default()
    suffix_list = suffix_list if suffix_list is not None else SuffixList.default()
    checks = {
        "lexical_schema_digest": lexical_schema_digest(),
        "suspicious_tlds_digest": lex_cfg.suspicious_tlds_digest,
        "top_domains_digest": lex_cfg.top_domains_digest,
        "suffix_list_digest": suffix_list.digest,
    }
    for key, actual in checks.items():
        if meta.get(key) != actual:
            raise DigestMismatch(f"{key}: model has {meta.get(key)}, supplied list hashes to {actual}")
    tri_cfg = TrigramConfig(bucket_count, hash_seed) if bucket_count > 0 else None
    fz = Featurizer(tri_cfg=tri_cfg, lex_cfg=lex_cfg, suffix_list=suffix_list)
    if fz.feature_count != model.feature_count:
        raise CorruptModel("feature_count matches featurizer")
    return fz


def train(ds: LabeledDataset, cfg: ForestConfig, fz: Featurizer, n_jobs: int = 1) -> ForestModel:
    X = fz.matrix(ds.urls)
    model = fit_forest(X, np.asarray(ds.labels), cfg, n_jobs=n_jobs)
    model.featurizer = featurizer_meta(fz)
    n_ben, n_mal, frac = class_summary(ds)
    model.metadata = {
        "n_rows": len(ds),
        "n_benign": n_ben,
        "n_malicious": n_mal,
        "benign_fraction": frac,
        "duplicate_urls": ds.duplicate_count,
        "node_count": sum(t.node_count for t in model.trees),
    }
    return model


def evaluate_dataset(model: ForestModel, fz: Featurizer, ds: LabeledDataset, threshold: float = 0.5) -> EvalReport:
    scores = model.predict_scores(fz.matrix(ds.urls))
    return evaluate_scores(ds.labels, scores, threshold)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
