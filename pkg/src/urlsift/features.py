"""Combined URL feature vectors and correlation-based pruning analysis.

Layout: trigram buckets first, then the 23 lexical slots. A featurizer with
``tri_cfg=None`` runs in lexical-only mode.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import LengthMismatch, TooFewSamples
from .lexical import N_LEXICAL, LexicalConfig, extract_lexical, lexical_names
from .parsing import SuffixList, parse_url, split_host
from .trigrams import TrigramConfig, featurize_trigrams

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    schema_version: int = SCHEMA_VERSION

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Featurizer:
    tri_cfg: Optional[TrigramConfig] = field(default_factory=TrigramConfig)
    lex_cfg: LexicalConfig = field(default_factory=LexicalConfig.default)
    suffix_list: SuffixList = field(default_factory=SuffixList.default)

    @property
    def bucket_count(self) -> int:
        return self.tri_cfg.bucket_count if self.tri_cfg is not None else 0

    @property
    def feature_count(self) -> int:
        return self.bucket_count + N_LEXICAL

    def feature_names(self) -> list[str]:
        return [f"tri_{i}" for i in range(self.bucket_count)] + lexical_names()

    def values(self, raw: str) -> np.ndarray:
        parts = parse_url(raw)
        lex = extract_lexical(parts, split_host(parts.host, self.suffix_list), self.lex_cfg)
        if self.tri_cfg is None:
            return np.array(lex, dtype=np.float64)
        out = np.empty(self.feature_count, dtype=np.float64)
        out[: self.bucket_count] = featurize_trigrams(raw, self.tri_cfg)
        out[self.bucket_count :] = lex
        return out

    def __call__(self, raw: str) -> FeatureVector:
        return FeatureVector(self.values(raw))

    def matrix(self, urls: Sequence[str]) -> np.ndarray:
        X = np.empty((len(urls), self.feature_count), dtype=np.float64)
        for i, url in enumerate(urls):
            X[i] = self.values(url)
        return X


def featurize_url(
    raw: str,
    tri_cfg: Optional[TrigramConfig] = TrigramConfig(),
    lex_cfg: Optional[LexicalConfig] = None,
    suffix_list: Optional[SuffixList] = None,
) -> FeatureVector:
    return Featurizer(
        tri_cfg=tri_cfg,
        lex_cfg=lex_cfg if lex_cfg is not None else LexicalConfig.default(),
        suffix_list=suffix_list if suffix_list is not None else SuffixList.default(),
    )(raw)


def pearson_corr(xs, ys) -> float:
    """Sample Pearson coefficient; 0.0 when either side has zero variance."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch(f"lengths differ: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise TooFewSamples("need at least 2 samples")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


@dataclass
class PruneMask:
    retained: list[bool]
    dropped_pairs: list[tuple[int, int, float]]

    @property
    def dropped(self) -> list[int]:
        return [i for i, keep in enumerate(self.retained) if not keep]


def prune_features(matrix, threshold: float = 0.75) -> PruneMask:
    """Greedy pairwise pruning, keeping the lower index of each correlated pair."""
    M = np.asarray(matrix, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] < 2:
        raise TooFewSamples("pruning needs at least 2 rows")
    n_features = M.shape[1]
    retained = [True] * n_features
    pairs = []
    for i in range(n_features):
        if not retained[i]:
            continue
        for j in range(i + 1, n_features):
            if not retained[j]:
                continue
            r = pearson_corr(M[:, i], M[:, j])
            if abs(r) > threshold:
                retained[j] = False
                pairs.append((i, j, r))
    return PruneMask(retained, pairs)


def write_prune_report(mask: PruneMask, fh, names: Optional[Sequence[str]] = None) -> None:
    """Emit one CSV row per feature: name, status, partner, correlation."""
    names = list(names) if names is not None else lexical_names()
    partner = {j: (i, r) for i, j, r in mask.dropped_pairs}
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["feature", "status", "partner", "correlation"])
    for idx, keep in enumerate(mask.retained):
        if keep:
            writer.writerow([names[idx], "kept", "", ""])
        else:
            i, r = partner[idx]
            writer.writerow([names[idx], "dropped", names[i], repr(r)])
