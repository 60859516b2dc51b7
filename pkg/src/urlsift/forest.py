"""Random Forest of binary CART trees (Gini impurity, bagging, feature subsampling).

Trees are stored as flat node arrays. A node with ``feature == -1`` is a leaf;
internal nodes send ``x[feature] <= threshold`` left and everything else right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, EmptyNode, SingleClassDataset, TooFewRows

LEAF = -1
MALICIOUS = 1
BENIGN = 0

# Impurity scores within this relative distance count as ties.
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 20
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    features_per_split: Union[str, int] = "sqrt"
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        fps = self.features_per_split
        if isinstance(fps, str):
            if fps not in ("sqrt", "all"):
                raise ValueError(f"features_per_split must be 'sqrt', 'all' or an int, got {fps!r}")
        elif isinstance(fps, bool) or not isinstance(fps, int) or fps < 1:
            raise ValueError(f"features_per_split must be a positive int, got {fps!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def n_candidates(self, n_features: int) -> int:
        fps = self.features_per_split
        if fps == "sqrt":
            return max(1, math.isqrt(n_features))
        if fps == "all":
            return n_features
        return min(int(fps), n_features)


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    def __post_init__(self):
        self.feature = np.asarray(self.feature, dtype=np.int64)
        self.threshold = np.asarray(self.threshold, dtype=np.float64)
        self.left = np.asarray(self.left, dtype=np.int64)
        self.right = np.asarray(self.right, dtype=np.int64)
        self.value = np.asarray(self.value, dtype=np.float64)
        self.n_samples = np.asarray(self.n_samples, dtype=np.int64)
        # Plain lists make single-row traversal several times faster than
        # indexing numpy scalars.
        self._nodes = list(
            zip(self.feature.tolist(), self.threshold.tolist(), self.left.tolist(), self.right.tolist())
        )
        self._values = self.value.tolist()

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def is_leaf(self, i: int) -> bool:
        return self.feature[i] == LEAF

    def depth(self) -> int:
        """Length in edges of the longest root-to-leaf path."""
        best = 0
        stack = [(0, 0)]
        while stack:
            i, d = stack.pop()
            if self.feature[i] == LEAF:
                best = max(best, d)
            else:
                stack.append((int(self.left[i]), d + 1))
                stack.append((int(self.right[i]), d + 1))
        return best

    def leaf_value(self, x: Sequence[float]) -> float:
        nodes = self._nodes
        i = 0
        f, t, lo, hi = nodes[0]
        while f != LEAF:
            i = lo if x[f] <= t else hi
            f, t, lo, hi = nodes[i]
        return self._values[i]

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        n = X.shape[0]
        idx = np.zeros(n, dtype=np.int64)
        rows = np.arange(n)
        while True:
            f = self.feature[idx]
            internal = f != LEAF
            if not internal.any():
                return idx
            go_left = X[rows, np.where(internal, f, 0)] <= self.threshold[idx]
            nxt = np.where(go_left, self.left[idx], self.right[idx])
            idx = np.where(internal, nxt, idx)

    def predict_values(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


@dataclass
class ForestModel:
    trees: list[Tree]
    config: ForestConfig
    feature_count: int
    format_version: int = 1
    # Featurizer settings needed to rebuild the feature space at serve time;
    # filled in by the training pipeline.
    featurizer: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def _check(self, n: int) -> None:
        if n != self.feature_count:
            raise DimensionMismatch(f"expected {self.feature_count} features, got {n}")

    def predict_score(self, x) -> float:
        values = getattr(x, "values", x)
        if isinstance(values, np.ndarray):
            if values.ndim != 1:
                raise DimensionMismatch(f"expected a 1-D vector, got shape {values.shape}")
            values = values.tolist()
        self._check(len(values))
        return math.fsum(t.leaf_value(values) for t in self.trees) / len(self.trees)

    def predict_scores(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D matrix, got shape {X.shape}")
        self._check(X.shape[1])
        if X.shape[0] == 0:
            return np.zeros(0)
        # Stacked per-tree leaf values summed with fsum to match predict_score bit for bit.
        per_tree = np.stack([t.predict_values(X) for t in self.trees], axis=1)
        return np.array([math.fsum(row) for row in per_tree.tolist()]) / len(self.trees)


def gini(counts: tuple[int, int]) -> float:
    n0, n1 = counts
    total = n0 + n1
    if total < 1:
        raise EmptyNode("gini of an empty node")
    p0 = n0 / total
    p1 = n1 / total
    return 1.0 - p0 * p0 - p1 * p1


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    impurity: float


def _midpoint(a: float, b: float) -> float:
    # (a + b) / 2 is the correctly rounded midpoint unless the sum overflows.
    m = (a + b) / 2.0
    if not math.isfinite(m):
        m = a / 2.0 + b / 2.0
    # Adjacent floats: the midpoint may round up to b, which would send b left.
    return a if m >= b else m


def best_split(X, y, candidate_features, min_samples_leaf: int = 1) -> Optional[Split]:
    """Lowest size-weighted child Gini split over midpoints of distinct values.

    Ties go to the lower feature index, then the lower threshold. Returns
    None when no admissible split strictly reduces impurity.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    feats = np.array(sorted(set(int(f) for f in candidate_features)), dtype=np.int64)
    return _split_columns(X[:, feats], feats, np.asarray(y, dtype=np.int64), min_samples_leaf)


def _split_columns(Xc: np.ndarray, feats: np.ndarray, y: np.ndarray, min_samples_leaf: int) -> Optional[Split]:
    """best_split over pre-gathered columns ``Xc``; ``feats`` (ascending) names them."""
    n = len(y)
    if n < 2 or len(feats) == 0 or n < 2 * min_samples_leaf:
        return None
    n1 = int(y.sum())
    if n1 == 0 or n1 == n:
        return None

    varying = Xc.max(axis=0) > Xc.min(axis=0)
    if not varying.any():
        return None
    feats = feats[varying]
    Xc = Xc[:, varying]

    order = np.argsort(Xc, axis=0, kind="stable")
    xs = np.take_along_axis(Xc, order, axis=0)
    ys = y[order]
    l1 = np.cumsum(ys, axis=0)[:-1].astype(np.float64)
    nl = np.arange(1, n, dtype=np.float64)[:, None]
    nr = n - nl
    l0 = nl - l1
    r1 = n1 - l1
    r0 = nr - r1
    # Maximising this is the same as minimising weighted child Gini:
    # n * weighted_gini = n - score.
    score = (l0 * l0 + l1 * l1) / nl + (r0 * r0 + r1 * r1) / nr
    valid = xs[1:] > xs[:-1]
    if min_samples_leaf > 1:
        valid &= (nl >= min_samples_leaf) & (nr >= min_samples_leaf)
    score = np.where(valid, score, -np.inf)

    best = score.max()
    n0 = n - n1
    parent = (n0 * n0 + n1 * n1) / n
    tol = _TIE_TOL * n
    if not np.isfinite(best) or best <= parent + tol:
        return None
    # Feature-major scan so the first hit has the lowest feature, then threshold.
    hits = (score >= best - tol).T
    flat = int(np.argmax(hits))
    col, pos = divmod(flat, n - 1)
    chosen = score[pos, col]
    threshold = _midpoint(float(xs[pos, col]), float(xs[pos + 1, col]))
    return Split(int(feats[col]), threshold, float(1.0 - chosen / n))


def fit_tree(X, y, cfg: ForestConfig, rng: np.random.Generator) -> Tree:
    """Grow one CART tree; nodes are laid out in depth-first preorder."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(y) == 0:
        raise TooFewRows("cannot fit a tree on zero rows")
    n_features = X.shape[1]
    k = cfg.n_candidates(n_features)

    feature, threshold, left, right, value, n_samples = [], [], [], [], [], []

    def new_node(rows: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[rows].sum()) / len(rows))
        n_samples.append(len(rows))
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, rows, depth = stack.pop()
        n1 = int(y[rows].sum())
        if depth >= cfg.max_depth or len(rows) < cfg.min_samples_split or n1 == 0 or n1 == len(rows):
            continue
        if k == n_features:
            cand = np.arange(n_features, dtype=np.int64)
        else:
            cand = np.sort(rng.choice(n_features, size=k, replace=False))
        split = _split_columns(X[np.ix_(rows, cand)], cand, y[rows], cfg.min_samples_leaf)
        if split is None:
            continue
        mask = X[rows, split.feature] <= split.threshold
        left_rows, right_rows = rows[mask], rows[~mask]
        feature[node] = split.feature
        threshold[node] = split.threshold
        li = new_node(left_rows)
        ri = new_node(right_rows)
        left[node] = li
        right[node] = ri
        # Right pushed first so the left subtree is expanded next.
        stack.append((ri, right_rows, depth + 1))
        stack.append((li, left_rows, depth + 1))

    return _preorder(Tree(feature, threshold, left, right, value, n_samples))


def _preorder(tree: Tree) -> Tree:
    """Renumber nodes in depth-first preorder (root 0, left subtree before right)."""
    order = []
    stack = [0]
    while stack:
        i = stack.pop()
        order.append(i)
        if tree.feature[i] != LEAF:
            stack.append(int(tree.right[i]))
            stack.append(int(tree.left[i]))
    remap = np.empty(len(order), dtype=np.int64)
    remap[order] = np.arange(len(order))
    old = np.array(order)

    def child(arr):
        c = arr[old]
        return np.where(c == LEAF, LEAF, remap[np.where(c == LEAF, 0, c)])

    return Tree(
        tree.feature[old],
        tree.threshold[old],
        child(tree.left),
        child(tree.right),
        tree.value[old],
        tree.n_samples[old],
    )


def tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    """PCG64 stream for one tree, derived from (master seed, tree index)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(tree_index,))))


def _fit_one(X, y, cfg: ForestConfig, t: int) -> Tree:
    rng = tree_rng(cfg.seed, t)
    if cfg.bootstrap:
        idx = rng.integers(0, len(y), size=len(y))
        return fit_tree(X[idx], y[idx], cfg, rng)
    return fit_tree(X, y, cfg, rng)


def fit_forest(X, y, cfg: ForestConfig = ForestConfig(), n_jobs: int = 1) -> ForestModel:
    """Fit ``cfg.n_trees`` trees; the result does not depend on ``n_jobs``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise DimensionMismatch(f"X shape {X.shape} does not match {len(y)} labels")
    if len(y) < 2:
        raise TooFewRows("need at least 2 rows")
    n1 = int(y.sum())
    if n1 == 0 or n1 == len(y):
        raise SingleClassDataset("training data must contain both classes")

    if n_jobs == 1:
        trees = [_fit_one(X, y, cfg, t) for t in range(cfg.n_trees)]
    else:
        from joblib import Parallel, delayed

        trees = Parallel(n_jobs=n_jobs)(delayed(_fit_one)(X, y, cfg, t) for t in range(cfg.n_trees))

    n0 = len(y) - n1
    metadata = {"n_rows": int(len(y)), "n_benign": n0, "n_malicious": n1}
    return ForestModel(trees=trees, config=cfg, feature_count=X.shape[1], metadata=metadata)


def predict_score(model: ForestModel, x) -> float:
    return model.predict_score(x)


def predict_label(model: ForestModel, x, threshold: float = 0.5) -> int:
    """MALICIOUS when the score reaches ``threshold`` (ties count as malicious)."""
    return MALICIOUS if model.predict_score(x) >= threshold else BENIGN
