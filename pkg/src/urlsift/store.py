"""Canonical text serialization of trained forests.

The model file is a single JSON document with sorted keys and shortest
round-trip float formatting, so identical models give identical bytes.
Each tree is a set of parallel node arrays in depth-first preorder.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .errors import CorruptModel, UnsupportedVersion
from .forest import LEAF, ForestConfig, ForestModel, Tree

FORMAT_NAME = "urlsift-forest"
FORMAT_VERSION = 1

_TREE_FIELDS = ("feature", "threshold", "left", "right", "value", "n_samples")


def model_to_dict(model: ForestModel) -> dict:
    return {
        "format": FORMAT_NAME,
        "format_version": model.format_version,
        "feature_count": model.feature_count,
        "config": asdict(model.config),
        "featurizer": model.featurizer,
        "metadata": model.metadata,
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "value": t.value.tolist(),
                "n_samples": t.n_samples.tolist(),
            }
            for t in model.trees
        ],
    }


def dumps_model(model: ForestModel) -> bytes:
    text = json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"), allow_nan=False)
    return (text + "\n").encode("utf-8")


def save_model(model: ForestModel, path) -> int:
    """Write ``model`` atomically; returns the number of bytes written."""
    data = dumps_model(model)
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return len(data)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _require(cond: bool, invariant: str, detail: str = "") -> None:
    if not cond:
        raise CorruptModel(invariant, detail)


def _check_tree(k: int, t: dict, feature_count: int, max_depth: int) -> Tree:
    _require(isinstance(t, dict) and set(t) == set(_TREE_FIELDS), "tree fields", f"tree {k}")
    _require(all(isinstance(t[f], list) for f in _TREE_FIELDS), "node arrays are lists", f"tree {k}")
    n = len(t["feature"])
    _require(n >= 1, "non-empty tree", f"tree {k}")
    _require(all(len(t[f]) == n for f in _TREE_FIELDS), "parallel node arrays", f"tree {k}")
    try:
        tree = Tree(*(t[f] for f in _TREE_FIELDS))
    except (TypeError, ValueError) as exc:
        raise CorruptModel("numeric node arrays", f"tree {k}: {exc}") from None

    feat, left, right = tree.feature, tree.left, tree.right
    _require(bool(((feat >= LEAF) & (feat < feature_count)).all()), "feature_index < feature_count", f"tree {k}")
    _require(bool(np.isfinite(tree.threshold).all()), "finite thresholds", f"tree {k}")
    _require(bool(((tree.value >= 0) & (tree.value <= 1)).all()), "leaf fractions in [0,1]", f"tree {k}")
    _require(bool((tree.n_samples >= 1).all()), "positive sample counts", f"tree {k}")
    leaf = feat == LEAF
    _require(bool(((left[leaf] == LEAF) & (right[leaf] == LEAF)).all()), "leaves have no children", f"tree {k}")
    internal = np.flatnonzero(~leaf)
    kids = np.concatenate([left[internal], right[internal]])
    # Children strictly after their parent rules out cycles; each non-root
    # node having exactly one parent makes everything reachable from 0.
    _require(
        bool((left[internal] > internal).all() and (right[internal] > internal).all() and (kids < n).all()),
        "child offsets point forward",
        f"tree {k}",
    )
    _require(sorted(kids.tolist()) == list(range(1, n)), "proper binary tree", f"tree {k}")
    _require(tree.depth() <= max_depth, "depth <= max_depth", f"tree {k}")
    return tree


def model_from_dict(doc: dict) -> ForestModel:
    _require(isinstance(doc, dict), "top-level object")
    _require(doc.get("format") == FORMAT_NAME, "format marker", repr(doc.get("format")))
    version = doc.get("format_version")
    _require(isinstance(version, int) and not isinstance(version, bool) and version >= 1, "format_version")
    if version > FORMAT_VERSION:
        raise UnsupportedVersion(f"model format_version {version} is newer than supported {FORMAT_VERSION}")
    for key in ("feature_count", "config", "featurizer", "metadata", "trees"):
        _require(key in doc, f"field {key}")
    feature_count = doc["feature_count"]
    _require(isinstance(feature_count, int) and feature_count >= 1, "feature_count")
    try:
        config = ForestConfig(**doc["config"])
    except (TypeError, ValueError) as exc:
        raise CorruptModel("forest config", str(exc)) from None
    featurizer = doc["featurizer"]
    _require(isinstance(featurizer, dict), "featurizer block")
    if "bucket_count" in featurizer and "n_lexical" in featurizer:
        _require(
            featurizer["bucket_count"] + featurizer["n_lexical"] == feature_count,
            "feature_count matches featurizer",
        )
    trees = doc["trees"]
    _require(isinstance(trees, list) and len(trees) == config.n_trees, "tree count matches config")
    return ForestModel(
        trees=[_check_tree(k, t, feature_count, config.max_depth) for k, t in enumerate(trees)],
        config=config,
        feature_count=feature_count,
        format_version=version,
        featurizer=featurizer,
        metadata=doc["metadata"],
    )


def loads_model(data: bytes) -> ForestModel:
    try:
        doc = json.loads(data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModel("valid JSON", str(exc)) from None
    return model_from_dict(doc)


def load_model(path) -> ForestModel:
    return loads_model(Path(path).read_bytes())


def model_size(path) -> int:
    return Path(path).stat().st_size

