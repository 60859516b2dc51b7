import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from split_oracle import brute_force_split
from urlsift.errors import DimensionMismatch, EmptyNode, SingleClassDataset, TooFewRows
from urlsift.forest import (
    LEAF,
    ForestConfig,
    ForestModel,
    Tree,
    best_split,
    fit_forest,
    fit_tree,
    gini,
    predict_label,
    predict_score,
    tree_rng,
)
from urlsift.store import dumps_model


def test_gini():
    assert gini((2, 2)) == 0.5
    assert gini((4, 0)) == 0.0
    assert gini((3, 1)) == pytest.approx(1 - 0.75**2 - 0.25**2, abs=1e-15)
    assert gini((3, 1)) == 0.375
    with pytest.raises(EmptyNode):
        gini((0, 0))


def test_best_split_examples():
    s = best_split(np.array([[1.0], [2.0], [3.0], [4.0]]), [0, 0, 1, 1], [0])
    assert (s.feature, s.threshold, s.impurity) == (0, 2.5, 0.0)
    assert best_split(np.array([[1.0], [2.0], [3.0]]), [1, 1, 1], [0]) is None
    assert best_split(np.array([[5.0], [5.0]]), [0, 1], [0]) is None


def test_best_split_tie_rules():
    # Features 1 and 2 separate equally well; the lower index wins.
    X = np.array([[0, 1, 1], [0, 2, 2], [0, 3, 3], [0, 4, 4]], dtype=float)
    s = best_split(X, [0, 0, 1, 1], [2, 1, 0])
    assert (s.feature, s.threshold) == (1, 2.5)
    # Two equally good thresholds on one feature; the lower one wins.
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    s = best_split(X, [0, 1, 1, 0], [0])
    assert (s.feature, s.threshold) == (0, 1.5)
    assert s.impurity == pytest.approx(1 / 3, abs=1e-15)


def test_best_split_min_samples_leaf():
    X = np.array([[1.0], [2.0], [3.0], [4.0], [5.0]])
    y = [1, 0, 0, 0, 0]
    assert best_split(X, y, [0]).threshold == 1.5
    s = best_split(X, y, [0], min_samples_leaf=2)
    o = brute_force_split(X.tolist(), y, [0], min_samples_leaf=2)
    assert (s.feature, s.threshold) == (o[0], float(o[1]))


def test_constant_column_never_chosen():
    rng = np.random.default_rng(0)
    for _ in range(50):
        X = rng.integers(0, 4, size=(20, 3)).astype(float)
        X[:, 1] = 7.0
        y = rng.integers(0, 2, size=20)
        s = best_split(X, y, [0, 1, 2])
        assert s is None or s.feature != 1
        assert best_split(X, y, [1]) is None


grid = st.sampled_from([0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, -1.0])


@settings(max_examples=200)
@given(
    st.integers(2, 25).flatmap(
        lambda n: st.tuples(
            st.lists(st.lists(grid, min_size=3, max_size=3), min_size=n, max_size=n),
            st.lists(st.integers(0, 1), min_size=n, max_size=n),
        )
    ),
    st.lists(st.integers(0, 2), min_size=1, max_size=3),
    st.integers(1, 3),
)
def test_best_split_matches_oracle(data, feats, msl):
    rows, labels = data
    got = best_split(np.array(rows), labels, feats, msl)
    want = brute_force_split(rows, labels, feats, msl)
    if want is None:
        assert got is None
    else:
        assert (got.feature, got.threshold) == (want[0], float(want[1]))
        assert got.impurity == pytest.approx(float(want[2]), abs=1e-12)


def test_fit_tree_depth_one_separable():
    X = np.arange(10, dtype=float)[:, None]
    y = (X[:, 0] > 4).astype(int)
    t = fit_tree(X, y, ForestConfig(max_depth=1, features_per_split="all"), tree_rng(0, 0))
    assert t.node_count == 3
    assert t.feature.tolist() == [0, LEAF, LEAF]
    assert t.threshold[0] == 4.5
    assert t.value.tolist() == [0.5, 0.0, 1.0]
    assert t.n_samples.tolist() == [10, 5, 5]


def test_fit_tree_identical_rows_single_leaf():
    X = np.ones((6, 3))
    y = [0, 1, 1, 0, 1, 1]
    t = fit_tree(X, y, ForestConfig(), tree_rng(0, 0))
    assert t.node_count == 1 and t.value[0] == pytest.approx(4 / 6)


def test_max_depth_zero_invalid():
    with pytest.raises(ValueError):
        ForestConfig(max_depth=0)
    with pytest.raises(ValueError):
        ForestConfig(min_samples_split=1)
    with pytest.raises(ValueError):
        ForestConfig(features_per_split="log2")


def _noisy(n=300, p=8, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    y = ((X[:, 0] + 0.5 * X[:, 1] + 0.7 * rng.normal(size=n)) > 0).astype(int)
    return X, y


@pytest.mark.parametrize("depth", [1, 2, 3, 6])
def test_depth_bound(depth):
    X, y = _noisy()
    model = fit_forest(X, y, ForestConfig(n_trees=5, max_depth=depth, seed=1))
    for t in model.trees:
        assert t.depth() <= depth
        assert t.node_count <= 2 ** (depth + 1) - 1
        assert ((t.feature == LEAF) | (t.feature < X.shape[1])).all()


def test_preorder_layout():
    X, y = _noisy()
    t = fit_forest(X, y, ForestConfig(n_trees=1, max_depth=5)).trees[0]
    internal = np.flatnonzero(t.feature != LEAF)
    assert (t.left[internal] == internal + 1).all()
    assert (t.right[internal] > t.left[internal]).all()


def test_single_tree_no_bootstrap_equals_cart():
    X, y = _noisy()
    cfg = ForestConfig(n_trees=1, bootstrap=False, features_per_split="all", max_depth=4)
    forest = fit_forest(X, y, cfg)
    tree = fit_tree(X, y, cfg, tree_rng(cfg.seed, 0))
    assert np.array_equal(forest.trees[0].threshold, tree.threshold)
    assert np.array_equal(forest.trees[0].feature, tree.feature)


def test_forest_determinism_and_jobs():
    X, y = _noisy()
    cfg = ForestConfig(n_trees=6, max_depth=6, seed=99)
    a = dumps_model(fit_forest(X, y, cfg))
    b = dumps_model(fit_forest(X, y, cfg))
    c = dumps_model(fit_forest(X, y, cfg, n_jobs=2))
    assert a == b == c
    assert dumps_model(fit_forest(X, y, ForestConfig(n_trees=6, max_depth=6, seed=100))) != a


def test_forest_errors():
    X = np.zeros((4, 2))
    with pytest.raises(SingleClassDataset):
        fit_forest(X, [1, 1, 1, 1])
    with pytest.raises(TooFewRows):
        fit_forest(X[:1], [1])


def _stump(value):
    return Tree([LEAF], [0.0], [LEAF], [LEAF], [value], [1])


def test_predict_score_examples():
    unanimous = ForestModel([_stump(1.0)] * 3, ForestConfig(n_trees=3), feature_count=2)
    assert predict_score(unanimous, np.zeros(2)) == 1.0
    one = ForestModel([_stump(0.3)], ForestConfig(n_trees=1), feature_count=2)
    assert predict_score(one, [0.0, 0.0]) == 0.3
    two = ForestModel([_stump(0.2), _stump(0.6)], ForestConfig(n_trees=2), feature_count=2)
    assert predict_score(two, np.zeros(2)) == pytest.approx(0.4, abs=1e-15)
    with pytest.raises(DimensionMismatch):
        predict_score(two, np.zeros(3))
    with pytest.raises(DimensionMismatch):
        two.predict_scores(np.zeros((4, 3)))


def test_predict_label_threshold_rules():
    half = ForestModel([_stump(0.5)], ForestConfig(n_trees=1), feature_count=1)
    low = ForestModel([_stump(0.49)], ForestConfig(n_trees=1), feature_count=1)
    assert predict_label(half, [0.0], 0.5) == 1
    assert predict_label(low, [0.0], 0.5) == 0
    assert predict_label(low, [0.0], 0.0) == 1


def test_scores_batch_matches_single_and_monotone_labels():
    X, y = _noisy()
    model = fit_forest(X, y, ForestConfig(n_trees=10, max_depth=6))
    batch = model.predict_scores(X)
    single = np.array([predict_score(model, x) for x in X])
    assert np.array_equal(batch, single)
    assert ((batch >= 0) & (batch <= 1)).all()
    for x in X[:30]:
        labels = [predict_label(model, x, t) for t in np.linspace(0, 1, 11)]
        assert labels == sorted(labels, reverse=True)
