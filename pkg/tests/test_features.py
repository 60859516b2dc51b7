import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from urlsift.errors import EmptyInput, LengthMismatch, TooFewSamples
from urlsift.features import Featurizer, featurize_url, pearson_corr, prune_features, write_prune_report
from urlsift.lexical import LexicalConfig, lexical_features
from urlsift.trigrams import TrigramConfig, featurize_trigrams


def test_default_length():
    assert len(featurize_url("http://example.com/a?b=c")) == 1023


@pytest.mark.parametrize("buckets, expected", [(1000, 1023), (300, 323), (100, 123)])
def test_bucket_lengths(buckets, expected):
    assert len(featurize_url("http://x.org/", TrigramConfig(buckets)).values) == expected


def test_lexical_only_and_zero_buckets():
    assert len(featurize_url("http://x.org/", None).values) == 23
    with pytest.raises(ValueError):
        TrigramConfig(0)


def test_layout_trigrams_then_lexical():
    raw = "http://login.paypa1.tk/a/B?x=1"
    fz = Featurizer()
    v = fz(raw).values
    assert np.array_equal(v[:1000], featurize_trigrams(raw, TrigramConfig()))
    assert v[1000:].tolist() == lexical_features(raw, LexicalConfig.default())
    assert fz.feature_names()[0] == "tri_0" and fz.feature_names()[-1] == "query_count"
    assert fz(raw).schema_version == 1


def test_parse_errors_propagate():
    with pytest.raises(EmptyInput):
        featurize_url("")


def test_matrix_matches_rows():
    fz = Featurizer(tri_cfg=TrigramConfig(50))
    urls = ["http://a.com/", "b.org/x", "https://c.d.e.tk/?q=1"]
    X = fz.matrix(urls)
    assert X.shape == (3, 73)
    for i, u in enumerate(urls):
        assert np.array_equal(X[i], fz.values(u))


def test_pearson_examples():
    xs = [1.0, 2.0, 4.0, 8.0]
    assert pearson_corr(xs, xs) == pytest.approx(1.0, abs=1e-15)
    assert pearson_corr(xs, [-x for x in xs]) == pytest.approx(-1.0, abs=1e-15)
    assert pearson_corr([3.0] * 4, xs) == 0.0
    with pytest.raises(LengthMismatch):
        pearson_corr([1, 2], [1, 2, 3])
    with pytest.raises(TooFewSamples):
        pearson_corr([1], [1])


def test_pearson_against_numpy():
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, y = rng.normal(size=(2, 30))
        assert pearson_corr(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)


finite = st.floats(-1e3, 1e3, allow_nan=False)


@given(st.lists(st.tuples(finite, finite), min_size=3, max_size=30), st.floats(0.1, 10), st.floats(-5, 5))
def test_pearson_symmetry_and_affine(pairs, scale, shift):
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    r = pearson_corr(xs, ys)
    assert -1.0 <= r <= 1.0
    assert r == pytest.approx(pearson_corr(ys, xs), abs=1e-12)
    if np.ptp(xs) > 1e-3 and np.ptp(ys) > 1e-3:
        assert pearson_corr(xs * scale + shift, ys) == pytest.approx(r, abs=1e-6)
        assert pearson_corr(-scale * xs, ys) == pytest.approx(-r, abs=1e-6)


def test_prune_duplicate_column():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(50, 4))
    M[:, 3] = M[:, 1]
    mask = prune_features(M)
    assert mask.retained == [True, True, True, False]
    assert [(i, j) for i, j, _ in mask.dropped_pairs] == [(1, 3)]
    assert mask.dropped_pairs[0][2] == pytest.approx(1.0, abs=1e-12)


def test_prune_independent_columns_kept():
    rng = np.random.default_rng(5)
    M = rng.normal(size=(200, 6))
    corr = np.corrcoef(M, rowvar=False)
    assert np.all(np.abs(corr[np.triu_indices(6, 1)]) <= 0.75)
    assert all(prune_features(M).retained)


def test_prune_threshold_one_is_strict():
    rng = np.random.default_rng(1)
    M = rng.normal(size=(20, 2))
    M[:, 1] = 0.9 * M[:, 0] + 0.1 * rng.normal(size=20)
    assert all(prune_features(M, threshold=1.0).retained)
    assert prune_features(M, threshold=0.75).retained == [True, False]


def test_prune_invariants():
    rng = np.random.default_rng(9)
    base = rng.normal(size=(80, 3))
    M = np.column_stack([base[:, 0], base[:, 0] * 2 + 0.01 * rng.normal(size=80), base[:, 1], base[:, 2], -base[:, 1]])
    mask = prune_features(M)
    perm = rng.permutation(80)
    assert prune_features(M[perm]).retained == mask.retained
    assert mask.retained == [True, False, True, True, False]
    for j in mask.dropped:
        assert any(jj == j and abs(r) > 0.75 for _, jj, r in mask.dropped_pairs)
    with pytest.raises(TooFewSamples):
        prune_features(M[:1])


def test_prune_report():
    M = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 1.0], [3.0, 3.0, 0.0]])
    buf = io.StringIO()
    write_prune_report(prune_features(M), buf, names=["a", "b", "c"])
    lines = buf.getvalue().splitlines()
    assert lines[0] == "feature,status,partner,correlation"
    assert lines[1] == "a,kept,,"
    assert lines[2].startswith("b,dropped,a,")
    assert lines[3] == "c,kept,,"
