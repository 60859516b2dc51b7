import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from urlsift.features import Featurizer
from urlsift.forest import ForestConfig
from urlsift.pipeline import train
from urlsift.store import save_model
from urlsift.synthetic import CorpusSpec, generate_corpus


@pytest.fixture(scope="session")
def small_corpus():
    return generate_corpus(CorpusSpec(n_benign=150, n_malicious=100, seed=5))


@pytest.fixture(scope="session")
def small_model(small_corpus):
    """Ten shallow trees over the default 1023-value feature space."""
    return train(small_corpus, ForestConfig(n_trees=10, max_depth=6, seed=1), Featurizer())


@pytest.fixture(scope="session")
def small_model_path(small_model, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "model.json"
    save_model(small_model, path)
    return path
