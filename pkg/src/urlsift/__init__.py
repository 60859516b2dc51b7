"""Static lexical classification of URLs as malicious or benign."""

from .dataset import LabeledDataset, class_summary, load_dataset, stratified_split
from .features import FeatureVector, Featurizer, featurize_url, pearson_corr, prune_features
from .forest import ForestConfig, ForestModel, best_split, fit_forest, fit_tree, gini, predict_label, predict_score
from .lexical import LexicalConfig, extract_lexical, lexical_schema
from .metrics import Confusion, EvalReport, auc, confusion, evaluate, roc_curve
from .parsing import HostSplit, SuffixList, UrlParts, parse_url, split_host
from .store import load_model, save_model
from .synthetic import CorpusSpec, generate_corpus
from .trigrams import TrigramConfig, featurize_trigrams, murmur3_32, trigrams

__version__ = "0.1.0"
