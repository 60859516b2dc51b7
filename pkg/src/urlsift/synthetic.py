"""Deterministic synthetic corpus of benign- and malicious-styled URLs.

Malicious URLs differ from benign ones only along the contrasts the method
is meant to pick up: deeper subdomain chains, special characters and zeros
in the path, suspicious TLDs, and longer primary domains that are one
character away from a whitelist name. Both classes share vocabulary so that
word identity alone is not a giveaway.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import BENIGN, MALICIOUS, LabeledDataset
from .errors import InvalidSpec

WHITELIST = (
    "google", "youtube", "facebook", "amazon", "wikipedia", "twitter", "instagram",
    "linkedin", "netflix", "microsoft", "apple", "paypal", "github", "reddit",
    "yahoo", "ebay", "dropbox", "adobe", "spotify", "walmart", "chase", "wellsfargo",
    "office", "outlook", "bankofamerica", "alibaba", "booking", "imdb", "nytimes",
)
GENERIC_DOMAINS = (
    "acme", "bluefin", "northwind", "riverside", "cityhall", "greenleaf", "sunrise",
    "harbor", "maple", "summit", "oakridge", "brightway", "lakeside", "pinecrest",
)
BENIGN_SUFFIXES = ("com", "com", "com", "org", "net", "co.uk", "de", "io", "edu", "gov")
OTHER_SUFFIXES = ("com", "com", "net", "org", "info", "ru", "cn", "br", "in")
SUSPICIOUS_SUFFIXES = ("tk", "ml", "ga", "cf", "gq", "xyz", "top", "click", "icu", "buzz")
WORDS = (
    "login", "account", "secure", "update", "verify", "help", "support", "news",
    "about", "products", "search", "home", "docs", "blog", "shop", "cart", "mail",
    "signin", "profile", "settings", "billing", "images", "static", "media", "user",
)
SUB_WORDS = ("www", "mail", "login", "secure", "account", "cdn", "app", "m", "web", "portal")
PATH_SPECIALS = "~_-=@!$%+.,"
ALPHABET = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class CorpusSpec:
    n_benign: int = 600
    n_malicious: int = 400
    seed: int = 0
    subdomain_depth: tuple[int, int] = (1, 4)
    special_char_density: float = 0.12
    lookalike_rate: float = 0.5
    suspicious_tld_rate: float = 0.35

    def validate(self) -> None:
        if self.n_benign < 1 or self.n_malicious < 1:
            raise InvalidSpec("class counts must be >= 1")
        lo, hi = self.subdomain_depth
        if not 0 <= lo <= hi:
            raise InvalidSpec(f"bad subdomain_depth range {self.subdomain_depth}")
        for name in ("special_char_density", "lookalike_rate", "suspicious_tld_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidSpec(f"{name} must lie in [0, 1], got {v}")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed must be a 64-bit unsigned integer")


def _rng(seed: int, label: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(label, index))))


def _pick(rng, items):
    return items[int(rng.integers(len(items)))]


def _one_edit(rng, word: str) -> str:
    """Single-character substitution, insertion, deletion or repetition."""
    i = int(rng.integers(len(word)))
    op = int(rng.integers(4))
    sub = _pick(rng, "0123456789" + ALPHABET + "-")
    if op == 0:
        return word[:i] + sub + word[i + 1 :]
    if op == 1:
        return word[:i] + sub + word[i:]
    if op == 2 and len(word) > 3:
        return word[:i] + word[i + 1 :]
    return word[:i] + word[i] + word[i:]


def _benign_url(rng) -> str:
    scheme = "https" if rng.random() < 0.7 else "http"
    domain = _pick(rng, WHITELIST) if rng.random() < 0.6 else _pick(rng, GENERIC_DOMAINS)
    host = domain + "." + _pick(rng, BENIGN_SUFFIXES)
    r = rng.random()
    if r < 0.45:
        host = "www." + host
    elif r < 0.6:
        host = _pick(rng, SUB_WORDS) + "." + host
    segments = [_pick(rng, WORDS) for _ in range(int(rng.integers(0, 3)))]
    path = "/" + "/".join(segments) if segments else ("/" if rng.random() < 0.5 else "")
    if segments and rng.random() < 0.2:
        path += "/" + str(int(rng.integers(1, 999)))
    url = f"{scheme}://{host}{path}"
    if rng.random() < 0.25:
        url += f"?{_pick(rng, WORDS)}={int(rng.integers(1, 99))}"
    return url


def _noisy_segment(rng, density: float) -> str:
    word = _pick(rng, WORDS)
    out = []
    for ch in word:
        out.append(ch)
        if rng.random() < density:
            out.append(_pick(rng, PATH_SPECIALS))
        if rng.random() < density / 2:
            out.append("0")
    seg = "".join(out)
    r = rng.random()
    if r < 0.15:
        seg = seg.upper()
    elif r < 0.25:
        seg = _pick(rng, ALPHABET)
    return seg


def _malicious_url(rng, spec: CorpusSpec) -> str:
    scheme = "https" if rng.random() < 0.4 else "http"
    if rng.random() < spec.lookalike_rate:
        domain = _one_edit(rng, _pick(rng, WHITELIST))
        if rng.random() < 0.5:
            domain += "-" + _pick(rng, WORDS)
    else:
        domain = _pick(rng, GENERIC_DOMAINS) + _pick(rng, WORDS) + str(int(rng.integers(0, 100)))
    if rng.random() < spec.suspicious_tld_rate:
        suffix = _pick(rng, SUSPICIOUS_SUFFIXES)
    else:
        suffix = _pick(rng, OTHER_SUFFIXES)
    lo, hi = spec.subdomain_depth
    depth = int(rng.integers(lo, hi + 1))
    subs = []
    for _ in range(depth):
        subs.append(_pick(rng, SUB_WORDS) if rng.random() < 0.5 else _pick(rng, WHITELIST))
    host = ".".join(subs + [domain, suffix])
    segments = [_noisy_segment(rng, spec.special_char_density) for _ in range(int(rng.integers(1, 5)))]
    path = "/" + "/".join(segments)
    if rng.random() < 0.3:
        path += "/" + _pick(rng, WORDS) + ".php"
    url = f"{scheme}://{host}{path}"
    if rng.random() < 0.4:
        url += "?" + "&".join(f"{_pick(rng, WORDS)}={int(rng.integers(0, 10000))}" for _ in range(int(rng.integers(1, 4))))
    return url


def generate_corpus(spec: CorpusSpec = CorpusSpec()) -> LabeledDataset:
    """Benign rows first, then malicious; each URL has its own derived seed."""
    spec.validate()
    urls = [_benign_url(_rng(spec.seed, BENIGN, i)) for i in range(spec.n_benign)]
    urls += [_malicious_url(_rng(spec.seed, MALICIOUS, i), spec) for i in range(spec.n_malicious)]
    labels = [BENIGN] * spec.n_benign + [MALICIOUS] * spec.n_malicious
    return LabeledDataset(urls, labels, sources=["synthetic"] * len(urls))
