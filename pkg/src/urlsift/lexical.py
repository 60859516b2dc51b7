"""The 23 lexical URL features.

Slot order is part of the model format; never reorder LEXICAL_SCHEMA
without bumping the model format version.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .parsing import (
    HostSplit,
    UrlParts,
    data_path,
    list_digest,
    parse_url,
    read_list_file,
    split_host,
)

N_LEXICAL = 23

LEXICAL_SCHEMA: tuple[tuple[str, str], ...] = (
    ("url_length", "length"),
    ("url_special_count", "count"),
    ("digit_letter_ratio", "ratio"),
    ("tld_suspicious", "boolean"),
    ("pd_contains_ip", "boolean"),
    ("pd_length", "length"),
    ("pd_digit_count", "count"),
    ("pd_non_alnum_count", "count"),
    ("pd_hyphen_count", "count"),
    ("pd_at_count", "count"),
    ("pd_in_top_domains", "boolean"),
    ("sub_dot_count", "count"),
    ("sub_count", "count"),
    ("path_slash_count", "count"),
    ("path_subdir_count", "count"),
    ("path_has_pct20", "boolean"),
    ("path_has_upper_dir", "boolean"),
    ("path_has_single_char_dir", "boolean"),
    ("path_special_count", "count"),
    ("path_zero_count", "count"),
    ("path_upper_lower_ratio", "ratio"),
    ("params_length", "length"),
    ("query_count", "count"),
)

_DIGITS = re.compile(r"[0-9]")
_LETTERS = re.compile(r"[A-Za-z]")
_UPPER = re.compile(r"[A-Z]")
_LOWER = re.compile(r"[a-z]")
_NON_ALNUM = re.compile(r"[^A-Za-z0-9]")
_PATH_SPECIAL = re.compile(r"[^A-Za-z0-9/]")


def lexical_schema() -> list[tuple[int, str, str]]:
    return [(i, name, kind) for i, (name, kind) in enumerate(LEXICAL_SCHEMA)]


def lexical_schema_digest() -> str:
    return list_digest(f"{i:02d}:{name}:{kind}" for i, name, kind in lexical_schema())


@dataclass(frozen=True)
class LexicalConfig:
    suspicious_tlds: frozenset = field(default_factory=frozenset)
    top_domains: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "suspicious_tlds", frozenset(s.lower() for s in self.suspicious_tlds))
        object.__setattr__(self, "top_domains", frozenset(s.lower() for s in self.top_domains))

    @property
    def suspicious_tlds_digest(self) -> str:
        return list_digest(self.suspicious_tlds)

    @property
    def top_domains_digest(self) -> str:
        return list_digest(self.top_domains)

    @classmethod
    def from_files(cls, suspicious_tlds=None, top_domains=None) -> "LexicalConfig":
        """Load both lists; a None path selects the bundled snapshot."""
        tlds = read_list_file(suspicious_tlds or data_path("suspicious_tlds.txt"))
        tops = read_list_file(top_domains or data_path("top_domains.txt"))
        return cls(frozenset(tlds), frozenset(tops))

    @classmethod
    def default(cls) -> "LexicalConfig":
        return cls.from_files()


def _count(pattern: re.Pattern, text: str) -> int:
    return len(pattern.findall(text)) if text else 0


def _directories(path: str) -> list[str]:
    segments = path.split("/")
    if not path.endswith("/"):
        segments = segments[:-1]
    return [s for s in segments if s]


def _is_upper_dir(segment: str) -> bool:
    letters = _LETTERS.findall(segment)
    return bool(letters) and all(c.isupper() for c in letters)


def extract_lexical(parts: UrlParts, host: HostSplit, cfg: LexicalConfig) -> list[float]:
    raw = parts.raw
    path = parts.path
    pd = host.primary_domain
    sub = host.subdomain
    dirs = _directories(path)

    values = [
        len(raw),
        sum(raw.count(c) for c in ";_?=&"),
        _count(_DIGITS, raw) / max(1, _count(_LETTERS, raw)),
        host.public_suffix in cfg.suspicious_tlds,
        host.is_ip,
        len(pd),
        _count(_DIGITS, pd),
        _count(_NON_ALNUM, pd),
        pd.count("-"),
        parts.authority.count("@"),
        bool(pd) and pd in cfg.top_domains,
        sub.count("."),
        sum(1 for label in sub.split(".") if label) if sub else 0,
        path.count("/"),
        len(dirs),
        "%20" in path,
        any(_is_upper_dir(d) for d in dirs),
        any(len(d) == 1 for d in dirs),
        _count(_PATH_SPECIAL, path),
        path.count("0"),
        _count(_UPPER, path) / max(1, _count(_LOWER, path)),
        len(parts.params),
        parts.query.count("&") + 1 if parts.query else 0,
    ]
    return [float(v) for v in values]


def lexical_features(raw: str, cfg: LexicalConfig, suffix_list=None) -> list[float]:
    """Convenience wrapper: parse, split and extract in one call."""
    parts = parse_url(raw)
    return extract_lexical(parts, split_host(parts.host, suffix_list), cfg)


def lexical_names() -> list[str]:
    return [name for name, _ in LEXICAL_SCHEMA]

