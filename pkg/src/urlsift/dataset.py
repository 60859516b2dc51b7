"""Labeled URL corpora: CSV I/O, class balance and stratified splitting."""

from __future__ import annotations

import csv
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ClassTooSmall, EmptyDataset, HeaderMismatch

log = logging.getLogger(__name__)

BENIGN = 0
MALICIOUS = 1

_LABELS = {"0": BENIGN, "1": MALICIOUS, "benign": BENIGN, "malicious": MALICIOUS}


@dataclass
class LabeledDataset:
    urls: list[str]
    labels: list[int]
    sources: Optional[list[str]] = None
    skipped: int = 0
    skipped_lines: list[int] = field(default_factory=list)

    def __post_init__(self):
        if len(self.urls) != len(self.labels):
            raise ValueError("urls and labels differ in length")
        if self.sources is not None and len(self.sources) != len(self.urls):
            raise ValueError("sources and urls differ in length")
        bad = {lab for lab in self.labels if lab not in (BENIGN, MALICIOUS)}
        if bad:
            raise ValueError(f"labels must be 0 or 1, got {sorted(bad)}")

    def __len__(self) -> int:
        return len(self.urls)

    @property
    def rows(self) -> list[tuple[str, int]]:
        return list(zip(self.urls, self.labels))

    @property
    def duplicate_count(self) -> int:
        return sum(n - 1 for n in Counter(self.urls).values() if n > 1)

    def subset(self, indices) -> "LabeledDataset":
        idx = list(indices)
        return LabeledDataset(
            urls=[self.urls[i] for i in idx],
            labels=[self.labels[i] for i in idx],
            sources=[self.sources[i] for i in idx] if self.sources is not None else None,
        )


def parse_label(text: str) -> Optional[int]:
    return _LABELS.get(text.strip().lower())


def load_dataset(path, format: str = "csv") -> LabeledDataset:
    """Read a ``label,url[,source]`` CSV; malformed rows are skipped and counted."""
    if format != "csv":
        raise ValueError(f"unsupported dataset format {format!r}")
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset not found: {path}")

    urls, labels, sources, skipped_lines = [], [], [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyDataset(f"{path}: empty file")
        header = [h.strip().lower() for h in header]
        if header[:2] != ["label", "url"] or len(header) > 3 or (len(header) == 3 and header[2] != "source"):
            raise HeaderMismatch(f"{path}: expected header label,url[,source], got {','.join(header)}")
        has_source = len(header) == 3
        for row in reader:
            if not row:
                continue
            label = parse_label(row[0]) if row else None
            if label is None or len(row) < 2 or len(row) > len(header) or not row[1]:
                skipped_lines.append(reader.line_num)
                continue
            urls.append(row[1])
            labels.append(label)
            sources.append(row[2] if has_source and len(row) > 2 else "")

    if not urls:
        raise EmptyDataset(f"{path}: no valid rows ({len(skipped_lines)} skipped)")
    if skipped_lines:
        log.warning("%s: skipped %d malformed rows", path, len(skipped_lines))
    return LabeledDataset(
        urls,
        labels,
        sources if has_source else None,
        skipped=len(skipped_lines),
        skipped_lines=skipped_lines,
    )


def save_dataset(ds: LabeledDataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_dataset(ds, fh)


def write_dataset(ds: LabeledDataset, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    if ds.sources is not None:
        writer.writerow(["label", "url", "source"])
        for url, label, src in zip(ds.urls, ds.labels, ds.sources):
            writer.writerow([label_name(label), url, src])
    else:
        writer.writerow(["label", "url"])
        for url, label in zip(ds.urls, ds.labels):
            writer.writerow([label_name(label), url])


def label_name(label: int) -> str:
    return "malicious" if label == MALICIOUS else "benign"


def class_summary(ds: LabeledDataset) -> tuple[int, int, Optional[float]]:
    """Return (n_benign, n_malicious, benign_fraction); the fraction is None when empty."""
    n_mal = sum(ds.labels)
    n_ben = len(ds.labels) - n_mal
    total = n_ben + n_mal
    return n_ben, n_mal, (n_ben / total if total else None)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(ds: LabeledDataset, test_fraction: float, seed: int = 0):
    """Seeded per-class shuffle; each class contributes round(size * fraction) test rows.

    Uses numpy's PCG64 generator so splits are identical across platforms.
    Both halves keep the input's row order.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    rng = np.random.Generator(np.random.PCG64(seed))
    labels = np.asarray(ds.labels)
    test_idx = []
    for cls in (BENIGN, MALICIOUS):
        members = np.flatnonzero(labels == cls)
        if len(members) < 2:
            raise ClassTooSmall(f"class {label_name(cls)} has {len(members)} rows; need at least 2")
        n_test = _round_half_up(len(members) * test_fraction)
        test_idx.extend(rng.permutation(members)[:n_test].tolist())
    test_set = set(test_idx)
    train_idx = [i for i in range(len(ds)) if i not in test_set]
    return ds.subset(train_idx), ds.subset(sorted(test_set))


def downsample_to_ratio(ds: LabeledDataset, benign_fraction: float = 0.6, seed: int = 0) -> LabeledDataset:
    """Drop rows from the over-represented class until the benign share matches."""
    if not 0.0 < benign_fraction < 1.0:
        raise ValueError("benign_fraction must lie in (0, 1)")
    n_ben, n_mal, _ = class_summary(ds)
    want_ben = min(n_ben, int(n_mal * benign_fraction / (1 - benign_fraction)))
    want_mal = min(n_mal, int(n_ben * (1 - benign_fraction) / benign_fraction))
    if want_ben < n_ben:
        keep = {BENIGN: want_ben, MALICIOUS: n_mal}
    else:
        keep = {BENIGN: n_ben, MALICIOUS: want_mal}
    rng = np.random.Generator(np.random.PCG64(seed))
    labels = np.asarray(ds.labels)
    chosen = []
    for cls in (BENIGN, MALICIOUS):
        members = np.flatnonzero(labels == cls)
        chosen.extend(rng.permutation(members)[: keep[cls]].tolist())
    return ds.subset(sorted(chosen))
