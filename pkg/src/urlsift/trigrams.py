"""Hashed character-trigram counts (the feature hashing trick)."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

_MASK = 0xFFFFFFFF
_C1 = 0xCC9E2D51
_C2 = 0x1B873593


@dataclass(frozen=True)
class TrigramConfig:
    bucket_count: int = 1000
    hash_seed: int = 0

    def __post_init__(self):
        if not isinstance(self.bucket_count, int) or self.bucket_count < 1:
            raise ValueError(f"bucket_count must be a positive integer, got {self.bucket_count!r}")
        if not 0 <= self.hash_seed <= _MASK:
            raise ValueError(f"hash_seed must fit in 32 bits, got {self.hash_seed!r}")


def _rotl(x: int, r: int) -> int:
    return ((x << r) | (x >> (32 - r))) & _MASK


def _fmix(h: int) -> int:
    h ^= h >> 16
    h = (h * 0x85EBCA6B) & _MASK
    h ^= h >> 13
    h = (h * 0xC2B2AE35) & _MASK
    h ^= h >> 16
    return h


def murmur3_32(data: bytes, seed: int = 0) -> int:
    """MurmurHash3 x86_32, returned as an unsigned 32-bit integer."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    length = len(data)
    h = seed & _MASK
    nblocks = length // 4
    for (k,) in struct.iter_unpack("<I", data[: nblocks * 4]):
        k = (k * _C1) & _MASK
        k = _rotl(k, 15)
        k = (k * _C2) & _MASK
        h ^= k
        h = _rotl(h, 13)
        h = (h * 5 + 0xE6546B64) & _MASK

    tail = data[nblocks * 4 :]
    k = 0
    for i, byte in enumerate(tail):
        k |= byte << (8 * i)
    if tail:
        k = (k * _C1) & _MASK
        k = _rotl(k, 15)
        k = (k * _C2) & _MASK
        h ^= k

    return _fmix(h ^ length)


def trigrams(s) -> list[bytes]:
    """Width-3 byte windows over ``s`` (UTF-8 encoded when given a str)."""
    data = s.encode("utf-8", "surrogatepass") if isinstance(s, str) else bytes(s)
    return [data[i : i + 3] for i in range(len(data) - 2)]


_U8, _U15, _U16, _U17, _U13 = (np.uint64(v) for v in (8, 15, 16, 17, 13))
_M64 = np.uint64(_MASK)


def _hash3(keys: np.ndarray, seed: int) -> np.ndarray:
    """murmur3_32 over 3-byte windows packed little-endian into uint64 ``keys``.

    A 3-byte key has no full blocks, so only the tail step and finalizer run.
    Products of two 32-bit values fit in uint64, so masking after each keeps it exact.
    """
    k = (keys * np.uint64(_C1)) & _M64
    k = ((k << _U15) | (k >> _U17)) & _M64
    k = (k * np.uint64(_C2)) & _M64
    h = k ^ np.uint64(seed ^ 3)
    h ^= h >> _U16
    h = (h * np.uint64(0x85EBCA6B)) & _M64
    h ^= h >> _U13
    h = (h * np.uint64(0xC2B2AE35)) & _M64
    h ^= h >> _U16
    return h


def featurize_trigrams(s, cfg: TrigramConfig = TrigramConfig()) -> np.ndarray:
    data = s.encode("utf-8", "surrogatepass") if isinstance(s, str) else bytes(s)
    if len(data) < 3:
        return np.zeros(cfg.bucket_count, dtype=np.float64)
    d = np.frombuffer(data, dtype=np.uint8).astype(np.uint64)
    keys = d[:-2] | (d[1:-1] << _U8) | (d[2:] << _U16)
    ids = (_hash3(keys, cfg.hash_seed) % np.uint64(cfg.bucket_count)).astype(np.intp)
    return np.bincount(ids, minlength=cfg.bucket_count).astype(np.float64)
