"""Seed derivation.  Every random stream is keyed by the run seed plus integer labels."""

from __future__ import annotations

import zlib

import numpy as np


def label_key(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label)
    return zlib.crc32(str(label).encode())


def derive_rng(seed: int, *labels) -> np.random.Generator:
    """Generator for ``(seed, *labels)``; identical keys give identical streams."""
    return np.random.default_rng(np.random.SeedSequence([int(seed)] + [label_key(x) for x in labels]))


def derive_seed(seed: int, *labels) -> int:
    return int(np.random.SeedSequence([int(seed)] + [label_key(x) for x in labels]).generate_state(1)[0])
