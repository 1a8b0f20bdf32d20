"""Shared fixtures for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from growseg.grid import GrayImage


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


@pytest.fixture
def checker_image() -> GrayImage:
    px = np.zeros((4, 4), dtype=np.uint8)
    px[::2, 1::2] = 255
    px[1::2, ::2] = 255
    return GrayImage(px)


@pytest.fixture
def phantom_corpus(tmp_path):
    from growseg.phantoms import write_phantom_corpus

    corpus = tmp_path / "corpus"
    ids = write_phantom_corpus(corpus)
    return corpus, ids
