"""Pytest configuration and fixtures."""

from __future__ import annotations

import itertools
from typing import Callable, Iterator

import pytest

from braid_coherence.braid_core import BraidWord


def all_positive_words(max_strands: int, max_length: int) -> Iterator[BraidWord]:
    """Every positive word on 2..max_strands strands with at most max_length letters."""
    for n in range(2, max_strands + 1):
        for length in range(max_length + 1):
            for indices in itertools.product(range(1, n), repeat=length):
                yield BraidWord.positive(n, indices)


@pytest.fixture(scope="session")
def small_words() -> list[BraidWord]:
    """All positive words with n <= 4 strands and length <= 6."""
    return list(all_positive_words(4, 6))


@pytest.fixture(scope="session")
def oracle_words() -> list[BraidWord]:
    """All positive words with n <= 4 strands and length <= 8."""
    return list(all_positive_words(4, 8))


@pytest.fixture
def word() -> Callable[..., BraidWord]:
    """Build a positive word: word(3, 1, 2, 1) is s1 s2 s1 on 3 strands."""

    def build(strands: int, *indices: int) -> BraidWord:
        return BraidWord.positive(strands, indices)

    return build
