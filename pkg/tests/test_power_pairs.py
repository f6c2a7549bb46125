from __future__ import annotations

import pytest

from app.errors import CapExceeded, MismatchedTerminalLetter
from app.models import SchottkyData
from app.words.power_pairs import common_prefix, decompose, power_pairs, uni_distance


def test_pair_classes_cover_every_pair(group: SchottkyData) -> None:
    result = power_pairs(0.1, group, keep_examples=5)
    assert result.identity + result.power + result.other == result.zbar_size ** 2
    assert result.identity >= result.zbar_size
    assert sum(result.histogram.values()) == result.power


def test_power_examples_decompose_both_prefixes(group: SchottkyData) -> None:
    result = power_pairs(0.05, group, keep_examples=10)
    for p1, p2, parts in result.power_examples:
        assert parts.L + parts.M1 + parts.R == len(p1)
        assert parts.L + parts.M2 + parts.R == len(p2)
        assert parts.q >= 2


def test_cap_is_enforced(group: SchottkyData) -> None:
    with pytest.raises(CapExceeded):
        power_pairs(0.1, group, cap=1)


def test_decompose_strips_common_ends() -> None:
    assert common_prefix((1, 2, 3), (1, 2, 4)) == 2
    parts = decompose((1, 2, 1, 4), (1, 4, 4), 2)
    assert (parts.L, parts.M1, parts.M2, parts.R) == (1, 2, 1, 1)


def test_uni_distance(group: SchottkyData) -> None:
    assert uni_distance((1, 2), (1, 2), group) == 0.0
    coarse = uni_distance((1, 2), (3, 2), group)
    assert coarse > 0
    assert uni_distance((1, 2), (3, 2), group, refine=True) <= coarse
    with pytest.raises(MismatchedTerminalLetter):
        uni_distance((1, 2), (1, 1), group)
