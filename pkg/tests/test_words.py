from __future__ import annotations

import numpy as np
import pytest

from app.errors import DepthExceeded, LetterOutOfRange, TauNonPositive
from app.models import SchottkyData
from app.words.alphabet import (
    bar,
    cyclically_reduce,
    divisor_count,
    is_admissible,
    minimal_period,
    mirror,
    primitive_classes,
    proper_power_decomposition,
    reduce_word,
    reduced_words,
)
from app.words.intervals import (
    enumerate_words,
    group_element,
    interval,
    mirror_partition,
    partition,
    standard_words,
    upsilon,
)


def test_bar_pairs_letters() -> None:
    assert [bar(a, 2) for a in (1, 2, 3, 4)] == [3, 4, 1, 2]
    assert all(bar(bar(a, 3), 3) == a for a in range(1, 7))
    with pytest.raises(LetterOutOfRange):
        bar(5, 2)


def test_mirror_is_the_group_inverse(group: SchottkyData) -> None:
    w = (1, 2, 2, 3)
    assert mirror(w, 2) == (1, 4, 4, 3)
    product = group_element(w, group) @ group_element(mirror(w, 2), group)
    assert np.allclose(np.abs(product), np.eye(2), atol=1e-9)


def test_admissibility_and_reduction() -> None:
    assert is_admissible((1, 2, 1), 2)
    assert not is_admissible((1, 3), 2)
    assert reduce_word((1, 3, 2), 2) == (2,)
    assert reduce_word((1, 2, 4, 3), 2) == ()


def test_cyclic_reduction_splits_conjugator() -> None:
    assert cyclically_reduce((1, 2, 3), 2) == ((1,), (2,))
    assert cyclically_reduce((1, 2), 2) == ((), (1, 2))


def test_minimal_period() -> None:
    assert minimal_period((1, 2, 1, 2, 1)) == 2
    assert minimal_period((1, 1, 1)) == 1
    assert minimal_period((1, 2, 4)) == 3


def test_proper_powers() -> None:
    assert proper_power_decomposition((1, 2, 1, 2), 2) == ((1, 2), 2)
    assert proper_power_decomposition((1, 2, 1), 2) is None
    assert proper_power_decomposition((2, 1, 1, 4), 2) == ((2, 1, 4), 2)
    assert proper_power_decomposition((1,), 2) is None


def _free_reduce(w: tuple[int, ...]) -> tuple[int, ...]:
    stack: list[int] = []
    for a in w:
        if stack and stack[-1] == bar(a, 2):
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


@pytest.mark.slow
def test_proper_powers_against_brute_force() -> None:
    # y^q for every reduced root y; |y^q| > |y| so roots of length 9 suffice
    largest: dict[tuple[int, ...], int] = {}
    for length in range(1, 10):
        for y in reduced_words(2, length):
            q = 2
            while len(x := _free_reduce(y * q)) <= 10:
                largest[x] = max(largest.get(x, 1), q)
                q += 1
    for length in range(1, 11):
        for x in reduced_words(2, length):
            found = proper_power_decomposition(x, 2)
            if x not in largest:
                assert found is None, x
                continue
            assert found is not None, x
            root, q = found
            assert q == largest[x], x
            assert _free_reduce(root * q) == x


def test_divisor_count() -> None:
    assert [divisor_count(q) for q in (1, 2, 6, 12)] == [1, 2, 4, 6]


def test_reduced_word_counts() -> None:
    assert len(list(reduced_words(2, 3))) == 4 * 3 * 3


def test_primitive_classes_up_to_length_two() -> None:
    classes = list(primitive_classes(2, 2))
    assert len(classes) == 8
    assert (1, 1) not in classes


def test_single_letter_intervals(group: SchottkyData) -> None:
    iv = interval((1,), group)
    assert iv.lo == pytest.approx(-3.5) and iv.hi == pytest.approx(-2.5)
    assert upsilon((1,), group) == pytest.approx(1.0)
    assert upsilon((), group) == 1.0


def test_intervals_nest_and_shrink(group: SchottkyData) -> None:
    w = (1, 2, 1, 4)
    for k in range(2, len(w) + 1):
        child, parent = interval(w[:k], group), interval(w[: k - 1], group)
        assert parent.lo <= child.lo < child.hi <= parent.hi
        assert child.upsilon < parent.upsilon


def test_partition_is_the_stopping_set(group: SchottkyData) -> None:
    tau = 0.05
    words = partition(tau, group)
    assert words == sorted(words)
    for w in words:
        assert upsilon(w, group) <= tau
        if len(w) > 1:
            assert upsilon(w[:-1], group) > tau


def test_partition_intervals_are_disjoint(group: SchottkyData) -> None:
    ivs = sorted((interval(w, group) for w in partition(0.1, group)), key=lambda iv: iv.lo)
    assert all(a.hi <= b.lo + 1e-12 for a, b in zip(ivs, ivs[1:]))


def test_coarse_partition_is_the_alphabet(group: SchottkyData) -> None:
    assert partition(2.0, group) == [(1,), (2,), (3,), (4,)]


def test_partition_rejects_bad_tau(group: SchottkyData) -> None:
    with pytest.raises(TauNonPositive):
        partition(0.0, group)
    with pytest.raises(DepthExceeded):
        partition(1e-6, group, max_depth=2)


def test_mirror_partition(group: SchottkyData) -> None:
    tau = 0.1
    zbar = mirror_partition(tau, group)
    assert zbar == sorted(zbar)
    assert sorted(mirror(w, 2) for w in zbar) == partition(tau, group)


@pytest.mark.slow
def test_partition_size_scales_like_tau_to_minus_delta(group: SchottkyData, delta: float) -> None:
    taus = [10 ** -2, 10 ** -2.5, 10 ** -3, 10 ** -3.5]
    sizes = [len(mirror_partition(tau, group)) for tau in taus]
    slope = np.polyfit(np.log(1 / np.array(taus)), np.log(sizes), 1)[0]
    assert slope == pytest.approx(delta, rel=0.15)


def test_standard_words(group: SchottkyData) -> None:
    words = standard_words(group)
    assert len(words) == 12
    assert all(is_admissible(w, 2) for w in words)


def test_enumeration_levels(group: SchottkyData) -> None:
    table = enumerate_words(3, group)
    assert [len(level) for level in table.levels] == [4, 12, 36]
    for w in table.levels[2][:10]:
        assert table.upsilon[w] == pytest.approx(upsilon(w, group), rel=1e-12)
