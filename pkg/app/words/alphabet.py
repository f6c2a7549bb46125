"""Letters, admissible words and free-group arithmetic.

Letters are 1..2r and carry their own inverses: bar(a) = a + r mod 2r.
A tuple of letters is both an admissible word and a reduced group element,
so reduction is plain pair annihilation.
"""

from __future__ import annotations

from typing import Iterator, Optional

from app.errors import LetterOutOfRange

Word = tuple[int, ...]


# ── Letters ──────────────────────────────────────────────────────────────────

def bar(a: int, r: int) -> int:
    if not 1 <= a <= 2 * r:
        raise LetterOutOfRange(f"letter {a} outside 1..{2 * r}")
    return (a - 1 + r) % (2 * r) + 1


def check_letters(w: Word, r: int) -> None:
    for a in w:
        if not 1 <= a <= 2 * r:
            raise LetterOutOfRange(f"letter {a} outside 1..{2 * r}")


def is_admissible(w: Word, r: int) -> bool:
    check_letters(w, r)
    return all(w[i + 1] != bar(w[i], r) for i in range(len(w) - 1))


def mirror(w: Word, r: int) -> Word:
    """Reversed word of barred letters; encodes the group inverse."""
    return tuple(bar(a, r) for a in reversed(w))


# ── Free-group arithmetic ────────────────────────────────────────────────────

def reduce_word(w: Word, r: int) -> Word:
    out: list[int] = []
    for a in w:
        if out and out[-1] == bar(a, r):
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def multiply_reduced(x: Word, y: Word, r: int) -> Word:
    return reduce_word(x + y, r)


def cyclically_reduce(x: Word, r: int) -> tuple[Word, Word]:
    """Split a reduced x as u·v·mirror(u) with v cyclically reduced."""
    i, j = 0, len(x) - 1
    while i < j and x[j] == bar(x[i], r):
        i += 1
        j -= 1
    return x[:i], x[i:j + 1]


def minimal_period(v: Word) -> int:
    """Smallest p with v[k] == v[k + p] for all valid k (failure function)."""
    if not v:
        return 0
    fail = [0] * len(v)
    k = 0
    for i in range(1, len(v)):
        while k and v[i] != v[k]:
            k = fail[k - 1]
        if v[i] == v[k]:
            k += 1
        fail[i] = k
    return len(v) - fail[-1]


def proper_power_decomposition(x: Word, r: int) -> Optional[tuple[Word, int]]:
    """(root, q) with x = root^q and q >= 2 maximal, or None."""
    if len(x) < 2:
        return None
    u, v = cyclically_reduce(x, r)
    p = minimal_period(v)
    if p < len(v) and len(v) % p == 0:
        root = reduce_word(u + v[:p] + mirror(u, r), r)
        return root, len(v) // p
    return None


def divisor_count(q: int) -> int:
    return sum(1 for k in range(1, q + 1) if q % k == 0)


# ── Enumeration ──────────────────────────────────────────────────────────────

def reduced_words(r: int, length: int) -> Iterator[Word]:
    """All reduced words of exactly the given length, in lexicographic order."""
    letters = range(1, 2 * r + 1)

    def extend(prefix: Word) -> Iterator[Word]:
        if len(prefix) == length:
            yield prefix
            return
        for a in letters:
            if prefix and a == bar(prefix[-1], r):
                continue
            yield from extend(prefix + (a,))

    yield from extend(())


def is_cyclically_reduced(w: Word, r: int) -> bool:
    return len(w) <= 1 or w[0] != bar(w[-1], r)


def primitive_classes(max_len: int, r: int) -> Iterator[Word]:
    """One representative per primitive conjugacy class, word length <= max_len.

    The representative is the cyclically reduced word that is strictly
    smaller than all of its proper rotations.
    """
    for length in range(1, max_len + 1):
        for w in reduced_words(r, length):
            if not is_cyclically_reduced(w, r):
                continue
            if all(w < w[k:] + w[:k] for k in range(1, length)):
                yield w
