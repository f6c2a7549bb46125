"""Random homomorphisms from the Schottky group into S_n.

Only the images of generators 1..r are stored; a barred letter acts by the
inverse permutation. Randomness comes from Philox streams keyed by
(seed, generator index), so a rep depends on nothing but its seed.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from app.errors import LetterOutOfRange
from app.models import PermutationRep
from app.words.alphabet import Word

logger = logging.getLogger(__name__)

SEED_MASK = 2**64 - 1


# ── Seeding ──────────────────────────────────────────────────────────────────

def stream(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, *keys)."""
    entropy = [seed & SEED_MASK, *(k & SEED_MASK for k in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *keys: int) -> int:
    entropy = [seed & SEED_MASK, *(k & SEED_MASK for k in keys)]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


# ── Construction ─────────────────────────────────────────────────────────────

def sample_rep(n: int, r: int, seed: int) -> PermutationRep:
    images = [stream(seed, index).permutation(n).tolist() for index in range(r)]
    return PermutationRep(n=n, seed=seed, images=images)


def identity_rep(n: int, r: int) -> PermutationRep:
    return PermutationRep(n=n, seed=0, images=[list(range(n)) for _ in range(r)])


def letter_permutation(rep: PermutationRep, a: int) -> np.ndarray:
    r = rep.r
    if not 1 <= a <= 2 * r:
        raise LetterOutOfRange(f"letter {a} outside 1..{2 * r}")
    if a <= r:
        return rep.image_array[a - 1]
    return rep.inverse_array[a - r - 1]


def act(rep: PermutationRep, w: Word) -> np.ndarray:
    """phi(gamma_w) as an index array p with p[i] = phi(gamma_w)(i)."""
    result = np.arange(rep.n)
    for a in w:
        result = result[letter_permutation(rep, a)]
    return result


def fixed_points(rep: PermutationRep, w: Word) -> int:
    return int(np.count_nonzero(act(rep, w) == np.arange(rep.n)))


def character_std0(rep: PermutationRep, w: Word) -> int:
    """Trace of the standard-minus-trivial representation at gamma_w."""
    return fixed_points(rep, w) - 1


def is_transitive(rep: PermutationRep) -> bool:
    if rep.n == 1:
        return True
    rows = np.concatenate([np.arange(rep.n)] * rep.r)
    cols = rep.image_array.reshape(-1)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(rep.n, rep.n))
    count, _ = connected_components(graph, directed=True, connection="weak")
    return count == 1


# ── Rep files ────────────────────────────────────────────────────────────────

def rep_from_dump(payload: dict) -> PermutationRep:
    return PermutationRep(n=payload["n"], seed=payload.get("seed", 0),
                          images=[[i - 1 for i in perm] for perm in payload["images"]])


def write_rep(rep: PermutationRep, path: str | Path) -> None:
    Path(path).write_text(json.dumps(rep.dump()), encoding="utf-8")
    logger.info("Wrote rep of degree %d to %s", rep.n, path)


def read_rep(path: str | Path) -> PermutationRep:
    return rep_from_dump(json.loads(Path(path).read_text(encoding="utf-8")))
