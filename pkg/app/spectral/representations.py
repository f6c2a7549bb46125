"""Unitary representations used to twist the transfer operator."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from app.models import PermutationRep, RepKind
from app.permutations.permrep import act
from app.words.alphabet import Word


class RepProvider(ABC):
    """rho: Gamma -> U(V) evaluated on reduced words."""

    kind: RepKind
    dimension: int

    @abstractmethod
    def matrix(self, w: Word) -> np.ndarray:
        ...

    def matrices(self, words: Sequence[Word]) -> np.ndarray:
        d = self.dimension
        if not words:
            return np.zeros((0, d, d), dtype=complex)
        return np.stack([self.matrix(w) for w in words]).astype(complex)

    def trace(self, w: Word) -> float:
        return float(np.trace(self.matrix(w)).real)

    def gram(self, words: Sequence[Word]) -> np.ndarray:
        """G[x, y] = Tr(rho(w_y)^H rho(w_x)), the Hilbert-Schmidt pairing."""
        mats = self.matrices(words)
        return np.einsum("xij,yij->xy", mats, np.conj(mats))


class TrivialRep(RepProvider):
    kind = RepKind.TRIVIAL
    dimension = 1

    def matrix(self, w: Word) -> np.ndarray:
        return np.ones((1, 1))

    def gram(self, words: Sequence[Word]) -> np.ndarray:
        return np.ones((len(words), len(words)))


def permutation_matrix(perm: np.ndarray) -> np.ndarray:
    """P with P e_i = e_{perm[i]}."""
    n = len(perm)
    m = np.zeros((n, n))
    m[perm, np.arange(n)] = 1.0
    return m


def complement_basis(n: int) -> np.ndarray:
    """Helmert basis: n x (n-1) orthonormal columns spanning the all-ones complement."""
    q = np.zeros((n, n - 1))
    for k in range(1, n):
        q[:k, k - 1] = 1.0
        q[k, k - 1] = -k
        q[:, k - 1] /= np.sqrt(k * (k + 1))
    return q


class StandardRep(RepProvider):
    """Permutation representation on C^n."""

    kind = RepKind.STD

    def __init__(self, rep: PermutationRep):
        self.rep = rep
        self.dimension = rep.n

    def matrix(self, w: Word) -> np.ndarray:
        return permutation_matrix(act(self.rep, w))

    def gram(self, words: Sequence[Word]) -> np.ndarray:
        # Tr of a permutation product counts positions where the two agree.
        perms = np.array([act(self.rep, w) for w in words]).reshape(len(words), self.rep.n)
        return (perms[:, None, :] == perms[None, :, :]).sum(axis=2).astype(float)


class StdZeroRep(StandardRep):
    """Standard representation restricted to the all-ones complement."""

    kind = RepKind.STD0

    def __init__(self, rep: PermutationRep):
        super().__init__(rep)
        self.dimension = rep.n - 1
        self._basis = complement_basis(rep.n)

    def matrix(self, w: Word) -> np.ndarray:
        return self._basis.T @ permutation_matrix(act(self.rep, w)) @ self._basis

    def gram(self, words: Sequence[Word]) -> np.ndarray:
        return super().gram(words) - 1.0


def make_rep(kind: RepKind, rep: PermutationRep | None = None) -> RepProvider:
    if kind == RepKind.TRIVIAL:
        return TrivialRep()
    if rep is None:
        raise ValueError(f"{kind.value} needs a permutation rep")
    if kind == RepKind.STD:
        return StandardRep(rep)
    return StdZeroRep(rep)
