"""Pair-index bookkeeping for symmetric arrays.

A symmetric g x g array has M = g(g+1)/2 independent entries.  This module
fixes one global enumeration of those entries -- the g diagonal pairs
(1,1), ..., (g,g) first, then the off-diagonal pairs in lexicographic order
(1,2), ..., (1,g), (2,3), ..., (g-1,g) -- and implements the calculus it
induces: flattening a vector to its pair products, the symmetric square of
a matrix acting on that flattening, and the resummation identities that
convert double sums over ordinary indices into single sums over pair slots.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "PairIndexMap",
    "build_pair_index",
    "pair_vector",
    "sym_square",
    "resummation_pair",
    "resummation_weighted",
]


class PairIndexMap:
    """Bijection between pair slots 1..M and unordered pairs of {1..g}.

    Slots and pair members are 1-based in documentation and printed
    output.  The arrays ``first`` and ``second`` hold the 0-based version
    used for numpy indexing; ``diagonal`` flags slots whose pair repeats
    an index, and ``weight`` is the 2 - delta factor attached to a slot.
    """

    def __init__(self, g: int):
        if not isinstance(g, (int, np.integer)) or g < 1:
            raise ValueError(f"size must be a positive integer, got {g!r}")
        self.g = int(g)
        self.m = self.g * (self.g + 1) // 2
        first = list(range(self.g))
        second = list(range(self.g))
        for a in range(self.g):
            for b in range(a + 1, self.g):
                first.append(a)
                second.append(b)
        self.first = np.array(first, dtype=np.intp)
        self.second = np.array(second, dtype=np.intp)
        self.diagonal = self.first == self.second
        self.weight = 2.0 - self.diagonal.astype(float)
        self._slot = {}
        for i in range(self.m):
            a, b = int(self.first[i]) + 1, int(self.second[i]) + 1
            self._slot[(a, b)] = i + 1
            self._slot[(b, a)] = i + 1

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """All pairs in slot order, 1-based."""
        return tuple(
            (int(a) + 1, int(b) + 1) for a, b in zip(self.first, self.second)
        )

    def pair_at(self, slot: int) -> tuple[int, int]:
        """Pair (1-based) stored at 1-based slot."""
        if not 1 <= slot <= self.m:
            raise IndexError(f"slot {slot} out of range 1..{self.m}")
        return int(self.first[slot - 1]) + 1, int(self.second[slot - 1]) + 1

    def slot_of(self, a: int, b: int) -> int:
        """1-based slot of the unordered pair (a, b), members 1-based."""
        try:
            return self._slot[(a, b)]
        except KeyError:
            raise IndexError(f"pair ({a}, {b}) out of range for size {self.g}")

    def __repr__(self) -> str:
        return f"PairIndexMap(g={self.g}, m={self.m})"


def build_pair_index(g: int) -> PairIndexMap:
    """Construct the pair enumeration for symmetric g x g arrays."""
    return PairIndexMap(g)


def pair_vector(u, pm: PairIndexMap) -> np.ndarray:
    """Flatten a vector u to its pair products u_a * u_b, one per slot."""
    u = np.asarray(u)
    if u.shape != (pm.g,):
        raise ValueError(f"expected vector of length {pm.g}, got shape {u.shape}")
    return u[pm.first] * u[pm.second]


def sym_square(a, pm: PairIndexMap) -> np.ndarray:
    """Symmetric square of a g x g matrix as an M x M matrix.

    Entry (i, j) is (A[1i,1j] A[2i,2j] + A[1i,2j] A[2i,1j]) / (1 + delta_j)
    where (1i, 2i) is the pair at slot i and delta_j flags a diagonal
    column slot.  With this normalization the map is functorial and acts
    on pair_vector flattenings the way the matrix acts on vectors.
    """
    a = np.asarray(a)
    if a.shape != (pm.g, pm.g):
        raise ValueError(f"expected {pm.g} x {pm.g} matrix, got shape {a.shape}")
    f, s = pm.first, pm.second
    num = a[np.ix_(f, f)] * a[np.ix_(s, s)] + a[np.ix_(f, s)] * a[np.ix_(s, f)]
    return num / (1.0 + pm.diagonal.astype(float))[None, :]


def resummation_pair(f, pm: PairIndexMap):
    """Both sides of the double-sum resummation for a general g x g array.

    Returns (sum over all (i, j), sum over slots of
    (f[1k,2k] + f[2k,1k]) / (1 + delta_k)).  The two agree identically.
    """
    f = np.asarray(f)
    if f.shape != (pm.g, pm.g):
        raise ValueError(f"expected {pm.g} x {pm.g} array, got shape {f.shape}")
    direct = f.sum()
    folded = (
        (f[pm.first, pm.second] + f[pm.second, pm.first])
        / (1.0 + pm.diagonal.astype(float))
    ).sum()
    return complex(direct), complex(folded)


def resummation_weighted(f, pm: PairIndexMap):
    """Resummation of a symmetric array using the (2 - delta) weights.

    Returns (sum over all (i, j), sum over slots of weight_k * f[1k,2k]).
    Valid when f is symmetric, since 2 - delta = 2 / (1 + delta).
    """
    f = np.asarray(f)
    if f.shape != (pm.g, pm.g):
        raise ValueError(f"expected {pm.g} x {pm.g} array, got shape {f.shape}")
    direct = f.sum()
    folded = (pm.weight * f[pm.first, pm.second]).sum()
    return complex(direct), complex(folded)
