"""Brute-force reference computations shared by the test modules.

Everything here is deliberately naive: explicit loops, permutation sums,
and hand-written 2x2 inverses, sharing no code path with the package.
"""

import itertools

import numpy as np


def leibniz_det(a):
    """Permutation-sum determinant, exponential cost, exact signature."""
    a = np.asarray(a)
    n = a.shape[0]
    total = 0.0j
    for perm in itertools.permutations(range(n)):
        sign = 1.0
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = sign
        for i in range(n):
            term = term * a[i, perm[i]]
        total += term
    return total


def weighted_minor_g2(t2, pm, rows, cols):
    """Weighted symmetric-square minor at genus 2, rebuilt entry by entry.

    The 2x2 inverse is written out by hand and the determinant is a
    literal permutation sum over the selected slots.
    """
    p, q, r = t2[0, 0], t2[0, 1], t2[1, 1]
    det_t2 = p * r - q * q
    b = np.array([[r, -q], [-q, p]]) / det_t2
    pairs = [(int(x) - 1, int(y) - 1) for x, y in pm.pairs]
    size = len(rows)
    total = 0.0
    for perm in itertools.permutations(range(size)):
        sign = 1.0
        for i in range(size):
            for j in range(i + 1, size):
                if perm[i] > perm[j]:
                    sign = -sign
        term = sign
        for i in range(size):
            ra, rb = pairs[rows[i]]
            ca, cb = pairs[cols[perm[i]]]
            entry = b[ra, ca] * b[rb, cb] + b[ra, cb] * b[rb, ca]
            entry /= 1.0 + (1.0 if ca == cb else 0.0)
            entry *= 2.0 - (1.0 if ra == rb else 0.0)
            term *= entry
        total += term
    return total
