"""Pair enumeration and symmetric-square calculus."""

import numpy as np
import pytest

from holodiff.bases import product_layout
from holodiff.pairindex import (
    build_pair_index,
    pair_vector,
    resummation_pair,
    resummation_weighted,
    sym_square,
)


def _rand_c(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def test_slot_order_g4():
    pm = build_pair_index(4)
    assert pm.m == 10
    assert pm.pairs == (
        (1, 1), (2, 2), (3, 3), (4, 4),
        (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4),
    )


@pytest.mark.parametrize("g", [1, 2, 3, 4, 5, 6])
def test_slot_count_and_inverse_maps(g):
    pm = build_pair_index(g)
    assert pm.m == g * (g + 1) // 2
    for slot in range(1, pm.m + 1):
        a, b = pm.pair_at(slot)
        assert 1 <= a <= b <= g
        assert pm.slot_of(a, b) == slot
        assert pm.slot_of(b, a) == slot
    with pytest.raises(IndexError):
        pm.pair_at(pm.m + 1)
    with pytest.raises(IndexError):
        pm.slot_of(1, g + 1)


@pytest.mark.parametrize("g", [2, 3, 4, 6])
def test_explicit_slot_formula_matches_enumeration(g):
    # the closed-form slot offsets must reproduce the stored order
    pm = build_pair_index(g)
    layout = product_layout(g)
    assert len(layout) == pm.m
    for slot, pair in enumerate(layout, start=1):
        assert pm.pair_at(slot) == pair


def test_weights_are_two_minus_delta():
    pm = build_pair_index(5)
    for i in range(pm.m):
        a, b = pm.pair_at(i + 1)
        assert pm.weight[i] == (1.0 if a == b else 2.0)


@pytest.mark.parametrize("g", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("seed", [0, 1])
def test_sym_square_functoriality(g, seed):
    rng = np.random.default_rng(seed)
    pm = build_pair_index(g)
    a = _rand_c(rng, (g, g))
    b = _rand_c(rng, (g, g))
    lhs = sym_square(a @ b, pm)
    rhs = sym_square(a, pm) @ sym_square(b, pm)
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.max(np.abs(rhs)))


def test_sym_square_identity():
    pm = build_pair_index(4)
    assert np.allclose(sym_square(np.eye(4), pm), np.eye(pm.m), atol=1e-15)


@pytest.mark.parametrize("g", [2, 3, 4, 5])
def test_pair_vector_equivariance(g):
    rng = np.random.default_rng(g)
    pm = build_pair_index(g)
    a = _rand_c(rng, (g, g))
    u = _rand_c(rng, (g,))
    lhs = sym_square(a, pm) @ pair_vector(u, pm)
    rhs = pair_vector(a @ u, pm)
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.max(np.abs(rhs)))


def test_pair_vector_entries():
    pm = build_pair_index(3)
    u = np.array([2.0, 3.0, 5.0])
    pv = pair_vector(u, pm)
    for i in range(pm.m):
        a, b = pm.pair_at(i + 1)
        assert pv[i] == u[a - 1] * u[b - 1]


@pytest.mark.parametrize("g", [2, 3, 4, 5])
def test_determinant_power(g):
    rng = np.random.default_rng(10 + g)
    pm = build_pair_index(g)
    a = _rand_c(rng, (g, g))
    a /= np.sqrt(g) * np.max(np.abs(a))
    d1 = np.linalg.det(sym_square(a, pm))
    d2 = np.linalg.det(a) ** (g + 1)
    assert abs(d1 - d2) <= 1e-10 * abs(d2)


@pytest.mark.parametrize("g", [2, 3, 5])
def test_resummation_general_array(g):
    rng = np.random.default_rng(30 + g)
    pm = build_pair_index(g)
    f = _rand_c(rng, (g, g))
    direct, folded = resummation_pair(f, pm)
    assert direct == pytest.approx(complex(f.sum()), abs=1e-14 * g * g)
    assert abs(direct - folded) < 1e-12 * max(1.0, abs(direct))


@pytest.mark.parametrize("g", [2, 3, 5])
def test_resummation_weighted_symmetric(g):
    rng = np.random.default_rng(40 + g)
    pm = build_pair_index(g)
    f = _rand_c(rng, (g, g))
    f = f + f.T
    direct, folded = resummation_weighted(f, pm)
    assert abs(direct - folded) < 1e-12 * max(1.0, abs(direct))


def test_shape_validation():
    pm = build_pair_index(3)
    with pytest.raises(ValueError):
        pair_vector(np.zeros(4), pm)
    with pytest.raises(ValueError):
        sym_square(np.zeros((3, 4)), pm)
    with pytest.raises(ValueError):
        build_pair_index(0)
