#!/usr/bin/env python3
"""
Tests for dense linear algebra over GF(p).

sympy serves as the independent oracle for determinants.
"""
import sys

import numpy as np
import pytest
from rich.console import Console
from sympy import Matrix

from hexagonal.algebra.ffla import PrimeField
from hexagonal.errors import ConfigurationError, InconsistentSystemError

console = Console()

P = 12347


@pytest.fixture(scope="module")
def field():
    return PrimeField(P)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def low_rank(field, rng, rows, cols, rank):
    return field.matmul(field.random_matrix(rng, (rows, rank)), field.random_matrix(rng, (rank, cols)))


@pytest.mark.parametrize("p", [1, 2, 9, 12345, 2 ** 31 + 11])
def test_rejects_non_primes_and_out_of_range(p):
    with pytest.raises(ConfigurationError):
        PrimeField(p)


def test_rank_of_low_rank_products(field, rng):
    m = low_rank(field, rng, 9, 12, 5)
    assert field.rank(m) == 5
    assert field.rank(m.T) == 5
    assert field.rank(np.zeros((0, 4), dtype=np.int64)) == 0


def test_rref_pivots_increase(field, rng):
    m = low_rank(field, rng, 6, 10, 4)
    reduced, pivots = field.rref(m)
    assert pivots == sorted(pivots)
    assert len(pivots) == 4
    for i, c in enumerate(pivots):
        column = reduced[:, c]
        assert column[i] == 1
        assert np.count_nonzero(column) == 1


def test_kernel_dimension_and_annihilation(field, rng):
    m = low_rank(field, rng, 7, 11, 4)
    kern = field.kernel(m)
    assert kern.shape == (11, 7)
    assert not field.matmul(m, kern).any()
    assert field.rank(kern) == 7


def test_solve_consistent_system(field, rng):
    a = field.random_matrix(rng, (8, 5))
    x = field.random_matrix(rng, (5, 3))
    b = field.matmul(a, x)
    sol = field.solve(a, b)
    assert np.array_equal(field.matmul(a, sol), b)
    vec = field.solve(a, b[:, 0])
    assert vec.shape == (5,)


def test_solve_reports_inconsistent_columns(field, rng):
    a = low_rank(field, rng, 6, 6, 3)
    b = field.matmul(a, field.random_matrix(rng, (6, 3)))
    b[:, 2] = (b[:, 2] + field.random_matrix(rng, 6)) % P
    with pytest.raises(InconsistentSystemError) as err:
        field.solve(a, b)
    assert err.value.columns == [2]
    assert not field.in_span(a, b[:, 2])
    assert field.in_span(a, b[:, 0])


def test_det_matches_sympy(field, rng):
    m = field.random_matrix(rng, (7, 7))
    assert field.det(m) == int(Matrix(m.tolist()).det()) % P
    singular = low_rank(field, rng, 7, 7, 6)
    assert field.det(singular) == 0


def test_inverse(field, rng):
    m = field.random_matrix(rng, (6, 6))
    while field.det(m) == 0:
        m = field.random_matrix(rng, (6, 6))
    assert np.array_equal(field.matmul(m, field.inverse(m)), field.identity(6))
    with pytest.raises(ZeroDivisionError):
        field.inverse(low_rank(field, rng, 4, 4, 3))


def test_matmul_is_exact_near_the_word_size(rng):
    big = PrimeField(2147483647)
    a = big.random_matrix(rng, (4, 300))
    b = big.random_matrix(rng, (300, 3))
    expected = (a.astype(object) @ b.astype(object)) % big.p
    assert np.array_equal(big.matmul(a, b), expected.astype(np.int64))


def test_intersect_and_extend_basis(field):
    eye = field.identity(5)
    a = eye[:, [0, 1, 2]]
    b = eye[:, [1, 2, 3]]
    meet = field.intersect(a, b)
    assert meet.shape[1] == 2
    assert not meet[[0, 3, 4]].any()
    extra, chosen = field.extend_basis(a, b)
    assert chosen == [2]
    assert np.array_equal(extra[:, 0], eye[:, 3])


def test_column_basis(field, rng):
    m = low_rank(field, rng, 8, 9, 3)
    basis = field.column_basis(m)
    assert basis.shape == (8, 3)
    assert field.rank(np.hstack([basis, m])) == 3


def test_incremental_kernel_matches_stacked_kernel(field, rng):
    blocks = [low_rank(field, rng, 3, 12, 2) for _ in range(4)]
    stacked = np.vstack(blocks)
    narrowed = field.incremental_kernel(blocks, 12)
    assert narrowed.shape[1] == 12 - field.rank(stacked)
    assert not field.matmul(stacked, narrowed).any()


SHAPE_CLASSES = [(8, 8), (6, 11), (11, 6), (1, 9), (9, 1)]
SHAPE_IDS = ["square", "wide", "tall", "row", "column"]


def random_instance(field, seed, rows, cols):
    """A matrix of random rank: a product through a random inner dimension."""
    rng = np.random.default_rng([seed, rows, cols])
    inner = int(rng.integers(0, min(rows, cols) + 1))
    return low_rank(field, rng, rows, cols, inner)


@pytest.mark.parametrize("shape", SHAPE_CLASSES, ids=SHAPE_IDS)
@pytest.mark.parametrize("seed", range(100))
def test_rank_nullity_on_random_matrices(field, seed, shape):
    rows, cols = shape
    m = random_instance(field, seed, rows, cols)
    rank = field.rank(m)
    kern = field.kernel(m)
    assert rank + kern.shape[1] == cols
    assert not field.matmul(m, kern).any()
    assert field.rank(kern) == kern.shape[1]
    assert field.rank(m.T) == rank


@pytest.mark.parametrize("shape", SHAPE_CLASSES, ids=SHAPE_IDS)
@pytest.mark.parametrize("seed", range(100))
def test_rref_is_idempotent(field, seed, shape):
    m = random_instance(field, seed, *shape)
    reduced, pivots = field.rref(m)
    again, again_pivots = field.rref(reduced)
    assert np.array_equal(again, reduced)
    assert again_pivots == pivots
    assert len(pivots) == field.rank(m)
    assert pivots == sorted(set(pivots))
    assert not field.matmul(reduced, field.kernel(m)).any()


def random_invertible(field, rng, n):
    while True:
        m = field.random_matrix(rng, (n, n))
        if field.det(m):
            return m


@pytest.mark.parametrize("seed", range(100))
def test_intersection_lies_in_both_spans(field, seed):
    rng = np.random.default_rng([seed, 10])
    n = 10
    frame = random_invertible(field, rng, n)
    ka = int(rng.integers(1, n + 1))
    kb = int(rng.integers(n - ka, n + 1)) or 1
    # span(a) + span(b) is the whole space, so they meet in ka + kb − n dimensions
    a = field.matmul(frame[:, :ka], random_invertible(field, rng, ka))
    b = field.matmul(frame[:, n - kb:], random_invertible(field, rng, kb))
    meet = field.intersect(a, b)
    overlap = max(ka + kb - n, 0)
    assert meet.shape[1] == overlap
    if overlap:
        assert field.rank(meet) == overlap
        assert np.array_equal(field.matmul(a, field.solve(a, meet)), meet % P)
        assert np.array_equal(field.matmul(b, field.solve(b, meet)), meet % P)


def test_scalar_inverse(field):
    assert field.inv(5) * 5 % P == 1
    with pytest.raises(ZeroDivisionError):
        field.inv(P)


if __name__ == "__main__":
    console.print("[bold cyan]GF(p) linear algebra tests[/bold cyan]\n")
    sys.exit(pytest.main([__file__, "-v"]))
