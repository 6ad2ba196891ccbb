import random

import numpy as np
import pytest

from mmdesign.bilinear import (
    MultCounter,
    UnverifiedDecompositionError,
    from_decomposition,
    matrices_equal,
    multiplication_count,
    multiply,
    naive_multiply,
    recursive_multiply,
)
from mmdesign.decomp import Decomposition, RankOneTerm, design_decomposition, strassen_reference
from mmdesign.designs import polygon_design, simplex_design, triangle_design
from mmdesign.tensor import DimensionError, identity, zeros

from .conftest import rational_matrix


@pytest.fixture(scope="module")
def strassen():
    return from_decomposition(strassen_reference())


def test_naive_counts_and_identity(rng):
    for n, expected in [(2, 8), (3, 27)]:
        c = MultCounter()
        A = rational_matrix(rng, n)
        assert matrices_equal(naive_multiply(identity(n), A, c), A)
        assert c.scalar_mults == expected


def test_naive_matches_numpy_on_ints(rng):
    A = np.array([[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)], dtype=object)
    B = np.array([[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)], dtype=object)
    assert np.all(naive_multiply(A, B) == A.astype(int) @ B.astype(int))


def test_naive_dimension_mismatch():
    with pytest.raises(DimensionError):
        naive_multiply(identity(2), identity(3))


@pytest.mark.parametrize(
    "make, r",
    [
        (strassen_reference, 7),
        (lambda: design_decomposition(triangle_design()), 7),
        (lambda: design_decomposition(simplex_design(3)), 25),
        (lambda: design_decomposition(simplex_design(4)), 61),
    ],
)
def test_multiply_matches_naive(make, r):
    alg = from_decomposition(make())
    assert alg.r == r
    rng = random.Random(r)
    trials = 200 if alg.n <= 3 else 50
    for _ in range(trials):
        A, B = rational_matrix(rng, alg.n), rational_matrix(rng, alg.n)
        c = MultCounter()
        assert matrices_equal(multiply(alg, A, B, c), naive_multiply(A, B))
        assert c.scalar_mults == r


def test_float_algorithm(rng):
    alg = from_decomposition(design_decomposition(polygon_design(5)))
    for _ in range(50):
        A = np.array([[rng.uniform(-1, 1) for _ in range(2)] for _ in range(2)], dtype=complex)
        B = np.array([[rng.uniform(-1, 1) for _ in range(2)] for _ in range(2)], dtype=complex)
        assert matrices_equal(multiply(alg, A, B), A @ B, 1e-9)


def test_multiply_trivial_cases(strassen):
    c = MultCounter()
    assert matrices_equal(multiply(strassen, identity(2), identity(2), c), identity(2))
    assert c.scalar_mults == 7
    Z = zeros((2, 2))
    assert matrices_equal(multiply(strassen, Z, identity(2)), Z)


def test_multiply_dimension_mismatch(strassen):
    with pytest.raises(DimensionError):
        multiply(strassen, identity(3), identity(3))


def test_unverified_refused():
    dec = strassen_reference()
    t = dec.terms[0]
    broken = Decomposition(2, (RankOneTerm(t.X, t.Y, t.Z * 2),) + dec.terms[1:])
    with pytest.raises(UnverifiedDecompositionError):
        from_decomposition(broken)


@pytest.mark.parametrize("N, count", [(2, 7), (4, 49), (8, 343), (16, 2401)])
def test_recursive_counts(strassen, N, count):
    rng = random.Random(N)
    A, B = rational_matrix(rng, N), rational_matrix(rng, N)
    c = MultCounter()
    assert matrices_equal(recursive_multiply(strassen, A, B, c), naive_multiply(A, B))
    assert c.scalar_mults == count == multiplication_count(strassen, N)


@pytest.mark.parametrize("N", range(1, 10))
def test_padding_transparent(strassen, N):
    rng = random.Random(100 + N)
    A, B = rational_matrix(rng, N), rational_matrix(rng, N)
    c = MultCounter()
    assert matrices_equal(recursive_multiply(strassen, A, B, c), naive_multiply(A, B))
    assert c.scalar_mults == multiplication_count(strassen, N)


def test_padding_count_for_three(strassen, rng):
    c = MultCounter()
    A, B = rational_matrix(rng, 3), rational_matrix(rng, 3)
    recursive_multiply(strassen, A, B, c)
    assert c.scalar_mults == 49


def test_recursive_agrees_with_direct_at_base(strassen, rng):
    for _ in range(20):
        A, B = rational_matrix(rng, 2), rational_matrix(rng, 2)
        assert np.all(recursive_multiply(strassen, A, B) == multiply(strassen, A, B))


def test_recursive_simplex_base(rng):
    alg = from_decomposition(design_decomposition(simplex_design(3)))
    A, B = rational_matrix(rng, 9), rational_matrix(rng, 9)
    c = MultCounter()
    assert matrices_equal(recursive_multiply(alg, A, B, c), naive_multiply(A, B))
    assert c.scalar_mults == 625


def test_recursive_triangle_base(rng):
    alg = from_decomposition(design_decomposition(triangle_design()))
    A, B = rational_matrix(rng, 4), rational_matrix(rng, 4)
    c = MultCounter()
    assert matrices_equal(recursive_multiply(alg, A, B, c), naive_multiply(A, B))
    assert c.scalar_mults == 49 < 64


def test_cutoff_path(strassen, rng):
    A = np.array([[rng.uniform(-1, 1) for _ in range(8)] for _ in range(8)], dtype=complex)
    B = np.array([[rng.uniform(-1, 1) for _ in range(8)] for _ in range(8)], dtype=complex)
    c = MultCounter()
    assert matrices_equal(recursive_multiply(strassen, A, B, c, cutoff=2), A @ B, 1e-12)
    assert c.scalar_mults == 49 * 8


def test_recursive_rejects_nonsquare(strassen):
    with pytest.raises(DimensionError):
        recursive_multiply(strassen, zeros((2, 3)), zeros((2, 3)))


@pytest.mark.parametrize("k", range(1, 6))
def test_fewer_than_naive(strassen, k):
    assert multiplication_count(strassen, 2**k) == 7**k < 8**k


def test_counter_merge():
    a, b = MultCounter(3, 4), MultCounter(5, 6)
    assert a.merge(b) == MultCounter(8, 10)
