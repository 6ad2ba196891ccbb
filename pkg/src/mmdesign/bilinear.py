"""Executable bilinear algorithms from verified decompositions.

Because ``trace(ABC) = sum_r <X_r, A> <Y_r, B> <Z_r, C>`` for every C
(``<M, A>`` being the entrywise sum of ``M * A``), the product is

    A @ B = sum_r m_r * Z_r.T,    m_r = <X_r, A> * <Y_r, B>.

Only the r products m_r count as multiplications; scaling by the fixed
coefficients of X, Y, Z is free, as usual in bilinear complexity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomp import Decomposition, verify_decomposition
from .tensor import DimensionError, array_is_exact, zeros


class UnverifiedDecompositionError(ValueError):
    pass


@dataclass
class MultCounter:
    scalar_mults: int = 0
    scalar_adds: int = 0

    def merge(self, other: MultCounter) -> MultCounter:
        self.scalar_mults += other.scalar_mults
        self.scalar_adds += other.scalar_adds
        return self


@dataclass(frozen=True, eq=False)
class BilinearAlgorithm:
    n: int
    triples: tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]
    provenance: str = ""

    @property
    def r(self) -> int:
        return len(self.triples)


def from_decomposition(dec: Decomposition, tol: float | None = None) -> BilinearAlgorithm:
    rep = verify_decomposition(dec, tol)
    if not rep.passed:
        raise UnverifiedDecompositionError(f"decomposition {dec.provenance!r} does not equal MM_{dec.n}: {rep}")
    # third slot holds Z^T, the output pattern
    triples = tuple((t.X, t.Y, t.Z.T.copy()) for t in dec.terms)
    return BilinearAlgorithm(dec.n, triples, dec.provenance)


def _check_square(A: np.ndarray, B: np.ndarray) -> int:
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise DimensionError(f"expected two square matrices of equal size, got {A.shape} and {B.shape}")
    return A.shape[0]


def _new_like(shape, *arrays: np.ndarray) -> np.ndarray:
    return zeros(shape, exact=all(a.dtype == object for a in arrays))


def naive_multiply(A: np.ndarray, B: np.ndarray, counter: MultCounter | None = None) -> np.ndarray:
    """Textbook triple loop; rows*inner*cols scalar multiplications."""
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise DimensionError(f"cannot multiply shapes {A.shape} and {B.shape}")
    rows, inner, cols = A.shape[0], A.shape[1], B.shape[1]
    C = _new_like((rows, cols), A, B)
    for i in range(rows):
        for j in range(cols):
            acc = A[i, 0] * B[0, j]
            for k in range(1, inner):
                acc = acc + A[i, k] * B[k, j]
            C[i, j] = acc
    if counter is not None:
        counter.scalar_mults += rows * inner * cols
        counter.scalar_adds += rows * (inner - 1) * cols
    return C


def _linear_form(coeffs: np.ndarray, blocks, counter: MultCounter):
    """sum_{ij} coeffs[i, j] * blocks[i][j], skipping zero coefficients (index order)."""
    acc = None
    for i in range(coeffs.shape[0]):
        for j in range(coeffs.shape[1]):
            c = coeffs[i, j]
            if c == 0:
                continue
            term = blocks[i][j] if c == 1 else blocks[i][j] * c
            if acc is None:
                acc = term
            else:
                acc = acc + term
                counter.scalar_adds += np.size(term)
    return acc


def multiply(alg: BilinearAlgorithm, A: np.ndarray, B: np.ndarray, counter: MultCounter | None = None) -> np.ndarray:
    """One application of the algorithm to n x n scalar matrices: exactly r multiplications."""
    counter = MultCounter() if counter is None else counter
    if _check_square(A, B) != alg.n:
        raise DimensionError(f"algorithm multiplies {alg.n}x{alg.n} matrices, got {A.shape}")
    return _apply(alg, A, B, counter, lambda a, b: _scalar_product(a, b, counter), scalar=True)


def _scalar_product(a, b, counter: MultCounter):
    counter.scalar_mults += 1
    return a * b


def _apply(alg, A, B, counter, product, scalar: bool):
    """Run the algorithm on an n x n grid of entries (``scalar``) or blocks,
    using ``product`` for the r products."""
    n = alg.n
    size = A.shape[0] // n
    if scalar:
        a_blocks = [[A[i, j] for j in range(n)] for i in range(n)]
        b_blocks = [[B[i, j] for j in range(n)] for i in range(n)]
    else:
        a_blocks = [[A[i * size : (i + 1) * size, j * size : (j + 1) * size] for j in range(n)] for i in range(n)]
        b_blocks = [[B[i * size : (i + 1) * size, j * size : (j + 1) * size] for j in range(n)] for i in range(n)]
    out = [[None] * n for _ in range(n)]
    for X, Y, W in alg.triples:
        fa = _linear_form(X, a_blocks, counter)
        fb = _linear_form(Y, b_blocks, counter)
        # an all-zero form still costs its product
        if fa is None:
            fa = a_blocks[0][0] * 0
        if fb is None:
            fb = b_blocks[0][0] * 0
        m = product(fa, fb)
        for i in range(n):
            for j in range(n):
                c = W[i, j]
                if c == 0:
                    continue
                term = m if c == 1 else m * c
                if out[i][j] is None:
                    out[i][j] = term
                else:
                    out[i][j] = out[i][j] + term
                    counter.scalar_adds += np.size(term)
    C = _new_like(A.shape, A, B)
    for i in range(n):
        for j in range(n):
            if out[i][j] is not None:
                if scalar:
                    C[i, j] = out[i][j]
                else:
                    C[i * size : (i + 1) * size, j * size : (j + 1) * size] = out[i][j]
    return C


def _padded_size(N: int, n: int) -> int:
    if n < 2:
        return N
    size = 1
    while size < N:
        size *= n
    return size


def _pad(A: np.ndarray, size: int) -> np.ndarray:
    if A.shape[0] == size:
        return A
    P = _new_like((size, size), A)
    P[: A.shape[0], : A.shape[1]] = A
    return P


def recursive_multiply(
    alg: BilinearAlgorithm,
    A: np.ndarray,
    B: np.ndarray,
    counter: MultCounter | None = None,
    cutoff: int | None = None,
) -> np.ndarray:
    """Block recursion: pad to the next power of alg.n, apply the algorithm to
    blocks, recurse into each of the r block products down to 1 x 1.

    With ``cutoff`` set, blocks of that size or smaller use the naive product
    (the float benchmark path); leave it unset for exact r**k counting.
    """
    counter = MultCounter() if counter is None else counter
    N = _check_square(A, B)
    if alg.n < 2:
        raise ValueError("recursion needs a base algorithm with n >= 2")
    size = _padded_size(N, alg.n)
    C = _recurse(alg, _pad(A, size), _pad(B, size), counter, cutoff)
    return C[:N, :N]


def _recurse(alg, A, B, counter, cutoff):
    size = A.shape[0]
    if size == 1:
        counter.scalar_mults += 1
        C = _new_like((1, 1), A, B)
        C[0, 0] = A[0, 0] * B[0, 0]
        return C
    if cutoff is not None and size <= cutoff:
        return naive_multiply(A, B, counter)

    return _apply(alg, A, B, counter, lambda a, b: _recurse(alg, a, b, counter, cutoff), scalar=False)


def multiplication_count(alg: BilinearAlgorithm, N: int) -> int:
    """Scalar multiplications used by :func:`recursive_multiply` at size N."""
    size = _padded_size(N, alg.n)
    k = 0
    while size > 1:
        size //= alg.n
        k += 1
    return alg.r**k


def matrices_equal(A: np.ndarray, B: np.ndarray, rel_tol: float = 1e-9) -> bool:
    """Exact equality for exact matrices, relative tolerance otherwise."""
    if A.shape != B.shape:
        return False
    if array_is_exact(A) and array_is_exact(B):
        return bool(np.all(A == B))
    a = np.asarray(A, dtype=complex)
    b = np.asarray(B, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 0.0)
    return float(np.max(np.abs(a - b))) <= rel_tol * scale if a.size else True
