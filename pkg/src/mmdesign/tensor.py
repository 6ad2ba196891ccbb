"""Dense vectors, matrices and order-3 matrix tensors over a generic scalar.

Vectors and matrices are plain numpy arrays.  Exact ones use ``dtype=object``
holding ints, Fractions or QuadExt values; float ones use ``complex128``.

A :class:`Tensor3` over n x n matrices is stored as a 6-d array indexed
``T[i1, j1, i2, j2, i3, j3]``.  The matrix multiplication tensor has a one at
every position with ``j1 == i2``, ``j2 == i3`` and ``j3 == i1``, which makes

    pairing(mm_tensor(n), A, B, C) == trace(A @ B @ C)

hold literally (no transposes anywhere).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .scalar import QuadExt, conj, is_exact


class DimensionError(ValueError):
    pass


def as_matrix(rows, exact: bool | None = None) -> np.ndarray:
    """Build a 2-d array; exact scalars are kept as Python objects."""
    a = np.array(rows, dtype=object)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {a.shape}")
    return _settle(a, exact)


def as_vector(entries, exact: bool | None = None) -> np.ndarray:
    a = np.array(entries, dtype=object)
    if a.ndim != 1:
        raise DimensionError(f"expected a 1-d array, got shape {a.shape}")
    return _settle(a, exact)


def _settle(a: np.ndarray, exact: bool | None) -> np.ndarray:
    if exact is None:
        exact = all(is_exact(x) for x in a.flat)
    if exact:
        return a
    return a.astype(complex)


def array_is_exact(a: np.ndarray) -> bool:
    return a.dtype == object and all(is_exact(x) for x in a.flat)


def identity(n: int, exact: bool = True) -> np.ndarray:
    if exact:
        out = np.zeros((n, n), dtype=object)
        out[...] = 0
        for i in range(n):
            out[i, i] = 1
        return out
    return np.eye(n, dtype=complex)


def zeros(shape, exact: bool = True) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out[...] = 0
        return out
    return np.zeros(shape, dtype=complex)


def conj_array(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return np.vectorize(conj, otypes=[object])(a) if a.size else a.copy()
    return a.conj()


def outer(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """The Dirac outer product: entry (i, j) is ``u[i] * conj(v[j])``."""
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise DimensionError(f"outer needs equal-length vectors, got {u.shape} and {v.shape}")
    return np.multiply.outer(u, conj_array(v))


def inner(u: np.ndarray, v: np.ndarray) -> object:
    """``<u|v> = sum conj(u_i) v_i``."""
    if u.shape != v.shape:
        raise DimensionError(f"inner needs equal-length vectors, got {u.shape} and {v.shape}")
    return sum((conj(a) * b for a, b in zip(u, v)), 0)


@dataclass(frozen=True, eq=False)
class Tensor3:
    n: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.entries.shape != (self.n,) * 6:
            raise DimensionError(f"Tensor3 over {self.n}x{self.n} matrices needs shape {(self.n,) * 6}, got {self.entries.shape}")
        self.entries.flags.writeable = False

    def __getitem__(self, idx: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]):
        (i1, j1), (i2, j2), (i3, j3) = idx
        return self.entries[i1, j1, i2, j2, i3, j3]

    @property
    def exact(self) -> bool:
        return array_is_exact(self.entries)

    def nonzero_count(self) -> int:
        return sum(1 for x in self.entries.flat if x != 0)

    def __add__(self, other: Tensor3) -> Tensor3:
        _same_n(self, other)
        return Tensor3(self.n, self.entries + other.entries)

    def __sub__(self, other: Tensor3) -> Tensor3:
        _same_n(self, other)
        return Tensor3(self.n, self.entries - other.entries)

    def scale(self, c) -> Tensor3:
        return Tensor3(self.n, self.entries * c)

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        return f"Tensor3(n={self.n}, {kind}, nonzero={self.nonzero_count()})"


def _same_n(*ts: Tensor3) -> None:
    if len({t.n for t in ts}) != 1:
        raise DimensionError(f"tensors over different sizes: {[t.n for t in ts]}")


def mm_tensor(n: int) -> Tensor3:
    if n < 1:
        raise ValueError("n must be >= 1")
    t = zeros((n,) * 6)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                t[a, b, b, c, c, a] = 1
    return Tensor3(n, t)


def identity_tensor(n: int) -> Tensor3:
    if n < 1:
        raise ValueError("n must be >= 1")
    t = zeros((n,) * 6)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                t[a, a, b, b, c, c] = 1
    return Tensor3(n, t)


def _square_n(*mats: np.ndarray) -> int:
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise DimensionError(f"matrices of different shapes: {sorted(shapes)}")
    shape = shapes.pop()
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionError(f"expected square matrices, got shape {shape}")
    return shape[0]


def rank_one_tensor(X: np.ndarray, Y: np.ndarray, Z: np.ndarray) -> Tensor3:
    n = _square_n(X, Y, Z)
    return Tensor3(n, np.multiply.outer(np.multiply.outer(X, Y), Z))


def _all_rational(mats: Iterable[np.ndarray]) -> bool:
    for m in mats:
        if m.dtype != object:
            return False
        for x in m.flat:
            if isinstance(x, QuadExt):
                if x.b != 0:
                    return False
            elif not isinstance(x, (int, Fraction)):
                return False
    return True


def _integer_rows(mats: Sequence[np.ndarray]) -> tuple[np.ndarray, int]:
    """Scale a stack of rational matrices to integers by one common denominator."""
    fr = [[Fraction(x.a if isinstance(x, QuadExt) else x) for x in m.flat] for m in mats]
    den = 1
    for row in fr:
        for q in row:
            den = math.lcm(den, q.denominator)
    out = np.empty((len(fr), len(fr[0]) if fr else 0), dtype=object)
    for r, row in enumerate(fr):
        for c, q in enumerate(row):
            out[r, c] = q.numerator * (den // q.denominator)
    return out, den


def sum_rank_one(terms: Sequence[tuple[np.ndarray, np.ndarray, np.ndarray]], n: int) -> Tensor3:
    """``sum_r X_r (x) Y_r (x) Z_r`` with a fixed summation order.

    All-rational inputs are summed over the integers after clearing one common
    denominator per slot, which is much faster than Fraction arithmetic.
    """
    if not terms:
        return Tensor3(n, zeros((n,) * 6))
    Xs, Ys, Zs = zip(*terms)
    _square_n(*Xs, *Ys, *Zs)
    if Xs[0].shape[0] != n:
        raise DimensionError(f"terms are {Xs[0].shape[0]}x{Xs[0].shape[0]}, expected {n}x{n}")
    m = n * n
    if _all_rational(Xs + Ys + Zs):
        xi, dx = _integer_rows(Xs)
        yi, dy = _integer_rows(Ys)
        zi, dz = _integer_rows(Zs)
        xy = (xi[:, :, None] * yi[:, None, :]).reshape(len(terms), m * m)
        total = xy.T.dot(zi)
        den = dx * dy * dz
        flat = np.empty(total.size, dtype=object)
        for k, v in enumerate(total.flat):
            flat[k] = Fraction(v, den) if v % den else v // den
        return Tensor3(n, flat.reshape((n,) * 6))
    exact = all(array_is_exact(a) for a in Xs + Ys + Zs)
    dtype = object if exact else complex
    x = np.array([a.reshape(m) for a in Xs], dtype=dtype)
    y = np.array([a.reshape(m) for a in Ys], dtype=dtype)
    z = np.array([a.reshape(m) for a in Zs], dtype=dtype)
    xy = (x[:, :, None] * y[:, None, :]).reshape(len(terms), m * m)
    return Tensor3(n, xy.T.dot(z).reshape((n,) * 6))


def pairing(T: Tensor3, A: np.ndarray, B: np.ndarray, C: np.ndarray):
    """``<T, A (x) B (x) C>``: sum of T entries times A, B, C entries, unconjugated."""
    n = _square_n(A, B, C)
    if n != T.n:
        raise DimensionError(f"tensor is over {T.n}x{T.n}, matrices are {n}x{n}")
    m = n * n
    t = T.entries.reshape(m, m, m)
    a, b, c = A.reshape(m), B.reshape(m), C.reshape(m)
    total = 0
    for p in range(m):
        if a[p] == 0:
            continue
        inner_bc = b.dot(t[p]).dot(c)
        total = total + a[p] * inner_bc
    return total


def max_abs_diff(T1: Tensor3, T2: Tensor3) -> float:
    _same_n(T1, T2)
    diff = (T1.entries - T2.entries).ravel()
    if not diff.size:
        return 0.0
    return max(abs(complex(x)) for x in diff)


def tensor_eq(T1: Tensor3, T2: Tensor3, tol: float = 0.0) -> bool:
    """Exact tensors compare entrywise (``tol`` is ignored); float ones by max |diff| <= tol."""
    _same_n(T1, T2)
    if T1.exact and T2.exact:
        return bool(np.all(T1.entries == T2.entries))
    return max_abs_diff(T1, T2) <= tol


def trace(A: np.ndarray):
    return sum((A[i, i] for i in range(A.shape[0])), 0)
