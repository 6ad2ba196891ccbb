"""Rank-one decompositions of the matrix multiplication tensor.

From a 2-design w_1, ..., w_s in C^n::

    MM_n = 1 (x) 1 (x) 1
         + (n^3/s^3) sum_{i,j,k distinct} |w_i><w_j - w_i| (x) |w_j><w_k - w_j| (x) |w_k><w_i - w_k|

which has s(s-1)(s-2) + 1 terms.  The module also carries Strassen's
original seven products and the two full-sum identities the construction
rests on (the "twisted" and "untwisted" triple sums).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import scalar as sc
from .designs import Design, DesignVerificationError, InvalidDesignError, default_tol, verify_design
from .tensor import (
    Tensor3,
    as_matrix,
    identity,
    identity_tensor,
    max_abs_diff,
    mm_tensor,
    outer,
    sum_rank_one,
    tensor_eq,
    zeros,
)


@dataclass(frozen=True, eq=False)
class RankOneTerm:
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray

    def __post_init__(self) -> None:
        if not (self.X.shape == self.Y.shape == self.Z.shape) or self.X.shape[0] != self.X.shape[1]:
            raise ValueError(f"inconsistent term shapes {self.X.shape}, {self.Y.shape}, {self.Z.shape}")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def as_tuple(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.X, self.Y, self.Z


@dataclass(frozen=True, eq=False)
class Decomposition:
    n: int
    terms: tuple[RankOneTerm, ...]
    provenance: str = ""
    kind: str = field(default="")

    def __post_init__(self) -> None:
        for t in self.terms:
            if t.n != self.n:
                raise ValueError(f"term of size {t.n} in a decomposition of MM_{self.n}")
        if not self.kind:
            vals = (x for t in self.terms for m in t.as_tuple() for x in m.flat)
            object.__setattr__(self, "kind", sc.kind_of(vals))

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def rank(self) -> int:
        return len(self.terms)

    def tensor(self) -> Tensor3:
        return sum_rank_one([t.as_tuple() for t in self.terms], self.n)


@dataclass(frozen=True)
class DecompReport:
    passed: bool
    residual: float
    terms: int

    def __str__(self) -> str:
        res = "0" if self.residual == 0 else f"{self.residual:.3g}"
        return f"{'pass' if self.passed else 'fail'} terms={self.terms} residual={res}"


@dataclass(frozen=True)
class IdentityReport:
    passed: bool
    residual: float


def _require_design(D: Design) -> None:
    rep = verify_design(D)
    if not rep.passed:
        raise DesignVerificationError(f"design {D.label or ''} is not a 2-design ({rep})")


def _coefficient(D: Design):
    c = Fraction(D.n**3, D.s**3)
    return c if D.exact else complex(c)


def _exact_shrink(mats: list[np.ndarray]) -> list[np.ndarray]:
    """Drop a vanished radical: QuadExt entries with zero sqrt part become Fractions."""
    vals = [x for m in mats for x in m.flat]
    if all(isinstance(x, (int, Fraction)) or (isinstance(x, sc.QuadExt) and x.b == 0) for x in vals):
        return [np.vectorize(sc.as_rational, otypes=[object])(m) for m in mats]
    return mats


def design_decomposition(D: Design) -> Decomposition:
    """Identity term first, then one term per ordered triple of distinct indices (lexicographic)."""
    if D.s < 3:
        raise InvalidDesignError(f"need at least 3 design vectors, got {D.s}")
    _require_design(D)
    kets, bras = D.kets(), D.bras()
    c = _coefficient(D)
    one = identity(D.n, exact=D.exact)
    terms = [(one, one, one)]
    for i, j, k in itertools.permutations(range(D.s), 3):
        X = outer(kets[i], bras[j] - bras[i]) * c
        Y = outer(kets[j], bras[k] - bras[j])
        Z = outer(kets[k], bras[i] - bras[k])
        terms.append((X, Y, Z))
    if D.exact:
        flat = _exact_shrink([m for t in terms for m in t])
        terms = [tuple(flat[3 * r : 3 * r + 3]) for r in range(len(terms))]
    return Decomposition(D.n, tuple(RankOneTerm(*t) for t in terms), D.label or "design")


def verify_decomposition(dec: Decomposition, tol: float | None = None) -> DecompReport:
    tol = default_tol() if tol is None else tol
    total = dec.tensor()
    target = mm_tensor(dec.n)
    return DecompReport(tensor_eq(total, target, tol), max_abs_diff(total, target), len(dec.terms))


# Strassen's products, read off as (A-form, B-form, contributions to C).
# Each form is a dict {(row, col): coeff} over 0-based block indices.
_STRASSEN = [
    ("I", {(0, 0): 1, (1, 1): 1}, {(0, 0): 1, (1, 1): 1}, {(0, 0): 1, (1, 1): 1}),
    ("II", {(1, 0): 1, (1, 1): 1}, {(0, 0): 1}, {(1, 0): 1, (1, 1): -1}),
    ("III", {(0, 0): 1}, {(0, 1): 1, (1, 1): -1}, {(0, 1): 1, (1, 1): 1}),
    ("IV", {(1, 1): 1}, {(0, 0): -1, (1, 0): 1}, {(0, 0): 1, (1, 0): 1}),
    ("V", {(0, 0): 1, (0, 1): 1}, {(1, 1): 1}, {(0, 0): -1, (0, 1): 1}),
    ("VI", {(0, 0): -1, (1, 0): 1}, {(0, 0): 1, (0, 1): 1}, {(1, 1): 1}),
    ("VII", {(0, 1): 1, (1, 1): -1}, {(1, 0): 1, (1, 1): 1}, {(0, 0): 1}),
]


def _form(coeffs: dict) -> np.ndarray:
    m = zeros((2, 2))
    for (i, j), v in coeffs.items():
        m[i, j] = v
    return m


def strassen_reference() -> Decomposition:
    """Strassen's seven products.  Z is the transpose of the output pattern, since
    the product C = AB is read off as sum_r m_r Z_r^T."""
    terms = [RankOneTerm(_form(a), _form(b), _form(c).T.copy()) for _, a, b, c in _STRASSEN]
    return Decomposition(2, tuple(terms), "strassen-1969", sc.RATIONAL)


# ---------------------------------------------------------------------------
# identities from the proof


def _ket_bra_factory(D: Design) -> Callable[[int, int], np.ndarray]:
    kets, bras = D.kets(), D.bras()
    cache: dict[tuple[int, int], np.ndarray] = {}

    def kb(a: int, b: int) -> np.ndarray:
        if (a, b) not in cache:
            cache[(a, b)] = outer(kets[a], bras[b])
        return cache[(a, b)]

    return kb


def _pattern_sum(D: Design, pattern: tuple[str, str, str, str, str, str]) -> Tensor3:
    """(n^3/s^3) sum over all (i, j, k) of |w_p0><w_p1| (x) |w_p2><w_p3| (x) |w_p4><w_p5|,
    where each p is one of the letters i, j, k."""
    kb = _ket_bra_factory(D)
    c = _coefficient(D)
    terms = []
    for i, j, k in itertools.product(range(D.s), repeat=3):
        idx = {"i": i, "j": j, "k": k}
        p = [idx[ch] for ch in pattern]
        terms.append((kb(p[0], p[1]) * c, kb(p[2], p[3]), kb(p[4], p[5])))
    return sum_rank_one(terms, D.n)


def _compare(total: Tensor3, target: Tensor3, tol: float) -> IdentityReport:
    return IdentityReport(tensor_eq(total, target, tol), max_abs_diff(total, target))


def twisted_identity_check(D: Design, tol: float | None = None) -> IdentityReport:
    """MM_n == (n^3/s^3) sum_{i,j,k} |w_i><w_j| (x) |w_j><w_k| (x) |w_k><w_i|."""
    tol = default_tol() if tol is None else tol
    _require_design(D)
    return _compare(_pattern_sum(D, tuple("ijjkki")), mm_tensor(D.n), tol)


def untwisted_identity_check(D: Design, tol: float | None = None) -> IdentityReport:
    """1 (x) 1 (x) 1 == (n^3/s^3) sum_{i,j,k} |w_i><w_i| (x) |w_j><w_j| (x) |w_k><w_k|."""
    tol = default_tol() if tol is None else tol
    _require_design(D)
    return _compare(_pattern_sum(D, tuple("iijjkk")), identity_tensor(D.n), tol)


# The six cross terms of the expansion; each has one index appearing once.
MIXED_PATTERNS: dict[str, str] = {
    "ii,jk,ki": "iijkki",
    "ij,jj,ki": "ijjjki",
    "ij,jk,kk": "ijjkkk",
    "ij,jj,kk": "ijjjkk",
    "ii,jk,kk": "iijkkk",
    "ii,jj,ki": "iijjki",
}


def mixed_term_sums(D: Design) -> dict[str, Tensor3]:
    """Each mixed pattern summed over all triples; all should be the zero tensor."""
    _require_design(D)
    return {name: _pattern_sum(D, tuple(p)) for name, p in MIXED_PATTERNS.items()}


# ---------------------------------------------------------------------------
# JSON


def _encode_matrix(m: np.ndarray, kind: str) -> list:
    return [[sc.encode_scalar(x, kind) for x in row] for row in m]


def _decode_matrix(rows: list, kind: str) -> np.ndarray:
    return as_matrix([[sc.decode_scalar(x, kind) for x in row] for row in rows], exact=kind != sc.FLOAT)


def decomposition_to_json(dec: Decomposition) -> dict:
    return {
        "n": dec.n,
        "provenance": dec.provenance,
        "scalar": dec.kind,
        "terms": [{k: _encode_matrix(m, dec.kind) for k, m in zip("XYZ", t.as_tuple())} for t in dec.terms],
    }


def decomposition_from_json(obj: dict) -> Decomposition:
    try:
        kind = obj["scalar"]
        sc.parse_kind(kind)
        terms = tuple(RankOneTerm(*(_decode_matrix(t[k], kind) for k in "XYZ")) for t in obj["terms"])
        return Decomposition(int(obj["n"]), terms, obj.get("provenance", ""), kind)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed decomposition JSON: {exc}") from exc
