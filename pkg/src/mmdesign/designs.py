"""Unitary 2-designs: construction and verification.

A set S of s unit vectors in C^n is a unitary 2-design when

    sum_{v in S} v = 0    and    (1/s) sum_{v in S} |v><v| = (1/n) * 1.

Simplex designs are kept exact by living in the sum-zero hyperplane of
R^(n+1) (``embedding="sumzero"``): every vector is a permutation of
``(n, -1, ..., -1) / sqrt(n(n+1))`` and so needs only one square root.  The
identity in the second condition becomes the projector onto the hyperplane.
:meth:`Design.kets` and :meth:`Design.bras` map such vectors to n coordinates
(ket side) and dual coordinates (bra side) whose outer products are exact and
satisfy ``sum_v |v><v| = (s/n) * 1_n``.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import scalar as sc
from .scalar import QuadExt
from .tensor import as_matrix, as_vector, array_is_exact, identity, inner, outer, zeros

SUMZERO = "sumzero"
DEDUP_TOL = 1e-9
DEFAULT_MAX_ORBIT = 10000


def default_tol() -> float:
    return float(os.environ.get("MMDESIGN_TOL", "1e-9"))


class InvalidDesignError(ValueError):
    pass


class DesignVerificationError(InvalidDesignError):
    """A design was required to pass verification and did not."""


class OrbitOverflowError(RuntimeError):
    """Orbit closure produced more than ``max_orbit`` vectors."""


def _is_zero(x, tol: float) -> bool:
    if sc.is_exact(x):
        return x == 0
    return abs(x) <= tol


def _max_norm(values) -> float:
    return max((abs(complex(x)) for x in values), default=0.0)


def _same_vector(u: np.ndarray, v: np.ndarray, exact: bool) -> bool:
    if exact:
        return bool(np.all(u == v))
    return float(np.linalg.norm(np.asarray(u, dtype=complex) - np.asarray(v, dtype=complex))) < DEDUP_TOL


@dataclass(frozen=True, eq=False)
class Design:
    n: int
    vectors: tuple[np.ndarray, ...]
    kind: str
    embedding: str | None = None
    label: str = ""

    def __post_init__(self) -> None:
        sc.parse_kind(self.kind)
        if self.n < 1:
            raise InvalidDesignError("dimension must be >= 1")
        if self.embedding not in (None, SUMZERO):
            raise InvalidDesignError(f"unknown embedding {self.embedding!r}")
        vecs = tuple(as_vector([sc.coerce(x, self.kind) for x in v], exact=self.exact) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if not vecs:
            raise InvalidDesignError("a design needs at least one vector")
        for v in vecs:
            if v.shape != (self.ambient_dim,):
                raise InvalidDesignError(f"vector of length {v.shape[0]} in a design of ambient dimension {self.ambient_dim}")
            nrm = inner(v, v) - 1
            if not _is_zero(nrm, DEDUP_TOL):
                raise InvalidDesignError(f"vector {list(v)} does not have unit norm")
            if self.embedding == SUMZERO and not _is_zero(sum(v, 0), DEDUP_TOL):
                raise InvalidDesignError(f"vector {list(v)} is not in the sum-zero hyperplane")
        for i in range(len(vecs)):
            for j in range(i):
                if _same_vector(vecs[i], vecs[j], self.exact):
                    raise InvalidDesignError(f"repeated vector {list(vecs[i])}")

    @property
    def s(self) -> int:
        return len(self.vectors)

    @property
    def exact(self) -> bool:
        return self.kind != sc.FLOAT

    @property
    def ambient_dim(self) -> int:
        return self.n + 1 if self.embedding == SUMZERO else self.n

    def kets(self) -> list[np.ndarray]:
        """Coordinates of each vector in C^n, used on the ket side of outer products."""
        if self.embedding == SUMZERO:
            return [v[: self.n] for v in self.vectors]
        return list(self.vectors)

    def bras(self) -> list[np.ndarray]:
        """Dual coordinates: ``outer(kets()[i], bras()[j])`` represents |w_i><w_j|."""
        if self.embedding == SUMZERO:
            return [v[: self.n] - v[self.n] for v in self.vectors]
        return list(self.vectors)

    def gram(self) -> np.ndarray:
        """Matrix of inner products <w_i|w_j> (independent of the coordinates)."""
        g = zeros((self.s, self.s), exact=self.exact)
        for i, u in enumerate(self.vectors):
            for j, v in enumerate(self.vectors):
                g[i, j] = inner(u, v)
        return g

    def to_float(self) -> Design:
        """Float copy in n orthonormal coordinates."""
        if self.embedding == SUMZERO:
            q = sumzero_basis(self.n)
            vecs = [q @ np.array([complex(x) for x in v]) for v in self.vectors]
        else:
            vecs = [np.array([complex(x) for x in v]) for v in self.vectors]
        return Design(self.n, tuple(vecs), sc.FLOAT, None, self.label)


def sumzero_basis(n: int) -> np.ndarray:
    """Rows: Gram-Schmidt orthonormalisation of e1-e2, e2-e3, ..., en-e(n+1).

    The k-th row is (1, ..., 1, -k, 0, ..., 0) / sqrt(k(k+1)) with k ones.
    """
    q = np.zeros((n, n + 1))
    for k in range(1, n + 1):
        q[k - 1, :k] = 1.0
        q[k - 1, k] = -k
        q[k - 1] /= math.sqrt(k * (k + 1))
    return q


@dataclass(frozen=True)
class DesignReport:
    passed: bool
    sum_residual: float
    frame_residual: float

    def __str__(self) -> str:
        return f"{'pass' if self.passed else 'fail'} residuals {_fmt(self.sum_residual)} {_fmt(self.frame_residual)}"


def _fmt(x: float) -> str:
    return "0" if x == 0 else f"{x:.3g}"


def _frame_target(D: Design) -> np.ndarray:
    """(1/n) times the identity on the span: the ambient projector for sumzero designs."""
    m = D.ambient_dim
    ident = identity(m, exact=D.exact)
    if D.embedding == SUMZERO:
        if D.exact:
            proj = zeros((m, m))
            for i in range(m):
                for j in range(m):
                    proj[i, j] = ident[i, j] - Fraction(1, m)
        else:
            proj = ident - np.full((m, m), 1.0 / m)
        ident = proj
    if D.exact:
        return ident * Fraction(1, D.n)
    return ident / D.n


def verify_design(D: Design, tol: float | None = None) -> DesignReport:
    tol = default_tol() if tol is None else tol
    total = zeros(D.ambient_dim, exact=D.exact)
    frame = zeros((D.ambient_dim, D.ambient_dim), exact=D.exact)
    for v in D.vectors:
        total = total + v
        frame = frame + outer(v, v)
    if D.exact:
        frame = frame * Fraction(1, D.s)
    else:
        frame = frame / D.s
    dev = frame - _frame_target(D)
    r1, r2 = _max_norm(total.flat), _max_norm(dev.flat)
    if D.exact:
        passed = all(x == 0 for x in total.flat) and all(x == 0 for x in dev.flat)
    else:
        passed = r1 <= tol and r2 <= tol
    return DesignReport(passed, r1, r2)


# ---------------------------------------------------------------------------
# constructors


def triangle_design() -> Design:
    """(1, 0), (-1/2, sqrt3/2), (-1/2, -sqrt3/2) over Q(sqrt 3)."""
    h = Fraction(1, 2)
    r = QuadExt(0, h, 3)
    vecs = [[1, 0], [-h, r], [-h, -r]]
    return Design(2, tuple(vecs), sc.quad_kind(3), label="triangle")


def simplex_design(n: int) -> Design:
    """The n+1 coordinate permutations of (n, -1, ..., -1)/sqrt(n(n+1)), in R^(n+1)."""
    if n < 1:
        raise InvalidDesignError("simplex dimension must be >= 1")
    k, d = sc.squarefree_part(n * (n + 1))
    # 1/(k sqrt d) = sqrt(d) / (k d)
    c = QuadExt(0, Fraction(1, k * d), d)
    vecs = []
    for i in range(n + 1):
        v = [-c] * (n + 1)
        v[i] = c * n
        vecs.append(v)
    return Design(n, tuple(vecs), sc.quad_kind(d), SUMZERO, label=f"simplex{n}")


def polygon_design(m: int, exact: bool = False) -> Design:
    """Unit vectors at angles 2*pi*k/m in R^2.

    ``exact=True`` is available for m in {3, 4, 6}, whose coordinates lie in Q(sqrt 3).
    """
    if m < 3:
        raise InvalidDesignError(f"a regular polygon design needs m >= 3, got {m}")
    if exact:
        if m not in (3, 4, 6):
            raise InvalidDesignError(f"no exact polygon for m={m}; only 3, 4 and 6")
        if m == 4:
            vecs = [[1, 0], [0, 1], [-1, 0], [0, -1]]
            return Design(2, tuple(vecs), sc.RATIONAL, label="polygon4")
        h = Fraction(1, 2)
        r = QuadExt(0, h, 3)
        # cos, sin of 2*pi*k/m
        table = {
            3: [(1, 0), (-h, r), (-h, -r)],
            6: [(1, 0), (h, r), (-h, r), (-1, 0), (-h, -r), (h, -r)],
        }
        return Design(2, tuple(list(p) for p in table[m]), sc.quad_kind(3), label=f"polygon{m}")
    vecs = []
    for k in range(m):
        z = cmath.exp(2j * math.pi * k / m)
        vecs.append(np.array([complex(z.real), complex(z.imag)]))
    return Design(2, tuple(vecs), sc.FLOAT, label=f"polygon{m}")


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """Matrices (acting on the ambient coordinates) that generate a finite group."""

    n: int
    matrices: tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        mats = tuple(m if isinstance(m, np.ndarray) else as_matrix(m) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)
        for g in mats:
            if g.shape != (self.n, self.n):
                raise InvalidDesignError(f"generator of shape {g.shape}, expected {(self.n, self.n)}")
            if array_is_exact(g):
                gram = g @ g.T
                ok = all(gram[i, j] == (1 if i == j else 0) for i in range(self.n) for j in range(self.n))
            else:
                gg = np.asarray(g, dtype=complex)
                ok = np.allclose(gg @ gg.conj().T, np.eye(self.n), atol=1e-9, rtol=0)
            if not ok:
                raise InvalidDesignError("generator is not unitary")


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """Matrix sending e_i to e_perm[i]."""
    k = len(perm)
    p = zeros((k, k))
    for i, j in enumerate(perm):
        p[j, i] = 1
    return p


def symmetric_group_generators(k: int) -> GeneratorSet:
    """A transposition and a k-cycle, acting on R^k by permuting coordinates."""
    mats = []
    if k >= 2:
        swap = list(range(k))
        swap[0], swap[1] = 1, 0
        mats.append(permutation_matrix(swap))
    if k >= 3:
        mats.append(permutation_matrix([(i + 1) % k for i in range(k)]))
    return GeneratorSet(k, tuple(mats))


def rotation_generators(m: int) -> GeneratorSet:
    t = 2 * math.pi / m
    rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]], dtype=complex)
    return GeneratorSet(2, (rot,))


def orbit_design(
    G: GeneratorSet,
    seed,
    max_orbit: int = DEFAULT_MAX_ORBIT,
    embedding: str | None = None,
    label: str = "orbit",
) -> Design:
    """Close ``{seed}`` under the generators and return the orbit as a Design.

    The result is only a candidate: run :func:`verify_design` on it.  With
    ``embedding="sumzero"`` the generators act on R^(n+1) and the design has
    dimension ``G.n - 1``.
    """
    seed = seed if isinstance(seed, np.ndarray) else as_vector(seed)
    exact = array_is_exact(seed) and all(array_is_exact(g) for g in G.matrices)
    if seed.shape != (G.n,):
        raise InvalidDesignError(f"seed of length {seed.shape[0]}, generators act on {G.n}")
    if not exact:
        seed = np.asarray(seed, dtype=complex)
    if not _is_zero(inner(seed, seed) - 1, DEDUP_TOL):
        raise InvalidDesignError("orbit seed must have unit norm")

    found = [seed]
    seen = {tuple(seed)} if exact else None
    frontier = [seed]
    while frontier:
        nxt = []
        for v in frontier:
            for g in G.matrices:
                w = g @ v if exact else np.asarray(g, dtype=complex) @ v
                if exact:
                    key = tuple(w)
                    if key in seen:
                        continue
                    seen.add(key)
                else:
                    stack = np.array(found)
                    if np.min(np.linalg.norm(stack - w, axis=1)) < DEDUP_TOL:
                        continue
                found.append(w)
                nxt.append(w)
                if len(found) > max_orbit:
                    raise OrbitOverflowError(f"orbit exceeds {max_orbit} vectors")
        frontier = nxt

    kind = sc.kind_of(x for v in found for x in v) if exact else sc.FLOAT
    n = G.n - 1 if embedding == SUMZERO else G.n
    return Design(n, tuple(found), kind, embedding, label)


def same_vector_set(D1: Design, D2: Design) -> bool:
    """True when the two designs hold the same vectors (any order)."""
    if D1.ambient_dim != D2.ambient_dim or D1.s != D2.s:
        return False
    exact = D1.exact and D2.exact
    if not exact:
        a = [np.asarray(v, dtype=complex) for v in D1.vectors]
        b = [np.asarray(v, dtype=complex) for v in D2.vectors]
    else:
        a, b = list(D1.vectors), list(D2.vectors)
    return all(any(_same_vector(u, v, exact) for v in b) for u in a)


# ---------------------------------------------------------------------------
# JSON


def design_to_json(D: Design) -> dict:
    out = {
        "n": D.n,
        "scalar": D.kind,
        "vectors": [[sc.encode_scalar(x, D.kind) for x in v] for v in D.vectors],
    }
    if D.embedding:
        out["embedding"] = D.embedding
    if D.label:
        out["label"] = D.label
    return out


def design_from_json(obj: dict) -> Design:
    try:
        kind = obj["scalar"]
        vecs = [[sc.decode_scalar(x, kind) for x in v] for v in obj["vectors"]]
        return Design(int(obj["n"]), tuple(vecs), kind, obj.get("embedding"), obj.get("label", ""))
    except (KeyError, TypeError) as exc:
        raise InvalidDesignError(f"malformed design JSON: {exc}") from exc
