"""Exact scalars: rationals, the real quadratic fields Q(sqrt d), and complex floats.

Rationals are plain :class:`fractions.Fraction`.  ``QuadExt`` adds one square
root on top of them.  Floats are Python ``complex``.  Everything downstream is
written against the ordinary arithmetic operators plus :func:`conj`, so numpy
object arrays of these values behave like matrices over the field.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Any, Union


class FieldMismatchError(ValueError):
    """Two quadratic elements from different fields Q(sqrt d) were combined."""


def squarefree_part(m: int) -> tuple[int, int]:
    """Split ``m > 0`` as ``k**2 * d`` with ``d`` square-free; return ``(k, d)``."""
    if m <= 0:
        raise ValueError(f"expected a positive integer, got {m}")
    k, d, p = 1, 1, 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            k *= p
        if m % p == 0:
            m //= p
            d *= p
        p += 1
    return k, d * m


def _is_squarefree(d: int) -> bool:
    return d > 1 and squarefree_part(d)[1] == d


class QuadExt:
    """The number ``a + b*sqrt(d)`` with rational ``a``, ``b`` and square-free ``d > 1``.

    Instances are immutable and hashable.  Plain ints and Fractions coerce into
    any field; two ``QuadExt`` values must agree on ``d``.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Any = 0, b: Any = 0, d: int = 3) -> None:
        if not _is_squarefree(d):
            raise ValueError(f"d must be a square-free integer > 1, got {d}")
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", int(d))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("QuadExt is immutable")

    @classmethod
    def sqrt(cls, d: int) -> QuadExt:
        return cls(0, 1, d)

    def _coerce(self, other: Any) -> QuadExt | None:
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise FieldMismatchError(f"cannot combine Q(sqrt {self.d}) with Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Rational)):
            return QuadExt(other, 0, self.d)
        return None

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __add__(self, other: Any) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self) -> QuadExt:
        return QuadExt(-self.a, -self.b, self.d)

    def __pos__(self) -> QuadExt:
        return self

    def __sub__(self, other: Any) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other: Any) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return quad_mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return quad_mul(self, quad_inv(o))

    def __rtruediv__(self, other: Any) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return quad_mul(o, quad_inv(self))

    def __pow__(self, k: int) -> QuadExt:
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else quad_inv(self)
        out = QuadExt(1, 0, self.d)
        for _ in range(abs(k)):
            out = quad_mul(out, base)
        return out

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, QuadExt):
            if other.d != self.d:
                # elements of different fields only meet in Q
                return self.b == 0 and other.b == 0 and self.a == other.a
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Rational)):
            return self.b == 0 and self.a == other
        if isinstance(other, (float, complex)):
            return self.b == 0 and float(self.a) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def conjugate(self) -> QuadExt:
        # in-scope exact values are real
        return self

    def galois_conjugate(self) -> QuadExt:
        return QuadExt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __complex__(self) -> complex:
        return complex(float(self))

    def __repr__(self) -> str:
        return f"QuadExt({self.a!s}, {self.b!s}, d={self.d})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}√{self.d}"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}√{self.d}"


Scalar = Union[int, Fraction, QuadExt, float, complex]


def quad_mul(x: QuadExt, y: QuadExt) -> QuadExt:
    if x.d != y.d:
        raise FieldMismatchError(f"cannot multiply Q(sqrt {x.d}) by Q(sqrt {y.d})")
    return QuadExt(x.a * y.a + x.b * y.b * x.d, x.a * y.b + x.b * y.a, x.d)


def quad_inv(x: QuadExt) -> QuadExt:
    nrm = x.norm()
    if nrm == 0:
        # d square-free, so the norm vanishes only at zero
        raise ZeroDivisionError("inverse of zero in Q(sqrt d)")
    return QuadExt(x.a / nrm, -x.b / nrm, x.d)


def to_float(x: Scalar) -> complex:
    """Evaluate any scalar as a complex float."""
    if isinstance(x, complex):
        return x
    return complex(float(x), 0.0)


def conj(x: Scalar) -> Scalar:
    if isinstance(x, (complex, float)):
        return x.conjugate()
    # Fraction, int and QuadExt are all real
    return x


def is_exact(x: Any) -> bool:
    return isinstance(x, (int, Fraction, QuadExt)) and not isinstance(x, bool)


def as_rational(x: Scalar) -> Fraction:
    """Return ``x`` as a Fraction; raise if it carries a nonzero radical part."""
    if isinstance(x, QuadExt):
        if x.b != 0:
            raise ValueError(f"{x} is irrational")
        return x.a
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


# ---------------------------------------------------------------------------
# scalar kinds and JSON encoding

RATIONAL = "rational"
FLOAT = "float"
_QUAD_RE = re.compile(r"^quad\((\d+)\)$")


def quad_kind(d: int) -> str:
    return f"quad({d})"


def parse_kind(kind: str) -> tuple[str, int | None]:
    """``"rational"`` -> ("rational", None); ``"quad(3)"`` -> ("quad", 3); ``"float"``."""
    if kind in (RATIONAL, FLOAT):
        return kind, None
    m = _QUAD_RE.match(kind)
    if m and _is_squarefree(int(m.group(1))):
        return "quad", int(m.group(1))
    raise ValueError(f"unknown scalar kind {kind!r}")


def kind_of(values) -> str:
    """Smallest scalar kind that holds every value in ``values``."""
    ds = set()
    inexact = False
    for x in values:
        if isinstance(x, QuadExt):
            if x.b != 0:
                ds.add(x.d)
        elif not is_exact(x):
            inexact = True
    if inexact:
        return FLOAT
    if len(ds) > 1:
        raise FieldMismatchError(f"values span several fields: {sorted(ds)}")
    return quad_kind(ds.pop()) if ds else RATIONAL


def coerce(x: Scalar, kind: str) -> Scalar:
    """Convert ``x`` into the canonical representation for ``kind``."""
    tag, d = parse_kind(kind)
    if tag == FLOAT:
        return to_float(x)
    if tag == RATIONAL:
        return as_rational(x)
    if isinstance(x, QuadExt):
        if x.b != 0 and x.d != d:
            raise FieldMismatchError(f"{x} is not in Q(sqrt {d})")
        return QuadExt(x.a, x.b, d)
    return QuadExt(as_rational(x), 0, d)


def encode_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def decode_rational(s: str) -> Fraction:
    if not isinstance(s, str):
        raise ValueError(f"rational must be encoded as a 'p/q' string, got {s!r}")
    return Fraction(s)


def encode_scalar(x: Scalar, kind: str) -> Any:
    tag, d = parse_kind(kind)
    x = coerce(x, kind)
    if tag == RATIONAL:
        return encode_rational(x)
    if tag == "quad":
        return {"a": encode_rational(x.a), "b": encode_rational(x.b), "d": d}
    return {"re": x.real, "im": x.imag}


def decode_scalar(obj: Any, kind: str) -> Scalar:
    tag, d = parse_kind(kind)
    if tag == RATIONAL:
        return decode_rational(obj)
    if tag == "quad":
        if not isinstance(obj, dict) or int(obj.get("d", -1)) != d:
            raise ValueError(f"expected a quad({d}) scalar, got {obj!r}")
        return QuadExt(decode_rational(obj["a"]), decode_rational(obj["b"]), d)
    if not isinstance(obj, dict):
        raise ValueError(f"expected a float scalar object, got {obj!r}")
    return complex(float(obj["re"]), float(obj["im"]))
