import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

from mmdesign.decomp import (
    MIXED_PATTERNS,
    _pattern_sum,
    Decomposition,
    RankOneTerm,
    decomposition_from_json,
    decomposition_to_json,
    design_decomposition,
    mixed_term_sums,
    strassen_reference,
    twisted_identity_check,
    untwisted_identity_check,
    verify_decomposition,
)
from mmdesign.designs import Design, DesignVerificationError, InvalidDesignError, polygon_design, simplex_design, triangle_design
from mmdesign.scalar import QuadExt
from mmdesign.tensor import as_matrix, identity, identity_tensor, mm_tensor, outer, sum_rank_one, tensor_eq

from .conftest import rational_matrix
from .test_designs import random_unitary

F = Fraction


def frob(M, A):
    n = A.shape[0]
    return sum(M[i, j] * A[i, j] for i in range(n) for j in range(n))


def trilinear_oracle(dec, rng, trials=20):
    """Check tr(ABC) == sum_r <X_r,A><Y_r,B><Z_r,C> without building any tensor."""
    for _ in range(trials):
        A, B, C = (rational_matrix(rng, dec.n) for _ in range(3))
        lhs = sum(A[a, b] * B[b, c] * C[c, a] for a in range(dec.n) for b in range(dec.n) for c in range(dec.n))
        rhs = sum(frob(t.X, A) * frob(t.Y, B) * frob(t.Z, C) for t in dec.terms)
        if lhs != rhs:
            return False
    return True


def test_triangle_decomposition():
    dec = design_decomposition(triangle_design())
    assert len(dec) == 7
    assert dec.kind == "quad(3)"
    rep = verify_decomposition(dec)
    assert rep.passed and rep.residual == 0


def test_triangle_decomposition_trilinear(rng):
    assert trilinear_oracle(design_decomposition(triangle_design()), rng)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_simplex_decomposition(n, rng):
    dec = design_decomposition(simplex_design(n))
    assert len(dec) == n**3 - n + 1
    assert dec.kind == "rational"
    assert all(isinstance(x, (int, Fraction)) for t in dec.terms for m in t.as_tuple() for x in m.flat)
    assert verify_decomposition(dec).passed
    assert trilinear_oracle(dec, rng, trials=5)


def test_term_order_and_coefficient():
    D = triangle_design()
    dec = design_decomposition(D)
    one = identity(2)
    assert all(np.all(m == one) for m in dec.terms[0].as_tuple())
    # term 1 is (i, j, k) = (0, 1, 2)
    w = D.vectors
    assert np.all(dec.terms[1].X == outer(w[0], w[1] - w[0]) * F(8, 27))
    assert np.all(dec.terms[1].Y == outer(w[1], w[2] - w[1]))
    assert np.all(dec.terms[1].Z == outer(w[2], w[0] - w[2]))


def test_simplex_one_rejected():
    with pytest.raises(InvalidDesignError):
        design_decomposition(simplex_design(1))


def test_mm1_is_identity():
    # s = 2 gives an empty distinct-triple sum; MM_1 is the identity term alone
    assert tensor_eq(mm_tensor(1), identity_tensor(1))


def test_unverified_design_rejected():
    D = Design(2, ([1, 0], [0, 1], [F(3, 5), F(4, 5)]), "rational")
    with pytest.raises(DesignVerificationError):
        design_decomposition(D)


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_polygon_decompositions(m):
    dec = design_decomposition(polygon_design(m))
    assert len(dec) == m * (m - 1) * (m - 2) + 1
    rep = verify_decomposition(dec, 1e-9)
    assert rep.passed and rep.residual < 1e-9


@pytest.mark.parametrize("m", [4, 6])
def test_exact_polygon_decompositions(m):
    dec = design_decomposition(polygon_design(m, exact=True))
    rep = verify_decomposition(dec)
    assert rep.passed and rep.residual == 0


def test_complex_design_decomposition():
    U = random_unitary(2, 3)
    T = triangle_design().to_float()
    D = Design(2, tuple(U @ v for v in T.vectors), "float")
    dec = design_decomposition(D)
    assert verify_decomposition(dec, 1e-9).passed
    # dropping the conjugate on the bras breaks it
    w = D.kets()
    c = 8 / 27
    terms = [(identity(2, exact=False),) * 3]
    for i, j, k in itertools.permutations(range(3), 3):
        terms.append((np.outer(w[i], w[j] - w[i]) * c, np.outer(w[j], w[k] - w[j]), np.outer(w[k], w[i] - w[k])))
    assert not tensor_eq(sum_rank_one(terms, 2), mm_tensor(2), 1e-6)


def test_strassen_reference():
    dec = strassen_reference()
    assert len(dec) == 7
    vals = {x for t in dec.terms for m in t.as_tuple() for x in m.flat}
    assert vals <= {0, 1, -1}
    rep = verify_decomposition(dec)
    assert rep.passed and rep.residual == 0
    first = dec.terms[0]
    assert np.all(first.X == as_matrix([[1, 0], [0, 1]]))
    assert np.all(first.Y == as_matrix([[1, 0], [0, 1]]))


def test_strassen_trilinear(rng):
    assert trilinear_oracle(strassen_reference(), rng, trials=50)


def test_perturbation_detected():
    dec = strassen_reference()
    terms = list(dec.terms)
    t = terms[3]
    terms[3] = RankOneTerm(t.X, t.Y, t.Z * 0)
    rep = verify_decomposition(Decomposition(2, tuple(terms), "broken"))
    assert not rep.passed and rep.residual > 0


@pytest.mark.parametrize("make", [triangle_design, lambda: simplex_design(2), lambda: simplex_design(3), lambda: simplex_design(4)])
def test_proof_identities_exact(make):
    D = make()
    tw, un = twisted_identity_check(D), untwisted_identity_check(D)
    assert tw.passed and tw.residual == 0
    assert un.passed and un.residual == 0


def test_proof_identities_float():
    D = polygon_design(5)
    assert twisted_identity_check(D, 1e-9).passed
    assert untwisted_identity_check(D, 1e-9).passed


def test_twisted_identity_fails_on_non_design():
    D = Design(2, ([1, 0], [0, 1]), "rational")
    with pytest.raises(DesignVerificationError):
        twisted_identity_check(D)


@pytest.mark.parametrize("make", [triangle_design, lambda: simplex_design(3), lambda: polygon_design(5)])
def test_mixed_terms_vanish(make):
    sums = mixed_term_sums(make())
    assert set(sums) == set(MIXED_PATTERNS)
    zero = identity_tensor(make().n).scale(0)
    for name, t in sums.items():
        assert tensor_eq(t, zero, 1e-12), name


def test_mixed_terms_need_zero_sum():
    # a tight frame that does not sum to zero keeps its mixed terms
    D = Design(2, ([1, 0], [0, 1], [-1, 0], [0, -1]), "rational")
    shifted = Design(2, ([1, 0], [0, 1]), "rational")
    assert tensor_eq(_pattern_sum(D, tuple("iijkki")), identity_tensor(2).scale(0))
    assert not tensor_eq(_pattern_sum(shifted, tuple("iijkki")), identity_tensor(2).scale(0))


@pytest.mark.parametrize(
    "make",
    [strassen_reference, lambda: design_decomposition(triangle_design()), lambda: design_decomposition(simplex_design(3)), lambda: design_decomposition(polygon_design(5))],
)
def test_json_round_trip(make):
    dec = make()
    text = json.dumps(decomposition_to_json(dec))
    back = decomposition_from_json(json.loads(text))
    assert (back.n, back.kind, back.provenance, len(back)) == (dec.n, dec.kind, dec.provenance, len(dec))
    for a, b in zip(dec.terms, back.terms):
        for x, y in zip(a.as_tuple(), b.as_tuple()):
            assert np.all(x == y)
    assert json.dumps(decomposition_to_json(back)) == text


def test_json_format():
    obj = decomposition_to_json(strassen_reference())
    assert set(obj) == {"n", "provenance", "scalar", "terms"}
    assert obj["terms"][0]["X"] == [["1/1", "0/1"], ["0/1", "1/1"]]
    with pytest.raises(ValueError):
        decomposition_from_json({"n": 2, "scalar": "rational"})
