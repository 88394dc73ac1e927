import random

import pytest
from hypothesis import given, strategies as st

from repvar.core.linalg import Mat2, determinant, mat_commutator, parallel
from repvar.core.representation import Representation, evaluate_word
from repvar.core.sampling import random_diagonal, random_sl2, random_triangular_pair, random_upper
from repvar.core.scalars import QQi
from repvar.trace_lab import (commutator_trace_diagonal_form, commutator_trace_parabolic_form, identity_checks,
                              kernel_witness, reducibility_report, theta_inverse, theta_map, theta_matrix)

seeds = st.integers(0, 10**6)


def test_diagonal_form_examples():
    assert commutator_trace_diagonal_form(QQi(2), QQi(1), QQi(1)) == QQi("-1/4")
    assert commutator_trace_diagonal_form(QQi(-1), QQi(5), QQi(7)) == 2
    assert commutator_trace_diagonal_form(QQi(2), QQi(0), QQi(9)) == 2
    with pytest.raises(ValueError):
        commutator_trace_diagonal_form(QQi(0), QQi(1), QQi(1))


def test_parabolic_form_examples():
    assert commutator_trace_parabolic_form(QQi(1), QQi(1)) == 3
    assert mat_commutator(Mat2(1, 1, 0, 1), Mat2(1, 0, 1, 1)).trace() == 3
    assert commutator_trace_parabolic_form(QQi(5), QQi(0)) == 2
    assert commutator_trace_parabolic_form(QQi(2), QQi(0, 1)) == -2
    assert mat_commutator(Mat2(1, 2, 0, 1), Mat2(1, 0, QQi(0, 1), 1)).trace() == -2


@given(seeds)
def test_diagonal_form_matches_product(seed):
    rng = random.Random(seed)
    A, B = random_diagonal(rng), random_sl2(rng)
    assert mat_commutator(A, B).trace() == commutator_trace_diagonal_form(A.a, B.b, B.c)


@given(seeds)
def test_parabolic_form_matches_product(seed):
    rng = random.Random(seed)
    B = random_sl2(rng)
    x = random_upper(rng).b
    assert mat_commutator(Mat2(1, x, 0, 1), B).trace() == commutator_trace_parabolic_form(x, B.c)


def test_reducibility_examples():
    rep = reducibility_report(Mat2(2, 1, 0, QQi("1/2")), Mat2(3, 5, 0, QQi("1/3")))
    assert rep.reducible and rep.trace_of_commutator == 2
    assert parallel(rep.invariant_line, (QQi(1), QQi(0)))
    rep = reducibility_report(Mat2.diag(QQi(2)), Mat2(1, 1, 1, 2))
    assert not rep.reducible and rep.invariant_line is None
    assert rep.trace_of_commutator == QQi("-1/4")


@given(seeds, st.booleans())
def test_conjugated_triangular_pairs_are_reducible(seed, exact_backend):
    rng = random.Random(seed)
    A, B, G = random_triangular_pair(rng, exact_backend)
    rep = reducibility_report(A, B)
    assert rep.reducible
    v = rep.invariant_line
    tol = 0.0 if exact_backend else 1e-9
    assert parallel(A.apply(v), v, tol) and parallel(B.apply(v), v, tol)
    assert parallel(v, G.apply((v[0] * 0 + 1, v[0] * 0)), tol)
    if exact_backend:
        assert rep.trace_of_commutator == 2


@given(seeds)
def test_trace_not_two_means_irreducible(seed):
    rng = random.Random(seed)
    A, B = random_sl2(rng), random_sl2(rng)
    rep = reducibility_report(A, B)
    assert rep.reducible == (rep.trace_of_commutator == 2)


def test_central_inputs_are_reducible():
    assert reducibility_report(-Mat2.identity(), Mat2(2, 3, 1, 2)).reducible


def test_theta_examples():
    rng = random.Random(3)
    A, B = random_sl2(rng), random_sl2(rng)
    assert theta_map(A, B, Mat2.identity()) == (2, A.trace(), B.trace(), (A * B).trace())
    zero = Mat2(0, 0, 0, 0, sl2=False)
    assert theta_map(A, B, zero) == (0, 0, 0, 0)
    assert theta_inverse(A, B, (QQi(0),) * 4) == zero
    assert theta_inverse(A, B, theta_map(A, B, Mat2.identity())) == Mat2.identity()


def test_theta_singular_configuration():
    A, B = Mat2(2, 1, 0, QQi("1/2")), Mat2(3, 1, 0, QQi("1/3"))
    with pytest.raises(ValueError):
        theta_map(A, B, Mat2.identity())
    with pytest.raises(ValueError):
        theta_inverse(A, B, (2, 0, 0, 0))


def test_theta_matrix_determinant_nonzero():
    rng = random.Random(11)
    for _ in range(50):
        A, B = random_sl2(rng), random_sl2(rng)
        if mat_commutator(A, B).trace() == 2:
            continue
        assert determinant(theta_matrix(A, B)) != 0


@given(seeds, st.booleans())
def test_theta_round_trip(seed, exact_backend):
    rng = random.Random(seed)
    A, B = random_sl2(rng, exact_backend), random_sl2(rng, exact_backend)
    if abs(complex(mat_commutator(A, B).trace()) - 2) < 1e-3:
        return
    M = random_sl2(rng, exact_backend)
    back = theta_inverse(A, B, theta_map(A, B, M))
    if exact_backend:
        assert back == M
    else:
        assert back.max_dist(M) <= 1e-9


def test_kernel_witness_word():
    w = kernel_witness()
    assert len(w) == 36 and w.letters
    A, B = Mat2(1, 1, 0, 1), Mat2(2, 1, 0, QQi("1/2"))
    assert evaluate_word(Representation.free([A, B]), w) == Mat2.identity()
    # irreducible pairs do not kill it
    rho = Representation.free([Mat2.diag(QQi(2)), Mat2(1, 1, 1, 2)])
    assert not evaluate_word(rho, w).is_identity()


@given(seeds)
def test_kernel_witness_dies_on_trace_two_pairs(seed):
    A, B, _ = random_triangular_pair(random.Random(seed))
    assert evaluate_word(Representation.free([A, B]), kernel_witness()) == Mat2.identity()


def test_identity_suite_passes():
    checks = identity_checks(seed=5, n_exact=100, n_float=100)
    assert all(c.passed for c in checks)
