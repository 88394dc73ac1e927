import cmath
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from repvar.core.linalg import Mat2, mat_commutator
from repvar.core.representation import Representation
from repvar.core.scalars import QQi, random_qqi
from repvar.deform import (BoundaryTarget, DeformationError, _abelian_solve, _boundary_newton, _handle_products,
                           abelian_diagonal_commutator, central_case_commutator, extend_boundary_deformation,
                           near_identity_product, parabolic_a_prime, parabolic_commutator_M,
                           parabolic_product_solve, product_lower_left, reducible_nonabelian_path)
from repvar.surface_builder import random_float_representation

seeds = st.integers(0, 10**6)
F = QQi


def small(rng, scale=100):
    return random_qqi(rng) / scale


def target(u, v):
    return Mat2(1, u, v, 1 + u * v)


def test_abelian_diagonal_trivial():
    A, B, K = abelian_diagonal_commutator(F(2), F(3), F(0), F(0))
    assert A == Mat2.diag(F(2)) and B == Mat2.diag(F(3)) and K == Mat2.identity()


def test_abelian_diagonal_example():
    _, _, K = abelian_diagonal_commutator(F(2), F(3), F("1/10"), F("1/10"))
    assert K == Mat2(1, F("1/10"), F("1/10"), F("101/100"))


@given(seeds)
def test_abelian_diagonal_exact(seed):
    rng = random.Random(seed)
    p, q = random_qqi(rng, nonzero=True) + 2, random_qqi(rng, nonzero=True) + 2
    if p * p == 1 or q * q == 1 or not p or not q:
        return
    u, v = small(rng), small(rng)
    A, B, K = abelian_diagonal_commutator(p, q, u, v)
    assert A == Mat2(p, p * u, 0, 1 / p)
    assert K == target(u, v) and K.d == 1 + u * v


def test_abelian_diagonal_errors():
    with pytest.raises(ValueError):
        abelian_diagonal_commutator(F(1), F(3), F(0), F(0))
    with pytest.raises(ValueError):
        abelian_diagonal_commutator(F(2), F(3), F(1), F(0))


def test_near_identity_trivial():
    C, D, CD = near_identity_product(F(0), F(0), F(0), F(0))
    assert C == D == CD == Mat2.identity()


def test_near_identity_example():
    _, _, CD = near_identity_product(F("1/4"), F("1/10"), F("1/10"), F("1/2"))
    assert CD == Mat2(F("5/4"), F("1/10"), F("1/10"), F("101/100") / F("5/4"))


@given(seeds)
def test_near_identity_exact_and_branch_free(seed):
    rng = random.Random(seed)
    r = small(rng, 30)
    x, y, z = r * r, small(rng), small(rng)
    C, D, CD = near_identity_product(x, y, z, r)
    C2, D2, CD2 = near_identity_product(x, y, z, -r)
    assert C.det() == 1 and D.det() == 1
    assert CD == Mat2(1 + x, y, z, (1 + y * z) / (1 + x)) == CD2
    assert C.a == 1 and C.b == r and D.c == r


def test_near_identity_float_determinants():
    rng = np.random.default_rng(0)
    for _ in range(200):
        x, y, z = (0.05 * complex(*rng.normal(size=2)) for _ in range(3))
        C, D, CD = near_identity_product(x, y, z)
        assert abs(C.det() - 1) < 1e-12 and abs(D.det() - 1) < 1e-12
        assert CD.max_dist(Mat2(1 + x, y, z, (1 + y * z) / (1 + x), check=False)) < 1e-12


def test_near_identity_errors():
    with pytest.raises(ValueError):
        near_identity_product(F(-1), F(0), F(0))
    with pytest.raises(ValueError):
        near_identity_product(F("1/4"), F(0), F(0), F("1/3"))


def test_central_examples():
    _, _, K = central_case_commutator(F("1/10"), F(0), F(0))
    assert K == Mat2.identity()
    A, B, K = central_case_commutator(F("1/10"), F("1/200"), F("1/200"))
    assert K == Mat2(1, F("1/200"), F("1/200"), 1 + F("1/40000"))
    Am, Bm, Km = central_case_commutator(F("1/10"), F("1/200"), F("1/200"), sign=-1)
    assert Am == -A and Bm == -B and Km == K


@given(seeds)
def test_central_exact(seed):
    rng = random.Random(seed)
    a = random_qqi(rng, nonzero=True) / 100
    u, v = a * random_qqi(rng) / 100, a * random_qqi(rng) / 100
    _, _, K = central_case_commutator(a, u, v)
    assert K == target(u, v)


def test_central_ratio_enforced():
    with pytest.raises(ValueError):
        central_case_commutator(F("1/10"), F("1/20"), F(0))


def test_parabolic_M_examples():
    assert parabolic_commutator_M(F(2), F(0), F(0)) == Mat2.identity()
    assert parabolic_commutator_M(F(2), F("1/10"), F(0)) == Mat2(F("11/10"), 0, -F("1/100") / F("11/5"), F("10/11"))
    with pytest.raises(ZeroDivisionError):
        parabolic_commutator_M(F(1), F(-1), F(0))


@given(seeds)
def test_parabolic_M_determinant_and_realization(seed):
    rng = random.Random(seed)
    p, q = random_qqi(rng, nonzero=True), random_qqi(rng)
    root, u = 1 + small(rng), small(rng)
    v = p * (root * root - 1 - u)
    if not p + p * u + v:
        return
    M = parabolic_commutator_M(p, u, v)
    assert M.det() == 1
    A = parabolic_a_prime(p, q, u, v, root=root)
    assert A.det() == 1
    assert mat_commutator(A, Mat2(1, p, 0, 1)) == M
    assert mat_commutator(-A, -Mat2(1, p, 0, 1)) == M


def test_parabolic_solve_trivial():
    w, C, D, K = parabolic_product_solve(0, 0, 0, 1, 1)
    assert w == 0 and C.max_dist(Mat2.identity(False)) == 0 and D.max_dist(Mat2.identity(False)) == 0


def test_parabolic_solve_magnitude():
    w, C, D, K = parabolic_product_solve(0, 0, 1e-4, 1, 1)
    assert 1e-3 < abs(w) < 1e-1
    assert abs(product_lower_left(0, 0, 1, 1, w) - 1e-4) < 1e-12
    assert (C * D).max_dist(Mat2(1, 0, 1e-4, 1, check=False)) < 1e-10


def test_parabolic_solve_sweep():
    rng = np.random.default_rng(2)
    worst = 0.0
    for ma in np.logspace(-8, -2, 10):
        for mc in np.logspace(-8, -2, 10):
            a = ma * np.exp(2j * np.pi * rng.random())
            c = mc * np.exp(2j * np.pi * rng.random())
            b = min(ma, mc) * np.exp(2j * np.pi * rng.random())
            p, q = np.exp(2j * np.pi * rng.random()), 1.5 * np.exp(2j * np.pi * rng.random())
            if abs(p + q) < 0.2:
                continue
            w, C, D, K = parabolic_product_solve(a, b, c, p, q)
            assert abs(product_lower_left(a, b, p, q, w) - c) < 1e-10
            worst = max(worst, K)
    assert worst <= 10


def test_parabolic_solve_rejects_opposite_parameters():
    with pytest.raises(ValueError):
        parabolic_product_solve(0, 0, 1e-4, 1, -1)


def _g(lam, d, mu):
    return d * lam * (mu * mu - 1) / (mu * (lam * lam - 1))


def test_reducible_path_constant():
    data = (2, 1, 3, 5)
    path = reducible_nonabelian_path(data, data, 16)
    assert all(v == path.values[0] for v in path.values)


def test_reducible_path_between_abelian_endpoints():
    p0 = (2, 1, 3, _g(2, 1, 3))
    p1 = (3, 2, 1.5, _g(3, 2, 1.5))
    path = reducible_nonabelian_path(p0, p1, 64)
    for A, B in path.values[1:-1]:
        assert A.c == 0 and B.c == 0
        assert mat_commutator(A, B).max_dist(Mat2.identity(False)) > 1e-9
        for X in (A, B):
            assert min(abs(X.trace() - 2), abs(X.trace() + 2)) > 1e-9
        lam, d, mu, e = A.a, A.b, B.a, B.b
        assert abs(e * mu * (lam * lam - 1) - d * lam * (mu * mu - 1)) > 0
    for A, B in path.values[::63]:
        assert mat_commutator(A, B).max_dist(Mat2.identity(False)) < 1e-12


def test_reducible_path_crossing_minus_one():
    # lambda runs from -2 to 2 and must go around -1, 0, 1
    path = reducible_nonabelian_path((-2, 1, 2, 0), (2, 1, 2, 0), 128)
    for A, _ in path.values:
        assert min(abs(A.a - x) for x in (-1, 0, 1)) > 1e-3


def test_reducible_path_rejects_lower_triangular():
    A, B = Mat2(2, 0, 1, F("1/2")), Mat2(3, 0, 0, F("1/3"))
    with pytest.raises(ValueError):
        reducible_nonabelian_path((A, B), (2, 1, 3, 1))


def _perturbed(seed, eps=1e-3):
    """Genus-4 rep with handles 0, 1 deformed and the target for handles 2, 3."""
    rho = random_float_representation(4, seed)
    imgs = [m.to_numpy() for m in rho.images]
    s_pairs = [(imgs[0], imgs[1]), (imgs[2], imgs[3])]
    t_pairs = [(imgs[4], imgs[5]), (imgs[6], imgs[7])]
    P_S, P_T = _handle_products(s_pairs), _handle_products(t_pairs)
    N = np.diag([1 + eps, 1 / (1 + eps)])
    new_s, _ = _boundary_newton(s_pairs, np.linalg.inv(N) @ P_S, np.inf, 1e-15)
    images = list(rho.images)
    for k, X in enumerate(x for pr in new_s for x in pr):
        images[k] = Mat2.from_numpy(X)
    M = P_T @ N
    deformed = Representation(rho.presentation, images, validate=False)
    return rho, deformed, Mat2.from_numpy(M), float(np.max(np.abs(M - P_T)))


def test_extension_unchanged_for_current_boundary():
    rho = random_float_representation(4, 0)
    imgs = [m.to_numpy() for m in rho.images]
    P_T = _handle_products([(imgs[4], imgs[5]), (imgs[6], imgs[7])])
    out = extend_boundary_deformation(rho, [0, 1, 2, 3], BoundaryTarget(Mat2.from_numpy(P_T)), 1e-3)
    assert out is rho


@pytest.mark.parametrize("seed", range(5))
def test_extension_of_small_boundary_move(seed):
    rho, deformed, M, max_norm = _perturbed(seed)
    out = extend_boundary_deformation(deformed, [0, 1, 2, 3], BoundaryTarget(M), max_norm)
    assert out.relator_residual() <= 1e-9
    for k in range(4):
        assert out.images[k] == deformed.images[k]
    disp = max(out.images[k].max_dist(rho.images[k]) for k in range(4, 8))
    assert disp <= 10 * max_norm


def test_abelian_complement_uses_diagonal_constructors():
    rng = np.random.default_rng(3)
    # handles 0, 1 diagonal; handles 2, 3 are (X, Y), (Y, X)
    diag = [np.diag([p, 1 / p]) for p in (2, 3 + 1j, 0.5j, 1.5)]
    X, Y = [Z / cmath.sqrt(np.linalg.det(Z)) for Z in rng.normal(size=(2, 2, 2)) + 1j * rng.normal(size=(2, 2, 2))]
    t_pairs = [(diag[0], diag[1]), (diag[2], diag[3])]
    M = np.array([[1.001, 0.0005], [0.0002, 0]], dtype=complex)
    M[1, 1] = (1 + M[0, 1] * M[1, 0]) / M[0, 0]
    new_pairs, kind = _abelian_solve(t_pairs, M, 1e-12)
    assert kind == "diagonal"
    assert np.max(np.abs(_handle_products(new_pairs) - M)) < 1e-12
    # the full extension: deform handles 2, 3 toward M^{-1} first
    s_pairs, _ = _boundary_newton([(X, Y), (Y, X)], np.linalg.inv(M), np.inf, 1e-13)
    images = [Mat2.from_numpy(Z) for pr in t_pairs + s_pairs for Z in pr]
    rep = Representation.surface(images, validate=False)
    out = extend_boundary_deformation(rep, [4, 5, 6, 7], BoundaryTarget(Mat2.from_numpy(M)), 1e-2)
    assert out.relator_residual() <= 1e-9
    A, B = out.images[0].to_numpy(), out.images[1].to_numpy()
    assert np.max(np.abs(A @ B - B @ A)) > 1e-6


def test_extension_requires_genus_two_complement():
    rho = random_float_representation(3, 1)
    with pytest.raises(ValueError):
        extend_boundary_deformation(rho, [0, 1, 2, 3], BoundaryTarget(Mat2.identity(False)), 1e-3)
    with pytest.raises(ValueError):
        extend_boundary_deformation(rho, [0], BoundaryTarget(Mat2.identity(False)), 1e-3)


def test_extension_budget_violation():
    rho, deformed, M, max_norm = _perturbed(0, eps=1e-2)
    with pytest.raises(ValueError):
        extend_boundary_deformation(deformed, [0, 1, 2, 3], BoundaryTarget(M), max_norm / 10)
