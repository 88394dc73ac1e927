import random

import pytest

from repvar.core.linalg import Mat2, mat_commutator
from repvar.core.representation import Representation, evaluate_word
from repvar.core.scalars import QQi
from repvar.core.words import FreeWord, Presentation, alpha, beta, boundary_word, handle_commutator
from repvar.surface_builder import (_PRIMES, BuildError, _random_sl2, build_representation, certify,
                                    dimension_by_product_formula, dimension_calculator, evaluate_w_conditions,
                                    random_float_representation, rep_variety_dim, scc_default_catalog,
                                    solve_last_pair, standard_curves)
from repvar.trace_lab import kernel_witness


@pytest.fixture(scope="module")
def built():
    return build_representation(4, 0)


def test_standard_curves_genus_four():
    c = standard_curves(4)
    assert c.C == handle_commutator(1) and c.C_prime == handle_commutator(4)
    assert c.C_double_prime == c.C * handle_commutator(2) and len(c.C_double_prime) == 8
    assert c.beta1 == beta(1)


def test_standard_curves_genus_two():
    with pytest.raises(ValueError):
        standard_curves(2)


def test_build_needs_genus_four():
    with pytest.raises(ValueError):
        build_representation(3, 0)


def test_built_rep_is_exact_solution(built):
    assert built.is_exact
    assert built.relator_residual() == 0
    assert evaluate_word(built, handle_commutator(1)).trace() == 2
    A1, B1 = built.images[:2]
    assert A1.c == 0 and B1.c == 0 and not mat_commutator(A1, B1).is_identity()
    assert built.images[2].c != 0
    assert evaluate_w_conditions(built).all_satisfied


def test_seeds_give_distinct_characters():
    values = {evaluate_word(build_representation(4, s), alpha(2)).trace() for s in range(6)}
    assert len(values) == 6


def test_solve_last_pair():
    rng = random.Random(2)
    for _ in range(20):
        X, Y = _random_sl2(rng), _random_sl2(rng)
        M = mat_commutator(X, Y)
        if M.b == 0 or M.trace() in (2, -2):
            continue
        A, B = solve_last_pair(M, _PRIMES[0])
        assert mat_commutator(A, B) == M and A.trace() == _PRIMES[0] + 1 / _PRIMES[0]
    with pytest.raises(BuildError):
        solve_last_pair(Mat2(2, 0, 1, QQi("1/2")), _PRIMES[0])


def test_catalog_depth_zero():
    cat = scc_default_catalog(4, 0)
    for k in range(8):
        assert FreeWord.gen(k) in cat
    for i in range(1, 5):
        assert handle_commutator(i) in cat
        assert alpha(i) * beta(i) in cat
    assert boundary_word([1, 2, 3, 4]) not in cat


def test_catalog_depth_two():
    cat = scc_default_catalog(4, 2)
    assert len(cat) >= 50 and len(set(cat)) == len(cat)
    for w in cat:
        assert len(w) > 0 and FreeWord(list(w.letters)) == w
        assert all(a[0] != b[0] or a[1] != -b[1] for a, b in zip(w.letters, w.letters[1:]))
    assert cat == scc_default_catalog(4, 2)


def test_certify_built_rep(built):
    cert = certify(built, n_real_samples=200)
    assert cert.passed, cert.failures
    assert cert.witness_residual == 0 and cert.relator_residual == 0
    assert cert.c_image_trace == 2 and cert.c_image_is_identity is False
    assert cert.handle_one_reducible and cert.handle_one_nonabelian
    assert all(not killed for _, _, killed in cert.scc_checks)
    assert all(allowed for *_, allowed in cert.real_trace_samples)


@pytest.mark.parametrize("seed", range(1, 6))
def test_certify_more_seeds(seed):
    cert = certify(build_representation(4, seed), n_real_samples=100, seed=seed)
    assert cert.passed, cert.failures


def test_float_rep_fails_w1():
    cert = certify(random_float_representation(4, 0), n_real_samples=20)
    assert not cert.passed and not cert.w.w1.satisfied
    assert any(f.startswith("W1") for f in cert.failures)


def test_trivial_generator_is_caught(built):
    imgs = list(built.images)
    imgs[4] = Mat2.identity()
    P = Mat2.identity()
    for k in range(0, 6, 2):
        P = P * mat_commutator(imgs[k], imgs[k + 1])
    imgs[6], imgs[7] = solve_last_pair(P.inv(), _PRIMES[1])
    rho = Representation(Presentation.surface(4), imgs)
    cert = certify(rho, n_real_samples=20)
    assert not cert.passed
    killed = [w for w, _, k in cert.scc_checks if k]
    assert alpha(3) in killed


def test_certify_needs_genus_three():
    rho = random_float_representation(2, 0)
    cert = certify(rho)
    assert not cert.passed and cert.failures


def test_kernel_witness_dies_on_built_reps():
    word = kernel_witness(0, 1)
    for seed in range(50):
        rho = build_representation(4, seed, screen_len=0)
        assert evaluate_word(rho, handle_commutator(1)).trace() == 2
        assert evaluate_word(rho, word).is_identity()


@pytest.mark.parametrize("genus,query,g1,expected", [
    (3, "whole", None, 12),
    (3, "kill_separating", 1, 10),
    (4, "Z_locus", None, 17),
    (4, "kill_nonseparating", None, 15),
    (5, "kill_separating", 2, 21),
    (5, "kill_separating", 4, 22),
])
def test_dimension_table(genus, query, g1, expected):
    assert dimension_calculator(genus, query, g1) == expected


@pytest.mark.parametrize("genus", range(3, 9))
def test_dimensions_agree_with_product_formula(genus):
    for query in ("whole", "kill_nonseparating", "Z_locus"):
        assert dimension_calculator(genus, query) == dimension_by_product_formula(genus, query)
    for g1 in range(1, genus):
        assert dimension_calculator(genus, "kill_separating", g1) == \
            dimension_by_product_formula(genus, "kill_separating", g1)


def test_dimension_errors():
    with pytest.raises(ValueError):
        dimension_calculator(2, "kill_nonseparating")
    with pytest.raises(ValueError):
        dimension_calculator(4, "kill_separating", 4)
    with pytest.raises(ValueError):
        dimension_calculator(4, "kill_separating")
    with pytest.raises(ValueError):
        dimension_calculator(1, "whole")
    with pytest.raises(ValueError):
        rep_variety_dim("torus")
