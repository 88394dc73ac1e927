import json
import random

import pytest
from hypothesis import given, strategies as st

from repvar.config import Config, load_config
from repvar.core.encoding import (mat_from_json, mat_to_json, rep_from_json, rep_to_json, scalar_from_json,
                                  scalar_to_json, word_from_json, word_to_json)
from repvar.core.linalg import INFINITY, Mat2, fixed_points, mat_commutator, moebius, solve_linear
from repvar.core.polynomial import Poly
from repvar.core.representation import Representation, character_of, evaluate_word
from repvar.core.sampling import random_sl2, random_upper
from repvar.core.scalars import QQi, parse_scalar, qqi_sqrt, sqrt
from repvar.core.words import (FreeWord, Presentation, alpha, beta, boundary_word, commutator,
                               handle_commutator, parse_word)

seeds = st.integers(0, 10**6)


def random_word(rng, n_gens, max_len):
    return FreeWord([(rng.randrange(n_gens), rng.choice((1, -1))) for _ in range(rng.randint(0, max_len))])


# scalars ---------------------------------------------------------------------

def test_qqi_field_operations():
    z = QQi(1, 2)
    assert z * z.inverse() == 1
    assert (z + 1) * (z - 1) == z * z - 1
    assert z.conjugate() == QQi(1, -2)
    assert z.norm() == 5
    assert QQi(3, 0).is_real() and not z.is_real()


def test_backends_do_not_mix():
    with pytest.raises(TypeError):
        QQi(1) + 0.5
    with pytest.raises(TypeError):
        QQi(1) * 1j


def test_parse_scalar_forms():
    assert parse_scalar("1-2i") == QQi(1, -2)
    assert parse_scalar("3/2") == QQi("3/2")
    assert parse_scalar("i") == QQi(0, 1)
    assert parse_scalar("0.5+0.25j") == 0.5 + 0.25j
    with pytest.raises(ValueError):
        parse_scalar("")


def test_exact_square_roots():
    assert qqi_sqrt(QQi(-4)) == QQi(0, 2)
    assert qqi_sqrt(QQi(3, 4)) == QQi(2, 1)
    assert qqi_sqrt(QQi(2)) is None
    with pytest.raises(ValueError):
        sqrt(QQi(2))
    r = sqrt(QQi(2), prefer_exact=False)
    assert isinstance(r, complex) and abs(r * r - 2) < 1e-15


@given(seeds)
def test_exact_sqrt_squares_back(seed):
    rng = random.Random(seed)
    from repvar.core.scalars import random_qqi
    z = random_qqi(rng, 9, 7)
    r = qqi_sqrt(z * z)
    assert r is not None and r * r == z * z


# matrices --------------------------------------------------------------------

def test_commutator_oracle():
    # 2 - bc(x - 1/x)^2 with x = 2, b = c = 1
    K = mat_commutator(Mat2.diag(QQi(2)), Mat2(1, 1, 1, 2))
    assert K.trace() == QQi("-1/4")


def test_commutator_with_identity():
    B = Mat2(2, 3, 1, 2)
    assert mat_commutator(Mat2.identity(), B) == Mat2.identity()


def test_det_check():
    with pytest.raises(ValueError):
        Mat2(1, 1, 1, 1)
    Mat2(1, 1, 1, 1, sl2=False)
    with pytest.raises(ValueError):
        Mat2(1 + 0j, 1e-3, 0j, 1 + 0j + 1e-6)


@given(seeds)
def test_commutator_det_exact(seed):
    rng = random.Random(seed)
    A, B = random_sl2(rng), random_sl2(rng)
    assert mat_commutator(A, B).det() == 1


@given(seeds)
def test_upper_triangular_commutator_has_trace_two(seed):
    rng = random.Random(seed)
    assert mat_commutator(random_upper(rng), random_upper(rng)).trace() == 2


def test_fixed_points_examples():
    fp = fixed_points(Mat2.diag(QQi(2)))
    assert fp.count == 2 and set(map(str, fp.points)) == {"0", INFINITY}
    fp = fixed_points(Mat2(1, 1, 0, 1))
    assert fp.count == 1 and fp.points == (INFINITY,)
    assert fixed_points(-Mat2.identity()).count == "all"
    fp = fixed_points(Mat2(2, 1, 1, 1))
    golden = sorted([(1 - 5 ** 0.5) / 2, (1 + 5 ** 0.5) / 2])
    assert sorted(z.real for z in fp.points) == pytest.approx(golden, abs=1e-12)


@given(seeds, st.booleans())
def test_fixed_points_are_fixed(seed, exact_backend):
    A = random_sl2(random.Random(seed), exact_backend)
    fp = fixed_points(A)
    if not fp.exact:
        A = A.to_float()
    for z in fp.points:
        w = moebius(A, z)
        if z == INFINITY or isinstance(z, QQi):
            assert w == z
        else:
            assert abs(w - z) <= 1e-9 * max(1, abs(z))


def test_solve_linear_exact():
    x = solve_linear([[QQi(2), QQi(1)], [QQi(1), QQi(3)]], [QQi(1), QQi(2)])
    assert x == [QQi("1/5"), QQi("3/5")]


# words -----------------------------------------------------------------------

def test_free_reduction():
    w = FreeWord([(0, 1), (1, 2), (1, -2), (0, 1)])
    assert w.letters == ((0, 2),)
    assert (w * w.inverse()) == FreeWord.identity()
    assert len(FreeWord()) == 0


def test_surface_presentation():
    P = Presentation.surface(3)
    assert P.num_generators == 6 and len(P.relator) == 12
    assert P.relator == boundary_word([1, 2, 3])
    with pytest.raises(ValueError):
        Presentation.surface(1)


def test_parse_and_print_words():
    names = Presentation.surface(2).names
    w = parse_word("a1*b1*a1^-1*b1^-1", names)
    assert w == handle_commutator(1) == commutator(alpha(1), beta(1))
    assert parse_word(w.to_string(names), names) == w


@given(seeds)
def test_evaluate_word_is_a_homomorphism(seed):
    rng = random.Random(seed)
    rho = Representation.free([random_sl2(rng) for _ in range(3)])
    w1, w2 = random_word(rng, 3, 12), random_word(rng, 3, 12)
    assert evaluate_word(rho, w1 * w2) == evaluate_word(rho, w1) * evaluate_word(rho, w2)


def test_evaluate_word_basics():
    rng = random.Random(0)
    A, B = random_sl2(rng), random_sl2(rng)
    rho = Representation.free([A, B])
    assert evaluate_word(rho, FreeWord()) == Mat2.identity()
    assert evaluate_word(rho, commutator(alpha(1), beta(1))) == mat_commutator(A, B)
    with pytest.raises(IndexError):
        evaluate_word(rho, FreeWord.gen(5))


@given(seeds, st.booleans())
def test_character_is_conjugation_invariant(seed, exact_backend):
    rng = random.Random(seed)
    rho = Representation.free([random_sl2(rng, exact_backend) for _ in range(2)])
    words = [random_word(rng, 2, 8) for _ in range(6)]
    G = random_sl2(rng, exact_backend)
    x, y = character_of(rho, words), character_of(rho.conjugate(G), words)
    if exact_backend:
        assert x.values == y.values
    else:
        assert x.max_dist(y) <= 1e-9 * max(1.0, max(abs(v) for v in x.values))


def test_character_of_empty_word():
    rho = Representation.free([Mat2(2, 3, 1, 2)])
    assert character_of(rho, [FreeWord()]).values == (QQi(2),)


def test_surface_relator_validated():
    A = Mat2(2, 3, 1, 2)
    with pytest.raises(ValueError):
        Representation.surface([A, A.inv(), A, Mat2(1, 1, 0, 1)])
    rho = Representation.surface([A, A, A, A])
    assert rho.relator_residual() == 0


# encoding and config ---------------------------------------------------------

@given(seeds, st.booleans())
def test_json_round_trip(seed, exact_backend):
    rng = random.Random(seed)
    rho = Representation.free([random_sl2(rng, exact_backend) for _ in range(3)])
    obj = json.loads(json.dumps(rep_to_json(rho)))
    back = rep_from_json(obj)
    assert back.images == rho.images
    w = random_word(rng, 3, 10)
    assert word_from_json(word_to_json(w)) == w


def test_exact_scalars_encode_as_strings():
    assert scalar_to_json(QQi("1/3", -2)) == ["1/3", "-2"]
    assert scalar_from_json(["1/3", "-2"]) == QQi("1/3", -2)
    assert scalar_from_json([0.5, 1.0]) == 0.5 + 1j
    M = Mat2(QQi(1, 1), 0, 0, QQi(1, 1).inverse())
    assert mat_from_json(mat_to_json(M)) == M


def test_config_file(tmp_path, monkeypatch):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"fiber_tol": 1e-7, "backend": "float"}))
    monkeypatch.setenv("REPVAR_CONFIG", str(p))
    cfg = load_config()
    assert cfg.fiber_tol == 1e-7 and cfg.backend == "float"
    p.write_text(json.dumps({"nonsense": 1}))
    with pytest.raises(ValueError):
        load_config()
    with pytest.raises(ValueError):
        Config(det_tol=0.0)


def test_polynomial_restriction():
    x, y = Poly.var(2, 0), Poly.var(2, 1)
    p = x * x + y * (1 / 2)
    assert p((3, 4)) == 11
    coeffs = p.restrict_to_line((0, 0), (1, 0))  # x = t, y = 0
    assert list(coeffs.real) == pytest.approx([0, 0, 1])
