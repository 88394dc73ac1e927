"""The S-good normal form A = [[a, 1], [-1, 0]], B = [[b, 0], [c, 1/b]], the
two-sheeted character cover and the relator map g with its Jacobians."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .config import DEFAULT_CONFIG
from .core.linalg import Mat2, eigenvectors, mat_commutator
from .core.representation import Character, Representation, character_of, evaluate_word
from .core.sampling import rand_scalar, random_sl2
from .core.scalars import QQi, exact, is_exact, is_zero, qqi_sqrt, sqrt
from .core.words import FreeWord, Presentation
from .irreducibility import find_irreducible_pair
from .trace_lab import theta_inverse


def _check_b(b):
    if is_exact(b):
        bad = (not b) or b == 1 or b == -1
    else:
        bad = min(abs(b), abs(b - 1), abs(b + 1)) <= 1e-14
    if bad:
        raise ValueError(f"b must avoid 0, 1, -1 (got {b})")


def sgood_matrices(a, b, c):
    one = QQi(1) if is_exact(b) else 1 + 0j
    return Mat2(a * one, one, -one, 0 * one), Mat2(b * one, 0 * one, c * one, one / b)


def sgood_trace_of_commutator(a, b, c):
    """``tr [A, B] = abc - ac/b + c^2 + b^2 + b^-2``."""
    if is_zero(b):
        raise ValueError("b must be nonzero")
    return a * b * c - a * c / b + c * c + b * b + 1 / (b * b)


@dataclass(frozen=True)
class SGoodCoords:
    a: object
    b: object
    c: object
    tail: tuple = field(default=())

    def __post_init__(self):
        _check_b(self.b)
        t = sgood_trace_of_commutator(self.a, self.b, self.c)
        if (is_exact(t) and t == 2) or (not is_exact(t) and abs(t - 2) < DEFAULT_CONFIG.theta_singular_tol):
            raise ValueError("tr[A, B] = 2 is excluded from the S-good locus")

    def matrices(self):
        return sgood_matrices(self.a, self.b, self.c)

    def representation(self) -> Representation:
        A, B = self.matrices()
        return Representation.free([A, B, *self.tail])

    @property
    def rank(self) -> int:
        return 2 + len(self.tail)


def random_sgood(rng: random.Random, tail: int = 0, exact_backend: bool = True) -> SGoodCoords:
    while True:
        a = rand_scalar(rng, exact_backend)
        b = rand_scalar(rng, exact_backend, nonzero=True)
        c = rand_scalar(rng, exact_backend)
        try:
            return SGoodCoords(a, b, c, tuple(random_sl2(rng, exact_backend) for _ in range(tail)))
        except ValueError:
            continue


# ---------------------------------------------------------------------------
# the character cover


def character_cover_f(a, b, c):
    """``(tr A, tr B, tr AB) = (a, b + 1/b, ab + c)``."""
    _check_b(b)
    return (a, b + 1 / b, a * b + c)


def lift_words(rank: int) -> list[FreeWord]:
    """Words whose traces determine an S-good representation of the given rank:
    ``a, b, ab`` and, per extra generator ``g``, ``g, ag, bg, abg``."""
    al, be = FreeWord.gen(0), FreeWord.gen(1)
    words = [al, be, al * be]
    for k in range(2, rank):
        g = FreeWord.gen(k)
        words += [g, al * g, be * g, al * be * g]
    return words


def _sheet_roots(s):
    """Both roots of ``b^2 - s b + 1 = 0``, sheet 1 first."""
    disc = s * s - 4
    if is_exact(s):
        r = qqi_sqrt(exact(disc))
        if r is None:
            r = sqrt(complex(disc))
            s = complex(s)
    else:
        r = sqrt(disc)
    b1, b2 = (s + r) / 2, (s - r) / 2
    n1, n2 = abs(complex(b1)), abs(complex(b2))
    if is_exact(b1):
        n1, n2 = b1.norm(), b2.norm()
    if n1 < n2 or (n1 == n2 and complex(b1).imag < 0):
        b1, b2 = b2, b1
    return b1, b2


def lift_character(x: Character, sheet: int = 1, tol: float | None = None) -> SGoodCoords:
    """Lift a character on :func:`lift_words` to S-good coordinates.

    ``sheet`` picks the root ``b`` of ``b + 1/b = x(beta)``: sheet 1 has
    ``|b| >= 1`` (ties: nonnegative imaginary part).
    """
    if sheet not in (1, 2):
        raise ValueError("sheet must be 1 or 2")
    tol = DEFAULT_CONFIG.relator_tol if tol is None else tol
    vals = x.as_dict()
    rank = 2 + max(0, max(w.max_generator() for w in x.words) - 1)
    try:
        data = [vals[w] for w in lift_words(rank)]
    except KeyError as exc:
        raise ValueError(f"character is missing the trace of {exc.args[0]}") from None
    ta, tb, tab = data[:3]
    if (is_exact(tb) and (tb == 2 or tb == -2)) or (not is_exact(tb) and min(abs(tb - 2), abs(tb + 2)) < 1e-12):
        raise ValueError("x(beta) = +-2 is excluded")
    b = _sheet_roots(tb)[sheet - 1]
    if not is_exact(b):
        ta, tab = complex(ta), complex(tab)
        data = [complex(v) for v in data]
    a = ta
    c = tab - a * b
    A, B = sgood_matrices(a, b, c)
    tail = []
    for k in range(rank - 2):
        t4 = data[3 + 4 * k: 7 + 4 * k]
        M = theta_inverse(A, B, t4)
        det = M.det()
        if (is_exact(det) and det != 1) or (not is_exact(det) and abs(det - 1) > tol):
            raise ValueError(f"inconsistent trace data for generator {k + 2}: det = {det}")
        tail.append(Mat2(M.a, M.b, M.c, M.d, check=False))
    return SGoodCoords(a, b, c, tuple(tail))


# ---------------------------------------------------------------------------
# conjugating into S-good form


@dataclass(frozen=True)
class BasisChange:
    """New free generators written as words in the old ones."""

    words: tuple

    def is_identity(self) -> bool:
        return all(w == FreeWord.gen(k) for k, w in enumerate(self.words))


def _is_sgood(A: Mat2, B: Mat2) -> bool:
    if not (A.is_exact and B.is_exact):
        return False
    if not (A.b == 1 and A.c == -1 and not A.d and not B.b):
        return False
    try:
        SGoodCoords(A.a, B.a, B.c)
    except ValueError:
        return False
    return True


def _trace_pm2(t) -> bool:
    if is_exact(t):
        return t == 2 or t == -2
    return min(abs(t - 2), abs(t + 2)) < 1e-9


def _choose_basis(rho: Representation):
    rank = rho.presentation.num_generators
    wit = find_irreducible_pair(rho.images)
    gens = [FreeWord.gen(k) for k in range(rank)]
    if wit.d_form == "direct":
        i, j = wit.c_word.letters[0][0], wit.d_word.letters[0][0]
        al, be = gens[i], gens[j]
        rest = [gens[k] for k in range(rank) if k not in (i, j)]
    else:
        z = wit.c_word.letters[0][0]
        x, y = wit.d_word.letters[0][0], wit.d_word.letters[1][0]
        al, be = gens[z], wit.d_word
        rest = [gens[k] for k in range(rank) if k not in (z, y)]
    A, B = evaluate_word(rho, al), evaluate_word(rho, be)
    if _trace_pm2(B.trace()):
        if not _trace_pm2(A.trace()):
            al, be = be, al
        else:
            for n in (1, -1, 2, -2, 3, -3):
                cand = be * al ** n
                if not _trace_pm2(evaluate_word(rho, cand).trace()):
                    be = cand
                    break
            else:
                raise ValueError("could not move tr(beta) off +-2")
    return [al, be, *rest]


def to_sgood(rho: Representation):
    """Conjugate an irreducible free-group representation into S-good form.

    Returns ``(coords, G, basis)``: ``G rho G^-1`` evaluated on the new basis
    is the S-good representation ``coords``.  ``G`` is in GL(2); only its
    class up to scalars matters for conjugation.
    """
    if rho.presentation.kind != "free" or rho.presentation.rank < 2:
        raise ValueError("a free representation of rank >= 2 is required")
    rank = rho.presentation.rank
    A0, B0 = rho.images[0], rho.images[1]
    if _is_sgood(A0, B0):
        coords = SGoodCoords(A0.a, B0.a, B0.c, tuple(rho.images[2:]))
        basis = BasisChange(tuple(FreeWord.gen(k) for k in range(rank)))
        return coords, Mat2.identity(True), basis

    basis_words = _choose_basis(rho)
    A, B = evaluate_word(rho, basis_words[0]), evaluate_word(rho, basis_words[1])
    vecs, ok = eigenvectors(B)
    if not ok:
        rho = rho.to_float()
        A, B = A.to_float(), B.to_float()
        vecs, _ = eigenvectors(B)
    # e2 has eigenvalue 1/b; sheet 1 wants |b| >= 1, so |eigenvalue| <= 1
    def key(item):
        lam = item[0]
        mag = lam.norm() if is_exact(lam) else abs(lam) ** 2
        return (mag, -complex(1 / lam).imag)
    lam, e2 = min(vecs, key=key)
    e1 = A.apply(e2)
    P = Mat2(e1[0], e2[0], e1[1], e2[1], sl2=False)
    G = P.inv()
    imgs = [G * evaluate_word(rho, w) * P for w in basis_words]
    imgs = [Mat2(m.a, m.b, m.c, m.d, check=False) for m in imgs]
    As, Bs = imgs[0], imgs[1]
    coords = SGoodCoords(As.a, Bs.a, Bs.c, tuple(imgs[2:]))
    return coords, G, BasisChange(tuple(basis_words))


# ---------------------------------------------------------------------------
# the relator map g(a, b, c) = [A, B] and its Jacobian


def relator_map_g(a, b, c) -> Mat2:
    _check_b(b)
    r1 = 1 / (b * b) - a * c / b + a * b * c + c * c
    r2 = a - a * b * b - b * c
    r3 = -b * c
    r4 = b * b
    return Mat2(r1, r2, r3, r4, check=False)


def g_jacobian_certificates(a, b, c):
    """Determinants of d(r1, r2, r3)/d(a, b, c) and d(r1, r2, r4)/d(a, b, c).

    In closed form these are ``2(1 - b^-2)(1 - abc + ab^3c + b^2c^2)``,
    which is ``-2 b^2 (b^-2 - 1) r1``, and ``-2(1 - b^2) r2``.
    """
    _check_b(b)
    first = 2 * (1 - 1 / (b * b)) * (1 - a * b * c + a * b ** 3 * c + b * b * c * c)
    second = 2 * (1 - b * b) * (-a + a * b * b + b * c)
    return first, second


def patch_formula_values(a, b, c) -> dict:
    """Both sides of the closed-form patch identities at ``(a, b, c)``.

    ``first_expanded`` is ``2(b^-2 - 1)(1 - abc + ab^3c + b^2c^2)`` and equals
    ``first_from_r1 = 2 b^2 (b^-2 - 1) r1``; it is the negative of the first
    Jacobian determinant.  ``second_expanded`` equals ``second_from_r2`` and
    the second determinant itself.
    """
    g = relator_map_g(a, b, c)
    ib2 = 1 / (b * b)
    return {
        "first_expanded": 2 * (ib2 - 1) * (1 - a * b * c + a * b ** 3 * c + b * b * c * c),
        "first_from_r1": 2 * b * b * (ib2 - 1) * g.a,
        "second_expanded": 2 * (1 - b * b) * (-a + a * b * b + b * c),
        "second_from_r2": -2 * (1 - b * b) * g.b,
    }


def finite_difference_jacobians(a, b, c, h: float = 1e-5):
    """Central-difference determinants for the two coordinate patches."""
    import numpy as np

    p0 = np.array([complex(a), complex(b), complex(c)])

    def entries(p):
        m = relator_map_g(*p)
        return np.array([m.a, m.b, m.c, m.d])

    J = np.zeros((4, 3), dtype=complex)
    for k in range(3):
        step = np.zeros(3, dtype=complex)
        step[k] = h
        J[:, k] = (entries(p0 + step) - entries(p0 - step)) / (2 * h)
    return complex(np.linalg.det(J[[0, 1, 2]])), complex(np.linalg.det(J[[0, 1, 3]]))
