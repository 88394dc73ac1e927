"""Commutator-trace identities, the reducibility criterion, the theta map and
the kernel witness for two-generator subgroups."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .config import DEFAULT_CONFIG
from .core.linalg import Mat2, eigenvectors, mat_commutator, parallel, solve_linear
from .core.representation import Representation, evaluate_word
from .core.sampling import random_diagonal, random_sl2, random_triangular_pair, rand_scalar
from .core.scalars import QQi, is_exact, is_zero
from .core.words import FreeWord, commutator


def commutator_trace_diagonal_form(x, b, c):
    """Trace of ``[diag(x, 1/x), [[a, b], [c, d]]]``, namely ``2 - bc(x - 1/x)^2``."""
    if is_zero(x):
        raise ValueError("x must be nonzero")
    y = x - 1 / x
    return 2 - b * c * y * y


def commutator_trace_parabolic_form(x, c):
    """Trace of ``[[[1, x], [0, 1]], [[a, b], [c, d]]]``, namely ``2 + c^2 x^2``."""
    return 2 + c * c * x * x


@dataclass(frozen=True)
class ReducibilityReport:
    reducible: bool
    invariant_line: tuple | None
    trace_of_commutator: object
    line_exact: bool = True


def _is_two(t, tol: float) -> bool:
    if is_exact(t):
        return t == 2
    return abs(t - 2) <= tol


def _common_line(A: Mat2, B: Mat2, tol: float):
    """A common eigenvector of ``A`` and ``B``, or ``None``."""
    ex = A.is_exact and B.is_exact
    ptol = 0.0 if ex else tol
    if A.is_central(ptol) and B.is_central(ptol):
        one, zero = (QQi(1), QQi(0)) if ex else (1 + 0j, 0j)
        return (one, zero), True
    first, other = (B, A) if A.is_central(ptol) else (A, B)
    vecs, vec_exact = eigenvectors(first)
    if ex and not vec_exact:
        # Eigenvalues outside Q(i).  A non-commuting reducible pair has a
        # rational invariant line: the fixed line of the parabolic [A, B].
        K = mat_commutator(first, other)
        if K.is_identity():
            return vecs[0][1], False
        if K.trace() != 2:
            return None, True
        v = eigenvectors(K)[0][0][1]
        if parallel(first.apply(v), v) and parallel(other.apply(v), v):
            return v, True
        return None, True
    for _, v in vecs:
        if parallel(other.apply(v), v, ptol):
            return v, vec_exact
    return None, True


def reducibility_report(A: Mat2, B: Mat2, tol: float | None = None) -> ReducibilityReport:
    """Decide whether ``A`` and ``B`` share an eigenvector.

    Exact inputs are decided exactly; floats use ``tol`` (relative) for the
    parallelism test.
    """
    tol = DEFAULT_CONFIG.det_tol if tol is None else tol
    t = mat_commutator(A, B).trace()
    line, line_exact = _common_line(A, B, tol)
    return ReducibilityReport(line is not None, line, t, line_exact)


# ---------------------------------------------------------------------------
# the theta map  M -> (tr M, tr AM, tr BM, tr ABM)


def _check_nonsingular(A: Mat2, B: Mat2):
    t = mat_commutator(A, B).trace()
    if is_exact(t):
        if t == 2:
            raise ValueError("theta map is singular: tr[A,B] = 2")
    elif abs(t - 2) < DEFAULT_CONFIG.theta_singular_tol:
        raise ValueError(f"theta map is singular: tr[A,B] = {t}")


def _theta_rows(A: Mat2, B: Mat2):
    # tr(X M) = X11 m11 + X21 m12 + X12 m21 + X22 m22
    one = QQi(1) if A.is_exact else 1 + 0j
    rows = []
    for X in (Mat2.identity(A.is_exact), A, B, A * B):
        rows.append([X.a * one, X.c * one, X.b * one, X.d * one])
    return rows


def theta_matrix(A: Mat2, B: Mat2):
    """The 4x4 matrix of the theta map in the basis E11, E12, E21, E22."""
    return _theta_rows(A, B)


def theta_map(A: Mat2, B: Mat2, M: Mat2, check: bool = True):
    if check:
        _check_nonsingular(A, B)
    return (M.trace(), (A * M).trace(), (B * M).trace(), (A * B * M).trace())


def theta_inverse(A: Mat2, B: Mat2, t) -> Mat2:
    """The unique matrix ``M`` with ``theta_map(A, B, M) == t``."""
    _check_nonsingular(A, B)
    rows = _theta_rows(A, B)
    if A.is_exact and B.is_exact:
        from .core.scalars import exact
        rhs = [exact(x) for x in t]
    else:
        rhs = [complex(x) for x in t]
        rows = [[complex(x) for x in r] for r in rows]
    m11, m12, m21, m22 = solve_linear(rows, rhs)
    return Mat2(m11, m12, m21, m22, sl2=False)


# ---------------------------------------------------------------------------
# kernel witness


def kernel_witness(a_index: int = 0, b_index: int = 1) -> FreeWord:
    """``[[a, a^b], [a^(b^2), a^(b^3)]]`` with ``x^y = y^-1 x y``.

    It dies under every representation that is triangular on ``<a, b>``:
    the first-level commutators land in the abelian unipotent subgroup.
    """
    a = FreeWord.gen(a_index)
    b = FreeWord.gen(b_index)
    left = commutator(a, a.conj(b))
    right = commutator(a.conj(b ** 2), a.conj(b ** 3))
    return commutator(left, right)


# ---------------------------------------------------------------------------
# randomized identity checks


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    passed: bool
    cases: int
    max_residual: float


def _resid(x, y) -> float:
    return abs(complex(x) - complex(y))


def identity_checks(seed: int = 0, n_exact: int = 500, n_float: int = 500) -> list[IdentityCheck]:
    """Randomized checks of the commutator-trace identities, the theta
    round trip and the kernel witness."""
    rng = random.Random(seed)
    out = []

    for form in ("diagonal", "parabolic"):
        for exact_backend, n in ((True, n_exact), (False, n_float)):
            worst, ok = 0.0, True
            for _ in range(n):
                B = random_sl2(rng, exact_backend)
                if form == "diagonal":
                    x = random_diagonal(rng, exact_backend).a
                    A = Mat2.diag(x)
                    formula = commutator_trace_diagonal_form(x, B.b, B.c)
                else:
                    x = rand_scalar(rng, exact_backend)
                    A = Mat2(1, x, 0, 1) if exact_backend else Mat2(1 + 0j, x, 0j, 1 + 0j)
                    formula = commutator_trace_parabolic_form(x, B.c)
                direct = mat_commutator(A, B).trace()
                if exact_backend:
                    ok &= direct == formula
                else:
                    r = _resid(direct, formula) / max(1.0, abs(direct))
                    worst = max(worst, r)
                    ok &= r <= 1e-9
            label = "exact" if exact_backend else "float"
            out.append(IdentityCheck(f"commutator trace, {form} form ({label})", bool(ok), n, worst))

    for exact_backend in (True, False):
        worst, ok, n = 0.0, True, 100
        for _ in range(n):
            while True:
                A, B = random_sl2(rng, exact_backend), random_sl2(rng, exact_backend)
                t = mat_commutator(A, B).trace()
                if abs(complex(t) - 2) > 1e-3:
                    break
            M = random_sl2(rng, exact_backend)
            back = theta_inverse(A, B, theta_map(A, B, M))
            if exact_backend:
                ok &= back == M
            else:
                worst = max(worst, back.max_dist(M))
                ok &= back.max_dist(M) <= 1e-9
        label = "exact" if exact_backend else "float"
        out.append(IdentityCheck(f"theta round trip ({label})", bool(ok), n, worst))

    w = kernel_witness()
    ok, n = True, 100
    for _ in range(n):
        A, B, _g = random_triangular_pair(rng, True)
        rho = Representation.free([A, B])
        ok &= mat_commutator(A, B).trace() == 2 and evaluate_word(rho, w).is_identity()
    out.append(IdentityCheck("kernel witness on trace-2 pairs", bool(ok), n, 0.0))
    return out
