"""Constructive irreducibility detection: a pair of words whose commutator
has trace different from 2."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .config import DEFAULT_CONFIG
from .core.linalg import INFINITY, Mat2, fixed_points, mat_commutator
from .core.representation import Representation, evaluate_word
from .core.scalars import is_exact
from .core.words import FreeWord, alpha, beta


class ReducibleError(ValueError):
    """Raised when the input has a common fixed point on the Riemann sphere."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


@dataclass(frozen=True)
class IrreducibilityWitness:
    c_word: FreeWord
    d_word: FreeWord
    trace_value: object
    d_form: str  # "direct" or "aba"


def order_two_test(A: Mat2, tol: float | None = None) -> bool:
    """Whether ``A`` has order two in PSL(2, C), i.e. trace zero."""
    t = A.trace()
    if is_exact(t):
        return not t
    return abs(t) <= (DEFAULT_CONFIG.fixpoint_tol if tol is None else tol)


def _trace_not_two(t, tol: float) -> bool:
    if is_exact(t):
        return t != 2
    return abs(t - 2) > tol


def _same(z, w, tol: float) -> bool:
    if z == INFINITY or w == INFINITY:
        return z == w
    if is_exact(z) and is_exact(w):
        return z == w
    return abs(complex(z) - complex(w)) <= tol


def _common_point(point_sets, tol: float):
    """A point lying in every set, or ``None``."""
    for z in point_sets[0]:
        if all(any(_same(z, w, tol) for w in s) for s in point_sets[1:]):
            return z
    return None


def find_irreducible_pair(gens: Sequence[Mat2], tol: float | None = None) -> IrreducibilityWitness:
    """Find generator words ``C``, ``D`` with ``tr [C, D] != 2``.

    Central generators are ignored.  A direct pair is searched first in input
    order.  Failing that, the fixed-point pairs of the generators form the
    three-class configuration ``{x, y}, {y, z}, {z, x}`` and ``D = A B A``
    works for a cyclic ordering with ``tr(AB) != 0``.
    """
    if not gens:
        raise ValueError("empty generating set")
    tol = DEFAULT_CONFIG.cluster_tol if tol is None else tol
    exact_backend = all(g.is_exact for g in gens)
    ztol = 0.0 if exact_backend else tol
    idx = [k for k, g in enumerate(gens) if not g.is_central(ztol)]
    if not idx:
        raise ReducibleError("every generator is central", None)

    for n, i in enumerate(idx):
        for j in idx[n + 1:]:
            t = mat_commutator(gens[i], gens[j]).trace()
            if _trace_not_two(t, tol):
                return IrreducibilityWitness(FreeWord.gen(i), FreeWord.gen(j), t, "direct")

    fps = {k: fixed_points(gens[k]).points for k in idx}
    common = _common_point([fps[k] for k in idx], tol)
    if common is not None:
        raise ReducibleError(f"common fixed point {common}", common)

    # Every pair shares a fixed point but no point is shared by all: the
    # classes are exactly three pairs {x, y}, {y, z}, {z, x}.
    classes: list[tuple] = []
    reps: list[int] = []
    for k in idx:
        pts = fps[k]
        if not any(len(pts) == len(c) and all(any(_same(p, q, tol) for q in c) for p in pts) for c in classes):
            classes.append(pts)
            reps.append(k)
    if len(reps) != 3:
        raise ReducibleError("fixed-point configuration is not the three-class case", None)
    a, b, c = reps
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        A, B, C = gens[x], gens[y], gens[z]
        if order_two_test(A * B, tol):
            continue
        D = A * B * A
        t = mat_commutator(C, D).trace()
        if _trace_not_two(t, tol):
            d_word = FreeWord.gen(x) * FreeWord.gen(y) * FreeWord.gen(x)
            return IrreducibilityWitness(FreeWord.gen(z), d_word, t, "aba")
    raise ReducibleError("no witness found in the three-class configuration", None)


def find_irreducible_punctured_torus(rho: Representation, tol: float | None = None):
    """Words ``(gamma, delta)`` with ``tr rho[gamma, delta] != 2`` and that trace.

    The handle pairs ``(alpha_i, beta_i)`` are tried first since they meet
    once.  Otherwise the group-level detector runs on all generator images;
    its ``aba`` words are taken literally in the standard generators.
    """
    if rho.presentation.kind != "surface":
        raise ValueError("a surface representation is required")
    tol = DEFAULT_CONFIG.cluster_tol if tol is None else tol
    for i in range(1, rho.presentation.genus + 1):
        g, d = alpha(i), beta(i)
        t = mat_commutator(evaluate_word(rho, g), evaluate_word(rho, d)).trace()
        if _trace_not_two(t, tol):
            return (g, d), t
    wit = find_irreducible_pair(rho.images, tol)
    return (wit.c_word, wit.d_word), wit.trace_value
