"""Genus-g surface representations that are triangular and nonabelian on the
first handle: construction, certification and the dimension counts."""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Sequence

from .config import DEFAULT_CONFIG
from .core.linalg import Mat2, eigenvectors, mat_commutator
from .core.representation import Representation, evaluate_word
from .core.scalars import QQi, is_exact, random_qqi
from .core.words import FreeWord, Presentation, alpha, beta, boundary_word, commutator, handle_commutator
from .trace_lab import kernel_witness, reducibility_report


class BuildError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class StandardCurves:
    C: FreeWord
    C_prime: FreeWord
    C_double_prime: FreeWord
    beta1: FreeWord
    comm2: FreeWord


def standard_curves(genus: int) -> StandardCurves:
    """``C = [a1, b1]``, ``C' = [a_g, b_g]``, ``C'' = [a1, b1][a2, b2]``, ``b1``
    and ``[a2, b2]`` for the decomposition into a first handle, a middle
    block of ``genus - 2`` handles and a last handle."""
    if genus < 3:
        raise ValueError("the curve decomposition needs genus >= 3")
    return StandardCurves(
        C=handle_commutator(1),
        C_prime=handle_commutator(genus),
        C_double_prime=boundary_word([1, 2]),
        beta1=beta(1),
        comm2=handle_commutator(2),
    )


# ---------------------------------------------------------------------------
# construction

# Gaussian primes of pairwise distinct prime norms, none associate to its
# conjugate; powers of two of them multiply to a real number only trivially.
_PRIMES = [QQi(2, 1), QQi(3, 2), QQi(4, 1), QQi(5, 2), QQi(6, 1), QQi(5, 4), QQi(7, 2), QQi(5, 6)]


def _prime_pair(rng: random.Random):
    lam, mu = rng.sample(_PRIMES, 2)
    if rng.random() < 0.5:
        lam = lam.conjugate()
    if rng.random() < 0.5:
        mu = mu.conjugate()
    return lam / rng.choice((1, 2, 3)), mu / rng.choice((1, 2, 3))


def _random_sl2(rng: random.Random, nonreal: bool = False) -> Mat2:
    while True:
        a = random_qqi(rng, nonzero=True)
        b, c = random_qqi(rng), random_qqi(rng)
        if nonreal and (a.is_real() or b.is_real() or c.is_real()):
            continue
        m = Mat2(a, b, c, (1 + b * c) / a)
        if nonreal and m.trace().is_real():
            continue
        return m


def _vnorm(v) -> float:
    return math.sqrt(sum(abs(complex(x)) ** 2 for x in v))


def solve_last_pair(M: Mat2, lam: QQi):
    """Exact ``A, B`` over Q(i) with ``[A, B] = M``, ``A`` having eigenvalues ``lam, 1/lam``.

    Conjugating ``A = G diag(lam, 1/lam) G^-1`` by a lower unipotent ``G``
    makes ``A^-1 M`` have the trace of ``A^-1``; ``B`` then carries the
    eigenbasis of ``A^-1`` to that of ``A^-1 M``.  Requires ``M12 != 0``.
    """
    m11, m12, m21, m22 = M.entries
    if not m12:
        raise BuildError("upper-right entry of the target vanishes")
    l2 = lam * lam
    if l2 == 1:
        raise BuildError("lam must not be +-1")
    x = (l2 * (1 - m22) - (m11 - 1)) / (m12 * (1 - l2))
    zero, one = QQi(0), QQi(1)
    G = Mat2(one, zero, x, one)
    A = G * Mat2.diag(lam) * G.inv()
    Ai = A.inv()
    Y = Ai * M
    vecs, ok = eigenvectors(Y)
    if not ok or len(vecs) != 2:
        raise BuildError("target eigenvectors are not rational")
    by_val = {v: vec for v, vec in vecs}
    h1, h2 = by_val[1 / lam], by_val[lam]
    H = Mat2(h1[0], h2[0], h1[1], h2[1], sl2=False)
    c = G.det() / H.det()
    # B = H diag(s, c/s) G^-1 works for every s; balance the two rank-one parts
    Gi = G.inv()
    n1 = _vnorm(h1) * _vnorm((Gi.a, Gi.b))
    n2 = _vnorm(h2) * _vnorm((Gi.c, Gi.d))
    r = Fraction(math.sqrt(abs(complex(c)) * n2 / n1)).limit_denominator(64) if n1 and n2 else Fraction(1)
    if r == 0:
        r = Fraction(1, 64)
    best = None
    for sc in (QQi(r), QQi(0, r)):
        Bm = H * Mat2(sc, zero, zero, c / sc, sl2=False) * Gi
        size = Bm.to_float().norm()
        if best is None or size < best[0]:
            best = (size, Bm)
    B = Mat2(*best[1].entries)
    if mat_commutator(A, B) != M:
        raise BuildError("last pair does not realise the target")
    return A, B


def _short_real_trace(images, max_len: int) -> bool:
    # words inside <a1, b1> have trace in Q(lam, mu) and may be real legitimately
    mats = []
    for M in images:
        mats += [M, M.inv()]
    n = len(mats)
    level = [((k,), mats[k]) for k in range(n)]
    for length in range(1, max_len + 1):
        for key, M in level:
            if any(k >= 4 for k in key):
                t = M.trace()
                if t.is_real() and t != 2:
                    return True
        if length == max_len:
            break
        level = [(key + (k,), M * mats[k]) for key, M in level for k in range(n) if k != key[-1] ^ 1]
    return False


def build_representation(genus: int, seed: int, max_retries: int = 50, screen_len: int = 2) -> Representation:
    """An exact representation with ``tr rho[a1, b1] = 2`` satisfying W-1..W-5.

    The first handle is upper triangular and nonabelian with diagonal entries
    built from Gaussian primes, ``rho(a2)`` moves infinity, ``[a2, b2]`` and the
    last commutator avoid trace +-2, and the last handle solves the relator.
    Candidates with a real trace on a word of length ``<= screen_len``
    outside the first handle are discarded.
    """
    if genus < 4:
        raise ValueError("build_representation needs genus >= 4")
    rng = random.Random(seed)
    for _ in range(max_retries):
        lam, mu = _prime_pair(rng)
        d, e = random_qqi(rng, nonzero=True), random_qqi(rng, nonzero=True)
        if not (e * mu * (lam * lam - 1) - d * lam * (mu * mu - 1)):
            continue
        A1 = Mat2(lam, d, QQi(0), 1 / lam)
        B1 = Mat2(mu, e, QQi(0), 1 / mu)
        A2 = _random_sl2(rng, nonreal=True)
        if not A2.c:
            continue
        B2 = _random_sl2(rng, nonreal=True)
        t2 = mat_commutator(A2, B2).trace()
        if t2 == 2 or t2 == -2:
            continue
        pairs = [(A1, B1), (A2, B2)]
        for _i in range(3, genus):
            pairs.append((_random_sl2(rng, nonreal=True), _random_sl2(rng, nonreal=True)))
        P = Mat2.identity()
        for A, B in pairs:
            P = P * mat_commutator(A, B)
        M = P.inv()
        tm = M.trace()
        if tm == 2 or tm == -2 or not M.b:
            continue
        # keep the best-scaled solution among the candidate eigenvalues
        best = None
        for q in _PRIMES:
            for lam_g in (q, q.conjugate(), q / 2, q.conjugate() / 2):
                try:
                    Ag, Bg = solve_last_pair(M, lam_g)
                except BuildError:
                    continue
                size = max(Ag.to_float().norm(), Bg.to_float().norm())
                if best is None or size < best[0]:
                    best = (size, Ag, Bg)
        if best is None:
            continue
        pairs.append(best[1:])
        images = [m for pr in pairs for m in pr]
        if _short_real_trace(images, screen_len):
            continue
        return Representation(Presentation.surface(genus), images)
    raise BuildError(f"no admissible representation after {max_retries} attempts (seed {seed})")


# ---------------------------------------------------------------------------
# catalog of simple closed curves


def _moves(genus: int):
    """Elementary mapping-class moves as generator substitutions."""
    out = []
    for i in range(1, genus + 1):
        a, b = 2 * (i - 1), 2 * (i - 1) + 1
        for s in (1, -1):
            out.append({a: alpha(i) * beta(i) ** s})
            out.append({b: beta(i) * alpha(i) ** s})
    for i in range(1, genus):
        X = handle_commutator(i)
        a, b, a2, b2 = 2 * (i - 1), 2 * (i - 1) + 1, 2 * i, 2 * i + 1
        out.append({a: X * alpha(i + 1) * X.inverse(), b: X * beta(i + 1) * X.inverse(),
                    a2: alpha(i), b2: beta(i)})
    return out


def scc_default_catalog(genus: int, depth: int = 2) -> list[FreeWord]:
    """A deterministic finite list of words represented by essential simple
    closed curves.

    Contains the generators, ``a_i b_i^(+-1)``, the boundary words of proper
    contiguous blocks of handles, and the images of the generators under up
    to ``depth`` Dehn-twist and handle-swap moves.
    """
    if genus < 2:
        raise ValueError("genus must be >= 2")
    words: list[FreeWord] = []
    seen = set()

    def add(w):
        if w and w not in seen:
            seen.add(w)
            words.append(w)

    gens = [FreeWord.gen(k) for k in range(2 * genus)]
    for w in gens:
        add(w)
    for i in range(1, genus + 1):
        add(alpha(i) * beta(i))
        add(alpha(i) * beta(i).inverse())
    for i in range(1, genus + 1):
        for j in range(i, genus + 1):
            if (i, j) != (1, genus):
                add(boundary_word(range(i, j + 1)))
    moves = _moves(genus)
    level = list(gens)
    for _ in range(depth):
        nxt = []
        for w in level:
            for mv in moves:
                img = w.substitute(mv)
                if img not in seen:
                    nxt.append(img)
                    add(img)
        level = nxt
    return words


# ---------------------------------------------------------------------------
# certification


@dataclass
class Condition:
    value: object
    satisfied: bool
    exactness: str


@dataclass
class WConditions:
    w1: Condition
    w2: Condition
    w3: Condition
    w4: Condition
    w5: Condition

    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in (self.w1, self.w2, self.w3, self.w4, self.w5))

    def items(self):
        return [("w1", self.w1), ("w2", self.w2), ("w3", self.w3), ("w4", self.w4), ("w5", self.w5)]


@dataclass
class Certificate:
    rep: Representation
    w: WConditions | None
    relator_residual: float
    kernel_witness_word: FreeWord
    witness_residual: float
    scc_checks: list
    real_trace_samples: list
    seed: int
    catalog_size: int
    max_word_len: int
    exact: bool
    c_image_trace: object = None
    c_image_is_identity: bool | None = None
    handle_one_reducible: bool | None = None
    handle_one_nonabelian: bool | None = None
    failures: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


def _eq(t, v, tol):
    if is_exact(t):
        return t == v
    return abs(t - v) <= tol


def _is_real(t, tol):
    if is_exact(t):
        return t.is_real()
    return abs(complex(t).imag) <= tol


def evaluate_w_conditions(rho: Representation, tol: float | None = None) -> WConditions:
    tol = DEFAULT_CONFIG.relator_tol if tol is None else tol
    curves = standard_curves(rho.presentation.genus)
    ex = "exact" if rho.is_exact else "tolerance"

    def tr(w):
        return evaluate_word(rho, w).trace()

    x_c = tr(curves.C)
    x_b1 = tr(curves.beta1)
    x_c2 = tr(curves.comm2)
    x_cm = tr(commutator(curves.C, alpha(2)))
    x_cp = tr(curves.C_prime)

    def not_pm2(t):
        return not (_eq(t, 2, tol) or _eq(t, -2, tol))

    return WConditions(
        Condition(x_c, _eq(x_c, 2, tol), ex),
        Condition(x_b1, not_pm2(x_b1), ex),
        Condition(x_c2, not_pm2(x_c2), ex),
        Condition(x_cm, not _eq(x_cm, 2, tol), ex),
        Condition(x_cp, not_pm2(x_cp), ex),
    )


def random_reduced_word(rng: random.Random, n_gens: int, max_len: int) -> FreeWord:
    length = rng.randint(1, max_len)
    letters = []
    while len(letters) < length:
        g, e = rng.randrange(n_gens), rng.choice((1, -1))
        if letters and letters[-1] == (g, -e):
            continue
        letters.append((g, e))
    return FreeWord(letters)


def certify(rho: Representation, scc_catalog: Sequence[FreeWord] | None = None, n_real_samples: int = 500,
            max_word_len: int = 8, seed: int = 0, catalog_depth: int = 2, tol: float | None = None) -> Certificate:
    """Check W-1..W-5, the kernel witness, a simple-closed-curve catalog and
    sampled real traces.  Failures are recorded, not raised.

    A sampled word is allowed a real trace only when that trace is exactly 2.
    """
    start = time.perf_counter()
    tol = DEFAULT_CONFIG.relator_tol if tol is None else tol
    pres = rho.presentation
    ex = rho.is_exact
    failures = []
    witness = kernel_witness(0, 1)
    if pres.kind != "surface" or pres.genus < 3:
        return Certificate(rho, None, float("nan"), witness, float("nan"), [], [], seed, 0, max_word_len, ex,
                           failures=["certification needs a surface representation of genus >= 3"])
    genus = pres.genus
    ident = Mat2.identity(ex)

    rel = rho.relator_residual()
    if (ex and rel != 0) or rel > tol:
        failures.append(f"relator residual {rel:.3e}")

    w = evaluate_w_conditions(rho, tol)
    for name, cond in w.items():
        if not cond.satisfied:
            failures.append(f"{name.upper()} fails (value {cond.value})")

    W = evaluate_word(rho, witness)
    wit_res = 0.0 if (ex and W.is_identity()) else W.max_dist(ident)
    if (ex and not W.is_identity()) or wit_res > tol:
        failures.append(f"kernel witness image is not I (residual {wit_res:.3e})")

    C_img = evaluate_word(rho, handle_commutator(1))
    c_is_id = C_img.is_identity(0.0 if ex else tol)
    if c_is_id:
        failures.append("rho(C) is the identity")
    A1, B1 = rho.images[0], rho.images[1]
    red = reducibility_report(A1, B1).reducible
    nonab = not mat_commutator(A1, B1).is_identity(0.0 if ex else tol)

    catalog = list(scc_catalog) if scc_catalog is not None else scc_default_catalog(genus, catalog_depth)
    scc = []
    for word in catalog:
        img = evaluate_word(rho, word)
        killed = img.is_central(0.0 if ex else tol)
        scc.append((word, img.trace(), killed))
        if killed:
            failures.append(f"catalog word {word.to_string(pres.names)} maps to +-I")

    rng = random.Random(seed)
    samples = []
    for _ in range(n_real_samples):
        word = random_reduced_word(rng, pres.num_generators, max_word_len)
        t = evaluate_word(rho, word).trace()
        real = _is_real(t, tol)
        allowed = (not real) or _eq(t, 2, tol)
        samples.append((word, t, real, allowed))
        if not allowed:
            failures.append(f"sampled word {word.to_string(pres.names)} has real trace {t}")

    return Certificate(rho, w, float(rel), witness, float(wit_res), scc, samples, seed, len(catalog),
                       max_word_len, ex, C_img.trace(), c_is_id, red, nonab, failures,
                       time.perf_counter() - start)


# ---------------------------------------------------------------------------
# dimension counts

QUERIES = ("whole", "kill_nonseparating", "kill_separating", "Z_locus")


def _check_query(genus: int, query: str, g1):
    if query not in QUERIES:
        raise ValueError(f"unknown query {query!r}")
    if genus < 2:
        raise ValueError("genus must be >= 2")
    if query.startswith("kill") and genus < 3:
        raise ValueError("kill queries need genus >= 3")
    if query == "kill_separating" and (g1 is None or not 1 <= g1 <= genus - 1):
        raise ValueError("kill_separating needs 1 <= g1 <= genus - 1")


def dimension_calculator(genus: int, query: str, g1: int | None = None) -> int:
    """Complex dimension of the character variety of a closed surface group,
    or of the locus killing one simple closed curve, or of ``x(C) = 2``."""
    _check_query(genus, query, g1)
    g = genus
    if query == "whole":
        return 6 * g - 6
    if query == "Z_locus":
        return 6 * g - 7
    if query == "kill_nonseparating":
        return 6 * g - 9
    return 6 * g - 8 if min(g1, g - g1) == 1 else 6 * g - 9


def rep_variety_dim(kind: str, genus: int | None = None) -> int:
    """Dimensions of the representation varieties used by the product formula."""
    if kind == "surface":
        return 6 * genus - 3
    if kind == "Z":
        return 3
    if kind == "Z2":
        return 4
    raise ValueError(kind)


def product_formula(dim_a: int, dim_b: int) -> int:
    """Dimension of the character variety of a free product of two factors."""
    return dim_a + dim_b - 3


def dimension_by_product_formula(genus: int, query: str, g1: int | None = None) -> int:
    """The same counts recomputed from representation-variety dimensions."""
    _check_query(genus, query, g1)
    g = genus
    whole = rep_variety_dim("surface", g) - 3
    if query == "whole":
        return whole
    if query == "Z_locus":
        return whole - 1
    if query == "kill_nonseparating":
        return product_formula(rep_variety_dim("surface", g - 1), rep_variety_dim("Z"))
    g2 = g - g1
    if min(g1, g2) == 1:
        return product_formula(rep_variety_dim("Z2"), rep_variety_dim("surface", max(g1, g2)))
    return product_formula(rep_variety_dim("surface", g1), rep_variety_dim("surface", g2))


def random_float_representation(genus: int, seed: int, spread: float = 0.3) -> Representation:
    """A well-scaled float surface representation: exponentials of random
    sl2 elements on the first ``genus - 1`` handles and a random point of the
    commutator fiber on the last one."""
    import cmath

    import numpy as np

    from .deform import _boundary_newton
    from .fibers import random_fiber_point

    if genus < 2:
        raise ValueError("genus must be >= 2")
    rng = random.Random(seed)

    def expm_sl2(X):
        # exp(X) = cosh(r) I + sinh(r)/r X with r^2 = -det X
        r = cmath.sqrt(-np.linalg.det(X))
        sh = 1.0 if abs(r) < 1e-12 else cmath.sinh(r) / r
        return cmath.cosh(r) * np.eye(2) + sh * X

    def rand_sl2():
        h, e, f = (complex(rng.gauss(0, spread), rng.gauss(0, spread)) for _ in range(3))
        return expm_sl2(np.array([[h, e], [f, -h]]))

    while True:
        mats = [rand_sl2() for _ in range(2 * (genus - 1))]
        P = np.eye(2, dtype=complex)
        for k in range(0, len(mats), 2):
            A, B = mats[k], mats[k + 1]
            P = P @ A @ B @ np.linalg.inv(A) @ np.linalg.inv(B)
        M = Mat2.from_numpy(np.linalg.inv(P))
        if min(abs(M.trace() - 2), abs(M.trace() + 2)) < 0.1:
            continue
        fp = random_fiber_point(rng, M, scale=0.5)
        # polish the last handle against the rounded product
        mats = [X / cmath.sqrt(np.linalg.det(X)) for X in mats]
        P = np.eye(2, dtype=complex)
        for k in range(0, len(mats), 2):
            P = P @ mats[k] @ mats[k + 1] @ np.linalg.inv(mats[k]) @ np.linalg.inv(mats[k + 1])
        (A, B), = _boundary_newton([(fp.A.to_numpy(), fp.B.to_numpy())], np.linalg.inv(P), np.inf, 1e-15)[0]
        images = [Mat2.from_numpy(X) for X in mats + [A, B]]
        return Representation(Presentation.surface(genus), images)
