"""Explicit deformations of abelian and reducible representations of punctured
surfaces, and extension of boundary deformations over a complementary
subsurface."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_CONFIG
from .core.linalg import Mat2, mat_commutator
from .core.representation import Representation
from .core.scalars import QQi, exact, is_exact, is_zero, qqi_sqrt, sqrt
from .fibers import MatrixPath, _comm, _comm_jacobian, _inv2, _solve_tangent, _step


class DeformationError(RuntimeError):
    pass


def _nz(x, what: str):
    if is_zero(x, 0.0 if is_exact(x) else 1e-300):
        raise ZeroDivisionError(f"vanishing denominator: {what}")


def _small(x, bound: float, what: str):
    if abs(complex(x)) > bound:
        raise ValueError(f"{what} = {x} exceeds the smallness bound {bound}")


def _one_like(x):
    return QQi(1) if is_exact(x) else 1 + 0j


def _unify(*xs):
    if all(is_exact(x) for x in xs):
        return [exact(x) for x in xs]
    return [complex(x) for x in xs]


@dataclass(frozen=True)
class BoundaryTarget:
    matrix: Mat2

    @property
    def smallness(self) -> float:
        return self.matrix.max_dist(Mat2.identity(False))


# ---------------------------------------------------------------------------
# diagonal (abelian, loxodromic) case


def abelian_diagonal_commutator(p, q, u, v, bound: float | None = None):
    """Perturb ``diag(p, 1/p)``, ``diag(q, 1/q)`` to ``A', B'`` with
    ``[A', B'] = [[1, u], [v, 1 + uv]]``.  Returns ``(A', B', [A', B'])``."""
    bound = DEFAULT_CONFIG.smallness_bound if bound is None else bound
    p, q, u, v = _unify(p, q, u, v)
    for name, x in (("p", p), ("q", q)):
        if is_zero(x) or x == 1 or x == -1:
            raise ValueError(f"{name} must avoid 0, 1, -1")
    _small(u, bound, "u")
    _small(v, bound, "v")
    p2 = p * p
    k = 1 - p2 + p2 * q * q - p2 * u * v
    den1 = (p2 - 1) * q
    den2 = 1 - p2 - p2 * u * v
    _nz(den2, "1 - p^2 - p^2 uv")
    A = Mat2(p, p * u, 0 * p, 1 / p)
    B = Mat2(q, u * k / den1, p2 * q * v / den2, 1 / q - p2 * u * v * k / (den1 * (-den2)))
    return A, B, mat_commutator(A, B)


def near_identity_product(x, y, z, sqrt_x=None):
    """``C, D`` of commutator form with ``CD = [[1 + x, y], [z, (1 + yz)/(1 + x)]]``.

    ``sqrt_x`` is the chosen branch of the square root of ``x``.
    """
    x, y, z = _unify(x, y, z)
    if x == -1:
        raise ValueError("x = -1 is excluded")
    if sqrt_x is None:
        sqrt_x = sqrt(x) if not is_exact(x) or qqi_sqrt(x) is not None else sqrt(complex(x))
        if not is_exact(sqrt_x):
            x, y, z = complex(x), complex(y), complex(z)
    else:
        if is_exact(sqrt_x) and is_exact(x):
            sqrt_x = exact(sqrt_x)
            if sqrt_x * sqrt_x != x:
                raise ValueError("sqrt_x^2 != x")
        else:
            x, y, z, sqrt_x = complex(x), complex(y), complex(z), complex(sqrt_x)
            if abs(sqrt_x * sqrt_x - x) > 1e-12 * max(1.0, abs(x)):
                raise ValueError("sqrt_x^2 != x")
    r, one = sqrt_x, _one_like(sqrt_x)
    C = Mat2(one, r, (z - r) / (1 + x), (1 + z * r) / (1 + x))
    D = Mat2(one, (y - r) / (1 + x), r, (1 + y * r) / (1 + x))
    return C, D, C * D


# ---------------------------------------------------------------------------
# central case


def central_case_commutator(a, u, v, sign: int = 1, sign_b: int | None = None,
                            ratio: float | None = None, bound: float | None = None):
    """Perturb ``(+-I, +-I)`` to ``A', B'`` with ``[A', B'] = [[1, u], [v, 1 + uv]]``.

    ``sign`` multiplies ``A'`` and ``sign_b`` (default ``sign``) multiplies
    ``B'``.  Requires ``|u|, |v| <= ratio |a|`` and ``|a| <= bound``.
    """
    ratio = DEFAULT_CONFIG.central_ratio if ratio is None else ratio
    bound = DEFAULT_CONFIG.smallness_bound if bound is None else bound
    sign_b = sign if sign_b is None else sign_b
    if sign not in (1, -1) or sign_b not in (1, -1):
        raise ValueError("signs must be +1 or -1")
    a, u, v = _unify(a, u, v)
    _small(a, bound, "a")
    for name, x in (("u", u), ("v", v)):
        if abs(complex(x)) > ratio * abs(complex(a)):
            raise ValueError(f"|{name}| must be at most {ratio} |a|")
    den1 = a * (2 + a)
    _nz(den1, "a(2 + a)")
    s = 1 + a
    E = u * v + 2 * a * (1 + u * v) + a * a * (1 + u * v)
    _nz(E, "uv + 2a(1 + uv) + a^2(1 + uv)")
    A = Mat2(s, u * s, 0 * s, 1 / s)
    B = Mat2(_one_like(a), u * (1 - s * s * u * v) / den1, -s * s * v / E,
             1 + s * s * u * v * (-1 + s * s * u * v) / (den1 * E))
    A = A if sign == 1 else -A
    B = B if sign_b == 1 else -B
    return A, B, mat_commutator(A, B)


# ---------------------------------------------------------------------------
# parabolic case


def parabolic_commutator_M(p, u, v):
    """``M_p(u, v) = [[1 + u, v], [-u^2/(p + pu + v), (p + v - uv)/(p + pu + v)]]``."""
    p, u, v = _unify(p, u, v)
    _nz(p, "p")
    den = p + p * u + v
    _nz(den, "p + pu + v")
    return Mat2(1 + u, v, -u * u / den, (p + v - u * v) / den)


def parabolic_a_prime(p, q, u, v, sign: int = 1, root=None):
    """The deformation ``A'`` of ``+-[[1, q], [0, 1]]`` with
    ``[A', +-[[1, p], [0, 1]]] = M_p(u, v)``; ``root`` is a square root of
    ``1 + u + v/p`` (principal branch if omitted)."""
    p, q, u, v = _unify(p, q, u, v)
    _nz(p, "p")
    den = p + p * u + v
    _nz(den, "p + pu + v")
    rad = 1 + u + v / p
    if root is None:
        if is_exact(rad) and qqi_sqrt(rad) is not None:
            root = qqi_sqrt(rad)
        else:
            root = cmath.sqrt(complex(rad))
            p, q, u, v, den = complex(p), complex(q), complex(u), complex(v), complex(den)
    _nz(root, "sqrt(1 + u + v/p)")
    A = Mat2(root, q, (-u / p) / root, (-q * u + p * root) / den)
    return A if sign == 1 else -A


def parabolic_product_solve(a, b, c, p, q, bound: float | None = None):
    """Solve for small ``w`` with ``M_p((a - w + bw^2/q)/(1 + w), b + bw) M_q(w, 0)``
    equal to ``[[1 + a, b], [c, (1 + bc)/(1 + a)]]``.

    The lower-left entry of the product is ``N(w)/Q(w)`` with
    ``N = -a^2 q - (b + p + q) w^2 + aw(2q - bw)`` and
    ``Q = (1 + a)pq + b(pw^2 + q(1 + w)^2)``; ``N - cQ`` is quadratic in ``w``
    and its smallest root is taken.  Returns ``(w, C, D, K)`` with
    ``K = |w| / (sqrt|c| + |a|)``.
    """
    bound = DEFAULT_CONFIG.smallness_bound if bound is None else bound
    a, b, c, p, q = (complex(x) for x in (a, b, c, p, q))
    if abs(p + q) == 0:
        raise ValueError("p + q = 0: choose another generating set")
    for name, x in (("a", a), ("b", b), ("c", c)):
        _small(x, bound, name)
    c2 = -(b + p + q + a * b) - c * b * (p + q)
    c1 = 2 * a * q - 2 * b * c * q
    c0 = -a * a * q - c * ((1 + a) * p * q + b * q)
    if a == 0 and b == 0 and c == 0:
        w = 0j
    else:
        roots = np.roots([c2, c1, c0]) if c2 != 0 else np.array([-c0 / c1])
        w = complex(min(roots, key=abs))
        # one Newton polish on the scalar equation
        f = c2 * w * w + c1 * w + c0
        df = 2 * c2 * w + c1
        if df != 0:
            w -= f / df
    C = parabolic_commutator_M(p, (a - w + b * w * w / q) / (1 + w), b + b * w)
    D = parabolic_commutator_M(q, w, 0j)
    target = Mat2(1 + a, b, c, (1 + b * c) / (1 + a), check=False)
    prod = C * D
    if prod.max_dist(target) > 1e-10:
        raise DeformationError(f"product misses the target by {prod.max_dist(target):.3e}")
    scale = math.sqrt(abs(c)) + abs(a)
    K = abs(w) / scale if scale else 0.0
    return w, C, D, K


def product_lower_left(a, b, p, q, w):
    """The closed form of the lower-left entry of ``C D`` in :func:`parabolic_product_solve`."""
    num = -a * a * q - (b + p + q) * w * w + a * w * (2 * q - b * w)
    den = (1 + a) * p * q + b * (p * w * w + q * (1 + w) ** 2)
    return num / den


# ---------------------------------------------------------------------------
# paths of reducible nonabelian representations


def _pair_data(data):
    if isinstance(data, (tuple, list)) and len(data) == 2 and all(isinstance(m, Mat2) for m in data):
        A, B = data
        if not (is_zero(A.c, 0.0 if A.is_exact else 1e-14) and is_zero(B.c, 0.0 if B.is_exact else 1e-14)):
            raise ValueError("endpoint is not upper triangular")
        return complex(A.a), complex(A.b), complex(B.a), complex(B.b)
    lam, d, mu, e = data
    return complex(lam), complex(d), complex(mu), complex(e)


def _bezier(x0, x1, h, t):
    if x0 == x1 and h == 0:
        return x0
    return (1 - t) * x0 + t * x1 + t * (1 - t) * h


def _hits(x0, x1, h, value) -> bool:
    """Does ``(1-t) x0 + t x1 + t(1-t) h`` equal ``value`` for some ``t`` in (0, 1)?"""
    # -h t^2 + (x1 - x0 + h) t + (x0 - value) = 0
    coeffs = [-h, x1 - x0 + h, x0 - value]
    if abs(h) == 0:
        if abs(x1 - x0) == 0:
            return abs(x0 - value) == 0
        roots = [(value - x0) / (x1 - x0)]
    else:
        roots = np.roots(coeffs)
    for t in roots:
        if abs(t.imag) <= 1e-12 and 1e-12 < t.real < 1 - 1e-12:
            return True
    return False


def _avoiding_bump(x0, x1, forbidden) -> complex:
    scale = 1.0 + abs(x1 - x0)
    cands = [0j] + [scale * r * cmath.exp(1j * (math.pi / 4) * k) for r in (0.5, 1.0, 2.0) for k in range(8)]
    for h in cands:
        if not any(_hits(x0, x1, h, f) for f in forbidden):
            return h
    raise DeformationError("no admissible bump found")


def _nonabelian_value(lam, d, mu, e):
    return e * mu * (lam * lam - 1) - d * lam * (mu * mu - 1)


def reducible_nonabelian_path(rho0_data, rho1_data, n_samples: int = 64) -> MatrixPath:
    """Upper-triangular pairs ``([[lam, d], [0, 1/lam]], [[mu, e], [0, 1/mu]])``
    joining two endpoints so that inside the path ``lam, mu`` avoid
    ``{-1, 0, 1}``, ``d != 0`` and the pair does not commute."""
    if n_samples < 3:
        raise ValueError("need at least three samples")
    l0, d0, m0, e0 = _pair_data(rho0_data)
    l1, d1, m1, e1 = _pair_data(rho1_data)
    hl = _avoiding_bump(l0, l1, (-1, 0, 1))
    hm = _avoiding_bump(m0, m1, (-1, 0, 1))
    hd = _avoiding_bump(d0, d1, (0,))
    ts = [k / (n_samples - 1) for k in range(n_samples)]
    ts[-1] = 1.0
    inner = ts[1:-1]
    lam = [_bezier(l0, l1, hl, t) for t in inner]
    mu = [_bezier(m0, m1, hm, t) for t in inner]
    dd = [_bezier(d0, d1, hd, t) for t in inner]
    g = [d * l * (m * m - 1) / (m * (l * l - 1)) for l, m, d in zip(lam, mu, dd)]
    # choose the bump on e maximising the normalised distance to g
    scale = 1.0 + abs(e1 - e0) + max(abs(x) for x in g)
    def score(h):
        return min(abs(_bezier(e0, e1, h, t) - gt) / (t * (1 - t)) for t, gt in zip(inner, g))

    # keep the straight segment when it is comfortably admissible
    best, best_h = score(0j), 0j
    if best < 1e-3 * scale:
        for h in [scale * r * cmath.exp(1j * (math.pi / 4) * k) for r in (0.5, 1.0, 2.0) for k in range(8)]:
            sc = score(h)
            if sc > best:
                best, best_h = sc, h
    if best <= 1e-9:
        raise DeformationError("could not keep the pair nonabelian")
    samples = []
    for t in ts:
        l, m = _bezier(l0, l1, hl, t), _bezier(m0, m1, hm, t)
        d, e = _bezier(d0, d1, hd, t), _bezier(e0, e1, best_h, t)
        samples.append((t, (Mat2(l, d, 0j, 1 / l), Mat2(m, e, 0j, 1 / m))))
    samples[0] = (0.0, (Mat2(l0, d0, 0j, 1 / l0), Mat2(m0, e0, 0j, 1 / m0)))
    samples[-1] = (1.0, (Mat2(l1, d1, 0j, 1 / l1), Mat2(m1, e1, 0j, 1 / m1)))
    path = MatrixPath.from_samples(samples)
    path.info["bumps"] = {"lambda": hl, "mu": hm, "d": hd, "e": best_h}
    path.info["min_normalised_gap"] = best
    return path


# ---------------------------------------------------------------------------
# extension of boundary deformations


def _handle_products(pairs):
    P = np.eye(2, dtype=complex)
    for A, B in pairs:
        P = P @ _comm(A, B)
    return P


def _boundary_newton(pairs, M, budget: float, tol: float, max_iters: int = 50):
    """Damped least-norm Newton for ``prod [A_i, B_i] = M`` over the given handles."""
    pairs = [(A.copy(), B.copy()) for A, B in pairs]
    orig = [(A.copy(), B.copy()) for A, B in pairs]
    # variables are weighted so that a least-norm step is close to least entry displacement
    w = np.concatenate([np.repeat([1 / max(1.0, np.linalg.norm(A, 2)), 1 / max(1.0, np.linalg.norm(B, 2))], 3)
                        for A, B in pairs])
    size = max(np.max(np.abs(A)) * np.max(np.abs(B)) for A, B in pairs)
    tol = max(tol, 1e-15 * max(1.0, np.max(np.abs(M))) * size)
    res = float("inf")
    for it in range(max_iters):
        comms = [_comm(A, B) for A, B in pairs]
        P = np.eye(2, dtype=complex)
        for K in comms:
            P = P @ K
        F = (P - M).reshape(4)
        res = float(np.max(np.abs(F)))
        if res <= tol:
            return pairs, res
        cols = []
        left = np.eye(2, dtype=complex)
        for i, (A, B) in enumerate(pairs):
            right = np.eye(2, dtype=complex)
            for K in comms[i + 1:]:
                right = right @ K
            J = _comm_jacobian(A, B)
            for k in range(6):
                cols.append((left @ J[:, k].reshape(2, 2) @ right).reshape(4))
            left = left @ comms[i]
        Jall = np.array(cols).T
        z = _solve_tangent(Jall * w, -F)
        step = np.max(np.abs(z))
        if step > 0.5:
            z *= 0.5 / step
        z = z * w
        new = [_step(A, B, z[6 * i: 6 * i + 6]) for i, (A, B) in enumerate(pairs)]
        disp = max(max(np.max(np.abs(A - A0)), np.max(np.abs(B - B0))) for (A, B), (A0, B0) in zip(new, orig))
        if disp > budget:
            raise DeformationError(f"Newton displacement {disp:.3e} exceeds the budget {budget:.3e} "
                                   f"(residual {res:.3e} at iteration {it})")
        pairs = new
    raise DeformationError(f"Newton did not converge (residual {res:.3e})")


def _is_abelian(mats, tol: float) -> bool:
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if np.max(np.abs(mats[i] @ mats[j] - mats[j] @ mats[i])) > tol:
                return False
    return True


def _is_central(A, tol) -> bool:
    return abs(A[0, 1]) <= tol and abs(A[1, 0]) <= tol and abs(A[0, 0] - A[1, 1]) <= tol


def _prepare_handles(pairs, tol):
    """Transvect handles so that neither image is central where possible.

    ``alpha -> alpha beta`` and ``beta -> beta alpha`` keep the commutator.
    Returns the new pairs and, per handle, how to undo the change.
    """
    out, moves = [], []
    for A, B in pairs:
        ca, cb = _is_central(A, tol), _is_central(B, tol)
        if ca and not cb:
            out.append((A @ B, B))
            moves.append("a")
        elif cb and not ca:
            out.append((A, B @ A))
            moves.append("b")
        else:
            out.append((A, B))
            moves.append("")
    return out, moves


def _undo(A, B, move):
    if move == "a":  # A holds the image of alpha*beta
        return A @ _inv2(B), B
    if move == "b":  # B holds the image of beta*alpha
        return A, B @ _inv2(A)
    return A, B


def _abelian_solve(pairs, M, tol):
    """Explicit constructors for an abelian restriction (boundary product I)."""
    mats = [X for pr in pairs for X in pr]
    noncentral = [X for X in mats if not _is_central(X, tol)]
    if not noncentral:
        kind = "central"
        P = np.eye(2, dtype=complex)
    else:
        X = noncentral[0]
        tr = X[0, 0] + X[1, 1]
        if min(abs(tr - 2), abs(tr + 2)) > 1e-9:
            kind = "diagonal"
            from .fibers import _diagonalize
            P, _ = _diagonalize(X)
        else:
            kind = "parabolic"
            N = X - (tr / 2) * np.eye(2)
            # column space of the nilpotent part is the common fixed line
            v = N[:, 0] if np.linalg.norm(N[:, 0]) > np.linalg.norm(N[:, 1]) else N[:, 1]
            w = np.array([0, 1], dtype=complex) if abs(v[0]) > abs(v[1]) else np.array([1, 0], dtype=complex)
            P = np.array([v, w]).T
            P = P / cmath.sqrt(np.linalg.det(P))
    Pi = _inv2(P)
    conj = [(Pi @ A @ P, Pi @ B @ P) for A, B in pairs]
    prepared, moves = _prepare_handles(conj, tol)
    if kind == "central":
        usable = list(range(len(prepared)))
    else:
        usable = [i for i, (A, B) in enumerate(prepared) if not _is_central(A, tol) and not _is_central(B, tol)]
    if len(usable) < 2:
        raise DeformationError("fewer than two usable handles in the abelian complement")
    i1, i2 = usable[:2]
    Mc = Pi @ M @ P
    x, y, z = Mc[0, 0] - 1, Mc[0, 1], Mc[1, 0]
    new = list(prepared)
    if kind == "parabolic":
        a_, b_, c_ = x, y, z
        (A1, B1), (A2, B2) = prepared[i1], prepared[i2]
        s1, s2 = np.sign((A1[0, 0]).real) or 1, np.sign((A2[0, 0]).real) or 1
        t1, t2 = np.sign((B1[0, 0]).real) or 1, np.sign((B2[0, 0]).real) or 1
        p1, p2 = B1[0, 1] / t1, B2[0, 1] / t2
        q1, q2 = A1[0, 1] / s1, A2[0, 1] / s2
        w, C, D, _K = parabolic_product_solve(a_, b_, c_, p1, p2)
        u1, v1 = (a_ - w + b_ * w * w / p2) / (1 + w), b_ + b_ * w
        A1n = parabolic_a_prime(p1, q1, u1, v1).to_numpy() * s1
        A2n = parabolic_a_prime(p2, q2, w, 0).to_numpy() * s2
        new[i1] = (A1n, B1)
        new[i2] = (A2n, B2)
    else:
        C, D, _ = near_identity_product(complex(x), complex(y), complex(z))
        for idx, Tm in ((i1, C), (i2, D)):
            u, v = Tm.b, Tm.c
            A, B = prepared[idx]
            if kind == "diagonal":
                Ad, Bd, _ = abelian_diagonal_commutator(A[0, 0], B[0, 0], u, v, bound=np.inf)
            else:
                sa, sb = (1 if A[0, 0].real > 0 else -1), (1 if B[0, 0].real > 0 else -1)
                amag = max(10 * max(abs(u), abs(v)), 1e-300)
                Ad, Bd, _ = central_case_commutator(amag, u, v, sa, sb, bound=np.inf)
            new[idx] = (Ad.to_numpy(), Bd.to_numpy())
    undone = [_undo(A, B, mv) for (A, B), mv in zip(new, moves)]
    return [(P @ A @ Pi, P @ B @ Pi) for A, B in undone], kind


def extend_boundary_deformation(rho: Representation, subsurface_gens, target_boundary,
                                max_norm: float, tol: float | None = None) -> Representation:
    """Extend a deformation of ``rho`` on a subsurface over the complement.

    ``rho`` carries the (already deformed) images of ``subsurface_gens``, a
    block of whole handles; the complementary handles, of genus at least 2,
    are changed so that their product of commutators equals
    ``target_boundary`` while the surface relator holds.  Nonabelian
    complements use damped Newton with generator displacement at most
    ``10 * max_norm``; abelian complements use the explicit constructors.
    """
    tol = DEFAULT_CONFIG.relator_tol if tol is None else tol
    if rho.presentation.kind != "surface":
        raise ValueError("a surface representation is required")
    g = rho.presentation.genus
    sub = sorted(set(int(k) for k in subsurface_gens))
    handles_s = sorted({k // 2 for k in sub})
    if any({2 * h, 2 * h + 1} - set(sub) for h in handles_s):
        raise ValueError("the subsurface must consist of whole handles")
    handles_t = [h for h in range(g) if h not in handles_s]
    if len(handles_t) < 2:
        raise ValueError("the complementary subsurface must have genus >= 2")
    # handles of the complement must be cyclically contiguous
    rot = None
    for start in range(g):
        order = [(start + k) % g for k in range(g)]
        if order[:len(handles_t)] == sorted(handles_t, key=lambda h: (h - start) % g):
            if set(order[:len(handles_t)]) == set(handles_t):
                rot = order
                break
    if rot is None:
        raise ValueError("the complementary handles must be contiguous")
    M = target_boundary.matrix if isinstance(target_boundary, BoundaryTarget) else target_boundary
    Mn = M.to_numpy()
    imgs = [m.to_numpy() for m in rho.images]
    t_pairs = [(imgs[2 * h], imgs[2 * h + 1]) for h in rot[:len(handles_t)]]
    s_pairs = [(imgs[2 * h], imgs[2 * h + 1]) for h in rot[len(handles_t):]]
    current = _handle_products(t_pairs)
    # the relator, read cyclically from the complement: P_T P_S = I
    P_S = _handle_products(s_pairs)
    if np.max(np.abs(Mn @ P_S - np.eye(2))) > max(tol, 1e-12) * 10:
        raise ValueError("target boundary is inconsistent with the subsurface images")
    if np.max(np.abs(Mn - current)) > max_norm * (1 + 1e-12):
        raise ValueError("target boundary is farther than max_norm from the current boundary")
    if np.max(np.abs(Mn - current)) == 0:
        return rho
    t_mats = [X for pr in t_pairs for X in pr]
    if _is_abelian(t_mats, 1e-12):
        new_pairs, _ = _abelian_solve(t_pairs, Mn, 1e-12)
        fine_tol = min(tol, 1e-12)
        new_pairs, _res = _boundary_newton(new_pairs, Mn, np.inf, fine_tol)
    else:
        new_pairs, _res = _boundary_newton(t_pairs, Mn, 10 * max_norm, min(tol * 1e-3, 1e-12))
    out = list(rho.images)
    for h, (A, B) in zip(rot[:len(handles_t)], new_pairs):
        A = A / cmath.sqrt(np.linalg.det(A)) if abs(np.linalg.det(A) - 1) > 1e-15 else A
        B = B / cmath.sqrt(np.linalg.det(B)) if abs(np.linalg.det(B) - 1) > 1e-15 else B
        out[2 * h] = Mat2.from_numpy(A)
        out[2 * h + 1] = Mat2.from_numpy(B)
    for k in sub:
        out[k] = rho.images[k]
    return Representation(rho.presentation, out, validate=True, relator_tol=tol)
