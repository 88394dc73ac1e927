"""Fibers of the commutator map (A, B) -> [A, B] and lifting paths of targets
to paths in those fibers."""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_CONFIG
from .core.linalg import Mat2, mat_commutator
from .core.polynomial import Poly
from .core.scalars import QQi, exact, is_exact, is_zero, random_qqi


class PathLiftError(RuntimeError):
    """Raised when continuation fails; ``t`` is the parameter where it stopped."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class FiberPoint:
    A: Mat2
    B: Mat2
    target: Mat2
    residual: float

    @classmethod
    def make(cls, A: Mat2, B: Mat2, target: Mat2) -> "FiberPoint":
        K = mat_commutator(A, B)
        if A.is_exact and B.is_exact and target.is_exact:
            res = 0.0 if K == target else K.max_dist(target)
        else:
            res = K.max_dist(target)
        return cls(A, B, target, res)


def _dist(x, y) -> float:
    if isinstance(x, Mat2):
        return x.max_dist(y)
    if isinstance(x, tuple) and x and isinstance(x[0], Mat2):
        return max(p.max_dist(q) for p, q in zip(x, y))
    return float(np.max(np.abs(np.asarray(x, dtype=complex) - np.asarray(y, dtype=complex))))


@dataclass
class MatrixPath:
    """Samples ``(t, value)`` with ``t`` increasing from 0 to 1.

    ``value`` is a Mat2, a pair of Mat2, or a point of C^n.  ``step_bound`` is
    the largest max-norm jump between consecutive samples.
    """

    samples: list
    step_bound: float = 0.0
    info: dict = field(default_factory=dict)

    @classmethod
    def from_samples(cls, samples: Sequence, **info) -> "MatrixPath":
        samples = list(samples)
        ts = [t for t, _ in samples]
        if len(samples) < 2 or ts[0] != 0 or ts[-1] != 1 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("path parameters must increase strictly from 0 to 1")
        bound = max(_dist(v, w) for (_, v), (_, w) in zip(samples, samples[1:]))
        return cls(samples, bound, dict(info))

    @property
    def ts(self) -> list:
        return [t for t, _ in self.samples]

    @property
    def values(self) -> list:
        return [v for _, v in self.samples]

    def __len__(self):
        return len(self.samples)


def sample_target_path(fn: Callable[[float], Mat2], n_steps: int) -> MatrixPath:
    """Sample ``fn`` on ``n_steps + 1`` equally spaced parameters."""
    return MatrixPath.from_samples([(k / n_steps if k < n_steps else 1.0, fn(k / n_steps if k < n_steps else 1.0))
                                    for k in range(n_steps + 1)])


# ---------------------------------------------------------------------------
# the fiber over diag(m, 1/m)


def _check_m(m):
    if is_exact(m):
        bad = (not m) or m == 1 or m == -1
    else:
        bad = min(abs(m), abs(m - 1), abs(m + 1)) < 1e-14
    if bad:
        raise ValueError(f"m must avoid 0, 1, -1 (got {m})")


def _check_sqrt(m, sqrt_m):
    sq = sqrt_m * sqrt_m
    if is_exact(sq) and is_exact(m):
        if sq != m:
            raise ValueError("sqrt_m^2 != m")
    elif abs(complex(sq) - complex(m)) > 1e-12 * max(1.0, abs(complex(m))):
        raise ValueError("sqrt_m^2 != m")


def _backend(*xs):
    """Promote scalars to one backend (all QQi or all complex)."""
    if all(is_exact(x) for x in xs):
        return [exact(x) for x in xs]
    return [complex(x) for x in xs]


def diag_target(m) -> Mat2:
    return Mat2.diag(m)


def fiber_base_point(m, sqrt_m) -> FiberPoint:
    """``A0 = [[r, m - 1], [0, 1/r]]``, ``B0 = [[1/r, 0], [1, r]]`` with ``r = sqrt_m``."""
    m, sqrt_m = _backend(m, sqrt_m)
    _check_m(m)
    _check_sqrt(m, sqrt_m)
    r, ri = sqrt_m, 1 / sqrt_m
    zero, one = m * 0, m * 0 + 1
    A0 = Mat2(r, m - 1, zero, ri, check=False)
    B0 = Mat2(ri, zero, one, r, check=False)
    return FiberPoint.make(A0, B0, Mat2.diag(m))


def _det_ok(x, tol: float) -> bool:
    if is_exact(x):
        return x == 1
    return abs(x - 1) <= tol


def family_c_matrices(m, a, b, c, s, t):
    """The pair of the ``c != 0`` family as GL(2) matrices (no determinant check)."""
    A = Mat2(c * m * t, b * m * s + a * m * (m - 1) * t, c * s, c * t, sl2=False)
    B = Mat2(a, b, c, a * m, sl2=False)
    return A, B


def family_a_matrices(m, a, b, c, s, t):
    """The pair of the ``a != 0`` family as GL(2) matrices (no determinant check)."""
    A = Mat2(c * s - b * m * t, a * (m - 1) * s, a * (m - 1) * t, c * s / m - b * t, sl2=False)
    B = Mat2(a, b, c, a * m, sl2=False)
    return A, B


def _family_point(kind, m, a, b, c, s, t, tol):
    m, a, b, c, s, t = _backend(m, a, b, c, s, t)
    _check_m(m)
    key = c if kind == "c" else a
    if is_zero(key, 0.0):
        raise ValueError(f"{kind} must be nonzero for this family")
    A, B = (family_c_matrices if kind == "c" else family_a_matrices)(m, a, b, c, s, t)
    dA, dB = A.det(), B.det()
    if not (_det_ok(dA, tol) and _det_ok(dB, tol)):
        raise ValueError(f"determinant constraints violated: det A - 1 = {dA - 1}, det B - 1 = {dB - 1}")
    A = Mat2(A.a, A.b, A.c, A.d, check=False)
    B = Mat2(B.a, B.b, B.c, B.d, check=False)
    return FiberPoint.make(A, B, Mat2.diag(m))


def fiber_family_c(m, a, b, c, s, t, tol: float | None = None) -> FiberPoint:
    """``A = [[cmt, bms + am(m-1)t], [cs, ct]]``, ``B = [[a, b], [c, am]]``, ``c != 0``."""
    return _family_point("c", m, a, b, c, s, t, DEFAULT_CONFIG.fiber_tol if tol is None else tol)


def fiber_family_a(m, a, b, c, s, t, tol: float | None = None) -> FiberPoint:
    """``A = [[cs - bmt, a(m-1)s], [a(m-1)t, (c/m)s - bt]]``, ``B = [[a, b], [c, am]]``, ``a != 0``."""
    return _family_point("a", m, a, b, c, s, t, DEFAULT_CONFIG.fiber_tol if tol is None else tol)


def family_c_coordinates(A: Mat2, B: Mat2):
    """``(a, b, c, s, t)`` of a fiber point with ``B21 != 0``."""
    c = B.c
    return (B.a, B.b, c, A.c / c, A.d / c)


def family_a_coordinates(A: Mat2, B: Mat2, m):
    """``(a, b, c, s, t)`` of a fiber point with ``B11 != 0``."""
    a = B.a
    return (a, B.b, B.c, A.b / (a * (m - 1)), A.c / (a * (m - 1)))


def _conic_point(P, R, S, t0, k):
    """Second intersection of ``P t^2 + R s^2 + S s t = 1`` with the line
    through ``(s, t) = (0, t0)`` of slope ``dt/ds = k``."""
    den = P * k * k + R + S * k
    if not den:
        return None
    u = -(2 * P * t0 * k + S * t0) / den
    return u, t0 + k * u


def random_family_params(rng: random.Random, kind: str, m, sqrt_m):
    """Random exact ``(a, b, c, s, t)`` satisfying both determinant constraints.

    ``m`` and ``sqrt_m`` must be exact with ``sqrt_m^2 = m``.
    """
    m, sqrt_m = exact(m), exact(sqrt_m)
    _check_sqrt(m, sqrt_m)
    while True:
        a = random_qqi(rng, nonzero=True)
        c = random_qqi(rng, nonzero=True)
        b = (a * a * m - 1) / c
        k = random_qqi(rng)
        if kind == "c":
            # det A = c^2 m t^2 - bcm s^2 - acm(m-1) s t, known point s = 0
            t0 = 1 / (c * sqrt_m)
            pt = _conic_point(c * c * m, -b * c * m, -a * c * m * (m - 1), t0, k)
            if pt is None:
                continue
            s, t = pt
        else:
            # det A = (c^2/m) s^2 + b^2 m t^2 - (2bc + a^2 (m-1)^2) s t, known point t = 0
            s0 = sqrt_m / c
            pt = _conic_point(c * c / m, b * b * m, -(2 * b * c + a * a * (m - 1) ** 2), s0, k)
            if pt is None:
                continue
            t, s = pt
        return a, b, c, s, t


# ---------------------------------------------------------------------------
# sign-flip paths


def _cis(theta: float) -> complex:
    """``exp(i theta)`` with exact values at multiples of pi/2."""
    q = theta / (math.pi / 2)
    if abs(q - round(q)) < 1e-15:
        return (1, 1j, -1, -1j)[int(round(q)) % 4]
    return cmath.exp(1j * theta)


def _path_b_flip(m, r, theta):
    """``(A0, -B0)`` reached at ``theta = pi`` from ``(A0, B0)``."""
    e = _cis(theta)
    A = Mat2(r, m - 1, 0j, 1 / r, check=False)
    B = Mat2(e / r, e - 1 / e, e, e * r, check=False)
    return A, B


def _path_a_flip(m, r, theta, b_sign):
    """``(+-A0, b_sign B0)`` to ``(-A0, b_sign B0)`` as ``theta`` runs over ``[0, pi]``."""
    e = _cis(theta)
    A = Mat2(e * r, e * (m - 1), (e - 1 / e) / (m - 1), e / r, check=False)
    B = Mat2(b_sign / r, 0j, b_sign * (1 + 0j), b_sign * r, check=False)
    return A, B


def sign_flip_path(m, sqrt_m, eps_A: int, eps_B: int, n_samples: int = 64) -> MatrixPath:
    """A path in the fiber of ``diag(m, 1/m)`` from ``(A0, B0)`` to ``(eps_A A0, eps_B B0)``.

    The ``(-, -)`` case runs the B-flip over ``t <= 1/2`` and then the A-flip.
    The endpoints are the base point's float images, up to sign, exactly.
    """
    if eps_A not in (1, -1) or eps_B not in (1, -1):
        raise ValueError("signs must be +1 or -1")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    m, r = complex(m), complex(sqrt_m)
    _check_m(m)
    _check_sqrt(m, r)
    base = fiber_base_point(m, r)
    A0, B0 = base.A, base.B
    ts = [k / (n_samples - 1) for k in range(n_samples)]
    ts[-1] = 1.0
    samples = []
    for t in ts:
        if (eps_A, eps_B) == (1, 1):
            pair = (A0, B0)
        elif (eps_A, eps_B) == (1, -1):
            pair = _path_b_flip(m, r, math.pi * t)
        elif (eps_A, eps_B) == (-1, 1):
            pair = _path_a_flip(m, r, math.pi * t, 1)
        else:
            pair = _path_b_flip(m, r, 2 * math.pi * t) if t <= 0.5 else _path_a_flip(m, r, 2 * math.pi * (t - 0.5), -1)
        samples.append((t, pair))
    samples[0] = (0.0, (A0, B0))
    samples[-1] = (1.0, (-A0 if eps_A < 0 else A0, -B0 if eps_B < 0 else B0))
    path = MatrixPath.from_samples(samples)
    path.info["residual"] = max(mat_commutator(A, B).max_dist(base.target) for _, (A, B) in samples)
    return path


# ---------------------------------------------------------------------------
# avoiding the zero set of a polynomial


def _segment_plan(coeffs: np.ndarray, cap: float):
    """Semicircle detours ``(center, radius, side)`` along the real segment [0, 1]."""
    coeffs = np.trim_zeros(coeffs, "b")
    if len(coeffs) <= 1:
        return []
    roots = np.roots(coeffs[::-1])
    plan = []
    for k, r in enumerate(roots):
        others = [abs(r - q) for j, q in enumerate(roots) if j != k]
        near = min([abs(r), abs(r - 1)] + others)
        radius = min(cap, near / 2)
        if 0 < r.real < 1 and abs(r.imag) < radius:
            side = -1.0 if r.imag >= 0 else 1.0
            plan.append((r.real, radius, side))
    plan.sort()
    return plan


def _tau_polyline(plan, n_samples: int) -> list[complex]:
    """Points of the detoured path in the tau-plane, spaced by arc length."""
    pieces = []  # (kind, start, end/center, radius, side, length)
    pos = 0.0
    for center, radius, side in plan:
        if center - radius > pos:
            pieces.append(("seg", pos, center - radius, 0, 0, center - radius - pos))
        pieces.append(("arc", center, center, radius, side, math.pi * radius))
        pos = center + radius
    if pos < 1:
        pieces.append(("seg", pos, 1.0, 0, 0, 1.0 - pos))
    total = sum(p[-1] for p in pieces)
    out = []
    for k in range(n_samples):
        s = total * k / (n_samples - 1)
        for kind, a, b, radius, side, length in pieces:
            if s <= length + 1e-15 or (kind, a, b) == pieces[-1][:3]:
                f = min(max(s / length, 0.0), 1.0) if length else 0.0
                if kind == "seg":
                    out.append(complex(a + (b - a) * f))
                else:
                    ang = math.pi * (1 - f)
                    out.append(complex(b + radius * math.cos(ang), side * radius * math.sin(ang)))
                break
            s -= length
    out[0], out[-1] = 0j, 1 + 0j
    return out


def path_avoiding_zeros(p: Poly, x, y, n_samples: int = 200, cap: float | None = None,
                        seed: int = 0) -> MatrixPath:
    """A polyline from ``x`` to ``y`` in C^n along which ``p`` never vanishes.

    The path follows the complex line through ``x`` and ``y`` and passes
    around each root of the restricted polynomial on a semicircle of radius
    ``min(cap, half the distance to the nearest other root or endpoint)``,
    measured in the line parameter.  If ``p`` vanishes on the whole line the
    path goes through a perturbed midpoint.
    """
    cap = DEFAULT_CONFIG.detour_radius_cap if cap is None else cap
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if abs(complex(p(x))) == 0 or abs(complex(p(y))) == 0:
        raise ValueError("p vanishes at an endpoint")
    coeffs = p.restrict_to_line(x, y)
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    if np.all(np.abs(coeffs) <= 1e-13 * scale) or np.array_equal(x, y):
        if np.array_equal(x, y):
            pts = [x.copy() for _ in range(n_samples)]
            samples = [(k / (n_samples - 1) if k < n_samples - 1 else 1.0, pts[k]) for k in range(n_samples)]
            return MatrixPath.from_samples(samples, detours=[], min_abs_value=abs(complex(p(x))))
        rng = np.random.default_rng(seed)
        while True:
            z = (x + y) / 2 + rng.normal(size=len(x)) + 1j * rng.normal(size=len(x))
            if abs(complex(p(z))) > 1e-6:
                break
        half = max(2, n_samples // 2 + 1)
        first = path_avoiding_zeros(p, x, z, half, cap, seed + 1)
        second = path_avoiding_zeros(p, z, y, n_samples - half + 1, cap, seed + 2)
        pts = first.values + second.values[1:]
        detours = first.info["detours"] + second.info["detours"]
    else:
        plan = _segment_plan(coeffs, cap)
        taus = _tau_polyline(plan, n_samples)
        pts = [x + tau * (y - x) for tau in taus]
        detours = [{"center": c, "radius": r} for c, r, _ in plan]
    pts[0], pts[-1] = x, y
    n = len(pts)
    samples = [(k / (n - 1) if k < n - 1 else 1.0, pts[k]) for k in range(n)]
    min_val = min(abs(complex(p(q))) for q in pts)
    if min_val == 0:
        raise PathLiftError("zero-avoiding path hit a zero")
    return MatrixPath.from_samples(samples, detours=detours, min_abs_value=min_val)


# ---------------------------------------------------------------------------
# numerics on 2x2 complex arrays

_SL2_BASIS = (
    np.array([[1, 0], [0, -1]], dtype=complex),
    np.array([[0, 1], [0, 0]], dtype=complex),
    np.array([[0, 0], [1, 0]], dtype=complex),
)


def _inv2(A):
    return np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]]) / (A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])


def _expm_sl2(X):
    d = X[0, 0] * X[0, 0] + X[0, 1] * X[1, 0]
    r = cmath.sqrt(d)
    if abs(r) < 1e-8:
        ch = 1 + d / 2 + d * d / 24
        sh = 1 + d / 6 + d * d / 120
    else:
        ch = cmath.cosh(r)
        sh = cmath.sinh(r) / r
    return ch * np.eye(2, dtype=complex) + sh * X


def _comm(A, B):
    return A @ B @ _inv2(A) @ _inv2(B)


def _comm_jacobian(A, B):
    """4x6 derivative of ``(X, Y) -> [A e^X, B e^Y]`` at ``X = Y = 0``."""
    Ai, Bi = _inv2(A), _inv2(B)
    AB = A @ B
    cols = []
    for X in _SL2_BASIS:
        cols.append((A @ X @ B @ Ai @ Bi - AB @ X @ Ai @ Bi).reshape(4))
    for Y in _SL2_BASIS:
        cols.append((AB @ Y @ Ai @ Bi - AB @ Ai @ Y @ Bi).reshape(4))
    return np.array(cols).T


def _solve_tangent(J, rhs):
    """Least-norm solution on the top three singular directions.

    The image of the commutator differential lies in the 3-dimensional
    tangent space of SL(2), so the fourth singular value is roundoff.
    """
    U, sv, Vh = np.linalg.svd(J, full_matrices=False)
    coef = (U[:, :3].conj().T @ rhs) / sv[:3]
    return Vh[:3].conj().T @ coef


def _tangent(z):
    return (z[0] * _SL2_BASIS[0] + z[1] * _SL2_BASIS[1] + z[2] * _SL2_BASIS[2],
            z[3] * _SL2_BASIS[0] + z[4] * _SL2_BASIS[1] + z[5] * _SL2_BASIS[2])


def _step(A, B, z):
    X, Y = _tangent(z)
    return A @ _expm_sl2(X), B @ _expm_sl2(Y)


def commutator_jacobian_rank(A: Mat2, B: Mat2, threshold: float | None = None) -> int:
    """Numeric rank of the differential of the commutator map on sl2 x sl2,
    read in the tangent space at ``[A, B]`` (so at most 3)."""
    threshold = DEFAULT_CONFIG.rank_threshold if threshold is None else threshold
    An, Bn = A.to_numpy(), B.to_numpy()
    Ki = _inv2(_comm(An, Bn))
    J = _comm_jacobian(An, Bn)
    # left-translate each column to sl2 and take (h, e, f) coordinates
    cols = []
    for k in range(6):
        T = Ki @ J[:, k].reshape(2, 2)
        cols.append([T[0, 0], T[0, 1], T[1, 0]])
    s = np.linalg.svd(np.array(cols).T, compute_uv=False)
    return int(np.sum(s > threshold * max(1.0, s[0])))


def _newton(A, B, M, tol: float, max_iters: int, predictor=None):
    """Correct ``(A, B)`` onto the fiber of ``M``; returns ``(A, B, residual)`` or ``None``."""
    if predictor is not None:
        if not np.all(np.isfinite(predictor)) or np.max(np.abs(predictor)) > 1.0:
            return None
        A, B = _step(A, B, predictor)
    res = np.max(np.abs(_comm(A, B) - M))
    # roundoff in [A, B] grows like |A|^2 |B|^2
    scale = (np.max(np.abs(A)) * np.max(np.abs(B))) ** 2
    tol = max(tol, 1e-15 * scale)
    for _ in range(max_iters):
        if res <= tol:
            return A, B, res
        J = _comm_jacobian(A, B)
        F = (_comm(A, B) - M).reshape(4)
        z = _solve_tangent(J, -F)
        size = np.max(np.abs(z))
        if not np.isfinite(size):
            return None
        if size > 0.5:
            z = z * (0.5 / size)
        A2, B2 = _step(A, B, z)
        res2 = np.max(np.abs(_comm(A2, B2) - M))
        if not np.isfinite(res2) or res2 > 4 * res + 1e-14:
            return None
        A, B, res = A2, B2, res2
    return (A, B, res) if res <= tol else None


def _sl2_normalize(M):
    r = cmath.sqrt(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    if r.real < 0:
        r = -r
    return M / r


def _track(A, B, M_from, M_to, tol, max_iters, t_from, t_to, min_frac=2.0 ** -12):
    """Follow the fiber from ``M_from`` to ``M_to`` with adaptive halving."""
    lam, frac = 0.0, 1.0
    M_cur = M_from
    while lam < 1.0:
        frac = min(frac, 1.0 - lam)
        nxt = lam + frac
        M_next = _sl2_normalize((1 - nxt) * M_from + nxt * M_to) if nxt < 1.0 else M_to
        J = _comm_jacobian(A, B)
        pred = _solve_tangent(J, (M_next - M_cur).reshape(4))
        got = _newton(A, B, M_next, tol, max_iters, pred)
        if got is None:
            frac /= 2
            if frac < min_frac:
                raise PathLiftError("corrector diverged", t_from + lam * (t_to - t_from))
            continue
        A, B, _ = got
        lam, M_cur = nxt, M_next
        frac = min(1.0, frac * 2)
    return A, B


# ---------------------------------------------------------------------------
# junction inside a single fiber


def _diagonalize(M: np.ndarray):
    """``P`` in SL(2) and ``m`` with ``M = P diag(m, 1/m) P^-1``; eigenvector
    phases make the first nonzero component real and positive."""
    tr = M[0, 0] + M[1, 1]
    disc = cmath.sqrt(tr * tr - 4)
    m1, m2 = (tr + disc) / 2, (tr - disc) / 2
    cols = []
    for lam in (m1, m2):
        r1 = np.array([M[0, 0] - lam, M[0, 1]])
        r2 = np.array([M[1, 0], M[1, 1] - lam])
        row = r1 if np.linalg.norm(r1) >= np.linalg.norm(r2) else r2
        v = np.array([-row[1], row[0]])
        v = v / np.linalg.norm(v)
        k = 0 if abs(v[0]) > 1e-14 else 1
        v = v * (abs(v[k]) / v[k])
        cols.append(v)
    P = np.array(cols).T
    P = P / cmath.sqrt(np.linalg.det(P))
    return P, m1


def _family_poly(kind: str, m: complex) -> Poly:
    """``key * det A * det B`` as a polynomial in ``(a, b, c, s, t)``."""
    a, b, c, s, t = (Poly.var(5, k) for k in range(5))
    if kind == "c":
        detA = c * c * (m * t * t) - b * c * (m * s * s) - a * c * (m * (m - 1)) * s * t
        key = c
    else:
        detA = c * c * (s * s * (1 / m)) + b * b * (m * t * t) - (2 * b * c + a * a * ((m - 1) ** 2)) * s * t
        key = a
    detB = a * a * m - b * c
    return key * detA * detB


def _continuous_root(values, prev=1 + 0j):
    out = []
    for v in values:
        r = cmath.sqrt(v)
        if abs(r - prev) > abs(-r - prev):
            r = -r
        out.append(r)
        prev = r
    return out


def _to_base(A, B, m, r, n_samples):
    """A path inside the fiber of ``diag(m, 1/m)`` from ``(A, B)`` to the base point."""
    kind = "c" if abs(B[1, 0]) >= abs(B[0, 0]) else "a"
    A_m = Mat2.from_numpy(A, sl2=False)
    B_m = Mat2.from_numpy(B, sl2=False)
    if kind == "c":
        start = family_c_coordinates(A_m, B_m)
        base = (1 / r, 0j, 1 + 0j, 0j, 1 / r)
        build = family_c_matrices
    else:
        start = family_a_coordinates(A_m, B_m, m)
        base = (1 / r, 0j, 1 + 0j, r, 0j)
        build = family_a_matrices
    poly = _family_poly(kind, m)
    line = path_avoiding_zeros(poly, start, base, n_samples)
    mats = [build(m, *q) for q in line.values]
    rootA = _continuous_root([Am.det() for Am, _ in mats])
    rootB = _continuous_root([Bm.det() for _, Bm in mats])
    pairs = [(Am.to_numpy() / ra, Bm.to_numpy() / rb) for (Am, Bm), ra, rb in zip(mats, rootA, rootB)]
    pairs[0] = (A, B)
    base_pt = fiber_base_point(m, r)
    A0, B0 = base_pt.A.to_numpy(), base_pt.B.to_numpy()
    eA = 1 if np.max(np.abs(pairs[-1][0] - A0)) < np.max(np.abs(pairs[-1][0] + A0)) else -1
    eB = 1 if np.max(np.abs(pairs[-1][1] - B0)) < np.max(np.abs(pairs[-1][1] + B0)) else -1
    pairs[-1] = (eA * A0, eB * B0)
    if (eA, eB) != (1, 1):
        flip = sign_flip_path(m, r, eA, eB, max(16, n_samples // 4))
        pairs += [(Af.to_numpy(), Bf.to_numpy()) for _, (Af, Bf) in reversed(flip.samples)][1:]
    return pairs


def fiber_junction(start: tuple, end: tuple, M: np.ndarray, n_samples: int = 200):
    """A sampled path of pairs inside the fiber of ``M`` from ``start`` to ``end``.

    ``M`` is conjugated to ``diag(m, 1/m)``; each endpoint is joined to the
    base point through the family (``c != 0`` or ``a != 0``) it lies in, with a
    continuous square root of the determinants and a final sign-flip path.
    """
    P, m = _diagonalize(M)
    Pi = _inv2(P)
    r = cmath.sqrt(m)
    a1 = [Pi @ X @ P for X in start]
    a2 = [Pi @ X @ P for X in end]
    leg1 = _to_base(a1[0], a1[1], m, r, n_samples)
    leg2 = _to_base(a2[0], a2[1], m, r, n_samples)
    pairs = leg1 + list(reversed(leg2))[1:]
    out = [(P @ X @ Pi, P @ Y @ Pi) for X, Y in pairs]
    out[0] = tuple(start)
    out[-1] = tuple(end)
    return out


# ---------------------------------------------------------------------------
# path lifting with fixed endpoints


def _scaled_tol(tol, A, B):
    return max(tol, 1e-13 * (np.max(np.abs(A)) * np.max(np.abs(B))) ** 2)


def random_fiber_point(rng: random.Random, M: Mat2, scale: float = 1.0) -> FiberPoint:
    """A random float point of the fiber over ``M`` (trace not +-2).

    Built in the ``c != 0`` family over the diagonal form of ``M`` with
    moderately sized parameters, then conjugated back.
    """
    Mn = M.to_numpy()
    P, m = _diagonalize(Mn)
    Pi = _inv2(P)

    def g():
        return complex(rng.gauss(0, scale), rng.gauss(0, scale))

    while True:
        a, c, s = g(), g(), g()
        if abs(c) < 0.3:
            continue
        b = (a * a * m - 1) / c
        qa, qb, qc = c * c * m, -a * c * m * (m - 1) * s, -(b * c * m * s * s + 1)
        t = (-qb + cmath.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)
        A, B = family_c_matrices(m, a, b, c, s, t)
        An, Bn = P @ A.to_numpy() @ Pi, P @ B.to_numpy() @ Pi
        if max(np.max(np.abs(An)), np.max(np.abs(Bn))) > 10 * (1 + scale):
            continue
        An, Bn = An / cmath.sqrt(np.linalg.det(An)), Bn / cmath.sqrt(np.linalg.det(Bn))
        fp = FiberPoint.make(Mat2.from_numpy(An), Mat2.from_numpy(Bn), M)
        if fp.residual <= 1e-11:
            return fp


def _np_pair(fp):
    if isinstance(fp, FiberPoint):
        return fp.A.to_numpy(), fp.B.to_numpy()
    A, B = fp
    return A.to_numpy(), B.to_numpy()


def lift_path_fixed_endpoints(M_path: MatrixPath, start: FiberPoint, end: FiberPoint,
                              step: float | None = None, window: int | None = None,
                              tol: float | None = None, junction_samples: int = 160) -> MatrixPath:
    """Lift a path of targets ``M(t)`` (traces away from +-2) to pairs with
    ``[A(t), B(t)] = M(t)``, starting at ``start`` and ending exactly at ``end``.

    The start is continued along the grid of ``M_path`` by a tangent predictor
    and a least-norm Newton corrector.  The lift reaches the fiber over ``M(1)``
    at some pair; a path inside that fiber to ``end`` is then spread over the
    last ``window`` samples, each of its points carried back along ``M`` to the
    sample's parameter.
    """
    cfg = DEFAULT_CONFIG
    tol = cfg.fiber_tol if tol is None else tol
    newton_tol = min(tol * 1e-3, 1e-12)
    iters = cfg.newton_max_iters
    ts = M_path.ts
    Ms = [M.to_numpy() for M in M_path.values]
    for t, M in zip(ts, Ms):
        tr = M[0, 0] + M[1, 1]
        if min(abs(tr - 2), abs(tr + 2)) <= 1e-9:
            raise PathLiftError(f"target trace is +-2 at t = {t}", t)
    A, B = _np_pair(start)
    if np.max(np.abs(_comm(A, B) - Ms[0])) > _scaled_tol(tol, A, B):
        raise ValueError("start is not in the fiber of M(0)")
    Ae, Be = _np_pair(end)
    if np.max(np.abs(_comm(Ae, Be) - Ms[-1])) > _scaled_tol(tol, Ae, Be):
        raise ValueError("end is not in the fiber of M(1)")

    n = len(ts) - 1
    lifted = [(A, B)]
    for k in range(n):
        sub = 1 if step is None else max(1, math.ceil((ts[k + 1] - ts[k]) / step))
        for j in range(sub):
            M_from = Ms[k] if j == 0 else _sl2_normalize((1 - j / sub) * Ms[k] + (j / sub) * Ms[k + 1])
            M_to = Ms[k + 1] if j == sub - 1 else _sl2_normalize((1 - (j + 1) / sub) * Ms[k] + ((j + 1) / sub) * Ms[k + 1])
            A, B = _track(A, B, M_from, M_to, newton_tol, iters, ts[k], ts[k + 1])
        lifted.append((A, B))

    if np.max(np.abs(A - Ae)) + np.max(np.abs(B - Be)) > 1e-12:
        W = window if window is not None else max(1, min(n // 4, 48))
        W = min(W, n)
        junction = fiber_junction((A, B), (Ae, Be), Ms[-1], junction_samples)
        L = len(junction)
        J0 = n - W
        for j in range(1, W + 1):
            idx = J0 + j
            X, Y = junction[round(j * (L - 1) / W)]
            for k in range(n, idx, -1):
                X, Y = _track(X, Y, Ms[k], Ms[k - 1], newton_tol, iters, ts[k], ts[k - 1])
            lifted[idx] = (X, Y)
    lifted[0] = _np_pair(start)
    samples = []
    for t, (X, Y) in zip(ts, lifted):
        samples.append((t, (Mat2.from_numpy(X), Mat2.from_numpy(Y))))
    samples[0] = (0.0, (start.A, start.B))
    samples[-1] = (1.0, (end.A, end.B))
    path = MatrixPath.from_samples(samples)
    path.info["max_residual"] = max(
        mat_commutator(Xm, Ym).max_dist(Mt) for (_, (Xm, Ym)), Mt in zip(samples, M_path.values))
    return path
