"""2x2 matrices over either scalar backend, Moebius fixed points, small solves."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..config import DEFAULT_CONFIG
from .scalars import QQi, exact, is_exact, is_zero, qqi_sqrt, sqrt

INFINITY = "inf"
"""Tag for the point at infinity of the Riemann sphere."""


def _unify(*xs):
    """Bring entries to a single backend: all QQi, or all complex."""
    if all(is_exact(x) for x in xs):
        return tuple(exact(x) for x in xs)
    if any(isinstance(x, QQi) for x in xs):
        raise TypeError("cannot mix exact and float entries in one matrix")
    return tuple(complex(x) for x in xs)


class Mat2:
    """An immutable 2x2 matrix ``[[a, b], [c, d]]``.

    ``sl2`` claims determinant one.  The claim is checked at construction
    (exactly on the exact backend, to ``det_tol`` on floats) unless
    ``check=False``; internal products of SL(2) matrices skip the check.
    """

    __slots__ = ("a", "b", "c", "d", "sl2")

    def __init__(self, a, b, c, d, sl2: bool = True, check: bool = True, det_tol: float | None = None):
        t = type(a)
        if not (t is type(b) is type(c) is type(d) and (t is QQi or t is complex)):
            a, b, c, d = _unify(a, b, c, d)
        self.a, self.b, self.c, self.d = a, b, c, d
        self.sl2 = sl2
        if sl2 and check:
            det = a * d - b * c
            if self.is_exact:
                if det != 1:
                    raise ValueError(f"matrix flagged SL(2) has determinant {det}")
            else:
                tol = DEFAULT_CONFIG.det_tol if det_tol is None else det_tol
                if abs(complex(det) - 1) > tol:
                    raise ValueError(f"matrix flagged SL(2) has determinant {det}")

    @classmethod
    def from_rows(cls, rows, **kw) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d, **kw)

    @classmethod
    def identity(cls, exact_backend: bool = True) -> "Mat2":
        if exact_backend:
            return cls(QQi(1), QQi(0), QQi(0), QQi(1), check=False)
        return cls(1 + 0j, 0j, 0j, 1 + 0j, check=False)

    @classmethod
    def diag(cls, x, y=None) -> "Mat2":
        zero = x * 0
        if y is None:
            y = 1 / x
            return cls(x, zero, zero, y, check=False)
        return cls(x, zero, zero, y, sl2=False)

    # ------------------------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return type(self.a) is QQi

    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def __mul__(self, other):
        if isinstance(other, Mat2):
            a, b, c, d = self.a, self.b, self.c, self.d
            e, f, g, h = other.a, other.b, other.c, other.d
            return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h,
                        sl2=self.sl2 and other.sl2, check=False)
        return Mat2(self.a * other, self.b * other, self.c * other, self.d * other, sl2=False)

    def __rmul__(self, other):
        return Mat2(other * self.a, other * self.b, other * self.c, other * self.d, sl2=False)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d, sl2=False)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d, sl2=False)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d, sl2=self.sl2, check=False)

    def inv(self) -> "Mat2":
        if self.sl2:
            return Mat2(self.d, -self.b, -self.c, self.a, check=False)
        det = self.det()
        if is_zero(det):
            raise ZeroDivisionError("singular matrix")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det, sl2=False)

    def __pow__(self, n: int) -> "Mat2":
        base = self if n >= 0 else self.inv()
        n = abs(n)
        result = Mat2.identity(self.is_exact)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj_by(self, g: "Mat2") -> "Mat2":
        """Return ``g * self * g^-1``."""
        return g * self * g.inv()

    def apply(self, v):
        """Matrix times the column vector ``v = (x, y)``."""
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def max_dist(self, other: "Mat2") -> float:
        return max(abs(complex(x) - complex(y)) for x, y in zip(self.entries, other.entries))

    def norm(self) -> float:
        return max(abs(complex(x)) for x in self.entries)

    def allclose(self, other: "Mat2", tol: float = 1e-9) -> bool:
        return self.max_dist(other) <= tol

    def is_identity(self, tol: float = 0.0) -> bool:
        if self.is_exact:
            return self.a == 1 and self.d == 1 and not self.b and not self.c
        return self.allclose(Mat2.identity(False), tol)

    def is_central(self, tol: float = 0.0) -> bool:
        """True for +I or -I."""
        return self.is_identity(tol) or (-self).is_identity(tol)

    def to_float(self) -> "Mat2":
        return Mat2(complex(self.a), complex(self.b), complex(self.c), complex(self.d), sl2=self.sl2, check=False)

    def to_exact(self) -> "Mat2":
        return Mat2(exact(self.a), exact(self.b), exact(self.c), exact(self.d), sl2=self.sl2)

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(self.a), complex(self.b)], [complex(self.c), complex(self.d)]])

    @classmethod
    def from_numpy(cls, arr, sl2: bool = True, check: bool = False) -> "Mat2":
        return cls(complex(arr[0, 0]), complex(arr[0, 1]), complex(arr[1, 0]), complex(arr[1, 1]), sl2=sl2, check=check)

    def __repr__(self):
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


def mat_commutator(A: Mat2, B: Mat2) -> Mat2:
    """``[A, B] = A B A^-1 B^-1``."""
    return A * B * A.inv() * B.inv()


def normalize_sl2(M: Mat2, root=None) -> Mat2:
    """Scale a GL(2) matrix to determinant one by ``1/root``, ``root^2 = det``."""
    if root is None:
        root = sqrt(M.det())
    return Mat2(M.a / root, M.b / root, M.c / root, M.d / root, check=False)


# ---------------------------------------------------------------------------
# Moebius fixed points


@dataclass(frozen=True)
class MoebiusFixedPoints:
    """Fixed points of ``z -> (a z + b) / (c z + d)`` on the Riemann sphere.

    ``count`` is ``"all"`` for +-I.  ``exact`` is False when the exact input
    has fixed points outside Q(i) and float approximations are reported.
    """

    count: object
    points: tuple
    exact: bool = True

    def __contains__(self, z):
        return any(_same_point(z, p) for p in self.points)


def _same_point(z, w, tol: float = 1e-8) -> bool:
    if z == INFINITY or w == INFINITY:
        return z == w
    if is_exact(z) and is_exact(w):
        return exact(z) == exact(w)
    return abs(complex(z) - complex(w)) <= tol


def moebius(A: Mat2, z):
    """Image of a point of the Riemann sphere under ``A``."""
    if z == INFINITY:
        return INFINITY if is_zero(A.c, 0.0) else A.a / A.c
    den = A.c * z + A.d
    if is_zero(den, 0.0) and is_exact(den):
        return INFINITY
    if not is_exact(den) and den == 0:
        return INFINITY
    return (A.a * z + A.b) / den


def fixed_points(A: Mat2, tol: float | None = None) -> MoebiusFixedPoints:
    """All fixed points of the Moebius action of ``A``.

    Solves ``c z^2 + (d - a) z - b = 0``; ``INFINITY`` is reported when the
    lower-left entry vanishes.
    """
    tol = DEFAULT_CONFIG.fixpoint_tol if tol is None else tol
    ex = A.is_exact
    ztol = 0.0 if ex else tol
    a, b, c, d = A.entries
    if is_zero(b, ztol) and is_zero(c, ztol) and is_zero(a - d, ztol):
        return MoebiusFixedPoints("all", (), True)
    if is_zero(c, ztol):
        if is_zero(d - a, ztol):
            return MoebiusFixedPoints(1, (INFINITY,), True)
        return MoebiusFixedPoints(2, (b / (d - a), INFINITY), True)
    disc = (a - d) * (a - d) + 4 * b * c
    if is_zero(disc, ztol):
        return MoebiusFixedPoints(1, ((a - d) / (2 * c),), True)
    if ex:
        root = qqi_sqrt(disc)
        if root is not None:
            return MoebiusFixedPoints(2, (((a - d) - root) / (2 * c), ((a - d) + root) / (2 * c)), True)
        Af = A.to_float()
        pts = fixed_points(Af, tol).points
        return MoebiusFixedPoints(2, pts, False)
    root = sqrt(disc)
    return MoebiusFixedPoints(2, (((a - d) - root) / (2 * c), ((a - d) + root) / (2 * c)), True)


def eigenvectors(A: Mat2):
    """Eigenvectors of ``A`` as ``(eigenvalue, (x, y))`` pairs.

    Exact input yields exact vectors when the eigenvalues lie in Q(i); the
    flag in the return value says whether the result is exact.
    """
    a, b, c, d = A.entries
    tr = a + d
    disc = tr * tr - 4 * A.det()
    exact_ok = A.is_exact
    if exact_ok:
        root = qqi_sqrt(disc)
        if root is None:
            return eigenvectors(A.to_float())[0], False
    else:
        root = sqrt(disc)
    lams = [(tr + root) / 2, (tr - root) / 2]
    if is_zero(root, 0.0 if exact_ok else 1e-14):
        lams = lams[:1]
    out = []
    for lam in lams:
        # rows of A - lam I: (a - lam, b), (c, d - lam); pick the larger row
        r1 = (a - lam, b)
        r2 = (c, d - lam)
        row = r1 if abs(complex(r1[0])) + abs(complex(r1[1])) >= abs(complex(r2[0])) + abs(complex(r2[1])) else r2
        if is_zero(row[0], 0.0) and is_zero(row[1], 0.0):
            # A is scalar: every vector is an eigenvector
            one, zero = (QQi(1), QQi(0)) if exact_ok else (1 + 0j, 0j)
            out.append((lam, (one, zero)))
            out.append((lam, (zero, one)))
            continue
        out.append((lam, (-row[1], row[0])))
    return out, exact_ok


def parallel(v, w, tol: float = 0.0) -> bool:
    """Whether two vectors in C^2 span the same line."""
    det = v[0] * w[1] - v[1] * w[0]
    if is_exact(det):
        return not det
    scale = max(abs(complex(v[0])), abs(complex(v[1]))) * max(abs(complex(w[0])), abs(complex(w[1])))
    return abs(det) <= tol * max(scale, 1e-300)


# ---------------------------------------------------------------------------
# small dense linear algebra (both backends)


def solve_linear(matrix: Sequence[Sequence], rhs: Sequence):
    """Solve a square system by Gaussian elimination.

    Works over QQi (exact pivots) or complex (partial pivoting).  Raises
    ``ZeroDivisionError`` when the system is singular.
    """
    n = len(matrix)
    rows = [list(matrix[i]) + [rhs[i]] for i in range(n)]
    ex = all(is_exact(x) for row in rows for x in row)
    for col in range(n):
        if ex:
            piv = next((r for r in range(col, n) if rows[r][col]), None)
        else:
            piv = max(range(col, n), key=lambda r: abs(complex(rows[r][col])))
            if abs(complex(rows[piv][col])) == 0:
                piv = None
        if piv is None:
            raise ZeroDivisionError("singular linear system")
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        for r in range(col + 1, n):
            f = rows[r][col] / p
            if (ex and f) or (not ex and f != 0):
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    sol = [None] * n
    for i in range(n - 1, -1, -1):
        acc = rows[i][n]
        for j in range(i + 1, n):
            acc = acc - rows[i][j] * sol[j]
        sol[i] = acc / rows[i][i]
    return sol


def determinant(matrix: Sequence[Sequence]):
    """Determinant by elimination (exact or float)."""
    n = len(matrix)
    rows = [list(r) for r in matrix]
    ex = all(is_exact(x) for row in rows for x in row)
    det = QQi(1) if ex else 1 + 0j
    for col in range(n):
        if ex:
            piv = next((r for r in range(col, n) if rows[r][col]), None)
        else:
            piv = max(range(col, n), key=lambda r: abs(complex(rows[r][col])))
            if rows[piv][col] == 0:
                piv = None
        if piv is None:
            return det * 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        p = rows[col][col]
        det = det * p
        for r in range(col + 1, n):
            f = rows[r][col] / p
            rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return det
