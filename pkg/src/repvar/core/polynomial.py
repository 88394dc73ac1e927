"""Sparse multivariate polynomials with complex (or exact) coefficients."""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as P


class Poly:
    """``{exponent tuple: coefficient}`` in a fixed number of variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError("exponent tuple has the wrong length")
            if coef != 0:
                self.terms[exps] = self.terms.get(exps, 0) + coef

    @classmethod
    def var(cls, nvars: int, k: int, coef=1) -> "Poly":
        e = [0] * nvars
        e[k] = 1
        return cls(nvars, {tuple(e): coef})

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    def _lift(self, other):
        return other if isinstance(other, Poly) else Poly.const(self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __call__(self, point):
        total = 0
        for exps, coef in self.terms.items():
            term = coef
            for x, e in zip(point, exps):
                if e:
                    term = term * x ** e
            total = total + term
        return total

    def restrict_to_line(self, x, y) -> np.ndarray:
        """Coefficients (low to high) of ``tau -> p(x + tau (y - x))``."""
        x = np.asarray(x, dtype=complex)
        d = np.asarray(y, dtype=complex) - x
        out = np.zeros(1, dtype=complex)
        for exps, coef in self.terms.items():
            term = np.array([complex(coef)])
            for k, e in enumerate(exps):
                if e:
                    term = P.polymul(term, P.polypow(np.array([x[k], d[k]]), e))
            out = P.polyadd(out, term)
        return np.atleast_1d(out)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __repr__(self):
        return f"Poly({self.nvars}, {self.terms})"
