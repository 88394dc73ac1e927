"""Complex scalars with an exact (Gaussian rational) and a float backend.

The float backend is plain Python ``complex``.  The exact backend is
:class:`QQi`, an element of Q(i) stored as two ``gmpy2.mpq`` parts.  The two
backends never mix: arithmetic between a ``QQi`` and a ``float``/``complex``
raises ``TypeError``.  Integers and rationals promote to either backend.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpq

_mpq_type = type(mpq(0))
_RATIONALS = (int, _mpq_type, Fraction)


def _to_mpq(x):
    if isinstance(x, _mpq_type):
        return x
    if isinstance(x, bool):
        return mpq(int(x))
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(x)
    if isinstance(x, Rational):
        return mpq(x.numerator, x.denominator)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class QQi:
    """Gaussian rational ``re + im*i`` with exact equality."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QQi):
            if im:
                raise TypeError("QQi(QQi, im) is ambiguous")
            self.re, self.im = re.re, re.im
            return
        self.re = _to_mpq(re)
        self.im = _to_mpq(im)

    @staticmethod
    def _make(re, im):
        z = object.__new__(QQi)
        z.re = re
        z.im = im
        return z

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QQi):
            return other
        if isinstance(other, _RATIONALS):
            return QQi._make(_to_mpq(other), _ZERO)
        if isinstance(other, (float, complex)):
            raise TypeError("refusing to mix exact QQi with a float value")
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QQi._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QQi._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QQi._make(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        if isinstance(other, QQi):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b:
                return QQi._make(a * c, a * d)
            if not d:
                return QQi._make(a * c, b * c)
            return QQi._make(a * c - b * d, a * d + b * c)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QQi._make(self.re * o.re, self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "QQi":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("QQi division by zero")
        return QQi._make(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.im:
            if not o.re:
                raise ZeroDivisionError("QQi division by zero")
            return QQi._make(self.re / o.re, self.im / o.re)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __neg__(self):
        return QQi._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("QQi only supports integer powers")
        if n < 0:
            return self.inverse() ** (-n)
        result = QQi._make(_ONE, _ZERO)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "QQi":
        return QQi._make(self.re, -self.im)

    def norm(self):
        """Field norm re^2 + im^2 (an exact rational)."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return abs(complex(self))

    # comparisons ------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, _RATIONALS):
            return not self.im and self.re == _to_mpq(other)
        if isinstance(other, (float, complex)):
            return False
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    # conversion -----------------------------------------------------------
    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"QQi({_fmt(self.re)!r}, {_fmt(self.im)!r})"

    def __str__(self):
        if not self.im:
            return _fmt(self.re)
        if not self.re:
            return f"{_fmt(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{_fmt(self.re)}{sign}{_fmt(abs(self.im))}i"


_ZERO = mpq(0)
_ONE = mpq(1)
I_UNIT = QQi._make(_ZERO, _ONE)


def _fmt(q) -> str:
    q = _to_mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# backend helpers


def is_exact(x) -> bool:
    return isinstance(x, (QQi,) + _RATIONALS)


def exact(x) -> QQi:
    """Promote an int/rational/QQi/"p/q" string to ``QQi``."""
    if isinstance(x, QQi):
        return x
    if isinstance(x, (float, complex)):
        raise TypeError("float values have no exact representation here")
    return QQi(x)


def to_complex(x) -> complex:
    return complex(x)


def is_zero(x, tol: float = 0.0) -> bool:
    """Exact zero test for exact values; ``|x| <= tol`` for floats."""
    if is_exact(x):
        return not x
    return abs(x) <= tol


def isqrt_exact(q):
    """Square root of a nonnegative rational if it is a perfect square, else None."""
    q = _to_mpq(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    if not (gmpy2.is_square(n) and gmpy2.is_square(d)):
        return None
    return mpq(gmpy2.isqrt(n), gmpy2.isqrt(d))


def qqi_sqrt(z: QQi):
    """Exact square root in Q(i), or ``None`` when ``z`` is not a square.

    The returned root has positive real part, or nonnegative imaginary part
    when the real part is zero.
    """
    z = exact(z)
    if not z:
        return QQi()
    r = isqrt_exact(z.norm())
    if r is None:
        return None
    x = isqrt_exact((r + z.re) / 2)
    y = isqrt_exact((r - z.re) / 2)
    if x is None or y is None:
        return None
    if z.im < 0:
        y = -y
    root = QQi._make(x, y)
    if root.re < 0 or (not root.re and root.im < 0):
        root = -root
    return root


def sqrt(z, prefer_exact: bool = True):
    """Square root on either backend.

    For exact input an exact root is returned when it exists; otherwise a
    ``ValueError`` is raised.  Float input uses the principal branch.
    """
    if is_exact(z) and prefer_exact:
        root = qqi_sqrt(exact(z))
        if root is None:
            raise ValueError(f"{z} is not a square in Q(i)")
        return root
    return cmath.sqrt(complex(z))


def _split_complex(s: str):
    if not s.endswith(("i", "j")):
        return s, "0"
    body = s[:-1]
    cut = -1
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            cut = k
            break
    if cut < 0:
        re_txt, im_txt = "0", body
    else:
        re_txt, im_txt = body[:cut], body[cut:]
    if im_txt in ("", "+"):
        im_txt = "1"
    elif im_txt == "-":
        im_txt = "-1"
    return re_txt, im_txt


def parse_scalar(text: str):
    """Parse ``"3/2"``, ``"1-2i"``, ``"0.5+0.25j"``, ``"i"`` and similar.

    Text without a decimal point or exponent is parsed exactly.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    re_txt, im_txt = _split_complex(s)
    try:
        if any(ch in s for ch in ".eE"):
            return complex(float(re_txt), float(im_txt))
        return QQi(mpq(re_txt), mpq(im_txt))
    except ValueError:
        raise ValueError(f"cannot parse scalar {text!r}") from None


def random_qqi(rng, num: int = 4, den: int = 3, nonzero: bool = False, real_only: bool = False) -> QQi:
    """A small random Gaussian rational drawn from ``rng`` (a ``random.Random``)."""
    while True:
        re_ = mpq(rng.randint(-num, num), rng.randint(1, den))
        im_ = _ZERO if real_only else mpq(rng.randint(-num, num), rng.randint(1, den))
        z = QQi._make(re_, im_)
        if z or not nonzero:
            return z


def random_complex(rng, scale: float = 1.0) -> complex:
    return complex(rng.gauss(0.0, scale), rng.gauss(0.0, scale))
