"""JSON encodings shared by every command.

A scalar is ``[re, im]``; exact parts are ``"p/q"`` strings and float parts
are JSON numbers.  A matrix is a row-major 2x2 array of scalars.
"""

from __future__ import annotations

from gmpy2 import mpq

from .linalg import Mat2
from .representation import Representation
from .scalars import QQi, _fmt
from .words import FreeWord, Presentation


def scalar_to_json(x):
    if isinstance(x, QQi):
        return [_fmt(x.re), _fmt(x.im)]
    if isinstance(x, (int, mpq)):
        return [_fmt(x), "0"]
    z = complex(x)
    return [z.real, z.imag]


def _part(p):
    if isinstance(p, str):
        if any(ch in p for ch in ".eE"):
            return float(p)
        return mpq(p)
    if isinstance(p, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(p, int):
        return mpq(p)
    return float(p)


def scalar_from_json(obj):
    if isinstance(obj, (int, float, str)):
        obj = [obj, 0]
    if not (isinstance(obj, list) and len(obj) == 2):
        raise ValueError(f"bad scalar encoding {obj!r}")
    re_, im_ = _part(obj[0]), _part(obj[1])
    if isinstance(re_, float) or isinstance(im_, float):
        return complex(float(re_), float(im_))
    return QQi(re_, im_)


def mat_to_json(m: Mat2):
    return [[scalar_to_json(m.a), scalar_to_json(m.b)], [scalar_to_json(m.c), scalar_to_json(m.d)]]


def mat_from_json(obj, sl2: bool = True, check: bool = True) -> Mat2:
    (a, b), (c, d) = obj
    return Mat2(scalar_from_json(a), scalar_from_json(b), scalar_from_json(c), scalar_from_json(d),
                sl2=sl2, check=check)


def word_to_json(w: FreeWord):
    return [[g, e] for g, e in w.letters]


def word_from_json(obj) -> FreeWord:
    return FreeWord((g, e) for g, e in obj)


def presentation_from_json(obj) -> Presentation:
    kind = obj["kind"]
    return Presentation(kind, int(obj["genus"] if kind == "surface" else obj["rank"]))


def rep_to_json(rho: Representation) -> dict:
    return {"presentation": rho.presentation.to_dict(), "images": [mat_to_json(m) for m in rho.images]}


def rep_from_json(obj, validate: bool = True) -> Representation:
    pres = presentation_from_json(obj["presentation"])
    return Representation(pres, [mat_from_json(m) for m in obj["images"]], validate=validate)
