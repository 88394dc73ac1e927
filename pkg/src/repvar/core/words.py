"""Freely reduced words in a free group and the presentations that use them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


class FreeWord:
    """A freely reduced word, stored as ``((generator, exponent), ...)``.

    Reduction is eager: adjacent letters on the same generator merge and
    zero exponents vanish, so the empty tuple is the identity.
    """

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable = ()):
        out: list[list[int]] = []
        for g, e in letters:
            g, e = int(g), int(e)
            if g < 0:
                raise ValueError("generator index must be nonnegative")
            if not e:
                continue
            if out and out[-1][0] == g:
                out[-1][1] += e
                if not out[-1][1]:
                    out.pop()
            else:
                out.append([g, e])
        self.letters = tuple((g, e) for g, e in out)

    @classmethod
    def gen(cls, index: int, exponent: int = 1) -> "FreeWord":
        return cls(((index, exponent),))

    @classmethod
    def identity(cls) -> "FreeWord":
        return cls()

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def __pow__(self, n: int) -> "FreeWord":
        base = self if n >= 0 else self.inverse()
        return FreeWord(base.letters * abs(n))

    def inverse(self) -> "FreeWord":
        return FreeWord((g, -e) for g, e in reversed(self.letters))

    def conj(self, y: "FreeWord") -> "FreeWord":
        """``self^y = y^-1 self y``."""
        return y.inverse() * self * y

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def substitute(self, images: dict) -> "FreeWord":
        """Replace generator ``g`` by ``images[g]`` (others are kept)."""
        out = FreeWord()
        for g, e in self.letters:
            out = out * (images[g] ** e if g in images else FreeWord.gen(g, e))
        return out

    def __eq__(self, other):
        return isinstance(other, FreeWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __lt__(self, other: "FreeWord"):
        return (len(self), self.letters) < (len(other), other.letters)

    def to_string(self, names=None) -> str:
        if not self.letters:
            return "1"
        parts = []
        for g, e in self.letters:
            name = names[g] if names else f"x{g}"
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)

    def __repr__(self):
        return f"FreeWord({list(self.letters)})"


def commutator(x: FreeWord, y: FreeWord) -> FreeWord:
    """``[x, y] = x y x^-1 y^-1``."""
    return x * y * x.inverse() * y.inverse()


def alpha(i: int) -> FreeWord:
    """The generator alpha_i (1-based handle index) of a surface presentation."""
    return FreeWord.gen(2 * (i - 1))


def beta(i: int) -> FreeWord:
    return FreeWord.gen(2 * (i - 1) + 1)


def handle_commutator(i: int) -> FreeWord:
    return commutator(alpha(i), beta(i))


def boundary_word(handles: Iterable[int]) -> FreeWord:
    """Product of ``[alpha_i, beta_i]`` over the given handles, in order."""
    w = FreeWord()
    for i in handles:
        w = w * handle_commutator(i)
    return w


def parse_word(text: str, names) -> FreeWord:
    """Parse ``"a1*b1^-1*a2"`` against a list of generator names."""
    text = text.strip()
    if text in ("", "1"):
        return FreeWord()
    index = {n: k for k, n in enumerate(names)}
    letters = []
    for tok in text.split("*"):
        tok = tok.strip()
        name, _, exp = tok.partition("^")
        if name not in index:
            raise ValueError(f"unknown generator {name!r}")
        letters.append((index[name], int(exp) if exp else 1))
    return FreeWord(letters)


@dataclass(frozen=True)
class Presentation:
    """Either a free group of a given rank or a closed surface group.

    Surface generators are ordered ``alpha_1, beta_1, alpha_2, ...``.
    """

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("free", "surface"):
            raise ValueError(f"unknown presentation kind {self.kind!r}")
        if self.kind == "surface" and self.size < 2:
            raise ValueError("surface presentations need genus >= 2")
        if self.kind == "free" and self.size < 1:
            raise ValueError("free presentations need rank >= 1")

    @classmethod
    def free(cls, rank: int) -> "Presentation":
        return cls("free", rank)

    @classmethod
    def surface(cls, genus: int) -> "Presentation":
        return cls("surface", genus)

    @property
    def genus(self) -> int:
        if self.kind != "surface":
            raise AttributeError("free presentations have no genus")
        return self.size

    @property
    def rank(self) -> int:
        return self.size if self.kind == "free" else 2 * self.size

    @property
    def num_generators(self) -> int:
        return self.rank

    @property
    def names(self) -> list[str]:
        if self.kind == "free":
            return [f"x{k + 1}" for k in range(self.size)]
        out = []
        for i in range(1, self.size + 1):
            out += [f"a{i}", f"b{i}"]
        return out

    @property
    def relator(self) -> FreeWord | None:
        if self.kind != "surface":
            return None
        return boundary_word(range(1, self.size + 1))

    def to_dict(self) -> dict:
        key = "genus" if self.kind == "surface" else "rank"
        return {"kind": self.kind, key: self.size}
