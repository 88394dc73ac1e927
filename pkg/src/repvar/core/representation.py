"""Representations of free and surface groups into SL(2, C), and characters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..config import DEFAULT_CONFIG
from .linalg import Mat2, mat_commutator
from .words import FreeWord, Presentation


class Representation:
    """Generator images for a presentation.

    Every image must be SL(2).  For surface presentations the relator is
    checked exactly (exact backend) or to ``relator_tol`` (floats) unless
    ``validate=False``.
    """

    __slots__ = ("presentation", "images", "_inv")

    def __init__(self, presentation: Presentation, images: Sequence[Mat2], validate: bool = True,
                 relator_tol: float | None = None):
        images = tuple(images)
        if len(images) != presentation.num_generators:
            raise ValueError(f"expected {presentation.num_generators} images, got {len(images)}")
        for k, m in enumerate(images):
            if not m.sl2:
                raise ValueError(f"image {k} is not flagged SL(2)")
        self.presentation = presentation
        self.images = images
        self._inv = tuple(m.inv() for m in images)
        if validate and presentation.kind == "surface":
            res = self.relator_residual()
            tol = DEFAULT_CONFIG.relator_tol if relator_tol is None else relator_tol
            if (self.is_exact and res != 0) or res > tol:
                raise ValueError(f"relator is not satisfied (residual {res:.3e})")

    @classmethod
    def free(cls, images: Sequence[Mat2]) -> "Representation":
        return cls(Presentation.free(len(images)), images)

    @classmethod
    def surface(cls, images: Sequence[Mat2], validate: bool = True) -> "Representation":
        if len(images) % 2:
            raise ValueError("a surface representation needs an even number of images")
        return cls(Presentation.surface(len(images) // 2), images, validate=validate)

    @property
    def is_exact(self) -> bool:
        return all(m.is_exact for m in self.images)

    def __getitem__(self, k: int) -> Mat2:
        return self.images[k]

    def evaluate(self, w: FreeWord) -> Mat2:
        return evaluate_word(self, w)

    def relator_residual(self) -> float:
        rel = self.presentation.relator
        if rel is None:
            return 0.0
        val = self.evaluate(rel)
        if self.is_exact:
            return 0.0 if val.is_identity() else max(val.max_dist(Mat2.identity()), 1e-300)
        return val.max_dist(Mat2.identity(False))

    def conjugate(self, g: Mat2) -> "Representation":
        gi = g.inv()
        imgs = [_sl2(g * m * gi) for m in self.images]
        return Representation(self.presentation, imgs, validate=False)

    def with_images(self, images: Sequence[Mat2], validate: bool = True) -> "Representation":
        return Representation(self.presentation, images, validate=validate)

    def to_float(self) -> "Representation":
        return Representation(self.presentation, [m.to_float() for m in self.images], validate=False)

    def __eq__(self, other):
        return isinstance(other, Representation) and self.presentation == other.presentation and self.images == other.images

    def __hash__(self):
        return hash((self.presentation, self.images))

    def __repr__(self):
        return f"Representation({self.presentation.to_dict()}, {list(self.images)})"


def _sl2(m: Mat2) -> Mat2:
    return Mat2(m.a, m.b, m.c, m.d, check=False)


def evaluate_word(rho: Representation, w: FreeWord) -> Mat2:
    """Image of ``w`` under ``rho``; the empty word maps to the identity."""
    n = len(rho.images)
    result = None
    for g, e in w.letters:
        if g >= n:
            raise IndexError(f"generator index {g} out of range for {n} generators")
        base = rho.images[g] if e > 0 else rho._inv[g]
        for _ in range(abs(e)):
            result = base if result is None else result * base
    if result is None:
        return Mat2.identity(rho.is_exact)
    return result


@dataclass(frozen=True)
class Character:
    """Traces of a representation on a fixed list of words."""

    words: tuple
    values: tuple

    def __getitem__(self, w: FreeWord):
        return self.values[self.words.index(w)]

    def as_dict(self) -> dict:
        return dict(zip(self.words, self.values))

    def max_dist(self, other: "Character") -> float:
        if self.words != other.words:
            raise ValueError("characters on different word lists")
        return max((abs(complex(x) - complex(y)) for x, y in zip(self.values, other.values)), default=0.0)


def character_of(rho: Representation, words: Sequence[FreeWord]) -> Character:
    words = tuple(words)
    return Character(words, tuple(evaluate_word(rho, w).trace() for w in words))


__all__ = ["Representation", "Character", "evaluate_word", "character_of", "mat_commutator"]
