"""Permutations of {0, …, n−1} and the normalized Hamming metric."""

from collections.abc import Sequence
from fractions import Fraction
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from dowling_reps.linalg.matrix import Matrix


class Permutation(BaseModel):
    """A bijection i ↦ images[i]; composition is (σ∘τ)(i) = σ(τ(i))."""

    model_config = ConfigDict(frozen=True)

    images: tuple[int, ...]

    @field_validator("images")
    @classmethod
    def validate_bijection(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        """Ensure images is a permutation of range(n)."""
        if sorted(v) != list(range(len(v))):
            msg = f"Not a permutation of 0..{len(v) - 1}: {v}"
            raise ValueError(msg)
        return v

    @classmethod
    def identity(cls, n: int) -> Self:
        """Identity on n points."""
        return cls(images=tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> Self:
        """Build from disjoint cycles, e.g. [[0, 1, 2]] for 0→1→2→0."""
        images = list(range(n))
        for cycle in cycles:
            for idx, point in enumerate(cycle):
                images[point] = cycle[(idx + 1) % len(cycle)]
        return cls(images=tuple(images))

    @classmethod
    def shift(cls, n: int, k: int) -> Self:
        """i ↦ i + k mod n."""
        return cls(images=tuple((i + k) % n for i in range(n)))

    @property
    def degree(self) -> int:
        """Number of points moved on."""
        return len(self.images)

    def __call__(self, i: int) -> int:
        """Image of a point."""
        return self.images[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """self∘other."""
        if other.degree != self.degree:
            msg = f"Degree mismatch: {self.degree} vs {other.degree}"
            raise ValueError(msg)
        return Permutation.model_construct(
            images=tuple(self.images[j] for j in other.images)
        )

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Alias for compose."""
        return self.compose(other)

    def inverse(self) -> "Permutation":
        """σ⁻¹."""
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation.model_construct(images=tuple(inv))

    def is_identity(self) -> bool:
        """Fixes every point."""
        return all(i == j for i, j in enumerate(self.images))

    def fixed_points(self) -> list[int]:
        """Points with σ(i) = i."""
        return [i for i, j in enumerate(self.images) if i == j]

    def is_derangement(self) -> bool:
        """Fixes no point."""
        return not self.fixed_points()

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles including fixed points, each starting at its least point."""
        seen = [False] * self.degree
        out: list[tuple[int, ...]] = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cycle = [start]
            seen[start] = True
            nxt = self.images[start]
            while nxt != start:
                cycle.append(nxt)
                seen[nxt] = True
                nxt = self.images[nxt]
            out.append(tuple(cycle))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        """Cycle lengths in decreasing order."""
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def to_matrix(self, p: int) -> Matrix:
        """Permutation matrix M with M·e_i = e_σ(i)."""
        n = self.degree
        entries = np.zeros((n, n), dtype=np.int64)
        entries[list(self.images), list(range(n))] = 1
        return Matrix(entries, p)

    def one_line(self) -> list[int]:
        """JSON form."""
        return list(self.images)


def hamming_distance(a: Permutation, b: Permutation) -> Fraction:
    """(1/n)·|{i : a(i) ≠ b(i)}|."""
    if a.degree != b.degree:
        msg = f"Degree mismatch: {a.degree} vs {b.degree}"
        raise ValueError(msg)
    if a.degree == 0:
        return Fraction(0)
    moved = sum(1 for x, y in zip(a.images, b.images, strict=True) if x != y)
    return Fraction(moved, a.degree)
