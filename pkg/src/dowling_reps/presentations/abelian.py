"""The projection μ and its abelianization π^ab onto Z^{|R|} × Z^N."""

from collections.abc import Iterable, Mapping
from typing import Protocol, Self

from pydantic import BaseModel, ConfigDict

from dowling_reps.presentations.model import UnknownGeneratorError
from dowling_reps.presentations.words import Word, format_word


def _clean(coords: Mapping[str, int]) -> dict[str, int]:
    return {k: v for k, v in sorted(coords.items()) if v}


class AbelianVector(BaseModel):
    """Finitely supported integer vector in Z^{|R|} × Z^N."""

    model_config = ConfigDict(frozen=True)

    f_coords: dict[str, int] = {}
    z_coords: dict[str, int] = {}

    @classmethod
    def of(
        cls,
        f_coords: Mapping[str, int] | None = None,
        z_coords: Mapping[str, int] | None = None,
    ) -> Self:
        """Build with zero entries dropped."""
        return cls(f_coords=_clean(f_coords or {}), z_coords=_clean(z_coords or {}))

    @classmethod
    def zero(cls) -> Self:
        """The zero vector."""
        return cls()

    @classmethod
    def basis(cls, key: str, coefficient: int = 1) -> Self:
        """coefficient·b_key in the Z^N part."""
        return cls.of(z_coords={key: coefficient})

    @classmethod
    def relator_basis(cls, key: str, coefficient: int = 1) -> Self:
        """coefficient·f_key in the Z^{|R|} part."""
        return cls.of(f_coords={key: coefficient})

    def __add__(self, other: "AbelianVector") -> "AbelianVector":
        """Componentwise sum."""
        f = dict(self.f_coords)
        for k, v in other.f_coords.items():
            f[k] = f.get(k, 0) + v
        z = dict(self.z_coords)
        for k, v in other.z_coords.items():
            z[k] = z.get(k, 0) + v
        return AbelianVector.of(f, z)

    def __neg__(self) -> "AbelianVector":
        """Componentwise negation."""
        return AbelianVector.of(
            {k: -v for k, v in self.f_coords.items()},
            {k: -v for k, v in self.z_coords.items()},
        )

    def __sub__(self, other: "AbelianVector") -> "AbelianVector":
        """Componentwise difference."""
        return self + (-other)

    def __mul__(self, k: int) -> "AbelianVector":
        """Integer multiple."""
        return AbelianVector.of(
            {key: k * v for key, v in self.f_coords.items()},
            {key: k * v for key, v in self.z_coords.items()},
        )

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        """No nonzero coordinate."""
        return not self.f_coords and not self.z_coords

    def z(self, key: str) -> int:
        """Coefficient of b_key."""
        return self.z_coords.get(key, 0)

    def f(self, key: str) -> int:
        """Coefficient of f_key."""
        return self.f_coords.get(key, 0)

    def __str__(self) -> str:
        """Sum notation such as f_r:1 + 5b_a."""
        terms = [
            f"{'' if v == 1 else v}f_{k}" for k, v in self.f_coords.items()
        ] + [f"{'' if v == 1 else v}b_{k}" for k, v in self.z_coords.items()]
        return " + ".join(terms) or "0"


def total(vectors: Iterable[AbelianVector]) -> AbelianVector:
    """Sum of vectors."""
    f: dict[str, int] = {}
    z: dict[str, int] = {}
    for vec in vectors:
        for k, v in vec.f_coords.items():
            f[k] = f.get(k, 0) + v
        for k, v in vec.z_coords.items():
            z[k] = z.get(k, 0) + v
    return AbelianVector.of(f, z)


class MuImage(BaseModel):
    """μ(x): a word over S ∪ {f_r} (∪ {z_k}) and a vector in Z^N."""

    model_config = ConfigDict(frozen=True)

    word: Word
    vector: AbelianVector

    def abelian(self, free_letters: Mapping[str, str]) -> AbelianVector:
        """π^ab: the vector plus exponent sums of relator letters f_r.

        free_letters maps f_key to key and its inverse to key + "'".
        """
        counts: dict[str, int] = {}
        for letter in self.word:
            key = free_letters.get(letter)
            if key is None:
                continue
            if key.endswith("'"):
                counts[key[:-1]] = counts.get(key[:-1], 0) - 1
            else:
                counts[key] = counts.get(key, 0) + 1
        return self.vector + AbelianVector.of(f_coords=counts)


def word_vector(word: Word, values: Mapping[str, AbelianVector]) -> AbelianVector:
    """Homomorphic extension of per-letter values to a word."""
    return total(values[letter] for letter in word)


class AbelianContext(Protocol):
    """Anything carrying π^ab values for its generators."""

    @property
    def abelian_values(self) -> Mapping[str, AbelianVector]:
        """π^ab of every generator id."""
        ...


def project_abelian(w: Word, ctx: AbelianContext) -> AbelianVector:
    """π^ab_{F,Z}(w) as the sum of per-generator values."""
    values = ctx.abelian_values
    for letter in w:
        if letter not in values:
            msg = f"Unknown generator {letter!r} in word {format_word(w)!r}"
            raise UnknownGeneratorError(msg)
    return word_vector(w, values)
