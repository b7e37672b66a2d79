"""Augmentation: four free letters z1..z4 and a generator t = s z1 s."""

from functools import cached_property
from typing import Any

from pydantic import BaseModel, ConfigDict

from dowling_reps.presentations.abelian import AbelianVector, MuImage, total
from dowling_reps.presentations.model import Presentation, UnknownGeneratorError
from dowling_reps.presentations.scrambling import ScrambledPresentation, u_id
from dowling_reps.presentations.words import (
    Word,
    format_word,
    formal_inverse_id,
    free_reduce,
    symmetric_closure,
    word_inverse,
)

Z_GENERATORS = ("z1", "z2", "z3", "z4")
T_GENERATOR = "t"
ZERO_DEGREE = (0, 0, 0, 0)

type Degree = tuple[int, int, int, int]


def v_id(i: int) -> str:
    """i-th break-up generator of the t relation."""
    return f"v{i}"


def signed_expansion(vector: AbelianVector) -> list[tuple[str, int]]:
    """A minimal-length signed sum of basis vectors, greedy in basis order."""
    if vector.f_coords:
        msg = f"Vector {vector} has a free-group part"
        raise ValueError(msg)
    terms: list[tuple[str, int]] = []
    for key, coefficient in sorted(vector.z_coords.items()):
        sign = 1 if coefficient > 0 else -1
        terms.extend((key, sign) for _ in range(abs(coefficient)))
    return terms


class AugmentedPresentation(BaseModel):
    """⟨S'' | R''⟩ over a scrambling, with deg_z on every generator."""

    model_config = ConfigDict(frozen=True)

    base: ScrambledPresentation
    result: Presentation
    z_gens: tuple[str, ...] = Z_GENERATORS
    t_gen: str = T_GENERATOR
    s_target: str
    expansion: tuple[tuple[str, int], ...]
    v_gens: tuple[str, ...]
    mu_images: dict[str, MuImage]
    degree_table: dict[str, Degree]

    @property
    def r(self) -> int:
        """Length of the signed expansion of −2π^ab(s')."""
        return len(self.expansion)

    @cached_property
    def letter_inverse(self) -> dict[str, str]:
        """Inverse map on S ∪ {f_r}^± ∪ {z_k}^±."""
        inverse = dict(self.base.letter_inverse)
        for z in self.z_gens:
            inverse[z] = formal_inverse_id(z)
            inverse[formal_inverse_id(z)] = z
        return inverse

    @cached_property
    def abelian_values(self) -> dict[str, AbelianVector]:
        """π^ab of every generator, zero on the z letters."""
        values = dict(self.base.abelian_values)
        free = self.base.free_letters
        values.update({g: m.abelian(free) for g, m in self.mu_images.items()})
        return values

    def image_of(self, gid: str) -> MuImage:
        """μ'' of one generator."""
        if gid in self.mu_images:
            return self.mu_images[gid]
        return self.base.mu_images[gid]

    def mu(self, word: Word) -> MuImage:
        """μ'' of a word over S''."""
        self.result.check_word(word)
        images = [self.image_of(g) for g in word]
        reduced = free_reduce(
            tuple(x for m in images for x in m.word),
            self.letter_inverse,
            self.base.prepared.neutral,
        )
        return MuImage(word=reduced, vector=total(m.vector for m in images))

    def to_json_dict(self) -> dict[str, Any]:
        """JSON export including μ'' and deg_z."""
        return self.model_dump(mode="json")


def degree_z(w: Word, ctx: AugmentedPresentation) -> Degree:
    """deg_z as the sum of per-generator degrees."""
    totals = [0, 0, 0, 0]
    for letter in w:
        degree = ctx.degree_table.get(letter)
        if degree is None:
            msg = f"Unknown generator {letter!r} in word {format_word(w)!r}"
            raise UnknownGeneratorError(msg)
        for k in range(4):
            totals[k] += degree[k]
    return (totals[0], totals[1], totals[2], totals[3])


def _word_degree(word: Word, z_gens: tuple[str, ...]) -> Degree:
    counts = [0, 0, 0, 0]
    for letter in word:
        for k, z in enumerate(z_gens):
            if letter == z:
                counts[k] += 1
            elif letter == formal_inverse_id(z):
                counts[k] -= 1
    return (counts[0], counts[1], counts[2], counts[3])


def augment(sp: ScrambledPresentation, s: str) -> AugmentedPresentation:
    """Add z1..z4 commuting with the Z^N part, and t with t = s z1 s."""
    if s not in sp.i_map:
        msg = f"Generator {s!r} is not in the base presentation"
        raise UnknownGeneratorError(msg)
    e = sp.result.neutral
    inv = formal_inverse_id
    z1, z2, z3, z4 = Z_GENERATORS
    letter_inverse = dict(sp.letter_inverse)
    for z in Z_GENERATORS:
        letter_inverse[z] = inv(z)
        letter_inverse[inv(z)] = z
    neutral = sp.prepared.neutral

    images: dict[str, MuImage] = {}
    new_ids: list[str] = []
    relators: list[Word] = []

    def image(gid: str) -> MuImage:
        return images[gid] if gid in images else sp.mu_images[gid]

    def define(gid: str, word: Word) -> None:
        parts = [image(g) for g in word]
        mu = MuImage(
            word=free_reduce(
                tuple(x for m in parts for x in m.word), letter_inverse, neutral
            ),
            vector=total(m.vector for m in parts),
        )
        new_ids.append(gid)
        images[gid] = mu
        images[inv(gid)] = MuImage(
            word=word_inverse(mu.word, letter_inverse), vector=-mu.vector
        )

    def chain(gid: str, word: Word) -> None:
        define(gid, word)
        relators.append((*word, inv(gid)))

    for z in Z_GENERATORS:
        new_ids.append(z)
        images[z] = MuImage(word=(z,), vector=AbelianVector())
        images[inv(z)] = MuImage(word=(inv(z),), vector=AbelianVector())
    for z in Z_GENERATORS:
        for b in sp.j_map.values():
            u = u_id(b, z)
            chain(u, (b, z))
            relators.append((u, inv(b), inv(z)))

    s_prime = sp.i_map[s]
    expansion = signed_expansion(sp.abelian_values[s_prime] * -2)
    steps = [
        sp.j_map[key] if sign > 0 else inv(sp.j_map[key]) for key, sign in expansion
    ]
    r = len(steps)
    vs = [v_id(i) for i in range(1, 6 + 3 * r)]
    chain(vs[0], (z3, s_prime))
    chain(vs[1], (vs[0], z1))
    chain(vs[2], (vs[1], s_prime))
    chain(vs[3], (inv(z3), vs[2]))
    previous = vs[3]
    for k, step in enumerate(steps):
        chain(vs[4 + 2 * k], (previous, z2))
        chain(vs[5 + 2 * k], (vs[4 + 2 * k], step))
        previous = vs[5 + 2 * k]
    chain(vs[4 + 2 * r], (z4, previous))
    for m in range(1, r + 1):
        chain(vs[4 + 2 * r + m], (vs[3 + 2 * r + m], inv(z2)))
    chain(T_GENERATOR, (inv(z4), vs[-1]))

    extended = sp.result.with_generators(new_ids)
    pairing = extended.inverse_of
    for g in new_ids:
        relators.extend([(g, inv(g), e), (inv(g), g, e)])
    closed = symmetric_closure(relators, pairing)
    result = extended.with_relators(sp.result.relators | closed)

    degrees: dict[str, Degree] = dict.fromkeys(sp.result.ids, ZERO_DEGREE)
    for g, mu in images.items():
        degrees[g] = _word_degree(mu.word, Z_GENERATORS)
    return AugmentedPresentation(
        base=sp,
        result=result,
        s_target=s,
        expansion=tuple(expansion),
        v_gens=tuple(vs),
        mu_images=images,
        degree_table=degrees,
    )
