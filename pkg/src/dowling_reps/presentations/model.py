"""Group presentation data model."""

from collections.abc import Iterable
from functools import cached_property
from typing import Any, Self

from pydantic import BaseModel, ConfigDict, field_serializer, model_validator

from dowling_reps.core.audit import AuditReport
from dowling_reps.presentations.words import (
    NEUTRAL,
    Word,
    base_id,
    cyclic_shifts,
    format_word,
    formal_inverse_id,
    symmetric_closure,
    word_inverse,
    word_key,
)

WITNESS_LIMIT = 5


class UnknownGeneratorError(ValueError):
    """A word uses a letter outside the generator set."""


class NotSymmetricTriangularError(ValueError):
    """An operation needs a symmetric triangular presentation."""


class Generator(BaseModel):
    """A generator id and the id of its formal inverse."""

    model_config = ConfigDict(frozen=True)

    id: str
    inverse_id: str


def generator_sort_key(gid: str, neutral: str) -> tuple[bool, str, bool]:
    """Neutral first, then pairs by base id with the unprimed member first."""
    return (gid != neutral, base_id(gid), gid != base_id(gid))


class Presentation(BaseModel):
    """Generators with a formal-inverse pairing, relator words and a neutral id."""

    model_config = ConfigDict(frozen=True)

    generators: tuple[Generator, ...]
    relators: frozenset[Word]
    neutral: str = NEUTRAL

    @model_validator(mode="before")
    @classmethod
    def sort_generators(cls, data: Any) -> Any:
        """Store generators in canonical order."""
        if isinstance(data, dict) and "generators" in data:
            neutral = data.get("neutral", NEUTRAL)
            gens = [
                g if isinstance(g, Generator) else Generator.model_validate(g)
                for g in data["generators"]
            ]
            data = {
                **data,
                "generators": tuple(
                    sorted(gens, key=lambda g: generator_sort_key(g.id, neutral))
                ),
            }
        return data

    @model_validator(mode="after")
    def validate_pairing(self) -> Self:
        """Inverse pairing is an involution, neutral is self-paired, letters known."""
        pairing = {g.id: g.inverse_id for g in self.generators}
        if len(pairing) != len(self.generators):
            msg = "Duplicate generator ids"
            raise ValueError(msg)
        if pairing.get(self.neutral) != self.neutral:
            msg = f"Neutral generator {self.neutral!r} must exist and be self-inverse"
            raise ValueError(msg)
        for gid, inv in pairing.items():
            if pairing.get(inv) != gid:
                msg = f"Inverse pairing is not an involution at {gid!r} -> {inv!r}"
                raise ValueError(msg)
        for relator in self.relators:
            for letter in relator:
                if letter not in pairing:
                    msg = f"Relator {format_word(relator)!r} uses unknown {letter!r}"
                    raise UnknownGeneratorError(msg)
        return self

    @field_serializer("relators")
    def serialize_relators(self, relators: frozenset[Word]) -> list[list[str]]:
        """Relators in lexicographic order for stable output."""
        return [list(r) for r in sorted(relators, key=word_key)]

    @classmethod
    def build(
        cls,
        generator_ids: Iterable[str],
        relators: Iterable[Word],
        neutral: str = NEUTRAL,
        involutions: Iterable[str] = (),
    ) -> "Presentation":
        """Create a presentation, adding the neutral id and formal inverses."""
        involution_set = set(involutions)
        pairing: dict[str, str] = {neutral: neutral}
        for gid in generator_ids:
            if gid == neutral or gid in pairing:
                continue
            if gid in involution_set:
                pairing[gid] = gid
                continue
            inv = formal_inverse_id(gid)
            pairing[gid] = inv
            pairing[inv] = gid
        gens = [Generator(id=g, inverse_id=i) for g, i in pairing.items()]
        return cls(
            generators=tuple(gens),
            relators=frozenset(tuple(r) for r in relators),
            neutral=neutral,
        )

    @cached_property
    def inverse_of(self) -> dict[str, str]:
        """Map from generator id to inverse id."""
        return {g.id: g.inverse_id for g in self.generators}

    @cached_property
    def ids(self) -> tuple[str, ...]:
        """Generator ids in canonical order."""
        return tuple(g.id for g in self.generators)

    @cached_property
    def index(self) -> dict[str, int]:
        """Position of each generator id."""
        return {gid: i for i, gid in enumerate(self.ids)}

    @cached_property
    def sorted_relators(self) -> tuple[Word, ...]:
        """Relators ordered lexicographically by their canonical strings."""
        return tuple(sorted(self.relators, key=word_key))

    @cached_property
    def involutions(self) -> tuple[str, ...]:
        """Non-neutral generators declared to be their own inverse."""
        return tuple(
            g.id
            for g in self.generators
            if g.id == g.inverse_id and g.id != self.neutral
        )

    def __contains__(self, gid: object) -> bool:
        """Generator membership."""
        return gid in self.inverse_of

    def inverse(self, word: Word) -> Word:
        """Formal inverse of a word."""
        self.check_word(word)
        return word_inverse(word, self.inverse_of)

    def check_word(self, word: Word) -> None:
        """Raise if a letter is unknown."""
        for letter in word:
            if letter not in self.inverse_of:
                msg = f"Unknown generator {letter!r} in word {format_word(word)!r}"
                raise UnknownGeneratorError(msg)

    def with_relators(self, relators: Iterable[Word]) -> "Presentation":
        """Same generators with a new relator set."""
        return Presentation(
            generators=self.generators,
            relators=frozenset(relators),
            neutral=self.neutral,
        )

    def with_generators(
        self, new_ids: Iterable[str], relators: Iterable[Word] = ()
    ) -> "Presentation":
        """Add generators (with formal inverses) and relators."""
        pairing = dict(self.inverse_of)
        for gid in new_ids:
            if gid in pairing:
                msg = f"Generator {gid!r} already exists"
                raise ValueError(msg)
            inv = formal_inverse_id(gid)
            if inv in pairing:
                msg = f"Generator {inv!r} already exists"
                raise ValueError(msg)
            pairing[gid] = inv
            pairing[inv] = gid
        gens = [Generator(id=g, inverse_id=i) for g, i in pairing.items()]
        return Presentation(
            generators=tuple(gens),
            relators=self.relators | frozenset(tuple(r) for r in relators),
            neutral=self.neutral,
        )

    def symmetrized(self) -> "Presentation":
        """Close the relators under cyclic shifts and inverse-reversal."""
        return self.with_relators(symmetric_closure(self.relators, self.inverse_of))

    def restrict(self, generator_ids: Iterable[str]) -> "Presentation":
        """Keep the given generators (closed under inverses) and relators over them."""
        keep = {self.neutral}
        for gid in generator_ids:
            if gid not in self.inverse_of:
                msg = f"Unknown generator {gid!r}"
                raise UnknownGeneratorError(msg)
            keep.update({gid, self.inverse_of[gid]})
        gens = tuple(g for g in self.generators if g.id in keep)
        rels = frozenset(r for r in self.relators if all(x in keep for x in r))
        return Presentation(generators=gens, relators=rels, neutral=self.neutral)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form."""
        return self.model_dump(mode="json")


def is_symmetric_triangular(p: Presentation) -> AuditReport:
    """Check the six defining conditions of a symmetric triangular presentation."""
    report = AuditReport(subject="symmetric triangular")
    inv = p.inverse_of
    e = p.neutral

    report.record(
        "(a) finite with neutral",
        e in inv,
        f"|S|={len(inv)}, |R|={len(p.relators)}",
    )

    missing_pairs = [
        (s, inv[s], e) for s in p.ids if s != e and (s, inv[s], e) not in p.relators
    ]
    report.record(
        "(b) inverse pairs",
        not missing_pairs,
        f"{len(missing_pairs)} missing s s' e relators",
        [format_word(w) for w in missing_pairs[:WITNESS_LIMIT]] or None,
    )

    wrong_length = [r for r in p.sorted_relators if len(r) != 3]  # noqa: PLR2004
    report.record(
        "(c) length three",
        not wrong_length,
        "; ".join(f"relator length {len(r)}" for r in wrong_length[:WITNESS_LIMIT]),
        [format_word(w) for w in wrong_length[:WITNESS_LIMIT]] or None,
    )

    not_shift_closed = [
        r
        for r in p.sorted_relators
        if any(s not in p.relators for s in cyclic_shifts(r))
    ]
    report.record(
        "(d) cyclic shifts",
        not not_shift_closed,
        f"{len(not_shift_closed)} relators with a missing rotation",
        [format_word(w) for w in not_shift_closed[:WITNESS_LIMIT]] or None,
    )

    not_inverse_closed = [
        r for r in p.sorted_relators if word_inverse(r, inv) not in p.relators
    ]
    report.record(
        "(e) inverse-reversal",
        not not_inverse_closed,
        f"{len(not_inverse_closed)} relators with a missing inverse",
        [format_word(w) for w in not_inverse_closed[:WITNESS_LIMIT]] or None,
    )

    has_eee = (e, e, e) in p.relators
    report.record("(f) eee", has_eee, "" if has_eee else "missing e e e")
    return report


def require_symmetric_triangular(p: Presentation) -> None:
    """Raise NotSymmetricTriangularError listing the first violation."""
    report = is_symmetric_triangular(p)
    if not report.passed:
        first = report.failures()[0]
        msg = f"Presentation is not symmetric triangular: {first.check} {first.detail}"
        raise NotSymmetricTriangularError(msg)
