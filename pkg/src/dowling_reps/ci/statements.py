"""Conditional-independence statements (A ⊥ B | C) and implication instances.

Text format: one statement per line as ``A | B | C`` with comma-separated
ids; an empty part is the empty set and ``#`` starts a comment. A, B and C
need not be disjoint.
"""

from collections.abc import Iterable, Iterator, Sequence
from itertools import product
from typing import Any, Self

from pydantic import BaseModel, ConfigDict, model_validator


class CISyntaxError(ValueError):
    """A CI statement line that does not have three parts."""


def _subset_key(s: frozenset[str]) -> tuple[int, list[str]]:
    return len(s), sorted(s)


class CIStatement(BaseModel):
    """X_A and X_B conditionally independent given X_C."""

    model_config = ConfigDict(frozen=True)

    a: frozenset[str]
    b: frozenset[str]
    c: frozenset[str] = frozenset()

    @classmethod
    def of(cls, a: Iterable[str], b: Iterable[str], c: Iterable[str] = ()) -> Self:
        """Build from any iterables of ids."""
        return cls(a=frozenset(a), b=frozenset(b), c=frozenset(c))

    @property
    def variables(self) -> frozenset[str]:
        """A ∪ B ∪ C."""
        return self.a | self.b | self.c

    def sort_key(self) -> tuple[tuple[int, list[str]], ...]:
        """Order by the sizes and members of A, B and C."""
        return _subset_key(self.a), _subset_key(self.b), _subset_key(self.c)

    def __str__(self) -> str:
        """``A | B | C`` with sorted members."""
        return " | ".join(",".join(sorted(part)) for part in (self.a, self.b, self.c))

    def to_json_dict(self) -> dict[str, list[str]]:
        """Sorted member lists."""
        return {"a": sorted(self.a), "b": sorted(self.b), "c": sorted(self.c)}


def parse_statement(text: str) -> CIStatement:
    """Parse ``A | B | C``."""
    parts = text.split("|")
    if len(parts) != 3:  # noqa: PLR2004
        msg = f"Expected 'A | B | C', got {text!r}"
        raise CISyntaxError(msg)
    a, b, c = ([x.strip() for x in part.split(",") if x.strip()] for part in parts)
    return CIStatement.of(a, b, c)


def parse_statements(text: str) -> list[CIStatement]:
    """One statement per non-blank, non-comment line."""
    out: list[CIStatement] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(parse_statement(line))
        except CISyntaxError as exc:
            msg = f"Line {number}: {exc}"
            raise CISyntaxError(msg) from exc
    return out


def format_statements(statements: Iterable[CIStatement]) -> str:
    """Inverse of parse_statements, sorted."""
    return "".join(f"{st}\n" for st in sorted(statements, key=CIStatement.sort_key))


def subsets(ground: Sequence[str]) -> list[frozenset[str]]:
    """All subsets of the ground set by bitmask."""
    return [
        frozenset(x for i, x in enumerate(ground) if mask >> i & 1)
        for mask in range(1 << len(ground))
    ]


def all_statements(ground: Sequence[str]) -> Iterator[CIStatement]:
    """Every triple of subsets, (2^|E|)^3 in all."""
    every = subsets(ground)
    for a, b, c in product(every, repeat=3):
        yield CIStatement(a=a, b=b, c=c)


class CIInstance(BaseModel):
    """Does every antecedent imply the consequent?"""

    model_config = ConfigDict(frozen=True)

    ground: tuple[str, ...]
    antecedents: frozenset[CIStatement]
    consequent: CIStatement | None = None

    @model_validator(mode="after")
    def validate_ground(self) -> Self:
        """Statements only mention ground ids."""
        known = set(self.ground)
        statements = [*self.antecedents]
        if self.consequent is not None:
            statements.append(self.consequent)
        for st in statements:
            unknown = sorted(st.variables - known)
            if unknown:
                msg = f"Statement {st} mentions {unknown} outside the ground set"
                raise ValueError(msg)
        return self

    def to_json_dict(self) -> dict[str, Any]:
        """Ground, sorted antecedents and the consequent."""
        return {
            "ground": list(self.ground),
            "antecedents": [
                st.to_json_dict()
                for st in sorted(self.antecedents, key=CIStatement.sort_key)
            ],
            "consequent": None
            if self.consequent is None
            else self.consequent.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "CIInstance":
        """Inverse of to_json_dict."""

        def statement(raw: dict[str, list[str]]) -> CIStatement:
            return CIStatement.of(raw["a"], raw["b"], raw.get("c", []))

        consequent = data.get("consequent")
        return cls(
            ground=tuple(data["ground"]),
            antecedents=frozenset(statement(raw) for raw in data["antecedents"]),
            consequent=None if consequent is None else statement(consequent),
        )
