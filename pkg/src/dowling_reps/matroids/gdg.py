"""Generalized Dowling geometries of symmetric triangular presentations."""

from collections.abc import Iterable, Iterator
from itertools import combinations, product
from typing import Any, override

from pydantic import BaseModel, ConfigDict

from dowling_reps.matroids.matroid import LineMatroid, MalformedGeometryError
from dowling_reps.presentations.model import (
    Presentation,
    require_symmetric_triangular,
)
from dowling_reps.presentations.words import Word, symmetric_closure

FRAME = ("b1", "b2", "b3")
# (i, j, k): the last letter of a relator goes to copy i, the middle to j,
# the first to k.
LINE_INDICES = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


def point_id(s: str, i: int) -> str:
    """The i-th copy s_i of a generator."""
    return f"{s}_{i}"


def relation_lines(relator: Word) -> list[tuple[str, str, str]]:
    """The three lines {s_i, s'_j, s''_k} of a relator s'' s' s."""
    first, middle, last = relator
    return [
        (point_id(last, i), point_id(middle, j), point_id(first, k))
        for i, j, k in LINE_INDICES
    ]


class GDGStructure(BaseModel):
    """Frame, generator copies and the lines of a generalized Dowling geometry."""

    model_config = ConfigDict(frozen=True)

    presentation: Presentation
    points: tuple[str, ...]
    long_lines: tuple[tuple[str, ...], ...]
    relation_lines: tuple[tuple[str, str, str], ...]

    def copy_of(self, s: str, i: int) -> str:
        """Ground id of s_i."""
        return point_id(s, i)


def gdg_structure(p: Presentation) -> GDGStructure:
    """Points and lines of the geometry of p, without matroid checks."""
    gens = p.ids
    points = FRAME + tuple(point_id(s, i) for i in (1, 2, 3) for s in gens)
    long_lines = tuple(
        (FRAME[i], FRAME[(i + 1) % 3], *(point_id(s, i + 1) for s in gens))
        for i in range(3)
    )
    lines: dict[frozenset[str], tuple[str, str, str]] = {}
    for relator in p.sorted_relators:
        for line in relation_lines(relator):
            lines.setdefault(frozenset(line), line)
    return GDGStructure(
        presentation=p,
        points=points,
        long_lines=long_lines,
        relation_lines=tuple(sorted(lines.values())),
    )


class DowlingGeometry(LineMatroid):
    """Rank-3 matroid on {b1, b2, b3} ∪ {s_i} with its presentation attached."""

    def __init__(self, structure: GDGStructure) -> None:
        """Build the line matroid of a precomputed structure."""
        super().__init__(
            structure.points, [*structure.long_lines, *structure.relation_lines]
        )
        self.structure = structure

    @property
    def presentation(self) -> Presentation:
        """The symmetric triangular presentation encoded by the geometry."""
        return self.structure.presentation

    @override
    def to_json_dict(self) -> dict[str, Any]:
        return {
            **super().to_json_dict(),
            "presentation": self.presentation.to_dict(),
        }


def build_gdg(p: Presentation) -> DowlingGeometry:
    """The generalized Dowling geometry of a symmetric triangular presentation.

    Raises NotSymmetricTriangularError for other presentations and
    MalformedGeometryError when two lines share two points.
    """
    require_symmetric_triangular(p)
    return DowlingGeometry(gdg_structure(p))


def gdg_from_json_dict(data: dict[str, Any]) -> DowlingGeometry:
    """Rebuild from the presentation stored in a geometry's JSON."""
    return build_gdg(Presentation.model_validate(data["presentation"]))


def iter_triple_words(p: Presentation) -> Iterator[Word]:
    """Length-3 words over S in lexicographic order, lazily.

    Every id character sorts after the separating space, so the product over
    sorted ids is already ordered by word_key.
    """
    return product(sorted(p.ids), repeat=3)


def triple_words(p: Presentation) -> list[Word]:
    """All length-3 words over S in lexicographic order."""
    return list(iter_triple_words(p))


class _LazyWords:
    """Candidate words, materialized only as far as they are requested."""

    def __init__(self, words: Iterator[Word]) -> None:
        """Wrap a lazy word source."""
        self._source = words
        self._items: list[Word] = []

    def has(self, k: int) -> bool:
        """Whether a k-th word exists."""
        while len(self._items) <= k:
            word = next(self._source, None)
            if word is None:
                return False
            self._items.append(word)
        return True

    def __getitem__(self, k: int) -> Word:
        """The k-th word; has(k) must have been true."""
        return self._items[k]


def _combinations(
    words: _LazyWords, size: int, start: int = 0
) -> Iterator[tuple[Word, ...]]:
    """Lexicographic size-subsets of the words from position start on."""
    if size == 0:
        yield ()
        return
    i = start
    while words.has(i + size - 1):
        for rest in _combinations(words, size - 1, i + 1):
            yield (words[i], *rest)
        i += 1


type PairIndex = dict[frozenset[str], frozenset[str]]


def _pair_index(lines: Iterable[tuple[str, str, str]]) -> PairIndex:
    """Each pair of points on a line ↦ that line."""
    index: PairIndex = {}
    for line in lines:
        points = frozenset(line)
        for pair in combinations(line, 2):
            index.setdefault(frozenset(pair), points)
    return index


def _meets_twice(added: Iterable[Word], base: PairIndex) -> bool:
    """Whether a line of the added relators shares two points with another line."""
    local: PairIndex = {}
    for relator in added:
        for line in relation_lines(relator):
            points = frozenset(line)
            for pair in combinations(line, 2):
                key = frozenset(pair)
                other = base.get(key, local.get(key))
                if other is not None and other != points:
                    return True
                local[key] = points
    return False


def subordinate_family(
    p: Presentation, budget: int, limit: int | None = None
) -> Iterator[tuple[tuple[Word, ...], DowlingGeometry]]:
    """Geometries of ⟨S | R ∪ X⟩ for added triples X with |X| ≤ budget.

    X runs over combinations of words outside R by size, then
    lexicographically; X with an already seen relator closure, or whose
    closure gives two lines meeting twice, are skipped. At most limit
    members are produced. Candidates are enumerated lazily, so large
    presentations only pay for the members they emit.
    """
    require_symmetric_triangular(p)
    base = _pair_index(gdg_structure(p).relation_lines)
    candidates = _LazyWords(w for w in iter_triple_words(p) if w not in p.relators)
    seen: set[frozenset[Word]] = set()
    produced = 0
    for size in range(budget + 1):
        for extra in _combinations(candidates, size):
            if limit is not None and produced >= limit:
                return
            added = symmetric_closure(extra, p.inverse_of) - p.relators
            closure = p.relators | added
            if closure in seen:
                continue
            seen.add(closure)
            if _meets_twice(added, base):
                continue
            try:
                geometry = DowlingGeometry(gdg_structure(p.with_relators(closure)))
            except MalformedGeometryError:
                continue
            produced += 1
            yield extra, geometry
