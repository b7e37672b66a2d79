"""Property audit of a scrambling and its census of zero-sum triples."""

from collections.abc import Iterator, Mapping

import numpy as np
from pydantic import BaseModel, ConfigDict

from dowling_reps.core.audit import AuditReport
from dowling_reps.presentations.abelian import AbelianVector
from dowling_reps.presentations.model import is_symmetric_triangular
from dowling_reps.presentations.scrambling import X_WEIGHT, ScrambledPresentation
from dowling_reps.presentations.words import (
    Word,
    cyclic_shifts,
    format_word,
    free_reduce,
)

HASH_SEED = 20_240_611
WITNESS_LIMIT = 10


class FlaggedTriple(BaseModel):
    """A zero-sum product x x' x'' that is not trivially the identity."""

    model_config = ConfigDict(frozen=True)

    letters: tuple[str, str, str]
    mu_word: Word


class TripleCensus(BaseModel):
    """Classification of every zero-sum triple of generators."""

    model_config = ConfigDict(frozen=True)

    multisets: int
    orders: int
    trivial: int
    flagged: tuple[FlaggedTriple, ...]


class AbelianIndex:
    """Dense π^ab table with random linear hash keys.

    Keys are dot products with random int64 weights; wraparound keeps them
    additive, so key(u + v) = key(u) + key(v) and collisions are verified
    exactly on the dense rows.
    """

    def __init__(
        self, values: Mapping[str, AbelianVector], seed: int = HASH_SEED
    ) -> None:
        """Lay out one row per generator and one column per coordinate."""
        self.ids = sorted(values)
        self.row = {g: i for i, g in enumerate(self.ids)}
        f_keys = sorted({k for v in values.values() for k in v.f_coords})
        z_keys = sorted({k for v in values.values() for k in v.z_coords})
        self.f_column = {k: i for i, k in enumerate(f_keys)}
        self.z_column = {k: len(f_keys) + i for i, k in enumerate(z_keys)}
        self.dense = np.zeros((len(self.ids), len(f_keys) + len(z_keys)), np.int64)
        for g, vec in values.items():
            i = self.row[g]
            for k, v in vec.f_coords.items():
                self.dense[i, self.f_column[k]] = v
            for k, v in vec.z_coords.items():
                self.dense[i, self.z_column[k]] = v
        rng = np.random.default_rng(seed)
        weights = rng.integers(
            np.iinfo(np.int64).min, np.iinfo(np.int64).max, self.dense.shape[1]
        )
        with np.errstate(over="ignore"):
            self.keys = self.dense @ weights
        self.nonzero = np.any(self.dense, axis=1)
        self.order = np.argsort(self.keys, kind="stable")
        self.sorted_keys = self.keys[self.order]

    def lookup(self, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Row of the first generator with each key, and a found mask."""
        pos = np.searchsorted(self.sorted_keys, keys)
        pos = np.minimum(pos, len(self.sorted_keys) - 1)
        found = self.sorted_keys[pos] == keys
        return self.order[pos], found

    def duplicate_pairs(self) -> list[tuple[str, str]]:
        """Distinct generators with equal π^ab."""
        pairs: list[tuple[str, str]] = []
        same = np.nonzero(self.sorted_keys[1:] == self.sorted_keys[:-1])[0]
        for p in same:
            i, j = int(self.order[p]), int(self.order[p + 1])
            if np.array_equal(self.dense[i], self.dense[j]):
                pairs.append((self.ids[i], self.ids[j]))
        return pairs

    def opposite_pairs(self, inverse_of: Mapping[str, str]) -> list[tuple[str, str]]:
        """Pairs x, y with π^ab(x) = −π^ab(y) other than y = x⁻¹."""
        with np.errstate(over="ignore"):
            rows, found = self.lookup(-self.keys)
        pairs: list[tuple[str, str]] = []
        for i in np.nonzero(found)[0]:
            j = int(rows[i])
            x, y = self.ids[i], self.ids[j]
            if x >= y or inverse_of[x] == y:
                continue
            if np.array_equal(self.dense[i], -self.dense[j]):
                pairs.append((x, y))
        return pairs

    def zero_sum_multisets(self) -> np.ndarray:
        """Sorted row triples (i ≤ j ≤ k) with zero sum and no zero row."""
        found: list[np.ndarray] = []
        for column in range(self.dense.shape[1]):
            members = np.nonzero(self.dense[:, column])[0]
            if members.size == 0:
                continue
            a, b = np.triu_indices(members.size)
            left, right = members[a], members[b]
            with np.errstate(over="ignore"):
                need = -(self.keys[left] + self.keys[right])
            third, hit = self.lookup(need)
            hit &= self.nonzero[third]
            left, right, third = left[hit], right[hit], third[hit]
            exact = ~np.any(
                self.dense[left] + self.dense[right] + self.dense[third], axis=1
            )
            triples = np.stack([left[exact], right[exact], third[exact]], axis=1)
            found.append(np.sort(triples, axis=1))
        if not found:
            return np.zeros((0, 3), np.int64)
        return np.unique(np.concatenate(found), axis=0)


def _prepared_cycles(sp: ScrambledPresentation) -> frozenset[Word]:
    e = sp.prepared.neutral
    cycles: set[Word] = set()
    for r in sp.prepared.relators:
        stripped = tuple(x for x in r if x != e)
        cycles.update(cyclic_shifts(stripped))
    return frozenset(cycles)


def _orders(i: int, j: int, k: int) -> Iterator[tuple[int, int, int]]:
    yield (i, j, k)
    if len({i, j, k}) == 3:  # noqa: PLR2004
        yield (i, k, j)


def classify_zero_sum_triples(
    sp: ScrambledPresentation, index: AbelianIndex | None = None
) -> TripleCensus:
    """Sort every zero-sum triple into trivial or flagged.

    Trivial means a relator of R', a product whose μ-word free-reduces to
    the empty word, or one whose μ-word is a relator of the prepared
    presentation up to rotation and neutral letters. Triples through the
    neutral generator are the pairs x, x⁻¹ and always reduce.
    """
    index = index or AbelianIndex(sp.abelian_values)
    relators = sp.result.relators
    cycles = _prepared_cycles(sp)
    neutral = sp.prepared.neutral
    free = sp.free_letters
    inverse = sp.letter_inverse
    images = sp.mu_images

    multisets = index.zero_sum_multisets()
    orders = 0
    trivial = 0
    flagged: list[FlaggedTriple] = []
    for i, j, k in multisets.tolist():
        for a, b, c in _orders(i, j, k):
            orders += 1
            word = (index.ids[a], index.ids[b], index.ids[c])
            if word in relators:
                trivial += 1
                continue
            mu_word = free_reduce(
                images[word[0]].word + images[word[1]].word + images[word[2]].word,
                inverse,
                neutral,
            )
            if not mu_word or (
                not any(x in free for x in mu_word) and mu_word in cycles
            ):
                trivial += 1
                continue
            flagged.append(FlaggedTriple(letters=word, mu_word=mu_word))

    pairs = (len(sp.result.ids) - 1) // 2
    return TripleCensus(
        multisets=len(multisets) + pairs + 1,
        orders=orders + 2 * pairs + 1,
        trivial=trivial + 2 * pairs + 1,
        flagged=tuple(flagged),
    )


def audit_scrambling(
    sp: ScrambledPresentation, census: TripleCensus | None = None
) -> AuditReport:
    """Check the scrambling properties and classify zero-sum triples."""
    report = AuditReport(subject="scrambling")
    report.merge(is_symmetric_triangular(sp.result), prefix="triangular ")

    index = AbelianIndex(sp.abelian_values)
    duplicates = index.duplicate_pairs()
    report.record(
        "injective projection",
        not duplicates,
        f"{len(duplicates)} colliding pairs among {len(index.ids)} generators",
        duplicates[:WITNESS_LIMIT] or None,
    )
    opposites = index.opposite_pairs(sp.result.inverse_of)
    report.record(
        "no opposite values",
        not opposites,
        f"{len(opposites)} pairs with opposite values",
        opposites[:WITNESS_LIMIT] or None,
    )

    e = sp.prepared.neutral
    bad_i = [
        s
        for s, x in sp.i_map.items()
        if sp.mu_images[x].word != (() if s == e else (s,))
    ]
    report.record(
        "i is a section of π_G",
        not bad_i,
        f"{len(bad_i)} generators with π_G(i(s)) ≠ s",
        bad_i[:WITNESS_LIMIT] or None,
    )
    bad_j = [
        key
        for key, t in sp.j_map.items()
        if sp.mu_images[t].word or sp.mu_images[t].vector != AbelianVector.basis(key)
    ]
    report.record(
        "j hits the basis",
        not bad_j,
        f"{len(bad_j)} basis vectors with μ(j(b)) ≠ (e, b)",
        bad_j[:WITNESS_LIMIT] or None,
    )

    bad_weight: list[str] = []
    for s, x in sp.i_map.items():
        column = index.z_column.get(s)
        weight = sp.abelian_values[x].z(s)
        if column is None or weight < X_WEIGHT:
            bad_weight.append(s)
            continue
        if int(np.abs(index.dense[:, column]).max()) > weight + 1:
            bad_weight.append(s)
    report.record(
        "weights",
        not bad_weight,
        f"{len(bad_weight)} generators of S break c_s ≥ 5 or |b_s| ≤ c_s + 1",
        bad_weight[:WITNESS_LIMIT] or None,
    )

    census = census or classify_zero_sum_triples(sp, index)
    report.record(
        "zero-sum census",
        True,
        f"{census.multisets} multisets, {census.trivial} of {census.orders} "
        f"orders trivial, {len(census.flagged)} flagged",
        [format_word(f.letters) for f in census.flagged] or None,
    )
    if census.flagged:
        report.note(
            f"{len(census.flagged)} flagged triples await the generic-invertibility "
            "check against an explored finite quotient"
        )
    return report
