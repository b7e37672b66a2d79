"""Families of linear maps and exact or ε-approximate representation checks."""

from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from typing import Any, Self

from pydantic import BaseModel, ConfigDict, model_validator

from dowling_reps.linalg.approximate import (
    approximate_left_inverse,
    greedy_independent_rows,
)
from dowling_reps.linalg.matrix import Matrix, rank, row_reduce, vstack
from dowling_reps.matroids.matroid import DEFAULT_SCAN_BOUND, Matroid, classify_masks


class UnknownElementError(ValueError):
    """An element id outside the family's domain."""


class GroundMismatchError(ValueError):
    """A matroid and a representation candidate disagree on the ground set."""


class LinearMapFamily(BaseModel):
    """Surjections T_e: GF(p)^dim_v → GF(p)^c, one c×dim_v matrix per element."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p: int
    c: int
    dim_v: int
    maps: dict[str, Matrix]

    @model_validator(mode="after")
    def validate_maps(self) -> Self:
        """Every map has shape c×dim_v over GF(p) and full row rank."""
        for element, t in self.maps.items():
            if t.p != self.p or t.shape != (self.c, self.dim_v):
                msg = (
                    f"Map for {element!r} is {t.shape} over GF({t.p}), expected "
                    f"{self.c}x{self.dim_v} over GF({self.p})"
                )
                raise ValueError(msg)
            if rank(t) != self.c:
                msg = f"Map for {element!r} is not surjective"
                raise ValueError(msg)
        return self

    @property
    def elements(self) -> tuple[str, ...]:
        """Domain in insertion order."""
        return tuple(self.maps)

    def to_json_dict(self) -> dict[str, Any]:
        """p, c, dim_v and per-element matrices."""
        return {
            "p": self.p,
            "c": self.c,
            "dim_v": self.dim_v,
            "maps": {e: t.to_dict() for e, t in self.maps.items()},
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "LinearMapFamily":
        """Inverse of to_json_dict."""
        return cls(
            p=int(data["p"]),
            c=int(data["c"]),
            dim_v=int(data["dim_v"]),
            maps={e: Matrix.from_dict(t) for e, t in data["maps"].items()},
        )


def stack(fam: LinearMapFamily, s: Iterable[str]) -> Matrix:
    """T_S: the maps of S stacked in the family's element order."""
    members = set(s)
    unknown = sorted(members - set(fam.maps))
    if unknown:
        msg = f"Elements {unknown} are not in the family"
        raise UnknownElementError(msg)
    return vstack(
        (fam.maps[e] for e in fam.elements if e in members), fam.p, fam.dim_v
    )


class IndependenceResult(BaseModel):
    """Rank deficit c|S| − rk(T_S) against the allowance cε."""

    model_config = ConfigDict(frozen=True)

    passed: bool
    deficit: int


class DeterminationResult(BaseModel):
    """A map S with T_x ≈ S·T_sources, and the rank of the error."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: Matrix | None
    defect: int


def check_independence(
    fam: LinearMapFamily, s: Iterable[str], epsilon: Fraction
) -> IndependenceResult:
    """rk(T_S) ≥ c(|S| − ε)."""
    members = set(s)
    deficit = fam.c * len(members) - rank(stack(fam, members))
    return IndependenceResult(passed=deficit <= fam.c * epsilon, deficit=deficit)


def find_determination_map(
    fam: LinearMapFamily,
    sources: Iterable[str],
    target: str,
    epsilon: Fraction,
) -> DeterminationResult:
    """S minimizing rk(T_target − S·T_sources); returned only if within cε.

    T_sources is restricted to a basis B of its image, a surjection onto
    GF(p)^r. Its pivot minor has an exact approximate inverse, which gives a
    section L with B·L = I, and S = T_target·L on the kept rows. The residual
    T_target·(I − L·B) is T_target reduced modulo the row space of B, so the
    defect is rk([T_sources; T_target]) − rk(T_sources), the least reachable.
    """
    if target not in fam.maps:
        msg = f"Element {target!r} is not in the family"
        raise UnknownElementError(msg)
    basis = stack(fam, sources)
    t = fam.maps[target]
    s = Matrix.zeros(fam.c, basis.rows, fam.p)
    kept = greedy_independent_rows(basis)
    if kept:
        image = Matrix(basis.entries[kept].copy(), fam.p, reduced=True)
        _, pivots = row_reduce(image.entries, fam.p)
        minor = Matrix(image.entries[:, pivots].copy(), fam.p, reduced=True)
        d, _ = approximate_left_inverse(minor)
        section = Matrix.zeros(fam.dim_v, len(kept), fam.p)
        section.entries[pivots] = d.entries
        s.entries[:, kept] = (t @ section).entries
    defect = rank(t - s @ basis)
    if defect <= fam.c * epsilon:
        return DeterminationResult(matrix=s, defect=defect)
    return DeterminationResult(matrix=None, defect=defect)


class RepReport(BaseModel):
    """Worst independence deficit and determination defect of a family."""

    model_config = ConfigDict(frozen=True)

    epsilon: Fraction
    c: int
    independence_worst: tuple[tuple[str, ...], int] | None = None
    determination_worst: tuple[tuple[str, ...], str, int] | None = None
    profile_mismatch: tuple[tuple[str, ...], int, int] | None = None
    independent_sets: int = 0
    circuit_pairs: int = 0
    profile_subsets: int = 0

    @property
    def passed(self) -> bool:
        """Every deficit and defect within cε and no rank-profile mismatch."""
        bound = self.c * self.epsilon
        if self.independence_worst and self.independence_worst[1] > bound:
            return False
        if self.determination_worst and self.determination_worst[2] > bound:
            return False
        return self.profile_mismatch is None

    @property
    def worst_normalized(self) -> Fraction:
        """Largest deficit or defect divided by c."""
        worst = 0
        if self.independence_worst:
            worst = max(worst, self.independence_worst[1])
        if self.determination_worst:
            worst = max(worst, self.determination_worst[2])
        return Fraction(worst, self.c)

    def summary(self) -> str:
        """One-line verdict."""
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict} at ε={self.epsilon}: worst deficit/c = "
            f"{self.worst_normalized} over {self.independent_sets} independent "
            f"sets and {self.circuit_pairs} circuit elements"
        )


def _worse(candidate: int, current: int | None) -> bool:
    return current is None or candidate > current


def check_representation(
    m: Matroid,
    fam: LinearMapFamily,
    epsilon: Fraction,
    scan_bound: int = DEFAULT_SCAN_BOUND,
) -> RepReport:
    """Independence on independent sets, determination on circuit elements.

    At ε = 0 independence is checked on bases only and the rank profile
    c·r(S) = rk(T_S) is verified on every scanned subset instead.
    """
    if set(m.ground) != set(fam.maps):
        extra = sorted(set(m.ground) ^ set(fam.maps))
        msg = f"Ground set and family domain differ on {extra}"
        raise GroundMismatchError(msg)
    masks, ranks, independent, circuits = classify_masks(m, scan_bound)
    exact = epsilon == 0
    if exact:
        r = m.full_rank
        independent = [a for a in independent if a.bit_count() == r]

    ind_worst: tuple[tuple[str, ...], int] | None = None
    for a in independent:
        result = check_independence(fam, m.ordered(a), epsilon)
        if _worse(result.deficit, ind_worst[1] if ind_worst else None):
            ind_worst = (tuple(m.ordered(a)), result.deficit)

    det_worst: tuple[tuple[str, ...], str, int] | None = None
    pairs = 0
    for circuit in circuits:
        members = m.ordered(circuit)
        for x in members:
            pairs += 1
            sources = [y for y in members if y != x]
            result = find_determination_map(fam, sources, x, epsilon)
            if _worse(result.defect, det_worst[2] if det_worst else None):
                det_worst = (tuple(members), x, result.defect)

    mismatch: tuple[tuple[str, ...], int, int] | None = None
    profiled = 0
    if exact:
        for a in masks:
            profiled += 1
            achieved = rank(stack(fam, m.ordered(a)))
            if achieved != fam.c * ranks[a]:
                mismatch = (tuple(m.ordered(a)), ranks[a], achieved)
                break

    return RepReport(
        epsilon=epsilon,
        c=fam.c,
        independence_worst=ind_worst,
        determination_worst=det_worst,
        profile_mismatch=mismatch,
        independent_sets=len(independent),
        circuit_pairs=pairs,
        profile_subsets=profiled,
    )


def rank_profile(fam: LinearMapFamily, subsets: Sequence[Iterable[str]]) -> list[int]:
    """rk(T_S) for each given subset."""
    return [rank(stack(fam, s)) for s in subsets]


def restrict_family(fam: LinearMapFamily, elements: Iterable[str]) -> LinearMapFamily:
    """Sub-family on the given elements."""
    keep = set(elements)
    return LinearMapFamily(
        p=fam.p,
        c=fam.c,
        dim_v=fam.dim_v,
        maps={e: t for e, t in fam.maps.items() if e in keep},
    )


def family_from_matrices(
    p: int, maps: Mapping[str, Matrix]
) -> LinearMapFamily:
    """Infer c and dim_v from the first map."""
    first = next(iter(maps.values()))
    return LinearMapFamily(p=p, c=first.rows, dim_v=first.cols, maps=dict(maps))
