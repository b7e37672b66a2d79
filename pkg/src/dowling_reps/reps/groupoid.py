"""The Dowling groupoid of a presentation and its matrix representations.

Morphisms compose like matrices: F(g∘f) = F(g)·F(f).
"""

from collections.abc import Sequence
from fractions import Fraction
from functools import cached_property
from typing import Any

from pydantic import BaseModel, ConfigDict

from dowling_reps.core.audit import AuditReport
from dowling_reps.linalg.approximate import approximate_left_inverse
from dowling_reps.linalg.matrix import Matrix, project_onto_rows, rank_distance, vstack
from dowling_reps.matroids.gdg import FRAME, LINE_INDICES, point_id
from dowling_reps.presentations.model import Presentation
from dowling_reps.reps.builder import MatrixImages, complete_images
from dowling_reps.reps.families import LinearMapFamily

type Arrow = tuple[str, int, int]

FORWARD = ((1, 2), (2, 3), (3, 1))
WITNESS_LIMIT = 5


def arrow_name(arrow: Arrow) -> str:
    """g[s,i,j]."""
    s, i, j = arrow
    return f"g[{s},{i},{j}]"


class DowlingGroupoid:
    """Objects b1, b2, b3 and arrows g_{s,i,j}: b_i → b_j."""

    def __init__(self, presentation: Presentation) -> None:
        """Index the arrows and relations of a symmetric triangular presentation."""
        self.presentation = presentation

    @cached_property
    def arrows(self) -> list[Arrow]:
        """Every g_{s,i,j} with i ≠ j."""
        return [
            (s, i, j)
            for s in self.presentation.ids
            for i in (1, 2, 3)
            for j in (1, 2, 3)
            if i != j
        ]

    @cached_property
    def inverse_relations(self) -> list[tuple[Arrow, Arrow]]:
        """g_{s,j,i} ∘ g_{s,i,j} = id."""
        return [((s, j, i), (s, i, j)) for s, i, j in self.arrows]

    @cached_property
    def triangle_relations(self) -> list[tuple[Arrow, Arrow, Arrow]]:
        """g_{s'',k,i} ∘ g_{s',j,k} ∘ g_{s,i,j} = id per relator s'' s' s."""
        out: list[tuple[Arrow, Arrow, Arrow]] = []
        for first, middle, last in self.presentation.sorted_relators:
            for i, j, k in LINE_INDICES:
                out.append(((first, k, i), (middle, j, k), (last, i, j)))
        return out


class GroupoidRepresentation(BaseModel):
    """One invertible c×c matrix per arrow of a Dowling groupoid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    presentation: Presentation
    morphisms: dict[Arrow, Matrix]

    @property
    def groupoid(self) -> DowlingGroupoid:
        """The groupoid being represented."""
        return DowlingGroupoid(self.presentation)

    @property
    def size(self) -> int:
        """Common matrix size c."""
        return next(iter(self.morphisms.values())).rows

    def __getitem__(self, arrow: Arrow) -> Matrix:
        """F of one arrow; identity arrows g_{·,i,i} map to I."""
        _, i, j = arrow
        if i == j:
            first = next(iter(self.morphisms.values()))
            return Matrix.identity(first.rows, first.p)
        return self.morphisms[arrow]

    def to_json_dict(self) -> dict[str, Any]:
        """Presentation and per-arrow matrices."""
        return {
            "presentation": self.presentation.to_dict(),
            "morphisms": {
                arrow_name(a): m.to_dict() for a, m in self.morphisms.items()
            },
        }


def groupoid_rep_from_group_rep(
    p: Presentation, rho: MatrixImages
) -> GroupoidRepresentation:
    """F(g_{s,i,j}) = ρ(s) on forward arrows and ρ(s)⁻¹ on backward ones."""
    images = complete_images(p, rho)
    morphisms: dict[Arrow, Matrix] = {}
    for s in p.ids:
        inverse = images[s].inverse()
        for i, j in FORWARD:
            morphisms[(s, i, j)] = images[s]
            morphisms[(s, j, i)] = inverse
    return GroupoidRepresentation(presentation=p, morphisms=morphisms)


def _solve_line(
    fam: LinearMapFamily, s: str, i: int, j: int
) -> tuple[Matrix, Matrix]:
    """A, B with T_{s_i} ≈ A·T_{b_i} + B·T_{b_j}."""
    frame = [fam.maps[FRAME[i - 1]], fam.maps[FRAME[j - 1]]]
    sources = vstack(frame, fam.p, fam.dim_v)
    coefficients, _ = project_onto_rows(sources, fam.maps[point_id(s, i)])
    return coefficients.col_block(0, fam.c), coefficients.col_block(fam.c, 2 * fam.c)


def groupoid_rep_from_family(
    p: Presentation, fam: LinearMapFamily
) -> GroupoidRepresentation:
    """Read F(g_{s,i,j}) off the determination maps of s_i on its frame line.

    With T_{s_i} ≈ A·T_{b_i} + B·T_{b_j}, the forward arrow is −B⁻¹A and the
    backward arrow −A⁻¹B, using approximate inverses for singular blocks.
    """
    morphisms: dict[Arrow, Matrix] = {}
    for s in p.ids:
        for i, j in FORWARD:
            a, b = _solve_line(fam, s, i, j)
            b_inv, _ = approximate_left_inverse(b)
            a_inv, _ = approximate_left_inverse(a)
            morphisms[(s, i, j)] = -(b_inv @ a)
            morphisms[(s, j, i)] = -(a_inv @ b)
    return GroupoidRepresentation(presentation=p, morphisms=morphisms)


def groupoid_normalize(
    rep: GroupoidRepresentation,
) -> tuple[GroupoidRepresentation, dict[str, Matrix], AuditReport]:
    """Conjugate by η_1 = I, η_i = F(g_{e,i,1}) and extract ρ(s) = F'(g_{s,1,2}).

    F'(f) = F(g_{e,j,1})·F(f)·F(g_{e,1,i}) for f: b_i → b_j. The report
    checks the one-object properties and every groupoid relation of F'.
    """
    e = rep.presentation.neutral
    morphisms = {
        (s, i, j): rep[(e, j, 1)] @ m @ rep[(e, 1, i)]
        for (s, i, j), m in rep.morphisms.items()
    }
    normalized = GroupoidRepresentation(
        presentation=rep.presentation, morphisms=morphisms
    )
    rho = {s: normalized[(s, 1, 2)] for s in rep.presentation.ids}

    report = AuditReport(subject="groupoid normalization")
    not_identity = [
        arrow_name((e, i, j))
        for i in (1, 2, 3)
        for j in (1, 2, 3)
        if i != j and not normalized[(e, i, j)].is_identity()
    ]
    report.record(
        "(b) neutral arrows are identities",
        not not_identity,
        f"{len(not_identity)} neutral arrows differ from I",
        not_identity[:WITNESS_LIMIT] or None,
    )
    uneven = [
        s
        for s in rep.presentation.ids
        if any(normalized[(s, i, j)] != rho[s] for i, j in FORWARD)
    ]
    report.record(
        "(c) forward arrows agree",
        not uneven,
        f"{len(uneven)} generators with differing forward images",
        uneven[:WITNESS_LIMIT] or None,
    )
    not_inverse = [
        s
        for s in rep.presentation.ids
        if any(
            not (normalized[(s, j, i)] @ rho[s]).is_identity() for i, j in FORWARD
        )
    ]
    report.record(
        "(d) backward arrows invert",
        not not_inverse,
        f"{len(not_inverse)} generators with a wrong backward image",
        not_inverse[:WITNESS_LIMIT] or None,
    )
    report.merge(audit_relation_distances(normalized, Fraction(0)), prefix="exact ")
    return normalized, rho, report


def relation_distance_budgets(n: int) -> tuple[Fraction, Fraction]:
    """Inverse and triangle budgets 1/(6n) and 1/n."""
    return Fraction(1, 6 * n), Fraction(1, n)


def audit_relation_distances(
    rep: GroupoidRepresentation,
    bound: Fraction,
    triangle_bound: Fraction | None = None,
) -> AuditReport:
    """Largest d_rk between the two sides of every defining relation.

    Inverse relations are held to bound, triangles to triangle_bound
    (default bound).
    """
    sizes = {m.shape for m in rep.morphisms.values()}
    if len(sizes) != 1 or any(r != c for r, c in sizes):
        msg = f"Groupoid matrices must be square of one size, got {sorted(sizes)}"
        raise ValueError(msg)
    triangle_bound = bound if triangle_bound is None else triangle_bound
    groupoid = rep.groupoid
    first = next(iter(rep.morphisms.values()))
    ident = Matrix.identity(first.rows, first.p)
    report = AuditReport(subject="groupoid relation distances")

    def worst_of(
        relations: Sequence[tuple[Arrow, ...]],
    ) -> tuple[Fraction, list[str]]:
        worst = Fraction(0)
        witness: list[str] = []
        for relation in relations:
            product = ident
            for arrow in relation:
                product @= rep[arrow]
            d = rank_distance(product, ident).value
            if not witness or d > worst:
                worst, witness = d, [arrow_name(a) for a in relation]
        return worst, witness

    for check, relations, limit in (
        ("inverse relations", groupoid.inverse_relations, bound),
        ("triangle relations", groupoid.triangle_relations, triangle_bound),
    ):
        worst, witness = worst_of(relations)
        report.record(
            check,
            worst <= limit,
            f"max d_rk = {worst} against {limit}",
            None if worst <= limit else witness,
        )
    return report
