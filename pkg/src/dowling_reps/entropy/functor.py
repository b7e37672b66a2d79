"""The functor from the Dowling groupoid to finite sets given by a distribution.

F(b_i) = Ω_{b_i} × Ω and F(g_{s,i,j}) = φ_{s,i,j} with
φ_{s,i,j}(ω_i, ω) = (f_{s,i,j}(ω_i, X_{s_l}(ω)), ω), where s_l is the copy of
s on the frame line through b_i and b_j and f_{s,i,j} the determination
function of that line. Ω_{b_i} is taken to be the support of X_{b_i} and Ω
the atoms of the distribution.
"""

from collections.abc import Sequence
from itertools import combinations
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from dowling_reps.core.audit import AuditReport
from dowling_reps.core.errors import BadParametersError
from dowling_reps.entropy.distribution import JointDistribution
from dowling_reps.entropy.probability import (
    check_probability_space_rep,
    extract_determination,
    require_same_ground,
)
from dowling_reps.matroids.gdg import FRAME, DowlingGeometry, point_id
from dowling_reps.matroids.matroid import DEFAULT_SCAN_BOUND
from dowling_reps.presentations.model import Presentation
from dowling_reps.reps.groupoid import FORWARD, Arrow, DowlingGroupoid, arrow_name

WITNESS_LIMIT = 5


def line_index(i: int, j: int) -> int:
    """l with s_l on the frame line through b_i and b_j."""
    return i if (i, j) in FORWARD else j


class DowlingFunctor(BaseModel):
    """Tabulated φ_{s,i,j}: rows index the support of X_{b_i}, columns atoms."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    presentation: Presentation
    supports: dict[int, tuple[int, ...]]
    atoms: int
    maps: dict[Arrow, np.ndarray]

    def apply(self, arrow: Arrow, value: int, atom: int) -> tuple[int, int]:
        """φ_arrow(value, ω_atom)."""
        _, i, _ = arrow
        row = self.supports[i].index(value)
        return int(self.maps[arrow][row, atom]), atom

    def start(self, i: int) -> np.ndarray:
        """The identity point set of F(b_i) as a value array."""
        support = np.asarray(self.supports[i], dtype=np.int64)
        return np.repeat(support[:, None], self.atoms, axis=1)

    def push(self, arrow: Arrow, values: np.ndarray) -> np.ndarray | None:
        """Apply φ_arrow to an array of b_i values; None if one leaves the support."""
        _, i, _ = arrow
        support = np.asarray(self.supports[i], dtype=np.int64)
        idx = np.clip(np.searchsorted(support, values), 0, len(support) - 1)
        if not np.array_equal(support[idx], values):
            return None
        return self.maps[arrow][idx, np.arange(self.atoms)]

    def follow(self, relation: Sequence[Arrow]) -> np.ndarray | None:
        """Compose a relation written outermost first, starting from F(b_i)."""
        _, i, _ = relation[-1]
        values: np.ndarray | None = self.start(i)
        for arrow in reversed(relation):
            if values is None:
                return None
            values = self.push(arrow, values)
        return values

    def to_json_dict(self) -> dict[str, Any]:
        """Supports and per-arrow value tables."""
        return {
            "presentation": self.presentation.to_dict(),
            "supports": {str(i): list(v) for i, v in self.supports.items()},
            "atoms": self.atoms,
            "maps": {arrow_name(a): t.tolist() for a, t in self.maps.items()},
        }


def _tabulate(
    d: JointDistribution, arrow: Arrow, support: tuple[int, ...]
) -> np.ndarray:
    s, i, j = arrow
    source, target = FRAME[i - 1], FRAME[j - 1]
    carrier = point_id(s, line_index(i, j))
    table = extract_determination(d, [source, carrier], target)
    if table is None:
        msg = f"{target} is not determined by {source} and {carrier}"
        raise BadParametersError(msg)
    # Off-support pairs take the least outcome of the target.
    fallback = min(d.alphabets[target])
    carried = d.outcome_array[:, d.position[carrier]].tolist()
    return np.array(
        [[table.get((v, c), fallback) for c in carried] for v in support],
        dtype=np.int64,
    ).reshape(len(support), len(carried))


def _mismatch(
    functor: DowlingFunctor,
    d: JointDistribution,
    relation: Sequence[Arrow],
) -> dict[str, Any] | None:
    _, i, _ = relation[-1]
    expected = functor.start(i)
    reached = functor.follow(relation)
    names = [arrow_name(a) for a in relation]
    if reached is None:
        return {"relation": names, "detail": "left the support"}
    rows, cols = np.nonzero(reached != expected)
    if rows.size == 0:
        return None
    atom = int(cols[0])
    return {
        "relation": names,
        "value": int(expected[rows[0], atom]),
        "atom": list(d.atoms[atom][0]),
    }


def build_dowling_functor(
    gdg: DowlingGeometry,
    d: JointDistribution,
    scan_bound: int = DEFAULT_SCAN_BOUND,
    *,
    check_precondition: bool = True,
) -> tuple[DowlingFunctor, AuditReport]:
    """Tabulate every φ_{s,i,j} and check the functor exhaustively.

    The report covers mutual inversion, the relator triangles and
    faithfulness on generators, all on the supports.
    """
    if check_precondition:
        representation = check_probability_space_rep(gdg, d, scan_bound)
        if not representation.passed:
            first = representation.failures()[0]
            msg = f"Distribution is not a representation: {first.check} {first.detail}"
            raise BadParametersError(msg)
    else:
        require_same_ground(gdg, d)

    p = gdg.presentation
    groupoid = DowlingGroupoid(p)
    supports = {i: d.support(FRAME[i - 1]) for i in (1, 2, 3)}
    maps = {arrow: _tabulate(d, arrow, supports[arrow[1]]) for arrow in groupoid.arrows}
    functor = DowlingFunctor(
        presentation=p, supports=supports, atoms=len(d.atoms), maps=maps
    )
    report = AuditReport(subject="Dowling functor")

    for check, relations in (
        ("(1) mutual inversion", groupoid.inverse_relations),
        ("(2) relator triangles", groupoid.triangle_relations),
    ):
        broken = [
            w for w in (_mismatch(functor, d, r) for r in relations) if w is not None
        ]
        report.record(
            check,
            not broken,
            f"{len(relations)} relations, {len(broken)} not the identity",
            broken[:WITNESS_LIMIT] or None,
        )

    collisions = [
        (arrow_name((s, i, j)), arrow_name((t, i, j)))
        for i in (1, 2, 3)
        for j in (1, 2, 3)
        if i != j
        for s, t in combinations(p.ids, 2)
        if np.array_equal(maps[(s, i, j)], maps[(t, i, j)])
    ]
    report.record(
        "(3) faithfulness",
        not collisions,
        f"{len(collisions)} pairs of generators with equal maps",
        collisions[:WITNESS_LIMIT] or None,
    )
    sizes = sorted(len(v) for v in supports.values())
    report.note(f"maps evaluated on supports of sizes {sizes}")
    return functor, report
