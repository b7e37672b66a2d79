"""Subspace arrangements and the map families reading them in the dual basis."""

from collections.abc import Iterable
from typing import Self

from pydantic import BaseModel, ConfigDict, model_validator

from dowling_reps.linalg.matrix import Matrix, rank, row_reduce, vstack
from dowling_reps.reps.families import LinearMapFamily, UnknownElementError


class SubspaceArrangement(BaseModel):
    """Subspaces W_e of GF(p)^dim_v, each given by a basis in its rows."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p: int
    dim_v: int
    subspaces: dict[str, Matrix]

    @model_validator(mode="after")
    def validate_bases(self) -> Self:
        """Basis rows are independent vectors of GF(p)^dim_v."""
        for element, basis in self.subspaces.items():
            if basis.p != self.p or basis.cols != self.dim_v:
                msg = f"Basis of {element!r} does not live in GF({self.p})^{self.dim_v}"
                raise ValueError(msg)
            if rank(basis) != basis.rows:
                msg = f"Basis rows of {element!r} are dependent"
                raise ValueError(msg)
        return self

    def dimension(self, element: str) -> int:
        """dim W_e."""
        return self.subspaces[element].rows

    def sum_dimension(self, s: Iterable[str]) -> int:
        """dim Σ_{e∈S} W_e."""
        members = set(s)
        unknown = sorted(members - set(self.subspaces))
        if unknown:
            msg = f"Elements {unknown} are not in the arrangement"
            raise UnknownElementError(msg)
        blocks = (b for e, b in self.subspaces.items() if e in members)
        return rank(vstack(blocks, self.p, self.dim_v))


def arrangement_to_family(arr: SubspaceArrangement) -> LinearMapFamily:
    """T_e: V* → V*/W_e⁰, written as the c×dim_v matrix of a basis of W_e."""
    dims = {arr.dimension(e) for e in arr.subspaces}
    if len(dims) != 1:
        msg = f"All subspaces must have one dimension, got {sorted(dims)}"
        raise ValueError(msg)
    return LinearMapFamily(
        p=arr.p, c=dims.pop(), dim_v=arr.dim_v, maps=dict(arr.subspaces)
    )


def family_to_arrangement(fam: LinearMapFamily) -> SubspaceArrangement:
    """W_e = row space of T_e, stored as its reduced echelon basis."""
    subspaces: dict[str, Matrix] = {}
    for element, t in fam.maps.items():
        reduced, pivots = row_reduce(t.entries, t.p)
        subspaces[element] = Matrix(
            reduced[: len(pivots)].copy(), t.p, reduced=True
        )
    return SubspaceArrangement(p=fam.p, dim_v=fam.dim_v, subspaces=subspaces)
