"""Finite joint distributions with exact rational probabilities."""

from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import lcm
from typing import Any, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from dowling_reps.core.errors import BadParametersError, BudgetExceededError
from dowling_reps.presentations.model import Presentation
from dowling_reps.reps.builder import build_gdg_representation, scalar_images
from dowling_reps.reps.families import LinearMapFamily

type Outcome = tuple[int, ...]

ATOM_LIMIT = 1 << 16
# Keeps every integer weight and their sums inside int64.
DENOMINATOR_LIMIT = 1 << 62


class UnknownVariableError(ValueError):
    """A variable id outside the distribution's ground set."""


class JointDistribution(BaseModel):
    """Variables X_e on a finite Ω, stored as the atoms of the joint law.

    Each atom is an outcome tuple aligned with ground and its positive
    probability.
    """

    model_config = ConfigDict(frozen=True)

    ground: tuple[str, ...]
    alphabets: dict[str, tuple[int, ...]]
    atoms: tuple[tuple[Outcome, Fraction], ...]

    @model_validator(mode="after")
    def validate_atoms(self) -> Self:
        """Positive probabilities summing to 1 on distinct in-alphabet outcomes."""
        if len(set(self.ground)) != len(self.ground):
            msg = "Ground set has repeated variables"
            raise ValueError(msg)
        if set(self.alphabets) != set(self.ground):
            msg = "Alphabets must be given for exactly the ground variables"
            raise ValueError(msg)
        if not self.atoms:
            msg = "A distribution needs at least one atom"
            raise ValueError(msg)
        seen: set[Outcome] = set()
        allowed = [set(self.alphabets[x]) for x in self.ground]
        for outcome, prob in self.atoms:
            if len(outcome) != len(self.ground):
                msg = f"Outcome {outcome} has {len(outcome)} coordinates"
                raise ValueError(msg)
            if prob <= 0:
                msg = f"Outcome {outcome} has non-positive probability {prob}"
                raise ValueError(msg)
            if outcome in seen:
                msg = f"Outcome {outcome} is listed twice"
                raise ValueError(msg)
            seen.add(outcome)
            for x, value, alphabet in zip(self.ground, outcome, allowed, strict=True):
                if value not in alphabet:
                    msg = f"Value {value} of {x!r} is outside its alphabet"
                    raise ValueError(msg)
        total = sum(prob for _, prob in self.atoms)
        if total != 1:
            msg = f"Probabilities sum to {total}, not 1"
            raise ValueError(msg)
        return self

    @classmethod
    def from_weights(
        cls,
        ground: Sequence[str],
        weights: Mapping[Outcome, int | Fraction] | Iterable[tuple[Outcome, int]],
        alphabets: Mapping[str, Iterable[int]] | None = None,
    ) -> Self:
        """Normalize non-negative weights; repeated outcomes are merged.

        Alphabets default to the values seen in the support.
        """
        items = weights.items() if isinstance(weights, Mapping) else weights
        merged: Counter[Outcome] = Counter()
        for outcome, weight in items:
            merged[tuple(int(v) for v in outcome)] += Fraction(weight)
        positive = {o: w for o, w in merged.items() if w > 0}
        total = sum(positive.values())
        if total == 0:
            msg = "Weights must have positive total"
            raise BadParametersError(msg)
        if alphabets is None:
            alphabets = {
                x: sorted({o[k] for o in positive}) for k, x in enumerate(ground)
            }
        return cls(
            ground=tuple(ground),
            alphabets={x: tuple(sorted(set(alphabets[x]))) for x in ground},
            atoms=tuple(
                (outcome, Fraction(w) / total)
                for outcome, w in sorted(positive.items())
            ),
        )

    @classmethod
    def uniform(
        cls,
        ground: Sequence[str],
        support: Iterable[Outcome],
        alphabets: Mapping[str, Iterable[int]] | None = None,
    ) -> Self:
        """Equal mass on each distinct outcome of the support."""
        return cls.from_weights(ground, {tuple(o): 1 for o in support}, alphabets)

    @cached_property
    def denominator(self) -> int:
        """Least common denominator of the atom probabilities."""
        d = lcm(*(prob.denominator for _, prob in self.atoms))
        if d >= DENOMINATOR_LIMIT:
            msg = f"Common denominator {d} is too large for integer weights"
            raise BudgetExceededError(msg)
        return d

    @cached_property
    def outcome_array(self) -> np.ndarray:
        """Atoms × variables array of outcome values."""
        return np.array([o for o, _ in self.atoms], dtype=np.int64).reshape(
            len(self.atoms), len(self.ground)
        )

    @cached_property
    def weight_array(self) -> np.ndarray:
        """Integer atom weights summing to the common denominator."""
        d = self.denominator
        return np.array(
            [prob.numerator * (d // prob.denominator) for _, prob in self.atoms],
            dtype=np.int64,
        )

    @cached_property
    def position(self) -> dict[str, int]:
        """Column of each variable."""
        return {x: i for i, x in enumerate(self.ground)}

    def columns(self, variables: Iterable[str]) -> list[int]:
        """Columns of the given variables, first occurrence order."""
        cols: list[int] = []
        for x in dict.fromkeys(variables):
            if x not in self.position:
                msg = f"Unknown variable {x!r}"
                raise UnknownVariableError(msg)
            cols.append(self.position[x])
        return cols

    def marginal(self, variables: Iterable[str]) -> tuple[np.ndarray, np.ndarray]:
        """Distinct joint values of X_S and their integer weights.

        Columns follow the order in which the variables are given; the
        empty set has a single empty outcome of full weight.
        """
        cols = self.columns(variables)
        if not cols:
            return (
                np.zeros((1, 0), dtype=np.int64),
                np.array([self.denominator], dtype=np.int64),
            )
        values, inverse = np.unique(
            self.outcome_array[:, cols], axis=0, return_inverse=True
        )
        weights = np.zeros(len(values), dtype=np.int64)
        np.add.at(weights, inverse.reshape(-1), self.weight_array)
        return values, weights

    def weight_table(self, variables: Iterable[str]) -> dict[Outcome, int]:
        """Joint value of X_S ↦ integer weight over the common denominator."""
        values, weights = self.marginal(variables)
        return {
            tuple(int(v) for v in row): int(w)
            for row, w in zip(values.tolist(), weights.tolist(), strict=True)
        }

    def probabilities(self, variables: Iterable[str]) -> dict[Outcome, Fraction]:
        """P_S on the positive-probability joint values."""
        d = self.denominator
        return {o: Fraction(w, d) for o, w in self.weight_table(variables).items()}

    def support(self, variable: str) -> tuple[int, ...]:
        """Values of X_e with positive probability, ascending."""
        values, _ = self.marginal([variable])
        return tuple(int(v) for v in values[:, 0])

    def replace_variables(self, sources: Mapping[str, str]) -> "JointDistribution":
        """Redefine each target variable as a copy of its source variable."""
        cols = self.columns(sources.values())
        targets = self.columns(sources)
        outcomes = self.outcome_array.copy()
        outcomes[:, targets] = self.outcome_array[:, cols]
        alphabets = dict(self.alphabets)
        for target, source in sources.items():
            alphabets[target] = self.alphabets[source]
        return JointDistribution.from_weights(
            self.ground,
            zip(
                (tuple(row) for row in outcomes.tolist()),
                self.weight_array.tolist(),
                strict=True,
            ),
            alphabets,
        )

    def to_json_dict(self) -> dict[str, Any]:
        """Ground, alphabets and atoms with probabilities as "num/den"."""
        return {
            "ground": list(self.ground),
            "alphabets": {x: list(self.alphabets[x]) for x in self.ground},
            "atoms": [
                {"outcome": list(outcome), "p": f"{prob.numerator}/{prob.denominator}"}
                for outcome, prob in self.atoms
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "JointDistribution":
        """Inverse of to_json_dict."""
        return cls(
            ground=tuple(str(x) for x in data["ground"]),
            alphabets={
                str(x): tuple(int(v) for v in values)
                for x, values in data["alphabets"].items()
            },
            atoms=tuple(
                (tuple(int(v) for v in atom["outcome"]), Fraction(str(atom["p"])))
                for atom in data["atoms"]
            ),
        )


def family_distribution(
    fam: LinearMapFamily, atom_limit: int = ATOM_LIMIT
) -> JointDistribution:
    """ω uniform on GF(p)^dim_v and X_e = T_e ω.

    Values of X_e are vectors of GF(p)^c encoded in base p, first
    coordinate least significant, so H(X_S) = rk(T_S)·log p.
    """
    size = fam.p**fam.dim_v
    if size > atom_limit:
        msg = f"GF({fam.p})^{fam.dim_v} has {size} points, above the limit {atom_limit}"
        raise BudgetExceededError(msg)
    omega = np.array(list(product(range(fam.p), repeat=fam.dim_v)), dtype=np.int64)
    omega = omega.reshape(size, fam.dim_v)
    digits = fam.p ** np.arange(fam.c, dtype=np.int64)
    columns = [
        ((omega @ fam.maps[x].entries.astype(np.int64).T) % fam.p) @ digits
        for x in fam.elements
    ]
    outcomes = np.stack(columns, axis=1)
    alphabet = tuple(range(fam.p**fam.c))
    return JointDistribution.from_weights(
        fam.elements,
        ((tuple(row), 1) for row in outcomes.tolist()),
        dict.fromkeys(fam.elements, alphabet),
    )


def canonical_linear_distribution(
    p: Presentation, values: Mapping[str, int], q: int
) -> JointDistribution:
    """Ω = GF(q)^3 uniform, X_{b_i} = ω_i and X_{s_i} = ω_{i+1} − ρ(s)ω_i.

    values gives ρ(s) ∈ GF(q)^* for enough generators to fill in the rest
    by inverses. When ρ is faithful and its product-one triples are exactly
    R, this represents the geometry of p with λ = 1/log q.
    """
    fam = build_gdg_representation(p, scalar_images(values, q))
    return family_distribution(fam)


def parity_distribution(ground: Sequence[str] = ("1", "2", "3")) -> JointDistribution:
    """Fair bits X_1, X_2 and their sum mod 2."""
    first, second, third = ground
    support = [(a, b, a ^ b) for a in (0, 1) for b in (0, 1)]
    return JointDistribution.uniform((first, second, third), support)


def independent_bits(ground: Sequence[str]) -> JointDistribution:
    """Mutually independent fair bits."""
    return JointDistribution.uniform(ground, product((0, 1), repeat=len(ground)))
