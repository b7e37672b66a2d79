"""Entropic and probability-space representations of matroids.

Structural checks work on integer atom weights, so independence,
determination and uniformity verdicts are exact. Entropies only enter
check_entropic and are compared through interval enclosures.
"""

from collections import Counter
from collections.abc import Iterable
from math import prod

from pydantic import BaseModel, ConfigDict

from dowling_reps.core.audit import AuditReport
from dowling_reps.core.errors import BadParametersError
from dowling_reps.entropy.distribution import JointDistribution, Outcome
from dowling_reps.entropy.profile import EntropyValue, entropy
from dowling_reps.matroids.matroid import (
    DEFAULT_SCAN_BOUND,
    Matroid,
    classify_masks,
    is_connected,
)
from dowling_reps.reps.families import GroundMismatchError

WITNESS_LIMIT = 5


def require_same_ground(m: Matroid, d: JointDistribution) -> None:
    """Raise GroundMismatchError unless m and d share their ground set."""
    if set(m.ground) != set(d.ground):
        extra = sorted(set(m.ground) ^ set(d.ground))
        msg = f"Matroid and distribution grounds differ on {extra}"
        raise GroundMismatchError(msg)


def non_loops(m: Matroid) -> list[str]:
    """Elements of rank one."""
    return [x for x in m.ground if m.rank([x]) == 1]


class EntropicResult(BaseModel):
    """λ with r(A) = λ·H(X_A) on every subset, or the first subset breaking it."""

    model_config = ConfigDict(frozen=True)

    lam: EntropyValue | None = None
    witness: tuple[str, ...] | None = None
    subsets: int = 0

    @property
    def passed(self) -> bool:
        """No subset contradicts proportionality."""
        return self.witness is None


def check_entropic(
    m: Matroid, d: JointDistribution, scan_bound: int = DEFAULT_SCAN_BOUND
) -> EntropicResult:
    """r(A)·H(X_e) = H(X_A) on all subsets for a non-loop e, with λ = 1/H(X_e).

    A matroid of loops passes with no λ when every entropy is zero.
    """
    require_same_ground(m, d)
    m.require_scannable(scan_bound)
    anchor = next(iter(non_loops(m)), None)
    lam: EntropyValue | None = None
    if anchor is None:
        unit = EntropyValue.exact(0)
    else:
        unit = entropy(d, [anchor])
        if unit.contains(0):
            return EntropicResult(witness=(anchor,), subsets=1)
        lam = unit.reciprocal()
    total = 1 << len(m.ground)
    for mask in range(1, total):
        members = m.ordered(mask)
        gap = unit.scale(m.rank_of_mask(mask)) - entropy(d, members)
        if not gap.contains(0):
            return EntropicResult(witness=tuple(members), subsets=mask)
    return EntropicResult(lam=lam, subsets=total - 1)


def factorization_witness(
    d: JointDistribution, variables: Iterable[str]
) -> Outcome | None:
    """A joint value with P_A(ω) ≠ Π P_e(ω_e), or None if X_A is independent.

    Matching on the support suffices: the products over the joint support
    then sum to one, so no product cell is missing.
    """
    members = list(dict.fromkeys(variables))
    if len(members) < 2:  # noqa: PLR2004
        return None
    joint = d.weight_table(members)
    singles = [d.weight_table([x]) for x in members]
    scale = d.denominator ** (len(members) - 1)
    for outcome, weight in joint.items():
        expected = prod(singles[k][(v,)] for k, v in enumerate(outcome))
        if weight * scale != expected:
            return outcome
    return None


def fiber_witness(
    d: JointDistribution, sources: Iterable[str], target: str
) -> Outcome | None:
    """A value of X_sources seen with two values of X_target, or None."""
    src = list(dict.fromkeys(sources))
    if target in src:
        return None
    values, _ = d.marginal([*src, target])
    counts = Counter(tuple(row[:-1]) for row in values.tolist())
    return next((key for key, count in counts.items() if count > 1), None)


def extract_determination(
    d: JointDistribution, sources: Iterable[str], target: str
) -> dict[Outcome, int] | None:
    """f with f(X_sources) = X_target on positive-probability values, if any."""
    src = list(dict.fromkeys(sources))
    if target in src:
        at = src.index(target)
        values, _ = d.marginal(src)
        return {tuple(row): row[at] for row in values.tolist()}
    values, _ = d.marginal([*src, target])
    table: dict[Outcome, int] = {}
    for row in values.tolist():
        key = tuple(row[:-1])
        if key in table:
            return None
        table[key] = row[-1]
    return table


def check_probability_space_rep(
    m: Matroid, d: JointDistribution, scan_bound: int = DEFAULT_SCAN_BOUND
) -> AuditReport:
    """Independence, determination and non-triviality in exact arithmetic."""
    require_same_ground(m, d)
    scan = classify_masks(m, scan_bound)
    report = AuditReport(subject="probability-space representation")

    dependent: list[dict[str, object]] = []
    for a in scan.independent:
        members = m.ordered(a)
        outcome = factorization_witness(d, members)
        if outcome is not None:
            dependent.append({"variables": members, "outcome": list(outcome)})
    report.record(
        "independence",
        not dependent,
        f"{len(scan.independent)} independent sets, {len(dependent)} not factorizing",
        dependent[:WITNESS_LIMIT] or None,
    )

    undetermined: list[dict[str, object]] = []
    pairs = 0
    for circuit in scan.circuits:
        members = m.ordered(circuit)
        for x in members:
            pairs += 1
            sources = [y for y in members if y != x]
            outcome = fiber_witness(d, sources, x)
            if outcome is not None:
                undetermined.append(
                    {"sources": sources, "target": x, "fiber": list(outcome)}
                )
    report.record(
        "determination",
        not undetermined,
        f"{pairs} circuit elements, {len(undetermined)} not determined",
        undetermined[:WITNESS_LIMIT] or None,
    )

    constant = [x for x in non_loops(m) if len(d.support(x)) < 2]  # noqa: PLR2004
    report.record(
        "non-triviality",
        not constant,
        f"{len(constant)} non-loops with a single outcome",
        constant[:WITNESS_LIMIT] or None,
    )
    return report


def check_uniformity(
    m: Matroid,
    d: JointDistribution,
    scan_bound: int = DEFAULT_SCAN_BOUND,
    *,
    check_precondition: bool = True,
) -> AuditReport:
    """Every non-loop marginal is uniform on its support, all supports one size.

    Needs a connected matroid of rank at least two; unless check_precondition
    is off, d must also represent it.
    """
    if m.full_rank < 2 or not is_connected(m, scan_bound):  # noqa: PLR2004
        msg = "Uniformity needs a connected matroid of rank at least two"
        raise BadParametersError(msg)
    representation = (
        check_probability_space_rep(m, d, scan_bound) if check_precondition else None
    )
    if representation is not None and not representation.passed:
        first = representation.failures()[0]
        msg = f"Distribution is not a representation: {first.check} {first.detail}"
        raise BadParametersError(msg)

    report = AuditReport(subject="uniform marginals")
    sizes: dict[str, int] = {}
    skewed: list[dict[str, object]] = []
    for x in non_loops(m):
        table = d.probabilities([x])
        sizes[x] = len(table)
        if len(set(table.values())) > 1:
            skewed.append(
                {"variable": x, "marginal": {v[0]: str(p) for v, p in table.items()}}
            )
    report.record(
        "uniform marginals",
        not skewed,
        f"{len(skewed)} non-uniform marginals",
        skewed[:WITNESS_LIMIT] or None,
    )
    distinct = sorted(set(sizes.values()))
    report.record(
        "equal support sizes",
        len(distinct) == 1,
        f"support sizes {distinct}",
        None if len(distinct) == 1 else sizes,
    )
    return report
