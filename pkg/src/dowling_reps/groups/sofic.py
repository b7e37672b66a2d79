"""Finite sofic approximations and their verification."""

from fractions import Fraction
from itertools import combinations

from pydantic import BaseModel, ConfigDict, model_validator

from dowling_reps.core.audit import AuditReport
from dowling_reps.groups.permutations import Permutation, hamming_distance
from dowling_reps.presentations.words import Word, format_word


class SoficWitness(BaseModel):
    """Elements F, a partial multiplication table and θ: F → S_n."""

    model_config = ConfigDict(frozen=True)

    elements: tuple[Word, ...]
    multiplication: tuple[tuple[int, int, int], ...]
    theta: tuple[Permutation, ...]
    epsilon: Fraction
    identity_index: int | None = None

    @model_validator(mode="after")
    def validate_shapes(self) -> "SoficWitness":
        """θ covers F, table indices are in range, degrees agree."""
        if len(self.theta) != len(self.elements):
            msg = f"{len(self.theta)} images for {len(self.elements)} elements"
            raise ValueError(msg)
        size = len(self.elements)
        for triple in self.multiplication:
            if any(not 0 <= i < size for i in triple):
                msg = f"Multiplication entry {triple} out of range"
                raise ValueError(msg)
        if len({perm.degree for perm in self.theta}) > 1:
            msg = "All permutations must share one degree"
            raise ValueError(msg)
        return self


def check_sofic_witness(w: SoficWitness) -> AuditReport:
    """Check multiplicativity, identity and separation up to ε."""
    report = AuditReport(subject="sofic witness")
    eps = w.epsilon
    if eps >= 1:
        report.note(f"epsilon {eps} >= 1 makes every condition vacuous")
        for check in ("(a) multiplicativity", "(b) identity", "(c) separation"):
            report.record(check, True, "vacuous")
        return report

    worst_mult = Fraction(0)
    mult_witness = None
    for i, j, k in w.multiplication:
        d = hamming_distance(w.theta[i].compose(w.theta[j]), w.theta[k])
        if d >= worst_mult:
            worst_mult, mult_witness = d, (i, j, k)
    report.record(
        "(a) multiplicativity",
        worst_mult < eps,
        f"max d = {worst_mult}",
        None if worst_mult < eps else mult_witness,
    )

    if w.identity_index is not None:
        theta_e = w.theta[w.identity_index]
        d_id = hamming_distance(theta_e, Permutation.identity(theta_e.degree))
        report.record("(b) identity", d_id < eps, f"d(θ(e), id) = {d_id}")
    else:
        report.record("(b) identity", True, "e not in F")

    worst_sep = Fraction(1)
    sep_witness = None
    for i, j in combinations(range(len(w.elements)), 2):
        d = hamming_distance(w.theta[i], w.theta[j])
        if d < worst_sep:
            worst_sep = d
            sep_witness = (format_word(w.elements[i]), format_word(w.elements[j]))
    ok = worst_sep >= 1 - eps
    report.record(
        "(c) separation",
        ok,
        f"min d = {worst_sep}",
        None if ok else sep_witness,
    )
    return report


def cyclic_shift_witness(
    n: int, radius: int = 1, epsilon: Fraction | None = None, letter: str = "a"
) -> SoficWitness:
    """Z approximated by shifts of Z/n on F = {a^k : |k| ≤ radius}."""
    inv = letter + "'"
    powers = list(range(-radius, radius + 1))
    elements = tuple((inv,) * -k if k < 0 else (letter,) * k for k in powers)
    position = {k: i for i, k in enumerate(powers)}
    table = tuple(
        (position[x], position[y], position[x + y])
        for x in powers
        for y in powers
        if x + y in position
    )
    return SoficWitness(
        elements=tuple(word or ("e",) for word in elements),
        multiplication=table,
        theta=tuple(Permutation.shift(n, k) for k in powers),
        epsilon=epsilon if epsilon is not None else Fraction(2, n),
        identity_index=position[0],
    )
