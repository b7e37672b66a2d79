"""Randomized checks of sufficiently generic words and generic extensions.

Free letters stand for matrices with algebraically independent entries;
here they are replaced by uniform samples over a large prime field, so every
verdict is randomized with a Schwartz–Zippel failure bound.
"""

from collections.abc import Iterable, Mapping
from enum import StrEnum
from fractions import Fraction

from pydantic import BaseModel, ConfigDict

from dowling_reps.core.audit import AuditReport
from dowling_reps.core.errors import BadParametersError
from dowling_reps.groups.permutations import Permutation
from dowling_reps.groups.quotients import FiniteHomomorphism
from dowling_reps.groups.regular import is_identity_or_derangement
from dowling_reps.linalg.generic import GenericSampler
from dowling_reps.linalg.matrix import Matrix, rank
from dowling_reps.presentations.abelian import MuImage
from dowling_reps.presentations.audit import FlaggedTriple
from dowling_reps.presentations.words import Word, base_id, format_word

WITNESS_LIMIT = 10


class Verdict(StrEnum):
    """Outcome of evaluating ρ(w) − I over several samples."""

    INVERTIBLE = "invertible"
    ZERO = "zero"
    MIXED = "mixed"


class GenericityResult(BaseModel):
    """Ranks of ρ(w) − I per trial and the resulting verdict."""

    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    ranks: tuple[int, ...]
    n: int
    witness_trial: int | None = None
    failure_bound: Fraction

    @property
    def passed(self) -> bool:
        """Invertible or zero on every trial."""
        return self.verdict is not Verdict.MIXED

    def label(self) -> str:
        """Verdict with its randomized qualifier."""
        return (
            f"{self.verdict.value} (randomized, per-trial failure probability "
            f"≤ {self.failure_bound})"
        )


class GenericExtension:
    """Group letters by permutation matrices, other letters by generic matrices.

    Samples are drawn lazily and cached, so one instance is one point of the
    generic extension. Z^N coordinates act by generic nonzero scalars.
    """

    def __init__(
        self,
        group_images: Mapping[str, Permutation],
        p: int,
        n: int,
        seed: int = 0,
        resample_budget: int = 64,
    ) -> None:
        """Fix the group part and the field."""
        degrees = {perm.degree for perm in group_images.values()}
        if degrees - {n}:
            msg = f"Group images have degrees {sorted(degrees)}, expected {n}"
            raise BadParametersError(msg)
        self.n = n
        self.p = p
        self.resample_budget = resample_budget
        self._sampler = GenericSampler(p, seed)
        self._group = {g: perm.to_matrix(p) for g, perm in group_images.items()}
        self._free: dict[str, Matrix] = {}
        self._scalars: dict[str, int] = {}

    def letter(self, g: str) -> Matrix:
        """ρ of one letter."""
        if g in self._group:
            return self._group[g]
        base = base_id(g)
        if base not in self._free:
            self._free[base] = self._sampler.invertible(self.n, self.resample_budget)
        if g not in self._free:
            self._free[g] = self._free[base].inverse()
        return self._free[g]

    def scalar(self, key: str) -> int:
        """λ_key for a Z^N basis vector."""
        if key not in self._scalars:
            self._scalars[key] = self._sampler.residue(nonzero=True)
        return self._scalars[key]

    def word(self, word: Word) -> Matrix:
        """ρ(l0)ρ(l1)… ."""
        out = Matrix.identity(self.n, self.p)
        for g in word:
            out @= self.letter(g)
        return out

    def image(self, mu: MuImage) -> Matrix:
        """λ^vector · ρ(word) for a μ-image."""
        factor = 1
        for key, exponent in mu.vector.z_coords.items():
            factor = factor * pow(self.scalar(key), exponent, self.p) % self.p
        return self.word(mu.word).scale(factor)


def check_generic_invertibility(
    word_expr: Word,
    perm_images: Mapping[str, Permutation],
    trials: int,
    p: int,
    n: int,
    seed: int = 0,
) -> GenericityResult:
    """Evaluate ρ(w) − I with fresh generic matrices for the free letters.

    Letters with a permutation image are group letters; every other letter
    is free, its formal inverse spelled with a trailing prime.
    """
    for g, perm in perm_images.items():
        if perm.degree != n:
            msg = f"Image of {g!r} has degree {perm.degree}, expected {n}"
            raise BadParametersError(msg)
        if not is_identity_or_derangement(perm):
            msg = f"Image of {g!r} is neither the identity nor a derangement"
            raise BadParametersError(msg)
    ident = Matrix.identity(n, p)
    ranks: list[int] = []
    for trial in range(trials):
        ext = GenericExtension(perm_images, p, n, seed + trial)
        ranks.append(rank(ext.word(word_expr) - ident))

    witness: int | None = None
    if all(r == 0 for r in ranks):
        verdict = Verdict.ZERO
    elif all(r == n for r in ranks):
        verdict = Verdict.INVERTIBLE
    else:
        verdict = Verdict.MIXED
        partial = [i for i, r in enumerate(ranks) if 0 < r < n]
        witness = partial[0] if partial else ranks.index(n if ranks[0] == 0 else 0)
    free_letters = sum(1 for g in word_expr if g not in perm_images)
    return GenericityResult(
        verdict=verdict,
        ranks=tuple(ranks),
        n=n,
        witness_trial=witness,
        failure_bound=Fraction(n * max(free_letters, 1), p),
    )


def certify_flagged_triples(
    flagged: Iterable[FlaggedTriple],
    h: FiniteHomomorphism,
    p: int,
    trials: int,
    seed: int = 0,
) -> AuditReport:
    """Run the genericity check on the μ-word of every flagged triple.

    h should be a left-regular representation, so group images are the
    identity or derangements.
    """
    report = AuditReport(subject="flagged zero-sum triples")
    failures: list[str] = []
    zeros: list[str] = []
    checked = 0
    for triple in flagged:
        checked += 1
        result = check_generic_invertibility(
            triple.mu_word, h.images, trials, p, h.target_degree, seed
        )
        if result.verdict is Verdict.MIXED:
            failures.append(format_word(triple.letters))
        elif result.verdict is Verdict.ZERO:
            zeros.append(format_word(triple.letters))
    report.record(
        "generic invertibility",
        not failures,
        f"{checked} triples, {len(failures)} mixed, {len(zeros)} zero",
        failures[:WITNESS_LIMIT] or None,
    )
    if zeros:
        report.note(
            f"{len(zeros)} flagged triples evaluate to zero in the explored quotient"
        )
    report.note(f"verdicts are randomized over GF({p}) with {trials} trials")
    return report
