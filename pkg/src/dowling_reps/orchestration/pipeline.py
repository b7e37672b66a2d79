"""Pipelines for the two reductions from word problems to matroid questions."""

import json
from collections.abc import Iterable, Sequence
from datetime import UTC, datetime
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field
from rich.console import Console
from sympy.utilities.iterables import multiset_partitions

from dowling_reps.core.audit import AuditReport
from dowling_reps.core.config import Config
from dowling_reps.core.errors import BadParametersError
from dowling_reps.core.logging import InMemoryStageLogger, StageLogger
from dowling_reps.groups.quotients import (
    FiniteHomomorphism,
    search_finite_quotient,
    verify_homomorphism,
)
from dowling_reps.groups.regular import left_regular_representation
from dowling_reps.groups.sofic import check_sofic_witness, cyclic_shift_witness
from dowling_reps.linalg.matrix import Matrix
from dowling_reps.matroids.gdg import (
    DowlingGeometry,
    build_gdg,
    subordinate_family,
    triple_words,
)
from dowling_reps.presentations.augmentation import (
    Z_GENERATORS,
    AugmentedPresentation,
    augment,
)
from dowling_reps.presentations.model import (
    Generator,
    Presentation,
    generator_sort_key,
    is_symmetric_triangular,
    require_symmetric_triangular,
)
from dowling_reps.presentations.scrambling import (
    prepare_distinct_letters,
    scramble,
    x_id,
)
from dowling_reps.presentations.triangular import normalize_symmetric_triangular
from dowling_reps.presentations.words import Word, format_word, symmetric_closure
from dowling_reps.reps.builder import (
    HYPOTHESIS_DIVISOR,
    MatrixImages,
    build_gdg_representation,
    hypothesis_epsilon,
    shift_images,
    word_image,
)
from dowling_reps.reps.families import check_representation
from dowling_reps.reps.genericity import GenericExtension
from dowling_reps.reps.groupoid import (
    audit_relation_distances,
    groupoid_rep_from_family,
    relation_distance_budgets,
)

UNKNOWN = "unknown at bound"
FOUND = "witness found"
CANDIDATES = "candidates emitted"
NEGATIVE = "no admissible relation"


class FamilyMember(BaseModel):
    """One emitted geometry of a subordinate family."""

    label: str
    added: list[str] = Field(default_factory=list)
    ground_size: int
    lines: int


class Certificate(BaseModel):
    """An exact vector-space representation of one subordinate geometry."""

    presentation: dict[str, Any]
    added: list[str] = Field(default_factory=list)
    prime: int
    images: dict[str, dict[str, Any]]
    passed: bool
    summary: str
    family_member: bool = True
    caveats: list[str] = Field(default_factory=list)


class QuotientMember(BaseModel):
    """An equivalence relation on S keeping the target away from e."""

    classes: list[list[str]]
    presentation: dict[str, Any] | None = None
    skipped: str | None = None
    family: list[FamilyMember] = Field(default_factory=list)


class SoficAudit(BaseModel):
    """The ε reached by a sofic-shift representation at degree n."""

    construction: str
    n: int
    hypothesis_epsilon: Fraction
    epsilon: Fraction
    worst: Fraction
    passed: bool
    relation_distances_passed: bool
    witness_passed: bool


class PipelineRecord(BaseModel):
    """Everything a reduction produced, in a self-verifying form."""

    kind: Literal["entropic", "almost-multilinear"]
    presentation: dict[str, Any]
    target: list[str]
    normalized: dict[str, Any]
    artifacts: dict[str, Any] = Field(default_factory=dict)
    family: list[FamilyMember] = Field(default_factory=list)
    verdict: str = UNKNOWN
    homomorphism: dict[str, Any] | None = None
    certificate: Certificate | None = None
    quotients: list[QuotientMember] = Field(default_factory=list)
    admissible_relations: int = 0
    truncated: bool = False
    sofic: list[SoficAudit] = Field(default_factory=list)
    audits: list[AuditReport] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        """A certificate passed, or quotient candidates were emitted."""
        if self.kind == "entropic":
            return self.certificate is not None and self.certificate.passed
        return self.verdict == CANDIDATES and all(a.passed for a in self.sofic)

    def to_json_dict(self) -> dict[str, Any]:
        """JSON export."""
        return self.model_dump(mode="json")

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "PipelineRecord":
        """Inverse of to_json_dict."""
        return cls.model_validate(data)


def single_generator(p: Presentation, w: Word) -> str:
    """The generator w consists of; reductions target one non-neutral letter."""
    p.check_word(w)
    if len(w) != 1 or w[0] == p.neutral:
        msg = f"Target must be a single non-neutral generator, got {format_word(w)!r}"
        raise BadParametersError(msg)
    return w[0]


def family_members(
    members: Iterable[tuple[tuple[Word, ...], DowlingGeometry]],
) -> list[FamilyMember]:
    """Summaries of emitted geometries."""
    out: list[FamilyMember] = []
    for k, (extra, geometry) in enumerate(members):
        out.append(
            FamilyMember(
                label=f"M{k}",
                added=[format_word(w) for w in extra],
                ground_size=len(geometry.ground),
                lines=len(geometry.lines),
            )
        )
    return out


def certificate_slice(aug: AugmentedPresentation, scan_bound: int) -> Presentation:
    """Restrict the augmented presentation to t, x[s] and z1 while scannable.

    Generators are added in that order as long as the geometry's ground
    set 3 + 3|S| stays within scan_bound.
    """
    keep: list[str] = []
    for g in (aug.t_gen, x_id(aug.s_target), Z_GENERATORS[0]):
        size = 3 + 3 * (1 + 2 * (len(keep) + 1))
        if size > scan_bound:
            break
        keep.append(g)
    return aug.result.restrict(keep)


def certificate_scope(
    aug: AugmentedPresentation, scan_bound: int
) -> tuple[Presentation, bool]:
    """The presentation a certificate is built over, and whether it is the member.

    The augmented presentation itself when its geometry is scannable,
    otherwise the slice of certificate_slice, which is not a family member.
    """
    if 3 + 3 * len(aug.result.ids) <= scan_bound:
        return aug.result, True
    return certificate_slice(aug, scan_bound), False


def certify_exact(
    p: Presentation, rho: MatrixImages, scan_bound: int
) -> tuple[Presentation, list[Word], AuditReport]:
    """Add the exact coincidences of rho to p and check its geometry at ε = 0."""
    added = exact_coincidences(p, rho)
    certified = p.with_relators(
        symmetric_closure((*p.relators, *added), p.inverse_of)
    )
    fam = build_gdg_representation(certified, rho)
    report = check_representation(build_gdg(certified), fam, Fraction(0), scan_bound)
    return certified, added, report


def exact_coincidences(p: Presentation, rho: MatrixImages) -> list[Word]:
    """Triples outside R whose image product is exactly the identity."""
    first = next(iter(rho.values()))
    return [
        w
        for w in triple_words(p)
        if w not in p.relators and word_image(rho, w, first.rows, first.p).is_identity()
    ]


def quotient_presentation(
    p: Presentation, classes: Sequence[Sequence[str]]
) -> Presentation | None:
    """⟨S/∼ | R/∼⟩, or None when ∼ does not respect inversion.

    Each class is represented by its least generator in canonical order.
    """
    inv = p.inverse_of
    rep: dict[str, str] = {}
    for block in classes:
        least = min(block, key=lambda g: generator_sort_key(g, p.neutral))
        rep.update(dict.fromkeys(block, least))
    blocks = {frozenset(block) for block in classes}
    for block in blocks:
        if frozenset(inv[g] for g in block) not in blocks:
            return None
    reps = sorted(set(rep.values()), key=lambda g: generator_sort_key(g, p.neutral))
    return Presentation(
        generators=tuple(Generator(id=g, inverse_id=rep[inv[g]]) for g in reps),
        relators=frozenset(tuple(rep[x] for x in r) for r in p.relators),
        neutral=p.neutral,
    )


def admissible_relations(p: Presentation, s: str) -> Iterable[list[list[str]]]:
    """Set partitions of S with s and e in different classes."""
    for classes in multiset_partitions(list(p.ids)):
        if not any(s in block and p.neutral in block for block in classes):
            yield [sorted(block) for block in classes]


def sofic_audit(p: Presentation, letter: str, n: int, scan_bound: int) -> SoficAudit:
    """Shift images of degree n, audited at the 18/n budget."""
    rho = shift_images(n, letter=letter)
    needed = hypothesis_epsilon(p, rho)
    fam = build_gdg_representation(p, rho)
    budget = Fraction(HYPOTHESIS_DIVISOR, n)
    report = check_representation(build_gdg(p), fam, budget, scan_bound)
    inverse_bound, triangle_bound = relation_distance_budgets(n)
    distances = audit_relation_distances(
        groupoid_rep_from_family(p, fam), inverse_bound, triangle_bound
    )
    witness = check_sofic_witness(cyclic_shift_witness(n, letter=letter))
    return SoficAudit(
        construction=f"shift:{letter}",
        n=n,
        hypothesis_epsilon=needed,
        epsilon=budget,
        worst=report.worst_normalized,
        passed=report.passed,
        relation_distances_passed=distances.passed,
        witness_passed=witness.passed,
    )


class Pipeline:
    """Runs the reductions stage by stage and records every artifact."""

    def __init__(
        self,
        config: Config,
        quiet: bool = False,
        stage_logger: StageLogger | None = None,
    ) -> None:
        """Initialize the pipeline with configuration.

        Args:
            config: The configuration for this run
            quiet: Suppress console output
            stage_logger: Strategy for logging stage outcomes.
                Defaults to InMemoryStageLogger for testing.
                Use StreamingStageLogger for per-stage files on disk.

        """
        self.config = config
        self.quiet = quiet
        self.console = Console(quiet=quiet)
        self._run_timestamp: str = datetime.now(tz=UTC).strftime("%Y%m%d_%H%M%S")
        if stage_logger is None:
            self.stage_logger: StageLogger = InMemoryStageLogger()
        else:
            self.stage_logger = stage_logger

    def _log(self, message: str, style: str | None = None) -> None:
        """Log a message if not in quiet mode."""
        if not self.quiet:
            if style:
                self.console.print(message, style=style)
            else:
                self.console.print(message)

    def _stage(
        self,
        stage: str,
        status: str,
        summary: str,
        metadata: dict[str, Any] | None = None,
    ) -> None:
        style = {"ok": "green", "fail": "red"}.get(status, "yellow")
        self._log(f"  [{stage}] {summary}", style=style)
        self.stage_logger.log_stage(stage, status, summary, metadata)

    @property
    def scan_bound(self) -> int:
        """Configured subset scan bound."""
        return self.config.scan.scan_bound

    def reduce_entropic(self, p: Presentation, w: Word) -> PipelineRecord:
        """Emit the subordinate family for (p, w) and certify one member.

        A finite quotient with φ(w) ≠ e yields a left-regular permutation
        representation, extended by generic matrices over the certificate
        prime to the augmented presentation. The certificate is the exact
        representation of the geometry of the augmented presentation with its
        exact coincidences added as relators, or of a flagged slice when that
        geometry is too large to scan.
        """
        s = single_generator(p, w)
        self._log("=" * 50, style="bold")
        self._log(f"Entropic reduction of {format_word(w)}", style="bold yellow")
        self._log("=" * 50, style="bold")

        normalized = normalize_symmetric_triangular(p)
        record = PipelineRecord(
            kind="entropic",
            presentation=p.to_dict(),
            target=list(w),
            normalized=normalized.to_dict(),
        )
        record.audits.append(is_symmetric_triangular(normalized))
        self._stage(
            "normalize",
            "ok",
            f"|S|={len(normalized.ids)}, |R|={len(normalized.relators)}",
        )

        sp = scramble(normalized)
        record.artifacts["scrambled"] = {
            "generators": len(sp.result.ids),
            "relators": len(sp.result.relators),
            "n_factors": sp.N,
        }
        self._stage("scramble", "ok", f"|S'|={len(sp.result.ids)}, N={sp.N}")

        aug = augment(sp, s)
        record.artifacts["augmented"] = {
            "generators": len(aug.result.ids),
            "relators": len(aug.result.relators),
            "r": aug.r,
        }
        self._stage("augment", "ok", f"|S''|={len(aug.result.ids)}, r={aug.r}")

        budget = self.config.pipeline
        record.family = family_members(
            subordinate_family(
                aug.result, budget.relation_budget, budget.family_budget
            )
        )
        self._stage(
            "subordinate",
            "ok",
            f"{len(record.family)} geometries over |S''|={len(aug.result.ids)}",
        )
        piece, member = certificate_scope(aug, self.scan_bound)
        if not member:
            record.artifacts["slice"] = list(piece.ids)
            record.notes.append(
                f"certificate restricted to the slice {list(piece.ids)}; "
                "it is not a member of the emitted family"
            )

        h = search_finite_quotient(sp.prepared, w, self.config.search.n_max)
        if h is None:
            record.verdict = UNKNOWN
            record.notes.append(
                f"no quotient of degree ≤ {self.config.search.n_max} separates "
                f"{format_word(w)} from e"
            )
            self._stage("search", "unknown", UNKNOWN)
            return record
        record.homomorphism = h.to_json_dict()
        record.audits.append(verify_homomorphism(sp.prepared, h, w))
        record.verdict = FOUND
        self._stage("search", "ok", f"witness in S_{h.target_degree}")

        regular = left_regular_representation(h, self.config.search.image_group_bound)
        record.certificate = self._certify(aug, piece, regular, member=member)
        status = "ok" if record.certificate.passed else "fail"
        self._stage("certify", status, record.certificate.summary)
        return record

    def _certify(
        self,
        aug: AugmentedPresentation,
        piece: Presentation,
        regular: FiniteHomomorphism,
        *,
        member: bool,
    ) -> Certificate:
        field = self.config.field
        ext = GenericExtension(
            regular.images,
            field.certificate_prime,
            regular.target_degree,
            field.seed,
            field.resample_budget,
        )
        rho = {g: ext.image(aug.image_of(g)) for g in piece.ids}
        certified, added, report = certify_exact(piece, rho, self.scan_bound)
        scope = (
            "certifies the augmented presentation with its coincidences added"
            if member
            else f"certifies the restriction to the slice {list(piece.ids)}; "
            "this geometry is not a member of the emitted family"
        )
        return Certificate(
            presentation=certified.to_dict(),
            added=[format_word(x) for x in added],
            prime=field.certificate_prime,
            images={g: m.to_dict() for g, m in rho.items()},
            passed=report.passed,
            summary=report.summary(),
            family_member=member,
            caveats=[
                scope,
                "free and Z letters are one random sample over "
                f"GF({field.certificate_prime}); coincidences are exact only "
                "for this sample",
                f"group part acts on the {regular.target_degree} elements of the "
                "image group",
            ],
        )

    def reduce_almost_multilinear(
        self, p: Presentation, w: Word, sofic_letter: str | None = None
    ) -> PipelineRecord:
        """Quotients ⟨S/∼ | R/∼⟩ keeping w ≁ e, and optional sofic ε audits.

        With sofic_letter, shift images of every configured degree are
        audited as almost-representations of the geometry of p.
        """
        require_symmetric_triangular(p)
        s = single_generator(p, w)
        self._log("=" * 50, style="bold")
        self._log(f"Almost-multilinear reduction of {s}", style="bold yellow")
        self._log("=" * 50, style="bold")

        record = PipelineRecord(
            kind="almost-multilinear",
            presentation=p.to_dict(),
            target=list(w),
            normalized=p.to_dict(),
        )
        budget = self.config.pipeline
        for classes in admissible_relations(p, s):
            if record.admissible_relations >= budget.equivalence_budget:
                record.truncated = True
                break
            record.admissible_relations += 1
            quotient = quotient_presentation(p, classes)
            if quotient is None:
                record.quotients.append(
                    QuotientMember(classes=classes, skipped="does not respect inverses")
                )
                continue
            family = family_members(
                subordinate_family(
                    quotient, budget.relation_budget, budget.family_budget
                )
            )
            record.quotients.append(
                QuotientMember(
                    classes=classes, presentation=quotient.to_dict(), family=family
                )
            )
        built = [q for q in record.quotients if q.presentation is not None]
        record.family = [m for q in built for m in q.family]
        record.verdict = CANDIDATES if built else NEGATIVE
        self._stage(
            "quotients",
            "ok" if built else "fail",
            f"{record.admissible_relations} admissible relations, "
            f"{len(built)} quotients, {len(record.family)} geometries",
            {"truncated": record.truncated},
        )

        if sofic_letter is not None:
            for n in budget.sofic_degrees:
                audit = sofic_audit(p, sofic_letter, n, self.scan_bound)
                record.sofic.append(audit)
                self._stage(
                    f"sofic n={n}",
                    "ok" if audit.passed else "fail",
                    f"worst {audit.worst} against ε = {audit.epsilon}",
                )
        return record

    def save_record(
        self, record: PipelineRecord, output_dir: Path | None = None
    ) -> Path:
        """Write record.json and summary.txt; return the record path."""
        if output_dir is None:
            output_dir = Path(self.config.pipeline.output_dir) / self._run_timestamp
        output_dir.mkdir(parents=True, exist_ok=True)
        path = output_dir / "record.json"
        with path.open("w", encoding="utf-8") as f:
            json.dump(record.to_json_dict(), f, indent=2)
        with (output_dir / "summary.txt").open("w", encoding="utf-8") as f:
            f.write("dowling-reps run summary\n")
            f.write("========================\n\n")
            f.write(f"Timestamp: {self._run_timestamp}\n")
            f.write(f"Reduction: {record.kind}\n")
            f.write(f"Target: {' '.join(record.target)}\n")
            f.write(f"Verdict: {record.verdict}\n")
            f.write(f"Geometries emitted: {len(record.family)}\n")
            if record.certificate is not None:
                f.write(f"Certificate: {record.certificate.summary}\n")
        self._log(f"\nRecord saved to: {path}", style="bold green")
        return path


def load_record(path: Path) -> PipelineRecord:
    """Read a record written by save_record."""
    with path.open(encoding="utf-8") as f:
        return PipelineRecord.from_json_dict(json.load(f))


def verify_record(record: PipelineRecord, scan_bound: int = 16) -> AuditReport:
    """Re-check every certificate in a record from its own contents."""
    report = AuditReport(subject=f"{record.kind} record")
    original = Presentation.model_validate(record.presentation)
    normalized = Presentation.model_validate(record.normalized)
    target = tuple(record.target)

    if record.kind == "entropic":
        report.record(
            "normalization",
            normalize_symmetric_triangular(original) == normalized,
            f"|S|={len(normalized.ids)}",
        )
    else:
        report.merge(is_symmetric_triangular(normalized), prefix="input ")

    if record.homomorphism is not None:
        h = FiniteHomomorphism.from_json_dict(record.homomorphism)
        prepared = prepare_distinct_letters(normalized)
        report.merge(verify_homomorphism(prepared, h, target), prefix="witness ")

    if record.certificate is not None:
        cert = record.certificate
        certified = Presentation.model_validate(cert.presentation)
        images = {g: Matrix.from_dict(d) for g, d in cert.images.items()}
        fam = build_gdg_representation(certified, images)
        rep = check_representation(build_gdg(certified), fam, Fraction(0), scan_bound)
        report.record("certificate", rep.passed, rep.summary())
        if not cert.family_member:
            report.note("the certified geometry is a slice, not a family member")
        for caveat in cert.caveats:
            report.note(caveat)

    for member in record.quotients:
        if member.presentation is None:
            continue
        quotient = Presentation.model_validate(member.presentation)
        rebuilt = quotient_presentation(normalized, member.classes)
        label = "/".join(",".join(block) for block in member.classes)
        report.record(
            f"quotient {label}",
            rebuilt == quotient and is_symmetric_triangular(quotient).passed,
            f"|S/∼|={len(quotient.ids)}",
        )

    for audit in record.sofic:
        _, letter = audit.construction.split(":", 1)
        again = sofic_audit(normalized, letter, audit.n, scan_bound)
        report.record(
            f"sofic n={audit.n}",
            again == audit and audit.passed,
            f"worst {again.worst} against ε = {again.epsilon}",
        )
    return report
