"""Command-line interface for dowling-reps.

Exit codes: 0 when a check passes or a search finds something, 1 when a
check fails or a search comes back empty, 2 on unreadable input or bad
parameters.
"""

import json
from collections.abc import Iterator
from contextlib import contextmanager
from datetime import UTC, datetime
from enum import StrEnum
from fractions import Fraction
from pathlib import Path
from typing import Any

import typer
from pydantic import BaseModel, ConfigDict

from dowling_reps.ci.compiler import compile_matroid_to_ci
from dowling_reps.ci.search import cir_search
from dowling_reps.ci.statements import format_statements, parse_statements
from dowling_reps.core.audit import AuditReport
from dowling_reps.core.config import Config, load_config
from dowling_reps.core.logging import StreamingStageLogger
from dowling_reps.entropy.distribution import (
    JointDistribution,
    canonical_linear_distribution,
)
from dowling_reps.entropy.functor import build_dowling_functor
from dowling_reps.entropy.probability import (
    check_entropic,
    check_probability_space_rep,
    check_uniformity,
)
from dowling_reps.groups.quotients import search_finite_quotient
from dowling_reps.groups.regular import left_regular_representation
from dowling_reps.linalg.matrix import Matrix
from dowling_reps.matroids.gdg import DowlingGeometry, build_gdg, subordinate_family
from dowling_reps.matroids.matroid import (
    Matroid,
    matroid_from_json_dict,
    verify_matroid_axioms,
)
from dowling_reps.orchestration.pipeline import (
    Pipeline,
    PipelineRecord,
    family_members,
    load_record,
    verify_record,
)
from dowling_reps.presentations.audit import (
    audit_scrambling,
    classify_zero_sum_triples,
)
from dowling_reps.presentations.augmentation import augment
from dowling_reps.presentations.model import Presentation
from dowling_reps.presentations.parser import (
    format_presentation,
    parse_presentation,
    tokenize_word,
)
from dowling_reps.presentations.scrambling import scramble
from dowling_reps.presentations.triangular import normalize_symmetric_triangular
from dowling_reps.presentations.words import Word, format_word
from dowling_reps.reps.builder import (
    MatrixImages,
    build_gdg_representation,
    scalar_images,
)
from dowling_reps.reps.families import LinearMapFamily, check_representation
from dowling_reps.reps.genericity import certify_flagged_triples

app = typer.Typer(
    help="dowling-reps - word problems, Dowling geometries and matroid representations"
)

EXIT_FAIL = 1
EXIT_ERROR = 2


class OutputFormat(StrEnum):
    """How results are printed."""

    JSON = "json"
    TEXT = "text"


class CLIState(BaseModel):
    """Options shared by every subcommand."""

    model_config = ConfigDict(frozen=True)

    config: Config
    output_format: OutputFormat = OutputFormat.TEXT
    quiet: bool = False


PRESENTATION_ARG = typer.Argument(..., help="Presentation text file or JSON")
MATROID_ARG = typer.Argument(
    ..., help="Matroid JSON, geometry JSON or a presentation file"
)
OUTPUT_OPTION = typer.Option(None, "--output", "-o", help="Write the artifact here")
WORD_OPTION = typer.Option(..., "--word", "-w", help="Target word, e.g. 'a'")
SCALAR_OPTION = typer.Option(
    None, "--scalar", help="Scalar image g=value; repeat per generator"
)
PRIME_OPTION = typer.Option(None, "--prime", help="Field size for --scalar images")
CONFIG_OPTION = typer.Option(
    None, "--config", "-c", help="Path to YAML configuration file"
)
SEED_OPTION = typer.Option(None, "--seed", help="Seed for all randomness")
FORMAT_OPTION = typer.Option(OutputFormat.TEXT, "--format", help="Output format")
QUIET_OPTION = typer.Option(False, "--quiet", "-q", help="Suppress progress output")
CERTIFY_OPTION = typer.Option(
    None, "--word", "-w", help="Certify flagged triples against a quotient"
)
AT_OPTION = typer.Option(..., "--at", help="Generator s defining t = s z1 s")
RELATIONS_OPTION = typer.Option(
    None, "--relations", help="Largest number of added triples"
)
LIMIT_OPTION = typer.Option(None, "--limit", help="Geometries to emit")
N_MAX_OPTION = typer.Option(None, "--n-max", help="Largest degree")
IMAGES_OPTION = typer.Option(None, "--images", help="Images JSON")
HYPOTHESIS_OPTION = typer.Option(
    None, "--epsilon", help="Check the hypotheses at this ε first"
)
FAMILY_ARG = typer.Argument(..., help="Linear map family JSON")
EPSILON_OPTION = typer.Option("0", "--epsilon", help="Allowed defect ε")
DISTRIBUTION_OPTION = typer.Option(
    None, "--distribution", "-d", help="Joint distribution JSON"
)
UNIFORMITY_OPTION = typer.Option(False, "--uniformity", help="Check uniformity")
FUNCTOR_OPTION = typer.Option(False, "--functor", help="Build the functor")
STATEMENTS_ARG = typer.Argument(..., help="CI statements, one per line")
GROUND_OPTION = typer.Option(..., "--ground", help="Comma-separated variables")
ALPHABET_OPTION = typer.Option(2, "--alphabet", help="Values per variable")
SUPPORT_OPTION = typer.Option(4, "--support", help="Largest support size")
SOFIC_OPTION = typer.Option(None, "--sofic", help="Audit shift images of this letter")
RECORD_ARG = typer.Argument(..., help="record.json of a pipeline run")


@contextmanager
def _errors() -> Iterator[None]:
    """Turn input and parameter errors into exit code 2."""
    try:
        yield
    except (ValueError, OSError) as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_ERROR) from exc


def _state(ctx: typer.Context) -> CLIState:
    state = ctx.obj
    if not isinstance(state, CLIState):
        state = CLIState(config=Config())
    return state


def _read_json(path: Path) -> Any:
    with path.open(encoding="utf-8") as f:
        return json.load(f)


def _write_json(path: Path, data: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, default=str)


def _read_presentation(path: Path) -> Presentation:
    if path.suffix == ".json":
        data = _read_json(path)
        return Presentation.model_validate(data.get("presentation", data))
    return parse_presentation(path.read_text(encoding="utf-8"))


def _read_word(p: Presentation, text: str) -> Word:
    return tokenize_word(text, frozenset(p.ids))


def _read_matroid(path: Path) -> Matroid:
    """JSON matroids as written by to_json_dict; presentations are normalized."""
    if path.suffix == ".json":
        data = _read_json(path)
        if "ground" not in data and "generators" in data:
            p = Presentation.model_validate(data)
            return build_gdg(normalize_symmetric_triangular(p))
        return matroid_from_json_dict(data)
    p = parse_presentation(path.read_text(encoding="utf-8"))
    return build_gdg(normalize_symmetric_triangular(p))


def _scalar_values(pairs: list[str] | None) -> dict[str, int]:
    """Parse repeated g=value options."""
    values: dict[str, int] = {}
    for pair in pairs or []:
        g, _, value = pair.partition("=")
        if not value:
            msg = f"Expected g=value, got {pair!r}"
            raise ValueError(msg)
        values[g.strip()] = int(value)
    return values


def _read_images(path: Path) -> MatrixImages:
    """{"prime": q, "scalars": {...}} or one Matrix JSON per generator."""
    data = _read_json(path)
    if "scalars" in data:
        return scalar_images(
            {g: int(v) for g, v in data["scalars"].items()}, int(data["prime"])
        )
    return {g: Matrix.from_dict(m) for g, m in data.items()}


def _emit(state: CLIState, data: Any, text: str) -> None:
    if state.output_format is OutputFormat.JSON:
        typer.echo(json.dumps(data, indent=2, default=str))
    else:
        typer.echo(text)


def _finish(state: CLIState, report: AuditReport) -> None:
    _emit(state, report.model_dump(mode="json"), report.to_text())
    if not report.passed:
        raise typer.Exit(EXIT_FAIL)


@app.callback()
def main(
    ctx: typer.Context,
    config_path: Path | None = CONFIG_OPTION,
    seed: int | None = SEED_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    quiet: bool = QUIET_OPTION,
) -> None:
    """Shared options; see each subcommand for its inputs."""
    with _errors():
        config = load_config(config_path, verbose=not quiet)
        if seed is not None:
            config = config.model_copy(
                update={"field": config.field.model_copy(update={"seed": seed})}
            )
    ctx.obj = CLIState(config=config, output_format=output_format, quiet=quiet)


@app.command()
def normalize(
    ctx: typer.Context,
    path: Path = PRESENTATION_ARG,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Rewrite a presentation into symmetric triangular form."""
    state = _state(ctx)
    with _errors():
        p = normalize_symmetric_triangular(_read_presentation(path))
        if output is not None:
            output.write_text(format_presentation(p), encoding="utf-8")
    _emit(state, p.to_dict(), format_presentation(p))


@app.command("scramble")
def scramble_command(
    ctx: typer.Context,
    path: Path = PRESENTATION_ARG,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Scramble the normalized presentation."""
    state = _state(ctx)
    with _errors():
        sp = scramble(normalize_symmetric_triangular(_read_presentation(path)))
        if output is not None:
            _write_json(output, sp.to_json_dict())
    _emit(
        state,
        sp.to_json_dict(),
        f"|S'| = {len(sp.result.ids)}, |R'| = {len(sp.result.relators)}, "
        f"N = {sp.N}",
    )


@app.command("audit-scramble")
def audit_scramble(
    ctx: typer.Context,
    path: Path = PRESENTATION_ARG,
    word: str | None = CERTIFY_OPTION,
) -> None:
    """Audit the scrambling properties and the zero-sum triple census."""
    state = _state(ctx)
    config = state.config
    with _errors():
        sp = scramble(normalize_symmetric_triangular(_read_presentation(path)))
        census = classify_zero_sum_triples(sp)
        report = audit_scrambling(sp, census)
        if word is not None and census.flagged:
            w = _read_word(sp.prepared, word)
            h = search_finite_quotient(sp.prepared, w, config.search.n_max)
            if h is None:
                report.note("no finite quotient found to certify flagged triples")
            else:
                regular = left_regular_representation(
                    h, config.search.image_group_bound
                )
                report.merge(
                    certify_flagged_triples(
                        census.flagged,
                        regular,
                        config.field.prime,
                        config.field.trials,
                        config.field.seed,
                    ),
                    prefix="flagged ",
                )
    _finish(state, report)


@app.command("augment")
def augment_command(
    ctx: typer.Context,
    path: Path = PRESENTATION_ARG,
    at: str = AT_OPTION,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Augment the scrambled presentation at one generator."""
    state = _state(ctx)
    with _errors():
        aug = augment(
            scramble(normalize_symmetric_triangular(_read_presentation(path))), at
        )
        if output is not None:
            _write_json(output, aug.to_json_dict())
    rows = [f"{g}: {aug.degree_table[g]}" for g in aug.result.ids]
    _emit(state, aug.to_json_dict(), "\n".join(rows))


@app.command()
def gdg(
    ctx: typer.Context,
    path: Path = PRESENTATION_ARG,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Build the Dowling geometry and check the matroid axioms."""
    state = _state(ctx)
    with _errors():
        geometry = build_gdg(normalize_symmetric_triangular(_read_presentation(path)))
        report = verify_matroid_axioms(geometry, state.config.scan.scan_bound)
        if output is not None:
            _write_json(output, geometry.to_json_dict())
    _finish(state, report)


@app.command()
def subordinate(
    ctx: typer.Context,
    path: Path = PRESENTATION_ARG,
    relations: int | None = RELATIONS_OPTION,
    limit: int | None = LIMIT_OPTION,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Emit geometries of the presentation with added triples."""
    state = _state(ctx)
    budget = state.config.pipeline
    with _errors():
        p = normalize_symmetric_triangular(_read_presentation(path))
        members = list(
            subordinate_family(
                p,
                budget.relation_budget if relations is None else relations,
                budget.family_budget if limit is None else limit,
            )
        )
        if output is not None:
            _write_json(output, [geometry.to_json_dict() for _, geometry in members])
    summaries = family_members(members)
    _emit(
        state,
        [m.model_dump() for m in summaries],
        "\n".join(
            f"{m.label}: +[{', '.join(m.added)}] {m.lines} lines" for m in summaries
        ),
    )


@app.command("wp-search")
def wp_search(
    ctx: typer.Context,
    path: Path = PRESENTATION_ARG,
    word: str = WORD_OPTION,
    n_max: int | None = N_MAX_OPTION,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Search for a finite permutation quotient where the word survives."""
    state = _state(ctx)
    with _errors():
        p = _read_presentation(path)
        w = _read_word(p, word)
        h = search_finite_quotient(p, w, n_max or state.config.search.n_max)
    if h is None:
        _emit(state, None, f"no witness up to the bound for {format_word(w)}")
        raise typer.Exit(EXIT_FAIL)
    with _errors():
        if output is not None:
            _write_json(output, h.to_json_dict())
    _emit(
        state,
        h.to_json_dict(),
        "\n".join(
            f"{g} -> {perm.one_line()}" for g, perm in sorted(h.images.items())
        ),
    )


@app.command("build-rep")
def build_rep(
    ctx: typer.Context,
    path: Path = PRESENTATION_ARG,
    images: Path | None = IMAGES_OPTION,
    scalar: list[str] | None = SCALAR_OPTION,
    prime: int | None = PRIME_OPTION,
    epsilon: str | None = HYPOTHESIS_OPTION,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Build the vector-space representation of a Dowling geometry."""
    state = _state(ctx)
    with _errors():
        p = normalize_symmetric_triangular(_read_presentation(path))
        values = _scalar_values(scalar)
        if values and prime is not None:
            rho = scalar_images(values, prime)
        elif images is not None:
            rho = _read_images(images)
        else:
            msg = "Give --images, or --scalar with --prime"
            raise ValueError(msg)
        eps = None if epsilon is None else Fraction(epsilon)
        fam = build_gdg_representation(p, rho, eps)
        if output is not None:
            _write_json(output, fam.to_json_dict())
    _emit(
        state,
        fam.to_json_dict(),
        f"{len(fam.maps)} maps GF({fam.p})^{fam.dim_v} -> GF({fam.p})^{fam.c}",
    )


@app.command("check-rep")
def check_rep(
    ctx: typer.Context,
    matroid: Path = MATROID_ARG,
    family: Path = FAMILY_ARG,
    epsilon: str = EPSILON_OPTION,
) -> None:
    """Check a family of linear maps against a matroid."""
    state = _state(ctx)
    with _errors():
        m = _read_matroid(matroid)
        fam = LinearMapFamily.from_json_dict(_read_json(family))
        report = check_representation(
            m, fam, Fraction(epsilon), state.config.scan.scan_bound
        )
    _emit(state, report.model_dump(mode="json"), report.summary())
    if not report.passed:
        raise typer.Exit(EXIT_FAIL)


@app.command("entropy-check")
def entropy_check(
    ctx: typer.Context,
    matroid: Path = MATROID_ARG,
    distribution: Path | None = DISTRIBUTION_OPTION,
    scalar: list[str] | None = SCALAR_OPTION,
    prime: int | None = PRIME_OPTION,
    uniformity: bool = UNIFORMITY_OPTION,
    functor: bool = FUNCTOR_OPTION,
) -> None:
    """Check a distribution as an entropic and probability-space representation.

    Without --distribution, the canonical linear distribution of the
    geometry is built from --scalar images over GF(--prime).
    """
    state = _state(ctx)
    bound = state.config.scan.scan_bound
    with _errors():
        m = _read_matroid(matroid)
        if distribution is not None:
            d = JointDistribution.from_json_dict(_read_json(distribution))
        else:
            values = _scalar_values(scalar)
            if not values or prime is None or not isinstance(m, DowlingGeometry):
                msg = "Give --distribution, or a geometry with --scalar and --prime"
                raise ValueError(msg)
            d = canonical_linear_distribution(m.presentation, values, prime)
        report = AuditReport(subject="entropy check")
        entropic = check_entropic(m, d, bound)
        lam = "" if entropic.lam is None else f"λ = {entropic.lam}"
        report.record(
            "entropic",
            entropic.passed,
            lam,
            None if entropic.passed else entropic.witness,
        )
        report.merge(check_probability_space_rep(m, d, bound), prefix="prob-rep ")
        if uniformity:
            report.merge(check_uniformity(m, d, bound), prefix="uniformity ")
        if functor:
            if not isinstance(m, DowlingGeometry):
                msg = "--functor needs a Dowling geometry"
                raise ValueError(msg)
            _, functor_report = build_dowling_functor(m, d, bound)
            report.merge(functor_report, prefix="functor ")
    _finish(state, report)


@app.command("ci-compile")
def ci_compile(
    ctx: typer.Context,
    matroid: Path = MATROID_ARG,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Compile a connected matroid to its CI statements."""
    state = _state(ctx)
    with _errors():
        statements = compile_matroid_to_ci(
            _read_matroid(matroid), state.config.scan.scan_bound
        )
        text = format_statements(statements)
        if output is not None:
            output.write_text(text, encoding="utf-8")
    _emit(
        state,
        [st.to_json_dict() for st in sorted(statements, key=lambda s: s.sort_key())],
        text.rstrip("\n"),
    )


@app.command("ci-search")
def ci_search(
    ctx: typer.Context,
    statements: Path = STATEMENTS_ARG,
    ground: str = GROUND_OPTION,
    alphabet: int = ALPHABET_OPTION,
    support: int = SUPPORT_OPTION,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Search uniform distributions realizing every statement."""
    state = _state(ctx)
    with _errors():
        given = parse_statements(statements.read_text(encoding="utf-8"))
        names = [x.strip() for x in ground.split(",") if x.strip()]
        found = cir_search(given, names, alphabet, support)
    if found is None:
        _emit(state, None, "no realizer within the bounds")
        raise typer.Exit(EXIT_FAIL)
    with _errors():
        if output is not None:
            _write_json(output, found.to_json_dict())
    _emit(
        state,
        found.to_json_dict(),
        "\n".join(f"{list(o)} p={prob}" for o, prob in found.atoms),
    )


def _pipeline(state: CLIState, output: Path | None) -> tuple[Pipeline, Path]:
    run_timestamp = datetime.now(tz=UTC).strftime("%Y%m%d_%H%M%S")
    run_dir = output or Path(state.config.pipeline.output_dir) / run_timestamp
    # JSON output keeps stdout machine-readable.
    quiet = state.quiet or state.output_format is OutputFormat.JSON
    pipeline = Pipeline(
        state.config,
        quiet=quiet,
        stage_logger=StreamingStageLogger(run_dir / "stages", quiet=quiet),
    )
    return pipeline, run_dir


def _report_record(
    state: CLIState, pipeline: Pipeline, record: PipelineRecord, run_dir: Path
) -> None:
    with _errors():
        path = pipeline.save_record(record, run_dir)
    text = f"{record.verdict}; {len(record.family)} geometries; record at {path}"
    if record.certificate is not None:
        text += f"\n{record.certificate.summary}"
    _emit(state, record.to_json_dict(), text)
    if not record.passed:
        raise typer.Exit(EXIT_FAIL)


@app.command("reduce-entropic")
def reduce_entropic(
    ctx: typer.Context,
    path: Path = PRESENTATION_ARG,
    word: str = WORD_OPTION,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Run the word-problem to entropic-matroid reduction."""
    state = _state(ctx)
    with _errors():
        p = _read_presentation(path)
        pipeline, run_dir = _pipeline(state, output)
        record = pipeline.reduce_entropic(p, _read_word(p, word))
    _report_record(state, pipeline, record, run_dir)


@app.command("reduce-almost")
def reduce_almost(
    ctx: typer.Context,
    path: Path = PRESENTATION_ARG,
    word: str = WORD_OPTION,
    sofic: str | None = SOFIC_OPTION,
    output: Path | None = OUTPUT_OPTION,
) -> None:
    """Run the quotient enumeration of the almost-multilinear reduction."""
    state = _state(ctx)
    with _errors():
        p = normalize_symmetric_triangular(_read_presentation(path))
        pipeline, run_dir = _pipeline(state, output)
        record = pipeline.reduce_almost_multilinear(p, _read_word(p, word), sofic)
    _report_record(state, pipeline, record, run_dir)


@app.command()
def verify(
    ctx: typer.Context,
    record: Path = RECORD_ARG,
) -> None:
    """Re-check every certificate in a pipeline record."""
    state = _state(ctx)
    with _errors():
        report = verify_record(load_record(record), state.config.scan.scan_bound)
    _finish(state, report)


if __name__ == "__main__":
    app()
