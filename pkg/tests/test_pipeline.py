"""Tests for the reduction pipelines."""

import json
from fractions import Fraction
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from dowling_reps.core.config import Config
from dowling_reps.core.errors import BadParametersError
from dowling_reps.core.logging import InMemoryStageLogger, StageLogger
from dowling_reps.orchestration.pipeline import (
    CANDIDATES,
    FOUND,
    UNKNOWN,
    Pipeline,
    PipelineRecord,
    admissible_relations,
    certificate_scope,
    certify_exact,
    load_record,
    quotient_presentation,
    single_generator,
    verify_record,
)
from dowling_reps.presentations.augmentation import augment
from dowling_reps.presentations.model import (
    NotSymmetricTriangularError,
    Presentation,
    is_symmetric_triangular,
)
from dowling_reps.presentations.parser import parse_presentation
from dowling_reps.presentations.scrambling import scramble
from dowling_reps.presentations.triangular import normalize_symmetric_triangular
from dowling_reps.reps.builder import complete_images, scalar_images


@pytest.fixture
def pipeline(small_config: Config) -> Pipeline:
    """A quiet pipeline with an in-memory stage log."""
    return Pipeline(small_config, quiet=True, stage_logger=InMemoryStageLogger())


def test_single_generator(z3: Presentation) -> None:
    """Test that reductions target one non-neutral letter."""
    assert single_generator(z3, ("a",)) == "a"
    with pytest.raises(BadParametersError, match="single non-neutral"):
        single_generator(z3, ("a", "a"))
    with pytest.raises(BadParametersError, match="single non-neutral"):
        single_generator(z3, ("e",))


def test_admissible_relations(z3: Presentation) -> None:
    """Test that a and e are never merged."""
    relations = list(admissible_relations(z3, "a"))

    assert len(relations) == 3
    for classes in relations:
        assert not any("a" in block and "e" in block for block in classes)


def test_quotient_presentation(z3: Presentation) -> None:
    """Test merging a with a' and refusing an inverse-breaking relation."""
    merged = quotient_presentation(z3, [["e"], ["a", "a'"]])

    assert merged is not None
    assert merged.ids == ("e", "a")
    assert merged.inverse_of["a"] == "a"
    assert is_symmetric_triangular(merged).passed
    assert quotient_presentation(z3, [["a'", "e"], ["a"]]) is None


class TestAlmostMultilinear:
    """Tests for the almost-multilinear reduction."""

    def test_quotients_of_cyclic_group(
        self, pipeline: Pipeline, z3: Presentation
    ) -> None:
        """Test the quotient census of Z/3 with target a."""
        record = pipeline.reduce_almost_multilinear(z3, ("a",))

        assert record.admissible_relations == 3
        built = [q for q in record.quotients if q.presentation is not None]
        assert len(built) == 2
        assert record.verdict == CANDIDATES
        assert record.passed
        assert record.family
        assert verify_record(record).passed

    def test_requires_triangular(
        self, pipeline: Pipeline, cyclic3: Presentation
    ) -> None:
        """Test that raw presentations are refused."""
        with pytest.raises(NotSymmetricTriangularError):
            pipeline.reduce_almost_multilinear(cyclic3, ("a",))

    def test_equivalence_budget(self, z3: Presentation) -> None:
        """Test that the relation census stops at the budget."""
        config = Config.model_validate({"pipeline": {"equivalence_budget": 1}})
        pipeline = Pipeline(config, quiet=True)

        record = pipeline.reduce_almost_multilinear(z3, ("a",))

        assert record.admissible_relations == 1
        assert record.truncated

    def test_stage_log(self, pipeline: Pipeline, z3: Presentation) -> None:
        """Test that the quotient stage is logged."""
        pipeline.reduce_almost_multilinear(z3, ("a",))

        logger = pipeline.stage_logger
        assert isinstance(logger, InMemoryStageLogger)
        assert logger.stages() == ["quotients"]

    @pytest.mark.slow
    def test_sofic_audit(self, free_z: Presentation) -> None:
        """Test that shift images of Z pass their 18/n budget."""
        config = Config.model_validate({"pipeline": {"sofic_degrees": [8]}})
        pipeline = Pipeline(config, quiet=True)

        record = pipeline.reduce_almost_multilinear(
            free_z, ("a",), sofic_letter="a"
        )

        (audit,) = record.sofic
        assert audit.n == 8
        assert audit.hypothesis_epsilon == Fraction(36, 8)
        assert audit.passed
        assert audit.witness_passed
        assert verify_record(record).passed


class TestEntropic:
    """Tests for the entropic reduction."""

    @pytest.mark.slow
    def test_trivial_target_is_unknown(self, pipeline: Pipeline) -> None:
        """Test that a = 1 leaves the verdict unknown at the bound."""
        p = parse_presentation("gens: a; rels: a")

        record = pipeline.reduce_entropic(p, ("a",))

        assert record.verdict == UNKNOWN
        assert record.certificate is None
        assert not record.passed
        assert "no quotient" in record.notes[0]
        assert record.family
        generators = record.artifacts["augmented"]["generators"]
        assert all(m.ground_size == 3 + 3 * generators for m in record.family)
        logger = pipeline.stage_logger
        assert isinstance(logger, InMemoryStageLogger)
        assert logger.stages()[-1] == "search"
        assert verify_record(record).passed

    @pytest.mark.slow
    @pytest.mark.integration
    def test_cyclic_group_is_certified(self, pipeline: Pipeline) -> None:
        """Test a full certificate for the generator of Z/3."""
        p = parse_presentation("gens: a; rels: a a a")

        record = pipeline.reduce_entropic(p, ("a",))

        assert record.verdict == FOUND
        assert record.homomorphism is not None
        assert record.certificate is not None
        assert record.certificate.passed, record.certificate.summary
        assert record.certificate.caveats
        assert not record.certificate.family_member
        assert "not a member" in record.certificate.caveats[0]
        assert record.artifacts["slice"]
        report = verify_record(record)
        assert report.passed, report.to_text()

    @pytest.mark.slow
    def test_save_and_load(self, pipeline: Pipeline, tmp_path: Path) -> None:
        """Test that a saved record loads back unchanged."""
        record = pipeline.reduce_entropic(
            parse_presentation("gens: a; rels: a"), ("a",)
        )

        path = pipeline.save_record(record, tmp_path)

        assert path == tmp_path / "record.json"
        assert "Verdict: unknown at bound" in (tmp_path / "summary.txt").read_text()
        assert load_record(path) == record


def test_certificate_scope() -> None:
    """Test that a slice is used only when the augmented geometry is too large."""
    trivial = normalize_symmetric_triangular(Presentation.build([], []))
    aug = augment(scramble(trivial), "e")
    whole = 3 + 3 * len(aug.result.ids)

    piece, member = certificate_scope(aug, 16)
    assert not member
    assert set(piece.ids) < set(aug.result.ids)

    piece, member = certificate_scope(aug, whole)
    assert member
    assert piece == aug.result


class TestCertifyExact:
    """Tests for exact certificates of a fixed image assignment."""

    def test_order_three_scalar(self, z3: Presentation) -> None:
        """Test that a cube root of unity certifies Z/3 with nothing added."""
        rho = complete_images(z3, scalar_images({"a": 2}, 7))

        certified, added, report = certify_exact(z3, rho, 16)

        assert report.passed, report.to_text()
        assert added == []
        assert certified.relators == z3.relators

    def test_wrong_order_scalar(self, z3: Presentation) -> None:
        """Test that a scalar of order 6 breaks the relator a a a."""
        rho = complete_images(z3, scalar_images({"a": 3}, 7))

        _, _, report = certify_exact(z3, rho, 16)

        assert not report.passed


def test_record_json_round_trip(
    pipeline: Pipeline, z3: Presentation, tmp_path: Path
) -> None:
    """Test the almost-multilinear record through save_record and load_record."""
    record = pipeline.reduce_almost_multilinear(z3, ("a",))

    path = pipeline.save_record(record, tmp_path / "run")

    data = json.loads(path.read_text())
    assert data["kind"] == "almost-multilinear"
    again = load_record(path)
    assert again == record
    assert PipelineRecord.from_json_dict(record.to_json_dict()) == record


def test_tampered_record_fails(pipeline: Pipeline, z3: Presentation) -> None:
    """Test that verify_record notices an edited quotient."""
    record = pipeline.reduce_almost_multilinear(z3, ("a",))
    data = record.to_json_dict()
    member = next(
        q
        for q in data["quotients"]
        if q["presentation"] is not None and len(q["classes"]) == 3
    )
    member["classes"] = [["a", "a'"], ["e"]]

    report = verify_record(PipelineRecord.from_json_dict(data))

    assert not report.passed


def test_stage_logger_protocol(
    small_config: Config, z3: Presentation, mocker: MockerFixture
) -> None:
    """Test that any StageLogger receives the stage outcomes."""
    logger = mocker.Mock(spec=StageLogger)
    pipeline = Pipeline(small_config, quiet=True, stage_logger=logger)

    pipeline.reduce_almost_multilinear(z3, ("a",))

    logger.log_stage.assert_called_once()
    stage, status, _, metadata = logger.log_stage.call_args.args
    assert (stage, status) == ("quotients", "ok")
    assert metadata == {"truncated": False}
