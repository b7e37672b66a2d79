"""Tests for the command-line interface."""

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from dowling_reps.cli import EXIT_ERROR, EXIT_FAIL, app
from dowling_reps.entropy.distribution import JointDistribution, independent_bits

runner = CliRunner()

U23_TABLE = [0, 1, 1, 2, 1, 2, 2, 2]


@pytest.fixture
def z3_file(tmp_path: Path) -> Path:
    """⟨a | a a a⟩ as a presentation text file."""
    path = tmp_path / "z3.txt"
    path.write_text("gens: a\nrels:\na a a\n", encoding="utf-8")
    return path


@pytest.fixture
def u23_file(tmp_path: Path) -> Path:
    """U_{2,3} as a rank-table JSON."""
    path = tmp_path / "u23.json"
    path.write_text(
        json.dumps({"ground": ["1", "2", "3"], "rank_table": U23_TABLE}),
        encoding="utf-8",
    )
    return path


def write_distribution(path: Path, d: JointDistribution) -> Path:
    """Write a distribution JSON and return its path."""
    path.write_text(json.dumps(d.to_json_dict()), encoding="utf-8")
    return path


class TestPresentationCommands:
    """Tests for normalize, gdg and wp-search."""

    def test_normalize_text(self, z3_file: Path, tmp_path: Path) -> None:
        """Test that normalize prints a parseable presentation."""
        out = tmp_path / "z3_norm.txt"

        result = runner.invoke(app, ["-q", "normalize", str(z3_file), "-o", str(out)])

        assert result.exit_code == 0, result.output
        assert result.stdout.startswith("gens: a")
        assert out.read_text(encoding="utf-8") == result.stdout.rstrip("\n") + "\n"

    def test_normalize_json(self, z3_file: Path) -> None:
        """Test machine-readable output."""
        result = runner.invoke(
            app, ["--format", "json", "-q", "normalize", str(z3_file)]
        )

        assert result.exit_code == 0, result.output
        data = json.loads(result.stdout)
        assert len(data["relators"]) == 9

    def test_gdg_passes_axioms(self, z3_file: Path, tmp_path: Path) -> None:
        """Test that the geometry of Z/3 is a matroid."""
        out = tmp_path / "gdg.json"

        result = runner.invoke(app, ["-q", "gdg", str(z3_file), "-o", str(out)])

        assert result.exit_code == 0, result.output
        assert "PASS" in result.stdout
        assert len(json.loads(out.read_text(encoding="utf-8"))["ground"]) == 12

    def test_wp_search(self, z3_file: Path) -> None:
        """Test that a witness is printed in one-line notation."""
        result = runner.invoke(app, ["-q", "wp-search", str(z3_file), "-w", "a"])

        assert result.exit_code == 0, result.output
        assert "a -> " in result.stdout

    def test_wp_search_without_witness(self, tmp_path: Path) -> None:
        """Test exit code 1 when the word is trivial."""
        path = tmp_path / "trivial.txt"
        path.write_text("gens: a\nrels:\na\n", encoding="utf-8")

        result = runner.invoke(app, ["-q", "wp-search", str(path), "-w", "a"])

        assert result.exit_code == EXIT_FAIL
        assert "no witness" in result.stdout

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that unreadable input exits with code 2."""
        result = runner.invoke(app, ["-q", "normalize", str(tmp_path / "nope.txt")])

        assert result.exit_code == EXIT_ERROR
        assert "error:" in result.output

    @pytest.mark.parametrize("command", ["normalize", "gdg"])
    def test_unwritable_output(
        self, command: str, z3_file: Path, tmp_path: Path
    ) -> None:
        """Test that an output path under a regular file exits with code 2."""
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        out = blocker / "out.json"

        result = runner.invoke(app, ["-q", command, str(z3_file), "-o", str(out)])

        assert result.exit_code == EXIT_ERROR
        assert "error:" in result.output


class TestRepresentationCommands:
    """Tests for build-rep and check-rep."""

    def test_build_and_check(self, z3_file: Path, tmp_path: Path) -> None:
        """Test an exact representation of the geometry of Z/3."""
        fam = tmp_path / "fam.json"

        built = runner.invoke(
            app,
            ["-q", "build-rep", str(z3_file), "--scalar", "a=2", "--prime", "7"]
            + ["-o", str(fam)],
        )
        checked = runner.invoke(app, ["-q", "check-rep", str(z3_file), str(fam)])

        assert built.exit_code == 0, built.output
        assert "12 maps" in built.stdout
        assert checked.exit_code == 0, checked.output
        assert checked.stdout.startswith("PASS")

    def test_wrong_images_fail_the_check(self, z3_file: Path, tmp_path: Path) -> None:
        """Test exit code 1 for a family that is not a representation."""
        fam = tmp_path / "fam.json"
        runner.invoke(
            app,
            ["-q", "build-rep", str(z3_file), "--scalar", "a=3", "--prime", "7"]
            + ["-o", str(fam)],
        )

        result = runner.invoke(app, ["-q", "check-rep", str(z3_file), str(fam)])

        assert result.exit_code == EXIT_FAIL
        assert result.stdout.startswith("FAIL")

    def test_hypotheses_refuse_wrong_images(self, z3_file: Path) -> None:
        """Test that --epsilon turns a failed hypothesis into exit code 2."""
        result = runner.invoke(
            app,
            ["-q", "build-rep", str(z3_file), "--scalar", "a=3", "--prime", "7"]
            + ["--epsilon", "1/2"],
        )

        assert result.exit_code == EXIT_ERROR
        assert "Hypothesis" in result.output

    def test_images_are_required(self, z3_file: Path) -> None:
        """Test that build-rep needs some images."""
        result = runner.invoke(app, ["-q", "build-rep", str(z3_file)])

        assert result.exit_code == EXIT_ERROR
        assert "--images" in result.output

    def test_images_file(self, z3_file: Path, tmp_path: Path) -> None:
        """Test scalar images given as JSON."""
        images = tmp_path / "images.json"
        images.write_text(json.dumps({"prime": 7, "scalars": {"a": 2}}))

        result = runner.invoke(
            app, ["-q", "build-rep", str(z3_file), "--images", str(images)]
        )

        assert result.exit_code == 0, result.output


class TestEntropyCommands:
    """Tests for entropy-check."""

    def test_parity_for_u23(
        self, u23_file: Path, parity: JointDistribution, tmp_path: Path
    ) -> None:
        """Test the full audit of parity against U_{2,3}."""
        dist = write_distribution(tmp_path / "parity.json", parity)

        result = runner.invoke(
            app,
            ["-q", "entropy-check", str(u23_file), "--distribution", str(dist)]
            + ["--uniformity"],
        )

        assert result.exit_code == 0, result.output
        assert "λ = " in result.stdout

    def test_free_bits_fail(self, u23_file: Path, tmp_path: Path) -> None:
        """Test exit code 1 for a distribution that is not a representation."""
        dist = write_distribution(
            tmp_path / "bits.json", independent_bits(["1", "2", "3"])
        )

        result = runner.invoke(
            app, ["-q", "entropy-check", str(u23_file), "--distribution", str(dist)]
        )

        assert result.exit_code == EXIT_FAIL

    def test_canonical_distribution(self, z3_file: Path) -> None:
        """Test the linear distribution of the geometry of Z/3."""
        result = runner.invoke(
            app,
            ["-q", "entropy-check", str(z3_file), "--scalar", "a=2", "--prime", "7"],
        )

        assert result.exit_code == 0, result.output

    def test_needs_a_distribution(self, u23_file: Path) -> None:
        """Test that a plain matroid needs --distribution."""
        result = runner.invoke(app, ["-q", "entropy-check", str(u23_file)])

        assert result.exit_code == EXIT_ERROR


class TestCICommands:
    """Tests for ci-compile and ci-search."""

    def test_compile(self, u23_file: Path, tmp_path: Path) -> None:
        """Test the twelve statements of U_{2,3}."""
        out = tmp_path / "u23.ci"

        result = runner.invoke(app, ["-q", "ci-compile", str(u23_file), "-o", str(out)])

        assert result.exit_code == 0, result.output
        assert len(result.stdout.strip().splitlines()) == 12
        assert len(out.read_text(encoding="utf-8").splitlines()) == 12

    def test_search(self, u23_file: Path, tmp_path: Path) -> None:
        """Test that the compiled statements are realized by parity."""
        statements = tmp_path / "u23.ci"
        runner.invoke(app, ["-q", "ci-compile", str(u23_file), "-o", str(statements)])

        found = runner.invoke(
            app, ["-q", "ci-search", str(statements), "--ground", "1,2,3"]
        )
        missing = runner.invoke(
            app,
            ["-q", "ci-search", str(statements), "--ground", "1,2,3", "--support", "3"],
        )

        assert found.exit_code == 0, found.output
        assert "[0, 1, 1] p=1/4" in found.stdout
        assert missing.exit_code == EXIT_FAIL

    def test_syntax_error(self, tmp_path: Path) -> None:
        """Test that a malformed statement file exits with code 2."""
        statements = tmp_path / "bad.ci"
        statements.write_text("1 | 2\n", encoding="utf-8")

        result = runner.invoke(
            app, ["-q", "ci-search", str(statements), "--ground", "1,2"]
        )

        assert result.exit_code == EXIT_ERROR
        assert "Line 1" in result.output


class TestPipelineCommands:
    """Tests for reduce-almost and verify."""

    def test_reduce_and_verify(self, z3_file: Path, tmp_path: Path) -> None:
        """Test a quotient run, its stage files and re-verification."""
        run = tmp_path / "run"

        reduced = runner.invoke(
            app, ["-q", "reduce-almost", str(z3_file), "-w", "a", "-o", str(run)]
        )
        verified = runner.invoke(app, ["-q", "verify", str(run / "record.json")])

        assert reduced.exit_code == 0, reduced.output
        assert "candidates emitted" in reduced.stdout
        assert (run / "summary.txt").exists()
        assert (run / "stages" / "01_quotients" / "summary.txt").exists()
        assert verified.exit_code == 0, verified.output

    def test_seed_option(self, z3_file: Path, tmp_path: Path) -> None:
        """Test that shared options come before the subcommand."""
        result = runner.invoke(
            app,
            ["--seed", "3", "--format", "json", "-q", "reduce-almost", str(z3_file)]
            + ["-w", "a", "-o", str(tmp_path / "run")],
        )

        assert result.exit_code == 0, result.output
        assert json.loads(result.stdout)["verdict"] == "candidates emitted"
