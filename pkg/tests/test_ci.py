"""Tests for CI statements, the matroid compiler and the realizer search."""

import pytest

from dowling_reps.ci.compiler import (
    check_ci,
    ci_gap,
    cii_family,
    compile_matroid_to_ci,
    is_nontrivial,
    violated_statements,
)
from dowling_reps.ci.search import candidate_supports, cir_search
from dowling_reps.ci.statements import (
    CIInstance,
    CIStatement,
    CISyntaxError,
    all_statements,
    format_statements,
    parse_statements,
)
from dowling_reps.core.errors import BadParametersError
from dowling_reps.entropy.distribution import (
    JointDistribution,
    canonical_linear_distribution,
    family_distribution,
    independent_bits,
)
from dowling_reps.entropy.probability import check_probability_space_rep
from dowling_reps.linalg.matrix import Matrix
from dowling_reps.matroids.gdg import build_gdg
from dowling_reps.matroids.matroid import Matroid, UniformMatroid
from dowling_reps.presentations.model import Presentation
from dowling_reps.reps.families import family_from_matrices

GROUND = ("1", "2", "3")


def realizes(m: Matroid, d: JointDistribution) -> bool:
    """Whether d is a nontrivial realizer of C_M."""
    return is_nontrivial(d) and not violated_statements(d, compile_matroid_to_ci(m))


def vector_distribution(
    q: int, vectors: dict[str, tuple[int, int]]
) -> JointDistribution:
    """X_e = <v_e, ω> for ω uniform on GF(q)^2."""
    return family_distribution(
        family_from_matrices(
            q, {e: Matrix.from_rows([list(v)], q) for e, v in vectors.items()}
        )
    )


def corruptions(d: JointDistribution) -> list[JointDistribution]:
    """Independent bits, a copied variable and one doubled atom."""
    first, *_, last = d.ground
    doubled = {
        outcome: weight * (2 if k == 0 else 1)
        for k, (outcome, weight) in enumerate(d.atoms)
    }
    return [
        independent_bits(d.ground),
        d.replace_variables({last: first}),
        JointDistribution.from_weights(d.ground, doubled, d.alphabets),
    ]


class TestStatements:
    """Tests for parsing and formatting CI statements."""

    def test_parse(self) -> None:
        """Test comments, blank lines and empty parts."""
        text = "# pairwise\n1 | 2 |\n\n1,2 | 3 | 1  # overlap is fine\n"

        statements = parse_statements(text)

        assert statements == [
            CIStatement.of(["1"], ["2"]),
            CIStatement.of(["1", "2"], ["3"], ["1"]),
        ]

    def test_parse_error_has_line_number(self) -> None:
        """Test that a two-part line is rejected with its number."""
        with pytest.raises(CISyntaxError, match="Line 2: Expected 'A | B | C'"):
            parse_statements("1 | 2 |\n1 | 2\n")

    def test_format_round_trip(self) -> None:
        """Test that formatted statements parse back to the same set."""
        statements = [CIStatement.of(["2"], ["1"], ["3"]), CIStatement.of(["1"], ["2"])]

        text = format_statements(statements)

        assert text.splitlines()[0] == "1 | 2 | "
        assert set(parse_statements(text)) == set(statements)

    def test_all_statements(self) -> None:
        """Test that every triple of subsets is enumerated."""
        assert len(list(all_statements(["x", "y"]))) == 64

    def test_instance_validation(self) -> None:
        """Test that instances only mention ground ids."""
        with pytest.raises(ValueError, match="outside the ground set"):
            CIInstance(
                ground=("1",), antecedents=frozenset({CIStatement.of(["1"], ["2"])})
            )

    def test_instance_json(self) -> None:
        """Test the instance JSON form."""
        instance = CIInstance(
            ground=GROUND,
            antecedents=frozenset({CIStatement.of(["1"], ["2"])}),
            consequent=CIStatement.of(["1"], ["2"], ["3"]),
        )

        assert CIInstance.from_json_dict(instance.to_json_dict()) == instance


class TestSemantics:
    """Tests for CI statements on distributions."""

    def test_parity_statements(self, parity: JointDistribution) -> None:
        """Test pairwise independence and conditional dependence of parity."""
        pairwise = CIStatement.of(["1"], ["2"])
        conditional = CIStatement.of(["1"], ["2"], ["3"])

        assert check_ci(parity, pairwise)
        assert not check_ci(parity, conditional)
        assert ci_gap(parity, pairwise).contains(0)
        assert not ci_gap(parity, conditional).contains(0)

    def test_functional_dependence(self, parity: JointDistribution) -> None:
        """Test that (i ⊥ i | C) means X_i is determined by X_C."""
        assert check_ci(parity, CIStatement.of(["3"], ["3"], ["1", "2"]))
        assert not check_ci(parity, CIStatement.of(["3"], ["3"], ["1"]))

    def test_nontrivial(self, parity: JointDistribution) -> None:
        """Test that a constant family is trivial."""
        constant = JointDistribution.from_weights(GROUND, {(0, 0, 0): 1})

        assert is_nontrivial(parity)
        assert not is_nontrivial(constant)


class TestCompiler:
    """Tests for compiling matroids to CI statements."""

    def test_uniform_matroid(self, u23: UniformMatroid) -> None:
        """Test the twelve statements of U_{2,3}."""
        statements = compile_matroid_to_ci(u23)

        assert len(statements) == 12
        assert CIStatement.of(["1"], ["2"]) in statements
        assert CIStatement.of(["3"], ["3"], ["1", "2"]) in statements

    def test_realizers_are_representations(
        self, u23: UniformMatroid, parity: JointDistribution
    ) -> None:
        """Test that parity realizes C_M and free bits miss the circuit part."""
        statements = compile_matroid_to_ci(u23)

        assert violated_statements(parity, statements) == []
        violated = violated_statements(independent_bits(GROUND), statements)
        assert len(violated) == 3
        assert all(st.a == st.b for st in violated)

    def test_needs_connected_matroid(self) -> None:
        """Test that a free matroid is refused."""
        with pytest.raises(BadParametersError, match="connected matroid"):
            compile_matroid_to_ci(UniformMatroid(2, ["x", "y"]))

    def test_cii_family(self, u23: UniformMatroid) -> None:
        """Test one instance per statement outside C_M."""
        statements = compile_matroid_to_ci(u23)

        family = cii_family(statements, u23.ground)

        assert len(family) == 8**3 - 12
        assert all(instance.consequent not in statements for instance in family)


class TestRealizerEquivalence:
    """Tests that realizing C_M matches the probability-space audit."""

    def assert_equivalent(
        self, m: Matroid, positives: list[JointDistribution]
    ) -> None:
        """Every positive realizes C_M and passes, every corruption does neither."""
        for d in positives:
            assert realizes(m, d)
            assert check_probability_space_rep(m, d).passed
            for bad in corruptions(d):
                assert not realizes(m, bad)
                assert not check_probability_space_rep(m, bad).passed

    def test_uniform_rank_two_on_three(
        self, u23: UniformMatroid, parity: JointDistribution
    ) -> None:
        """Test U_{2,3} over GF(2), GF(3) and GF(5)."""
        positives = [
            parity,
            vector_distribution(3, {"1": (1, 0), "2": (0, 1), "3": (1, 2)}),
            vector_distribution(5, {"1": (1, 0), "2": (0, 1), "3": (1, 1)}),
        ]

        self.assert_equivalent(u23, positives)

    def test_uniform_rank_two_on_four(self) -> None:
        """Test U_{2,4} over GF(3), GF(5) and GF(7)."""
        m = UniformMatroid(2, ["1", "2", "3", "4"])
        line = {"1": (1, 0), "2": (0, 1), "3": (1, 1), "4": (1, 2)}
        positives = [vector_distribution(q, line) for q in (3, 5, 7)]

        self.assert_equivalent(m, positives)

    def test_trivial_group_geometry(self, trivial: Presentation) -> None:
        """Test the geometry of the trivial group over GF(2), GF(3) and GF(5)."""
        positives = [
            canonical_linear_distribution(trivial, {"e": 1}, q) for q in (2, 3, 5)
        ]

        self.assert_equivalent(build_gdg(trivial), positives)

    @pytest.mark.slow
    def test_involution_geometry(self, z2: Presentation) -> None:
        """Test the geometry of Z/2 with ρ(a) = −1 over GF(3), GF(5) and GF(7)."""
        positives = [
            canonical_linear_distribution(z2, {"a": q - 1}, q) for q in (3, 5, 7)
        ]

        self.assert_equivalent(build_gdg(z2), positives)


class TestSearch:
    """Tests for the bounded realizer search."""

    def test_candidate_supports(self) -> None:
        """Test that every support contains the zero cell."""
        supports = list(candidate_supports(2, 2, 2))

        assert len(supports) == 3
        assert all(s[0] == (0, 0) for s in supports)

    def test_finds_parity(
        self, u23: UniformMatroid, parity: JointDistribution
    ) -> None:
        """Test that the first realizer of C_{U_{2,3}} is the XOR support."""
        found = cir_search(compile_matroid_to_ci(u23), u23.ground, 2, 4)

        assert found == parity

    def test_bounds_too_small(self, u23: UniformMatroid) -> None:
        """Test that the search needs room for a nontrivial support."""
        assert cir_search(compile_matroid_to_ci(u23), u23.ground, 2, 3) is None
        assert cir_search([], u23.ground, 1, 4) is None

    def test_unknown_variable(self) -> None:
        """Test that statements must live on the ground set."""
        with pytest.raises(BadParametersError, match="outside the ground set"):
            cir_search([CIStatement.of(["x"], ["y"])], GROUND, 2, 2)
