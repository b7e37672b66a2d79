"""Tests for linear map families, the geometry builder, groupoids and genericity."""

from fractions import Fraction

import pytest

from dowling_reps.core.errors import BadParametersError
from dowling_reps.groups.permutations import Permutation
from dowling_reps.groups.quotients import FiniteHomomorphism
from dowling_reps.linalg.matrix import Matrix, rank
from dowling_reps.matroids.gdg import build_gdg
from dowling_reps.matroids.matroid import UniformMatroid
from dowling_reps.presentations.abelian import AbelianVector, MuImage
from dowling_reps.presentations.audit import FlaggedTriple
from dowling_reps.presentations.model import Presentation
from dowling_reps.reps.builder import (
    build_gdg_representation,
    check_builder_hypotheses,
    complete_images,
    hypothesis_epsilon,
    scalar_images,
    shift_images,
    word_image,
)
from dowling_reps.reps.duality import (
    SubspaceArrangement,
    arrangement_to_family,
    family_to_arrangement,
)
from dowling_reps.reps.families import (
    GroundMismatchError,
    LinearMapFamily,
    UnknownElementError,
    check_independence,
    check_representation,
    family_from_matrices,
    find_determination_map,
    rank_profile,
    restrict_family,
    stack,
)
from dowling_reps.reps.genericity import (
    GenericExtension,
    Verdict,
    certify_flagged_triples,
    check_generic_invertibility,
)
from dowling_reps.reps.groupoid import (
    DowlingGroupoid,
    audit_relation_distances,
    groupoid_normalize,
    groupoid_rep_from_family,
    groupoid_rep_from_group_rep,
    relation_distance_budgets,
)

GENERIC_PRIME = 1_000_003


@pytest.fixture
def u23_family() -> LinearMapFamily:
    """U_{2,3} over GF(3) as three lines in the plane."""
    return family_from_matrices(
        3,
        {
            "1": Matrix.from_rows([[1, 0]], 3),
            "2": Matrix.from_rows([[0, 1]], 3),
            "3": Matrix.from_rows([[1, 1]], 3),
        },
    )


@pytest.fixture
def z3_family(z3: Presentation) -> LinearMapFamily:
    """The Dowling geometry of Z/3 over GF(7) with ρ(a) = 2."""
    return build_gdg_representation(z3, scalar_images({"a": 2}, 7))


class TestFamilies:
    """Tests for LinearMapFamily and representation checks."""

    def test_shapes_are_validated(self) -> None:
        """Test that every map must be c×dim_v."""
        with pytest.raises(ValueError, match="expected 1x2"):
            LinearMapFamily(
                p=3,
                c=1,
                dim_v=2,
                maps={"x": Matrix.from_rows([[1, 0, 0]], 3)},
            )

    def test_maps_must_be_surjective(self) -> None:
        """Test that a zero map is rejected."""
        with pytest.raises(ValueError, match="not surjective"):
            family_from_matrices(3, {"x": Matrix.zeros(1, 2, 3)})

    def test_stack_and_profile(self, u23_family: LinearMapFamily) -> None:
        """Test stacked ranks on subsets."""
        assert stack(u23_family, ["1", "3"]).shape == (2, 2)
        assert rank_profile(u23_family, [["1"], ["1", "2"], ["1", "2", "3"]]) == [
            1,
            2,
            2,
        ]
        with pytest.raises(UnknownElementError):
            stack(u23_family, ["4"])

    def test_independence_and_determination(
        self, u23_family: LinearMapFamily
    ) -> None:
        """Test the two local conditions at ε = 0."""
        assert check_independence(u23_family, ["1", "2"], Fraction(0)).passed
        result = check_independence(u23_family, ["1", "2", "3"], Fraction(0))
        assert not result.passed
        assert result.deficit == 1

        found = find_determination_map(u23_family, ["1", "2"], "3", Fraction(0))
        assert found.defect == 0
        assert found.matrix is not None
        assert found.matrix @ stack(u23_family, ["1", "2"]) == u23_family.maps["3"]

    def test_determination_with_repeated_rows(self) -> None:
        """Test that a repeated source row is dropped and the defect is least."""
        fam = family_from_matrices(
            3,
            {
                "1": Matrix.from_rows([[1, 0, 0, 0], [0, 1, 0, 0]], 3),
                "2": Matrix.from_rows([[1, 0, 0, 0], [0, 0, 1, 0]], 3),
                "3": Matrix.from_rows([[1, 1, 1, 0], [0, 0, 0, 1]], 3),
            },
        )
        basis = stack(fam, ["1", "2"])

        found = find_determination_map(fam, ["1", "2"], "3", Fraction(1, 2))

        assert found.defect == 1
        assert found.matrix is not None
        assert not found.matrix.entries[:, 2].any()
        assert rank(fam.maps["3"] - found.matrix @ basis) == 1
        strict = find_determination_map(fam, ["1", "2"], "3", Fraction(0))
        assert strict.matrix is None
        assert strict.defect == 1

    def test_exact_representation(
        self, u23: UniformMatroid, u23_family: LinearMapFamily
    ) -> None:
        """Test that three distinct lines represent U_{2,3}."""
        report = check_representation(u23, u23_family, Fraction(0))

        assert report.passed
        assert report.worst_normalized == 0
        assert report.summary().startswith("PASS")

    def test_parallel_elements_fail(self, u23: UniformMatroid) -> None:
        """Test that a repeated line breaks the rank profile."""
        fam = family_from_matrices(
            3,
            {
                "1": Matrix.from_rows([[1, 0]], 3),
                "2": Matrix.from_rows([[0, 1]], 3),
                "3": Matrix.from_rows([[2, 0]], 3),
            },
        )

        report = check_representation(u23, fam, Fraction(0))

        assert not report.passed
        assert report.profile_mismatch is not None

    def test_ground_mismatch(
        self, u23: UniformMatroid, u23_family: LinearMapFamily
    ) -> None:
        """Test that the family domain must equal the ground set."""
        with pytest.raises(GroundMismatchError):
            check_representation(
                u23, restrict_family(u23_family, ["1", "2"]), Fraction(0)
            )

    def test_json_form(self, u23_family: LinearMapFamily) -> None:
        """Test that the JSON form keeps every map."""
        again = LinearMapFamily.from_json_dict(u23_family.to_json_dict())

        assert again.maps["3"] == u23_family.maps["3"]
        assert (again.c, again.dim_v) == (1, 2)


class TestBuilder:
    """Tests for representations built from images of S."""

    def test_complete_images(self, z3: Presentation) -> None:
        """Test that e and missing inverses are filled in."""
        rho = complete_images(z3, scalar_images({"a": 2}, 7))

        assert rho["e"] == Matrix.identity(1, 7)
        assert rho["a'"] == Matrix.scalar(4, 1, 7)
        assert word_image(rho, ("a", "a", "a"), 1, 7).is_identity()

    def test_missing_image(self, z3: Presentation) -> None:
        """Test that every generator needs an image."""
        with pytest.raises(BadParametersError):
            complete_images(z3, {})

    def test_cyclic_group_representation(
        self, z3: Presentation, z3_family: LinearMapFamily
    ) -> None:
        """Test that Z/3 ⊂ GF(7)* represents its Dowling geometry exactly."""
        report = check_representation(build_gdg(z3), z3_family, Fraction(0))

        assert len(z3_family.maps) == 12
        assert z3_family.dim_v == 3
        assert report.passed

    def test_wrong_group_element_fails(self, z3: Presentation) -> None:
        """Test that ρ(a) = 3 of order six breaks a³ = 1."""
        fam = build_gdg_representation(z3, scalar_images({"a": 3}, 7))

        report = check_representation(build_gdg(z3), fam, Fraction(0))

        assert not report.passed

    def test_hypotheses_hold_for_faithful_images(self, z3: Presentation) -> None:
        """Test the builder hypotheses for an exact representation."""
        rho = scalar_images({"a": 2}, 7)

        assert check_builder_hypotheses(z3, rho, Fraction(1, 2)).passed
        assert hypothesis_epsilon(z3, rho) == 0

    def test_hypotheses_fail_for_wrong_images(self, z3: Presentation) -> None:
        """Test that a broken relator is refused before building."""
        rho = scalar_images({"a": 3}, 7)

        report = check_builder_hypotheses(z3, rho, Fraction(1, 2))

        finding = report.finding("(c) relator triples")
        assert finding is not None
        assert not finding.passed
        with pytest.raises(BadParametersError, match="Hypothesis"):
            build_gdg_representation(z3, rho, Fraction(1, 2))

    def test_non_invertible_image(self, z3: Presentation) -> None:
        """Test that images must be invertible."""
        zero = Matrix.zeros(1, 1, 7)
        with pytest.raises(BadParametersError, match="invertible"):
            build_gdg_representation(z3, {"a": zero, "a'": zero})

    @pytest.mark.parametrize("n", [8, 16])
    def test_shift_hypothesis_epsilon(self, free_z: Presentation, n: int) -> None:
        """Test that shifts of GF(2)^n need ε = 36/n."""
        assert hypothesis_epsilon(free_z, shift_images(n)) == Fraction(36, n)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [8, 16])
    def test_shift_representation_decays(
        self, free_z: Presentation, n: int
    ) -> None:
        """Test that the cyclic-shift almost-representation of Z improves with n."""
        fam = build_gdg_representation(free_z, shift_images(n), Fraction(36, n))
        geometry = build_gdg(free_z)

        report = check_representation(geometry, fam, Fraction(18, n))

        assert report.passed
        assert report.worst_normalized <= Fraction(3, n)
        assert not check_representation(geometry, fam, Fraction(0)).passed


class TestDuality:
    """Tests for subspace arrangements."""

    def test_round_trip_preserves_ranks(self, z3_family: LinearMapFamily) -> None:
        """Test that dim Σ W_e equals rk(T_S)."""
        arrangement = family_to_arrangement(z3_family)
        subsets = [["b1", "b2"], ["b1", "b2", "a_1"], ["e_1", "e_2", "e_3"]]

        for s in subsets:
            assert arrangement.sum_dimension(s) == rank(stack(z3_family, s))

        again = arrangement_to_family(arrangement)
        assert again.c == z3_family.c

    def test_dependent_basis_rejected(self) -> None:
        """Test that basis rows must be independent."""
        with pytest.raises(ValueError, match="dependent"):
            SubspaceArrangement(
                p=3, dim_v=2, subspaces={"x": Matrix.from_rows([[1, 1], [2, 2]], 3)}
            )

    def test_mixed_dimensions_rejected(self) -> None:
        """Test that a family needs equal subspace dimensions."""
        arrangement = SubspaceArrangement(
            p=3,
            dim_v=2,
            subspaces={"x": Matrix.identity(2, 3), "y": Matrix.from_rows([[1, 0]], 3)},
        )

        with pytest.raises(ValueError, match="one dimension"):
            arrangement_to_family(arrangement)


class TestGroupoid:
    """Tests for Dowling groupoid representations."""

    def test_groupoid_shape(self, z3: Presentation) -> None:
        """Test the arrow and relation counts."""
        groupoid = DowlingGroupoid(z3)

        assert len(groupoid.arrows) == 18
        assert len(groupoid.inverse_relations) == 18
        assert len(groupoid.triangle_relations) == 3 * len(z3.relators)

    def test_from_group_rep(self, z3: Presentation) -> None:
        """Test that a group representation gives an exact groupoid one."""
        rep = groupoid_rep_from_group_rep(z3, scalar_images({"a": 2}, 7))

        assert audit_relation_distances(rep, Fraction(0)).passed
        _, rho, report = groupoid_normalize(rep)
        assert report.passed
        assert rho["a"] == Matrix.scalar(2, 1, 7)

    def test_from_family(self, z3: Presentation, z3_family: LinearMapFamily) -> None:
        """Test that the builder's family gives back ρ."""
        rep = groupoid_rep_from_family(z3, z3_family)

        _, rho, report = groupoid_normalize(rep)

        assert report.passed, report.to_text()
        assert rho["a"] == Matrix.scalar(2, 1, 7)
        assert rho["a'"] == Matrix.scalar(4, 1, 7)

    def test_broken_triangles(self, z3: Presentation) -> None:
        """Test that a wrong group image breaks the triangle relations."""
        rep = groupoid_rep_from_group_rep(z3, scalar_images({"a": 3}, 7))

        report = audit_relation_distances(rep, Fraction(0))

        inverse = report.finding("inverse relations")
        triangle = report.finding("triangle relations")
        assert inverse is not None
        assert inverse.passed
        assert triangle is not None
        assert not triangle.passed

    def test_budgets(self) -> None:
        """Test the relation distance budgets."""
        assert relation_distance_budgets(4) == (Fraction(1, 24), Fraction(1, 4))


class TestGenericity:
    """Tests for randomized genericity checks."""

    def test_free_word_and_inverse_cancel(self) -> None:
        """Test that f f' is the identity on every trial."""
        result = check_generic_invertibility(("f", "f'"), {}, 3, GENERIC_PRIME, 3)

        assert result.verdict is Verdict.ZERO
        assert result.passed

    def test_generic_letter_is_invertible(self) -> None:
        """Test that a generic matrix minus I is invertible."""
        result = check_generic_invertibility(("f",), {}, 3, GENERIC_PRIME, 3, seed=5)

        assert result.verdict is Verdict.INVERTIBLE
        assert "randomized" in result.label()

    def test_derangement_alone_is_singular(self) -> None:
        """Test that a permutation matrix minus I always has a kernel."""
        images = {"g": Permutation.shift(3, 1)}

        result = check_generic_invertibility(("g",), images, 2, GENERIC_PRIME, 3)

        assert result.verdict is Verdict.MIXED
        assert result.ranks == (2, 2)
        assert not result.passed

    def test_mixed_word_is_invertible(self) -> None:
        """Test that a generic letter times a derangement is generic."""
        images = {"g": Permutation.shift(3, 1)}

        result = check_generic_invertibility(("f", "g"), images, 3, GENERIC_PRIME, 3)

        assert result.verdict is Verdict.INVERTIBLE

    def test_fixed_points_rejected(self) -> None:
        """Test that group images must be identity or derangements."""
        images = {"g": Permutation.from_cycles(3, [[0, 1]])}

        with pytest.raises(BadParametersError, match="derangement"):
            check_generic_invertibility(("g",), images, 1, GENERIC_PRIME, 3)

    def test_extension_caches_samples(self) -> None:
        """Test that one extension is one point: repeated letters agree."""
        ext = GenericExtension({}, GENERIC_PRIME, 2, seed=1)

        assert ext.letter("f") == ext.letter("f")
        assert (ext.letter("f") @ ext.letter("f'")).is_identity()
        assert ext.scalar("b") == ext.scalar("b")

    def test_extension_applies_scalars(self) -> None:
        """Test λ^vector scaling of a μ-image."""
        ext = GenericExtension({}, GENERIC_PRIME, 2, seed=1)
        lam = ext.scalar("b")

        image = ext.image(MuImage(word=(), vector=AbelianVector.of(z_coords={"b": 2})))

        assert image == Matrix.scalar(lam * lam, 2, GENERIC_PRIME)

    def test_extension_degree_mismatch(self) -> None:
        """Test that group images must have degree n."""
        with pytest.raises(BadParametersError, match="degrees"):
            GenericExtension({"g": Permutation.shift(2, 1)}, GENERIC_PRIME, 3)

    def test_certify_flagged_triples(self) -> None:
        """Test the report over a small set of flagged triples."""
        h = FiniteHomomorphism(
            target_degree=3,
            images={"e": Permutation.identity(3), "g": Permutation.shift(3, 1)},
        )
        flagged = [
            FlaggedTriple(letters=("p", "q", "r"), mu_word=("f", "g")),
            FlaggedTriple(letters=("p", "q", "s"), mu_word=("f", "f'")),
        ]

        report = certify_flagged_triples(flagged, h, GENERIC_PRIME, 3)

        assert report.passed
        finding = report.finding("generic invertibility")
        assert finding is not None
        assert "1 zero" in finding.detail
