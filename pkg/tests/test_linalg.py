"""Tests for prime-field linear algebra."""

from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dowling_reps.core.errors import BadParametersError, RankDeficientError
from dowling_reps.linalg.approximate import (
    approximate_left_inverse,
    has_approximate_inverse,
    repair_rows,
)
from dowling_reps.linalg.generic import (
    GenericSampler,
    generic_matrix,
    prime_for_roots,
    primitive_root_of_unity,
)
from dowling_reps.linalg.matrix import (
    Matrix,
    block_diagonal,
    determinant_rank,
    dtype_for,
    hstack,
    inverse,
    is_invertible,
    project_onto_rows,
    rank,
    rank_distance,
    vstack,
)

PRIMES = [2, 3, 7, 2**61 - 1]


def square_matrices(p: int, n: int) -> st.SearchStrategy[Matrix]:
    """Random n×n matrices over GF(p)."""
    return st.lists(
        st.integers(min_value=0, max_value=p - 1), min_size=n * n, max_size=n * n
    ).map(lambda flat: Matrix(np.array(flat, dtype=object).reshape(n, n), p))


class TestMatrix:
    """Tests for the Matrix type."""

    def test_entries_are_reduced(self) -> None:
        """Test that construction reduces entries mod p."""
        m = Matrix.from_rows([[8, -1], [14, 3]], 7)

        assert m.tolist() == [[1, 6], [0, 3]]

    def test_dtype_policy(self) -> None:
        """Test the storage dtype per field size."""
        assert dtype_for(2) == np.dtype(np.uint8)
        assert dtype_for(7) == np.dtype(np.int64)
        assert dtype_for(2**61 - 1) is object

    def test_large_prime_product_is_exact(self) -> None:
        """Test that products over a 61-bit prime do not overflow."""
        p = 2**61 - 1
        rows = [[p - 1, p - 2], [3, p - 1]]
        a = Matrix.from_rows(rows, p)

        expected = [
            [sum(rows[i][k] * rows[k][j] for k in range(2)) % p for j in range(2)]
            for i in range(2)
        ]
        assert (a @ a).tolist() == expected

    def test_gf2_arithmetic(self) -> None:
        """Test that addition over GF(2) is XOR."""
        a = Matrix.from_rows([[1, 0], [1, 1]], 2)

        assert (a + a).is_zero()
        assert (a @ a).tolist() == [[1, 0], [0, 1]]

    def test_field_mismatch(self) -> None:
        """Test that matrices over different fields do not mix."""
        with pytest.raises(ValueError, match="Field mismatch"):
            Matrix.identity(2, 3) + Matrix.identity(2, 5)

    def test_shape_mismatch(self) -> None:
        """Test that incompatible products are rejected."""
        with pytest.raises(ValueError, match="Cannot multiply"):
            Matrix.zeros(2, 3, 5) @ Matrix.zeros(2, 3, 5)

    def test_power(self) -> None:
        """Test integer powers, including negative ones."""
        a = Matrix.from_rows([[1, 1], [0, 1]], 5)

        assert a.power(5).is_identity()
        assert (a.power(-1) @ a).is_identity()
        assert a.power(0).is_identity()

    def test_dict_round_trip(self) -> None:
        """Test JSON form of a matrix."""
        a = Matrix.from_rows([[1, 2, 3], [4, 5, 6]], 11)

        assert Matrix.from_dict(a.to_dict()) == a

    def test_dict_with_wrong_entry_count(self) -> None:
        """Test that a malformed matrix dict is rejected."""
        data = Matrix.identity(2, 3).to_dict()
        data["rows"] = 3

        with pytest.raises(ValueError, match="entries for shape"):
            Matrix.from_dict(data)


class TestRank:
    """Tests for rank and inversion."""

    def test_rank_examples(self) -> None:
        """Test rank of small matrices."""
        assert rank(Matrix.identity(3, 7)) == 3
        assert rank(Matrix.zeros(3, 4, 7)) == 0
        assert rank(Matrix.from_rows([[1, 2], [2, 4]], 7)) == 1
        assert rank(Matrix.from_rows([[1, 1], [1, 1]], 2)) == 1
        # singular over GF(3) only
        assert rank(Matrix.from_rows([[1, 1], [1, 4]], 3)) == 1
        assert rank(Matrix.from_rows([[1, 1], [1, 4]], 7)) == 2

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_rank_matches_determinant_rank(self, p: int) -> None:
        """Test Gaussian elimination against the largest nonzero minor."""
        for flat in product(range(p), repeat=4):
            m = Matrix(np.array(flat).reshape(2, 2), p)
            assert rank(m) == determinant_rank(m)

    @settings(max_examples=30, deadline=None)
    @given(square_matrices(7, 3))
    def test_rank_matches_determinant_rank_3x3(self, m: Matrix) -> None:
        """Test the two rank definitions agree on 3×3 matrices."""
        assert rank(m) == determinant_rank(m)

    @pytest.mark.parametrize("p", PRIMES)
    def test_inverse(self, p: int) -> None:
        """Test that inverse really inverts."""
        a = Matrix.from_rows([[2, 1, 0], [0, 1, 1], [1, 0, 1]], p)
        if not is_invertible(a):
            pytest.skip("singular over this field")

        assert (inverse(a) @ a).is_identity()
        assert (a @ inverse(a)).is_identity()

    def test_singular_inverse_raises(self) -> None:
        """Test that a singular matrix raises RankDeficientError."""
        with pytest.raises(RankDeficientError, match="singular"):
            inverse(Matrix.from_rows([[1, 2], [2, 4]], 7))

    def test_non_square_inverse_raises(self) -> None:
        """Test that only square matrices are invertible."""
        with pytest.raises(ValueError, match="square"):
            inverse(Matrix.zeros(2, 3, 7))


class TestBlocks:
    """Tests for stacking and projection."""

    def test_stacks(self) -> None:
        """Test vertical and horizontal stacking shapes."""
        a = Matrix.identity(2, 5)
        b = Matrix.from_rows([[1, 2]], 5)

        assert vstack([a, b], 5, 2).shape == (3, 2)
        assert hstack([a, a], 5, 2).shape == (2, 4)
        assert vstack([], 5, 2).shape == (0, 2)

    def test_block_diagonal(self) -> None:
        """Test that block_diagonal places blocks on the diagonal."""
        d = block_diagonal([Matrix.scalar(2, 1, 5), Matrix.identity(2, 5)], 5)

        assert d.tolist() == [[2, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_projection_residual_rank(self) -> None:
        """Test that the residual has the least achievable rank."""
        p = 7
        basis = Matrix.from_rows([[1, 0, 0], [0, 1, 0]], p)
        target = Matrix.from_rows([[3, 4, 0], [1, 1, 5]], p)

        coeffs, residual = project_onto_rows(basis, target)

        assert coeffs @ basis + residual == target
        assert rank(residual) == rank(vstack([basis, target], p, 3)) - rank(basis)
        assert rank(residual) == 1

    def test_projection_on_empty_basis(self) -> None:
        """Test that an empty basis leaves the target as residual."""
        target = Matrix.identity(2, 3)

        coeffs, residual = project_onto_rows(Matrix.zeros(0, 2, 3), target)

        assert coeffs.shape == (2, 0)
        assert residual == target


class TestRankMetric:
    """Tests for the normalized rank distance."""

    def test_distance_value(self) -> None:
        """Test a distance of one changed row out of four."""
        a = Matrix.identity(4, 5)
        b = Matrix.identity(4, 5)
        b.entries[0, 0] = 3

        distance = rank_distance(a, b)

        assert distance.value == Fraction(1, 4)
        assert str(distance) == "1/4"

    def test_empty_distance(self) -> None:
        """Test that empty matrices are at distance zero."""
        empty = Matrix.zeros(0, 0, 3)

        assert rank_distance(empty, empty).value == 0

    def test_shape_mismatch(self) -> None:
        """Test that matrices of different shape have no distance."""
        with pytest.raises(ValueError, match="Shape mismatch"):
            rank_distance(Matrix.identity(2, 3), Matrix.identity(3, 3))

    @settings(max_examples=40, deadline=None)
    @given(square_matrices(3, 3), square_matrices(3, 3), square_matrices(3, 3))
    def test_metric_axioms(self, a: Matrix, b: Matrix, c: Matrix) -> None:
        """Test symmetry, identity and the triangle inequality."""
        d_ab = rank_distance(a, b).value
        assert d_ab == rank_distance(b, a).value
        assert (d_ab == 0) == (a == b)
        assert rank_distance(a, c).value <= d_ab + rank_distance(b, c).value

    @settings(max_examples=40, deadline=None)
    @given(square_matrices(3, 3), square_matrices(3, 3), square_matrices(3, 3))
    def test_invariance(self, a: Matrix, b: Matrix, c: Matrix) -> None:
        """Test that multiplying both sides never increases the distance."""
        before = rank_distance(a, b).value

        assert rank_distance(c @ a, c @ b).value <= before
        assert rank_distance(a @ c, b @ c).value <= before


class TestApproximateInverse:
    """Tests for approximate left inverses."""

    def test_repair_rows_of_singular_matrix(self) -> None:
        """Test that repair replaces exactly the dependent rows."""
        a = Matrix.from_rows([[1, 1], [1, 1]], 2)

        repaired, replaced = repair_rows(a)

        assert replaced == [1]
        assert is_invertible(repaired)

    def test_invertible_input_is_untouched(self) -> None:
        """Test that an invertible matrix gets its true inverse."""
        a = Matrix.from_rows([[2, 1], [1, 1]], 5)

        d, defect = approximate_left_inverse(a)

        assert defect == 0
        assert d == inverse(a)

    @pytest.mark.parametrize("c", [1, 2])
    def test_defect_bound_over_gf2(self, c: int) -> None:
        """Test rk(I − d·a) ≤ c − rk(a) over every matrix in M_c(GF(2))."""
        for flat in product(range(2), repeat=c * c):
            a = Matrix(np.array(flat).reshape(c, c), 2)
            d, defect = approximate_left_inverse(a)
            assert is_invertible(d)
            assert defect <= c - rank(a)
            assert has_approximate_inverse(a, Fraction(c - rank(a), c))

    def test_zero_matrix_needs_full_defect(self) -> None:
        """Test that the zero matrix has no better approximate inverse."""
        zero = Matrix.zeros(2, 2, 2)

        assert not has_approximate_inverse(zero, Fraction(1, 2))
        assert has_approximate_inverse(zero, Fraction(1))


class TestGeneric:
    """Tests for random generic matrices and roots of unity."""

    def test_generic_matrix_is_invertible_and_seeded(self) -> None:
        """Test that the same seed gives the same invertible matrix."""
        a = generic_matrix(4, 101, seed=3)

        assert is_invertible(a)
        assert a == generic_matrix(4, 101, seed=3)

    def test_sampler_nonzero_residues(self) -> None:
        """Test that nonzero sampling never returns zero."""
        sampler = GenericSampler(3, seed=1)

        assert all(sampler.residue(nonzero=True) != 0 for _ in range(50))

    def test_sampler_large_prime_matrix(self) -> None:
        """Test that samples over a 61-bit prime stay exact."""
        m = GenericSampler(2**61 - 1, seed=0).matrix(2, 2)

        assert m.shape == (2, 2)
        assert all(0 <= x < 2**61 - 1 for row in m.tolist() for x in row)

    def test_primitive_roots(self) -> None:
        """Test primitive roots of unity."""
        assert primitive_root_of_unity(3, 7) == 2
        assert primitive_root_of_unity(1, 7) == 1
        assert primitive_root_of_unity(2, 5) == 4

    def test_missing_root(self) -> None:
        """Test that k must divide p − 1."""
        with pytest.raises(BadParametersError, match="does not divide"):
            primitive_root_of_unity(4, 7)

    def test_prime_for_roots(self) -> None:
        """Test that conflicting orders are reconciled by their lcm."""
        assert prime_for_roots([2, 3], 100) == 97
        assert prime_for_roots([4], 20) == 17
        with pytest.raises(BadParametersError, match="1 mod 3"):
            prime_for_roots([3], 7, minimum=7)
