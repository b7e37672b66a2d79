"""Diagonal block normal form of derangement permutation matrices."""

from pydantic import BaseModel, ConfigDict

from dowling_reps.core.errors import BadParametersError
from dowling_reps.groups.permutations import Permutation
from dowling_reps.linalg.generic import prime_for_roots, primitive_root_of_unity
from dowling_reps.linalg.matrix import Matrix, block_diagonal, inverse


class CycleBlock(BaseModel):
    """One cycle of length k and the k-th root of unity for its block."""

    model_config = ConfigDict(frozen=True)

    length: int
    root: int


class BlockForm:
    """C with C·M_σ·C⁻¹ = diag(ω⁰, …, ω^{k−1}) per cycle."""

    def __init__(
        self, conjugator: Matrix, blocks: list[CycleBlock], diagonal: Matrix
    ) -> None:
        """Hold the conjugator, block data and the diagonal target."""
        self.conjugator = conjugator
        self.blocks = blocks
        self.diagonal = diagonal


def derangement_block_form(sigma: Permutation, p: int) -> BlockForm:
    """Conjugate M_σ to a diagonal matrix of roots of unity over GF(p).

    Each cycle (c_0 … c_{k−1}) contributes eigenvectors
    v_j = Σ_m ω^{−jm} e_{c_m} with eigenvalue ω^j; these are the columns
    of C⁻¹.
    """
    if not sigma.is_derangement():
        msg = f"Permutation has a fixed point: {sigma.fixed_points()[0]}"
        raise ValueError(msg)
    n = sigma.degree
    if p <= n:
        msg = f"Characteristic {p} must exceed the degree {n}"
        raise BadParametersError(msg)

    blocks: list[CycleBlock] = []
    diagonals: list[Matrix] = []
    cinv = Matrix.zeros(n, n, p)
    column = 0
    for cycle in sigma.cycles():
        k = len(cycle)
        omega = primitive_root_of_unity(k, p)
        omega_inv = pow(omega, -1, p)
        blocks.append(CycleBlock(length=k, root=omega))
        diag = Matrix.zeros(k, k, p)
        for j in range(k):
            diag.entries[j, j] = pow(omega, j, p)
            for m, point in enumerate(cycle):
                cinv.entries[point, column + j] = pow(omega_inv, j * m, p)
        diagonals.append(diag)
        column += k

    conjugator = inverse(cinv)
    diagonal = block_diagonal(diagonals, p)
    if conjugator @ sigma.to_matrix(p) @ cinv != diagonal:
        msg = "Conjugation identity failed"
        raise ArithmeticError(msg)
    return BlockForm(conjugator, blocks, diagonal)


def block_form_prime(sigmas: list[Permutation], bound: int) -> int:
    """Largest prime ≤ bound over which every σ has a block form."""
    if not sigmas:
        msg = "Need at least one permutation"
        raise BadParametersError(msg)
    orders = sorted({len(c) for sigma in sigmas for c in sigma.cycles()})
    degree = max(sigma.degree for sigma in sigmas)
    return prime_for_roots(orders, bound, minimum=degree)
