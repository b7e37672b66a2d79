"""Random generic elements standing in for transcendental extensions."""

from math import gcd, lcm

import numpy as np
from sympy import isprime, primefactors

from dowling_reps.core.errors import BadParametersError, BudgetExceededError
from dowling_reps.linalg.matrix import Matrix, dtype_for, rank


class ResampleBudgetExceededError(BudgetExceededError):
    """Raised when no invertible sample is found within the budget."""


class GenericSampler:
    """Seeded source of uniform residues mod p."""

    def __init__(self, p: int, seed: int = 0) -> None:
        """Initialize with a field characteristic and seed."""
        self.p = p
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def residue(self, *, nonzero: bool = False) -> int:
        """One uniform residue, optionally from GF(p)^*."""
        low = 1 if nonzero else 0
        return int(self._rng.integers(low, self.p))

    def entries(self, rows: int, cols: int) -> np.ndarray:
        """rows×cols uniform residues in the storage dtype for p."""
        sample = self._rng.integers(0, self.p, size=(rows, cols))
        if dtype_for(self.p) is object:
            return sample.astype(object)
        return sample

    def matrix(self, rows: int, cols: int) -> Matrix:
        """Uniform rows×cols matrix."""
        return Matrix(self.entries(rows, cols), self.p)

    def invertible(self, n: int, resample_budget: int = 64) -> Matrix:
        """Uniform matrix conditioned on invertibility."""
        for _ in range(resample_budget):
            candidate = self.matrix(n, n)
            if rank(candidate) == n:
                return candidate
        msg = (
            f"No invertible {n}x{n} sample over GF({self.p}) within "
            f"{resample_budget} draws"
        )
        raise ResampleBudgetExceededError(msg)


def generic_matrix(n: int, p: int, seed: int, resample_budget: int = 64) -> Matrix:
    """Seeded uniformly random invertible n×n matrix over GF(p)."""
    return GenericSampler(p, seed).invertible(n, resample_budget)


def primitive_root_of_unity(k: int, p: int) -> int:
    """Smallest residue of exact multiplicative order k in GF(p)."""
    if k <= 0 or (p - 1) % k:
        msg = f"No primitive {k}-th root of unity mod {p}: {k} does not divide {p - 1}"
        raise BadParametersError(msg)
    if k == 1:
        return 1
    factors = primefactors(k)
    for h in range(2, p):
        zeta = pow(h, (p - 1) // k, p)
        if all(pow(zeta, k // q, p) != 1 for q in factors):
            return min(pow(zeta, j, p) for j in range(1, k) if gcd(j, k) == 1)
    msg = f"No primitive {k}-th root of unity mod {p}"
    raise BadParametersError(msg)


def prime_for_roots(orders: list[int], bound: int, minimum: int = 1) -> int:
    """Largest prime p ≤ bound with p > minimum holding every k-th root of unity.

    Conflicting orders are reconciled through their lcm, which must divide p − 1.
    """
    if not orders or any(k <= 0 for k in orders):
        msg = f"Root orders must be positive: {orders}"
        raise BadParametersError(msg)
    step = lcm(*orders)
    p = 1 + step * ((bound - 1) // step)
    while p > minimum and p >= 2:  # noqa: PLR2004
        if isprime(p):
            return p
        p -= step
    msg = f"No prime in ({minimum}, {bound}] is 1 mod {step}"
    raise BadParametersError(msg)
