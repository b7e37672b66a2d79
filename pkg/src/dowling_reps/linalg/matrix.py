"""Dense matrices over prime fields with exact Gaussian elimination."""

from collections.abc import Iterable, Sequence
from fractions import Fraction
from itertools import combinations
from typing import Any, Self

import numpy as np
from pydantic import BaseModel, ConfigDict

from dowling_reps.core.errors import RankDeficientError

# Below this bound products of two residues fit in int64 with room for
# accumulating MATMUL_CHUNK terms before reduction.
INT64_PRIME_BOUND = 2**26
MATMUL_CHUNK = 2048

type IntArray = np.ndarray[Any, Any]


def dtype_for(p: int) -> type | np.dtype[Any]:
    """Storage dtype for residues mod p."""
    if p == 2:  # noqa: PLR2004
        return np.dtype(np.uint8)
    if p < INT64_PRIME_BOUND:
        return np.dtype(np.int64)
    return object


def as_residues(values: Any, p: int) -> IntArray:
    """Convert nested integers to a reduced array of the dtype for p."""
    dtype = dtype_for(p)
    if np.size(values) == 0:
        return np.zeros(np.shape(values), dtype=dtype)
    if dtype is object:
        arr = np.array(values, dtype=object)
        if arr.size:
            arr = np.vectorize(lambda x: int(x) % p, otypes=[object])(arr)
        return arr
    arr = np.asarray(values)
    if arr.dtype == object:
        arr = np.vectorize(lambda x: int(x) % p, otypes=[np.int64])(arr)
    return (arr.astype(np.int64) % p).astype(dtype)


class Matrix:
    """A rows×cols matrix over GF(p), entries kept reduced."""

    __slots__ = ("entries", "p")

    def __init__(self, entries: Any, p: int, *, reduced: bool = False) -> None:
        """Wrap an array of residues.

        Args:
            entries: 2-d array-like of integers
            p: Field characteristic
            reduced: Skip reduction when the caller already holds residues

        """
        self.p = p
        arr = entries if reduced else as_residues(entries, p)
        if arr.ndim != 2:  # noqa: PLR2004
            msg = f"Matrix entries must be 2-dimensional, got shape {arr.shape}"
            raise ValueError(msg)
        self.entries: IntArray = arr

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> Self:
        """Zero matrix."""
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> Self:
        """Identity matrix I_n."""
        return cls(np.eye(n, dtype=np.int64), p)

    @classmethod
    def scalar(cls, value: int, n: int, p: int) -> Self:
        """value·I_n."""
        out = cls.zeros(n, n, p)
        for i in range(n):
            out.entries[i, i] = value % p
        return out

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int, cols: int = 0) -> Self:
        """Build from row lists; cols is needed only for zero-row matrices."""
        if not rows:
            return cls.zeros(0, cols, p)
        values = [[int(x) for x in row] for row in rows]
        return cls(np.array(values, dtype=object), p)

    @property
    def rows(self) -> int:
        """Number of rows."""
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        """Number of columns."""
        return int(self.entries.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols)."""
        return (self.rows, self.cols)

    def _check_field(self, other: "Matrix") -> None:
        if other.p != self.p:
            msg = f"Field mismatch: GF({self.p}) vs GF({other.p})"
            raise ValueError(msg)

    def _check_shape(self, other: "Matrix") -> None:
        self._check_field(other)
        if other.shape != self.shape:
            msg = f"Shape mismatch: {self.shape} vs {other.shape}"
            raise ValueError(msg)

    def __add__(self, other: "Matrix") -> "Matrix":
        """Entrywise sum."""
        self._check_shape(other)
        if self.p == 2:  # noqa: PLR2004
            return Matrix(self.entries ^ other.entries, 2, reduced=True)
        return Matrix((self.entries + other.entries) % self.p, self.p, reduced=True)

    def __sub__(self, other: "Matrix") -> "Matrix":
        """Entrywise difference."""
        self._check_shape(other)
        if self.p == 2:  # noqa: PLR2004
            return Matrix(self.entries ^ other.entries, 2, reduced=True)
        return Matrix((self.entries - other.entries) % self.p, self.p, reduced=True)

    def __neg__(self) -> "Matrix":
        """Additive inverse."""
        if self.p == 2:  # noqa: PLR2004
            return self.copy()
        return Matrix((-self.entries) % self.p, self.p, reduced=True)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        """Matrix product reduced mod p."""
        self._check_field(other)
        if self.cols != other.rows:
            msg = f"Cannot multiply {self.shape} by {other.shape}"
            raise ValueError(msg)
        product = _matmul(self.entries, other.entries, self.p)
        return Matrix(product, self.p, reduced=True)

    def scale(self, k: int) -> "Matrix":
        """Multiply every entry by k."""
        k %= self.p
        if dtype_for(self.p) is object:
            return Matrix(self.entries * k % self.p, self.p, reduced=True)
        wide = self.entries.astype(np.int64)
        return Matrix((wide * k) % self.p, self.p)

    def __eq__(self, other: object) -> bool:
        """Exact equality of field, shape and entries."""
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.p == other.p
            and self.shape == other.shape
            and bool(np.array_equal(self.entries, other.entries))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        """Compact representation."""
        return f"Matrix(GF({self.p}), {self.rows}x{self.cols})"

    def copy(self) -> "Matrix":
        """Independent copy."""
        return Matrix(self.entries.copy(), self.p, reduced=True)

    def transpose(self) -> "Matrix":
        """Transpose."""
        return Matrix(self.entries.T.copy(), self.p, reduced=True)

    def is_zero(self) -> bool:
        """True iff every entry vanishes."""
        return not bool(np.any(self.entries != 0))

    def is_identity(self) -> bool:
        """True iff square and equal to I."""
        return self.rows == self.cols and self == Matrix.identity(self.rows, self.p)

    def row_block(self, start: int, stop: int) -> "Matrix":
        """Rows start..stop-1."""
        return Matrix(self.entries[start:stop].copy(), self.p, reduced=True)

    def col_block(self, start: int, stop: int) -> "Matrix":
        """Columns start..stop-1."""
        return Matrix(self.entries[:, start:stop].copy(), self.p, reduced=True)

    def tolist(self) -> list[list[int]]:
        """Row-major nested lists of Python ints."""
        return [[int(x) for x in row] for row in self.entries]

    def rank(self) -> int:
        """Row rank over GF(p)."""
        return rank(self)

    def inverse(self) -> "Matrix":
        """Inverse of a square invertible matrix."""
        return inverse(self)

    def power(self, k: int) -> "Matrix":
        """Integer power; negative exponents invert first."""
        if self.rows != self.cols:
            msg = f"Only square matrices have powers, got {self.shape}"
            raise ValueError(msg)
        base = self.inverse() if k < 0 else self
        result = Matrix.identity(self.rows, self.p)
        for bit in bin(abs(k))[2:]:
            result @= result
            if bit == "1":
                result @= base
        return result

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form."""
        return {
            "p": self.p,
            "rows": self.rows,
            "cols": self.cols,
            "entries": [int(x) for x in self.entries.reshape(-1)],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Matrix":
        """Inverse of to_dict."""
        rows, cols, p = int(data["rows"]), int(data["cols"]), int(data["p"])
        entries = list(data["entries"])
        if len(entries) != rows * cols:
            msg = f"Matrix JSON has {len(entries)} entries for shape {rows}x{cols}"
            raise ValueError(msg)
        if rows * cols == 0:
            return cls.zeros(rows, cols, p)
        arr = np.array(entries, dtype=object).reshape(rows, cols)
        return cls(arr, p)


def _matmul(a: IntArray, b: IntArray, p: int) -> IntArray:
    if dtype_for(p) is object:
        if a.shape[1] == 0:
            return np.zeros((a.shape[0], b.shape[1]), dtype=object)
        return np.dot(a, b) % p
    a64 = a.astype(np.int64)
    b64 = b.astype(np.int64)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for start in range(0, a.shape[1], MATMUL_CHUNK):
        stop = start + MATMUL_CHUNK
        out = (out + a64[:, start:stop] @ b64[start:stop]) % p
    return out.astype(dtype_for(p))


def row_reduce(entries: IntArray, p: int) -> tuple[IntArray, list[int]]:
    """Reduced row echelon form over GF(p) and its pivot columns."""
    a = entries.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nonzero = np.nonzero(a[r:, c])[0]
        if nonzero.size == 0:
            continue
        k = r + int(nonzero[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        if p == 2:  # noqa: PLR2004
            column = a[:, c].copy()
            column[r] = 0
            hits = np.nonzero(column)[0]
            if hits.size:
                a[hits] ^= a[r]
        else:
            inv = pow(int(a[r, c]), -1, p)
            a[r] = (a[r] * inv) % p
            column = a[:, c].copy()
            column[r] = 0
            hits = np.nonzero(column)[0]
            if hits.size:
                a[hits] = (a[hits] - np.outer(column[hits], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Matrix) -> int:
    """Row rank over GF(p) by exact elimination."""
    if m.rows == 0 or m.cols == 0:
        return 0
    _, pivots = row_reduce(m.entries, m.p)
    return len(pivots)


def determinant_rank(m: Matrix) -> int:
    """Rank as the size of the largest nonvanishing minor, for small matrices.

    An elimination-free routine kept as an independent oracle for rank.
    """
    p = m.p
    values = m.tolist()
    for size in range(min(m.rows, m.cols), 0, -1):
        for rows in combinations(range(m.rows), size):
            for cols in combinations(range(m.cols), size):
                minor = [[values[i][j] for j in cols] for i in rows]
                if _det_mod(minor, p) != 0:
                    return size
    return 0


def _det_mod(minor: list[list[int]], p: int) -> int:
    """Laplace expansion along the first row."""
    n = len(minor)
    if n == 1:
        return minor[0][0] % p
    total = 0
    for j, value in enumerate(minor[0]):
        if value % p == 0:
            continue
        sub = [row[:j] + row[j + 1 :] for row in minor[1:]]
        sign = -1 if j % 2 else 1
        total += sign * value * _det_mod(sub, p)
    return total % p


def inverse(m: Matrix) -> Matrix:
    """Inverse of a square matrix; raises for singular input."""
    if m.rows != m.cols:
        msg = f"Only square matrices are invertible, got {m.shape}"
        raise ValueError(msg)
    n = m.rows
    ident = Matrix.identity(n, m.p).entries
    reduced, pivots = row_reduce(np.hstack([m.entries, ident]), m.p)
    if pivots[:n] != list(range(n)):
        msg = f"Matrix is singular over GF({m.p}) (rank {rank(m)} < {n})"
        raise RankDeficientError(msg)
    return Matrix(reduced[:, n:].copy(), m.p, reduced=True)


def is_invertible(m: Matrix) -> bool:
    """Square and of full rank."""
    return m.rows == m.cols and rank(m) == m.rows


def vstack(blocks: Iterable[Matrix], p: int, cols: int) -> Matrix:
    """Vertical concatenation; an empty iterable gives a 0×cols matrix."""
    parts = [b.entries for b in blocks]
    if not parts:
        return Matrix.zeros(0, cols, p)
    return Matrix(np.vstack(parts), p, reduced=True)


def hstack(blocks: Iterable[Matrix], p: int, rows: int) -> Matrix:
    """Horizontal concatenation; an empty iterable gives a rows×0 matrix."""
    parts = [b.entries for b in blocks]
    if not parts:
        return Matrix.zeros(rows, 0, p)
    return Matrix(np.hstack(parts), p, reduced=True)


def block_diagonal(blocks: Sequence[Matrix], p: int) -> Matrix:
    """Block-diagonal matrix with the given square blocks."""
    n = sum(b.rows for b in blocks)
    out = Matrix.zeros(n, n, p)
    offset = 0
    for block in blocks:
        size = block.rows
        out.entries[offset : offset + size, offset : offset + size] = block.entries
        offset += size
    return out


def project_onto_rows(basis: Matrix, target: Matrix) -> tuple[Matrix, Matrix]:
    """Best row-space approximation of target by rows of basis.

    Returns (S, residual) with target = S·basis + residual, where residual
    is target reduced modulo the row space of basis. rk(residual) equals
    rk([basis; target]) − rk(basis), the least rank any S achieves.
    """
    p = basis.p
    k = basis.rows
    if k == 0:
        return Matrix.zeros(target.rows, 0, p), target.copy()
    ident = Matrix.identity(k, p).entries
    reduced, pivots = row_reduce(np.hstack([basis.entries, ident]), p)
    pivots = [c for c in pivots if c < basis.cols]
    r = len(pivots)
    echelon = Matrix(reduced[:r, : basis.cols].copy(), p, reduced=True)
    transform = Matrix(reduced[:r, basis.cols :].copy(), p, reduced=True)
    coeffs = Matrix(target.entries[:, pivots].copy(), p, reduced=True)
    if r == 0:
        return Matrix.zeros(target.rows, k, p), target.copy()
    residual = target - coeffs @ echelon
    return coeffs @ transform, residual


class RankMetricValue(BaseModel):
    """Normalized rank distance rk(A−B)/n held as an exact fraction."""

    model_config = ConfigDict(frozen=True)

    numerator: int
    denominator: int

    @property
    def value(self) -> Fraction:
        """The distance as a Fraction; 0 for empty matrices."""
        if self.denominator == 0:
            return Fraction(0)
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        """numerator/denominator."""
        return f"{self.numerator}/{self.denominator}"


def rank_distance(a: Matrix, b: Matrix) -> RankMetricValue:
    """d_rk(A, B) = rk(A − B)/rows."""
    if a.shape != b.shape:
        msg = f"Shape mismatch: {a.shape} vs {b.shape}"
        raise ValueError(msg)
    return RankMetricValue(numerator=rank(a - b), denominator=a.rows)
