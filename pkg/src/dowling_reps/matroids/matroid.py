"""Matroids given by a rank oracle, with exhaustive scans over bitmask tables."""

from abc import ABC, abstractmethod
from collections import defaultdict
from collections.abc import Callable, Collection, Iterable, Sequence
from itertools import combinations
from typing import Any, NamedTuple, override

import networkx as nx
import numpy as np

from dowling_reps.core.audit import AuditReport
from dowling_reps.core.errors import BudgetExceededError

DEFAULT_SCAN_BOUND = 16
WITNESS_LIMIT = 5

type Mask = int


class ScanBoundExceededError(BudgetExceededError):
    """The ground set is too large for an exhaustive subset scan."""


class MalformedGeometryError(ValueError):
    """Two lines of a rank-3 geometry share two or more points."""


def popcounts(masks: np.ndarray, width: int) -> np.ndarray:
    """Number of set bits of each mask below 2**width."""
    counts = np.zeros(masks.shape, dtype=np.int64)
    for bit in range(width):
        counts += (masks >> bit) & 1
    return counts


class Matroid(ABC):
    """Ground set plus rank oracle; derived structure comes from the rank table."""

    def __init__(self, ground: Sequence[str]) -> None:
        """Fix the ground set order."""
        if len(set(ground)) != len(ground):
            msg = "Ground set has repeated elements"
            raise ValueError(msg)
        self.ground: tuple[str, ...] = tuple(ground)
        self.position = {x: i for i, x in enumerate(self.ground)}

    @abstractmethod
    def rank_of_mask(self, mask: Mask) -> int:
        """Rank of the subset encoded by a bitmask over ground positions."""

    def __len__(self) -> int:
        """Size of the ground set."""
        return len(self.ground)

    def mask(self, subset: Iterable[str]) -> Mask:
        """Bitmask of a subset of the ground set."""
        out = 0
        for x in subset:
            if x not in self.position:
                msg = f"Unknown ground element {x!r}"
                raise KeyError(msg)
            out |= 1 << self.position[x]
        return out

    def subset(self, mask: Mask) -> frozenset[str]:
        """Subset encoded by a bitmask."""
        return frozenset(x for i, x in enumerate(self.ground) if mask >> i & 1)

    def ordered(self, mask: Mask) -> list[str]:
        """Members of a mask in ground-set order."""
        return [x for i, x in enumerate(self.ground) if mask >> i & 1]

    def rank(self, subset: Iterable[str]) -> int:
        """r(A)."""
        return self.rank_of_mask(self.mask(subset))

    @property
    def full_rank(self) -> int:
        """r(E)."""
        return self.rank_of_mask((1 << len(self.ground)) - 1)

    def is_independent(self, subset: Iterable[str]) -> bool:
        """r(A) = |A|."""
        members = set(subset)
        return self.rank(members) == len(members)

    def require_scannable(self, scan_bound: int = DEFAULT_SCAN_BOUND) -> None:
        """Raise if 2**|E| subsets exceed the scan bound."""
        if len(self.ground) > scan_bound:
            msg = (
                f"Ground set of size {len(self.ground)} exceeds the scan bound "
                f"{scan_bound}"
            )
            raise ScanBoundExceededError(msg)

    def rank_table(self, scan_bound: int = DEFAULT_SCAN_BOUND) -> np.ndarray:
        """r over all 2**|E| masks."""
        self.require_scannable(scan_bound)
        return self._table()

    def _table(self) -> np.ndarray:
        size = 1 << len(self.ground)
        return np.fromiter(
            (self.rank_of_mask(m) for m in range(size)), dtype=np.int64, count=size
        )

    def to_json_dict(self) -> dict[str, Any]:
        """Ground list and full rank table."""
        return {"ground": list(self.ground), "rank_table": self._table().tolist()}


class TableMatroid(Matroid):
    """Rank given extensionally, one value per bitmask."""

    def __init__(self, ground: Sequence[str], table: Sequence[int]) -> None:
        """Store a table of length 2**|ground|."""
        super().__init__(ground)
        if len(table) != 1 << len(self.ground):
            msg = f"Rank table has {len(table)} entries for {len(self.ground)} elements"
            raise ValueError(msg)
        self.table = np.asarray(table, dtype=np.int64)

    @classmethod
    def from_function(
        cls, ground: Sequence[str], fn: Callable[[frozenset[str]], int]
    ) -> "TableMatroid":
        """Tabulate an arbitrary set function; no axioms are assumed."""
        size = 1 << len(ground)
        values = []
        for mask in range(size):
            members = frozenset(x for i, x in enumerate(ground) if mask >> i & 1)
            values.append(fn(members))
        return cls(ground, values)

    @override
    def rank_of_mask(self, mask: Mask) -> int:
        return int(self.table[mask])

    @override
    def _table(self) -> np.ndarray:
        return self.table.copy()


class UniformMatroid(TableMatroid):
    """U_{k,n}: every k-subset is a basis."""

    def __init__(self, k: int, ground: Sequence[str]) -> None:
        """Tabulate min(|A|, k)."""
        n = len(ground)
        if not 0 <= k <= n:
            msg = f"Uniform matroid needs 0 <= k <= n, got k={k}, n={n}"
            raise ValueError(msg)
        self.k = k
        counts = popcounts(np.arange(1 << n, dtype=np.int64), n)
        super().__init__(ground, np.minimum(counts, k).tolist())

    @override
    def to_json_dict(self) -> dict[str, Any]:
        return {"ground": list(self.ground), "uniform": self.k}


class LineMatroid(Matroid):
    """Simple rank-3 matroid determined by its lines (rank-2 flats)."""

    def __init__(
        self, ground: Sequence[str], lines: Iterable[Collection[str]]
    ) -> None:
        """Keep lines of at least three points; reject pairs sharing two points."""
        super().__init__(ground)
        unique = {
            frozenset(line)
            for line in lines
            if len(set(line)) > 2  # noqa: PLR2004
        }
        self.lines: tuple[frozenset[str], ...] = tuple(
            sorted(unique, key=lambda line: sorted(self.position[x] for x in line))
        )
        self.line_masks = [self.mask(line) for line in self.lines]
        # A pair of lines seen through two points shares both.
        through: defaultdict[str, list[int]] = defaultdict(list)
        for k, line in enumerate(self.lines):
            for x in line:
                through[x].append(k)
        meeting: set[tuple[int, int]] = set()
        for x in self.ground:
            for i, j in combinations(through[x], 2):
                if (i, j) in meeting:
                    shared = sorted(self.lines[i] & self.lines[j])
                    msg = (
                        f"Lines {sorted(self.lines[i])} and "
                        f"{sorted(self.lines[j])} share the points {shared}"
                    )
                    raise MalformedGeometryError(msg)
                meeting.add((i, j))

    @override
    def rank_of_mask(self, mask: Mask) -> int:
        size = mask.bit_count()
        if size <= 2:  # noqa: PLR2004
            return size
        if any(mask & ~line == 0 for line in self.line_masks):
            return 2
        return 3

    @override
    def _table(self) -> np.ndarray:
        n = len(self.ground)
        masks = np.arange(1 << n, dtype=np.int64)
        counts = popcounts(masks, n)
        on_line = np.zeros(masks.shape, dtype=bool)
        for line in self.line_masks:
            on_line |= (masks & ~np.int64(line)) == 0
        return np.where(counts <= 2, counts, np.where(on_line, 2, 3))  # noqa: PLR2004

    @override
    def to_json_dict(self) -> dict[str, Any]:
        return {
            "ground": list(self.ground),
            "lines": [
                sorted(line, key=self.position.__getitem__) for line in self.lines
            ],
        }


def matroid_from_json_dict(data: dict[str, Any]) -> Matroid:
    """Rebuild a matroid from any of the JSON forms written by to_json_dict."""
    if "presentation" in data:
        from dowling_reps.matroids.gdg import gdg_from_json_dict  # noqa: PLC0415

        return gdg_from_json_dict(data)
    ground = [str(x) for x in data["ground"]]
    if "lines" in data:
        return LineMatroid(ground, data["lines"])
    if "uniform" in data:
        return UniformMatroid(int(data["uniform"]), ground)
    if "rank_table" in data:
        return TableMatroid(ground, [int(v) for v in data["rank_table"]])
    msg = "Matroid JSON needs one of presentation, lines, uniform or rank_table"
    raise ValueError(msg)


def _bits(n: int) -> list[np.ndarray]:
    masks = np.arange(1 << n, dtype=np.int64)
    return [(masks >> i) & 1 == 1 for i in range(n)]


def _witnesses(m: Matroid, hits: np.ndarray) -> list[list[str]]:
    return [m.ordered(int(mask)) for mask in np.nonzero(hits)[0][:WITNESS_LIMIT]]


def verify_matroid_axioms(
    m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND
) -> AuditReport:
    """Exhaustive check of r(∅)=0, cardinality, monotonicity and submodularity.

    Submodularity is checked in its local form
    r(A∪i) + r(A∪j) ≥ r(A∪i∪j) + r(A), which together with monotonicity is
    equivalent to r(A) + r(B) ≥ r(A∪B) + r(A∩B) for all A, B.
    """
    table = m.rank_table(scan_bound)
    n = len(m.ground)
    masks = np.arange(1 << n, dtype=np.int64)
    counts = popcounts(masks, n)
    report = AuditReport(subject=f"matroid axioms on {n} elements")

    report.record("empty set", int(table[0]) == 0, f"r(∅) = {int(table[0])}")

    bad = (table < 0) | (table > counts)
    report.record(
        "(a) cardinality",
        not bad.any(),
        f"{int(bad.sum())} subsets with r(A) outside [0, |A|]",
        _witnesses(m, bad) or None,
    )

    has = _bits(n)
    bad = np.zeros(masks.shape, dtype=bool)
    for i in range(n):
        without = ~has[i]
        bad[without] |= table[masks[without] | (1 << i)] < table[without]
    report.record(
        "(b) monotonicity",
        not bad.any(),
        f"{int(bad.sum())} subsets A with some r(A∪i) < r(A)",
        _witnesses(m, bad) or None,
    )

    bad = np.zeros(masks.shape, dtype=bool)
    for i, j in combinations(range(n), 2):
        base = ~has[i] & ~has[j]
        a = masks[base]
        lhs = table[a | (1 << i)] + table[a | (1 << j)]
        rhs = table[a | (1 << i) | (1 << j)] + table[a]
        bad[base] |= lhs < rhs
    report.record(
        "(c) submodularity",
        not bad.any(),
        f"{int(bad.sum())} subsets A with a violating pair i, j",
        _witnesses(m, bad) or None,
    )
    return report


def independent_masks(m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND) -> list[Mask]:
    """Every independent set as a mask, in increasing mask order."""
    table = m.rank_table(scan_bound)
    counts = popcounts(np.arange(table.size, dtype=np.int64), len(m.ground))
    return [int(x) for x in np.nonzero(table == counts)[0]]


def circuit_masks(m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND) -> list[Mask]:
    """Minimal dependent sets as masks."""
    table = m.rank_table(scan_bound)
    n = len(m.ground)
    masks = np.arange(table.size, dtype=np.int64)
    counts = popcounts(masks, n)
    minimal = table < counts
    for i, has in enumerate(_bits(n)):
        minimal[has] &= table[masks[has] ^ (1 << i)] == counts[has] - 1
    return [int(x) for x in np.nonzero(minimal)[0]]


def flat_masks(m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND) -> list[Mask]:
    """Closed sets: adding any element raises the rank."""
    table = m.rank_table(scan_bound)
    n = len(m.ground)
    masks = np.arange(table.size, dtype=np.int64)
    closed = np.ones(masks.shape, dtype=bool)
    for i, has in enumerate(_bits(n)):
        without = ~has
        closed[without] &= table[masks[without] | (1 << i)] > table[without]
    return [int(x) for x in np.nonzero(closed)[0]]


def circuits(m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND) -> list[frozenset[str]]:
    """Minimal dependent sets."""
    return [m.subset(c) for c in circuit_masks(m, scan_bound)]


def flats(m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND) -> list[frozenset[str]]:
    """All flats, including ∅ when there are no loops and E itself."""
    return [m.subset(f) for f in flat_masks(m, scan_bound)]


def bases(m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND) -> list[frozenset[str]]:
    """Independent sets of full rank."""
    r = m.full_rank
    return [
        m.subset(a)
        for a in independent_masks(m, scan_bound)
        if a.bit_count() == r
    ]


def circuit_graph(m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND) -> nx.Graph:
    """Elements joined when some circuit contains both."""
    graph = nx.Graph()
    graph.add_nodes_from(m.ground)
    for c in circuit_masks(m, scan_bound):
        graph.add_edges_from(combinations(m.ordered(c), 2))
    return graph


def is_connected(m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND) -> bool:
    """Every pair of elements lies in a common circuit."""
    if len(m.ground) <= 1:
        return True
    return bool(nx.is_connected(circuit_graph(m, scan_bound)))


def scan_masks(m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND) -> list[Mask]:
    """All subsets when |E| ≤ scan_bound, else those of size ≤ r(E) + 1.

    Every circuit has at most r(E) + 1 elements, so both ranges contain all
    independent sets and circuits.
    """
    n = len(m.ground)
    if n <= scan_bound:
        return list(range(1 << n))
    top = m.full_rank + 1
    return [
        sum(1 << i for i in chosen)
        for size in range(top + 1)
        for chosen in combinations(range(n), size)
    ]


class MaskScan(NamedTuple):
    """Scanned subsets with their ranks, independent sets and circuits."""

    masks: list[Mask]
    ranks: dict[Mask, int]
    independent: list[Mask]
    circuits: list[Mask]


def classify_masks(m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND) -> MaskScan:
    """Independent sets and circuits among the scanned subsets."""
    masks = scan_masks(m, scan_bound)
    ranks = {mask: m.rank_of_mask(mask) for mask in masks}

    def rank_of(mask: Mask) -> int:
        if mask not in ranks:
            ranks[mask] = m.rank_of_mask(mask)
        return ranks[mask]

    independent = [a for a in masks if ranks[a] == a.bit_count()]
    found = [
        a
        for a in masks
        if ranks[a] < a.bit_count()
        and all(
            rank_of(a ^ (1 << i)) == a.bit_count() - 1
            for i in range(len(m.ground))
            if a >> i & 1
        )
    ]
    return MaskScan(masks, ranks, independent, found)
