"""Shannon entropy in interval arithmetic and entropy polymatroids.

Entropies use the natural logarithm and are evaluated as mpmath intervals at
PRECISION bits, so every reported value carries a guaranteed enclosure.
"""

from collections import Counter
from collections.abc import Iterable, Iterator
from contextlib import contextmanager
from itertools import combinations
from typing import Any

import mpmath
from mpmath import iv
from pydantic import BaseModel, ConfigDict

from dowling_reps.core.audit import AuditReport
from dowling_reps.entropy.distribution import JointDistribution
from dowling_reps.matroids.matroid import DEFAULT_SCAN_BOUND, ScanBoundExceededError

PRECISION = 128
WITNESS_LIMIT = 5


@contextmanager
def working_precision(bits: int = PRECISION) -> Iterator[None]:
    """Raise the interval context's precision for the duration of a block."""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


class EntropyValue(BaseModel):
    """A real number known to lie in a closed interval."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    interval: Any

    @classmethod
    def exact(cls, value: int) -> "EntropyValue":
        """A point interval."""
        with working_precision():
            return cls(interval=iv.mpf(value))

    @property
    def lower(self) -> mpmath.mpf:
        """Left endpoint."""
        return mpmath.mpf(self.interval.a)

    @property
    def upper(self) -> mpmath.mpf:
        """Right endpoint."""
        return mpmath.mpf(self.interval.b)

    @property
    def width(self) -> mpmath.mpf:
        """upper − lower."""
        with working_precision():
            return mpmath.mpf(self.interval.delta.b)

    def contains(self, value: int) -> bool:
        """Whether value lies in the interval."""
        return value in self.interval

    def __add__(self, other: "EntropyValue") -> "EntropyValue":
        """Interval sum."""
        with working_precision():
            return EntropyValue(interval=self.interval + other.interval)

    def __sub__(self, other: "EntropyValue") -> "EntropyValue":
        """Interval difference."""
        with working_precision():
            return EntropyValue(interval=self.interval - other.interval)

    def scale(self, k: int) -> "EntropyValue":
        """k times the value."""
        with working_precision():
            return EntropyValue(interval=self.interval * k)

    def reciprocal(self) -> "EntropyValue":
        """1 / value; the interval must exclude zero."""
        if self.contains(0):
            msg = "Cannot invert an interval containing zero"
            raise ZeroDivisionError(msg)
        with working_precision():
            return EntropyValue(interval=1 / self.interval)

    def definitely_below(self, other: "EntropyValue") -> bool:
        """Every point of self is smaller than every point of other."""
        return bool(self.upper < other.lower)

    def __str__(self) -> str:
        """Midpoint with the enclosure width."""
        mid = (self.lower + self.upper) / 2
        return f"{mpmath.nstr(mid, 20)} ± {mpmath.nstr(self.width / 2, 3)}"


def entropy_of_weights(weights: Iterable[int], total: int) -> EntropyValue:
    """−Σ (w/total)·log(w/total) for integer weights summing to total."""
    counts = Counter(int(w) for w in weights if w)
    if len(counts) == 1 and next(iter(counts)) == total:
        return EntropyValue.exact(0)
    with working_precision():
        acc = iv.mpf(0)
        for w, count in counts.items():
            acc += count * w * iv.log(w)
        value = iv.log(total) - acc / total
    return EntropyValue(interval=value)


def entropy(d: JointDistribution, s: Iterable[str]) -> EntropyValue:
    """H(X_S) of the marginal on s."""
    _, weights = d.marginal(s)
    return entropy_of_weights(weights.tolist(), d.denominator)


def conditional_entropy(
    d: JointDistribution, target: Iterable[str], given: Iterable[str]
) -> EntropyValue:
    """H(X_A | X_C) = H(X_{A∪C}) − H(X_C)."""
    condition = list(given)
    return entropy(d, [*condition, *target]) - entropy(d, condition)


def conditional_mutual_information(
    d: JointDistribution, a: Iterable[str], b: Iterable[str], c: Iterable[str]
) -> EntropyValue:
    """H(X_A|X_C) + H(X_B|X_C) − H(X_{A∪B}|X_C)."""
    first, second, given = list(a), list(b), list(c)
    return (
        conditional_entropy(d, first, given)
        + conditional_entropy(d, second, given)
        - conditional_entropy(d, [*first, *second], given)
    )


class EntropyProfile(BaseModel):
    """H(X_S) for every subset S of the ground set, indexed by bitmask."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ground: tuple[str, ...]
    values: tuple[EntropyValue, ...]

    def mask(self, subset: Iterable[str]) -> int:
        """Bitmask of a subset in ground order."""
        position = {x: i for i, x in enumerate(self.ground)}
        return sum(1 << position[x] for x in set(subset))

    def __getitem__(self, subset: Iterable[str]) -> EntropyValue:
        """H of a subset."""
        return self.values[self.mask(subset)]

    @property
    def max_width(self) -> mpmath.mpf:
        """Widest enclosure in the profile."""
        return max(v.width for v in self.values)

    def to_json_dict(self) -> dict[str, Any]:
        """Ground and per-mask [lower, upper] strings."""
        return {
            "ground": list(self.ground),
            "values": [
                [mpmath.nstr(v.lower, 40), mpmath.nstr(v.upper, 40)]
                for v in self.values
            ],
        }


def _members(ground: tuple[str, ...], mask: int) -> list[str]:
    return [x for i, x in enumerate(ground) if mask >> i & 1]


def entropy_profile(
    d: JointDistribution, scan_bound: int = DEFAULT_SCAN_BOUND
) -> tuple[EntropyProfile, AuditReport]:
    """All 2^|E| entropies and a polymatroid audit within interval precision.

    A property fails only when the enclosures prove a violation.
    """
    n = len(d.ground)
    if n > scan_bound:
        msg = f"Distribution on {n} variables exceeds the scan bound {scan_bound}"
        raise ScanBoundExceededError(msg)
    values = tuple(entropy(d, _members(d.ground, mask)) for mask in range(1 << n))
    profile = EntropyProfile(ground=d.ground, values=values)
    report = AuditReport(subject=f"entropy polymatroid on {n} variables")

    report.record("empty set", values[0].contains(0), f"H(∅) = {values[0]}")

    decreasing: list[list[str]] = []
    for mask in range(1 << n):
        for i in range(n):
            if not mask >> i & 1 and values[mask | 1 << i].definitely_below(
                values[mask]
            ):
                decreasing.append(_members(d.ground, mask | 1 << i))
    report.record(
        "monotonicity",
        not decreasing,
        f"{len(decreasing)} proven violations",
        decreasing[:WITNESS_LIMIT] or None,
    )

    violations: list[list[str]] = []
    for i, j in combinations(range(n), 2):
        for mask in range(1 << n):
            if mask >> i & 1 or mask >> j & 1:
                continue
            lhs = values[mask | 1 << i] + values[mask | 1 << j]
            rhs = values[mask | 1 << i | 1 << j] + values[mask]
            if lhs.definitely_below(rhs):
                violations.append(_members(d.ground, mask | 1 << i | 1 << j))
    report.record(
        "submodularity",
        not violations,
        f"{len(violations)} proven violations of the local form",
        violations[:WITNESS_LIMIT] or None,
    )
    report.note(
        f"entropies enclosed at {PRECISION} bits, widest interval "
        f"{mpmath.nstr(profile.max_width, 3)}"
    )
    return profile, report

