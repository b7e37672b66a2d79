"""Bounded search for nontrivial realizations of CI statement sets.

Only uniform distributions on small supports are tried. Uniform variables
suffice for statement sets compiled from connected matroids; for other sets
a negative answer says nothing beyond the bounds.
"""

from collections.abc import Iterable, Iterator, Sequence
from itertools import combinations, product

from dowling_reps.ci.compiler import check_ci
from dowling_reps.ci.statements import CIStatement
from dowling_reps.core.errors import BadParametersError
from dowling_reps.entropy.distribution import JointDistribution, Outcome


def candidate_supports(
    n: int, alphabet_bound: int, support_bound: int
) -> Iterator[list[Outcome]]:
    """Supports of size 2..support_bound containing the all-zero cell.

    Relabeling each variable's values moves any cell to zero without
    changing which CI statements hold, so no realizer is lost.
    """
    cells = list(product(range(alphabet_bound), repeat=n))
    zero, rest = cells[0], cells[1:]
    for size in range(2, support_bound + 1):
        for chosen in combinations(rest, size - 1):
            yield [zero, *chosen]


def cir_search(
    statements: Iterable[CIStatement],
    ground: Sequence[str],
    alphabet_bound: int,
    support_bound: int,
) -> JointDistribution | None:
    """First uniform nontrivial realizer in size-then-lexicographic order.

    None means no realizer within the bounds, not that none exists.
    """
    if alphabet_bound < 2 or support_bound < 2:  # noqa: PLR2004
        return None
    given = sorted(set(statements), key=CIStatement.sort_key)
    known = set(ground)
    for st in given:
        unknown = sorted(st.variables - known)
        if unknown:
            msg = f"Statement {st} mentions {unknown} outside the ground set"
            raise BadParametersError(msg)
    alphabets = dict.fromkeys(ground, range(alphabet_bound))
    for support in candidate_supports(len(ground), alphabet_bound, support_bound):
        d = JointDistribution.uniform(ground, support, alphabets)
        if all(check_ci(d, st) for st in given):
            return d
    return None
