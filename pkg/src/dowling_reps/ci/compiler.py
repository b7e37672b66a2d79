"""CI semantics on joint distributions and the matroid-to-CI compiler."""

from collections import Counter
from collections.abc import Iterable, Sequence

from dowling_reps.ci.statements import CIInstance, CIStatement, all_statements
from dowling_reps.core.errors import BadParametersError
from dowling_reps.entropy.distribution import JointDistribution, Outcome
from dowling_reps.entropy.profile import EntropyValue, conditional_mutual_information
from dowling_reps.matroids.matroid import (
    DEFAULT_SCAN_BOUND,
    Matroid,
    classify_masks,
    is_connected,
)


def _project(outcome: Outcome, columns: Sequence[int]) -> Outcome:
    return tuple(outcome[k] for k in columns)


def check_ci(d: JointDistribution, st: CIStatement) -> bool:
    """P(a,b,c)·P(c) = P(a,c)·P(b,c) on the support, in integer weights.

    Equality on the support forces the product cells off the support to
    vanish, so this is the full factorization over every C-fiber.
    """
    a, b, c = sorted(st.a), sorted(st.b), sorted(st.c)
    union = list(dict.fromkeys([*a, *b, *c]))
    joint = d.weight_table(union)
    position = {x: k for k, x in enumerate(union)}
    cols_ac = [position[x] for x in dict.fromkeys([*a, *c])]
    cols_bc = [position[x] for x in dict.fromkeys([*b, *c])]
    cols_c = [position[x] for x in c]
    w_ac: Counter[Outcome] = Counter()
    w_bc: Counter[Outcome] = Counter()
    w_c: Counter[Outcome] = Counter()
    for outcome, w in joint.items():
        w_ac[_project(outcome, cols_ac)] += w
        w_bc[_project(outcome, cols_bc)] += w
        w_c[_project(outcome, cols_c)] += w
    return all(
        w * w_c[_project(o, cols_c)]
        == w_ac[_project(o, cols_ac)] * w_bc[_project(o, cols_bc)]
        for o, w in joint.items()
    )


def ci_gap(d: JointDistribution, st: CIStatement) -> EntropyValue:
    """H(X_A|X_C) + H(X_B|X_C) − H(X_{A∪B}|X_C), zero iff st holds."""
    return conditional_mutual_information(d, st.a, st.b, st.c)


def violated_statements(
    d: JointDistribution, statements: Iterable[CIStatement]
) -> list[CIStatement]:
    """Statements d does not realize, in sorted order."""
    return [
        st
        for st in sorted(statements, key=CIStatement.sort_key)
        if not check_ci(d, st)
    ]


def is_nontrivial(d: JointDistribution) -> bool:
    """Some variable takes two values with positive probability."""
    return any(len(d.support(x)) > 1 for x in d.ground)


def compile_matroid_to_ci(
    m: Matroid, scan_bound: int = DEFAULT_SCAN_BOUND
) -> frozenset[CIStatement]:
    """C_M: (i ⊥ A∖i | ∅) per independent A and (i ⊥ i | C∖i) per circuit C.

    A nontrivial family realizes C_M iff it is a probability-space
    representation of the connected matroid M.
    """
    if not is_connected(m, scan_bound):
        msg = "The CI compiler needs a connected matroid"
        raise BadParametersError(msg)
    scan = classify_masks(m, scan_bound)
    out: set[CIStatement] = set()
    for a in scan.independent:
        members = m.subset(a)
        out.update(CIStatement.of([i], members - {i}) for i in members)
    for c in scan.circuits:
        members = m.subset(c)
        out.update(CIStatement.of([i], [i], members - {i}) for i in members)
    return frozenset(out)


def cii_family(
    statements: Iterable[CIStatement], ground: Sequence[str]
) -> list[CIInstance]:
    """One implication instance per CI statement on ground outside statements.

    statements has a nontrivial realization iff one of these instances
    fails.
    """
    given = frozenset(statements)
    return [
        CIInstance(ground=tuple(ground), antecedents=given, consequent=c)
        for c in all_statements(ground)
        if c not in given
    ]
