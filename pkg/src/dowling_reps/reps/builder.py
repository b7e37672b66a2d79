"""Vector-space representations of Dowling geometries from matrix images of S."""

from collections.abc import Mapping
from fractions import Fraction
from itertools import combinations, product

from dowling_reps.core.audit import AuditReport
from dowling_reps.core.errors import BadParametersError
from dowling_reps.groups.permutations import Permutation
from dowling_reps.linalg.matrix import Matrix, hstack, is_invertible, rank_distance
from dowling_reps.matroids.gdg import FRAME, point_id
from dowling_reps.presentations.model import Presentation
from dowling_reps.presentations.words import Word, format_word
from dowling_reps.reps.families import LinearMapFamily

HYPOTHESIS_DIVISOR = 18
WITNESS_LIMIT = 5

type MatrixImages = Mapping[str, Matrix]


def complete_images(p: Presentation, images: MatrixImages) -> dict[str, Matrix]:
    """Fill in ρ(e) = I and ρ(s⁻¹) = ρ(s)⁻¹ where only one side is given."""
    first = next(iter(images.values()), None)
    if first is None:
        msg = "At least one generator image is needed"
        raise BadParametersError(msg)
    rho = dict(images)
    rho.setdefault(p.neutral, Matrix.identity(first.rows, first.p))
    for g in p.ids:
        inv = p.inverse_of[g]
        if g not in rho and inv in rho:
            rho[g] = rho[inv].inverse()
    missing = [g for g in p.ids if g not in rho]
    if missing:
        msg = f"No matrix image for generators {missing}"
        raise BadParametersError(msg)
    return rho


def word_image(rho: MatrixImages, word: Word, c: int, p: int) -> Matrix:
    """ρ(l0)ρ(l1)…, the empty word giving I."""
    out = Matrix.identity(c, p)
    for letter in word:
        out @= rho[letter]
    return out


def build_gdg_representation(
    p: Presentation,
    rho: MatrixImages,
    epsilon: Fraction | None = None,
) -> LinearMapFamily:
    """V = W ⊕ W ⊕ W, T_{b_i} the projections, T_{s_i} = T_{b_j} − ρ(s)T_{b_i}.

    j follows i cyclically. When epsilon is given the hypotheses are
    checked first and a failing audit raises BadParametersError.
    """
    images = complete_images(p, rho)
    c = next(iter(images.values())).rows
    q = next(iter(images.values())).p
    for g, m in images.items():
        if m.shape != (c, c) or m.p != q or not is_invertible(m):
            msg = f"Image of {g!r} is not an invertible {c}x{c} matrix over GF({q})"
            raise BadParametersError(msg)
    if epsilon is not None:
        audit = check_builder_hypotheses(p, images, epsilon)
        if not audit.passed:
            first = audit.failures()[0]
            msg = f"Hypothesis {first.check} fails at ε={epsilon}: {first.detail}"
            raise BadParametersError(msg)

    zero = Matrix.zeros(c, c, q)
    ident = Matrix.identity(c, q)
    frame = [
        hstack([ident if k == i else zero for k in range(3)], q, c) for i in range(3)
    ]
    maps: dict[str, Matrix] = {FRAME[i]: frame[i] for i in range(3)}
    for i in range(3):
        j = (i + 1) % 3
        for s in p.ids:
            maps[point_id(s, i + 1)] = frame[j] - images[s] @ frame[i]
    return LinearMapFamily(p=q, c=c, dim_v=3 * c, maps=maps)


def check_builder_hypotheses(
    p: Presentation, rho: MatrixImages, epsilon: Fraction
) -> AuditReport:
    """Separation, off-relator distance and near-identity relators at ε/18.

    (d) is relative to the relators of p: a triple whose product equals the
    identity must be listed in R.
    """
    images = complete_images(p, rho)
    bound = Fraction(epsilon) / HYPOTHESIS_DIVISOR
    c = next(iter(images.values())).rows
    q = next(iter(images.values())).p
    ident = Matrix.identity(c, q)
    report = AuditReport(subject=f"builder hypotheses at ε={epsilon}")

    close_pairs = [
        (s, t)
        for s, t in combinations(p.ids, 2)
        if rank_distance(images[s], images[t]).value < 1 - bound
    ]
    report.record(
        "(a) separation",
        not close_pairs,
        f"{len(close_pairs)} pairs with d_rk < 1 − ε/18",
        close_pairs[:WITNESS_LIMIT] or None,
    )

    near: list[str] = []
    far: list[str] = []
    coincidences: list[str] = []
    for triple in product(p.ids, repeat=3):
        d = rank_distance(word_image(images, triple, c, q), ident).value
        if triple in p.relators:
            if d > bound:
                far.append(format_word(triple))
        else:
            if d < 1 - bound:
                near.append(format_word(triple))
            if d == 0:
                coincidences.append(format_word(triple))
    report.record(
        "(b) off-relator triples",
        not near,
        f"{len(near)} non-relator triples with d_rk(ρ(w), I) < 1 − ε/18",
        near[:WITNESS_LIMIT] or None,
    )
    d_e = rank_distance(images[p.neutral], ident).value
    report.record(
        "(c) relator triples",
        not far and d_e <= bound,
        f"{len(far)} relators beyond ε/18; d_rk(ρ(e), I) = {d_e}",
        far[:WITNESS_LIMIT] or None,
    )
    report.record(
        "(d) relator completeness",
        not coincidences,
        f"{len(coincidences)} identity products outside R",
        coincidences[:WITNESS_LIMIT] or None,
    )
    report.note("relator completeness is checked against R, not the group")
    return report


def hypothesis_epsilon(p: Presentation, rho: MatrixImages) -> Fraction:
    """Least ε for which (a), (b) and (c) hold."""
    images = complete_images(p, rho)
    c = next(iter(images.values())).rows
    q = next(iter(images.values())).p
    ident = Matrix.identity(c, q)
    needed = rank_distance(images[p.neutral], ident).value
    for s, t in combinations(p.ids, 2):
        needed = max(needed, 1 - rank_distance(images[s], images[t]).value)
    for triple in product(p.ids, repeat=3):
        d = rank_distance(word_image(images, triple, c, q), ident).value
        needed = max(needed, d if triple in p.relators else 1 - d)
    return needed * HYPOTHESIS_DIVISOR


def shift_images(n: int, p: int = 2, letter: str = "a") -> dict[str, Matrix]:
    """ρ(a) = the cyclic shift of GF(p)^n; an almost-representation of Z."""
    shift = Permutation.shift(n, 1).to_matrix(p)
    return {letter: shift, letter + "'": Permutation.shift(n, -1).to_matrix(p)}


def scalar_images(values: Mapping[str, int], p: int) -> dict[str, Matrix]:
    """1×1 images from field elements."""
    return {g: Matrix.scalar(v, 1, p) for g, v in values.items()}
