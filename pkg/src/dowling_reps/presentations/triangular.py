"""Normalization into symmetric triangular presentations."""

from dowling_reps.presentations.model import Presentation
from dowling_reps.presentations.words import Word, symmetric_closure


def chain_generator(relator_index: int, step: int) -> str:
    """Name of the step-th break-up generator for a long relator."""
    return f"h[{relator_index}:{step}]"


def break_up(
    word: Word, relator_index: int, neutral: str
) -> tuple[list[str], list[Word]]:
    """Rewrite one relator as length-three relators.

    Short relators are padded with the neutral letter. A relator
    s1 … sn with n ≥ 4 becomes s1 s2 h1', h_i s_{i+2} h_{i+1}' and
    h_{n−3} s_{n−1} s_n, using n − 3 fresh generators.
    """
    n = len(word)
    if n == 0:
        return [], []
    if n < 3:  # noqa: PLR2004
        return [], [word + (neutral,) * (3 - n)]
    if n == 3:  # noqa: PLR2004
        return [], [word]
    chain = [chain_generator(relator_index, i) for i in range(1, n - 2)]
    pieces: list[Word] = [(word[0], word[1], chain[0] + "'")]
    for i in range(len(chain) - 1):
        pieces.append((chain[i], word[i + 2], chain[i + 1] + "'"))
    pieces.append((chain[-1], word[-2], word[-1]))
    return chain, pieces


def symmetrize(p: Presentation) -> Presentation:
    """Close relators under cyclic shifts and inverse-reversal."""
    return p.with_relators(symmetric_closure(p.relators, p.inverse_of))


def normalize_symmetric_triangular(p: Presentation) -> Presentation:
    """Tietze-equivalent symmetric triangular presentation.

    Adds the neutral generator and formal inverses, breaks relators into
    length-three pieces, adds s s' e for every s ≠ e together with e e e,
    and symmetrizes.
    """
    e = p.neutral
    new_generators: list[str] = []
    relators: set[Word] = set()
    long_index = 0
    for relator in p.sorted_relators:
        index = 0
        if len(relator) > 3:  # noqa: PLR2004
            long_index += 1
            index = long_index
        chain, pieces = break_up(relator, index, e)
        new_generators.extend(chain)
        relators.update(pieces)
    extended = p.with_generators(new_generators).with_relators(())
    inv = extended.inverse_of
    relators.update((s, inv[s], e) for s in extended.ids if s != e)
    relators.add((e, e, e))
    return extended.with_relators(symmetric_closure(relators, inv))
