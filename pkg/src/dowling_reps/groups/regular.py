"""Left-regular permutation representations of finite image groups."""

from sympy.combinatorics import Permutation as SymPermutation
from sympy.combinatorics import PermutationGroup

from dowling_reps.core.errors import BudgetExceededError
from dowling_reps.groups.permutations import Permutation
from dowling_reps.groups.quotients import FiniteHomomorphism


class ImageGroupTooLargeError(BudgetExceededError):
    """The image group exceeds the configured enumeration bound."""


def image_group(h: FiniteHomomorphism) -> PermutationGroup:
    """Subgroup of S_n generated by the images of h."""
    n = h.target_degree
    gens = [SymPermutation(list(perm.images), size=n) for perm in h.images.values()]
    return PermutationGroup(gens or [SymPermutation(list(range(n)), size=n)])


def left_regular_representation(
    h: FiniteHomomorphism, bound: int = 5040
) -> FiniteHomomorphism:
    """Let the image group H act on itself by left multiplication.

    Every non-identity image is a derangement of |H| points. Elements are
    indexed in lexicographic order of their one-line forms.
    """
    group = image_group(h)
    order = int(group.order())
    if order > bound:
        msg = f"Image group has order {order}, above the bound {bound}"
        raise ImageGroupTooLargeError(msg)
    elements = sorted(tuple(g.array_form) for g in group.generate())
    index = {element: i for i, element in enumerate(elements)}
    images: dict[str, Permutation] = {}
    for gid, perm in h.images.items():
        sigma = perm.images
        images[gid] = Permutation(
            images=tuple(index[tuple(sigma[j] for j in g)] for g in elements)
        )
    return FiniteHomomorphism(target_degree=order, images=images)


def is_identity_or_derangement(perm: Permutation) -> bool:
    """Moves every point or none."""
    return perm.is_identity() or perm.is_derangement()
