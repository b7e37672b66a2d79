"""Words over generator ids and their formal manipulations."""

from collections.abc import Iterable, Mapping

type Word = tuple[str, ...]

NEUTRAL = "e"
INVERSE_MARK = "'"


def formal_inverse_id(gid: str) -> str:
    """Inverse spelling: a ↔ a'."""
    if gid.endswith(INVERSE_MARK):
        return gid[: -len(INVERSE_MARK)]
    return gid + INVERSE_MARK


def base_id(gid: str) -> str:
    """The unprimed member of an inverse pair."""
    return gid.removesuffix(INVERSE_MARK)


def word_inverse(word: Word, inverse_of: Mapping[str, str]) -> Word:
    """(a b c)⁻¹ = c⁻¹ b⁻¹ a⁻¹."""
    return tuple(inverse_of[letter] for letter in reversed(word))


def cyclic_shifts(word: Word) -> list[Word]:
    """All rotations, starting with the word itself."""
    return [word[i:] + word[:i] for i in range(len(word))] or [word]


def symmetric_closure(
    relators: Iterable[Word], inverse_of: Mapping[str, str]
) -> frozenset[Word]:
    """Close a relator set under cyclic shifts and inverse-reversal."""
    closed: set[Word] = set()
    for relator in relators:
        if relator in closed:
            continue
        closed.update(cyclic_shifts(relator))
        closed.update(cyclic_shifts(word_inverse(relator, inverse_of)))
    return frozenset(closed)


def free_reduce(
    word: Word, inverse_of: Mapping[str, str], neutral: str = NEUTRAL
) -> Word:
    """Drop neutral letters and cancel adjacent inverse pairs."""
    stack: list[str] = []
    for letter in word:
        if letter == neutral:
            continue
        if stack and inverse_of[stack[-1]] == letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def cyclically_reduce(
    word: Word, inverse_of: Mapping[str, str], neutral: str = NEUTRAL
) -> Word:
    """Free reduction followed by cancelling first against last letters."""
    reduced = list(free_reduce(word, inverse_of, neutral))
    while len(reduced) > 1 and inverse_of[reduced[0]] == reduced[-1]:
        reduced = reduced[1:-1]
    return tuple(reduced)


def power(word: Word, k: int, inverse_of: Mapping[str, str]) -> Word:
    """word^k, negative k meaning powers of the inverse."""
    base = word if k >= 0 else word_inverse(word, inverse_of)
    return base * abs(k)


def format_word(word: Word) -> str:
    """Space-separated letters."""
    return " ".join(word)


def word_key(word: Word) -> str:
    """Canonical string used for lexicographic ordering of relators."""
    return format_word(word)
