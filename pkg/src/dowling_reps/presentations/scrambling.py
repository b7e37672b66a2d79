"""Group scrambling: a presentation whose zero-sum triples are all harmless.

The construction runs in five steps on a symmetric triangular ⟨S | R⟩:

1. make every relator letter-distinct (variants s~1, s~2 of repeated s);
2. add x_s for every s and w_r for every relator;
3. add central generators t_s, t_r and their commutator generators u;
4. break each relator up into a chain y_{r,1..36} through a balanced word;
5. symmetrize, let central letters swap, symmetrize again.

μ sends every new generator to (word over S ∪ {f_r}, vector in Z^N).
"""

from collections.abc import Iterable
from functools import cached_property
from itertools import combinations
from typing import Any

from pydantic import BaseModel, ConfigDict

from dowling_reps.presentations.abelian import AbelianVector, MuImage, total
from dowling_reps.presentations.model import (
    Presentation,
    generator_sort_key,
    require_symmetric_triangular,
)
from dowling_reps.presentations.words import (
    NEUTRAL,
    Word,
    formal_inverse_id,
    free_reduce,
    symmetric_closure,
    word_inverse,
)

X_WEIGHT = 5
T_POWER = 5
TAIL_REPEATS = 5
CHAIN_LENGTH = 36

TRIVIAL_PAIR = "trivial pair"
COMMUTATOR = "commutator"
BREAK_UP = "break-up"
SWAP = "swap"
SYMMETRIZATION = "symmetrization image"
UNJUSTIFIED = "unjustified"


def variant_id(s: str, k: int) -> str:
    """k-th letter-distinct copy of s."""
    return f"{s}~{k}"


def relator_key(j: int) -> str:
    """Key of the j-th relator in lexicographic order."""
    return f"r:{j}"


def x_id(s: str) -> str:
    """Generator carrying s with weight 5b_s."""
    return f"x[{s}]"


def w_id(key: str) -> str:
    """Generator carrying the free letter f_r."""
    return f"w[{key}]"


def t_id(key: str) -> str:
    """Central generator for the basis vector b_key."""
    return f"t[{key}]"


def f_id(key: str) -> str:
    """Free letter of F_R for one relator."""
    return f"f[{key}]"


def u_id(a: str, b: str) -> str:
    """Generator standing for the commuting product a b."""
    return f"u[{a}/{b}]"


def commuting_id(t1: str, t2: str) -> str:
    """u_{t1,t2} = u_{t2,t1}, named by the lexicographically smaller first."""
    lo, hi = sorted((t1, t2))
    return u_id(lo, hi)


def y_id(key: str, i: int) -> str:
    """i-th chain generator of one relator."""
    return f"y[{key}:{i}]"


def prepare_distinct_letters(p: Presentation) -> Presentation:
    """Rewrite relators so no generator occurs twice in one relator.

    A repeated s gets variants s~1 and s~2 forced equal to s by
    s s~k' e; the second and third occurrences are replaced. A repeated
    neutral letter uses e~1 e~1' e~2 and e~2 e~2' e~1 instead, which
    force both variants to e without repeating a letter.
    """
    e = p.neutral
    repeated = sorted(
        {x for r in p.relators for x in r if r.count(x) > 1},
        key=lambda g: generator_sort_key(g, e),
    )
    if not repeated:
        return p

    new_ids = [variant_id(s, k) for s in repeated for k in (1, 2)]
    extended = p.with_generators(new_ids).with_relators(())
    inv = extended.inverse_of

    relators: set[Word] = set()
    for r in p.relators:
        seen: dict[str, int] = {}
        rewritten = []
        for letter in r:
            count = seen.get(letter, 0)
            seen[letter] = count + 1
            rewritten.append(letter if count == 0 else variant_id(letter, count))
        relators.add(tuple(rewritten))
    for s in repeated:
        first, second = variant_id(s, 1), variant_id(s, 2)
        if s == e:
            relators.add((first, inv[first], second))
            relators.add((second, inv[second], first))
        else:
            relators.add((s, inv[first], e))
            relators.add((s, inv[second], e))
    for g in new_ids:
        relators.add((g, inv[g], e))
        relators.add((inv[g], g, e))
    return extended.with_relators(symmetric_closure(relators, inv))


def scrambling_word(
    w: str, xs: tuple[str, str, str], t_r: str, ts: tuple[str, str, str]
) -> Word:
    """w x_a t_r⁵ x_b t_r⁵ x_c (t_a' t_r' t_b' t_r' t_c')⁵, 39 letters."""
    x_a, x_b, x_c = xs
    t_a, t_b, t_c = (formal_inverse_id(t) for t in ts)
    t_r_inv = formal_inverse_id(t_r)
    tail = (t_a, t_r_inv, t_b, t_r_inv, t_c) * TAIL_REPEATS
    return (w, x_a, *(t_r,) * T_POWER, x_b, *(t_r,) * T_POWER, x_c, *tail)


class ScrambledPresentation(BaseModel):
    """⟨S' | R'⟩ with μ recorded for every generator."""

    model_config = ConfigDict(frozen=True)

    base: Presentation
    prepared: Presentation
    result: Presentation
    n_factors: int
    relators_by_key: dict[str, Word]
    i_map: dict[str, str]
    j_map: dict[str, str]
    mu_images: dict[str, MuImage]
    seeds: dict[str, frozenset[Word]]

    @property
    def N(self) -> int:
        """Number of Z factors."""
        return self.n_factors

    @cached_property
    def letter_inverse(self) -> dict[str, str]:
        """Inverse map on S ∪ {f_r}^±."""
        return _letter_inverse(self.prepared, self.relators_by_key)

    @cached_property
    def free_letters(self) -> dict[str, str]:
        """f letters to relator keys, inverses marked with a trailing prime."""
        letters: dict[str, str] = {}
        for key in self.relators_by_key:
            letters[f_id(key)] = key
            letters[formal_inverse_id(f_id(key))] = key + "'"
        return letters

    @cached_property
    def abelian_values(self) -> dict[str, AbelianVector]:
        """π^ab of every generator of the result."""
        return {g: m.abelian(self.free_letters) for g, m in self.mu_images.items()}

    @cached_property
    def central_ids(self) -> frozenset[str]:
        """T⁺ ∪ T⁻."""
        inv = self.result.inverse_of
        return frozenset(t for t in self.j_map.values()) | frozenset(
            inv[t] for t in self.j_map.values()
        )

    def mu(self, word: Word) -> MuImage:
        """μ of a word over S'."""
        self.result.check_word(word)
        return _product(
            [self.mu_images[g] for g in word],
            self.letter_inverse,
            self.prepared.neutral,
        )

    def y_generators(self, key: str) -> list[str]:
        """Chain generators of one relator."""
        return [y_id(key, i) for i in range(1, CHAIN_LENGTH + 1)]

    def to_json_dict(self) -> dict[str, Any]:
        """JSON export including μ."""
        return self.model_dump(mode="json")

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "ScrambledPresentation":
        """Inverse of to_json_dict."""
        return cls.model_validate(data)


def _product(
    images: Iterable[MuImage], inverse: dict[str, str], neutral: str = NEUTRAL
) -> MuImage:
    images = list(images)
    word = free_reduce(tuple(x for m in images for x in m.word), inverse, neutral)
    return MuImage(word=word, vector=total(m.vector for m in images))


def _inverse_image(m: MuImage, inverse: dict[str, str]) -> MuImage:
    return MuImage(word=word_inverse(m.word, inverse), vector=-m.vector)


class _Builder:
    """Accumulates generators, μ images and tagged relators."""

    def __init__(
        self, prepared: Presentation, letter_inverse: dict[str, str]
    ) -> None:
        self.neutral = prepared.neutral
        self.letter_inverse = letter_inverse
        self.ids: list[str] = []
        self.images: dict[str, MuImage] = {}
        self.seeds: dict[str, set[Word]] = {
            tag: set() for tag in (TRIVIAL_PAIR, COMMUTATOR, BREAK_UP)
        }

    def define(self, gid: str, image: MuImage) -> None:
        if gid in self.images:
            msg = f"Generator {gid!r} defined twice"
            raise ValueError(msg)
        self.ids.append(gid)
        self.images[gid] = image
        inverse = _inverse_image(image, self.letter_inverse)
        self.images[formal_inverse_id(gid)] = inverse

    def image(self, word: Word) -> MuImage:
        return _product(
            (self.images[g] for g in word), self.letter_inverse, self.neutral
        )

    def extend(self, image: MuImage, letter: str) -> MuImage:
        return _product(
            (image, self.images[letter]), self.letter_inverse, self.neutral
        )

    def relate(self, tag: str, relator: Word) -> None:
        self.seeds[tag].add(relator)

    def inverse_pairing(self) -> dict[str, str]:
        pairing = {self.neutral: self.neutral}
        for g in self.ids:
            pairing[g] = formal_inverse_id(g)
            pairing[formal_inverse_id(g)] = g
        return pairing


def _letter_inverse(prepared: Presentation, keys: Iterable[str]) -> dict[str, str]:
    inverse = dict(prepared.inverse_of)
    for key in keys:
        f = f_id(key)
        inverse[f] = formal_inverse_id(f)
        inverse[formal_inverse_id(f)] = f
    return inverse


def scramble(p: Presentation) -> ScrambledPresentation:
    """Run the five scrambling steps on a symmetric triangular presentation."""
    require_symmetric_triangular(p)
    prepared = prepare_distinct_letters(p)
    e = prepared.neutral
    letters = prepared.ids
    keys = {relator_key(j): r for j, r in enumerate(prepared.sorted_relators, 1)}
    clash = sorted(set(keys) & set(letters))
    if clash:
        msg = f"Generator ids {clash} collide with relator keys"
        raise ValueError(msg)

    build = _Builder(prepared, _letter_inverse(prepared, keys))

    xs = {s: x_id(s) for s in letters}
    for s, x in xs.items():
        word = () if s == e else (s,)
        build.define(x, MuImage(word=word, vector=AbelianVector.basis(s, X_WEIGHT)))
    ws = {key: w_id(key) for key in keys}
    for key, w in ws.items():
        build.define(w, MuImage(word=(f_id(key),), vector=AbelianVector.zero()))

    t_plus = {s: t_id(s) for s in letters} | {key: t_id(key) for key in keys}
    for key, t in t_plus.items():
        build.define(t, MuImage(word=(), vector=AbelianVector.basis(key)))
    inv = formal_inverse_id
    for head in [*xs.values(), *ws.values()]:
        for t in t_plus.values():
            u = u_id(head, t)
            build.define(u, build.image((head, t)))
            build.relate(COMMUTATOR, (head, t, inv(u)))
            build.relate(COMMUTATOR, (u, inv(head), inv(t)))
    for t1, t2 in combinations(sorted(t_plus.values()), 2):
        u = u_id(t1, t2)
        build.define(u, build.image((t1, t2)))
        build.relate(COMMUTATOR, (t1, t2, inv(u)))
        build.relate(COMMUTATOR, (u, inv(t1), inv(t2)))

    for key, (a, b, c) in keys.items():
        w, t_r = ws[key], t_plus[key]
        word = scrambling_word(
            w, (xs[a], xs[b], xs[c]), t_r, (t_plus[a], t_plus[b], t_plus[c])
        )
        ys = [y_id(key, i) for i in range(1, CHAIN_LENGTH + 1)]
        image = build.image(word[:2])
        build.define(ys[0], image)
        build.relate(BREAK_UP, (w, xs[a], inv(ys[0])))
        for i in range(1, CHAIN_LENGTH):
            image = build.extend(image, word[i + 1])
            build.define(ys[i], image)
            build.relate(BREAK_UP, (ys[i - 1], word[i + 1], inv(ys[i])))
        build.relate(BREAK_UP, (inv(w), ys[-1], inv(commuting_id(t_plus[c], t_r))))

    pairing = build.inverse_pairing()
    for g in pairing:
        if g != e:
            build.relate(TRIVIAL_PAIR, (g, pairing[g], e))
    build.relate(TRIVIAL_PAIR, (e, e, e))

    central = {e} | set(t_plus.values()) | {inv(t) for t in t_plus.values()}
    relators = _postprocess(
        (r for rels in build.seeds.values() for r in rels), central, pairing
    )
    result = Presentation.build(build.ids, relators, neutral=e)
    images = dict(build.images)
    images[e] = MuImage(word=(), vector=AbelianVector.zero())
    return ScrambledPresentation(
        base=p,
        prepared=prepared,
        result=result,
        n_factors=len(t_plus),
        relators_by_key=keys,
        i_map=xs,
        j_map=t_plus,
        mu_images=images,
        seeds={tag: frozenset(rels) for tag, rels in build.seeds.items()},
    )


def _swaps(relators: Iterable[Word], central: set[str] | frozenset[str]) -> set[Word]:
    swapped: set[Word] = set()
    for a, b, c in relators:
        if a in central:
            swapped.add((b, a, c))
            swapped.add((b, c, a))
    return swapped


def _postprocess(
    seeds: Iterable[Word], central: set[str], pairing: dict[str, str]
) -> frozenset[Word]:
    closed = symmetric_closure(seeds, pairing)
    return symmetric_closure(closed | _swaps(closed, central), pairing)


def justify(sp: ScrambledPresentation) -> dict[Word, str]:
    """Tag every relator of the result with the step that produced it."""
    pairing = sp.result.inverse_of
    tag_of: dict[Word, str] = {}
    for tag, rels in sp.seeds.items():
        for r in rels:
            tag_of.setdefault(r, tag)
    closed = symmetric_closure(tag_of, pairing)
    central = sp.central_ids | {sp.result.neutral}
    swapped = _swaps(closed, central)
    swap_closed = symmetric_closure(swapped, pairing)
    tags: dict[Word, str] = {}
    for r in sp.result.relators:
        if r in tag_of:
            tags[r] = tag_of[r]
        elif r in closed:
            tags[r] = SYMMETRIZATION
        elif r in swapped:
            tags[r] = SWAP
        elif r in swap_closed:
            tags[r] = SYMMETRIZATION
        else:
            tags[r] = UNJUSTIFIED
    return tags

