"""Homomorphisms from finite presentations onto permutation groups.

Convention: φ(uv) = φ(u)∘φ(v), so a word acts on a point by applying its
last letter first.
"""

from itertools import permutations
from typing import Any

from pydantic import BaseModel, ConfigDict
from sympy.utilities.iterables import partitions

from dowling_reps.core.audit import AuditReport
from dowling_reps.groups.permutations import Permutation
from dowling_reps.presentations.model import Presentation
from dowling_reps.presentations.words import Word, format_word

type Perm = tuple[int, ...]


class FiniteHomomorphism(BaseModel):
    """Images of every generator id in S_n."""

    model_config = ConfigDict(frozen=True)

    target_degree: int
    images: dict[str, Permutation]

    def evaluate(self, word: Word) -> Permutation:
        """φ(word)."""
        return evaluate_word(self, word)

    def to_json_dict(self) -> dict[str, Any]:
        """Witness JSON: degree and one-line images."""
        return {
            "degree": self.target_degree,
            "images": {g: perm.one_line() for g, perm in sorted(self.images.items())},
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "FiniteHomomorphism":
        """Inverse of to_json_dict."""
        return cls(
            target_degree=int(data["degree"]),
            images={
                g: Permutation(images=tuple(img)) for g, img in data["images"].items()
            },
        )


def evaluate_word(h: FiniteHomomorphism, word: Word) -> Permutation:
    """Multiply out the images of a word's letters."""
    result = Permutation.identity(h.target_degree)
    for letter in word:
        if letter not in h.images:
            msg = f"No image for generator {letter!r}"
            raise ValueError(msg)
        result = result.compose(h.images[letter])
    return result


def verify_homomorphism(
    p: Presentation, h: FiniteHomomorphism, w: Word | None = None
) -> AuditReport:
    """Re-check a homomorphism by multiplying out every relator."""
    report = AuditReport(subject=f"homomorphism into S_{h.target_degree}")
    missing = [g for g in p.ids if g not in h.images]
    report.record(
        "images defined", not missing, f"{len(missing)} missing", missing or None
    )
    if missing:
        return report
    degrees = {perm.degree for perm in h.images.values()}
    report.record("common degree", degrees <= {h.target_degree}, str(sorted(degrees)))
    bad_pairs = [
        g
        for g in p.ids
        if not h.images[g].compose(h.images[p.inverse_of[g]]).is_identity()
    ]
    report.record(
        "inverse pairs",
        not bad_pairs,
        f"{len(bad_pairs)} violations",
        bad_pairs[:5] or None,
    )
    bad_relators = [
        format_word(r)
        for r in p.sorted_relators
        if not evaluate_word(h, r).is_identity()
    ]
    report.record(
        "relators trivial",
        not bad_relators,
        f"{len(bad_relators)} of {len(p.relators)} relators violated",
        bad_relators[:5] or None,
    )
    if w is not None:
        image = evaluate_word(h, w)
        report.record(
            "word nontrivial",
            not image.is_identity(),
            f"φ({format_word(w)}) = {image.one_line()}",
        )
    return report


def _compose(a: Perm, b: Perm) -> Perm:
    return tuple(a[j] for j in b)


def _invert(a: Perm) -> Perm:
    inv = [0] * len(a)
    for i, j in enumerate(a):
        inv[j] = i
    return tuple(inv)


def cycle_type_representatives(n: int, max_part: int | None = None) -> list[Perm]:
    """One permutation per cycle type, cycles laid out on consecutive points."""
    reps: list[Perm] = []
    for part in partitions(n):
        sizes = sorted(
            (size for size, mult in part.items() for _ in range(mult)), reverse=True
        )
        if max_part is not None and sizes and sizes[0] > max_part:
            continue
        images = list(range(n))
        start = 0
        for size in sizes:
            for offset in range(size):
                images[start + offset] = start + (offset + 1) % size
            start += size
        reps.append(tuple(images))
    return sorted(reps)


class _QuotientSearch:
    """Backtracking over generator images in S_n with relator propagation."""

    def __init__(self, p: Presentation, w: Word, n: int) -> None:
        self.n = n
        self.identity: Perm = tuple(range(n))
        self.neutral = p.neutral
        # one variable per inverse pair; letters map to (variable, inverted)
        self.var_of: dict[str, tuple[int, bool]] = {}
        self.var_names: list[str] = []
        self.involution: list[bool] = []
        for g in p.generators:
            if g.id == p.neutral or g.id in self.var_of:
                continue
            var = len(self.var_names)
            self.var_names.append(g.id)
            self.involution.append(g.id == g.inverse_id)
            self.var_of[g.id] = (var, False)
            if g.inverse_id != g.id:
                self.var_of[g.inverse_id] = (var, True)
        self.relators: list[list[tuple[int, bool]]] = [
            [self.var_of[x] for x in r if x != p.neutral] for r in p.sorted_relators
        ]
        self.relators = [r for r in self.relators if r]
        self.by_var: list[list[int]] = [[] for _ in self.var_names]
        for idx, rel in enumerate(self.relators):
            for var in {v for v, _ in rel}:
                self.by_var[var].append(idx)
        self.word = [self.var_of[x] for x in w if x != p.neutral]
        self.values: list[Perm | None] = [None] * len(self.var_names)
        self.inverses: list[Perm | None] = [None] * len(self.var_names)
        self.all_perms = list(permutations(range(n)))
        self.involutions = [
            s for s in self.all_perms if _compose(s, s) == self.identity
        ]
        counts = [len(rels) for rels in self.by_var]
        word_vars = list(dict.fromkeys(v for v, _ in self.word))
        rest = sorted(
            (v for v in range(len(self.var_names)) if v not in word_vars),
            key=lambda v: (-counts[v], v),
        )
        self.order = word_vars + rest

    def _image(self, var: int, inverted: bool) -> Perm | None:
        return self.inverses[var] if inverted else self.values[var]

    def _assign(self, var: int, perm: Perm, trail: list[int]) -> None:
        self.values[var] = perm
        self.inverses[var] = _invert(perm)
        trail.append(var)

    def _undo(self, trail: list[int], mark: int) -> None:
        while len(trail) > mark:
            var = trail.pop()
            self.values[var] = None
            self.inverses[var] = None

    def _product(self, letters: list[tuple[int, bool]]) -> Perm:
        result = self.identity
        for var, inverted in letters:
            image = self._image(var, inverted)
            if image is None:
                msg = "product of unassigned letters"
                raise RuntimeError(msg)
            result = _compose(result, image)
        return result

    def _propagate(self, start_vars: list[int], trail: list[int]) -> bool:
        """Check and solve relators touching newly assigned variables."""
        queue = list(start_vars)
        while queue:
            var = queue.pop()
            for idx in self.by_var[var]:
                rel = self.relators[idx]
                unknown = [i for i, (v, _) in enumerate(rel) if self.values[v] is None]
                if not unknown:
                    if self._product(rel) != self.identity:
                        return False
                    continue
                if len(unknown) != 1:
                    continue
                pos = unknown[0]
                target_var, inverted = rel[pos]
                prefix = self._product(rel[:pos])
                suffix = self._product(rel[pos + 1 :])
                solved = _compose(_invert(prefix), _invert(suffix))
                perm = _invert(solved) if inverted else solved
                is_involution = self.involution[target_var]
                if is_involution and _compose(perm, perm) != self.identity:
                    return False
                self._assign(target_var, perm, trail)
                queue.append(target_var)
        return True

    def _candidates(self, var: int) -> list[Perm]:
        fresh = all(v is None or v == self.identity for v in self.values)
        if fresh:
            return cycle_type_representatives(
                self.n, 2 if self.involution[var] else None
            )
        return self.involutions if self.involution[var] else self.all_perms

    def _solve(self, trail: list[int]) -> bool:
        var = next((v for v in self.order if self.values[v] is None), None)
        if var is None:
            return self._product(self.word) != self.identity
        for perm in self._candidates(var):
            mark = len(trail)
            self._assign(var, perm, trail)
            if self._propagate([var], trail) and self._solve(trail):
                return True
            self._undo(trail, mark)
        return False

    def run(self) -> dict[str, Perm] | None:
        trail: list[int] = []
        if not self._propagate(list(range(len(self.var_names))), trail):
            return None
        if not self._solve(trail):
            return None
        return {
            name: self.values[v] or self.identity
            for v, name in enumerate(self.var_names)
        }


def search_finite_quotient(
    p: Presentation, w: Word, n_max: int
) -> FiniteHomomorphism | None:
    """First homomorphism into S_n, n ≤ n_max, with φ(w) ≠ id.

    Returns None when no witness exists up to n_max; that says nothing
    about larger quotients.
    """
    p.check_word(w)
    for n in range(2, n_max + 1):
        found = _QuotientSearch(p, w, n).run()
        if found is None:
            continue
        images: dict[str, Permutation] = {p.neutral: Permutation.identity(n)}
        for g in p.generators:
            if g.id == p.neutral:
                continue
            base = found.get(g.id)
            if base is not None:
                images[g.id] = Permutation(images=base)
        for g in p.generators:
            if g.id not in images:
                images[g.id] = images[g.inverse_id].inverse()
        h = FiniteHomomorphism(target_degree=n, images=images)
        if verify_homomorphism(p, h, w).passed:
            return h
        msg = f"Search produced an invalid homomorphism at degree {n}"
        raise RuntimeError(msg)
    return None
