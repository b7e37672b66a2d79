"""Text format for presentations.

Example::

    # the cyclic group of order three
    gens: a
    rels:
    a a a

Statements may share a line when separated by ``;`` (``gens: a; rels: aaa``).
Relators are comma-separated on the ``rels:`` line or one per following
line. Letters are whitespace-separated, or juxtaposed and split by greedy
longest match against the known generator ids. Inverses are spelled ``a'``
and the neutral generator ``e`` is always present.
"""

import re
from dataclasses import dataclass

from dowling_reps.presentations.model import Presentation, UnknownGeneratorError
from dowling_reps.presentations.words import (
    INVERSE_MARK,
    NEUTRAL,
    Word,
    format_word,
)

ID_CHARS = re.compile(r"[A-Za-z0-9_\[\]:/~.']+")
DECLARED_ID = re.compile(r"[A-Za-z0-9_\[\]:/~.']*[A-Za-z0-9_\]]")
KEYWORDS = ("gens", "involutions", "rels")


class PresentationSyntaxError(ValueError):
    """Malformed presentation text, with a 1-based position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        """Record the position and build the message."""
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass
class _Statement:
    keyword: str
    body: str
    line: int
    column: int


def _split_statements(text: str) -> list[_Statement]:
    """Split text into keyword statements and continuation lines."""
    statements: list[_Statement] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        offset = 0
        for chunk in line.split(";"):
            column = offset + 1
            offset += len(chunk) + 1
            stripped = chunk.strip()
            if not stripped:
                continue
            column += len(chunk) - len(chunk.lstrip())
            head, sep, rest = stripped.partition(":")
            if sep and head.strip() in KEYWORDS:
                body_col = column + len(head) + 1 + (len(rest) - len(rest.lstrip()))
                statements.append(
                    _Statement(head.strip(), rest.strip(), line_no, body_col)
                )
            elif statements and statements[-1].keyword == "rels":
                statements.append(_Statement("rel", stripped, line_no, column))
            else:
                msg = f"expected one of {', '.join(KEYWORDS)} followed by ':'"
                raise PresentationSyntaxError(msg, line_no, column)
    return statements


def _split_list(body: str, line: int, column: int) -> list[tuple[str, int]]:
    """Comma/whitespace separated tokens with their columns."""
    out: list[tuple[str, int]] = []
    for match in re.finditer(r"[^,\s]+", body):
        token = match.group(0)
        if not DECLARED_ID.fullmatch(token):
            bad = next(
                (i for i, ch in enumerate(token) if not ID_CHARS.fullmatch(ch)),
                len(token) - 1,
            )
            msg = f"invalid generator name {token!r}"
            raise PresentationSyntaxError(msg, line, column + match.start() + bad)
        out.append((token, column + match.start()))
    return out


def tokenize_word(
    text: str, known: frozenset[str], line: int = 1, column: int = 1
) -> Word:
    """Split a relator into generator ids."""
    text = text.strip()
    if not text:
        return ()
    for idx, ch in enumerate(text):
        if not (ch.isspace() or ID_CHARS.fullmatch(ch)):
            msg = f"unexpected character {ch!r}"
            raise PresentationSyntaxError(msg, line, column + idx)
    if any(ch.isspace() for ch in text):
        spaced = text.split()
        for letter in spaced:
            if letter not in known:
                msg = f"unknown generator {letter!r} at line {line}"
                raise UnknownGeneratorError(msg)
        return tuple(spaced)
    by_length = sorted(known, key=len, reverse=True)
    letters: list[str] = []
    pos = 0
    while pos < len(text):
        match = next((g for g in by_length if text.startswith(g, pos)), None)
        if match is None:
            msg = (
                f"unknown generator at line {line}, column {column + pos} "
                f"in {text!r}"
            )
            raise UnknownGeneratorError(msg)
        letters.append(match)
        pos += len(match)
    return tuple(letters)


def parse_presentation(text: str) -> Presentation:
    """Parse presentation text.

    Raises:
        PresentationSyntaxError: malformed text, with line and column
        UnknownGeneratorError: a relator uses an undeclared generator

    """
    statements = _split_statements(text)
    gens: list[str] = []
    involutions: list[str] = []
    relator_texts: list[tuple[str, int, int]] = []
    for st in statements:
        if st.keyword in {"gens", "involutions"}:
            for token, col in _split_list(st.body, st.line, st.column):
                if token != NEUTRAL:
                    gens.append(token)
                    if st.keyword == "involutions":
                        involutions.append(token)
        elif st.keyword == "rels":
            offset = 0
            for chunk in st.body.split(","):
                if chunk.strip():
                    relator_texts.append((chunk, st.line, st.column + offset))
                offset += len(chunk) + 1
        else:
            relator_texts.append((st.body, st.line, st.column))

    skeleton = Presentation.build(gens, (), involutions=involutions)
    known = frozenset(skeleton.ids)
    relators = [
        word
        for body, line, col in relator_texts
        if (word := tokenize_word(body, known, line, col))
    ]
    return skeleton.with_relators(relators)


def format_presentation(p: Presentation) -> str:
    """Render a presentation so that parse_presentation reproduces it."""
    declared = [
        g.id
        for g in p.generators
        if g.id not in {p.neutral, g.inverse_id} and not g.id.endswith(INVERSE_MARK)
    ]
    lines = [f"gens: {', '.join(declared)}"]
    if p.involutions:
        lines.append(f"involutions: {', '.join(p.involutions)}")
    lines.append("rels:")
    lines.extend(format_word(r) for r in p.sorted_relators)
    return "\n".join(lines) + "\n"
