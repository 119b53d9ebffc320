"""Finite-state chunking over part-of-speech sequences.

A pattern is a flat sequence of POS atoms with optional quantifiers, e.g.
``DET? ADJ* (NOUN|PROPN)+``. Each pattern compiles to a small NFA that is
simulated token by token so the longest match is always found.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .lexicon import POS_LABELS, LexiconSet, lookup_morph

CHUNK_KINDS = ("NP", "VP", "PP")
QUANTIFIERS = {"": "one", "?": "optional", "*": "star", "+": "plus"}

# Order used to pick a single POS per token for chunking.
POS_PRIORITY = ("NOUN", "VERB", "ADJ", "DET", "PREP", "PRON", "ADV", "PROPN", "UNK", "PUNC")

DEFAULT_PATTERNS = (
    ("NP", "DET? ADJ* (NOUN|PROPN)+ ADJ*"),
    ("VP", "ADV? VERB+ ADV?"),
    ("PP", "PREP DET? ADJ* (NOUN|PROPN)+"),
)


class PatternSyntax(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class ChunkPattern:
    kind: str
    pattern: tuple[tuple[frozenset[str], str], ...]
    text: str = ""

    def match_length(self, tags: Sequence[str], start: int) -> int:
        """Length of the longest match of this pattern at ``start`` (0 if none)."""
        elems = self.pattern
        end = len(elems)

        def closure(states):
            stack, seen = list(states), set(states)
            while stack:
                i, looped = stack.pop()
                if i == end:
                    continue
                q = elems[i][1]
                if looped or q in ("optional", "star"):
                    nxt = (i + 1, False)
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            return seen

        states = closure({(0, False)})
        best = 0
        pos = start
        while states and pos < len(tags):
            tag = tags[pos]
            moved = set()
            for i, looped in states:
                if i == end or tag not in elems[i][0]:
                    continue
                if elems[i][1] in ("one", "optional"):
                    moved.add((i + 1, False))
                else:
                    moved.add((i, True))
            states = closure(moved)
            pos += 1
            if (end, False) in states:
                best = pos - start
        return best


@dataclass(frozen=True)
class Chunk:
    kind: str
    first_token: int
    last_token: int
    head: int

    def __contains__(self, index: int) -> bool:
        return self.first_token <= index <= self.last_token


_PATTERN_TOKEN = re.compile(r"\s+|\(([A-Z]+(?:\|[A-Z]+)*)\)([?*+]?)|([A-Z]+)([?*+]?)")


def compile_pattern(kind: str, pattern_text: str) -> ChunkPattern:
    if kind not in CHUNK_KINDS:
        raise PatternSyntax(f"unknown chunk kind {kind!r}", 0)
    elems = []
    pos = 0
    while pos < len(pattern_text):
        m = _PATTERN_TOKEN.match(pattern_text, pos)
        if m is None:
            raise PatternSyntax(f"unexpected {pattern_text[pos]!r}", pos)
        if m.group(1) or m.group(3):
            labels = (m.group(1) or m.group(3)).split("|")
            for label in labels:
                if label not in POS_LABELS:
                    raise PatternSyntax(f"unknown POS {label!r}", m.start())
            quant = m.group(2) if m.group(1) else m.group(4)
            if m.end() < len(pattern_text) and not pattern_text[m.end()].isspace():
                raise PatternSyntax(f"unexpected {pattern_text[m.end()]!r}", m.end())
            elems.append((frozenset(labels), QUANTIFIERS[quant]))
        pos = m.end()
    if not elems:
        raise PatternSyntax("empty pattern", 0)
    return ChunkPattern(kind, tuple(elems), pattern_text)


def default_patterns() -> tuple[ChunkPattern, ...]:
    return tuple(compile_pattern(k, p) for k, p in DEFAULT_PATTERNS)


def load_patterns(path) -> tuple[ChunkPattern, ...]:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        kind, sep, text = line.partition("\t")
        if not sep:
            raise PatternSyntax(f"line {lineno}: missing tab", 0)
        out.append(compile_pattern(kind.strip(), text.strip()))
    return tuple(out)


def select_pos(analyses: Iterable) -> str:
    """Pick one POS from a set of morphological analyses by fixed priority."""
    tags = {a.pos for a in analyses}
    for tag in POS_PRIORITY:
        if tag in tags:
            return tag
    return "UNK"


def pos_sequence(lex: LexiconSet, surfaces: Sequence[str]) -> list[str]:
    return [select_pos(lookup_morph(lex, s)) for s in surfaces]


def chunk_head(c: Chunk | tuple, tags: Sequence[str]) -> int:
    """NP/PP: rightmost noun or proper noun. VP: leftmost verb.

    Falls back to the last token of the chunk.
    """
    kind, first, last = c[:3] if isinstance(c, tuple) else (c.kind, c.first_token, c.last_token)
    rng = range(first, last + 1)
    if kind == "VP":
        for i in rng:
            if tags[i] == "VERB":
                return i
    else:
        for i in reversed(rng):
            if tags[i] in ("NOUN", "PROPN"):
                return i
    return last


def chunk_sentence(tags: Sequence[str], patterns: Sequence[ChunkPattern]) -> list[Chunk]:
    """Greedy left-to-right chunking.

    At each position the first pattern (in order) that matches wins, with its
    longest match; unmatched tokens are skipped.
    """
    chunks = []
    i = 0
    while i < len(tags):
        for pat in patterns:
            length = pat.match_length(tags, i)
            if length:
                last = i + length - 1
                chunks.append(Chunk(pat.kind, i, last, chunk_head((pat.kind, i, last), tags)))
                i = last + 1
                break
        else:
            i += 1
    return chunks
