"""Corpus data model, tokenizer and the inline annotation format.

Documents are stored as whitespace-separated text where entity slots are
wrapped in tags::

    #doc d1
    <gsp.loc> France </gsp.loc> est belle .

A tag label is either a main type (``pers``) or ``main.sub`` (``gsp.org``).
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence


class CorpusError(Exception):
    """Base class for corpus and inline-format errors."""


class InlineFormatError(CorpusError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at character {offset})")
        self.offset = offset


class UnbalancedTag(InlineFormatError):
    pass


class UnknownLabel(InlineFormatError):
    pass


class NestedTag(InlineFormatError):
    pass


class SchemaError(CorpusError):
    pass


class TooFewDocuments(CorpusError):
    pass


@dataclass(frozen=True)
class Token:
    surface: str
    char_start: int
    char_end: int
    sent_index: int

    def __post_init__(self):
        if self.char_start >= self.char_end:
            raise ValueError(f"empty token extent {self.char_start}..{self.char_end}")


@dataclass(frozen=True, order=True)
class AnnotatedSpan:
    first_token: int
    last_token: int
    main_type: str
    sub_type: str | None = None

    @property
    def label(self) -> str:
        if self.sub_type is None:
            return self.main_type
        return f"{self.main_type}.{self.sub_type}"

    def overlaps(self, other: AnnotatedSpan) -> bool:
        return self.first_token <= other.last_token and other.first_token <= self.last_token


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    spans: tuple[AnnotatedSpan, ...] = ()

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def span_text(self, span: AnnotatedSpan) -> str:
        return " ".join(t.surface for t in self.tokens[span.first_token:span.last_token + 1])

    def with_spans(self, spans: Iterable[AnnotatedSpan]) -> Sentence:
        return Sentence(self.tokens, tuple(sorted(spans)))


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: tuple[Sentence, ...]
    source_uri: str | None = None

    def spans(self):
        """Yield ``(sentence_index, span)`` pairs in reading order."""
        for i, sent in enumerate(self.sentences):
            for span in sent.spans:
                yield i, span

    def replace_spans(self, spans_by_sentence: Sequence[Iterable[AnnotatedSpan]]) -> Document:
        sents = tuple(s.with_spans(sp) for s, sp in zip(self.sentences, spans_by_sentence))
        return Document(self.doc_id, sents, self.source_uri)

    def strip_spans(self) -> Document:
        return self.replace_spans([()] * len(self.sentences))


@dataclass(frozen=True)
class TagSchema:
    """Tree of main types and their subtypes.

    ``focalisation_label`` maps ``(main, sub)`` to the label emitted in
    entity bundles. Main types without subtypes use their own name.
    """

    main_types: frozenset[str]
    subtypes: Mapping[str, frozenset[str]] = field(default_factory=dict)
    default_subtype: Mapping[str, str] = field(default_factory=dict)
    focalisation_label: Mapping[tuple[str, str], str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "main_types", frozenset(self.main_types))
        object.__setattr__(self, "subtypes",
                           MappingProxyType({m: frozenset(s) for m, s in self.subtypes.items()}))
        object.__setattr__(self, "default_subtype", MappingProxyType(dict(self.default_subtype)))
        object.__setattr__(self, "focalisation_label",
                           MappingProxyType(dict(self.focalisation_label)))
        for m, subs in self.subtypes.items():
            if m not in self.main_types:
                raise SchemaError(f"subtypes declared for unknown main type {m!r}")
            if subs and self.default_subtype.get(m) not in subs:
                raise SchemaError(f"main type {m!r} has subtypes but no valid default")
            for s in subs:
                if (m, s) not in self.focalisation_label:
                    raise SchemaError(f"no focalisation label for {m}.{s}")

    def has_subtypes(self, main: str) -> bool:
        return bool(self.subtypes.get(main))

    def is_valid_label(self, main: str, sub: str | None) -> bool:
        if main not in self.main_types:
            return False
        return sub is None or sub in self.subtypes.get(main, ())

    def focalisation(self, main: str, sub: str | None) -> str:
        if sub is None:
            return main
        return self.focalisation_label[(main, sub)]


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    schema: TagSchema

    def __len__(self):
        return len(self.documents)


@dataclass(frozen=True)
class Violation:
    rule: str
    doc_id: str
    sentence_index: int
    span: AnnotatedSpan | None
    detail: str = ""


# -- schema files ---------------------------------------------------------

def parse_schema(text: str) -> TagSchema:
    """Parse the line-based schema format.

    ``main <label>``, ``sub <main> <sub> <focalisation>`` and
    ``default <main> <sub>``; ``#`` starts a comment line.
    """
    mains: set[str] = set()
    subs: dict[str, set[str]] = {}
    defaults: dict[str, str] = {}
    focal: dict[tuple[str, str], str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "main" and len(parts) == 2:
            mains.add(parts[1])
        elif kind == "sub" and len(parts) == 4:
            subs.setdefault(parts[1], set()).add(parts[2])
            focal[(parts[1], parts[2])] = parts[3]
        elif kind == "default" and len(parts) == 3:
            defaults[parts[1]] = parts[2]
        else:
            raise SchemaError(f"line {lineno}: cannot parse {line!r}")
    return TagSchema(frozenset(mains), subs, defaults, focal)


def load_schema(path: str | Path) -> TagSchema:
    return parse_schema(Path(path).read_text(encoding="utf-8"))


def default_schema() -> TagSchema:
    from .resources import data_path

    return load_schema(data_path("schema.txt"))


# -- tokenization ---------------------------------------------------------

_ELISION = r"(?:[Qq][Uu]|[LlDdJjMmNnSsTtCc])['’](?=\s*\w)"
_TOKEN_RE = re.compile(rf"(?<!\w){_ELISION}|[^\W_]+(?:[-_][^\W_]+)*|\S", re.UNICODE)
_SENT_END = {".", "!", "?"}


def _split_tokens(text: str) -> list[tuple[str, int, int]]:
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def _is_boundary(text: str, pieces, i: int) -> bool:
    surface, _, end = pieces[i]
    if surface not in _SENT_END:
        return False
    if i + 1 == len(pieces):
        return True
    nxt, nstart, _ = pieces[i + 1]
    return nstart > end and text[end:nstart].isspace() and nxt[0].isupper()


def _group_sentences(text: str, pieces) -> list[list[tuple[str, int, int]]]:
    sentences, current = [], []
    for i, piece in enumerate(pieces):
        current.append(piece)
        if _is_boundary(text, pieces, i):
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


def tokenize(raw: str) -> list[Sentence]:
    """Split ``raw`` into sentences of tokens (no spans).

    Punctuation marks are standalone tokens and French elided forms
    (``l'``, ``qu'``...) keep their apostrophe. A sentence ends at ``.``,
    ``!`` or ``?`` followed by whitespace and a capital, or at end of input.
    """
    pieces = _split_tokens(raw)
    out = []
    for group in _group_sentences(raw, pieces):
        out.append(Sentence(tuple(Token(s, a, b, i) for i, (s, a, b) in enumerate(group))))
    return out


# -- inline format --------------------------------------------------------

_TAG_RE = re.compile(r"<(/?)([^<>\s]+)>")


def _split_label(label: str) -> tuple[str, str | None]:
    main, _, sub = label.partition(".")
    return main, (sub or None)


def parse_inline(raw: str, schema: TagSchema, doc_id: str = "doc",
                 source_uri: str | None = None) -> Document:
    """Parse inline-tagged text into a :class:`Document`.

    Tags are blanked out before tokenization so token offsets refer to
    ``raw`` and untagged text tokenizes exactly as :func:`tokenize`.
    """
    blanked = list(raw)
    open_tag = None  # (label, char offset)
    extents = []     # (main, sub, start_char, end_char, open_offset)
    for m in _TAG_RE.finditer(raw):
        closing, label = m.group(1) == "/", m.group(2)
        main, sub = _split_label(label)
        if not schema.is_valid_label(main, sub):
            raise UnknownLabel(f"unknown label {label!r}", m.start())
        if closing:
            if open_tag is None:
                raise UnbalancedTag(f"closing </{label}> without opening tag", m.start())
            if open_tag[0] != label:
                raise UnbalancedTag(f"</{label}> closes <{open_tag[0]}>", m.start())
            extents.append((main, sub, open_tag[2], m.start(), open_tag[1]))
            open_tag = None
        else:
            if open_tag is not None:
                raise NestedTag(f"<{label}> opened inside <{open_tag[0]}>", m.start())
            open_tag = (label, m.start(), m.end())
        blanked[m.start():m.end()] = " " * (m.end() - m.start())
    if open_tag is not None:
        raise UnbalancedTag(f"<{open_tag[0]}> is never closed", open_tag[1])

    sentences = tokenize("".join(blanked))
    # map character extents onto (sentence, token) positions
    flat = [(si, t) for si, s in enumerate(sentences) for t in s.tokens]
    spans: list[list[AnnotatedSpan]] = [[] for _ in sentences]
    for main, sub, start, end, offset in extents:
        inside = [(si, t) for si, t in flat if t.char_start >= start and t.char_end <= end]
        if not inside:
            raise UnbalancedTag("tag pair encloses no token", offset)
        sents = {si for si, _ in inside}
        if len(sents) != 1:
            raise InlineFormatError("tagged span crosses a sentence boundary", offset)
        si = inside[0][0]
        spans[si].append(AnnotatedSpan(inside[0][1].sent_index, inside[-1][1].sent_index, main, sub))
    sentences = [s.with_spans(sp) for s, sp in zip(sentences, spans)]
    return Document(doc_id, tuple(sentences), source_uri)


def serialize_sentence(sent: Sentence) -> str:
    starts = {sp.first_token: sp for sp in sent.spans}
    ends = {sp.last_token: sp for sp in sent.spans}
    parts = []
    for i, tok in enumerate(sent.tokens):
        if i in starts:
            parts.append(f"<{starts[i].label}>")
        parts.append(tok.surface)
        if i in ends:
            parts.append(f"</{ends[i].label}>")
    return " ".join(parts)


def serialize_inline(doc: Document) -> str:
    """Render ``doc`` one sentence per line, tokens single-space joined."""
    return "\n".join(serialize_sentence(s) for s in doc.sentences if s.tokens)


# -- corpus files ---------------------------------------------------------

def parse_corpus(text: str, schema: TagSchema, source_uri: str | None = None) -> Corpus:
    docs = []
    doc_id, body = None, []

    def flush():
        if doc_id is not None:
            docs.append(parse_inline("\n".join(body), schema, doc_id, source_uri))

    for line in text.splitlines():
        if line.startswith("#doc"):
            flush()
            doc_id = line[4:].strip()
            if not doc_id:
                raise CorpusError("#doc line without an identifier")
            body = []
        elif doc_id is None:
            if line.strip():
                raise CorpusError("text before the first #doc line")
        else:
            body.append(line)
    flush()
    ids = [d.doc_id for d in docs]
    if len(set(ids)) != len(ids):
        raise CorpusError("duplicate document identifiers")
    return Corpus(tuple(docs), schema)


def read_corpus(path: str | Path, schema: TagSchema) -> Corpus:
    path = Path(path)
    return parse_corpus(path.read_text(encoding="utf-8"), schema, str(path))


def format_corpus(corpus: Corpus | Iterable[Document]) -> str:
    docs = corpus.documents if isinstance(corpus, Corpus) else corpus
    lines = []
    for doc in docs:
        lines.append(f"#doc {doc.doc_id}")
        lines.extend(serialize_sentence(s) for s in doc.sentences if s.tokens)
    return "\n".join(lines) + "\n"


def documents_from_text(text: str, schema: TagSchema, default_id: str = "doc1") -> tuple[Document, ...]:
    """Read raw or tagged input; ``#doc`` headers are optional."""
    if any(line.startswith("#doc") for line in text.splitlines()):
        return parse_corpus(text, schema).documents
    return (parse_inline(text, schema, default_id),)


# -- splitting and validation ---------------------------------------------

def split_corpus(c: Corpus, train_fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Document-level random split; each side keeps the original order."""
    n = len(c.documents)
    if n < 2:
        raise TooFewDocuments(f"need at least 2 documents, got {n}")
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    n_train = min(max(round(train_fraction * n), 1), n - 1)
    order = list(range(n))
    random.Random(seed).shuffle(order)
    train_idx = set(order[:n_train])
    train = tuple(d for i, d in enumerate(c.documents) if i in train_idx)
    test = tuple(d for i, d in enumerate(c.documents) if i not in train_idx)
    return Corpus(train, c.schema), Corpus(test, c.schema)


def validate_document(doc: Document, schema: TagSchema) -> list[Violation]:
    out = []
    if not doc.doc_id:
        out.append(Violation("EmptyDocId", doc.doc_id, -1, None))
    for si, sent in enumerate(doc.sentences):
        prev = None
        for ti, tok in enumerate(sent.tokens):
            if tok.sent_index != ti:
                out.append(Violation("TokenIndex", doc.doc_id, si, None, f"token {ti}"))
            if prev is not None and tok.char_start < prev.char_end:
                out.append(Violation("TokenOrder", doc.doc_id, si, None, f"token {ti}"))
            prev = tok
        n = len(sent.tokens)
        spans = sorted(sent.spans)
        for span in spans:
            if not 0 <= span.first_token <= span.last_token < n:
                out.append(Violation("SpanOutOfRange", doc.doc_id, si, span))
            if span.main_type not in schema.main_types:
                out.append(Violation("UnknownMainType", doc.doc_id, si, span))
            elif span.sub_type is not None and not schema.is_valid_label(span.main_type, span.sub_type):
                out.append(Violation("UnknownSubtype", doc.doc_id, si, span))
        for a, b in zip(spans, spans[1:]):
            if a.overlaps(b):
                out.append(Violation("OverlappingSpans", doc.doc_id, si, b, f"overlaps {a.label}"))
    return out


def validate_corpus(c: Corpus) -> list[Violation]:
    out = []
    seen = set()
    for doc in c.documents:
        if doc.doc_id in seen:
            out.append(Violation("DuplicateDocId", doc.doc_id, -1, None))
        seen.add(doc.doc_id)
        out.extend(validate_document(doc, c.schema))
    return out
