"""Context features around entity occurrences.

Every feature is a ``(kind, payload)`` pair rendered canonically as
``KIND:payload`` (or bare ``KIND`` when the payload is empty).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .chunker import ChunkPattern, chunk_sentence, default_patterns, select_pos
from .corpus import AnnotatedSpan, Corpus, Document
from .lexicon import (GRANULARITY_RANK, LexiconSet, lookup_cluster, lookup_morph,
                      lookup_verb_frame, match_gazetteer)

FEATURE_KINDS = ("TRIG", "POS", "LEMMA", "CLUST", "VCLASS_GOV", "SUBJ_OF_HUMAN_VERB",
                 "COOC_NE", "FINER_LOC_COOC", "FEELING_NP")

AUXILIARY_LEMMAS = frozenset({"avoir", "être"})
FEELING_LABEL = "feeling"
LOCATION_CATEGORIES = frozenset({"loc", "gsp"})


class SpanOutOfRange(IndexError):
    pass


class FeatureId(NamedTuple):
    kind: str
    payload: str = ""

    def __str__(self):
        return f"{self.kind}:{self.payload}" if self.payload else self.kind

    @classmethod
    def parse(cls, text: str) -> FeatureId:
        kind, _, payload = text.partition(":")
        if kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature kind in {text!r}")
        return cls(kind, payload)


@dataclass(frozen=True)
class ContextWindow:
    radius: int = 5
    sentence_bounded: bool = True

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("window radius must be >= 1")


@dataclass(frozen=True)
class FeatureVector:
    doc_id: str
    sentence_index: int
    span: AnnotatedSpan
    active: frozenset[FeatureId]
    gold_subtype: str | None = None

    @property
    def main_type(self) -> str:
        return self.span.main_type


def _window_positions(doc: Document, si: int, span: AnnotatedSpan, window: ContextWindow):
    """(sentence, token) positions covered by the window, in reading order."""
    sents = doc.sentences
    r = window.radius
    if window.sentence_bounded:
        n = len(sents[si].tokens)
        lo, hi = max(0, span.first_token - r), min(n - 1, span.last_token + r)
        return [(si, t) for t in range(lo, hi + 1)]
    left = []
    s, t = si, span.first_token
    while len(left) < r:
        t -= 1
        while t < 0:
            s -= 1
            if s < 0:
                break
            t = len(sents[s].tokens) - 1
        if s < 0:
            break
        left.append((s, t))
    right = []
    s, t = si, span.last_token
    while len(right) < r:
        t += 1
        while s < len(sents) and t >= len(sents[s].tokens):
            s, t = s + 1, 0
        if s >= len(sents):
            break
        right.append((s, t))
    core = [(si, t) for t in range(span.first_token, span.last_token + 1)]
    return left[::-1] + core + right


def extract_features(doc: Document, sentence_index: int, span: AnnotatedSpan,
                     window: ContextWindow, lex: LexiconSet,
                     patterns: Sequence[ChunkPattern] | None = None) -> FeatureVector:
    """Collect the active features in the window around ``span``.

    Chunking and gazetteer matching run on the window's tokens only, so
    nothing outside the window can influence the result.
    """
    if not 0 <= sentence_index < len(doc.sentences):
        raise SpanOutOfRange(f"no sentence {sentence_index} in {doc.doc_id}")
    sent = doc.sentences[sentence_index]
    if not 0 <= span.first_token <= span.last_token < len(sent.tokens):
        raise SpanOutOfRange(f"span {span} outside sentence {sentence_index}")
    if patterns is None:
        patterns = default_patterns()

    positions = _window_positions(doc, sentence_index, span, window)
    local = {p: i for i, p in enumerate(positions)}
    a = local[(sentence_index, span.first_token)]
    b = local[(sentence_index, span.last_token)]
    surfaces = [doc.sentences[s].tokens[t].surface for s, t in positions]
    analyses = [lookup_morph(lex, w) for w in surfaces]
    tags = [select_pos(an) for an in analyses]

    active: set[FeatureId] = set()
    add = active.add

    def side(i):
        return "left" if i < a else "right"

    for i, an in enumerate(analyses):
        if a <= i <= b:
            continue
        sd = side(i)
        for entry in an:
            add(FeatureId("LEMMA", f"{entry.lemma}:{sd}"))
            add(FeatureId("POS", f"{entry.pos}:{sd}"))
            for cid in lookup_cluster(lex, entry.lemma):
                add(FeatureId("CLUST", cid))

    span_entry = lex.gazetteer_entry(surfaces[a:b + 1])
    span_rank = GRANULARITY_RANK.get(getattr(span_entry, "granularity", None) or "country")
    for m in match_gazetteer(lex, surfaces):
        if m.first <= b and a <= m.last:
            continue
        if m.entry.is_trigger:
            add(FeatureId("TRIG", f"{m.trigger_role}:{side(m.first)}"))
        elif (m.category in LOCATION_CATEGORIES and m.entry.granularity is not None
              and GRANULARITY_RANK[m.entry.granularity] < span_rank):
            add(FeatureId("FINER_LOC_COOC"))

    for s in {s for s, _ in positions}:
        for other in doc.sentences[s].spans:
            if s == sentence_index and other == span:
                continue
            if any((s, t) in local for t in range(other.first_token, other.last_token + 1)):
                add(FeatureId("COOC_NE", other.main_type))

    chunks = chunk_sentence(tags, patterns)
    for k, ch in enumerate(chunks):
        if ch.kind == "NP" and ch.first_token <= a and b <= ch.last_token:
            nxt = chunks[k + 1] if k + 1 < len(chunks) else None
            if nxt is not None and nxt.kind == "VP" and nxt.first_token == ch.last_token + 1:
                for frame in _governing_frames(lex, analyses, tags, nxt):
                    if frame.verb_class:
                        add(FeatureId("VCLASS_GOV", frame.verb_class))
                    if frame.subject_restriction == "human":
                        add(FeatureId("SUBJ_OF_HUMAN_VERB"))
        elif ch.kind == "NP" and (ch.last_token < a or ch.first_token > b):
            for entry in analyses[ch.head]:
                if any(lex.cluster_label(c) == FEELING_LABEL
                       for c in lookup_cluster(lex, entry.lemma)):
                    add(FeatureId("FEELING_NP"))
    return FeatureVector(doc.doc_id, sentence_index, span, frozenset(active))


def _governing_frames(lex, analyses, tags, vp):
    """Verb frames of the VP's head verb; a leading auxiliary defers to the
    last verb of the group (``a signé`` is governed by ``signer``)."""
    verbs = [i for i in range(vp.first_token, vp.last_token + 1) if tags[i] == "VERB"]
    if not verbs:
        return []
    head = verbs[0]
    if len(verbs) > 1 and any(e.lemma in AUXILIARY_LEMMAS and e.pos == "VERB"
                              for e in analyses[head]):
        head = verbs[-1]
    frames = []
    for entry in sorted(analyses[head]):
        if entry.pos == "VERB":
            frame = lookup_verb_frame(lex, entry.lemma)
            if frame is not None and frame not in frames:
                frames.append(frame)
    return frames


def corpus_vectors(corpus: Corpus | Iterable[Document], lex: LexiconSet, window: ContextWindow,
                   patterns: Sequence[ChunkPattern] | None = None, schema=None) -> list[FeatureVector]:
    """Feature vectors (with gold subtypes) for every span whose main type
    has subtypes in the schema."""
    if isinstance(corpus, Corpus):
        schema = corpus.schema
        docs = corpus.documents
    else:
        docs = corpus
    if patterns is None:
        patterns = default_patterns()
    out = []
    for doc in docs:
        for si, span in doc.spans():
            if schema is not None and not schema.has_subtypes(span.main_type):
                continue
            fv = extract_features(doc, si, span, window, lex, patterns)
            out.append(FeatureVector(fv.doc_id, si, span, fv.active, span.sub_type))
    return out


class Vocabulary:
    """Dense bijective index over feature ids, sorted by (kind, payload)."""

    def __init__(self, features: Iterable[FeatureId]):
        self.features: tuple[FeatureId, ...] = tuple(sorted(set(features)))
        self.index = {f: i for i, f in enumerate(self.features)}

    def __len__(self):
        return len(self.features)

    def __contains__(self, f):
        return f in self.index

    def __getitem__(self, f: FeatureId) -> int:
        return self.index[f]

    def feature(self, i: int) -> FeatureId:
        return self.features[i]


def build_vocabulary(vectors: Iterable[FeatureVector]) -> Vocabulary:
    return Vocabulary(f for v in vectors for f in v.active)
