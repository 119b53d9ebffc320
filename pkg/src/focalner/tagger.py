"""Entity recognition, subtype resolution and focalisation bundles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .chunker import ChunkPattern, default_patterns, pos_sequence
from .corpus import AnnotatedSpan, Document, TagSchema, default_schema
from .features import ContextWindow, extract_features
from .induction import Rule, RuleSet
from .lexicon import LexiconSet, match_gazetteer

MAX_TITLE_NAME = 3


class NoSubtypeSchema(ValueError):
    pass


@dataclass(frozen=True)
class EntityBundle:
    lexical_unit: str
    sem_type: str
    focalisation: str
    span: AnnotatedSpan
    sentence_index: int
    fired_rule: Rule | None = None

    def render(self) -> str:
        return (f"Entity{{ Lexical_unit={self.lexical_unit}; "
                f"Sem{{ Type={self.sem_type}; Focalisation={self.focalisation}; }} }}")


def recognize_entities(doc: Document, lex: LexiconSet, schema: TagSchema | None = None) -> Document:
    """Gazetteer matches plus ``title PROPN{1,3}`` person names.

    Existing spans in ``doc`` are discarded. Gazetteer entities win over
    title-derived spans.
    """
    schema = schema or default_schema()
    new_spans = []
    for sent in doc.sentences:
        surfaces = sent.surfaces
        matches = match_gazetteer(lex, surfaces)
        spans = [AnnotatedSpan(m.first, m.last, m.category) for m in matches
                 if not m.entry.is_trigger and m.category in schema.main_types]
        taken = {i for s in spans for i in range(s.first_token, s.last_token + 1)}
        if "pers" in schema.main_types:
            tags = pos_sequence(lex, surfaces)
            for m in matches:
                if m.trigger_role != "title":
                    continue
                end = m.last
                while (end + 1 < len(tags) and end - m.last < MAX_TITLE_NAME
                       and tags[end + 1] == "PROPN" and end + 1 not in taken):
                    end += 1
                if end > m.last:
                    spans.append(AnnotatedSpan(m.last + 1, end, "pers"))
                    taken.update(range(m.last + 1, end + 1))
        new_spans.append(spans)
    return doc.replace_spans(new_spans)


def resolve_subtype(doc: Document, sentence_index: int, span: AnnotatedSpan, rules: RuleSet | None,
                    lex: LexiconSet, window: ContextWindow, schema: TagSchema | None = None,
                    patterns: Sequence[ChunkPattern] | None = None) -> tuple[str, Rule | None]:
    """Subtype chosen by the first firing rule, else the schema default."""
    schema = schema or default_schema()
    if not schema.has_subtypes(span.main_type):
        raise NoSubtypeSchema(f"{span.main_type!r} has no declared subtypes")
    if rules is not None and rules.main_type != span.main_type:
        raise ValueError(f"rules for {rules.main_type!r} applied to a {span.main_type!r} span")
    if rules is not None and rules.rules:
        fv = extract_features(doc, sentence_index, span, window, lex, patterns)
        rule = rules.first_match(fv.active)
        if rule is not None:
            return rule.target, rule
    return schema.default_subtype[span.main_type], None


@dataclass(frozen=True)
class Tagger:
    lex: LexiconSet
    rulesets: Mapping[str, RuleSet] = field(default_factory=dict)
    window: ContextWindow = ContextWindow()
    schema: TagSchema = field(default_factory=default_schema)
    patterns: tuple[ChunkPattern, ...] = field(default_factory=default_patterns)

    def resolve(self, doc: Document) -> tuple[Document, list[EntityBundle]]:
        """Assign subtypes to the spans already present in ``doc``."""
        new_spans, bundles = [], []
        for si, sent in enumerate(doc.sentences):
            spans = []
            for span in sent.spans:
                rule = None
                sub = None
                if self.schema.has_subtypes(span.main_type):
                    sub, rule = resolve_subtype(doc, si, span, self.rulesets.get(span.main_type),
                                                self.lex, self.window, self.schema, self.patterns)
                resolved = AnnotatedSpan(span.first_token, span.last_token, span.main_type, sub)
                spans.append(resolved)
                bundles.append(EntityBundle(sent.span_text(span), span.main_type,
                                            self.schema.focalisation(span.main_type, sub),
                                            resolved, si, rule))
            new_spans.append(spans)
        return doc.replace_spans(new_spans), bundles

    def tag(self, doc: Document) -> tuple[Document, list[EntityBundle]]:
        return self.resolve(recognize_entities(doc, self.lex, self.schema))

    def baseline(self, doc: Document) -> Document:
        return baseline_tag(doc, self.lex, self.schema)


def tag_document(doc: Document, lex: LexiconSet, rulesets: Mapping[str, RuleSet],
                 window: ContextWindow = ContextWindow(), schema: TagSchema | None = None,
                 patterns: Sequence[ChunkPattern] | None = None) -> tuple[Document, list[EntityBundle]]:
    tagger = Tagger(lex, rulesets, window, schema or default_schema(),
                    tuple(patterns) if patterns is not None else default_patterns())
    return tagger.tag(doc)


def baseline_tag(doc: Document, lex: LexiconSet, schema: TagSchema | None = None) -> Document:
    """Recognize entities and give every subtype-bearing span its default subtype."""
    schema = schema or default_schema()
    recognized = recognize_entities(doc, lex, schema)
    return recognized.replace_spans([
        [AnnotatedSpan(s.first_token, s.last_token, s.main_type, schema.default_subtype.get(s.main_type))
         for s in sent.spans]
        for sent in recognized.sentences
    ])
