"""Named-entity tagging with context-driven resolution of metonymic readings."""

from .corpus import (AnnotatedSpan, Corpus, Document, Sentence, TagSchema, Token, default_schema,
                     parse_inline, read_corpus, serialize_inline, split_corpus, tokenize,
                     validate_document)
from .features import ContextWindow, FeatureId, FeatureVector, build_vocabulary, extract_features
from .induction import RuleSet, hypergeom_tail, induce_rules, read_rules, write_rules
from .lexicon import LexiconSet, default_lexicons, load_lexicons
from .tagger import EntityBundle, Tagger, baseline_tag, tag_document

__version__ = "0.1.0"
