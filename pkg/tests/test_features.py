from __future__ import annotations

import random

import pytest

from focalner.corpus import AnnotatedSpan, Document, Sentence, Token, parse_inline
from focalner.features import (ContextWindow, FeatureId, SpanOutOfRange, build_vocabulary,
                               corpus_vectors, extract_features)
from focalner.synth import GeneratorSpec, generate

W = ContextWindow(5)


def active(lex, schema, raw, window=W):
    doc = parse_inline(raw, schema)
    (si, span), = [(i, s) for i, sent in enumerate(doc.sentences) for s in sent.spans]
    return {str(f) for f in extract_features(doc, si, span, window, lex).active}


class TestExamples:
    def test_speech_verb_subject(self, lex, schema):
        got = active(lex, schema, "La <gsp> France </gsp> a signé un accord .")
        assert {"VCLASS_GOV:communication", "SUBJ_OF_HUMAN_VERB"} <= got

    def test_locative_trigger(self, lex, schema):
        got = active(lex, schema, "Ils se sont retrouvés en <gsp> France </gsp> .")
        assert "TRIG:loc_prep:left" in got

    def test_town_with_country(self, lex, schema):
        got = active(lex, schema, "Paris , <gsp> France </gsp> .")
        assert "FINER_LOC_COOC" in got

    def test_feeling_np(self, lex, schema):
        got = active(lex, schema, "L' amitié entre la <gsp> France </gsp> et ses voisins .")
        assert "FEELING_NP" in got

    def test_cooccurring_entity(self, lex, schema):
        doc = parse_inline("<gsp> France </gsp> et <pers> Jean </pers> .", schema)
        fv = extract_features(doc, 0, doc.sentences[0].spans[0], W, lex)
        assert FeatureId("COOC_NE", "pers") in fv.active

    def test_lemma_sides(self, lex, schema):
        got = active(lex, schema, "La <gsp> France </gsp> gagne .")
        assert {"LEMMA:le:left", "POS:DET:left", "POS:PUNC:right"} <= got
        assert not any(f.startswith("LEMMA:france") for f in got)

    def test_radius_limits_context(self, lex, schema):
        got = active(lex, schema, "En un deux trois <gsp> France </gsp> .", ContextWindow(3))
        assert "TRIG:loc_prep:left" not in got

    def test_sentence_bounded(self, lex, schema):
        raw = "Il part en voiture .\n<gsp> France </gsp> gagne ."
        assert "LEMMA:voiture:left" not in active(lex, schema, raw)
        assert "LEMMA:voiture:left" in active(lex, schema, raw, ContextWindow(5, False))


def test_span_out_of_range(lex, schema):
    doc = parse_inline("La France gagne .", schema)
    with pytest.raises(SpanOutOfRange):
        extract_features(doc, 0, AnnotatedSpan(3, 9, "gsp"), W, lex)
    with pytest.raises(SpanOutOfRange):
        extract_features(doc, 4, AnnotatedSpan(0, 0, "gsp"), W, lex)


class TestVocabulary:
    def test_shared_feature_once(self, lex, schema):
        doc = parse_inline("La <gsp.loc> France </gsp.loc> gagne et la <gsp.org> Italie </gsp.org> perd .", schema)
        vecs = corpus_vectors([doc], lex, W, schema=schema)
        voc = build_vocabulary(vecs)
        assert len(voc) == len({f for v in vecs for f in v.active})
        assert [voc.feature(i) for i in range(len(voc))] == sorted(voc.features)

    def test_empty(self):
        assert len(build_vocabulary([])) == 0

    def test_deterministic(self, lex, schema):
        doc = parse_inline("La <gsp.loc> France </gsp.loc> gagne .", schema)
        vecs = corpus_vectors([doc], lex, W, schema=schema)
        assert build_vocabulary(vecs).index == build_vocabulary(list(reversed(vecs))).index


def test_corpus_vectors_carry_gold(lex, schema):
    doc = parse_inline("La <gsp.org> France </gsp.org> a signé . <pers> Jean </pers> part .", schema)
    vecs = corpus_vectors([doc], lex, W, schema=schema)
    assert [v.gold_subtype for v in vecs] == ["org"]


# -- locality -------------------------------------------------------------

def _window_keys(doc, si, span, window):
    from focalner.features import _window_positions

    return set(_window_positions(doc, si, span, window))


def _mutate(doc: Document, keep: set, rng: random.Random, vocab, all_outside: bool) -> Document:
    outside = [(s, t) for s, sent in enumerate(doc.sentences)
               for t in range(len(sent.tokens)) if (s, t) not in keep]
    if not outside:
        return doc
    targets = set(outside) if all_outside else {rng.choice(outside)}
    sents = []
    for s, sent in enumerate(doc.sentences):
        toks = tuple(Token(rng.choice(vocab), tok.char_start, tok.char_end, tok.sent_index)
                     if (s, t) in targets else tok for t, tok in enumerate(sent.tokens))
        sents.append(Sentence(toks, sent.spans))
    return Document(doc.doc_id, tuple(sents), doc.source_uri)


def test_locality_randomized(lex, schema):
    """Changing tokens outside the window never changes the features."""
    rng = random.Random(2024)
    corpus = generate(GeneratorSpec(seed=11, n_sentences=400, sentences_per_doc=4))
    vocab = sorted(set(lex.morph) | {w for e in lex.gazetteer for w in e.phrase})
    windows = [ContextWindow(r, b) for r in (1, 2, 3, 5) for b in (True, False)]
    for trial in range(500):
        doc = rng.choice(corpus.documents)
        si = rng.randrange(len(doc.sentences))
        n = len(doc.sentences[si].tokens)
        first = rng.randrange(n)
        span = AnnotatedSpan(first, min(n - 1, first + rng.randrange(3)), "gsp")
        window = windows[trial % len(windows)]
        before = extract_features(doc, si, span, window, lex)
        keep = _window_keys(doc, si, span, window)
        after = extract_features(_mutate(doc, keep, rng, vocab, trial % 2 == 0), si, span, window, lex)
        assert after == before, (trial, doc.doc_id, si, span, window)
