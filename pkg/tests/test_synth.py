from __future__ import annotations

import math
from collections import Counter

import pytest
from scipy.stats import chisquare

from focalner.corpus import Corpus, format_corpus, serialize_sentence, split_corpus, validate_corpus
from focalner.eval import subtype_accuracy
from focalner.features import ContextWindow, corpus_vectors
from focalner.induction import induce_rules
from focalner.synth import (NEWS_COUNTS, NEWS_DISTRIBUTION, BadTemplate, GeneratorSpec, generate,
                            load_spec, load_templates, parse_spec, parse_templates)
from focalner.tagger import Tagger


def labels(corpus):
    return Counter(s.label for d in corpus.documents for _, s in d.spans() if s.main_type == "gsp")


def test_distribution_matches_counts():
    assert sum(NEWS_COUNTS.values()) == 1878
    assert NEWS_DISTRIBUTION["gsp.pers"] == pytest.approx(7 / 1878)
    assert sum(NEWS_DISTRIBUTION.values()) == pytest.approx(1.0, abs=1e-12)


def test_deterministic_and_within_three_sigma():
    spec = GeneratorSpec(seed=7, n_sentences=1000)
    a = generate(spec)
    assert format_corpus(a) == format_corpus(generate(spec))
    counts = labels(a)
    assert sum(counts.values()) == 1000
    for lab, p in NEWS_DISTRIBUTION.items():
        sigma = math.sqrt(1000 * p * (1 - p))
        assert abs(counts[lab] - 1000 * p) <= 3 * sigma, lab


def test_other_seed_differs():
    assert format_corpus(generate(GeneratorSpec(seed=1, n_sentences=50))) != \
        format_corpus(generate(GeneratorSpec(seed=2, n_sentences=50)))


def test_chi_square_large_sample():
    dist = {"gsp.loc": 0.5, "gsp.pers": 0.2, "gsp.org": 0.3}
    counts = labels(generate(GeneratorSpec(seed=19, n_sentences=10_000, subtype_distribution=dist)))
    keys = sorted(dist)
    _, p = chisquare([counts[k] for k in keys], [10_000 * dist[k] for k in keys])
    assert p > 0.001


def _contains(tokens, cue_tokens):
    n = len(cue_tokens)
    return any(tokens[i:i + n] == cue_tokens for i in range(len(tokens) - n + 1))


def _cue_tokens(template):
    return template.cue.lower().split()


def test_full_reliability_plants_cues():
    templates = load_templates()
    corpus = generate(GeneratorSpec(seed=4, n_sentences=600, cue_reliability=1.0))
    for doc in corpus.documents:
        for sent in doc.sentences:
            (span,) = [s for s in sent.spans if s.main_type == "gsp"]
            if span.sub_type == "loc":
                continue
            toks = serialize_sentence(sent).lower().split()
            cues = [_cue_tokens(t) for t in templates if span.label in t.subtypes]
            assert any(_contains(toks, c) for c in cues), serialize_sentence(sent)


def test_zero_reliability_collapses_to_baseline(lex):
    templates = load_templates()
    corpus = generate(GeneratorSpec(seed=4, n_sentences=2000, cue_reliability=0.0))
    cues = [_cue_tokens(t) for t in templates if t.cue]
    for doc in corpus.documents:
        for sent in doc.sentences:
            toks = serialize_sentence(sent).lower().split()
            assert not any(_contains(toks, c) for c in cues)
    train, test = split_corpus(corpus, 0.8, 0)
    rules = induce_rules(corpus_vectors(train, lex, ContextWindow()), corpus.schema)
    hyp = Corpus(tuple(Tagger(lex, rules).resolve(d)[0] for d in test.documents), corpus.schema)
    base = Corpus(tuple(Tagger(lex, {}).resolve(d)[0] for d in test.documents), corpus.schema)
    assert abs(subtype_accuracy(test, hyp) - subtype_accuracy(test, base)) <= 0.01


def test_generated_corpora_validate():
    corpus = generate(GeneratorSpec(seed=8, n_sentences=300))
    assert validate_corpus(corpus) == []
    assert len(corpus.documents) == 30


class TestSpecValidation:
    @pytest.mark.parametrize("kwargs", [
        {"subtype_distribution": {"gsp.loc": 0.5, "gsp.org": 0.4}},
        {"subtype_distribution": {"gsp.loc": 1.2, "gsp.org": -0.2}},
        {"cue_reliability": 1.5},
        {"cue_overlap": -0.1},
        {"n_sentences": -1},
    ])
    def test_rejected(self, kwargs):
        with pytest.raises(ValueError):
            GeneratorSpec(**kwargs)

    def test_unknown_label(self):
        with pytest.raises(BadTemplate):
            generate(GeneratorSpec(n_sentences=5, subtype_distribution={"gsp.xyz": 1.0}))


class TestTemplates:
    def test_missing_slot(self):
        with pytest.raises(BadTemplate):
            parse_templates("gsp.org\t{CUE} un accord .\ta signé\n")

    def test_neutral_with_cue(self):
        with pytest.raises(BadTemplate):
            parse_templates("neutral\t{NE} {CUE} .\ta signé\n")

    def test_columns(self):
        with pytest.raises(BadTemplate):
            parse_templates("gsp.org\t{NE} {CUE} .\n")

    def test_shared(self):
        (t,) = parse_templates("gsp.pers|gsp.org\t{NE} {CUE} .\taffirme\n")
        assert t.shared and t.subtypes == ("gsp.pers", "gsp.org")


def test_spec_file(tmp_path):
    (tmp_path / "t.tsv").write_text("gsp.org\t{NE} {CUE} un accord .\ta signé\nneutral\tvoici {NE} .\t-\n",
                                    encoding="utf-8")
    path = tmp_path / "spec.txt"
    path.write_text("seed = 5\nn_sentences = 20\ndistribution = gsp.loc:3, gsp.org:1\n"
                    "cue_reliability = 0.8\ntemplates = t.tsv\n", encoding="utf-8")
    spec, tpl = load_spec(path)
    assert spec.subtype_distribution == {"gsp.loc": 0.75, "gsp.org": 0.25}
    assert tpl == (tmp_path / "t.tsv").resolve()
    corpus = generate(spec, tpl)
    assert sum(labels(corpus).values()) == 20


def test_spec_unknown_key():
    with pytest.raises(ValueError):
        parse_spec("seed = 1\ncolour = blue\n")
