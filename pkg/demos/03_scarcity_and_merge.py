"""
Too few examples, and readings that look alike
===============================================

Two situations where subtype rules cannot help much.

1. With the class balance of a real broadcast-news sample (1486 gsp.loc,
   7 gsp.pers, 385 gsp.org), the population reading is too rare for any
   rule to reach the minimum support.
2. When the population and organisation readings share most of their
   contexts, they are confused with each other. Merging them into one
   "human group" reading (gsp.hum) recovers a usable category.
"""

from focalner import default_lexicons
from focalner.corpus import Corpus, split_corpus
from focalner.eval import evaluation_report, merge_subtypes, parse_merge
from focalner.features import ContextWindow, corpus_vectors
from focalner.induction import induce_rules
from focalner.synth import GeneratorSpec, generate
from focalner.tagger import Tagger

lex = default_lexicons()
window = ContextWindow()


def train_and_resolve(train, test):
    rules = induce_rules(corpus_vectors(train, lex, window), train.schema)
    tagger = Tagger(lex, rules, window, train.schema)
    return rules, Corpus(tuple(tagger.resolve(d)[0] for d in test.documents), test.schema)


# -- 1. scarcity ------------------------------------------------------------
corpus = generate(GeneratorSpec(seed=0, n_sentences=1878))
counts = {}
for doc in corpus.documents:
    for _, span in doc.spans():
        counts[span.label] = counts.get(span.label, 0) + 1
print("subtype counts:", {k: v for k, v in sorted(counts.items()) if k.startswith("gsp")})
rules, hyp = train_and_resolve(corpus, corpus)
print("rule targets:", sorted({r.target for r in rules["gsp"].rules}))
print(evaluation_report(corpus, hyp, gold_spans=True).to_text())

# -- 2. overlapping cues ------------------------------------------------------
spec = GeneratorSpec(seed=12, n_sentences=3000, cue_overlap=0.7,
                     subtype_distribution={"gsp.loc": 0.4, "gsp.pers": 0.3, "gsp.org": 0.3})
train, test = split_corpus(generate(spec), 0.8, seed=0)
_, hyp = train_and_resolve(train, test)
print("three readings:")
print(evaluation_report(test, hyp, gold_spans=True).to_text())

merge = parse_merge("gsp.hum")
print("pers and org merged at scoring time:")
print(evaluation_report(test, hyp, gold_spans=True, merge=merge).to_text())

m_train, m_test = merge_subtypes(train, merge), merge_subtypes(test, merge)
_, m_hyp = train_and_resolve(m_train, m_test)
print("pers and org merged before training:")
print(evaluation_report(m_test, m_hyp, gold_spans=True).to_text())
