from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from focalner.corpus import AnnotatedSpan, default_schema
from focalner.features import ContextWindow, FeatureId, FeatureVector, corpus_vectors
from focalner.induction import (DomainError, FeatureStats, MissingGold, Rule, RuleSet,
                                RulesFormatError, ZeroSupport, count_feature_stats,
                                discriminative_power, format_rules, hypergeom_tail, induce_rules,
                                parse_rules, rule_stats, specificity_score)
from focalner.synth import GeneratorSpec, generate
from oracles import exact_tail

A, B, C_ = FeatureId("LEMMA", "a:left"), FeatureId("LEMMA", "b:left"), FeatureId("CLUST", "c")


def vec(features, gold, i=0):
    return FeatureVector(f"d{i}", 0, AnnotatedSpan(0, 0, "gsp"), frozenset(features), gold)


class TestHypergeomTail:
    def test_over_example(self):
        assert hypergeom_tail(3, 4, 5, 20, "over") == pytest.approx(496 / 15504, abs=1e-12)

    def test_whole_support(self):
        assert hypergeom_tail(0, 4, 5, 20, "over") == 1.0

    def test_under_example(self):
        assert hypergeom_tail(0, 4, 5, 20, "under") == pytest.approx(4368 / 15504, abs=1e-12)

    @pytest.mark.parametrize("args", [(1, 4, 5, 3), (-1, 4, 5, 20), (5, 4, 5, 20), (1, 21, 5, 20),
                                      (0, 4, -1, 20), (1.5, 4, 5, 20)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            hypergeom_tail(*args)

    def test_bad_direction(self):
        with pytest.raises(DomainError):
            hypergeom_tail(0, 1, 1, 2, "both")

    def test_broadcasting(self):
        got = hypergeom_tail(np.array([0, 3, 4]), 4, 5, 20)
        want = [1.0, 496 / 15504, float(exact_tail(4, 4, 5, 20, "over"))]
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_exact_rational_sample(self):
        rng = random.Random(5)
        for _ in range(300):
            N = rng.randint(1, 400)
            K, n = rng.randint(0, N), rng.randint(0, N)
            k = rng.randint(0, min(K, n))
            for d in ("over", "under"):
                assert abs(Fraction(hypergeom_tail(k, K, n, N, d)) - exact_tail(k, K, n, N, d)) <= 1e-12

    def test_large_population(self):
        # far beyond float range for plain binomial coefficients
        N, K, n = 100_000, 300, 2_000
        assert hypergeom_tail(0, K, n, N, "over") == 1.0
        expected = K * n / N
        assert hypergeom_tail(round(expected), K, n, N, "over") == pytest.approx(0.5, abs=0.1)
        assert 0.0 <= hypergeom_tail(60, K, n, N, "over") < 1e-20

    def test_complement_identity(self):
        rng = np.random.default_rng(11)
        N = rng.integers(1, 5000, 1000)
        K = rng.integers(0, N + 1)
        n = rng.integers(0, N + 1)
        hi = np.minimum(K, n)
        keep = hi >= 1
        N, K, n, hi = N[keep], K[keep], n[keep], hi[keep]
        k = rng.integers(1, hi + 1)
        total = hypergeom_tail(k, K, n, N, "over") + hypergeom_tail(k - 1, K, n, N, "under")
        assert len(k) >= 900
        np.testing.assert_allclose(total, 1.0, rtol=0, atol=1e-12)

    def test_over_tail_non_increasing(self):
        for N, K, n in [(20, 4, 5), (200, 77, 130), (3000, 40, 900)]:
            tails = hypergeom_tail(np.arange(min(K, n) + 1), K, n, N, "over")
            assert np.all(np.diff(tails) <= 1e-15)


class TestSpecificity:
    def test_over(self):
        s = specificity_score(FeatureStats(A, "org", 3, 5, 4, 20))
        assert s.direction == "over"
        assert s.p_level == pytest.approx(496 / 15504, abs=1e-12)

    def test_absent_feature(self):
        s = specificity_score(FeatureStats(A, "org", 0, 5, 0, 20))
        assert (s.direction, s.p_level) == ("over", 1.0)

    def test_under(self):
        s = specificity_score(FeatureStats(A, "org", 0, 5, 4, 20))
        assert s.direction == "under"
        assert s.p_level == pytest.approx(4368 / 15504, abs=1e-12)

    def test_inconsistent_counts(self):
        with pytest.raises(DomainError):
            FeatureStats(A, "org", 6, 5, 4, 20)

    def test_scaling_keeps_direction(self):
        rng = random.Random(3)
        for _ in range(500):
            T = rng.randint(1, 300)
            t, F = rng.randint(0, T), rng.randint(0, T)
            f = rng.randint(max(0, t + F - T), min(t, F))
            a = specificity_score(FeatureStats(A, "x", f, t, F, T))
            b = specificity_score(FeatureStats(A, "x", 2 * f, 2 * t, 2 * F, 2 * T))
            assert a.direction == b.direction


class TestCounting:
    def test_example(self):
        vs = [vec({A}, "org", 0), vec({A}, "org", 1), vec({A}, "loc", 2), vec(set(), "loc", 3)]
        rows = {(r.feature, r.category): r for r in count_feature_stats(vs)}
        r = rows[(A, "org")]
        assert (r.f, r.t, r.F, r.T) == (2, 2, 3, 4)

    def test_empty(self):
        assert count_feature_stats([]) == []

    def test_missing_gold(self):
        with pytest.raises(MissingGold):
            count_feature_stats([vec({A}, None)])


class TestDiscriminativePower:
    def test_fraction(self):
        vs = [vec({A, B}, "org", i) for i in range(6)] + [vec({A, B}, "loc", i) for i in range(2)]
        vs += [vec({A}, "org", 9)]
        assert discriminative_power((A, B), "org", vs) == (0.75, 8)

    def test_zero_numerator(self):
        vs = [vec({A}, "loc", i) for i in range(3)]
        assert discriminative_power(A, "org", vs) == (0.0, 3)

    def test_zero_support(self):
        with pytest.raises(ZeroSupport):
            discriminative_power(B, "org", [vec({A}, "org")])


def toy_vectors(seed=0):
    """A on all 10 org vectors and 1 of 40 loc vectors; B random."""
    rng = random.Random(seed)
    out = []
    for i in range(50):
        gold = "org" if i < 10 else "loc"
        feats = set()
        if gold == "org" or i == 10:
            feats.add(A)
        if rng.random() < 0.5:
            feats.add(B)
        out.append(vec(feats, gold, i))
    return out


class TestInduce:
    def test_toy_cover(self):
        (rule,) = induce_rules(toy_vectors(), default_schema())["gsp"].rules
        assert rule.features == (A,) and rule.target == "org"
        assert rule.support == 11 and rule.disc_power == pytest.approx(10 / 11)

    def test_toy_cover_many_seeds(self):
        for seed in range(20):
            rs = induce_rules(toy_vectors(seed), default_schema())["gsp"]
            assert all(B not in r.features for r in rs.rules)
            assert any(r.features == (A,) and r.target == "org" for r in rs.rules)

    def test_empty(self):
        assert induce_rules([], default_schema()) == {}

    def test_alpha_zero(self):
        assert len(induce_rules(toy_vectors(), default_schema(), alpha=0.0)["gsp"]) == 0

    def test_conjunction_needed(self):
        # neither A nor B alone separates org; together they do
        vs = []
        for i in range(40):
            a, b = i % 2 == 0, (i // 2) % 2 == 0
            vs.append(vec({f for f, on in ((A, a), (B, b)) if on} | {C_}, "org" if a and b else "loc", i))
        rules = induce_rules(vs, default_schema(), min_dp=0.9)["gsp"].rules
        assert [(r.features, r.target) for r in rules] == [((A, B), "org")]

    def test_default_subtype_never_targeted(self):
        rules = induce_rules(toy_vectors(), default_schema(), min_dp=0.0)["gsp"].rules
        assert all(r.target != "loc" for r in rules)

    def test_ranked(self):
        rules = induce_rules(toy_vectors(), default_schema(), min_dp=0.0)["gsp"].rules
        assert list(rules) == sorted(rules, key=Rule.sort_key)


@pytest.fixture(scope="module")
def trained(lex):
    corpus = generate(GeneratorSpec(seed=3, n_sentences=1500))
    vectors = corpus_vectors(corpus, lex, ContextWindow())
    return vectors, induce_rules(vectors, corpus.schema)


def test_deterministic(trained, lex):
    vectors, rulesets = trained
    again = induce_rules(list(vectors), default_schema())
    assert format_rules(again) == format_rules(rulesets)


def test_self_consistency(trained):
    vectors, rulesets = trained
    assert rulesets["gsp"].rules
    for rule in rulesets["gsp"].rules:
        assert rule_stats(rule, vectors) == (rule.p_level, rule.disc_power, rule.support)


class TestRulesFile:
    def test_round_trip(self, trained):
        _, rulesets = trained
        text = format_rules(rulesets, {"radius": 5})
        assert parse_rules(text) == rulesets
        assert format_rules(parse_rules(text), {"radius": 5}) == text

    def test_header(self, trained):
        _, rulesets = trained
        assert format_rules(rulesets).splitlines()[0] == \
            "#rules alpha=0.05 min_support=3 max_order=2 min_dp=0.6"

    def test_hand_written(self):
        rs = parse_rules("gsp\tVCLASS_GOV:refusal\tdipl\t0.001\t0.9\t12\n")["gsp"]
        assert rs.rules == (Rule((FeatureId("VCLASS_GOV", "refusal"),), "dipl", 0.001, 0.9, 12),)

    @pytest.mark.parametrize("line", ["gsp\tLEMMA:x\torg\t0.1\t0.9\n", "gsp\tBOGUS:x\torg\t0.1\t0.9\t3\n",
                                      "gsp\tLEMMA:x\torg\tabc\t0.9\t3\n"])
    def test_malformed(self, line):
        with pytest.raises(RulesFormatError):
            parse_rules(line)

    def test_ruleset_first_match(self):
        r1 = Rule((A, B), "org", 0.01, 0.9, 5)
        r2 = Rule((A,), "pers", 0.02, 0.8, 9)
        rs = RuleSet("gsp", (r1, r2))
        assert rs.first_match({A}) is r2
        assert rs.first_match({A, B}) is r1
        assert rs.first_match({B}) is None
