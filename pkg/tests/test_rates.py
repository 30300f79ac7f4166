"""Information-rate estimator: telescoping, engine agreement, exact oracles."""

from __future__ import annotations

import math
from collections import Counter

import pytest

from helpers import engine_replay, poly_selection_entropy, static_selection_entropy
from polyspell.engine import EngineConfig
from polyspell.kb import KnowledgeBase
from polyspell.rates import (
    RateEstimate,
    WordSampler,
    estimate_rates,
    poly_run,
    static_run,
)


def kb_with_words(counts: dict[str, int]) -> KnowledgeBase:
    kb = KnowledgeBase()
    for word, count in counts.items():
        kb.add_word(word, count)
    return kb


def kb_with_sentences(counts: dict[str, int]) -> KnowledgeBase:
    kb = KnowledgeBase()
    for text, count in counts.items():
        kb.add_sentence(text, count)
    return kb


def oracle_kb() -> KnowledgeBase:
    # five words (aa:6, ab:4, ac:3, ad:3, ae:2) with live sentence context
    return kb_with_sentences({"aa_ab.": 4, "ac_ad.": 3, "ae_aa.": 2})


class TestPolyRunBookkeeping:
    def test_declined_predictions_leave_the_denominator(self):
        kb = kb_with_words({"aa": 10, "ab": 8, "ac": 6, "ad": 4, "ae": 2})
        config = EngineConfig(p_sharp=1, learn=False)
        trace: list = []
        bits, sigmas = poly_run(kb, iter(["ae", "aa"]), 4, config, trace)
        assert [t["selected"] for t in trace] == [
            ("character", "a"),
            ("character", "e"),
            ("prediction", "ae"),
            ("prediction", "aa"),
        ]
        # q per step: 2/30 (all four offered words declined), then certainty
        # twice (the declined mass leaves the denominator), then 10/30
        assert [t["q"] for t in trace] == [(2, 30), (2, 2), (2, 2), (10, 30)]
        assert bits == pytest.approx(math.log2(45), rel=1e-12)
        assert sigmas == Counter({9: 2, 12: 1, 5: 1})

    def test_word_probabilities_telescope(self):
        kb = oracle_kb()
        config = EngineConfig(p_sharp=1, learn=False)
        # a stream long enough for 12 selections; count selections per word
        stream = ["ae", "ab", "aa", "ac", "ad", "aa", "ab", "ae"] * 2
        trace: list = []
        bits, _ = poly_run(kb, iter(stream), 12, config, trace)
        # find how many whole words the 12 selections covered
        completed = sum(
            1 for t in trace if t["selected"][0] in ("prediction", "mandatory")
        )
        partial_bits = 0.0
        if trace[-1]["selected"][0] == "character":
            # the last word is unfinished: its accumulated bits so far
            idx = len(trace)
            while idx > 0 and trace[idx - 1]["selected"][0] == "character":
                idx -= 1
            partial_bits = math.fsum(
                math.log2(t["q"][1]) - math.log2(t["q"][0]) for t in trace[idx:]
            )
        total = kb.words.total
        expected_whole = math.fsum(
            -math.log2(kb.words.word_count(w) / total) for w in stream[:completed]
        )
        assert bits == pytest.approx(expected_whole + partial_bits, rel=1e-9)

    def test_static_run_telescopes_to_unigram(self):
        kb = oracle_kb()
        # "aa" + "_" costs 3 selections; two whole words in 6 selections
        bits, sigmas = static_run(kb, iter(["aa", "ab", "ac"]), 6, 31)
        total = kb.words.total
        expected = -math.log2(6 / total) - math.log2(4 / total)
        assert bits == pytest.approx(expected, rel=1e-12)
        assert sigmas == Counter({31: 6})


class TestEngineAgreement:
    @pytest.mark.parametrize("predictions", [True, False])
    @pytest.mark.parametrize("p_sharp", [1, 2, 4])
    def test_lean_run_matches_full_engine(self, predictions, p_sharp):
        kb = kb_with_sentences(
            {
                "alpha_beta_gamma.": 3,
                "alpha_delta.": 2,
                "beta_beta_alpha.": 1,
            }
        )
        stream = ["beta", "alpha", "gamma", "delta", "beta", "alpha"] * 10
        n = 40
        config = EngineConfig(p_sharp=p_sharp, predictions=predictions, learn=False)
        trace: list = []
        poly_run(kb, iter(stream), n, config, trace)
        engine_steps = engine_replay(kb, stream, n, predictions, p_sharp)
        assert len(engine_steps) == n
        for lean, (offered, sigma, identity) in zip(trace, engine_steps):
            assert lean["offered"] == offered
            assert lean["sigma"] == sigma
            assert lean["selected"] == identity


class TestEstimateRates:
    def test_static_absolute_rate_is_exactly_log2_31(self):
        kb = oracle_kb()
        est = estimate_rates(kb, speller="static", n=50, runs=8, seed=1)
        assert est.R_n == math.log2(31)
        assert est.D_n == est.R_n - est.r_n

    def test_single_word_kb_carries_no_information(self):
        kb = kb_with_words({"ab": 7})
        for speller, predictions in [("poly", True), ("poly", False), ("static", True)]:
            est = estimate_rates(kb, speller=speller, predictions=predictions, n=9, runs=4, seed=0)
            assert est.r_n == 0.0
            assert est.D_n == est.R_n

    def test_determinism_and_shape(self):
        kb = oracle_kb()
        a = estimate_rates(kb, n=30, runs=6, seed=42)
        b = estimate_rates(kb, n=30, runs=6, seed=42)
        assert a == b
        assert isinstance(a, RateEstimate)
        assert (a.n, a.runs) == (30, 6)
        assert 0.0 < a.r_n < a.R_n
        assert a.std_error > 0.0

    def test_single_run_has_zero_std_error(self):
        est = estimate_rates(oracle_kb(), n=10, runs=1, seed=5)
        assert est.std_error == 0.0

    def test_validation(self):
        kb = oracle_kb()
        with pytest.raises(ValueError):
            estimate_rates(KnowledgeBase())
        with pytest.raises(ValueError):
            estimate_rates(kb, speller="sonic")
        with pytest.raises(ValueError):
            estimate_rates(kb, n=0)
        with pytest.raises(ValueError):
            estimate_rates(kb, runs=0)

    def test_sampler_matches_unigram(self):
        kb = oracle_kb()
        sampler = WordSampler(kb)
        assert sampler.total == kb.words.total
        import numpy as np

        rng = np.random.default_rng(0)
        draws = Counter(w for w, _ in zip(sampler.stream(rng), range(6000)))
        for word, count in kb.words.iter_words():
            assert draws[word] / 6000 == pytest.approx(count / sampler.total, abs=0.03)


class TestExactOracles:
    def test_monte_carlo_matches_enumeration_poly(self):
        kb = oracle_kb()
        exact = poly_selection_entropy(kb, n=5, predictions=True, p_sharp=1)
        est = estimate_rates(
            kb, speller="poly", predictions=True, n=5, runs=2000, seed=11, p_sharp=1
        )
        assert est.r_n == pytest.approx(exact, rel=0.03)

    def test_monte_carlo_matches_enumeration_static(self):
        kb = oracle_kb()
        exact = static_selection_entropy(kb, n=4)
        est = estimate_rates(kb, speller="static", n=4, runs=2000, seed=3)
        assert est.r_n == pytest.approx(exact, rel=0.03)
