"""Information-rate estimation for spelling channels.

The channel emits one matrix selection per step.  The user's intended text
is modelled as words drawn i.i.d. from the knowledge base's word-frequency
(unigram) distribution, joined by spaces, and an error-free simulated user
spells that stream.  At every selection the estimator records the model
probability ``q_t`` of the selected symbol and the instantaneous channel
alphabet size ``sigma_t`` (the number of filled matrix cells).  Over the
``n`` selections of one run:

    r_n = (sum_t -log2 q_t) / n        information rate, bits/selection
    R_n = (sum_t log2 sigma_t) / n     absolute rate, bits/selection
    D_n = R_n - r_n                    absolute redundancy

and the reported figures average the runs.

``q_t`` is the true conditional probability of the selection given the
history, so the per-word product of the ``q_t`` telescopes to the word's
unigram probability and ``sum_t -log2 q_t`` equals the negative log
probability of the whole selection trajectory: ``r_n`` is an unbiased
estimate of the per-selection entropy of the selection process.

The adaptive speller needs one piece of bookkeeping for that to hold: an
error-free user takes a prediction as soon as the intended word is offered,
so declining a prediction reveals the intended word is none of the offered
ones.  Declined predictions that are still consistent with the typed
fragment are therefore excluded words whose mass leaves the denominator.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from math import fsum, log2
from statistics import stdev
from typing import Iterator

import numpy as np

from polyspell.engine import EngineConfig, matrix_total, prediction_words
from polyspell.kb import KnowledgeBase
from polyspell.metrics import mean_exact

SPELLER_POLY = "poly"
SPELLER_STATIC = "static"
SPELLERS = (SPELLER_POLY, SPELLER_STATIC)


@dataclass(frozen=True)
class RateEstimate:
    """Monte-Carlo rate estimate of a spelling channel."""

    r_n: float  # information rate, bits per selection
    R_n: float  # absolute rate, bits per selection
    D_n: float  # absolute redundancy, R_n - r_n
    n: int  # selections per run
    runs: int
    std_error: float  # standard error of r_n across runs


class WordSampler:
    """I.i.d. draws from the knowledge base's word unigram distribution."""

    def __init__(self, kb: KnowledgeBase) -> None:
        pairs = list(kb.words.iter_words())
        if not pairs:
            raise ValueError("knowledge base has no words")
        self.words = [word for word, _ in pairs]
        self.cumulative = np.cumsum([count for _, count in pairs])
        self.total = int(self.cumulative[-1])

    def stream(self, rng: np.random.Generator) -> Iterator[str]:
        while True:
            k = int(rng.integers(0, self.total))
            yield self.words[int(np.searchsorted(self.cumulative, k, side="right"))]


def poly_run(
    kb: KnowledgeBase,
    words: Iterator[str],
    n: int,
    config: EngineConfig,
    trace: list | None = None,
) -> tuple[float, Counter]:
    """One adaptive-speller run of ``n`` selections over the word stream.

    Returns ``(sum_t -log2 q_t, Counter of sigma_t values)``.  The optional
    ``trace`` list receives one dict per selection for cross-checking
    against the full engine.
    """
    trie = kb.words
    store = kb.sentences
    snode = store.node("")  # position of the spelled stream in the sentence trie
    n_mand = len(config.mandatory)
    bits: list[float] = []
    sigmas: Counter[int] = Counter()
    target: str | None = None  # drawn lazily: None means a word just completed
    fragment = ""  # typed prefix of the current target word
    rejected: dict[str, int] = {}  # declined predictions still extending fragment

    for _ in range(n):
        if target is None:
            target = next(words)
        base = len(trie.char_candidates(fragment)) + n_mand
        offered: list[str] = []
        if config.predictions:
            available = trie.nwords_with_prefix(fragment)
            _, _, n_pred = matrix_total(base, config.p_sharp, available)
            if n_pred:
                if snode is not None:
                    completions = store.word_completions(snode, fragment)
                    context = sorted(completions.items(), key=lambda kv: (-kv[1], kv[0]))
                else:
                    context = []
                offered = prediction_words(kb, context, fragment, n_pred)
                if len(offered) != n_pred:
                    raise AssertionError("prediction bookkeeping out of sync")
        sigma = base + len(offered)
        sigmas[sigma] += 1

        mass = trie.total_with_prefix(fragment) - sum(rejected.values())
        if target in offered:
            numerator = trie.word_count(target)
            selected = ("prediction", target)
            appended = target[len(fragment) :] + "_"
            fragment, rejected, target = "", {}, None
        elif len(fragment) == len(target):
            numerator = trie.word_count(target)
            selected = ("mandatory", "_")
            appended = "_"
            fragment, rejected, target = "", {}, None
        else:
            extension = trie.label_extension(fragment, target[len(fragment)])
            grown = fragment + extension
            if not target.startswith(grown):
                raise AssertionError("label selection left the target's path")
            survivors = {p: trie.word_count(p) for p in offered if p.startswith(grown)}
            for word, count in rejected.items():
                if word.startswith(grown):
                    survivors[word] = count
            numerator = trie.total_with_prefix(grown) - sum(survivors.values())
            selected = ("character", extension)
            appended = extension
            fragment, rejected = grown, survivors
        bits.append(log2(mass) - log2(numerator))
        if trace is not None:
            trace.append(
                {
                    "offered": tuple(offered),
                    "sigma": sigma,
                    "selected": selected,
                    "q": (numerator, mass),
                }
            )
        if snode is not None:
            for ch in appended:
                snode = snode.children.get(ch)
                if snode is None:
                    break
    return fsum(bits), sigmas


def static_run(
    kb: KnowledgeBase, words: Iterator[str], n: int, sigma: int
) -> tuple[float, Counter]:
    """One fixed-grid run: every selection is a single character whose model
    probability is the next-character probability under the word unigram."""
    trie = kb.words
    bits: list[float] = []
    target: str | None = None
    fragment = ""
    for _ in range(n):
        if target is None:
            target = next(words)
        denominator = trie.total_with_prefix(fragment)
        if len(fragment) == len(target):
            bits.append(log2(denominator) - log2(trie.word_count(target)))
            fragment, target = "", None
        else:
            grown = fragment + target[len(fragment)]
            bits.append(log2(denominator) - log2(trie.total_with_prefix(grown)))
            fragment = grown
    return fsum(bits), Counter({sigma: n})


def _mean_log_sigma(sigmas: Counter, n: int) -> float:
    if len(sigmas) == 1:
        ((sigma, count),) = sigmas.items()
        if count != n:
            raise AssertionError("sigma tally does not cover every selection")
        return log2(sigma)
    return fsum(count * log2(sigma) for sigma, count in sigmas.items()) / n


def estimate_rates(
    kb: KnowledgeBase,
    speller: str = SPELLER_POLY,
    predictions: bool = True,
    n: int = 1000,
    runs: int = 32,
    seed: int | None = None,
    p_sharp: int = 4,
) -> RateEstimate:
    """Monte-Carlo estimate of the channel's information rate, absolute
    rate, and redundancy at ``n`` selections per run."""
    if speller not in SPELLERS:
        raise ValueError(f"unknown speller {speller!r}; expected one of {SPELLERS}")
    if n < 1:
        raise ValueError("n must be at least 1")
    if runs < 1:
        raise ValueError("runs must be at least 1")
    sampler = WordSampler(kb)
    config = EngineConfig(p_sharp=p_sharp, predictions=predictions, learn=False)
    r_values: list[float] = []
    big_r_values: list[float] = []
    for child in np.random.SeedSequence(seed).spawn(runs):
        rng = np.random.default_rng(child)
        stream = sampler.stream(rng)
        if speller == SPELLER_STATIC:
            bits, sigmas = static_run(kb, stream, n, kb.alphabet.channel_size)
        else:
            bits, sigmas = poly_run(kb, stream, n, config)
        r_values.append(bits / n)
        big_r_values.append(_mean_log_sigma(sigmas, n))
    r_n = mean_exact(r_values)
    big_r_n = mean_exact(big_r_values)
    std_error = stdev(r_values) / math.sqrt(runs) if runs > 1 else 0.0
    return RateEstimate(
        r_n=r_n, R_n=big_r_n, D_n=big_r_n - r_n, n=n, runs=runs, std_error=std_error
    )
