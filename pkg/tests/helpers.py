"""Naive reference models used to cross-check the package's data structures.

Everything here is computed by linear scans over plain lists/dicts, with no
shared code with the package beyond the string helpers under test elsewhere.
"""

from __future__ import annotations

import os
import re
from collections import defaultdict

_WORD_RUN = re.compile(r"[a-z']*")


def naive_swp(text: str) -> str:
    match = re.search(r"[a-z']*$", text)
    return match.group() if match else ""


class NaiveWordModel:
    """Word counts in a dict; every query is a full scan."""

    def __init__(self, counts: dict[str, int]):
        self.counts = dict(counts)

    def matching(self, prefix: str) -> dict[str, int]:
        return {w: c for w, c in self.counts.items() if w.startswith(prefix)}

    def char_candidates(self, prefix: str) -> set[str]:
        return {w[len(prefix)] for w in self.matching(prefix) if len(w) > len(prefix)}

    def label_extension(self, prefix: str, char: str) -> str:
        tails = [w[len(prefix) :] for w in self.matching(prefix + char)]
        assert tails, f"{char!r} does not extend {prefix!r}"
        return os.path.commonprefix(tails)

    def distribution(self, prefix: str) -> list[tuple[str, float]]:
        matching = self.matching(prefix)
        total = sum(matching.values())
        return sorted(
            ((w, c / total) for w, c in matching.items()),
            key=lambda item: (-item[1], item[0]),
        )

    def nwords(self, prefix: str) -> int:
        return len(self.matching(prefix))

    def total(self, prefix: str) -> int:
        return sum(self.matching(prefix).values())


def engine_replay(kb, word_list, n, predictions=True, p_sharp=4):
    """Spell a scripted word stream through the real adaptive engine.

    The simulated user is error-free: it takes the prediction carrying the
    intended word as soon as one is offered, otherwise selects the character
    symbol for the word's next letter, and ends a fully-typed word with the
    space symbol.  Returns one record per selection:
    ``(offered_prediction_words, filled_cells, (selected_kind, detail))``.
    """
    from polyspell.engine import EngineConfig, KIND_CHARACTER, KIND_MANDATORY, Speller
    from polyspell.text import swp

    speller = Speller(kb, EngineConfig(predictions=predictions, p_sharp=p_sharp, learn=False))
    targets = iter(word_list)
    target = next(targets, None)
    steps = []
    while len(steps) < n and target is not None:
        matrix = speller.matrix
        offered = tuple(p.word for p in matrix.predictions)
        sigma = matrix.n_filled
        fragment = swp(speller.session.spelled)
        assert target.startswith(fragment)
        if target in offered:
            symbol = matrix.predictions[offered.index(target)]
            speller.select(symbol)
            steps.append((offered, sigma, ("prediction", target)))
            target = next(targets, None)
        elif fragment == target:
            speller.select(matrix.find(KIND_MANDATORY, "_"))
            steps.append((offered, sigma, ("mandatory", "_")))
            target = next(targets, None)
        else:
            record = speller.select(matrix.find(KIND_CHARACTER, target[len(fragment)]))
            steps.append((offered, sigma, ("character", record.delta)))
    return steps


def poly_selection_entropy(kb, n, predictions=True, p_sharp=4):
    """Exact per-selection entropy of the adaptive channel's first ``n``
    selections, by exhaustive enumeration of word sequences.

    The intended text is words drawn i.i.d. from the knowledge base's word
    unigram; the user policy is the error-free one of ``engine_replay``.
    Each word costs at least one selection, so sequences of ``n`` words
    always cover ``n`` selections.  Feasible only for tiny vocabularies.
    """
    from math import fsum, log2

    words = list(kb.words.iter_words())
    total = sum(count for _, count in words)
    mass: dict[tuple, float] = defaultdict(float)

    def extend(prob, sequence):
        steps = engine_replay(kb, sequence, n, predictions, p_sharp)
        if len(steps) >= n:
            mass[tuple(identity for _, _, identity in steps[:n])] += prob
            return
        assert len(sequence) < n, "a word costs at least one selection"
        for word, count in words:
            extend(prob * count / total, sequence + [word])

    extend(1.0, [])
    return -fsum(p * log2(p) for p in mass.values()) / n


def static_selection_entropy(kb, n):
    """Exact per-selection entropy of the fixed-grid channel: the selection
    sequence is simply the first ``n`` characters of the word stream."""
    from math import fsum, log2

    words = list(kb.words.iter_words())
    total = sum(count for _, count in words)
    mass: dict[str, float] = defaultdict(float)

    def extend(prob, text):
        if len(text) >= n:
            mass[text[:n]] += prob
            return
        for word, count in words:
            extend(prob * count / total, text + word + "_")

    extend(1.0, "")
    return -fsum(p * log2(p) for p in mass.values()) / n


class NaiveSentenceModel:
    """Sentence counts in a dict; prefix queries scan every sentence."""

    def __init__(self, counts: dict[str, int]):
        self.counts = dict(counts)

    def ssp_distribution(self, sentence_prefix: str) -> list[tuple[str, float]]:
        stem = naive_swp(sentence_prefix)
        position = len(sentence_prefix) - len(stem)
        agg: dict[str, int] = defaultdict(int)
        for text, count in self.counts.items():
            if not text.startswith(sentence_prefix):
                continue
            word = _WORD_RUN.match(text[position:]).group()
            if word:
                agg[word] += count
        total = sum(agg.values())
        if total == 0:
            return []
        return sorted(
            ((w, c / total) for w, c in agg.items()),
            key=lambda item: (-item[1], item[0]),
        )
