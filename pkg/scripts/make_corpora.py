"""Generate the bundled mini-corpora.

Each corpus is a phrasebook of synthetic sentences: a Zipf-weighted
vocabulary of pronounceable syllable-built words, combined into sentences
whose instances are themselves Zipf-weighted, so popular sentences repeat.
Output lines are ``count<TAB>sentence``; text is already in the speller's
normalized form.  Deterministic: fixed seeds, sorted output.

Run from the repository root:  python3 scripts/make_corpora.py
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import numpy as np

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "polyspell" / "data" / "corpora"

ONSETS = list("bcdfglmnprstv") + ["ch", "st", "br", "tr", "gr", "pl"]
VOWELS = list("aeiou")
CODAS = ["", "", "", "n", "r", "s", "l", "t"]


def make_word(rng: np.random.Generator, syllables: int) -> str:
    parts = []
    for _ in range(syllables):
        onset = ONSETS[rng.integers(0, len(ONSETS))]
        vowel = VOWELS[rng.integers(0, len(VOWELS))]
        coda = CODAS[rng.integers(0, len(CODAS))] if rng.random() < 0.35 else ""
        parts.append(onset + vowel + coda)
    return "".join(parts)


def make_vocabulary(rng: np.random.Generator, size: int, syl_low: int, syl_high: int,
                    apostrophes: float) -> list[str]:
    words: set[str] = set()
    while len(words) < size:
        word = make_word(rng, int(rng.integers(syl_low, syl_high + 1)))
        if rng.random() < apostrophes and len(word) > 3:
            word = word + "'s" if rng.random() < 0.5 else word[0] + "'" + word[1:]
        words.add(word)
    return sorted(words)


def zipf_weights(n: int, alpha: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=float)
    weights = ranks**-alpha
    return weights / weights.sum()


def make_corpus(
    seed: int,
    vocab_size: int,
    syl_range: tuple[int, int],
    words_per_sentence: tuple[int, int],
    distinct_sentences: int,
    instances: int,
    apostrophes: float = 0.04,
    question_rate: float = 0.12,
) -> list[tuple[str, int]]:
    rng = np.random.default_rng(seed)
    vocab = make_vocabulary(rng, vocab_size, *syl_range, apostrophes)
    rng.shuffle(vocab)  # ranks independent of spelling
    word_p = zipf_weights(len(vocab), 1.08)
    low, high = words_per_sentence
    sentences: set[str] = set()
    while len(sentences) < distinct_sentences:
        length = int(rng.integers(low, high + 1))
        picks = rng.choice(len(vocab), size=length, p=word_p)
        terminator = "?" if rng.random() < question_rate else "."
        sentences.add("_".join(vocab[i] for i in picks) + terminator)
    ordered = sorted(sentences)
    order = rng.permutation(len(ordered))
    sentence_p = zipf_weights(len(ordered), 0.9)
    draws = rng.choice(len(ordered), size=instances, p=sentence_p[np.argsort(order)])
    counts = Counter(int(i) for i in draws)
    return sorted((ordered[i], c) for i, c in counts.items())


def write_corpus(name: str, rows: list[tuple[str, int]]) -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    path = OUT_DIR / f"{name}.txt"
    with path.open("w", encoding="utf-8") as fh:
        for text, count in rows:
            fh.write(f"{count}\t{text}\n")
    total = sum(c for _, c in rows)
    print(f"{path}: {len(rows)} distinct sentences, {total} instances")


def main() -> None:
    write_corpus(
        "en_like",
        make_corpus(
            seed=20260101,
            vocab_size=420,
            syl_range=(1, 3),
            words_per_sentence=(4, 8),
            distinct_sentences=900,
            instances=2000,
        ),
    )
    write_corpus(
        "long_words",
        make_corpus(
            seed=20260202,
            vocab_size=260,
            syl_range=(3, 5),
            words_per_sentence=(3, 6),
            distinct_sentences=850,
            instances=2000,
            apostrophes=0.02,
        ),
    )
    write_corpus(
        "short_sent",
        make_corpus(
            seed=20260303,
            vocab_size=320,
            syl_range=(1, 2),
            words_per_sentence=(2, 4),
            distinct_sentences=800,
            instances=2000,
            question_rate=0.2,
        ),
    )


if __name__ == "__main__":
    main()
