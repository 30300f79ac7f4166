"""Desk-scale spelling experiments over phrasebook corpora.

The harness splits a corpus into held-in/held-out phrasebooks, builds the
knowledge base the way a deployed speller would see it (held-out sentences
absent, their vocabulary present), spells every phrasebook sentence with an
error-free simulated user, and aggregates throughput metrics per speller
configuration into CSV reports.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from math import fsum
from typing import Callable, Iterable, TextIO

import numpy as np

from polyspell.engine import (
    EngineConfig,
    KIND_CHARACTER,
    KIND_MANDATORY,
    SelectionMatrix,
    SelectionRecord,
    Speller,
    StaticSpeller,
    session_metrics,
)
from polyspell.kb import KnowledgeBase, iter_phrasebook
from polyspell.metrics import TimingConfig, isr, ocm, sm
from polyspell.rates import SPELLER_POLY, SPELLER_STATIC, SPELLERS, estimate_rates
from polyspell.text import DEFAULT_ALPHABET, UserAlphabet, swp, words_of

Phrasebook = list[tuple[str, int]]  # (sentence, multiplicity) pairs


class UnspellableError(ValueError):
    """A target sentence contains a word the knowledge base cannot reach."""

    def __init__(self, word: str, target: str) -> None:
        super().__init__(f"word {word!r} of {target!r} is not spellable from the knowledge base")
        self.word = word
        self.target = target

    def __reduce__(self):
        # rebuild from both arguments so the error survives the pickling
        # round-trip out of parallel simulation workers
        return (type(self), (self.word, self.target))


# --- phrasebooks ---------------------------------------------------------------


def load_phrasebook(
    lines: Iterable[str],
    mode: str = "table",
    alphabet: UserAlphabet = DEFAULT_ALPHABET,
) -> Phrasebook:
    """Normalize raw lines into a deduplicated, lexicographically sorted
    phrasebook; duplicate sentences merge their multiplicities."""
    merged: dict[str, int] = {}
    for _lineno, sentence, count in iter_phrasebook(lines, mode=mode, alphabet=alphabet):
        merged[sentence] = merged.get(sentence, 0) + count
    return sorted(merged.items())


@dataclass(frozen=True)
class PhrasebookSplit:
    """A corpus partitioned for an experiment.

    ``a_in`` sentences stay in the knowledge base, ``a_out`` sentences are
    held out of it, and ``p_l`` is everything except ``a_out``.
    """

    a_in: tuple[tuple[str, int], ...]
    a_out: tuple[tuple[str, int], ...]
    p_l: tuple[tuple[str, int], ...]
    n_in: int
    n_out: int
    seed: int


def split_phrasebook(corpus: Phrasebook, n_in: int, n_out: int, seed: int) -> PhrasebookSplit:
    """Draw disjoint uniform samples of ``n_in`` and ``n_out`` distinct
    sentences (seeded, reproducible); duplicates merge before sampling."""
    if n_in < 0 or n_out < 0:
        raise ValueError("sample sizes must be non-negative")
    merged: dict[str, int] = {}
    for text, count in corpus:
        merged[text] = merged.get(text, 0) + count
    distinct = sorted(merged)
    if len(distinct) < n_in + n_out:
        raise ValueError(
            f"need at least {n_in + n_out} distinct sentences, corpus has {len(distinct)}"
        )
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(distinct), size=n_in + n_out, replace=False)
    a_in = sorted(distinct[i] for i in picks[:n_in])
    a_out = sorted(distinct[i] for i in picks[n_in:])
    held_out = set(a_out)
    return PhrasebookSplit(
        a_in=tuple((t, merged[t]) for t in a_in),
        a_out=tuple((t, merged[t]) for t in a_out),
        p_l=tuple((t, merged[t]) for t in distinct if t not in held_out),
        n_in=n_in,
        n_out=n_out,
        seed=seed,
    )


def build_experiment_kb(
    split: PhrasebookSplit, alphabet: UserAlphabet = DEFAULT_ALPHABET
) -> KnowledgeBase:
    """The experiment's knowledge base: every ``p_l`` sentence, plus a
    count-1 vocabulary entry for each held-out word the sentences missed —
    held-out sentences are spellable but never stored."""
    kb = KnowledgeBase(alphabet)
    for text, count in split.p_l:
        kb.add_sentence(text, count)
    for text, _count in split.a_out:
        for word in words_of(text):
            if kb.words.word_count(word) == 0:
                kb.add_word(word, 1)
    return kb


# --- sentence simulation -------------------------------------------------------


@dataclass(frozen=True)
class SentenceResult:
    """Outcome of spelling one sentence without errors."""

    text: str
    chars: int
    words: int
    selections: int
    intensifications: int
    time_s: float


def _offending_word(target: str, spelled: str) -> str:
    fragment = swp(spelled)
    rest = target[len(spelled) :]
    run = ""
    for ch in rest:
        if ch.isalpha() or ch == "'":
            run += ch
        else:
            break
    return fragment + run


def simulate_sentence(
    kb: KnowledgeBase,
    target: str,
    speller: str = SPELLER_POLY,
    predictions: bool = True,
    timing: TimingConfig | None = None,
    p_sharp: int = 4,
    learn: bool = False,
    trace: Callable[[SelectionMatrix, SelectionRecord], None] | None = None,
) -> SentenceResult:
    """Spell ``target`` with the error-free oracle user.

    The oracle takes the lowest-numbered prediction whose spell string is
    the exact next chunk of the remaining target, else the character or
    mandatory symbol for the next character; label selections consume the
    whole forced continuation.  ``trace`` observes each selection with the
    matrix it was made from.
    """
    timing = timing or TimingConfig()
    kb.validate_sentence(target)
    if speller not in SPELLERS:
        raise ValueError(f"unknown speller {speller!r}; expected one of {SPELLERS}")
    if speller == SPELLER_STATIC:
        engine: Speller | StaticSpeller = StaticSpeller(kb.alphabet, timing)
    else:
        engine = Speller(
            kb, EngineConfig(p_sharp=p_sharp, predictions=predictions, learn=learn), timing
        )
    while engine.session.spelled != target:
        remaining = target[len(engine.session.spelled) :]
        matrix = engine.matrix
        if speller == SPELLER_STATIC:
            record = engine.select(matrix.find(KIND_CHARACTER, remaining[0]))
            if trace is not None:
                trace(matrix, record)
            continue
        symbol = next(
            (p for p in matrix.predictions if remaining.startswith(p.spell)), None
        )
        if symbol is None:
            char = remaining[0]
            try:
                symbol = matrix.find(KIND_CHARACTER, char)
                extension = kb.label_extension(swp(engine.session.spelled), char)
                if not remaining.startswith(extension):
                    raise UnspellableError(_offending_word(target, engine.session.spelled), target)
            except KeyError:
                try:
                    symbol = matrix.find(KIND_MANDATORY, char)
                except KeyError:
                    raise UnspellableError(
                        _offending_word(target, engine.session.spelled), target
                    ) from None
        record = engine.select(symbol)
        if trace is not None:
            trace(matrix, record)
    report = session_metrics(engine.session, timing)
    return SentenceResult(
        text=target,
        chars=len(target),
        words=len(words_of(target)),
        selections=report.selections,
        intensifications=report.total_intensifications,
        time_s=report.total_time_s,
    )


def _simulate_chunk(
    kb_blob: str,
    alphabet: UserAlphabet,
    chunk: list[tuple[int, str, int]],
    speller: str,
    predictions: bool,
    timing: TimingConfig,
    p_sharp: int,
) -> list[tuple[int, SentenceResult, int]]:
    kb = KnowledgeBase.loads(kb_blob, alphabet)
    return [
        (index, simulate_sentence(kb, text, speller, predictions, timing, p_sharp), count)
        for index, text, count in chunk
    ]


def simulate_phrasebook(
    kb: KnowledgeBase,
    phrasebook: Phrasebook,
    speller: str = SPELLER_POLY,
    predictions: bool = True,
    timing: TimingConfig | None = None,
    p_sharp: int = 4,
    jobs: int = 1,
    learn: bool = False,
) -> list[tuple[SentenceResult, int]]:
    """Spell every phrasebook sentence; returns ``(result, multiplicity)``
    in phrasebook order.

    With ``learn`` the knowledge base absorbs each sentence as it completes,
    so repeats run once per occurrence, sequentially.  Otherwise distinct
    sentences run once and parallel workers each get a private copy of the
    knowledge base.
    """
    timing = timing or TimingConfig()
    if learn:
        out: list[tuple[SentenceResult, int]] = []
        for text, count in phrasebook:
            for _ in range(count):
                out.append(
                    (simulate_sentence(kb, text, speller, predictions, timing, p_sharp, True), 1)
                )
        return out
    indexed = [(i, text, count) for i, (text, count) in enumerate(phrasebook)]
    if jobs <= 1 or len(indexed) < 2 * jobs:
        results = _simulate_chunk_inline(kb, indexed, speller, predictions, timing, p_sharp)
    else:
        blob = kb.dumps()
        chunks = [indexed[i::jobs] for i in range(jobs)]
        results = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(
                    _simulate_chunk,
                    blob,
                    kb.alphabet,
                    chunk,
                    speller,
                    predictions,
                    timing,
                    p_sharp,
                )
                for chunk in chunks
            ]
            for future in futures:
                results.extend(future.result())
    results.sort(key=lambda item: item[0])
    return [(result, count) for _, result, count in results]


def _simulate_chunk_inline(
    kb: KnowledgeBase,
    chunk: list[tuple[int, str, int]],
    speller: str,
    predictions: bool,
    timing: TimingConfig,
    p_sharp: int,
) -> list[tuple[int, SentenceResult, int]]:
    return [
        (index, simulate_sentence(kb, text, speller, predictions, timing, p_sharp), count)
        for index, text, count in chunk
    ]


# --- experiment reports --------------------------------------------------------


@dataclass(frozen=True)
class ExperimentRow:
    """One aggregate report line: a speller configuration on a phrasebook."""

    lang: str
    speller: str
    pred: str  # "on" | "off"
    phrasebook: str
    chars: int
    words: int
    sentences: int
    mean_t_char_s: float
    mean_t_word_s: float
    ocm: float
    sm: float
    isr: float
    r_n: float
    R_n: float
    D_n: float
    seed: int


REPORT_COLUMNS = (
    "lang",
    "speller",
    "pred",
    "phrasebook",
    "chars",
    "words",
    "sentences",
    "mean_t_char_s",
    "mean_t_word_s",
    "ocm",
    "sm",
    "isr",
    "r_n",
    "R_n",
    "D_n",
    "seed",
)

DEFAULT_CONFIGS = (
    (SPELLER_POLY, True),
    (SPELLER_POLY, False),
    (SPELLER_STATIC, False),
)


def aggregate_results(
    results: list[tuple[SentenceResult, int]],
    timing: TimingConfig,
    lang: str,
    speller: str,
    predictions: bool,
    phrasebook_tag: str,
    rates,
    seed: int,
) -> ExperimentRow:
    if not results:
        raise ValueError("no sentences to aggregate")
    chars = sum(count * r.chars for r, count in results)
    words = sum(count * r.words for r, count in results)
    sentences = sum(count for _, count in results)
    selections = sum(count * r.selections for r, count in results)
    flashes = sum(count * r.intensifications for r, count in results)
    time_s = fsum(count * r.time_s for r, count in results)
    return ExperimentRow(
        lang=lang,
        speller=speller,
        pred="on" if predictions else "off",
        phrasebook=phrasebook_tag,
        chars=chars,
        words=words,
        sentences=sentences,
        mean_t_char_s=time_s / chars,
        mean_t_word_s=time_s / words,
        ocm=ocm(chars, time_s),
        sm=sm(selections, time_s),
        isr=isr(flashes, selections, timing.nrs),
        r_n=rates.r_n,
        R_n=rates.R_n,
        D_n=rates.D_n,
        seed=seed,
    )


def run_experiment(
    kb: KnowledgeBase,
    phrasebooks: dict[str, Phrasebook],
    lang: str = "xx",
    configs: Iterable[tuple[str, bool]] = DEFAULT_CONFIGS,
    timing: TimingConfig | None = None,
    seed: int = 0,
    rates_n: int = 1000,
    rates_runs: int = 20,
    p_sharp: int = 4,
    jobs: int = 1,
    learn: bool = False,
) -> list[ExperimentRow]:
    """Spell every phrasebook under every speller configuration and report
    one aggregate row each, pairing the throughput metrics with the
    configuration's channel-rate estimate."""
    timing = timing or TimingConfig()
    rows: list[ExperimentRow] = []
    for speller, predictions in configs:
        rates = estimate_rates(
            kb,
            speller=speller,
            predictions=predictions,
            n=rates_n,
            runs=rates_runs,
            seed=seed,
            p_sharp=p_sharp,
        )
        for tag, phrasebook in phrasebooks.items():
            results = simulate_phrasebook(
                kb, phrasebook, speller, predictions, timing, p_sharp, jobs, learn
            )
            rows.append(
                aggregate_results(
                    results, timing, lang, speller, predictions, tag, rates, seed
                )
            )
    return rows


def write_report(rows: Iterable[ExperimentRow], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow(
            [row.lang, row.speller, row.pred, row.phrasebook, row.chars, row.words, row.sentences]
            + [
                f"{value:.6f}"
                for value in (
                    row.mean_t_char_s,
                    row.mean_t_word_s,
                    row.ocm,
                    row.sm,
                    row.isr,
                    row.r_n,
                    row.R_n,
                    row.D_n,
                )
            ]
            + [row.seed]
        )


# --- bundled corpora -----------------------------------------------------------


def corpora_names() -> list[str]:
    """Names of the small corpora shipped with the package."""
    root = resources.files("polyspell").joinpath("data/corpora")
    return sorted(
        entry.name[: -len(".txt")] for entry in root.iterdir() if entry.name.endswith(".txt")
    )


def load_corpus(name: str, mode: str = "table") -> Phrasebook:
    """A bundled corpus as a phrasebook."""
    entry = resources.files("polyspell").joinpath(f"data/corpora/{name}.txt")
    if not entry.is_file():
        raise ValueError(f"no bundled corpus named {name!r}; have {corpora_names()}")
    with entry.open(encoding="utf-8") as fh:
        return load_phrasebook(fh, mode=mode)
