"""Spelling engines: the adaptive (polymorphic) matrix and the static grid.

The adaptive engine rebuilds its selection matrix after every selection.
Character symbols are the knowledge base's continuations of the open word
fragment; selecting one spells the whole forced path down the vocabulary
(label selection).  Prediction symbols each carry a full word: selecting one
spells the word's remainder plus a space.  Mandatory symbols are the space,
the sentence terminators, and undo.  The matrix is the smallest near-square
(``rows`` x ``cols`` with ``rows`` in ``[cols - 1, cols]``) that fits all
symbols, and the number of prediction slots exceeds the configured minimum
``p_sharp`` whenever enough candidate words exist.

The static engine is the classic comparison speller: a fixed 6x6 grid with
all 30 characters plus undo, one character per selection.

Selecting a terminator completes a sentence; the engine records it and (when
learning is enabled) feeds it back into the knowledge base, so later
sessions predict it.  Undo reverts the previous selection's text, marks that
selection incorrect, and is itself logged as a selection.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from polyspell.kb import KnowledgeBase
from polyspell.metrics import TimingConfig, ac, ec, intensifications, isr, ocm, selection_time, sm
from polyspell.text import DEFAULT_ALPHABET, UNDO, UserAlphabet, ssp, swp

KIND_CHARACTER = "character"
KIND_MANDATORY = "mandatory"
KIND_PREDICTION = "prediction"


@dataclass(frozen=True)
class Symbol:
    """One selectable matrix cell."""

    kind: str
    label: str
    word: str | None = None  # predictions: the full word offered
    spell: str | None = None  # predictions: text appended on selection
    prediction_id: int | None = None


@dataclass(frozen=True)
class SelectionMatrix:
    """A row-major near-square grid of symbols; ``None`` cells are empty."""

    rows: int
    cols: int
    cells: tuple[Symbol | None, ...]

    def __post_init__(self) -> None:
        if self.rows * self.cols != len(self.cells):
            raise ValueError("cell count does not match dimensions")
        if not self.cols - 1 <= self.rows <= self.cols:
            raise ValueError(f"{self.rows}x{self.cols} is not near-square")

    def at(self, row: int, col: int) -> Symbol | None:
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise IndexError(f"cell ({row}, {col}) outside {self.rows}x{self.cols}")
        return self.cells[row * self.cols + col]

    @property
    def dims(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def symbols(self) -> list[Symbol]:
        return [cell for cell in self.cells if cell is not None]

    def count(self, kind: str) -> int:
        return sum(1 for cell in self.cells if cell is not None and cell.kind == kind)

    @property
    def n_filled(self) -> int:
        return sum(1 for cell in self.cells if cell is not None)

    @property
    def predictions(self) -> list[Symbol]:
        return [c for c in self.cells if c is not None and c.kind == KIND_PREDICTION]

    def find(self, kind: str, label: str) -> Symbol:
        for cell in self.cells:
            if cell is not None and cell.kind == kind and cell.label == label:
                return cell
        raise KeyError(f"no {kind} symbol {label!r} in matrix")

    def position(self, symbol: Symbol) -> tuple[int, int]:
        idx = self.cells.index(symbol)
        return divmod(idx, self.cols)


def smallest_near_square(minimum: int) -> int:
    """Smallest ``k*k`` or ``k*(k-1)`` at least ``minimum``."""
    if minimum < 1:
        raise ValueError("minimum must be positive")
    k = 1
    while True:
        if k * (k - 1) >= minimum:
            return k * (k - 1)
        if k * k >= minimum:
            return k * k
        k += 1


def near_square_dims(total: int) -> tuple[int, int]:
    """``(rows, cols)`` with ``rows*cols == total`` and ``rows`` in
    ``[cols - 1, cols]``."""
    s = math.isqrt(total)
    if s * s == total:
        return s, s
    if s * (s + 1) == total:
        return s, s + 1
    raise ValueError(f"{total} is not a near-square")


def matrix_total(base: int, p_sharp: int, available: int) -> tuple[int, int, int]:
    """Matrix dimensions and prediction count for ``base`` non-prediction
    symbols, a minimum prediction count ``p_sharp``, and ``available``
    candidate words.

    With more candidates than ``p_sharp``, the matrix grows to the smallest
    near-square holding strictly more than ``p_sharp`` predictions and the
    spare cells become prediction slots; otherwise every candidate is shown
    and the matrix only fits the symbols that exist.
    Returns ``(rows, cols, n_pred)``.
    """
    if base < 1:
        raise ValueError("base must be positive")
    if p_sharp < 1:
        raise ValueError("p_sharp must be positive")
    if available < 0:
        raise ValueError("available must be non-negative")
    if available > p_sharp:
        total = smallest_near_square(base + p_sharp + 1)
        n_pred = min(total - base, available)
        if n_pred < total - base:
            total = smallest_near_square(base + n_pred)
    else:
        n_pred = available
        total = smallest_near_square(base + n_pred)
    rows, cols = near_square_dims(total)
    return rows, cols, n_pred


@dataclass(frozen=True)
class EngineConfig:
    """Adaptive engine parameters."""

    p_sharp: int = 4  # prediction slots exceed this when candidates allow
    predictions: bool = True
    mandatory: tuple[str, ...] = ("_", ".", "?", UNDO)
    learn: bool = True  # feed completed sentences back into the KB

    def __post_init__(self) -> None:
        if self.p_sharp < 1:
            raise ValueError("p_sharp must be positive")
        if UNDO not in self.mandatory:
            raise ValueError("the mandatory set must contain undo")
        if len(set(self.mandatory)) != len(self.mandatory):
            raise ValueError("duplicate mandatory symbols")


@dataclass
class SelectionRecord:
    """One logged selection."""

    step: int
    nrows: int
    ncols: int
    n_char: int
    n_mand: int
    n_pred: int
    symbol_kind: str  # character | mandatory | prediction | undo
    label: str
    delta: str  # text appended; for undo, the text removed
    correct: bool | None
    t_virtual_s: float  # cumulative session time after this selection


@dataclass
class SpellSession:
    """Mutable spelling state."""

    spelled: str = ""
    log: list[SelectionRecord] = field(default_factory=list)
    committed: list[str] = field(default_factory=list)
    t_virtual_s: float = 0.0
    # (spelled before the selection, index of that selection in the log)
    undo_stack: list[tuple[str, int]] = field(default_factory=list)

    @property
    def selections(self) -> int:
        return len(self.log)


def prediction_words(
    kb: KnowledgeBase,
    ssp_candidates: Iterable[tuple[str, float]],
    word_prefix: str,
    n_pred: int,
) -> list[str]:
    """Merge sentence-context candidates (first) with vocabulary candidates,
    deduplicated, truncated to ``n_pred``."""
    out: list[str] = []
    seen: set[str] = set()
    for word, _prob in ssp_candidates:
        if len(out) >= n_pred:
            return out
        if word not in seen:
            out.append(word)
            seen.add(word)
    for word, _count in kb.words.iter_by_count(word_prefix):
        if len(out) >= n_pred:
            break
        if word not in seen:
            out.append(word)
            seen.add(word)
    return out


def build_matrix(kb: KnowledgeBase, spelled: str, config: EngineConfig) -> SelectionMatrix:
    """The selection matrix shown after ``spelled``."""
    word_prefix = swp(spelled)
    chars = sorted(kb.char_candidates(word_prefix))
    base = len(chars) + len(config.mandatory)
    preds: list[Symbol] = []
    if config.predictions:
        available = kb.words.nwords_with_prefix(word_prefix)
        rows, cols, n_pred = matrix_total(base, config.p_sharp, available)
        if n_pred:
            words = prediction_words(
                kb, kb.ssp_distribution(ssp(spelled, kb.alphabet)), word_prefix, n_pred
            )
            preds = [
                Symbol(
                    kind=KIND_PREDICTION,
                    label=f"{i}'",
                    word=word,
                    spell=word[len(word_prefix) :] + "_",
                    prediction_id=i,
                )
                for i, word in enumerate(words)
            ]
            if len(preds) != n_pred:
                raise AssertionError("candidate bookkeeping out of sync with availability")
    else:
        rows, cols = near_square_dims(smallest_near_square(base))
    cells = (
        preds
        + [Symbol(KIND_CHARACTER, c) for c in chars]
        + [Symbol(KIND_MANDATORY, m) for m in config.mandatory]
    )
    cells += [None] * (rows * cols - len(cells))
    return SelectionMatrix(rows=rows, cols=cols, cells=tuple(cells))


class SelectionError(ValueError):
    """Raised for selections that are not available in the current matrix."""


class Speller:
    """Adaptive-matrix spelling session over a knowledge base."""

    def __init__(
        self,
        kb: KnowledgeBase,
        config: EngineConfig | None = None,
        timing: TimingConfig | None = None,
    ) -> None:
        self.kb = kb
        self.config = config or EngineConfig()
        self.timing = timing or TimingConfig()
        self.session = SpellSession()
        self._matrix: SelectionMatrix | None = None

    @property
    def matrix(self) -> SelectionMatrix:
        if self._matrix is None:
            self._matrix = build_matrix(self.kb, self.session.spelled, self.config)
        return self._matrix

    @property
    def prediction_phase(self) -> bool:
        """Whether the current matrix displays predictions (and thus the
        prediction-reading pause applies to the upcoming selection)."""
        return self.matrix.count(KIND_PREDICTION) > 0

    def select_at(self, row: int, col: int, correct: bool | None = None) -> SelectionRecord:
        symbol = self.matrix.at(row, col)
        if symbol is None:
            raise SelectionError(f"cell ({row}, {col}) is empty")
        return self.select(symbol, correct=correct)

    def select(self, symbol: Symbol, correct: bool | None = None) -> SelectionRecord:
        matrix = self.matrix
        if symbol not in matrix.cells:
            raise SelectionError(f"symbol {symbol.label!r} is not in the current matrix")
        session = self.session
        session.t_virtual_s += selection_time(
            matrix.dims, self.timing, prediction_phase=self.prediction_phase
        )

        kind = symbol.kind
        if kind == KIND_MANDATORY and symbol.label == UNDO:
            kind = "undo"
            if session.undo_stack:
                previous, undone_idx = session.undo_stack.pop()
                delta = session.spelled[len(previous) :]
                session.spelled = previous
                session.log[undone_idx].correct = False
            else:
                delta = ""
        else:
            delta = self._delta_for(symbol)
            session.undo_stack.append((session.spelled, len(session.log)))
            session.spelled += delta
            if kind == KIND_MANDATORY and symbol.label in self.kb.alphabet.terminators:
                self._commit(symbol.label)

        record = SelectionRecord(
            step=len(session.log) + 1,
            nrows=matrix.rows,
            ncols=matrix.cols,
            n_char=matrix.count(KIND_CHARACTER),
            n_mand=matrix.count(KIND_MANDATORY),
            n_pred=matrix.count(KIND_PREDICTION),
            symbol_kind=kind,
            label=symbol.label,
            delta=delta,
            correct=correct,
            t_virtual_s=session.t_virtual_s,
        )
        session.log.append(record)
        self._matrix = None
        return record

    def _delta_for(self, symbol: Symbol) -> str:
        if symbol.kind == KIND_PREDICTION:
            assert symbol.spell is not None
            return symbol.spell
        if symbol.kind == KIND_CHARACTER:
            return self.kb.label_extension(swp(self.session.spelled), symbol.label)
        # mandatory: spellable labels append themselves, controls do nothing
        if symbol.label in self.kb.alphabet.characters:
            return symbol.label
        return ""

    def _commit(self, terminator: str) -> None:
        """Complete the open sentence, if any, at a terminator selection."""
        sentence = ssp(self.session.spelled[:-1], self.kb.alphabet)
        if not sentence:
            return  # a bare terminator does not make a sentence
        sentence += terminator
        self.session.committed.append(sentence)
        if self.config.learn:
            self.kb.add_sentence(sentence)

    def undo(self, correct: bool | None = None) -> SelectionRecord:
        """Select the undo symbol from the current matrix."""
        return self.select(self.matrix.find(KIND_MANDATORY, UNDO), correct=correct)


class StaticSpeller:
    """Fixed-grid spelling session: every character plus undo on a 6x6 grid,
    one character per selection, no predictions, no knowledge base."""

    ROWS = 6
    COLS = 6

    def __init__(
        self,
        alphabet: UserAlphabet = DEFAULT_ALPHABET,
        timing: TimingConfig | None = None,
    ) -> None:
        if alphabet.channel_size > self.ROWS * self.COLS:
            raise ValueError("alphabet does not fit the static grid")
        self.alphabet = alphabet
        self.timing = timing or TimingConfig()
        self.session = SpellSession()
        cells: list[Symbol | None] = [
            Symbol(KIND_CHARACTER, ch) for ch in alphabet.characters
        ]
        cells.append(Symbol(KIND_MANDATORY, UNDO))
        cells += [None] * (self.ROWS * self.COLS - len(cells))
        self._matrix = SelectionMatrix(rows=self.ROWS, cols=self.COLS, cells=tuple(cells))

    @property
    def matrix(self) -> SelectionMatrix:
        return self._matrix

    @property
    def prediction_phase(self) -> bool:
        return False

    def select(self, symbol: Symbol, correct: bool | None = None) -> SelectionRecord:
        matrix = self._matrix
        if symbol not in matrix.cells:
            raise SelectionError(f"symbol {symbol.label!r} is not in the grid")
        session = self.session
        session.t_virtual_s += selection_time(matrix.dims, self.timing)
        if symbol.label == UNDO:
            kind = "undo"
            if session.undo_stack:
                previous, undone_idx = session.undo_stack.pop()
                delta = session.spelled[len(previous) :]
                session.spelled = previous
                session.log[undone_idx].correct = False
            else:
                delta = ""
        else:
            kind = KIND_CHARACTER
            delta = symbol.label
            session.undo_stack.append((session.spelled, len(session.log)))
            session.spelled += delta
        record = SelectionRecord(
            step=len(session.log) + 1,
            nrows=matrix.rows,
            ncols=matrix.cols,
            n_char=matrix.count(KIND_CHARACTER),
            n_mand=matrix.count(KIND_MANDATORY),
            n_pred=0,
            symbol_kind=kind,
            label=symbol.label,
            delta=delta,
            correct=correct,
            t_virtual_s=session.t_virtual_s,
        )
        session.log.append(record)
        return record

    def select_char(self, char: str, correct: bool | None = None) -> SelectionRecord:
        return self.select(self._matrix.find(KIND_CHARACTER, char), correct=correct)

    def undo(self, correct: bool | None = None) -> SelectionRecord:
        return self.select(self._matrix.find(KIND_MANDATORY, UNDO), correct=correct)


@dataclass(frozen=True)
class MetricsReport:
    """Aggregate throughput metrics of a session log."""

    selections: int
    characters: int
    total_intensifications: int
    total_time_s: float
    isr: float
    sm: float
    ocm: float
    ac: float
    ec: float | None  # undefined until at least one character is spelled


def session_metrics(session: SpellSession, timing: TimingConfig) -> MetricsReport:
    """Metrics over a session's virtual clock.

    Undone selections stay in every denominator: their time and flashes were
    really spent.  A selection counts as an error when its ``correct`` flag
    is False (set explicitly or by a later corrective undo).
    """
    if not session.log:
        raise ValueError("session has no selections")
    selections = len(session.log)
    flashes = sum(intensifications((r.nrows, r.ncols), timing.nrs) for r in session.log)
    seconds = session.t_virtual_s
    characters = len(session.spelled)
    errors = sum(1 for r in session.log if r.correct is False)
    return MetricsReport(
        selections=selections,
        characters=characters,
        total_intensifications=flashes,
        total_time_s=seconds,
        isr=isr(flashes, selections, timing.nrs),
        sm=sm(selections, seconds),
        ocm=ocm(characters, seconds),
        ac=ac(selections - errors, selections),
        ec=ec(errors, characters) if characters else None,
    )


LOG_CSV_COLUMNS = (
    "step",
    "nrows",
    "ncols",
    "n_char",
    "n_mand",
    "n_pred",
    "symbol_kind",
    "delta",
    "correct",
    "t_virtual_s",
)


def write_session_log(session: SpellSession, fh: TextIO) -> None:
    """Session log as CSV, one row per selection."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(LOG_CSV_COLUMNS)
    for r in session.log:
        writer.writerow(
            [
                r.step,
                r.nrows,
                r.ncols,
                r.n_char,
                r.n_mand,
                r.n_pred,
                r.symbol_kind,
                r.delta,
                "" if r.correct is None else str(r.correct).lower(),
                f"{r.t_virtual_s:.6f}",
            ]
        )
