"""Count-based knowledge base: a word trie and a sentence store.

The word trie is a compressed radix tree keyed by word text; each node keeps
the weighted count of the word ending there plus cached subtree aggregates
(weighted total and number of distinct words), so prefix statistics are O(1)
after descent.  The sentence store maps full sentence texts to counts and is
indexed by a character-level trie so that all sentences extending a given
text prefix — and the next complete word they contain at a given position —
can be aggregated without scanning the whole store.

Persistence is a line-oriented text format::

    polymorph-kb v1
    S<TAB>count<TAB>sentence-text
    W<TAB>count<TAB>word

``S`` records carry sentences; word counts are re-derived from them on load.
``W`` records carry only the remainder that sentences do not explain (for
example vocabulary inserted directly, with no sentence), so a save/load
round-trip reproduces every count exactly.
"""

from __future__ import annotations

import heapq
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from polyspell.text import (
    DEFAULT_ALPHABET,
    WORD_CHARS,
    UserAlphabet,
    normalize,
    split_sentences,
    ssp,
    swp,
    words_of,
)

KB_FORMAT_HEADER = "polymorph-kb v1"


class KbFormatError(ValueError):
    """Raised when a persisted knowledge base cannot be parsed."""


# --- word trie --------------------------------------------------------------


class _WordNode:
    __slots__ = ("edges", "count", "total", "nwords")

    def __init__(self) -> None:
        # first char -> (edge label, child); labels are non-empty and start
        # with their key, so lookup needs no scanning.
        self.edges: dict[str, tuple[str, _WordNode]] = {}
        self.count = 0  # weighted count of the word ending exactly here
        self.total = 0  # weighted count of all words in this subtree
        self.nwords = 0  # distinct words in this subtree


def _lcp_len(a: str, b: str) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


class WordTrie:
    """Compressed radix tree of words with weighted counts."""

    def __init__(self) -> None:
        self._root = _WordNode()

    # -- mutation

    def insert(self, word: str, count: int = 1) -> None:
        if not word:
            raise ValueError("cannot insert an empty word")
        if not set(word) <= WORD_CHARS:
            raise ValueError(f"word {word!r} contains non-word characters")
        if count < 1:
            raise ValueError("count must be positive")
        self._insert(self._root, word, count)

    def _insert(self, node: _WordNode, rest: str, count: int) -> bool:
        """Insert below ``node``; returns True when a new distinct word appeared."""
        if rest == "":
            new = node.count == 0
            node.count += count
            node.total += count
            if new:
                node.nwords += 1
            return new
        edge = node.edges.get(rest[0])
        if edge is None:
            child = _WordNode()
            child.count = child.total = count
            child.nwords = 1
            node.edges[rest[0]] = (rest, child)
            node.total += count
            node.nwords += 1
            return True
        label, child = edge
        common = _lcp_len(rest, label)
        if common == len(label):
            new = self._insert(child, rest[common:], count)
        else:
            # Split the edge at the divergence point.
            mid = _WordNode()
            mid.edges[label[common]] = (label[common:], child)
            mid.total = child.total
            mid.nwords = child.nwords
            node.edges[rest[0]] = (label[:common], mid)
            new = self._insert(mid, rest[common:], count)
        node.total += count
        if new:
            node.nwords += 1
        return new

    # -- cursors

    def _locate(self, prefix: str) -> tuple[_WordNode, str] | None:
        """Position of ``prefix``: ``(node, forced)`` where ``forced`` is the
        remainder of a partially consumed edge leading into ``node``.  All
        words extending ``prefix`` continue with ``forced`` first.  ``None``
        when no word extends ``prefix``."""
        node = self._root
        i = 0
        while i < len(prefix):
            edge = node.edges.get(prefix[i])
            if edge is None:
                return None
            label, child = edge
            take = min(len(label), len(prefix) - i)
            if prefix[i : i + take] != label[:take]:
                return None
            i += take
            node = child
            if take < len(label):
                return node, label[take:]
        return node, ""

    # -- queries

    def word_count(self, word: str) -> int:
        cur = self._locate(word)
        if cur is None or cur[1]:
            return 0
        return cur[0].count

    def total_with_prefix(self, prefix: str) -> int:
        cur = self._locate(prefix)
        return 0 if cur is None else cur[0].total

    def nwords_with_prefix(self, prefix: str) -> int:
        cur = self._locate(prefix)
        return 0 if cur is None else cur[0].nwords

    @property
    def total(self) -> int:
        return self._root.total

    @property
    def nwords(self) -> int:
        return self._root.nwords

    def char_candidates(self, prefix: str) -> set[str]:
        """Characters that extend ``prefix`` toward at least one word."""
        cur = self._locate(prefix)
        if cur is None:
            return set()
        node, forced = cur
        if forced:
            return {forced[0]}
        return set(node.edges.keys())

    def label_extension(self, prefix: str, char: str) -> str:
        """The forced continuation spelled by selecting ``char`` at ``prefix``:
        ``char`` plus every character shared by all words extending
        ``prefix + char``, stopping at the first branch or complete word."""
        cur = self._locate(prefix)
        if cur is None:
            raise KeyError(f"no words extend {prefix!r}")
        node, forced = cur
        if forced:
            if forced[0] != char:
                raise KeyError(f"{char!r} does not extend {prefix!r}")
            ext = forced
        else:
            edge = node.edges.get(char)
            if edge is None:
                raise KeyError(f"{char!r} does not extend {prefix!r}")
            ext, node = edge
        while node.count == 0 and len(node.edges) == 1:
            label, node = next(iter(node.edges.values()))
            ext += label
        return ext

    def iter_by_count(self, prefix: str = "") -> Iterator[tuple[str, int]]:
        """Words extending ``prefix``, lazily, by descending count then
        lexicographic order."""
        cur = self._locate(prefix)
        if cur is None:
            return
        node, forced = cur
        # Heap entries: (-bound, tag, text, node). Subtree entries (tag 0)
        # sort before word entries (tag 1) of equal bound, so a word is only
        # yielded once no unexpanded subtree could still beat it.
        heap: list[tuple[int, int, str, _WordNode | None]] = [
            (-node.total, 0, prefix + forced, node)
        ]
        while heap:
            neg, tag, text, nd = heapq.heappop(heap)
            if tag == 1:
                yield text, -neg
                continue
            assert nd is not None
            if nd.count:
                heapq.heappush(heap, (-nd.count, 1, text, None))
            for label, child in nd.edges.values():
                heapq.heappush(heap, (-child.total, 0, text + label, child))

    def iter_words(self) -> Iterator[tuple[str, int]]:
        """All words in lexicographic order."""

        def walk(node: _WordNode, text: str) -> Iterator[tuple[str, int]]:
            if node.count:
                yield text, node.count
            for first in sorted(node.edges):
                label, child = node.edges[first]
                yield from walk(child, text + label)

        yield from walk(self._root, "")

    def swp_distribution(
        self, prefix: str, limit: int | None = None
    ) -> list[tuple[str, float]]:
        """Words extending ``prefix`` with their conditional probabilities,
        sorted by probability descending, ties lexicographic."""
        total = self.total_with_prefix(prefix)
        if total == 0:
            return []
        out: list[tuple[str, float]] = []
        for word, count in self.iter_by_count(prefix):
            if limit is not None and len(out) >= limit:
                break
            out.append((word, count / total))
        return out


# --- sentence store ----------------------------------------------------------


class _SentNode:
    __slots__ = ("children", "count", "total")

    def __init__(self) -> None:
        self.children: dict[str, _SentNode] = {}
        self.count = 0  # count of the sentence ending exactly here
        self.total = 0  # count of all sentences in this subtree


class SentenceStore:
    """Sentence texts with counts, indexed by text prefix."""

    def __init__(self) -> None:
        self._root = _SentNode()
        self._counts: dict[str, int] = {}

    def add(self, text: str, count: int = 1) -> None:
        if count < 1:
            raise ValueError("count must be positive")
        self._counts[text] = self._counts.get(text, 0) + count
        node = self._root
        node.total += count
        for ch in text:
            node = node.children.setdefault(ch, _SentNode())
            node.total += count
        node.count += count

    def count(self, text: str) -> int:
        return self._counts.get(text, 0)

    @property
    def total(self) -> int:
        return self._root.total

    @property
    def nsentences(self) -> int:
        return len(self._counts)

    def items(self) -> Iterator[tuple[str, int]]:
        """All (sentence, count) pairs in lexicographic order."""
        for text in sorted(self._counts):
            yield text, self._counts[text]

    def node(self, prefix: str) -> _SentNode | None:
        node = self._root
        for ch in prefix:
            node = node.children.get(ch)
            if node is None:
                return None
        return node

    def total_with_prefix(self, prefix: str) -> int:
        node = self.node(prefix)
        return 0 if node is None else node.total

    def word_completions(self, node: _SentNode, stem: str) -> dict[str, int]:
        """Aggregate counts of the complete word read at the current position.

        ``node`` sits at the end of some text prefix whose open word fragment
        is ``stem``; for every stored sentence below ``node`` the word is
        ``stem`` plus the characters up to that sentence's next non-word
        character.  Sentences whose word at this position is empty (the
        position sits on a separator) are skipped.
        """
        out: dict[str, int] = {}
        stack: list[tuple[_SentNode, str]] = [(node, "")]
        while stack:
            nd, grown = stack.pop()
            for ch, child in nd.children.items():
                if ch in WORD_CHARS:
                    stack.append((child, grown + ch))
                else:
                    word = stem + grown
                    if word:
                        out[word] = out.get(word, 0) + child.total
        return out


# --- knowledge base -----------------------------------------------------------


@dataclass(frozen=True)
class IngestStats:
    """What a phrasebook ingestion left in the knowledge base."""

    sentences: int  # sentence instances stored (sum of counts)
    distinct_words: int
    mean_word_chars: float  # total word characters / word occurrences
    discarded: int  # unterminated line tails dropped


def parse_phrasebook_line(line: str) -> tuple[str, int]:
    """Split an optional leading ``count<TAB>`` multiplicity off a line."""
    if "\t" in line:
        head, rest = line.split("\t", 1)
        try:
            count = int(head)
        except ValueError:
            return line, 1
        if count < 1:
            raise ValueError(f"non-positive sentence count {count}")
        return rest, count
    return line, 1


def iter_phrasebook(
    lines: Iterable[str],
    mode: str = "table",
    alphabet: UserAlphabet = DEFAULT_ALPHABET,
    discarded: list[int] | None = None,
) -> Iterator[tuple[int, str, int]]:
    """Normalize raw phrasebook lines into ``(lineno, sentence, count)``.

    Each line is ``count<TAB>sentence`` or a bare sentence; normalized text
    may split into several sentences, each yielded with the line's
    multiplicity.  Unterminated trailing material is dropped; when a
    ``discarded`` list is supplied, the dropped multiplicities are appended
    to it.  Errors carry the 1-based line number.
    """
    for lineno, raw in enumerate(lines, start=1):
        raw = raw.rstrip("\n")
        if not raw.strip():
            continue
        try:
            body, count = parse_phrasebook_line(raw)
            segments, tail = split_sentences(
                normalize(body, mode=mode, alphabet=alphabet), alphabet
            )
        except ValueError as exc:
            raise ValueError(f"phrasebook line {lineno}: {exc}") from exc
        if tail and discarded is not None:
            discarded.append(count)
        for seg in segments:
            seg = seg.lstrip("_")
            if seg and seg != seg[-1]:  # skip bare terminators
                yield lineno, seg, count


class KnowledgeBase:
    """Sentence and word statistics feeding the speller."""

    def __init__(self, alphabet: UserAlphabet = DEFAULT_ALPHABET) -> None:
        self.alphabet = alphabet
        self.words = WordTrie()
        self.sentences = SentenceStore()

    # -- mutation

    def add_word(self, word: str, count: int = 1) -> None:
        self.words.insert(word, count)

    def add_sentence(self, text: str, count: int = 1) -> None:
        """Store a complete sentence and credit every word it contains."""
        self.validate_sentence(text)
        self.sentences.add(text, count)
        for word in words_of(text):
            self.words.insert(word, count)

    def validate_sentence(self, text: str) -> None:
        """Reject text that is not a single complete sentence."""
        if not text:
            raise ValueError("empty sentence")
        if not set(text) <= set(self.alphabet.characters):
            bad = sorted(set(text) - set(self.alphabet.characters))
            raise ValueError(f"sentence {text!r} uses characters outside the alphabet: {bad}")
        if text[-1] not in self.alphabet.terminators:
            raise ValueError(f"sentence {text!r} does not end with a terminator")
        if any(ch in self.alphabet.terminators for ch in text[:-1]):
            raise ValueError(f"sentence {text!r} has an interior terminator")

    def ingest(
        self,
        lines: Iterable[str],
        mode: str = "table",
    ) -> IngestStats:
        """Normalize raw phrasebook lines and store their sentences.

        Each line is ``count<TAB>sentence`` or a bare sentence; normalized
        text may split into several sentences, each stored with the line's
        multiplicity.  Unterminated trailing material is dropped and counted.
        """
        dropped: list[int] = []
        for lineno, sentence, count in iter_phrasebook(
            lines, mode=mode, alphabet=self.alphabet, discarded=dropped
        ):
            try:
                self.add_sentence(sentence, count)
            except ValueError as exc:
                raise ValueError(f"phrasebook line {lineno}: {exc}") from exc
        return self.stats(discarded=sum(dropped))

    def stats(self, discarded: int = 0) -> IngestStats:
        chars = 0
        occurrences = self.words.total
        for word, count in self.words.iter_words():
            chars += len(word) * count
        mean = chars / occurrences if occurrences else 0.0
        return IngestStats(
            sentences=self.sentences.total,
            distinct_words=self.words.nwords,
            mean_word_chars=mean,
            discarded=discarded,
        )

    # -- engine-facing queries

    def char_candidates(self, word_prefix: str) -> set[str]:
        return self.words.char_candidates(word_prefix)

    def label_extension(self, word_prefix: str, char: str) -> str:
        return self.words.label_extension(word_prefix, char)

    def swp_distribution(self, word_prefix: str, limit: int | None = None):
        return self.words.swp_distribution(word_prefix, limit)

    def ssp_distribution(self, sentence_prefix: str) -> list[tuple[str, float]]:
        """Next complete words read from sentences extending the open
        sentence fragment, weighted by sentence counts, sorted by probability
        descending then lexicographic."""
        node = self.sentences.node(sentence_prefix)
        if node is None:
            return []
        counts = self.sentences.word_completions(node, swp(sentence_prefix))
        total = sum(counts.values())
        if total == 0:
            return []
        return sorted(
            ((word, c / total) for word, c in counts.items()),
            key=lambda item: (-item[1], item[0]),
        )

    # -- persistence

    def save(self, target: str | Path | TextIO) -> None:
        if isinstance(target, (str, Path)):
            with open(target, "w", encoding="utf-8") as fh:
                self._write(fh)
        else:
            self._write(target)

    def _write(self, fh: TextIO) -> None:
        fh.write(KB_FORMAT_HEADER + "\n")
        derived: dict[str, int] = {}
        for text, count in self.sentences.items():
            fh.write(f"S\t{count}\t{text}\n")
            for word in words_of(text):
                derived[word] = derived.get(word, 0) + count
        for word, count in self.words.iter_words():
            extra = count - derived.get(word, 0)
            if extra > 0:
                fh.write(f"W\t{extra}\t{word}\n")

    @classmethod
    def load(
        cls, source: str | Path | TextIO, alphabet: UserAlphabet = DEFAULT_ALPHABET
    ) -> "KnowledgeBase":
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8") as fh:
                return cls._read(fh, alphabet)
        return cls._read(source, alphabet)

    @classmethod
    def _read(cls, fh: TextIO, alphabet: UserAlphabet) -> "KnowledgeBase":
        kb = cls(alphabet)
        header = fh.readline().rstrip("\n")
        if header != KB_FORMAT_HEADER:
            raise KbFormatError(f"bad header {header!r}; expected {KB_FORMAT_HEADER!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 2)
            if len(parts) != 3:
                raise KbFormatError(f"line {lineno}: expected 'S|W<TAB>count<TAB>text'")
            kind, count_text, text = parts
            try:
                count = int(count_text)
            except ValueError:
                raise KbFormatError(f"line {lineno}: bad count {count_text!r}") from None
            if count < 1:
                raise KbFormatError(f"line {lineno}: non-positive count {count}")
            if kind not in ("S", "W"):
                raise KbFormatError(f"line {lineno}: unknown record kind {kind!r}")
            try:
                if kind == "S":
                    kb.add_sentence(text, count)
                else:
                    kb.add_word(text, count)
            except ValueError as exc:
                raise KbFormatError(f"line {lineno}: {exc}") from None
        return kb

    def dumps(self) -> str:
        buf = io.StringIO()
        self._write(buf)
        return buf.getvalue()

    @classmethod
    def loads(cls, data: str, alphabet: UserAlphabet = DEFAULT_ALPHABET) -> "KnowledgeBase":
        return cls._read(io.StringIO(data), alphabet)
