"""Channel alphabet and string calculus over spelled text.

The speller writes strings over a small channel alphabet: 26 lowercase
letters, apostrophe, ``_`` (space), and the sentence terminators ``.`` and
``?``.  Words are runs of letters/apostrophes; sentences end with exactly one
terminator.  This module defines the alphabet, the two trailing-context
queries the engine is built on — the open word fragment (:func:`swp`) and the
open sentence fragment (:func:`ssp`) — plus sentence splitting and the raw
text normalizer that maps free-form UTF-8 onto the alphabet.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

#: Label of the undo control symbol.  Undo is selectable like a character but
#: is not itself spellable text, so it lives outside UserAlphabet.characters.
UNDO = "undo"

_LETTERS = "abcdefghijklmnopqrstuvwxyz"

#: Characters a word may contain.
WORD_CHARS = frozenset(_LETTERS + "'")


@dataclass(frozen=True)
class UserAlphabet:
    """Spellable characters and which of them terminate a sentence.

    The default configuration has 30 characters (26 letters, apostrophe,
    space, period, question mark); together with the undo control symbol the
    selection channel offers 31 symbols.  ``!`` may be added as an extra
    terminator.
    """

    characters: tuple[str, ...] = tuple(_LETTERS + "'_.?")
    terminators: frozenset[str] = frozenset(".?")

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for ch in self.characters:
            if len(ch) != 1:
                raise ValueError(f"alphabet members must be single characters, got {ch!r}")
            if ch in seen:
                raise ValueError(f"duplicate alphabet character {ch!r}")
            seen.add(ch)
        if UNDO in seen:
            raise ValueError("undo is a control symbol, not an alphabet character")
        if not set(self.terminators) <= seen:
            raise ValueError("terminators must be alphabet characters")

    @property
    def channel_size(self) -> int:
        """Number of selectable symbols in the fixed grid: characters + undo."""
        return len(self.characters) + 1


DEFAULT_ALPHABET = UserAlphabet()


def swp(spelled: str) -> str:
    """Open word fragment: the maximal trailing run of word characters.

    Empty when the text ends with a separator or terminator; the whole text
    when no non-word character occurs.
    """
    i = len(spelled)
    while i > 0 and spelled[i - 1] in WORD_CHARS:
        i -= 1
    return spelled[i:]


def ssp(spelled: str, alphabet: UserAlphabet = DEFAULT_ALPHABET) -> str:
    """Open sentence fragment: the suffix strictly after the last terminator.

    The whole text when no terminator occurs.  :func:`swp` of a string is
    always a suffix of its :func:`ssp` because word characters are never
    terminators.
    """
    i = len(spelled)
    while i > 0 and spelled[i - 1] not in alphabet.terminators:
        i -= 1
    return spelled[i:]


def words_of(text: str) -> list[str]:
    """Maximal runs of word characters, in order of occurrence."""
    out: list[str] = []
    start = None
    for i, ch in enumerate(text):
        if ch in WORD_CHARS:
            if start is None:
                start = i
        elif start is not None:
            out.append(text[start:i])
            start = None
    if start is not None:
        out.append(text[start:])
    return out


def split_sentences(
    text: str, alphabet: UserAlphabet = DEFAULT_ALPHABET
) -> tuple[list[str], str]:
    """Cut text into terminator-ended segments plus the unterminated tail.

    Concatenating the segments and the tail reconstructs the input exactly.
    """
    segments: list[str] = []
    start = 0
    for i, ch in enumerate(text):
        if ch in alphabet.terminators:
            segments.append(text[start : i + 1])
            start = i + 1
    return segments, text[start:]


# --- normalization ---------------------------------------------------------

#: The two accent-handling modes of :func:`normalize`:
#: ``table`` applies the transliteration table verbatim (acute/grave entries
#: carry their apostrophe wherever they occur); ``word-final`` reduces every
#: accented letter to its base and appends an apostrophe only when the
#: accented letter ends a word.
NORMALIZE_MODES = ("table", "word-final")


@lru_cache(maxsize=1)
def default_translit_table() -> dict[str, str]:
    """The transliteration table bundled with the package."""
    path = resources.files(__package__).joinpath("data/translit.tsv")
    return parse_translit_table(path.read_text(encoding="utf-8"))


def parse_translit_table(text: str) -> dict[str, str]:
    """Parse ``source<TAB>replacement`` lines; ``#`` starts a comment."""
    table: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or len(parts[0]) != 1:
            raise ValueError(f"translit table line {lineno}: expected 'char<TAB>replacement'")
        table[parts[0]] = parts[1]
    return table


def _decomposed_base(ch: str) -> tuple[str, bool]:
    """Base letters of ``ch`` after stripping combining marks.

    Returns ``(base, had_marks)``; ``base`` is empty when the character does
    not reduce to ASCII letters.
    """
    decomposed = unicodedata.normalize("NFKD", ch)
    base = "".join(c for c in decomposed if not unicodedata.combining(c))
    had_marks = len(decomposed) > len(base)
    if base.isascii() and base.isalpha():
        return base.lower(), had_marks
    return "", had_marks


def _map_char(ch: str, table: dict[str, str]) -> tuple[str, bool]:
    """Reduce one out-of-alphabet character.

    Returns ``(replacement, accented)`` where ``replacement`` may carry the
    table's apostrophe and ``accented`` records whether the character bears
    combining marks (the word-final apostrophe rule applies only to those).
    """
    rep = table.get(ch)
    base, had_marks = _decomposed_base(ch)
    if rep is None:
        rep = base  # may be empty: character is simply dropped
    return rep, had_marks


def normalize(
    raw: str,
    mode: str = "table",
    alphabet: UserAlphabet = DEFAULT_ALPHABET,
    table: dict[str, str] | None = None,
) -> str:
    """Map free-form text onto the channel alphabet.

    Case is folded, accented characters are transliterated per ``mode``,
    characters with no mapping are dropped, and runs of whitespace (including
    literal ``_``) collapse to a single ``_`` with none kept at either end.
    The function is idempotent.
    """
    if mode not in NORMALIZE_MODES:
        raise ValueError(f"unknown normalize mode {mode!r}; expected one of {NORMALIZE_MODES}")
    if table is None:
        table = default_translit_table()
    allowed = set(alphabet.characters) - {"_"}
    text = unicodedata.normalize("NFC", raw).lower()

    def continues_word(idx: int) -> bool:
        """Whether the character after position idx keeps the word going."""
        if idx + 1 >= len(text):
            return False
        nxt = text[idx + 1]
        if nxt in WORD_CHARS:
            return True
        if nxt in allowed or nxt.isspace() or nxt == "_":
            return False
        rep, _ = _map_char(nxt, table)
        return bool(rep) and rep[0] in WORD_CHARS

    out: list[str] = []
    pending_sep = False
    for i, ch in enumerate(text):
        if ch.isspace() or ch == "_":
            pending_sep = True
            continue
        if ch in allowed:
            piece = ch
        else:
            rep, accented = _map_char(ch, table)
            if not rep:
                continue
            if mode == "table":
                piece = rep
            else:
                piece = rep.replace("'", "")
                if accented and not continues_word(i):
                    piece += "'"
            if not piece:
                continue
        if pending_sep and out:
            out.append("_")
        pending_sep = False
        out.append(piece)
    return "".join(out)
