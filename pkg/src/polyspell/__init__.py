"""polyspell: a polymorphic selection-matrix speller core.

Text entry through a scanning selection matrix whose content adapts to the
text spelled so far: character candidates and word predictions are drawn from
a count-based knowledge base of sentences and words.  The package bundles the
string calculus, the knowledge base, the spelling engine, information-rate
metrics, an in-silico benchmarking harness, an HTTP service, and a CLI.
"""

from polyspell.text import (
    DEFAULT_ALPHABET,
    UNDO,
    UserAlphabet,
    normalize,
    split_sentences,
    ssp,
    swp,
    words_of,
)

__all__ = [
    "DEFAULT_ALPHABET",
    "UNDO",
    "UserAlphabet",
    "normalize",
    "split_sentences",
    "ssp",
    "swp",
    "words_of",
]

__version__ = "0.1.0"
