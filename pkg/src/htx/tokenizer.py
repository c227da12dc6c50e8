"""Tweet tokenizer built around a single prioritized regular expression.

Splitting on delimiters does not work for tweets: a slash may mark an
abbreviation (``b/c``), a fraction (``12.5/3``), or sit inside a URL.
Instead, one alternation matches whole tokens directly, trying the most
specific branches first:

    abbreviations > numbers > smileys > URLs > hashtags/@-replies
    > words > single symbols

Characters not claimed by any branch (whitespace, stray punctuation) are
skipped.  The matcher scans left to right and, at each position, takes the
first branch that matches, so branch order is the priority order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

__all__ = ["Kind", "Token", "tokenize", "extract_hashtags", "SYMBOL_CHARS"]


class Kind(str, Enum):
    ABBREVIATION = "Abbreviation"
    NUMBER_LIKE = "NumberLike"
    SMILEY = "Smiley"
    URL = "Url"
    HASHTAG = "Hashtag"
    AT_REPLY = "AtReply"
    WORD = "Word"
    SYMBOL = "Symbol"


@dataclass(frozen=True)
class Token:
    text: str
    kind: Kind
    start: int
    end: int

    @property
    def span(self):
        return (self.start, self.end)


# Currency and marker characters emitted as single Symbol tokens.  Sentence
# punctuation is deliberately NOT included: the golden corpus treats . ! ? ,
# as skippable, the same as whitespace.
SYMBOL_CHARS = "$£€¥¢§@&#"

ABBREVIATIONS = r"c/o|b/c|w/o|w/|\+/-"
NUMBER = r"\d+(?:[.,:/-]\d+)+"
SMILEY = r"(?:[:;][-=]?|=)[Dp(|)][D()]*|<3+"
URL = r"(?:https?://|www\.)[a-zA-Z0-9/.?=&\-#]*[a-zA-Z0-9/]"
TAG_OR_REPLY = r"[#@]\w+"
WORD = r"\w+(?:-\w+)*(?:'\w+)?"
SYMBOL = "[" + re.escape(SYMBOL_CHARS) + "]"

TOKEN_RE = re.compile(
    "|".join(
        f"(?P<{name}>{pattern})"
        for name, pattern in [
            ("abbrev", ABBREVIATIONS),
            ("number", NUMBER),
            ("smiley", SMILEY),
            ("url", URL),
            ("tag", TAG_OR_REPLY),
            ("word", WORD),
            ("symbol", SYMBOL),
        ]
    )
)

_GROUP_KINDS = {
    "abbrev": Kind.ABBREVIATION,
    "number": Kind.NUMBER_LIKE,
    "smiley": Kind.SMILEY,
    "url": Kind.URL,
    "word": Kind.WORD,
    "symbol": Kind.SYMBOL,
}


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; characters between matches are dropped."""
    tokens = []
    for m in TOKEN_RE.finditer(text):
        group = m.lastgroup
        if group == "tag":
            kind = Kind.HASHTAG if m.group()[0] == "#" else Kind.AT_REPLY
        else:
            kind = _GROUP_KINDS[group]
        tokens.append(Token(m.group(), kind, m.start(), m.end()))
    return tokens


def extract_hashtags(text: str) -> list[str]:
    """Hashtag names in order of appearance, lowercased, ``#`` stripped.

    Duplicates are preserved; callers that need tweet-level set semantics
    deduplicate themselves.
    """
    return [t.text[1:].lower() for t in tokenize(text) if t.kind is Kind.HASHTAG]
