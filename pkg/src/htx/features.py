"""Classification features for a hashtag occurrence inside a tweet.

Each (hashtag, tweet) instance becomes a set of binary feature names
drawn from a closed template family:

    win[d]=<word>       window words at offsets -2..+2 around the hashtag
    shape[d]=<shape>    orthographic shape of those words
    pos[d]=<tag>        their part-of-speech tags (when a tagger is given)
    geo[d]=<kind>       gazetteer hits: city, region, country, any
    hshape=<shape>      shape of the hashtag name itself (no leading #)
    first_token         the hashtag opens the tweet
    fifth=<1..5>        which fifth of the token sequence holds the hashtag
    tail_all_hashtags   everything after the hashtag is a hashtag
    cooc=<tag>          the five strongest co-occurring hashtags
    cooc_geo=<kind>     gazetteer hits for those hashtags

With ``positional=False`` the window templates drop their offsets and act
as a bag of words.  Window features never include the hashtag itself and
simply truncate at tweet boundaries.
"""

from __future__ import annotations

import gzip
import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import HashtagAbsent, HtxError
from .tokenizer import Kind, Token, tokenize

# -- shapes ------------------------------------------------------------------

SHAPES = (
    "at-reply",
    "hashtag",
    "link",
    "number",
    "symbol",
    "ends-in-4-digits",
    "ends-in-3-digits",
    "ends-in-2-digits",
    "ends-in-1-digit",
    "contains-digits",
    "all-lower",
    "all-upper",
    "init-cap",
    "mixed-cap",
)

_NUMBER_RE = re.compile(r"\d+(?:[.,:/-]\d+)*")
_DIGIT_SUFFIX_RE = re.compile(r"\d+$")
_ANY_DIGIT_RE = re.compile(r"\d")


def word_shape(text: str) -> str:
    """Shape of a bare string, ignoring token kind.  Total: every string maps."""
    if _NUMBER_RE.fullmatch(text):
        return "number"
    m = _DIGIT_SUFFIX_RE.search(text)
    if m:
        run = min(len(m.group()), 4)
        return f"ends-in-{run}-digit" + ("s" if run > 1 else "")
    if _ANY_DIGIT_RE.search(text):
        return "contains-digits"
    if text.islower():
        return "all-lower"
    if text.isupper():
        return "all-upper"
    if text[:1].isupper() and text[1:].islower():
        return "init-cap"
    return "mixed-cap"


_KIND_SHAPES = {
    Kind.AT_REPLY: "at-reply",
    Kind.HASHTAG: "hashtag",
    Kind.URL: "link",
    Kind.SYMBOL: "symbol",
    Kind.NUMBER_LIKE: "number",
}


def shape_of(token: Token) -> str:
    """First matching shape in the fixed precedence order."""
    kind_shape = _KIND_SHAPES.get(token.kind)
    if kind_shape is not None:
        return kind_shape
    return word_shape(token.text)


# -- gazetteer -----------------------------------------------------------------

CATEGORIES = ("city", "region", "country")

# alternateNames rows carrying links/codes rather than names
_NON_NAME_LANGS = {"link", "wkdt", "post", "iata", "icao", "faac", "abbr", "unlc"}


class Gazetteer:
    """Case-folded place-name lookup over city/region/country sets.

    Multi-word names are additionally indexed by their individual tokens
    (partial matches), since tweets rarely spell out official names.
    """

    def __init__(self, names: dict[str, set[str]]):
        self._full = {cat: set(names.get(cat, ())) for cat in CATEGORIES}
        self._partial = {cat: set() for cat in CATEGORIES}
        for cat, full in self._full.items():
            for name in full:
                parts = name.split()
                if len(parts) > 1:
                    self._partial[cat].update(parts)

    def categories(self, word: str, include_partial: bool = True) -> frozenset:
        w = word.casefold()
        out = {cat for cat in CATEGORIES if w in self._full[cat]}
        if include_partial:
            out.update(cat for cat in CATEGORIES if w in self._partial[cat])
        return frozenset(out)

    def is_partial(self, word: str, category: str) -> bool:
        w = word.casefold()
        return w in self._partial[category] and w not in self._full[category]

    def counts(self) -> dict[str, int]:
        return {cat: len(self._full[cat]) for cat in CATEGORIES}

    # -- geonames ingestion -------------------------------------------

    @classmethod
    def from_geonames(cls, dirpath, min_population: int = 1000) -> "Gazetteer":
        dirpath = Path(dirpath)
        names = {cat: set() for cat in CATEGORIES}
        ids = {cat: set() for cat in CATEGORIES}

        cities_files = sorted(dirpath.glob("cities*.txt"))
        if not cities_files:
            raise HtxError(f"no cities*.txt file in {dirpath}")
        for path in cities_files:
            with path.open("r", encoding="utf-8") as f:
                for line in f:
                    cols = line.rstrip("\n").split("\t")
                    if len(cols) < 15:
                        continue
                    population = int(cols[14] or 0)
                    if population < min_population:
                        continue
                    ids["city"].add(cols[0])
                    names["city"].add(cols[1].casefold())
                    if cols[2]:
                        names["city"].add(cols[2].casefold())
                    for alt in cols[3].split(","):
                        if alt:
                            names["city"].add(alt.casefold())

        admin = dirpath / "admin1CodesASCII.txt"
        if admin.exists():
            with admin.open("r", encoding="utf-8") as f:
                for line in f:
                    cols = line.rstrip("\n").split("\t")
                    if len(cols) < 4:
                        continue
                    names["region"].add(cols[1].casefold())
                    names["region"].add(cols[2].casefold())
                    ids["region"].add(cols[3])

        countries = dirpath / "countryInfo.txt"
        if countries.exists():
            with countries.open("r", encoding="utf-8") as f:
                for line in f:
                    if line.startswith("#") or not line.strip():
                        continue
                    cols = line.rstrip("\n").split("\t")
                    if len(cols) < 5:
                        continue
                    names["country"].add(cols[4].casefold())
                    if len(cols) > 16 and cols[16]:
                        ids["country"].add(cols[16])

        alternates = dirpath / "alternateNames.txt"
        if alternates.exists():
            with alternates.open("r", encoding="utf-8") as f:
                for line in f:
                    cols = line.rstrip("\n").split("\t")
                    if len(cols) < 4 or cols[2] in _NON_NAME_LANGS:
                        continue
                    for cat in CATEGORIES:
                        if cols[1] in ids[cat]:
                            names[cat].add(cols[3].casefold())
        return cls(names)

    # -- persistence ----------------------------------------------------

    def save(self, path) -> None:
        payload = {
            "format": "htx-gazetteer",
            "version": 1,
            "names": {cat: sorted(self._full[cat]) for cat in CATEGORIES},
        }
        raw = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
        with open(path, "wb") as f:
            # filename and mtime pinned so identical gazetteers are byte-identical
            with gzip.GzipFile(filename="", fileobj=f, mode="wb", mtime=0) as gz:
                gz.write(raw)

    @classmethod
    def load(cls, path) -> "Gazetteer":
        with gzip.open(path, "rb") as f:
            payload = json.loads(f.read().decode("utf-8"))
        if payload.get("format") != "htx-gazetteer":
            raise HtxError(f"{path} is not a gazetteer file")
        return cls({cat: set(v) for cat, v in payload["names"].items()})


# -- extraction ------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureVector:
    active: frozenset
    hashtag: str
    tweet_id: int
    position: int

    def __contains__(self, name: str) -> bool:
        return name in self.active


def _bare_text(token: Token) -> str:
    if token.kind in (Kind.HASHTAG, Kind.AT_REPLY):
        return token.text[1:]
    return token.text


class FeatureExtractor:
    """Turns (hashtag, tweet) occurrences into binary feature sets.

    The extractor owns no mutable state; one instance may serve any number
    of threads once its store, gazetteer and tagger are built.
    """

    def __init__(
        self,
        store=None,
        gazetteer: Gazetteer | None = None,
        tagger=None,
        window: int = 5,
        positional: bool = True,
        top_cooccurring: int = 5,
    ):
        if window < 1 or window % 2 == 0:
            raise HtxError(f"window must be odd and positive, got {window}")
        self.store = store
        self.gazetteer = gazetteer
        self.tagger = tagger
        self.window = window
        self.positional = positional
        self.top_cooccurring = top_cooccurring

    def _slot(self, template: str, offset: int) -> str:
        if not self.positional:
            return template
        return f"{template}[{offset:+d}]"

    def extract(self, hashtag: str, tweet) -> FeatureVector:
        tokens = tokenize(tweet.text)
        position = None
        for i, tok in enumerate(tokens):
            if tok.kind is Kind.HASHTAG and tok.text[1:].lower() == hashtag:
                position = i
                break
        if position is None:
            raise HashtagAbsent(f"#{hashtag} does not occur in tweet {tweet.id}")

        active = set()
        tags = None
        if self.tagger is not None:
            tags = self.tagger.tag([t.text for t in tokens])

        half = self.window // 2
        for offset in range(-half, half + 1):
            if offset == 0:
                continue
            i = position + offset
            if not 0 <= i < len(tokens):
                continue
            tok = tokens[i]
            active.add(f"{self._slot('win', offset)}={tok.text.lower()}")
            active.add(f"{self._slot('shape', offset)}={shape_of(tok)}")
            if tags is not None:
                active.add(f"{self._slot('pos', offset)}={tags[i]}")
            if self.gazetteer is not None:
                cats = self.gazetteer.categories(_bare_text(tok))
                for cat in cats:
                    active.add(f"{self._slot('geo', offset)}={cat}")
                if cats:
                    active.add(f"{self._slot('geo', offset)}=any")

        active.add(f"hshape={word_shape(hashtag)}")
        if position == 0:
            active.add("first_token")
        fifth = min(4, position * 5 // len(tokens)) + 1
        active.add(f"fifth={fifth}")
        if all(t.kind is Kind.HASHTAG for t in tokens[position + 1 :]):
            active.add("tail_all_hashtags")

        if self.store is not None:
            for neighbor, _count in self.store.dictionary(
                hashtag, self.top_cooccurring
            ):
                active.add(f"cooc={neighbor}")
                if self.gazetteer is not None:
                    cats = self.gazetteer.categories(neighbor)
                    for cat in cats:
                        active.add(f"cooc_geo={cat}")
                    if cats:
                        active.add("cooc_geo=any")

        return FeatureVector(
            active=frozenset(active),
            hashtag=hashtag,
            tweet_id=tweet.id,
            position=position,
        )


# Closed grammar for emitted names; tests fuzz every vector against it.
FEATURE_NAME_RE = re.compile(
    r"""
    win(\[[+-][0-9]+\])?=.*
    | shape(\[[+-][0-9]+\])?=(%(shapes)s)
    | pos(\[[+-][0-9]+\])?=.+
    | geo(\[[+-][0-9]+\])?=(city|region|country|any)
    | hshape=(%(shapes)s)
    | first_token
    | fifth=[1-5]
    | tail_all_hashtags
    | cooc=\w+
    | cooc_geo=(city|region|country|any)
    """
    % {"shapes": "|".join(SHAPES)},
    re.VERBOSE | re.DOTALL,
)
