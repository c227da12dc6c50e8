"""Tweet corpus ingestion and the persistent hashtag -> tweets index.

Input is JSON-lines, one ``{"id": ..., "created_at": ..., "text": ...}``
object per line.  Ingestion is a two-pass build: the first pass counts in
how many tweets each hashtag occurs, the second indexes only tweets that
contain at least one hashtag above the support threshold.  Hashtags below
the threshold never enter the vocabulary or the postings.

On-disk layout (see docs/file-formats.md for the byte-level contract):

    indexdir/
      manifest.json      version, min_support, stats, file digests
      tweets.jsonl       indexed tweets sorted by id
      postings.idx.tsv   hashtag <TAB> byte offset <TAB> id count
      postings.bin       concatenated little-endian uint64 id arrays

The build is written to a temporary sibling directory and renamed into
place, so readers never observe a partial index.  A written index is
immutable; any number of concurrent readers may share one instance.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import struct
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .errors import DuplicateId, HtxError
from .tokenizer import extract_hashtags

log = logging.getLogger(__name__)

MANIFEST_FORMAT = "htx-corpus-index"
MANIFEST_VERSION = 1

_ID_STRUCT = struct.Struct("<Q")


@dataclass(frozen=True)
class Tweet:
    id: int
    created_at: int  # UTC seconds
    text: str
    hashtags: frozenset[str] = field(default_factory=frozenset)

    @classmethod
    def from_record(cls, record: dict) -> "Tweet":
        return cls(
            id=record["id"],
            created_at=record["created_at"],
            text=record["text"],
            hashtags=frozenset(extract_hashtags(record["text"])),
        )


@dataclass
class IngestStats:
    total_tweets: int = 0
    malformed_lines: int = 0
    relevant_hashtags: int = 0
    indexed_tweets: int = 0

    def as_dict(self) -> dict:
        return {
            "total_tweets": self.total_tweets,
            "malformed_lines": self.malformed_lines,
            "relevant_hashtags": self.relevant_hashtags,
            "indexed_tweets": self.indexed_tweets,
        }


def _parse_line(line: str, lineno: int):
    """Return a parsed record or None for a malformed line (logged)."""
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        log.warning("skipping malformed line %d: %s", lineno, exc)
        return None
    if not isinstance(record, dict):
        log.warning("skipping malformed line %d: not an object", lineno)
        return None
    for key, typ in (("id", int), ("created_at", int), ("text", str)):
        value = record.get(key)
        if not isinstance(value, typ) or isinstance(value, bool):
            log.warning("skipping malformed line %d: bad %r field", lineno, key)
            return None
    return record


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(path, payload) -> None:
    """Canonical JSON serialization used by every manifest in the toolkit."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, sort_keys=True, indent=2, ensure_ascii=False)
        f.write("\n")


class CorpusIndex:
    """Immutable snapshot of an ingested corpus."""

    def __init__(self, tweets, postings, vocab, min_support, stats):
        self._tweets = tweets  # id -> Tweet
        self._postings = postings  # hashtag -> sorted id list
        self.vocab = vocab  # hashtag -> tweet frequency
        self.min_support = min_support
        self.stats = stats

    # -- construction -------------------------------------------------

    @classmethod
    def ingest(cls, path, min_support: int = 3) -> "CorpusIndex":
        if min_support < 1:
            raise HtxError(f"min_support must be >= 1, got {min_support}")
        path = Path(path)
        stats = IngestStats()

        # Pass 1: tweet frequency per hashtag.
        counts: dict[str, int] = {}
        seen_ids: set[int] = set()
        with path.open("r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                record = _parse_line(line, lineno)
                if record is None:
                    stats.malformed_lines += 1
                    continue
                if record["id"] in seen_ids:
                    raise DuplicateId(f"duplicate tweet id {record['id']} at line {lineno}")
                seen_ids.add(record["id"])
                stats.total_tweets += 1
                for h in set(extract_hashtags(record["text"])):
                    counts[h] = counts.get(h, 0) + 1

        vocab = {h: c for h, c in counts.items() if c >= min_support}
        stats.relevant_hashtags = len(vocab)

        # Pass 2: index tweets that carry at least one relevant hashtag.
        tweets: dict[int, Tweet] = {}
        postings: dict[str, list[int]] = {h: [] for h in vocab}
        with path.open("r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                record = _parse_line(line, lineno)
                if record is None:
                    continue
                tweet = Tweet.from_record(record)
                relevant = tweet.hashtags & vocab.keys()
                if not relevant:
                    continue
                tweets[tweet.id] = tweet
                for h in relevant:
                    postings[h].append(tweet.id)

        for ids in postings.values():
            ids.sort()
        stats.indexed_tweets = len(tweets)
        return cls(tweets, postings, vocab, min_support, stats)

    # -- persistence --------------------------------------------------

    def save(self, outdir, overwrite: bool = False) -> None:
        """Write the index atomically: build in a temp dir, then rename."""
        outdir = Path(outdir)
        if outdir.exists() and not overwrite:
            raise HtxError(f"refusing to overwrite existing index at {outdir}")
        outdir.parent.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=outdir.name + ".tmp-", dir=outdir.parent))
        try:
            with (tmp / "tweets.jsonl").open("w", encoding="utf-8") as f:
                for tid in sorted(self._tweets):
                    t = self._tweets[tid]
                    f.write(
                        json.dumps(
                            {"id": t.id, "created_at": t.created_at, "text": t.text},
                            sort_keys=True,
                            ensure_ascii=False,
                            separators=(",", ":"),
                        )
                        + "\n"
                    )
            with (tmp / "postings.bin").open("wb") as bin_f, (
                tmp / "postings.idx.tsv"
            ).open("w", encoding="utf-8") as idx_f:
                offset = 0
                for h in sorted(self._postings):
                    ids = self._postings[h]
                    idx_f.write(f"{h}\t{offset}\t{len(ids)}\n")
                    for tid in ids:
                        bin_f.write(_ID_STRUCT.pack(tid))
                    offset += len(ids) * _ID_STRUCT.size
            manifest = {
                "format": MANIFEST_FORMAT,
                "version": MANIFEST_VERSION,
                "min_support": self.min_support,
                "stats": self.stats.as_dict(),
                "files": {
                    name: sha256_file(tmp / name)
                    for name in ("tweets.jsonl", "postings.idx.tsv", "postings.bin")
                },
            }
            write_json(tmp / "manifest.json", manifest)
            if outdir.exists():
                import shutil

                shutil.rmtree(outdir)
            os.rename(tmp, outdir)
        finally:
            if tmp.exists():
                import shutil

                shutil.rmtree(tmp, ignore_errors=True)

    @classmethod
    def load(cls, indexdir) -> "CorpusIndex":
        indexdir = Path(indexdir)
        manifest = json.loads((indexdir / "manifest.json").read_text(encoding="utf-8"))
        if manifest.get("format") != MANIFEST_FORMAT:
            raise HtxError(f"{indexdir} is not a corpus index")
        if manifest.get("version") != MANIFEST_VERSION:
            raise HtxError(f"unsupported index version {manifest.get('version')}")

        tweets: dict[int, Tweet] = {}
        with (indexdir / "tweets.jsonl").open("r", encoding="utf-8") as f:
            for line in f:
                record = json.loads(line)
                tweet = Tweet.from_record(record)
                tweets[tweet.id] = tweet

        vocab: dict[str, int] = {}
        postings: dict[str, list[int]] = {}
        raw = (indexdir / "postings.bin").read_bytes()
        with (indexdir / "postings.idx.tsv").open("r", encoding="utf-8") as f:
            for line in f:
                h, offset_s, count_s = line.rstrip("\n").split("\t")
                offset, count = int(offset_s), int(count_s)
                ids = [
                    _ID_STRUCT.unpack_from(raw, offset + i * _ID_STRUCT.size)[0]
                    for i in range(count)
                ]
                vocab[h] = count
                postings[h] = ids

        stats = IngestStats(**manifest["stats"])
        return cls(tweets, postings, vocab, manifest["min_support"], stats)

    # -- queries ------------------------------------------------------

    def __contains__(self, hashtag: str) -> bool:
        return hashtag in self.vocab

    def __len__(self) -> int:
        return len(self._tweets)

    def tweet(self, tweet_id: int) -> Tweet | None:
        return self._tweets.get(tweet_id)

    def tweets_for(self, hashtag: str) -> list[Tweet]:
        """All indexed tweets containing ``hashtag``, ordered by id."""
        return [self._tweets[tid] for tid in self._postings.get(hashtag, [])]

    def iter_tweets(self):
        for tid in sorted(self._tweets):
            yield self._tweets[tid]

    def top_hashtags(self, limit: int | None = None):
        """Hashtags by descending tweet frequency, ties broken lexically."""
        ranked = sorted(self.vocab.items(), key=lambda hc: (-hc[1], hc[0]))
        return ranked if limit is None else ranked[:limit]

    def timeline_histogram(self, bucket: str = "day"):
        """(bucket start ISO date, tweet count) pairs covering every indexed tweet."""
        if bucket not in ("day", "week", "month"):
            raise HtxError(f"unknown bucket {bucket!r}")
        counts: dict[str, int] = {}
        for t in self._tweets.values():
            day = datetime.fromtimestamp(t.created_at, tz=timezone.utc).date()
            if bucket == "week":
                day = day - timedelta(days=day.weekday())
            elif bucket == "month":
                day = day.replace(day=1)
            key = day.isoformat()
            counts[key] = counts.get(key, 0) + 1
        return sorted(counts.items())
