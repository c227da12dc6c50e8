"""Disk-backed hashtag co-occurrence counts with top-k neighbor queries.

A pair count is the number of distinct tweets containing both hashtags.
Pairs are stored once under canonical order (lexicographically smaller
tag first), so symmetry holds by construction.

Building never materializes the full pair map in memory: per-tweet pair
emissions accumulate in a bounded buffer that spills to sorted temp files,
which are then merge-aggregated (classic external sort).  Two files come
out of the build:

    pairs.dat      records sorted by (a, b): u16 len + utf-8 tag, twice,
                   then u32 count (all little-endian)
    adjacency.dat  per-hashtag neighbor lists sorted by count desc, tag asc

plus TSV indexes locating each hashtag (``adjacency.idx.tsv`` has one row
per relevant hashtag, which doubles as the membership set) and a sparse
block index over ``pairs.dat`` (every 256th record) so point lookups touch
a single block.  A built store is immutable and safe for concurrent reads.
"""

from __future__ import annotations

import heapq
import itertools
import json
import struct
import tempfile
from bisect import bisect_right
from pathlib import Path

from .corpus import CorpusIndex, sha256_file, write_json
from .errors import HtxError

MANIFEST_FORMAT = "htx-cooccur"
MANIFEST_VERSION = 1

PAIR_BLOCK = 256  # records per sparse-index block

_LEN = struct.Struct("<H")
_COUNT = struct.Struct("<I")


def _encode_tag(tag: str) -> bytes:
    raw = tag.encode("utf-8")
    return _LEN.pack(len(raw)) + raw


def _read_tag(f):
    head = f.read(_LEN.size)
    if not head:
        return None
    (n,) = _LEN.unpack(head)
    return f.read(n).decode("utf-8")


def _spill(items, tmpdir):
    """Write one sorted spill file of (key..., count) tuples as JSON lines."""
    f = tempfile.TemporaryFile(mode="w+", encoding="utf-8", dir=tmpdir)
    for item in sorted(items):
        f.write(json.dumps(item, ensure_ascii=False) + "\n")
    f.seek(0)
    return f


def _iter_spill(f):
    for line in f:
        yield tuple(json.loads(line))


def _merge_aggregated(spills):
    """Merge sorted spill files, summing the trailing count of equal keys."""
    merged = heapq.merge(*(_iter_spill(f) for f in spills))
    for key, group in itertools.groupby(merged, key=lambda item: item[:-1]):
        yield key + (sum(item[-1] for item in group),)


class CooccurrenceStore:
    def __init__(self, path, manifest, adjacency_index, pair_block_index):
        self.path = Path(path)
        self.manifest = manifest
        self._adjacency = adjacency_index  # tag -> (offset, n_neighbors)
        self._blocks = pair_block_index  # sorted [((a, b), offset)]

    # -- build ----------------------------------------------------------

    @classmethod
    def build(
        cls, index: CorpusIndex, outdir, spill_threshold: int = 1_000_000
    ) -> "CooccurrenceStore":
        outdir = Path(outdir)
        if outdir.exists():
            raise HtxError(f"refusing to overwrite existing store at {outdir}")
        outdir.parent.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=outdir.name + ".tmp-", dir=outdir.parent))
        try:
            with tempfile.TemporaryDirectory(dir=tmp) as scratch:
                n_pairs, total_mass = cls._build_pairs(
                    index, tmp, scratch, spill_threshold
                )
                cls._build_adjacency(index, tmp, scratch, spill_threshold)
            manifest = {
                "format": MANIFEST_FORMAT,
                "version": MANIFEST_VERSION,
                "n_pairs": n_pairs,
                "n_hashtags": len(index.vocab),
                "total_pair_mass": total_mass,
                "files": {
                    name: sha256_file(tmp / name)
                    for name in (
                        "pairs.dat",
                        "pairs.idx.tsv",
                        "adjacency.dat",
                        "adjacency.idx.tsv",
                    )
                },
            }
            write_json(tmp / "manifest.json", manifest)
            tmp.rename(outdir)
        finally:
            if tmp.exists():
                import shutil

                shutil.rmtree(tmp, ignore_errors=True)
        return cls.open(outdir)

    @staticmethod
    def _emit_tweet_pairs(index):
        for tweet in index.iter_tweets():
            relevant = sorted(h for h in tweet.hashtags if h in index.vocab)
            yield from itertools.combinations(relevant, 2)

    @classmethod
    def _build_pairs(cls, index, tmp, scratch, spill_threshold):
        spills = []
        buffer: dict[tuple[str, str], int] = {}
        for pair in cls._emit_tweet_pairs(index):
            buffer[pair] = buffer.get(pair, 0) + 1
            if len(buffer) >= spill_threshold:
                spills.append(_spill([k + (v,) for k, v in buffer.items()], scratch))
                buffer.clear()
        spills.append(_spill([k + (v,) for k, v in buffer.items()], scratch))

        n_pairs = 0
        total_mass = 0
        with (tmp / "pairs.dat").open("wb") as dat, (tmp / "pairs.idx.tsv").open(
            "w", encoding="utf-8"
        ) as idx:
            offset = 0
            for a, b, count in _merge_aggregated(spills):
                if n_pairs % PAIR_BLOCK == 0:
                    idx.write(f"{a}\t{b}\t{offset}\n")
                record = _encode_tag(a) + _encode_tag(b) + _COUNT.pack(count)
                dat.write(record)
                offset += len(record)
                n_pairs += 1
                total_mass += count
        for f in spills:
            f.close()
        return n_pairs, total_mass

    @classmethod
    def _build_adjacency(cls, index, tmp, scratch, spill_threshold):
        # Re-stream the sorted pair file, emitting each pair in both
        # directions, keyed so each tag's neighbors land pre-sorted.
        def emissions():
            for a, b, count in cls._iter_pairs_file(tmp / "pairs.dat"):
                yield (a, -count, b, count)
                yield (b, -count, a, count)

        spills = []
        buffer = []
        for item in emissions():
            buffer.append(item)
            if len(buffer) >= spill_threshold:
                spills.append(_spill(buffer, scratch))
                buffer = []
        spills.append(_spill(buffer, scratch))

        merged = heapq.merge(*(_iter_spill(f) for f in spills))
        with (tmp / "adjacency.dat").open("wb") as dat, (
            tmp / "adjacency.idx.tsv"
        ).open("w", encoding="utf-8") as idx:
            offset = 0
            grouped = itertools.groupby(merged, key=lambda item: item[0])
            grouped_tags = {}
            for tag, group in grouped:
                start, n = offset, 0
                for _, _, neighbor, count in group:
                    record = _encode_tag(neighbor) + _COUNT.pack(count)
                    dat.write(record)
                    offset += len(record)
                    n += 1
                grouped_tags[tag] = (start, n)
            # Every relevant hashtag gets a row, including isolated ones.
            for tag in sorted(index.vocab):
                start, n = grouped_tags.get(tag, (0, 0))
                idx.write(f"{tag}\t{start}\t{n}\n")
        for f in spills:
            f.close()

    # -- open / queries ---------------------------------------------------

    @classmethod
    def open(cls, path) -> "CooccurrenceStore":
        path = Path(path)
        manifest = json.loads((path / "manifest.json").read_text(encoding="utf-8"))
        if manifest.get("format") != MANIFEST_FORMAT:
            raise HtxError(f"{path} is not a co-occurrence store")
        if manifest.get("version") != MANIFEST_VERSION:
            raise HtxError(f"unsupported store version {manifest.get('version')}")
        adjacency = {}
        with (path / "adjacency.idx.tsv").open("r", encoding="utf-8") as f:
            for line in f:
                tag, offset, n = line.rstrip("\n").split("\t")
                adjacency[tag] = (int(offset), int(n))
        blocks = []
        with (path / "pairs.idx.tsv").open("r", encoding="utf-8") as f:
            for line in f:
                a, b, offset = line.rstrip("\n").split("\t")
                blocks.append(((a, b), int(offset)))
        return cls(path, manifest, adjacency, blocks)

    @property
    def n_pairs(self) -> int:
        return self.manifest["n_pairs"]

    @property
    def total_pair_mass(self) -> int:
        return self.manifest["total_pair_mass"]

    def __contains__(self, hashtag: str) -> bool:
        return hashtag in self._adjacency

    def hashtags(self):
        return self._adjacency.keys()

    @staticmethod
    def _iter_pairs_file(path):
        with open(path, "rb") as f:
            while True:
                a = _read_tag(f)
                if a is None:
                    return
                b = _read_tag(f)
                (count,) = _COUNT.unpack(f.read(_COUNT.size))
                yield a, b, count

    def iter_pairs(self):
        """Stream (a, b, count) in canonical sorted order."""
        yield from self._iter_pairs_file(self.path / "pairs.dat")

    def count(self, a: str, b: str) -> int:
        """Co-occurrence count of two hashtags; 0 when never paired."""
        if a == b:
            return 0
        key = (a, b) if a < b else (b, a)
        if not self._blocks:
            return 0
        i = bisect_right(self._blocks, (key, float("inf"))) - 1
        if i < 0:
            return 0
        offset = self._blocks[i][1]
        with (self.path / "pairs.dat").open("rb") as f:
            f.seek(offset)
            for _ in range(PAIR_BLOCK):
                pa = _read_tag(f)
                if pa is None:
                    break
                pb = _read_tag(f)
                (count,) = _COUNT.unpack(f.read(_COUNT.size))
                if (pa, pb) == key:
                    return count
                if (pa, pb) > key:
                    break
        return 0

    def dictionary(self, hashtag: str, k: int = 10) -> list[tuple[str, int]]:
        """Top-k co-occurring hashtags, count descending, ties lexical.

        Unknown hashtags yield an empty list; use ``hashtag in store`` to
        distinguish that from a known hashtag without neighbors.
        """
        entry = self._adjacency.get(hashtag)
        if entry is None:
            return []
        offset, n = entry
        out = []
        with (self.path / "adjacency.dat").open("rb") as f:
            f.seek(offset)
            for _ in range(min(k, n)):
                neighbor = _read_tag(f)
                (count,) = _COUNT.unpack(f.read(_COUNT.size))
                out.append((neighbor, count))
        return out
