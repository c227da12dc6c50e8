import hashlib
import json
from pathlib import Path

import pytest

from htx.corpus import CorpusIndex, Tweet
from htx.errors import DuplicateId, HtxError

from oracles import brute_force_vocab

FIXTURES = Path(__file__).parent.parent / "fixtures"
MINI100 = FIXTURES / "mini100.jsonl"


def write_corpus(tmp_path, records, name="corpus.jsonl"):
    path = tmp_path / name
    with path.open("w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r) + "\n")
    return path


def make_record(i, text, ts=1257000000):
    return {"id": i, "created_at": ts, "text": text}


class TestIngest:
    def test_support_filter(self, tmp_path):
        records = [
            make_record(1, "#a and #b"),
            make_record(2, "#a again"),
            make_record(3, "#a third time"),
            make_record(4, "no tags"),
            make_record(5, "#c alone"),
        ]
        idx = CorpusIndex.ingest(write_corpus(tmp_path, records), min_support=3)
        assert idx.vocab == {"a": 3}
        assert idx.stats.indexed_tweets == 3
        assert [t.id for t in idx.tweets_for("a")] == [1, 2, 3]

    def test_min_support_one_keeps_everything(self, tmp_path):
        records = [make_record(1, "#a #b"), make_record(2, "#c")]
        idx = CorpusIndex.ingest(write_corpus(tmp_path, records), min_support=1)
        assert set(idx.vocab) == {"a", "b", "c"}

    def test_min_support_zero_rejected(self, tmp_path):
        path = write_corpus(tmp_path, [make_record(1, "#a")])
        with pytest.raises(HtxError):
            CorpusIndex.ingest(path, min_support=0)

    def test_per_tweet_multiplicity_collapses(self, tmp_path):
        records = [make_record(i, "#a #a #b") for i in range(3)]
        idx = CorpusIndex.ingest(write_corpus(tmp_path, records), min_support=3)
        assert idx.vocab == {"a": 3, "b": 3}

    def test_duplicate_id_is_hard_error(self, tmp_path):
        records = [make_record(7, "#a"), make_record(7, "#b")]
        with pytest.raises(DuplicateId):
            CorpusIndex.ingest(write_corpus(tmp_path, records), min_support=1)

    def test_malformed_lines_skipped_and_counted(self, tmp_path):
        path = tmp_path / "noisy.jsonl"
        path.write_text(
            json.dumps(make_record(1, "#a")) + "\n"
            "not json at all\n"
            '{"id": "string-id", "created_at": 0, "text": "#a"}\n'
            '{"id": 2, "created_at": 0}\n'
            + json.dumps(make_record(3, "#a")) + "\n"
            + json.dumps(make_record(4, "#a")) + "\n",
            encoding="utf-8",
        )
        idx = CorpusIndex.ingest(path, min_support=3)
        assert idx.stats.malformed_lines == 3
        assert idx.stats.total_tweets == 3
        assert idx.vocab == {"a": 3}

    def test_mini100_against_brute_force(self):
        idx = CorpusIndex.ingest(MINI100, min_support=3)
        raw = [json.loads(line) for line in MINI100.read_text().splitlines()]
        parsed = [(r["id"], Tweet.from_record(r).hashtags) for r in raw]
        assert idx.vocab == brute_force_vocab(parsed, 3)
        assert idx.stats.total_tweets == 100
        assert idx.stats.indexed_tweets == 100


@pytest.fixture(scope="module")
def mini():
    return CorpusIndex.ingest(MINI100, min_support=3)


class TestQueries:

    def test_tweets_for_membership_matches_brute_force(self, mini):
        raw = [json.loads(line) for line in MINI100.read_text().splitlines()]
        by_tag = {}
        for r in raw:
            for h in Tweet.from_record(r).hashtags:
                by_tag.setdefault(h, []).append(r["id"])
        for h in mini.vocab:
            assert [t.id for t in mini.tweets_for(h)] == sorted(by_tag[h])

    def test_unknown_hashtag_empty(self, mini):
        assert mini.tweets_for("nosuchtag") == []

    def test_below_support_hashtag_empty(self, mini):
        # 'unicorn' appears in the fixture but under the threshold.
        assert "unicorn" not in mini.vocab
        assert mini.tweets_for("unicorn") == []

    def test_vocab_counts_equal_postings_lengths(self, mini):
        for h, freq in mini.vocab.items():
            assert freq == len(mini.tweets_for(h))

    def test_tweets_for_are_sorted_and_contain_tag(self, mini):
        for h in mini.vocab:
            tweets = mini.tweets_for(h)
            ids = [t.id for t in tweets]
            assert ids == sorted(ids)
            assert all(h in t.hashtags for t in tweets)


class TestTimeline:
    def test_single_tweet_single_bucket(self, tmp_path):
        idx = CorpusIndex.ingest(
            write_corpus(tmp_path, [make_record(1, "#a", ts=1257033600)]), min_support=1
        )
        assert idx.timeline_histogram("day") == [("2009-11-01", 1)]

    def test_empty_corpus(self, tmp_path):
        idx = CorpusIndex.ingest(write_corpus(tmp_path, []), min_support=1)
        assert idx.timeline_histogram("day") == []

    @pytest.mark.parametrize("bucket", ["day", "week", "month"])
    def test_mini100_partitions_corpus(self, bucket):
        idx = CorpusIndex.ingest(MINI100, min_support=3)
        hist = idx.timeline_histogram(bucket)
        assert sum(c for _, c in hist) == 100
        assert [b for b, _ in hist] == sorted(b for b, _ in hist)

    def test_week_starts_monday(self, tmp_path):
        # 2009-11-04 was a Wednesday; its week bucket starts 2009-11-02.
        ts = 1257292800  # 2009-11-04 00:00 UTC
        idx = CorpusIndex.ingest(
            write_corpus(tmp_path, [make_record(1, "#a", ts=ts)]), min_support=1
        )
        assert idx.timeline_histogram("week") == [("2009-11-02", 1)]

    def test_bad_bucket(self, tmp_path):
        idx = CorpusIndex.ingest(write_corpus(tmp_path, [make_record(1, "#a")]), 1)
        with pytest.raises(HtxError):
            idx.timeline_histogram("year")


def dir_digest(d):
    h = hashlib.sha256()
    for p in sorted(Path(d).rglob("*")):
        if p.is_file():
            h.update(p.name.encode())
            h.update(p.read_bytes())
    return h.hexdigest()


class TestPersistence:
    def test_round_trip(self, tmp_path):
        idx = CorpusIndex.ingest(MINI100, min_support=3)
        idx.save(tmp_path / "index")
        loaded = CorpusIndex.load(tmp_path / "index")
        assert loaded.vocab == idx.vocab
        assert loaded.min_support == idx.min_support
        assert loaded.stats.as_dict() == idx.stats.as_dict()
        for h in idx.vocab:
            assert [t.id for t in loaded.tweets_for(h)] == [
                t.id for t in idx.tweets_for(h)
            ]
        assert list(loaded.timeline_histogram("day")) == list(
            idx.timeline_histogram("day")
        )

    def test_rebuild_is_byte_identical(self, tmp_path):
        CorpusIndex.ingest(MINI100, min_support=3).save(tmp_path / "a")
        CorpusIndex.ingest(MINI100, min_support=3).save(tmp_path / "b")
        assert dir_digest(tmp_path / "a") == dir_digest(tmp_path / "b")

    def test_save_refuses_overwrite_by_default(self, tmp_path):
        idx = CorpusIndex.ingest(MINI100, min_support=3)
        idx.save(tmp_path / "index")
        with pytest.raises(HtxError):
            idx.save(tmp_path / "index")
        idx.save(tmp_path / "index", overwrite=True)

    def test_load_rejects_non_index_dir(self, tmp_path):
        (tmp_path / "manifest.json").write_text('{"format": "other"}')
        with pytest.raises(HtxError):
            CorpusIndex.load(tmp_path)
