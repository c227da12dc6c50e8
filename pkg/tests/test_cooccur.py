import itertools
import json
import random
from pathlib import Path

import pytest

from htx.cooccur import CooccurrenceStore
from htx.corpus import CorpusIndex, Tweet
from htx.errors import HtxError

from oracles import brute_force_cooccurrence, brute_force_top_k

FIXTURES = Path(__file__).parent.parent / "fixtures"
MINI100 = FIXTURES / "mini100.jsonl"


def build_store(tmp_path, records, min_support=1, spill_threshold=1_000_000):
    path = tmp_path / "corpus.jsonl"
    with path.open("w", encoding="utf-8") as f:
        for i, text in enumerate(records):
            f.write(json.dumps({"id": i + 1, "created_at": 1257000000, "text": text}) + "\n")
    index = CorpusIndex.ingest(path, min_support=min_support)
    store = CooccurrenceStore.build(
        index, tmp_path / "store", spill_threshold=spill_threshold
    )
    return index, store


class TestBuild:
    def test_single_tweet_triangle(self, tmp_path):
        _, store = build_store(tmp_path, ["#a #b #c"])
        assert dict(((a, b), c) for a, b, c in store.iter_pairs()) == {
            ("a", "b"): 1,
            ("a", "c"): 1,
            ("b", "c"): 1,
        }

    def test_set_semantics_per_tweet(self, tmp_path):
        _, store = build_store(tmp_path, ["#a something #a and #b"])
        assert store.count("a", "b") == 1

    def test_empty_corpus(self, tmp_path):
        _, store = build_store(tmp_path, [])
        assert store.n_pairs == 0
        assert list(store.iter_pairs()) == []
        assert store.dictionary("anything") == []

    def test_refuses_overwrite(self, tmp_path):
        index, _ = build_store(tmp_path, ["#a #b"])
        with pytest.raises(HtxError):
            CooccurrenceStore.build(index, tmp_path / "store")

    def test_only_relevant_hashtags_enter(self, tmp_path):
        texts = ["#a #b #rare"] + ["#a #b"] * 2
        _, store = build_store(tmp_path, texts, min_support=3)
        assert store.count("a", "b") == 3
        assert store.count("a", "rare") == 0
        assert "rare" not in store

    def test_spill_path_equals_in_memory(self, tmp_path):
        rng = random.Random(7)
        tags = [f"t{i}" for i in range(20)]
        texts = [
            " ".join("#" + t for t in rng.sample(tags, rng.randint(2, 6)))
            for _ in range(200)
        ]
        (tmp_path / "small").mkdir()
        (tmp_path / "big").mkdir()
        _, small = build_store(tmp_path / "small", texts, spill_threshold=5)
        _, big = build_store(tmp_path / "big", texts)
        assert list(small.iter_pairs()) == list(big.iter_pairs())
        for t in tags:
            assert small.dictionary(t, 10) == big.dictionary(t, 10)


@pytest.fixture(scope="module")
def mini(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("mini")
    index = CorpusIndex.ingest(MINI100, min_support=3)
    store = CooccurrenceStore.build(index, tmp / "store")
    raw = [json.loads(line) for line in MINI100.read_text().splitlines()]
    parsed = [(r["id"], Tweet.from_record(r).hashtags) for r in raw]
    oracle_pairs = brute_force_cooccurrence(parsed, set(index.vocab))
    return index, store, oracle_pairs


class TestQueries:
    def test_counts_match_brute_force(self, mini):
        _, store, oracle = mini
        got = {(a, b): c for a, b, c in store.iter_pairs()}
        assert got == oracle

    def test_point_lookups(self, mini):
        _, store, oracle = mini
        for (a, b), c in oracle.items():
            assert store.count(a, b) == c

    def test_symmetry(self, mini):
        _, store, oracle = mini
        for a, b in list(oracle)[:200]:
            assert store.count(a, b) == store.count(b, a)

    def test_self_count_zero(self, mini):
        _, store, _ = mini
        assert store.count("music", "music") == 0

    def test_absent_pair_zero(self, mini):
        _, store, _ = mini
        assert store.count("music", "nosuchtag") == 0

    def test_dictionaries_match_brute_force(self, mini):
        index, store, oracle = mini
        for h in index.vocab:
            assert store.dictionary(h, 10) == brute_force_top_k(oracle, h, 10)

    def test_top_k_sorted_and_prefix_consistent(self, mini):
        index, store, _ = mini
        for h in index.vocab:
            top10 = store.dictionary(h, 10)
            counts = [c for _, c in top10]
            assert counts == sorted(counts, reverse=True)
            for (t1, c1), (t2, c2) in zip(top10, top10[1:]):
                if c1 == c2:
                    assert t1 < t2
            assert store.dictionary(h, 5) == top10[:5]
            assert top10 == store.dictionary(h, 11)[:10]

    def test_excludes_self(self, mini):
        index, store, _ = mini
        for h in index.vocab:
            assert h not in [t for t, _ in store.dictionary(h, 10)]

    def test_unknown_vs_known_without_neighbors(self, tmp_path):
        texts = ["#a #b"] * 3 + ["#lonely"] * 3
        _, store = build_store(tmp_path, texts, min_support=3)
        assert "lonely" in store
        assert store.dictionary("lonely") == []
        assert "ghost" not in store
        assert store.dictionary("ghost") == []

    def test_single_neighbor(self, tmp_path):
        _, store = build_store(tmp_path, ["#a #b"] * 3, min_support=3)
        assert store.dictionary("a") == [("b", 3)]

    def test_total_pair_mass_identity(self, mini):
        index, store, _ = mini
        expected = 0
        for tweet in index.iter_tweets():
            k = len([h for h in tweet.hashtags if h in index.vocab])
            expected += k * (k - 1) // 2
        assert store.total_pair_mass == expected
        assert sum(c for _, _, c in store.iter_pairs()) == expected


class TestRandomCorpora:
    @pytest.mark.parametrize("seed", range(5))
    def test_oracle_equivalence(self, tmp_path, seed):
        rng = random.Random(seed)
        n_tags = rng.randint(10, 60)
        tags = [f"h{i}" for i in range(n_tags)]
        texts = []
        for _ in range(rng.randint(50, 400)):
            k = rng.randint(1, min(8, n_tags))
            texts.append(" ".join("#" + t for t in rng.sample(tags, k)))
        index, store = build_store(
            tmp_path, texts, min_support=rng.choice([1, 2, 3])
        )
        parsed = [
            (i + 1, frozenset(t[1:] for t in text.split())) for i, text in enumerate(texts)
        ]
        oracle = brute_force_cooccurrence(parsed, set(index.vocab))
        assert {(a, b): c for a, b, c in store.iter_pairs()} == oracle
        for h in index.vocab:
            assert store.dictionary(h, 10) == brute_force_top_k(oracle, h, 10)
