"""Deterministic synthetic fixtures shared by unit and acceptance tests."""

from __future__ import annotations

import json
import random


def random_taxonomy_tables(seed: int, n_synsets: int = 50, polysemy: float = 0.2):
    """Random DAG taxonomy tables: (synsets id->hypernyms, lemmas id->names)."""
    rng = random.Random(seed)
    synsets: dict[str, set[str]] = {}
    lemmas: dict[str, set[str]] = {}
    ids = []
    lemma_pool = [f"word{i}" for i in range(max(8, n_synsets // 2))]
    for i in range(n_synsets):
        sid = f"s{i:03d}"
        if not ids or rng.random() < 0.08:
            hypers = set()
        else:
            n_parents = 1 if rng.random() < 0.8 else 2
            hypers = set(rng.sample(ids, min(n_parents, len(ids))))
        synsets[sid] = hypers
        names = {f"lemma{i}"}
        if rng.random() < polysemy:
            names.add(rng.choice(lemma_pool))
        lemmas[sid] = names
        ids.append(sid)
    return synsets, lemmas


def taxonomy_json(synsets, lemmas) -> str:
    return json.dumps(
        {
            "synsets": [
                {"id": sid, "lemmas": sorted(lemmas[sid]), "hypernyms": sorted(synsets[sid])}
                for sid in sorted(synsets)
            ]
        }
    )


def sibling_world(n_families: int = 5, leaves_per_family: int = 4, decoy_chains: int = 6):
    """A taxonomy plus corpus where co-occurring hashtags are siblings.

    Hashtag leaves sit at depth 5 under per-family chains that diverge
    right below the root, so sibling pairs are near and cross-family pairs
    far.  Decoy chains add lemmas that only the taxonomy-wide baseline can
    draw, pushing it below the random-hashtag baseline.
    """
    synsets: dict[str, list[str]] = {"root": []}
    lemmas: dict[str, list[str]] = {"root": ["rootword"]}
    hashtags = []
    for f in range(n_families):
        a, b, parent = f"fam{f}a", f"fam{f}b", f"fam{f}parent"
        synsets[a] = ["root"]
        synsets[b] = [a]
        synsets[parent] = [b]
        lemmas[a] = [f"fam{f}aword"]
        lemmas[b] = [f"fam{f}bword"]
        lemmas[parent] = [f"fam{f}parentword"]
        for l in range(leaves_per_family):
            leaf = f"fam{f}leaf{l}"
            synsets[leaf] = [parent]
            lemmas[leaf] = [leaf]
            hashtags.append(leaf)
    for d in range(decoy_chains):
        prev = "root"
        for depth in range(9):
            node = f"decoy{d}n{depth}"
            synsets[node] = [prev]
            lemmas[node] = [node]
            prev = node
    payload = {
        "synsets": [
            {"id": sid, "lemmas": lemmas[sid], "hypernyms": synsets[sid]}
            for sid in synsets
        ]
    }
    records = []
    tid = 1
    for f in range(n_families):
        family = [f"fam{f}leaf{l}" for l in range(leaves_per_family)]
        for _ in range(3):  # clear the default support threshold
            records.append(
                {
                    "id": tid,
                    "created_at": 1257000000 + tid,
                    "text": "about " + " ".join("#" + h for h in family),
                }
            )
            tid += 1
    return payload, records, hashtags


def random_weighted_graph(seed: int, n_nodes: int, n_edges: int, max_weight: int = 100):
    """Connected-ish random weighted graph as (nodes, edges) lists."""
    rng = random.Random(seed)
    nodes = [f"n{i}" for i in range(n_nodes)]
    seen = set()
    edges = []
    while len(edges) < n_edges:
        a, b = rng.sample(nodes, 2)
        key = (min(a, b), max(a, b))
        if key in seen:
            continue
        seen.add(key)
        edges.append((key[0], key[1], rng.randint(1, max_weight)))
    return nodes, edges


CLASS_VOCAB = {
    "Geolocation": ["visiting", "city", "downtown", "north", "flight", "map"],
    "Person": ["singer", "interview", "fan", "actor", "biography", "quote"],
    "Organization": ["stock", "ceo", "product", "launch", "office", "earnings"],
    "Event": ["tickets", "schedule", "opening", "countdown", "tonight", "festival"],
    "Category": ["love", "best", "favorite", "daily", "random", "stuff"],
}


def planted_class_corpus(
    seed: int, hashtags_per_class: int = 20, tweets_per_hashtag: int = 30
):
    """Corpus where each hashtag's context words reveal its class."""
    rng = random.Random(seed)
    records = []
    gold = {}
    tid = 1
    for cls, vocab in CLASS_VOCAB.items():
        for i in range(hashtags_per_class):
            tag = f"{cls.lower()}tag{i}"
            gold[tag] = cls
            for _ in range(tweets_per_hashtag):
                words = rng.choices(vocab, k=3)
                filler = rng.choices(["the", "a", "is", "was", "so", "and"], k=2)
                tokens = words + filler
                rng.shuffle(tokens)
                insert_at = rng.randrange(len(tokens) + 1)
                tokens.insert(insert_at, "#" + tag)
                records.append(
                    {
                        "id": tid,
                        "created_at": 1257000000 + tid,
                        "text": " ".join(tokens),
                    }
                )
                tid += 1
    return records, gold
