"""Hypernym taxonomy with path and Wu-Palmer similarities.

Two file formats load into the same structure: the classic WordNet
database layout (``data.noun`` etc. inside a directory) and a compact
JSON form used for fixtures:

    {"synsets": [{"id": "dog.n.01", "lemmas": ["dog"], "hypernyms": ["canine.n.01"]}]}

The hypernym relation must form a DAG; synsets without hypernyms are
roots.  A virtual root above all roots (at depth 0, real roots at depth 1)
makes the graph connected, so every synset pair has a finite path distance
and a common subsumer.  Depth follows the maximizing convention: with
several hypernym paths upward, the longest one defines a synset's depth.

Path similarity is 1/(d+1) for the shortest undirected hop count d;
Wu-Palmer is 2*depth(lcs)/(depth(s1)+depth(s2)) with the lcs being the
deepest common subsumer.  Word-level similarity maximizes over all synset
pairs of the two words.  A loaded taxonomy is immutable and the similarity
queries are safe to call concurrently.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .errors import (
    CycleDetected,
    DanglingHypernym,
    EmptyIntersection,
    ParseError,
    UnknownSynset,
)

PATH = "path"
WU_PALMER = "wu_palmer"

_VROOT = "\x00"  # sentinel adjacency node; ids are validated non-empty/printable


class SimilarityScore(NamedTuple):
    value: float
    measure: str


class Taxonomy:
    def __init__(self, synsets: dict[str, set[str]], lemmas: dict[str, set[str]]):
        """``synsets`` maps id -> hypernym ids, ``lemmas`` maps id -> lemma set."""
        self._hypernyms = synsets
        self._lemmas = lemmas
        self._validate()
        self.roots = frozenset(s for s, h in synsets.items() if not h)
        self.lemma_index: dict[str, set[str]] = {}
        for sid, lset in lemmas.items():
            for lemma in lset:
                self.lemma_index.setdefault(lemma.lower(), set()).add(sid)
        self._adjacency = self._build_adjacency()
        self._depth = self._compute_depths()

    # -- construction and validation -----------------------------------

    def _validate(self):
        for sid, hypers in self._hypernyms.items():
            if not sid or not isinstance(sid, str):
                raise ParseError(f"invalid synset id {sid!r}")
            for h in hypers:
                if h not in self._hypernyms:
                    raise DanglingHypernym(f"synset {sid} points to unknown {h}")
        # Kahn's algorithm; leftovers mean a cycle (self-loops included).
        indegree = {sid: 0 for sid in self._hypernyms}
        for hypers in self._hypernyms.values():
            for h in hypers:
                indegree[h] += 1
        queue = deque(s for s, d in indegree.items() if d == 0)
        seen = 0
        while queue:
            sid = queue.popleft()
            seen += 1
            for h in self._hypernyms[sid]:
                indegree[h] -= 1
                if indegree[h] == 0:
                    queue.append(h)
        if seen != len(self._hypernyms):
            cyclic = sorted(s for s, d in indegree.items() if d > 0)
            raise CycleDetected(f"hypernym cycle involving {cyclic[:5]}")
        if not any(not h for h in self._hypernyms.values()) and self._hypernyms:
            raise CycleDetected("taxonomy has no root synset")

    def _build_adjacency(self):
        adj: dict[str, set[str]] = {sid: set() for sid in self._hypernyms}
        adj[_VROOT] = set()
        for sid, hypers in self._hypernyms.items():
            for h in hypers:
                adj[sid].add(h)
                adj[h].add(sid)
        for root in self.roots:
            adj[root].add(_VROOT)
            adj[_VROOT].add(root)
        return adj

    def _compute_depths(self):
        """Longest hypernym chain from the virtual root; real roots sit at 1."""
        children: dict[str, list[str]] = {}
        for sid, hypers in self._hypernyms.items():
            for h in hypers:
                children.setdefault(h, []).append(sid)
        order = []
        indegree = {sid: len(self._hypernyms[sid]) for sid in self._hypernyms}
        queue = deque(sorted(self.roots))
        while queue:
            sid = queue.popleft()
            order.append(sid)
            for child in children.get(sid, ()):
                indegree[child] -= 1
                if indegree[child] == 0:
                    queue.append(child)
        depth = {}
        for sid in order:
            hypers = self._hypernyms[sid]
            depth[sid] = 1 + max((depth[h] for h in hypers), default=0)
        return depth

    # -- loading ---------------------------------------------------------

    @classmethod
    def from_json(cls, path) -> "Taxonomy":
        text = Path(path).read_text(encoding="utf-8")
        if not text.strip():
            raise ParseError(f"{path}: empty taxonomy file")
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
        if not isinstance(payload, dict) or "synsets" not in payload:
            raise ParseError(f"{path}: expected an object with a 'synsets' list")
        synsets: dict[str, set[str]] = {}
        lemmas: dict[str, set[str]] = {}
        for i, entry in enumerate(payload["synsets"]):
            if not isinstance(entry, dict) or "id" not in entry:
                raise ParseError(f"{path}: synset #{i} missing 'id'")
            sid = entry["id"]
            if sid in synsets:
                raise ParseError(f"{path}: duplicate synset id {sid!r}")
            synsets[sid] = set(entry.get("hypernyms", []))
            lemmas[sid] = set(entry.get("lemmas", []))
        return cls(synsets, lemmas)

    @classmethod
    def from_wordnet(cls, dirpath) -> "Taxonomy":
        """Load ``data.pos`` files from a WordNet database directory."""
        dirpath = Path(dirpath)
        files = sorted(dirpath.glob("data.*"))
        if not files:
            raise ParseError(f"no data.* files in {dirpath}")
        synsets: dict[str, set[str]] = {}
        lemmas: dict[str, set[str]] = {}
        for path in files:
            with path.open("r", encoding="utf-8") as f:
                for lineno, line in enumerate(f, start=1):
                    if line.startswith("  ") or not line.strip():
                        continue  # license header
                    try:
                        sid, words, hypers = _parse_wordnet_line(line)
                    except (ValueError, IndexError) as exc:
                        raise ParseError(f"{path}:{lineno}: {exc}") from None
                    synsets[sid] = hypers
                    lemmas[sid] = words
        dangling = {
            h for hypers in synsets.values() for h in hypers if h not in synsets
        }
        if dangling:
            raise DanglingHypernym(f"unresolved hypernyms: {sorted(dangling)[:5]}")
        return cls(synsets, lemmas)

    @classmethod
    def load(cls, path) -> "Taxonomy":
        """Dispatch on path type: directory = WordNet layout, file = JSON."""
        path = Path(path)
        if path.is_dir():
            return cls.from_wordnet(path)
        return cls.from_json(path)

    # -- basic queries ----------------------------------------------------

    def __contains__(self, sid: str) -> bool:
        return sid in self._hypernyms

    def __len__(self) -> int:
        return len(self._hypernyms)

    def synset_ids(self):
        return sorted(self._hypernyms)

    def lemmas(self):
        return sorted(self.lemma_index)

    def has_lemma(self, lemma: str) -> bool:
        return lemma.lower() in self.lemma_index

    def synsets_for(self, lemma: str):
        return sorted(self.lemma_index.get(lemma.lower(), ()))

    def hypernyms(self, sid: str):
        self._check(sid)
        return sorted(self._hypernyms[sid])

    def depth(self, sid: str) -> int:
        self._check(sid)
        return self._depth[sid]

    def _check(self, sid):
        if sid not in self._hypernyms:
            raise UnknownSynset(f"unknown synset {sid!r}")

    def ancestors(self, sid: str) -> set[str]:
        """All hypernym ancestors of ``sid`` including itself."""
        self._check(sid)
        out = {sid}
        stack = [sid]
        while stack:
            for h in self._hypernyms[stack.pop()]:
                if h not in out:
                    out.add(h)
                    stack.append(h)
        return out

    # -- similarity ---------------------------------------------------------

    def shortest_path_length(self, s1: str, s2: str) -> int:
        """Undirected hop count; inter-root routes pass the virtual root."""
        self._check(s1)
        self._check(s2)
        if s1 == s2:
            return 0
        seen = {s1}
        frontier = deque([(s1, 0)])
        while frontier:
            node, d = frontier.popleft()
            for nxt in self._adjacency[node]:
                if nxt == s2:
                    return d + 1
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append((nxt, d + 1))
        raise AssertionError("virtual root guarantees connectivity")

    def path_similarity(self, s1: str, s2: str) -> SimilarityScore:
        d = self.shortest_path_length(s1, s2)
        return SimilarityScore(1.0 / (d + 1), PATH)

    def lowest_common_subsumer(self, s1: str, s2: str):
        """Deepest shared ancestor, or None when only the virtual root is shared."""
        common = self.ancestors(s1) & self.ancestors(s2)
        if not common:
            return None
        return max(common, key=lambda sid: (self._depth[sid], sid))

    def wu_palmer_similarity(self, s1: str, s2: str) -> SimilarityScore:
        self._check(s1)
        self._check(s2)
        lcs = self.lowest_common_subsumer(s1, s2)
        lcs_depth = self._depth[lcs] if lcs is not None else 0
        value = 2.0 * lcs_depth / (self._depth[s1] + self._depth[s2])
        return SimilarityScore(value, WU_PALMER)

    def lemma_similarity(self, w1: str, w2: str, measure: str = PATH):
        """Best score over all synset pairs; None when either word is unindexed."""
        ss1 = self.synsets_for(w1)
        ss2 = self.synsets_for(w2)
        if not ss1 or not ss2:
            return None
        fn = self.path_similarity if measure == PATH else self.wu_palmer_similarity
        return max(fn(a, b) for a in ss1 for b in ss2)


def _parse_wordnet_line(line: str):
    """One data.pos record -> (synset id, lemma set, hypernym id set)."""
    body = line.split(" | ")[0].rstrip()
    fields = body.split(" ")
    offset, _lex_filenum, ss_type = fields[0], fields[1], fields[2]
    pos = "a" if ss_type == "s" else ss_type
    w_cnt = int(fields[3], 16)
    words = set()
    i = 4
    for _ in range(w_cnt):
        word = fields[i].split("(")[0]  # strip adjective syntax markers
        words.add(word.replace("_", " ").lower())
        i += 2  # skip lex_id
    p_cnt = int(fields[i])
    i += 1
    hypers = set()
    for _ in range(p_cnt):
        symbol, target_offset, target_pos = fields[i], fields[i + 1], fields[i + 2]
        if symbol in ("@", "@i"):
            hypers.add(f"{target_offset}-{target_pos}")
        i += 4
    return f"{offset}-{pos}", words, hypers


# ---------------------------------------------------------------------------
# Dictionary evaluation: do co-occurring hashtags sit closer in the taxonomy
# than random ones?


@dataclass
class EvaluationReport:
    seed: int
    h_wn_size: int
    cooccurrence: dict
    twitter_baseline: dict
    taxonomy_baseline: dict

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "h_wn_size": self.h_wn_size,
            "cooccurrence": self.cooccurrence,
            "twitter_baseline": self.twitter_baseline,
            "taxonomy_baseline": self.taxonomy_baseline,
        }


class _MeanPair:
    def __init__(self):
        self.n = 0
        self.path_total = 0.0
        self.wp_total = 0.0

    def add(self, tax, w1, w2):
        path = tax.lemma_similarity(w1, w2, PATH)
        wp = tax.lemma_similarity(w1, w2, WU_PALMER)
        if path is None or wp is None:
            return
        self.n += 1
        self.path_total += path.value
        self.wp_total += wp.value

    def summary(self, **extra) -> dict:
        out = {
            "n_pairs": self.n,
            "mean_path": self.path_total / self.n if self.n else 0.0,
            "mean_wu_palmer": self.wp_total / self.n if self.n else 0.0,
        }
        out.update(extra)
        return out


def evaluate_dictionary(
    store,
    tax: Taxonomy,
    seed: int,
    dictionary_size: int = 10,
    baseline_partners: int = 10,
    baseline_lemmas: int = 10_000,
) -> EvaluationReport:
    """Compare dictionary-pair similarity against two random baselines.

    For hashtags that double as taxonomy lemmas, measure (1) similarity to
    their top co-occurring hashtags, (2) similarity to random hashtags from
    the same pool, and (3) similarity between random lemma pairs of the
    taxonomy itself.  Sampling is fully determined by ``seed``.
    """
    h_wn = sorted(h for h in store.hashtags() if tax.has_lemma(h))
    if not h_wn:
        raise EmptyIntersection("no relevant hashtag is a taxonomy lemma")
    h_wn_set = set(h_wn)
    rng = random.Random(seed)

    cooc = _MeanPair()
    for h in h_wn:
        for neighbor, _count in store.dictionary(h, dictionary_size):
            if neighbor in h_wn_set:
                cooc.add(tax, h, neighbor)

    twitter = _MeanPair()
    for h in h_wn:
        others = [x for x in h_wn if x != h]
        if not others:
            continue
        for partner in rng.sample(others, min(baseline_partners, len(others))):
            twitter.add(tax, h, partner)

    wordnet = _MeanPair()
    population = tax.lemmas()
    chosen = rng.sample(population, min(baseline_lemmas, len(population)))
    for lemma in chosen:
        others = [x for x in population if x != lemma]
        if not others:
            continue
        for partner in rng.sample(others, min(baseline_partners, len(others))):
            wordnet.add(tax, lemma, partner)

    return EvaluationReport(
        seed=seed,
        h_wn_size=len(h_wn),
        cooccurrence=cooc.summary(),
        twitter_baseline=twitter.summary(),
        taxonomy_baseline=wordnet.summary(n_lemmas=len(chosen)),
    )
