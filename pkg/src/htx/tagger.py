"""Trainable trigram-HMM part-of-speech tagger.

The model follows the classic trigram tagger recipe: maximum-likelihood
trigram/bigram/unigram tag transitions blended by deleted interpolation,
emission probabilities from word/tag counts, and suffix tables built from
infrequent training words to guess tags for unknown words (successive
abstraction smoothing, separate tables for capitalized and lowercase
words).  Decoding is exact Viterbi over tag-pair states; ties resolve to
the lexicographically smallest tag sequence so runs are reproducible.

Training corpora use one sentence per line with ``word/TAG`` tokens.
Hashtags, URLs and other Twitter noise get no special casing: the suffix
guesser deals with them like any other unknown word.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from pathlib import Path

from sklearn.base import BaseEstimator

from .errors import EmptyTrainingCorpus, HtxError

BOS = "\x02"  # context markers; never emitted as real tags
EOS = "\x03"


def read_tagged_corpus(path):
    """Parse a word/TAG file, one sentence per line."""
    sentences = []
    with Path(path).open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            sentence = []
            for token in line.split():
                if "/" not in token:
                    raise HtxError(f"{path}:{lineno}: token {token!r} lacks a /TAG")
                word, tag = token.rsplit("/", 1)
                sentence.append((word, tag))
            sentences.append(sentence)
    return sentences


class TrigramTagger(BaseEstimator):
    """Sequence tagger with a scikit-learn flavored ``fit`` surface."""

    def __init__(
        self,
        suffix_max_length: int = 10,
        suffix_max_word_freq: int = 10,
        split_suffixes_by_case: bool = True,
        lambda_floor: float = 1e-3,
    ):
        self.suffix_max_length = suffix_max_length
        self.suffix_max_word_freq = suffix_max_word_freq
        self.split_suffixes_by_case = split_suffixes_by_case
        # Deleted interpolation can put all mass on one order when a tiny
        # corpus is perfectly predictive; the floor keeps every order alive
        # so unseen contexts stay decodable.
        self.lambda_floor = lambda_floor

    # -- training -------------------------------------------------------

    def fit(self, sentences):
        """``sentences`` is an iterable of [(word, tag), ...] lists."""
        sentences = [s for s in sentences if s]
        if not sentences:
            raise EmptyTrainingCorpus("no tagged sentences to train on")

        unigrams = Counter()  # real tags only
        symbol_counts = Counter()  # tags + EOS, the next-symbol event space
        bigrams = Counter()
        trigrams = Counter()
        emissions: dict[str, Counter] = defaultdict(Counter)
        word_freq = Counter()

        for sentence in sentences:
            tags = [t for _, t in sentence]
            for word, tag in sentence:
                unigrams[tag] += 1
                symbol_counts[tag] += 1
                emissions[word][tag] += 1
                word_freq[word] += 1
            symbol_counts[EOS] += 1
            extended = [BOS, BOS] + tags + [EOS]
            for i in range(2, len(extended)):
                trigrams[(extended[i - 2], extended[i - 1], extended[i])] += 1
                bigrams[(extended[i - 1], extended[i])] += 1

        self.tags_ = sorted(unigrams)
        self.unigrams_ = dict(unigrams)
        self.symbol_counts_ = dict(symbol_counts)
        self.n_symbols_ = sum(symbol_counts.values())
        self.n_tokens_ = sum(unigrams.values())
        self.bigrams_ = dict(bigrams)
        self.trigrams_ = dict(trigrams)
        ctx1 = Counter()
        for (t2, _t3), c in bigrams.items():
            ctx1[t2] += c
        self.bigram_ctx_ = dict(ctx1)
        ctx2 = Counter()
        for (t1, t2, _t3), c in trigrams.items():
            ctx2[(t1, t2)] += c
        self.trigram_ctx_ = dict(ctx2)
        self.emissions_ = {w: dict(c) for w, c in emissions.items()}
        self.word_freq_ = dict(word_freq)
        self.lambdas_ = self._deleted_interpolation()
        self._build_suffix_tables()
        return self

    def _deleted_interpolation(self):
        l1 = l2 = l3 = 0
        n = self.n_symbols_
        for (t1, t2, t3), c in self.trigrams_.items():
            v1 = (self.symbol_counts_[t3] - 1) / (n - 1) if n > 1 else 0.0
            big_ctx = self.bigram_ctx_.get(t2, 0)
            v2 = (self.bigrams_[(t2, t3)] - 1) / (big_ctx - 1) if big_ctx > 1 else 0.0
            tri_ctx = self.trigram_ctx_.get((t1, t2), 0)
            v3 = (c - 1) / (tri_ctx - 1) if tri_ctx > 1 else 0.0
            best = max(v1, v2, v3)
            if best <= 0:
                l1 += c
            elif v3 == best:
                l3 += c
            elif v2 == best:
                l2 += c
            else:
                l1 += c
        total = l1 + l2 + l3
        if total == 0:
            return (1.0, 0.0, 0.0)
        floored = [
            max(l / total, self.lambda_floor) for l in (l1, l2, l3)
        ]
        norm = sum(floored)
        return tuple(l / norm for l in floored)

    def _build_suffix_tables(self):
        upper: dict[str, Counter] = defaultdict(Counter)
        lower: dict[str, Counter] = defaultdict(Counter)
        for word, tags in self.emissions_.items():
            if self.word_freq_[word] > self.suffix_max_word_freq:
                continue
            table = (
                upper
                if self.split_suffixes_by_case and word[:1].isupper()
                else lower
            )
            for length in range(0, min(self.suffix_max_length, len(word)) + 1):
                suffix = word[len(word) - length :] if length else ""
                for tag, c in tags.items():
                    table[suffix][tag] += c
        self.suffix_tables_ = {
            "upper": {s: dict(c) for s, c in upper.items()},
            "lower": {s: dict(c) for s, c in lower.items()},
        }
        # Smoothing weight: sample std deviation of the unconditioned
        # tag probabilities.
        probs = [c / self.n_tokens_ for c in self.unigrams_.values()]
        if len(probs) > 1:
            mean = sum(probs) / len(probs)
            var = sum((p - mean) ** 2 for p in probs) / (len(probs) - 1)
            self.suffix_theta_ = math.sqrt(var)
        else:
            self.suffix_theta_ = 1.0

    # -- probabilities ----------------------------------------------------

    def tagset(self):
        return list(self.tags_)

    def transition_prob(self, t1: str, t2: str, t3: str) -> float:
        """Interpolated P(t3 | t1, t2), renormalized over available orders."""
        l1, l2, l3 = self.lambdas_
        p1 = self.symbol_counts_.get(t3, 0) / self.n_symbols_
        numer = l1 * p1
        denom = l1
        big_ctx = self.bigram_ctx_.get(t2, 0)
        if big_ctx > 0:
            numer += l2 * self.bigrams_.get((t2, t3), 0) / big_ctx
            denom += l2
        tri_ctx = self.trigram_ctx_.get((t1, t2), 0)
        if tri_ctx > 0:
            numer += l3 * self.trigrams_.get((t1, t2, t3), 0) / tri_ctx
            denom += l3
        return numer / denom if denom > 0 else 0.0

    def _suffix_tag_probs(self, word: str) -> dict[str, float]:
        table = self.suffix_tables_["lower"]
        if self.split_suffixes_by_case and word[:1].isupper():
            if self.suffix_tables_["upper"]:
                table = self.suffix_tables_["upper"]
        if not table:
            table = self.suffix_tables_["lower"] or self.suffix_tables_["upper"]
        if not table:
            return {t: self.unigrams_[t] / self.n_tokens_ for t in self.tags_}
        base_total = sum(table[""].values())
        probs = {t: table[""].get(t, 0) / base_total for t in self.tags_}
        theta = self.suffix_theta_
        for length in range(1, min(self.suffix_max_length, len(word)) + 1):
            suffix = word[len(word) - length :]
            counts = table.get(suffix)
            if counts is None:
                break
            total = sum(counts.values())
            probs = {
                t: (counts.get(t, 0) / total + theta * probs[t]) / (1 + theta)
                for t in self.tags_
            }
        return probs

    def emission_prob(self, word: str, tag: str) -> float:
        """P(word | tag); suffix-based Bayes inversion for unknown words."""
        tags = self.emissions_.get(word)
        if tags is not None:
            return tags.get(tag, 0) / self.unigrams_[tag]
        probs = self._suffix_tag_probs(word)
        prior = self.unigrams_[tag] / self.n_tokens_
        return probs.get(tag, 0.0) / prior if prior > 0 else 0.0

    def candidate_tags(self, word: str):
        tags = self.emissions_.get(word)
        if tags is not None:
            return sorted(tags)
        return list(self.tags_)

    def sequence_logprob(self, words, tags) -> float:
        """Joint log probability of a full tag sequence (EOS included)."""
        if len(words) != len(tags):
            raise HtxError("words and tags must align")
        total = 0.0
        context = (BOS, BOS)
        for word, tag in zip(words, tags):
            p = self.transition_prob(context[0], context[1], tag)
            e = self.emission_prob(word, tag)
            if p <= 0.0 or e <= 0.0:
                return float("-inf")
            total += math.log(p) + math.log(e)
            context = (context[1], tag)
        p_end = self.transition_prob(context[0], context[1], EOS)
        if p_end <= 0.0:
            return float("-inf")
        return total + math.log(p_end)

    # -- decoding -----------------------------------------------------------

    def tag(self, words) -> list[str]:
        """Viterbi-decode one tag per token; [] for empty input."""
        words = list(words)
        if not words:
            return []
        # Cells map (prev2, prev1) -> (logprob, path tuple); ties keep the
        # lexicographically smallest path, making decoding deterministic.
        cells = {(BOS, BOS): (0.0, ())}
        for word in words:
            candidates = self.candidate_tags(word)
            scored = []
            for tag in candidates:
                e = self.emission_prob(word, tag)
                if e <= 0.0:
                    continue
                scored.append((tag, math.log(e)))
            next_cells: dict[tuple[str, str], tuple[float, tuple]] = {}
            for (t1, t2), (score, path) in cells.items():
                for tag, log_e in scored:
                    p = self.transition_prob(t1, t2, tag)
                    if p <= 0.0:
                        continue
                    cand = (score + math.log(p) + log_e, path + (tag,))
                    key = (t2, tag)
                    cur = next_cells.get(key)
                    if (
                        cur is None
                        or cand[0] > cur[0]
                        or (cand[0] == cur[0] and cand[1] < cur[1])
                    ):
                        next_cells[key] = cand
            if not next_cells:
                raise HtxError(f"no feasible tagging for {word!r}")
            cells = next_cells
        best = None
        for (t1, t2), (score, path) in cells.items():
            p_end = self.transition_prob(t1, t2, EOS)
            if p_end <= 0.0:
                continue
            cand = (score + math.log(p_end), path)
            if (
                best is None
                or cand[0] > best[0]
                or (cand[0] == best[0] and cand[1] < best[1])
            ):
                best = cand
        if best is None:
            raise HtxError("no feasible tagging reaches sentence end")
        return list(best[1])

    def predict(self, sentences):
        """Tag several sentences; the estimator-style plural of ``tag``."""
        return [self.tag(words) for words in sentences]

    # -- persistence ----------------------------------------------------------

    def save(self, path) -> None:
        payload = {
            "format": "htx-tagger",
            "version": 1,
            "params": self.get_params(),
            "tags": self.tags_,
            "unigrams": self.unigrams_,
            "symbol_counts": self.symbol_counts_,
            "bigrams": [[t1, t2, c] for (t1, t2), c in sorted(self.bigrams_.items())],
            "trigrams": [
                [t1, t2, t3, c] for (t1, t2, t3), c in sorted(self.trigrams_.items())
            ],
            "emissions": {w: dict(sorted(tc.items())) for w, tc in sorted(self.emissions_.items())},
            "word_freq": self.word_freq_,
            "lambdas": list(self.lambdas_),
            "suffix_theta": self.suffix_theta_,
            "suffix_tables": self.suffix_tables_,
        }
        with Path(path).open("w", encoding="utf-8") as f:
            json.dump(payload, f, sort_keys=True, ensure_ascii=False)

    @classmethod
    def load(cls, path) -> "TrigramTagger":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format") != "htx-tagger":
            raise HtxError(f"{path} is not a tagger model")
        model = cls(**payload["params"])
        model.tags_ = payload["tags"]
        model.unigrams_ = payload["unigrams"]
        model.symbol_counts_ = payload["symbol_counts"]
        model.n_symbols_ = sum(model.symbol_counts_.values())
        model.n_tokens_ = sum(model.unigrams_.values())
        model.bigrams_ = {(t1, t2): c for t1, t2, c in payload["bigrams"]}
        model.trigrams_ = {(t1, t2, t3): c for t1, t2, t3, c in payload["trigrams"]}
        ctx1 = Counter()
        for (t2, _), c in model.bigrams_.items():
            ctx1[t2] += c
        model.bigram_ctx_ = dict(ctx1)
        ctx2 = Counter()
        for (t1, t2, _), c in model.trigrams_.items():
            ctx2[(t1, t2)] += c
        model.trigram_ctx_ = dict(ctx2)
        model.emissions_ = payload["emissions"]
        model.word_freq_ = payload["word_freq"]
        model.lambdas_ = tuple(payload["lambdas"])
        model.suffix_theta_ = payload["suffix_theta"]
        model.suffix_tables_ = payload["suffix_tables"]
        return model
