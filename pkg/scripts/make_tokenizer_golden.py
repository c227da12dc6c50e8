#!/usr/bin/env python3
"""Regenerate the tokenizer golden file from the reference tokenizer.

The expected outputs are produced by the flat reference pattern in
tests/oracles.py, NOT by the package tokenizer, so the golden file stays
an independent check.

Usage: python scripts/make_tokenizer_golden.py
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from oracles import reference_tokenize  # noqa: E402

CORPUS = ROOT / "tests" / "data" / "tokenizer_corpus.json"
GOLDEN = ROOT / "tests" / "data" / "tokenizer_golden.jsonl"


def main():
    tweets = json.loads(CORPUS.read_text(encoding="utf-8"))
    with GOLDEN.open("w", encoding="utf-8") as out:
        for text in tweets:
            tokens = [
                {"text": t, "kind": kind, "start": start, "end": end}
                for t, kind, start, end in reference_tokenize(text)
            ]
            record = {"text": text, "tokens": tokens}
            out.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"wrote {len(tweets)} records to {GOLDEN}")


if __name__ == "__main__":
    main()
