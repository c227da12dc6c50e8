#!/usr/bin/env python3
"""Regenerate the committed mini corpus fixture (fixtures/mini100.jsonl).

100 synthetic tweets over a hand-tuned hashtag pool, deterministic under a
fixed seed.  Every tweet carries at least one hashtag that clears the
default support threshold of 3, so ingesting with defaults indexes all
100.  A matching gold-label file covers two hashtags per class.
"""

import json
import random
from datetime import datetime, timezone
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures" / "mini100.jsonl"
GOLD = ROOT / "fixtures" / "mini100_gold.tsv"

# (hashtag, target tweet count); the first tag of each tweet comes from
# this pool so the frequencies land exactly.
POOL = [
    ("music", 20),
    ("jazz", 12),
    ("rock", 9),
    ("obama", 8),
    ("politics", 7),
    ("tech", 6),
    ("apple", 6),
    ("google", 5),
    ("madonna", 4),
    ("paris", 4),
    ("london", 4),
    ("easter", 3),
    ("election", 3),
    ("travel", 3),
    ("coffee", 3),
    ("fail", 3),
]
RARE = ["unicorn", "xyzzy", "once1", "once2"]  # stay below min_support 3

COMPANIONS = {
    "music": ["jazz", "rock", "livemusic", "fun"],
    "jazz": ["music", "sax", "livemusic"],
    "rock": ["music", "guitar"],
    "obama": ["politics", "tcot", "healthcare"],
    "politics": ["obama", "election", "tcot"],
    "tech": ["apple", "google", "iphone"],
    "apple": ["iphone", "mac", "tech"],
    "google": ["tech", "android"],
    "madonna": ["music", "popmusic"],
    "paris": ["travel", "france"],
    "london": ["travel", "uk"],
    "easter": ["spring", "fun"],
    "election": ["politics", "vote"],
    "travel": ["paris", "london"],
    "coffee": ["morning", "fail"],
    "fail": ["coffee", "fun"],
}

PHRASES = [
    "listening to some great tunes tonight",
    "cannot believe the news today",
    "4 U all out there",
    "what a day it has been",
    "live from the city center",
    "check this out http://example.com/show",
    "loving it :)",
    "big announcement w/ the team",
    "so tired b/c of work",
    "heading downtown at 12:30",
    "see you there @friend",
    "best thing since 2008-2009",
    "such a lovely morning",
    "new post is up www.blog.example.org",
    "weekend plans anyone",
]

GOLD_LABELS = [
    ("paris", "Geolocation"),
    ("london", "Geolocation"),
    ("obama", "Person"),
    ("madonna", "Person"),
    ("apple", "Organization"),
    ("google", "Organization"),
    ("easter", "Event"),
    ("election", "Event"),
    ("jazz", "Category"),
    ("music", "Category"),
]


def main():
    rng = random.Random(1009)
    slots = []
    for tag, n in POOL:
        slots.extend([tag] * n)
    assert len(slots) >= 100
    slots = slots[:100]
    rng.shuffle(slots)

    start = int(datetime(2009, 9, 1, tzinfo=timezone.utc).timestamp())
    span = 90 * 24 * 3600

    records = []
    rare_used = {t: 0 for t in RARE}
    for i, primary in enumerate(slots):
        tags = [primary]
        for companion in COMPANIONS.get(primary, []):
            if rng.random() < 0.45:
                tags.append(companion)
        if rng.random() < 0.08:
            rare = rng.choice(RARE)
            if rare_used[rare] < 2:
                rare_used[rare] += 1
                tags.append(rare)
        phrase = rng.choice(PHRASES)
        body = " ".join("#" + t for t in tags)
        if rng.random() < 0.5:
            text = f"{phrase} {body}"
        else:
            text = f"{body} {phrase}"
        records.append(
            {
                "id": 1000 + i,
                "created_at": start + rng.randrange(span),
                "text": text,
            }
        )

    with OUT.open("w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n")
    with GOLD.open("w", encoding="utf-8") as f:
        for tag, cls in GOLD_LABELS:
            f.write(f"{tag}\t{cls}\n")
    print(f"wrote {len(records)} tweets to {OUT} and {len(GOLD_LABELS)} gold labels to {GOLD}")


if __name__ == "__main__":
    main()
