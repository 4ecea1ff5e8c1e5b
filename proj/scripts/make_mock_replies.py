#!/usr/bin/env python3
"""Regenerate data/mock_replies/ from the recorded counts in data/corpora.

Each fixture is named by the FNV-1a 64 hash of the user message
"evalConsistency: [a] [b]" and holds one reply per recorded rating, so a
100-call run in cycle mode reproduces the recorded histogram exactly.
"""

import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "mock_replies"

TEMPLATES = [
    "Assuming the first claim is true, the second claim {verb}. So the consistency rating of these claims is {r}.",
    "Read with the first claim as true, the second {verb}.\n\nConsistency rating: {r}/10",
    "Taking the first claim as given, the second {verb}, which leads me to a rating of {r}.",
]
FAILED = "I would rather not assign a number to these two claims without more context."


def fnv1a64(text: str) -> str:
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def verb(r: int) -> str:
    if r >= 8:
        return "fits alongside it without tension"
    if r >= 4:
        return "neither follows from it nor is ruled out by it"
    return "cannot hold at the same time"


def replies(counts, n_fail):
    out = []
    for r, c in enumerate(counts):
        for k in range(c):
            out.append({"text": TEMPLATES[k % len(TEMPLATES)].format(verb=verb(r), r=r), "weight": 1})
    out.extend({"text": FAILED, "weight": 1} for _ in range(n_fail))
    # Interleave so that short runs still see a spread of ratings.
    return [out[(i * 37) % len(out)] for i in range(len(out))] if len(out) % 37 else out


# Stronger-model distributions used by escalation, keyed by claim texts.
STRONGER = {
    ("The theory of evolution has been conclusively demonstrated", "The earth is flat"): ([96, 0, 4] + [0] * 8, 0),
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    written = {}
    entries = []
    for corpus in sorted((ROOT / "data" / "corpora").glob("*.json")):
        doc = json.loads(corpus.read_text(encoding="utf-8"))
        text = {c["id"]: c["text"] for c in doc["claims"]}
        for r in doc.get("ratings", []):
            a, b = r["pair"]
            entries.append((text[a], text[b], r["counts"], r.get("n_fail", 0)))
    for a, b, counts, n_fail in entries:
        message = f"evalConsistency: [{a}] [{b}]"
        key = fnv1a64(message)
        if key in written:
            if written[key] != (counts, n_fail):
                raise SystemExit(f"conflicting recorded ratings for {message}")
            continue
        doc = {"claim_a": a, "claim_b": b, "mode": "cycle", "replies": replies(counts, n_fail)}
        if (a, b) in STRONGER:
            s_counts, s_fail = STRONGER[(a, b)]
            doc["models"] = {"gpt-4": {"mode": "cycle", "replies": replies(s_counts, s_fail)}}
        (OUT / f"{key}.json").write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
        written[key] = (counts, n_fail)
    print(f"wrote {len(written)} fixtures to {OUT}")


if __name__ == "__main__":
    main()
