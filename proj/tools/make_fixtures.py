#!/usr/bin/env python3
"""Regenerates the reference fixtures under data/fixtures/.

The fixtures are synthetic: conversation texts are templated, and rating
files are constructed so that per-responder means reproduce the reference
evaluation figures exactly (to four decimals). Output is deterministic.
"""

import json
import random
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "fixtures"

# Conversation length histogram: turns -> number of conversations.
TURN_HISTOGRAM = {1: 2, 2: 43, 3: 7, 4: 8}

USER_TEMPLATES = [
    ("I feel sick today", "sadness", "Oh no, I hope you feel better soon."),
    ("I finally passed my driving test", "joy", "Congratulations, that is a big step!"),
    ("My dog died last week and I miss him", "sadness", "I am so sorry for your loss."),
    ("I got the job I applied for", "joy", "That is wonderful news."),
    ("I am so nervous about my exam tomorrow", "fear", "You have prepared well, you will do fine."),
    ("My friends threw me a surprise party", "surprise", "That sounds like a lovely evening."),
    ("Someone scratched my car and drove off", "anger", "That is so frustrating, I would be upset too."),
    ("We are going on vacation next week and I am excited", "joy", "Have a great trip!"),
    ("I failed my math test again", "sadness", "That is hard, maybe a tutor could help."),
    ("My sister is getting married and I am thrilled", "joy", "How exciting for your family."),
    ("I am worried about my mother's health", "fear", "I hope she gets well soon."),
    ("The neighbours kept me awake all night and I am exhausted", "anger", "That sounds exhausting."),
]

# Evaluator score reports for the three reference responders.
EVALUATOR = {
    "Human": {"mean": 0.8085, "max": 0.9492, "min": 0.5847, "mid": 0.7669},
    "Blenderbot": {"mean": 0.8865, "max": 0.9831, "min": 0.7627, "mid": 0.8729},
    "DialoGPT-large": {"mean": 0.6879, "max": 0.9068, "min": 0.4237, "mid": 0.6653},
}
EVALUATOR_FILES = {"Human": "human", "Blenderbot": "blenderbot", "DialoGPT-large": "dialogpt_large"}

# Sentence level: number of half points out of 141 single-rater turn ratings.
SENTENCE_HALVES = {"Human": 240, "Blenderbot": 243, "DialoGPT-large": 184}

# Dialogue level: 60 conversations. Most are rated by one rater; a few are
# rated by several raters and mean-pooled, giving the fractional parts.
#   responder -> (pooled multi-rater items as grade lists, total of the remaining single grades)
DIALOGUE = {
    "Human": ([[0.5, 0.5, 0, 0], [1, 1, 0, 0, 0]], Fraction(53)),
    "Blenderbot": ([[1, 0, 0, 0, 0]], Fraction(109, 2)),
    "DialoGPT-large": ([[0.5, 0.5, 0, 0], [1, 1, 0, 0, 0]], Fraction(38)),
}


def conversations(rng):
    lengths = [t for t, n in TURN_HISTOGRAM.items() for _ in range(n)]
    rng.shuffle(lengths)
    convs = []
    for i, n in enumerate(lengths, start=1):
        picks = rng.sample(range(len(USER_TEMPLATES)), n)
        turns = []
        for k in picks:
            text, label, reply = USER_TEMPLATES[k]
            turns.append({"user": {"text": text, "label": label}, "response": {"text": reply, "speaker": "human"}})
        convs.append({"id": f"hc{i:02d}", "source": "human_conversations", "turns": turns})
    return convs


def single_grades(total_halves, count, rng):
    """`count` grades on {0, 0.5, 1} summing to total_halves / 2."""
    ones, rem = divmod(total_halves, 2)
    grades = [1.0] * ones + [0.5] * rem
    if len(grades) > count:
        raise ValueError("too many points for the item count")
    grades += [0.0] * (count - len(grades))
    rng.shuffle(grades)
    return grades


def main():
    rng = random.Random(20221114)
    OUT.mkdir(parents=True, exist_ok=True)
    convs = conversations(rng)
    with open(OUT / "reference_conversations.jsonl", "w") as f:
        for c in convs:
            f.write(json.dumps(c) + "\n")

    transcript = {}
    for c in convs:
        for t in c["turns"]:
            transcript[t["user"]["text"]] = t["response"]["text"]
    with open(OUT / "reference_transcript.jsonl", "w") as f:
        for user, response in sorted(transcript.items()):
            f.write(json.dumps({"user": user, "response": response}) + "\n")

    reports = OUT / "reports"
    reports.mkdir(exist_ok=True)
    for name, e in EVALUATOR.items():
        doc = {
            "responder": name,
            "mean": e["mean"],
            "scored_turns": 141,
            "skipped": 0,
            "dialogue": {"max": e["max"], "min": e["min"], "mid": e["mid"], "conversations": 59, "excluded": 1},
            "per_turn": [],
        }
        with open(reports / f"{EVALUATOR_FILES[name]}.json", "w") as f:
            f.write(json.dumps(doc, indent=2) + "\n")

    turn_refs = [(c["id"], i) for c in convs for i in range(len(c["turns"]))]
    assert len(turn_refs) == 141
    lines = []
    for name in EVALUATOR:
        for (cid, idx), g in zip(turn_refs, single_grades(SENTENCE_HALVES[name], len(turn_refs), rng)):
            lines.append({"responder": name, "level": "sentence", "conversation": cid, "index": idx,
                          "rating": g, "rater": None})
    for name, (pooled, single_total) in DIALOGUE.items():
        ids = [c["id"] for c in convs]
        pooled_ids, single_ids = ids[: len(pooled)], ids[len(pooled):]
        for cid, grades in zip(pooled_ids, pooled):
            for r, g in enumerate(grades, start=1):
                lines.append({"responder": name, "level": "dialogue", "conversation": cid, "index": None,
                              "rating": g, "rater": f"r{r}"})
        for cid, g in zip(single_ids, single_grades(int(single_total * 2), len(single_ids), rng)):
            lines.append({"responder": name, "level": "dialogue", "conversation": cid, "index": None,
                          "rating": g, "rater": "r1"})
    with open(OUT / "human_ratings.jsonl", "w") as f:
        for line in lines:
            f.write(json.dumps(line) + "\n")


if __name__ == "__main__":
    main()
