"""Regenerate the bundled toy corpus (50 synthetic abstracts, 2 topics).

Deterministic: the same seed always produces byte-identical files. Output
lands in src/mirrormatch/data/toy/.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "mirrormatch" / "data" / "toy"

TOPICS = {
    "SR1": {
        "condition": "type 2 diabetes mellitus (T2DM)",
        "short": "T2DM",
        "drugs": ["insulin glargine", "metformin", "sitagliptin", "lifestyle counseling"],
        "relevant_drug": "insulin glargine",
        "outcomes": ["glycated hemoglobin", "fasting plasma glucose", "hypoglycemia episodes"],
        "relevant_outcome": "glycated hemoglobin",
        "keywords": ["diabetes mellitus", "drug therapy", "randomized controlled trial"],
    },
    "SR2": {
        "condition": "chronic kidney disease (CKD)",
        "short": "CKD",
        "drugs": ["lisinopril", "amlodipine", "dietary sodium restriction", "spironolactone"],
        "relevant_drug": "lisinopril",
        "outcomes": ["systolic blood pressure", "urinary protein excretion", "renal function decline"],
        "relevant_outcome": "systolic blood pressure",
        "keywords": ["kidney diseases", "antihypertensive agents", "cohort studies"],
    },
}

DURATIONS = ["12 weeks", "24 weeks", "52 weeks", "6 months"]
DESIGNS = ["randomized double blind trial", "prospective cohort study",
           "multicenter randomized trial", "controlled clinical trial"]
CHANGES = ["reduced", "lowered", "improved", "decreased"]


def make_doc(rng: random.Random, sr: str, idx: int) -> tuple[dict, bool]:
    spec = TOPICS[sr]
    drug = rng.choice(spec["drugs"])
    outcome = rng.choice(spec["outcomes"])
    relevant = drug == spec["relevant_drug"] and outcome == spec["relevant_outcome"]
    n = rng.choice([60, 80, 120, 150, 240])
    pct = rng.choice(["0.8%", "1.2%", "2.5%", "10%", "15%"])
    ratio = rng.choice(["0.8", "1.4", "2.1"])
    duration = rng.choice(DURATIONS)
    design = rng.choice(DESIGNS)
    change = rng.choice(CHANGES)

    title = f"Effect of {drug} on {outcome} in patients with {spec['condition']}"
    background = (f"Background. Adults with {spec['short']} frequently progress despite "
                  f"standard care, and {outcome} remains a principal treatment target.")
    methods = (f"Methods. In this {design} we assigned {n} patients with {spec['short']} "
               f"to {drug} or usual care for {duration} and measured {outcome} at baseline "
               f"and follow up.")
    results = (f"Results. Compared with usual care, {drug} {change} {outcome} by {pct} "
               f"with an adjusted risk ratio of {ratio} among patients completing {duration}.")
    conclusion = (f"Conclusion. Treatment with {drug} {change} {outcome} in patients with "
                  f"{spec['short']} and warrants evaluation in larger trials.")

    doc = {
        "doc_id": f"{sr}-{idx:03d}",
        "title": title,
        "abstract": " ".join([background, methods, results, conclusion]),
        "keywords": list(spec["keywords"]),
    }
    return doc, relevant


# (sr_id, candidate count, relevant count); 50 documents in total
LAYOUT = [("SR1", 44, 8), ("SR2", 6, 3)]


def main() -> None:
    rng = random.Random(7)
    OUT.mkdir(parents=True, exist_ok=True)
    corpus_lines = []
    topics = []
    qrels_lines = []
    for sr, n_docs, n_rel in LAYOUT:
        rel_slots = set(rng.sample(range(1, n_docs + 1), n_rel))
        candidates = []
        for idx in range(1, n_docs + 1):
            want_relevant = idx in rel_slots
            doc, relevant = make_doc(rng, sr, idx)
            while relevant != want_relevant:
                doc, relevant = make_doc(rng, sr, idx)
            corpus_lines.append(json.dumps(doc, sort_keys=True))
            candidates.append(doc["doc_id"])
            qrels_lines.append(f"{sr} 0 {doc['doc_id']} {int(relevant)}")
        topics.append({"sr_id": sr, "candidates": candidates})
    (OUT / "corpus.jsonl").write_text("\n".join(corpus_lines) + "\n")
    (OUT / "topics.json").write_text(json.dumps(topics, indent=2) + "\n")
    (OUT / "qrels.txt").write_text("\n".join(qrels_lines) + "\n")
    print(f"wrote {OUT}/corpus.jsonl topics.json qrels.txt")


if __name__ == "__main__":
    main()
