#!/usr/bin/env python
"""Regenerate the bundled demo corpus (deterministic; commit the output).

50 documents: 48 spread over six themes with shared boilerplate wording,
one document written in an invented language that shares no vocabulary with
the themes, and one document containing only stopwords. The mix exercises
extraction, model exclusion of empty keyword bags, and zero-match tagging.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "simpletags" / "data" / "demo_corpus.jsonl"

THEMES = {
    "solar": ["solar", "panels", "inverter", "photovoltaic", "rooftop", "grid"],
    "quantum": ["quantum", "computing", "qubits", "decoherence", "entanglement", "processors"],
    "kernel": ["kernel", "scheduler", "latency", "preemption", "threads", "interrupts"],
    "genomics": ["genome", "sequencing", "variants", "alleles", "chromosomes", "mutations"],
    "markets": ["markets", "equities", "volatility", "liquidity", "futures", "hedging"],
    "cycling": ["cycling", "peloton", "sprint", "climbs", "drivetrain", "cadence"],
}

UNIQUE_WORDS = [
    "almanac", "anvil", "apricot", "ballast", "banjo", "barnacle", "bassoon",
    "bazaar", "bobbin", "bramble", "brocade", "cairn", "caliper", "carousel",
    "cobweb", "compass", "crayon", "crucible", "cutlass", "dovetail", "dynamo",
    "eiderdown", "ember", "falcon", "fathom", "ferret", "flagon", "flotsam",
    "gazebo", "gimlet", "gondola", "gossamer", "grotto", "gusset", "halberd",
    "hammock", "harpoon", "hearth", "heron", "hourglass", "ibis", "ingot",
    "jackdaw", "jamboree", "kayak", "kestrel", "kiln", "lagoon", "lantern",
    "lichen", "loom", "lyre", "mandolin", "marzipan", "meadow", "millstone",
    "mosaic", "mullet", "nimbus", "nougat", "obelisk", "ocarina", "orchard",
    "oriole", "paddock", "parasol", "pebble", "pelican", "pennant", "plinth",
    "pomade", "poncho", "quill", "quince", "rampart", "rivet", "saffron",
    "satchel", "scallop", "sextant", "shale", "sickle", "sonnet", "sparrow",
    "spindle", "stirrup", "tambourine", "thimble", "toboggan", "trellis",
    "tripod", "tundra", "turret", "vellum", "walnut", "wicket",
]

SUFFIXES = ["status", "deployment", "rollout", "review"]

NONSENSE = (
    "Zorvane kelthu miravek soldune prastil venoka thalmir urenzo. "
    "Kival drosane pelvako nithrel brenvau ostagan lirveth mokassu. "
    "Prastil venoka drosane kelthu arvenna tilquoss, miravek soldune varnelli "
    "groatand epheldu. Nithrel brenvau zorvane urenzo mokassu tilquoss prastil."
)

STOPWORD_ONLY = (
    "And then we were all here again because it was just what it was. "
    "Not that they would have been there before, but so it is now."
)


def themed_doc(theme_words, uniques, rng):
    w = rng.sample(theme_words, k=len(theme_words))
    bigram = f"{w[0]} {w[1]}"
    title = f"{w[0].capitalize()} {w[1]} {rng.choice(SUFFIXES)} update"
    summary = f"Weekly report from the team on {bigram} and the {w[2]} {w[3]} work."
    sentences = [
        f"The {bigram} effort moved ahead while the {w[2]} {w[3]} path stayed stable.",
        f"Measurements of the {bigram} stack and the {w[4]} {w[5]} behaviour matched the plan.",
        f"The team compared {uniques[0]} figures with the {uniques[1]} baseline during the week.",
    ]
    if rng.random() < 0.5:
        sentences.append(f"Follow-up on the {w[2]} {w[3]} side continues next week.")
    return title, summary, " ".join(sentences)


def main():
    rng = random.Random(20240214)
    unique_pool = list(UNIQUE_WORDS)
    rng.shuffle(unique_pool)

    docs = []
    for theme_words in THEMES.values():
        for _ in range(8):
            uniques = [unique_pool.pop(), unique_pool.pop()]
            title, summary, content = themed_doc(theme_words, uniques, rng)
            docs.append(
                {"title": title, "summary": summary, "content": content, "language_hint": "en"}
            )
    docs.append(
        {
            "title": "Soldune prastil venoka",
            "summary": "Kelthu miravek urenzo thalmir.",
            "content": NONSENSE,
            "language_hint": "xx",
        }
    )
    docs.append({"title": "", "summary": "", "content": STOPWORD_ONLY})

    rng.shuffle(docs)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as f:
        for i, doc in enumerate(docs, start=1):
            row = {"id": f"rpt-{i:04d}"}
            row.update(doc)
            f.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"wrote {len(docs)} documents -> {OUT}")


if __name__ == "__main__":
    main()
