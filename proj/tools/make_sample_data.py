# Copyright 2026 The dprag Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the small synthetic data set under data/sample.

Usage: python3 tools/make_sample_data.py [output_dir]

The output is deterministic; rerunning the script reproduces the checked-in
files byte for byte.
"""

import json
import pathlib
import random
import sys

# Private facts live in the corpus; public facts only in the training text.
# Each private fact is held by DOCS_PER_FACT people, enough voters for the
# private vote to clear its cutoff.
DOCS_PER_FACT = 20
PRIVATE = [
    ("arvenia", "tolmar"), ("bessaly", "quorin"), ("caldora", "mirevale"),
    ("dunmark", "ostrel"), ("elvaria", "pennick"), ("fendral", "ruskwood"),
    ("gorvath", "sallow"), ("hestria", "tamberlin"), ("ilmora", "veskar"),
    ("jorvik", "wendholm"), ("kestany", "yarrow"), ("lunmere", "zephyr"),
]
PUBLIC = [
    ("france", "paris"), ("spain", "madrid"), ("italy", "rome"),
    ("japan", "tokyo"), ("egypt", "cairo"), ("peru", "lima"),
    ("kenya", "nairobi"), ("chile", "santiago"), ("norway", "oslo"),
    ("canada", "ottawa"), ("ghana", "accra"), ("nepal", "kathmandu"),
]
FILLER = [
    "the river winds through a quiet valley",
    "farmers in the valley grow barley and rye",
    "the old bridge was rebuilt after the flood",
    "mountain passes close when the snow arrives",
    "the harbor trades in salt fish and timber",
    "a market opens in the square every morning",
]
SYMPTOMS = ["fever", "cough", "headache", "nausea", "rash", "back pain",
            "sore throat", "dizziness", "fatigue", "chills"]
DISEASES = ["influenza", "migraine", "bronchitis", "gastritis", "dermatitis",
            "sinusitis", "a sprain", "an allergy", "anemia", "a cold"]
DRUGS = ["ibuprofen", "paracetamol", "amoxicillin", "omeprazole",
         "cetirizine", "iron tablets", "saline spray", "a mild steroid"]
ADVICE = ["drink plenty of water", "rest for a few days",
          "avoid spicy food", "see a doctor if it persists",
          "keep the area clean", "sleep at least eight hours"]


def dialogue(rng):
    return ("patient: i have {} and {} for {} days what should i do ### "
            "doctor: you may have {} please take {} twice daily and {}"
            ).format(*rng.sample(SYMPTOMS, 2), rng.randint(2, 14),
                     rng.choice(DISEASES), rng.choice(DRUGS),
                     rng.choice(ADVICE))


def unique_dialogues(rng, count, seen):
    out = []
    while len(out) < count:
        text = dialogue(rng)
        if text not in seen:
            seen.add(text)
            out.append(text)
    return out


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True) + "\n")


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/sample")
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20260)

    corpus = []
    for i, (country, city) in enumerate(PRIVATE):
        for j in range(DOCS_PER_FACT):
            corpus.append({
                "doc_id": "fact-%02d-%d" % (i, j),
                "owner_id": "owner-%02d-%d" % (i, j),
                "text": "the capital of %s is %s" % (country, city),
            })
    for i, text in enumerate(FILLER):
        corpus.append({"doc_id": "filler-%02d" % i, "text": text})
    write_jsonl(out / "corpus.jsonl", corpus)

    write_jsonl(out / "questions.jsonl", [
        {"question": "What is the capital of %s?" % country.title(),
         "answers": [city.title()]} for country, city in PRIVATE
    ])

    with open(out / "training.txt", "w", encoding="utf-8") as f:
        for country, city in PUBLIC:
            f.write("the capital of %s is %s\n" % (country, city))
        for text in FILLER:
            f.write(text + "\n")

    seen = set()
    members = unique_dialogues(rng, 20, seen)
    non_members = unique_dialogues(rng, 20, seen)
    public = unique_dialogues(rng, 40, seen)
    write_jsonl(out / "mia_in.jsonl", [
        {"doc_id": "member-%02d" % i, "text": t, "membership": "in"}
        for i, t in enumerate(members)
    ])
    write_jsonl(out / "mia_out.jsonl", [
        {"doc_id": "nonmember-%02d" % i, "text": t, "membership": "out"}
        for i, t in enumerate(non_members)
    ])
    with open(out / "dialogue_training.txt", "w", encoding="utf-8") as f:
        for text in public:
            f.write(text + "\n")

    # Scripted table for the first question: voters read the fact, the
    # document-free model guesses a public city.
    question = "What is the capital of Arvenia?"
    table = {
        "fallback": "<eos>",
        "entries": [
            {"question": question, "documents": "*", "prefix": [],
             "token": "tolmar"},
            {"question": question, "documents": [], "prefix": [],
             "token": "paris"},
        ],
    }
    with open(out / "scripted.json", "w", encoding="utf-8") as f:
        json.dump(table, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
