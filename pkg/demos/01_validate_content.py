#!/usr/bin/env python3
"""Loading and validating curriculum content.

Shows the bundled arithmetic knowledge base loading cleanly, then a few
broken documents and the JSON-path-citing violations they produce.
"""

import json
from importlib import resources

from adaptutor import KBValidationError, load_knowledge_base, most_important_section

with resources.files("adaptutor.data").joinpath("sample_kb.json").open("rb") as fh:
    kb = load_knowledge_base(fh)

print(f"sample KB: {len(kb.topics)} topics, {len(kb.concepts)} concepts, "
      f"{len(kb.questions)} questions")
print("curriculum order:", " -> ".join(kb.curriculum))
for cid in kb.curriculum:
    concept = kb.concepts[cid]
    print(f"  {cid}: most important section = {most_important_section(concept)}, "
          f"assets = {sorted(m.value for m in concept.assets)}")

print("\n--- a concept that requires itself ---")
broken = {
    "topics": [{"id": "t1", "title": "T", "concepts": ["a"]}],
    "concepts": {
        "a": {
            "title": "A",
            "prerequisites": ["a"],
            "sections": [{"id": "s1", "title": "S", "importance": {"text": 1}}],
            "assets": {"text": "asset://a/text"},
        }
    },
    "questions": {},
}
try:
    load_knowledge_base(broken)
except KBValidationError as err:
    for violation in err.violations:
        print(" ", violation)

print("\n--- sections that disagree about the most important one ---")
broken2 = json.loads(json.dumps(broken))
broken2["concepts"]["a"]["prerequisites"] = []
broken2["concepts"]["a"]["sections"] = [
    {"id": "s1", "title": "S1", "importance": {"film": 3, "text": 2}},
    {"id": "s2", "title": "S2", "importance": {"film": 1, "text": 4}},
]
broken2["concepts"]["a"]["assets"]["film"] = "asset://a/film"
try:
    load_knowledge_base(broken2)
except KBValidationError as err:
    for violation in err.violations:
        print(" ", violation)
