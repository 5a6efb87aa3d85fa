#!/usr/bin/env python3
"""Regenerate the bundled sample knowledge base (basic arithmetic).

Deterministic: the same seed always produces the same file. Run from the
repo root:

    python tools/make_sample_kb.py
"""

from __future__ import annotations

import json
import random
import sys
from fractions import Fraction
from math import gcd
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "adaptutor" / "data" / "sample_kb.json"
# Bank depth per (section, difficulty): deep enough that learners who fail a
# concept several times keep getting fresh questions (no-repeat rule).
PER_CELL = {"easy": 24, "medium": 12, "hard": 12}
SEED = 20240801

rng = random.Random(SEED)


def choices_from(correct: str, distractors: list[str]) -> tuple[list[str], int]:
    """Dedupe, drop accidental matches, shuffle, and locate the answer."""
    pool = []
    for item in distractors:
        if item != correct and item not in pool:
            pool.append(item)
    options = [correct] + pool[:3]
    rng.shuffle(options)
    return options, options.index(correct)


def choices_from_body(body: str, correct: str, distractors: list[str]):
    options, idx = choices_from(correct, distractors)
    return body, options, idx


PLACE_NAMES = ["ones", "tens", "hundreds", "thousands", "ten-thousands"]


def q_reading_digits(difficulty: str):
    if difficulty == "easy":
        n = rng.randint(21, 99)
        place = rng.choice([0, 1])
        digit = str(n)[-1 - place]
        body = f"Which digit is in the {PLACE_NAMES[place]} place of {n}?"
        distractors = [d for d in str(n) if d != digit] + [str(rng.randint(0, 9))]
        options, idx = choices_from(digit, distractors)
    elif difficulty == "medium":
        n = rng.randint(1023, 9876)
        place = rng.choice([2, 3])
        digit = str(n)[-1 - place]
        body = f"Which digit is in the {PLACE_NAMES[place]} place of {n:,}?"
        distractors = [d for d in str(n) if d != digit] + [str(rng.randint(0, 9))]
        options, idx = choices_from(digit, distractors)
    else:
        n = rng.randint(12345, 98765)
        place = rng.randint(1, 4)
        digit = int(str(n)[-1 - place])
        while digit == 0:
            n = rng.randint(12345, 98765)
            digit = int(str(n)[-1 - place])
        value = digit * 10**place
        body = f"What is the value of the digit {digit} in {n:,}?"
        distractors = [f"{digit * 10 ** p:,}" for p in (place - 1, place + 1, 0)]
        options, idx = choices_from(f"{value:,}", distractors)
    return body, options, idx


def q_comparing_numbers(difficulty: str):
    if difficulty == "easy":
        a, b = rng.sample(range(10, 99), 2)
        body = f"Which number is larger: {a} or {b}?"
        options, idx = choices_from(str(max(a, b)), [str(min(a, b))])
    elif difficulty == "medium":
        nums = rng.sample(range(100, 999), 4)
        body = "Which of these numbers is the largest?"
        options, idx = choices_from(str(max(nums)), [str(n) for n in nums if n != max(nums)])
    else:
        target = rng.randint(400, 600)
        nums = rng.sample(range(100, 999), 4)
        best = min(nums, key=lambda n: (abs(n - target), n))
        body = f"Which of these numbers is closest to {target}?"
        options, idx = choices_from(str(best), [str(n) for n in nums if n != best])
    return body, options, idx


def q_round_to_ten(difficulty: str):
    if difficulty == "easy":
        n = rng.randint(11, 98)
        answer = round(n / 10) * 10
        body = f"What is {n} rounded to the nearest ten?"
        distractors = [str(answer + 10), str(answer - 10), str(n)]
    elif difficulty == "medium":
        n = rng.randint(105, 994)
        answer = round(n / 100) * 100
        body = f"What is {n} rounded to the nearest hundred?"
        distractors = [str(answer + 100), str(max(answer - 100, 0)), str(round(n / 10) * 10)]
    else:
        n = rng.randint(1050, 9940)
        answer = round(n / 1000) * 1000
        body = f"What is {n:,} rounded to the nearest thousand?"
        distractors = [
            f"{answer + 1000:,}",
            f"{max(answer - 1000, 0):,}",
            f"{round(n / 100) * 100:,}",
        ]
        return choices_from_body(body, f"{answer:,}", distractors)
    return choices_from_body(body, str(answer), distractors)


def frac(a: int, b: int) -> str:
    return f"{a}/{b}"


def q_naming_fractions(difficulty: str):
    if difficulty == "easy":
        a, b = rng.randint(1, 11), rng.randint(2, 12)
        while a >= b:
            a, b = rng.randint(1, 11), rng.randint(2, 12)
        body = f"A shape is cut into {b} equal parts and {a} of them are shaded. What fraction is shaded?"
        return choices_from_body(body, frac(a, b), [frac(b, a), frac(a, b + 1), frac(a + 1, b)])
    if difficulty == "medium":
        a, b = rng.randint(2, 9), rng.randint(3, 12)
        while a >= b:
            a, b = rng.randint(2, 9), rng.randint(3, 12)
        body = f"What is the numerator of the fraction {frac(a, b)}?"
        return choices_from_body(body, str(a), [str(b), str(a + b), str(b - a)])
    # Odd denominator guarantees the distractor can never equal one half.
    b = rng.choice([5, 7, 9, 11])
    body = "Which of these fractions is NOT equal to 1/2?"
    odd = frac(rng.randint(1, b - 1), b)
    halves = [frac(k, 2 * k) for k in rng.sample(range(2, 9), 3)]
    options = halves + [odd]
    rng.shuffle(options)
    return body, options, options.index(odd)


def q_comparing_fractions(difficulty: str):
    if difficulty == "easy":
        d = rng.randint(5, 12)
        a, b = rng.sample(range(1, d), 2)
        body = f"Which fraction is larger: {frac(a, d)} or {frac(b, d)}?"
        big, small = (a, b) if a > b else (b, a)
        return choices_from_body(body, frac(big, d), [frac(small, d)])
    if difficulty == "medium":
        n = rng.randint(1, 5)
        d1, d2 = rng.sample(range(n + 1, 14), 2)
        body = f"Which fraction is larger: {frac(n, d1)} or {frac(n, d2)}?"
        return choices_from_body(body, frac(n, min(d1, d2)), [frac(n, max(d1, d2))])
    while True:
        a, b = rng.randint(1, 8), rng.randint(2, 9)
        c, d = rng.randint(1, 8), rng.randint(2, 9)
        if a < b and c < d and a * d != c * b:
            break
    body = f"Which fraction is larger: {frac(a, b)} or {frac(c, d)}?"
    winner = frac(a, b) if a * d > c * b else frac(c, d)
    loser = frac(c, d) if winner == frac(a, b) else frac(a, b)
    return choices_from_body(body, winner, [loser])


def q_scaling_fractions(difficulty: str):
    if difficulty == "easy":
        while True:
            a, b = rng.randint(1, 5), rng.randint(2, 6)
            if a < b and gcd(a, b) == 1:
                break
        k = rng.choice([2, 3, 4, 5])
        body = f"Fill in the blank: {frac(a, b)} = ?/{b * k}"
        return choices_from_body(body, str(a * k), [str(a * k + 1), str(k), str(b * k - 1)])
    if difficulty == "medium":
        a, b = rng.randint(1, 5), rng.randint(2, 7)
        while a >= b:
            a, b = rng.randint(1, 5), rng.randint(2, 7)
        k = rng.choice([2, 3, 4])
        body = f"Which fraction is equivalent to {frac(a, b)}?"
        return choices_from_body(
            body,
            frac(a * k, b * k),
            [frac(a + k, b + k), frac(a * k, b * (k + 1)), frac(b * k, a * k)],
        )
    a, b = rng.randint(1, 5), rng.randint(2, 7)
    while a >= b or gcd(a, b) != 1:
        a, b = rng.randint(1, 5), rng.randint(2, 7)
    k = rng.choice([2, 3, 4, 5])
    body = f"What is {frac(a * k, b * k)} in lowest terms?"
    return choices_from_body(body, frac(a, b), [frac(a * k, b * k), frac(a + 1, b), frac(a, b + 1)])


def q_same_denominator(difficulty: str):
    if difficulty == "easy":
        d = rng.randint(5, 12)
        a = rng.randint(1, d - 3)
        b = rng.randint(1, d - a - 1)
        body = f"What is {frac(a, d)} + {frac(b, d)}?"
        return choices_from_body(
            body, frac(a + b, d), [frac(a + b, 2 * d), frac(a * b, d), frac(a + b + 1, d)]
        )
    if difficulty == "medium":
        while True:
            d = rng.choice([4, 6, 8, 9, 10, 12])
            a = rng.randint(1, d - 2)
            b = rng.randint(1, d - a - 1)
            if gcd(a + b, d) > 1:
                break
        total, g = a + b, gcd(a + b, d)
        body = f"What is {frac(a, d)} + {frac(b, d)} in lowest terms?"
        return choices_from_body(
            body,
            frac(total // g, d // g),
            [frac(total, d), frac(total, 2 * d), frac(a, d)],
        )
    d = rng.randint(7, 12)
    a, b, c = 1, rng.randint(1, 3), rng.randint(1, 2)
    while a + b + c >= d:
        b, c = rng.randint(1, 3), rng.randint(1, 2)
    body = f"What is {frac(a, d)} + {frac(b, d)} + {frac(c, d)}?"
    total = a + b + c
    return choices_from_body(
        body, frac(total, d), [frac(total, 3 * d), frac(total + 1, d), frac(a * b * c, d)]
    )


def q_different_denominator(difficulty: str):
    if difficulty == "easy":
        denominator_pairs = [
            (2, 4), (2, 6), (3, 6), (2, 8), (4, 8), (5, 10),
            (3, 9), (3, 12), (4, 12), (6, 12),
        ]
    elif difficulty == "medium":
        denominator_pairs = [(2, 6), (3, 6), (2, 8), (4, 8), (2, 10), (5, 10), (3, 9), (4, 12)]
    else:
        denominator_pairs = [(4, 6), (6, 8), (4, 10), (6, 9), (8, 12), (6, 10)]
    while True:
        d1, d2 = rng.choice(denominator_pairs)
        a, b = rng.randint(1, d1 - 1), rng.randint(1, d2 - 1)
        total = Fraction(a, d1) + Fraction(b, d2)
        if total < 1 and (difficulty != "easy" or a == 1):
            break
    body = f"What is {frac(a, d1)} + {frac(b, d2)}?"
    answer = frac(total.numerator, total.denominator)
    naive = frac(a + b, d1 + d2)  # the classic add-everything mistake
    return choices_from_body(
        body, answer, [naive, frac(a + b, d2), frac(a + b, d1 * d2), frac(a * b, d1 * d2)]
    )


def q_tenths_hundredths(difficulty: str):
    if difficulty == "easy":
        if rng.random() < 0.4:
            n = rng.randint(1, 9)
            body = f"Write {frac(n, 10)} as a decimal."
            return choices_from_body(body, f"0.{n}", [f"{n}.0", f"0.0{n}", f"0.{n}5"])
        a, b = rng.sample(range(1, 10), 2)
        body = f"Which is larger: 0.{a} or 0.{b}?"
        return choices_from_body(body, f"0.{max(a, b)}", [f"0.{min(a, b)}"])
    if difficulty == "medium":
        n = rng.randint(5, 99)
        body = f"Write {frac(n, 100)} as a decimal."
        return choices_from_body(body, f"0.{n:02d}", [f"0.{n}0" if n < 10 else f"0.{n // 10}", f"{n / 10:.1f}", f"0.{n + 1:02d}"])
    if rng.random() < 0.5:
        value, answer = rng.choice(
            [("0.75", "3/4"), ("0.25", "1/4"), ("0.5", "1/2"), ("0.2", "1/5"),
             ("0.6", "3/5"), ("0.4", "2/5"), ("0.8", "4/5"), ("0.05", "1/20"), ("0.15", "3/20")]
        )
        body = f"What is {value} as a fraction in lowest terms?"
        return choices_from_body(body, answer, ["7/10", "2/5" if answer != "2/5" else "3/10", "5/8", "1/3"])
    a, b = rng.choice([(1, 2), (1, 4), (3, 4), (1, 5), (2, 5), (3, 5), (4, 5), (1, 8), (3, 8), (1, 20), (3, 20), (7, 20)])
    decimal = a / b
    body = f"What is {frac(a, b)} written as a decimal?"
    text = f"{decimal:g}"
    return choices_from_body(body, text, [f"{decimal + 0.1:g}", f"{decimal / 10:g}", f"{b / a if a else 1:.2f}".rstrip("0").rstrip(".")])


CURRICULUM = [
    {
        "topic": ("whole_numbers", "Whole Numbers"),
        "concepts": [
            {
                "id": "place_value",
                "title": "Place Value",
                "prerequisites": [],
                "assets": {
                    "text": "content/text/place_value.md",
                    "film": "https://assets.example/film/place_value.mp4",
                    "game": "https://assets.example/game/digit-builder",
                    "dynamic_view": "https://assets.example/interactive/abacus",
                    "puzzle": "https://assets.example/puzzle/digit-riddles",
                },
                "sections": [
                    ("reading_digits", "Reading digits", q_reading_digits),
                    ("comparing_numbers", "Comparing numbers", q_comparing_numbers),
                ],
            },
            {
                "id": "rounding",
                "title": "Rounding Numbers",
                "prerequisites": ["place_value"],
                "assets": {
                    "text": "content/text/rounding.md",
                    "game": "https://assets.example/game/round-up",
                    "film": "https://assets.example/film/rounding.mp4",
                    "dynamic_view": "https://assets.example/interactive/number-line",
                    "puzzle": "https://assets.example/puzzle/rounding-maze",
                },
                "sections": [("round_to_ten", "Rounding whole numbers", q_round_to_ten)],
            },
        ],
    },
    {
        "topic": ("fractions", "Fractions"),
        "concepts": [
            {
                "id": "fraction_basics",
                "title": "What Fractions Mean",
                "prerequisites": ["place_value"],
                "assets": {
                    "text": "content/text/fraction_basics.md",
                    "film": "https://assets.example/film/fraction_basics.mp4",
                    "game": "https://assets.example/game/pizza-slices",
                    "dynamic_view": "https://assets.example/interactive/fraction-bars",
                    "puzzle": "https://assets.example/puzzle/fraction-match",
                },
                "sections": [
                    ("naming_fractions", "Naming fractions", q_naming_fractions),
                    ("comparing_fractions", "Comparing fractions", q_comparing_fractions),
                ],
            },
            {
                "id": "equivalent_fractions",
                "title": "Equivalent Fractions",
                "prerequisites": ["fraction_basics"],
                "assets": {
                    "text": "content/text/equivalent_fractions.md",
                    "puzzle": "https://assets.example/puzzle/equivalence-pairs",
                    "dynamic_view": "https://assets.example/interactive/scaling-bars",
                    "film": "https://assets.example/film/equivalent_fractions.mp4",
                    "game": "https://assets.example/game/match-the-halves",
                },
                "sections": [("scaling_fractions", "Scaling fractions up and down", q_scaling_fractions)],
            },
            {
                "id": "adding_fractions",
                "title": "Adding Fractions",
                "prerequisites": ["equivalent_fractions"],
                "assets": {
                    "text": "content/text/adding_fractions.md",
                    "film": "https://assets.example/film/adding_fractions.mp4",
                    "game": "https://assets.example/game/fraction-sum-race",
                    "puzzle": "https://assets.example/puzzle/sum-squares",
                    "dynamic_view": "https://assets.example/interactive/common-denominators",
                },
                "sections": [
                    ("same_denominator", "Same denominator", q_same_denominator),
                    ("different_denominator", "Different denominators", q_different_denominator),
                ],
            },
        ],
    },
    {
        "topic": ("decimals", "Decimals"),
        "concepts": [
            {
                "id": "decimal_notation",
                "title": "Decimal Notation",
                "prerequisites": ["fraction_basics"],
                "assets": {
                    "text": "content/text/decimal_notation.md",
                    "dynamic_view": "https://assets.example/interactive/decimal-grid",
                    "film": "https://assets.example/film/decimal_notation.mp4",
                    "game": "https://assets.example/game/decimal-dash",
                    "puzzle": "https://assets.example/puzzle/decimal-riddles",
                },
                "sections": [("tenths_hundredths", "Tenths and hundredths", q_tenths_hundredths)],
            },
        ],
    },
]

WEIGHTS = {"easy": 3, "medium": 4, "hard": 5}


def importance_for(concept: dict, position: int) -> dict[str, int]:
    """First section gets the strictly-highest weight for every method."""
    methods = sorted(concept["assets"])
    if position == 0:
        return {m: rng.randint(5, 7) for m in methods}
    return {m: rng.randint(1, 4) for m in methods}


def build() -> dict:
    topics, concepts, questions = [], {}, {}
    for group in CURRICULUM:
        tid, ttitle = group["topic"]
        topics.append({"id": tid, "title": ttitle, "concepts": [c["id"] for c in group["concepts"]]})
        for concept in group["concepts"]:
            concepts[concept["id"]] = {
                "title": concept["title"],
                "prerequisites": concept["prerequisites"],
                "sections": [
                    {
                        "id": sid,
                        "title": stitle,
                        "importance": importance_for(concept, position),
                    }
                    for position, (sid, stitle, _gen) in enumerate(concept["sections"])
                ],
                "assets": concept["assets"],
            }
            for sid, _stitle, generate in concept["sections"]:
                for difficulty in ("easy", "medium", "hard"):
                    made = 0
                    seen = set()
                    while made < PER_CELL[difficulty]:
                        body, options, idx = generate(difficulty)
                        if (body, tuple(options)) in seen:
                            continue
                        seen.add((body, tuple(options)))
                        made += 1
                        qid = f"{sid}_{difficulty}_{made}"
                        questions[qid] = {
                            "concept_id": concept["id"],
                            "section_id": sid,
                            "difficulty": difficulty,
                            "weight": WEIGHTS[difficulty],
                            "body": body,
                            "choices": options,
                            "correct_index": idx,
                        }
    return {"topics": topics, "concepts": concepts, "questions": questions}


def main() -> int:
    doc = build()
    OUT.write_text(json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
    from adaptutor.kb import load_knowledge_base

    kb = load_knowledge_base(OUT)
    print(f"wrote {OUT} ({len(kb.concepts)} concepts, {len(kb.questions)} questions)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
