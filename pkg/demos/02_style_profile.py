#!/usr/bin/env python3
"""Profiling a learner from the five-style questionnaire.

Three respondents: one enthusiastic experimenter, one meticulous planner,
and one who answers 3 to everything (the tie falls to the first style in
the fixed order).
"""

from adaptutor import classify_knowledge, default_questionnaire, score_questionnaire
from adaptutor.learner import LearningStyle

questionnaire = default_questionnaire()
print(f"{len(questionnaire.items)} items, scale 1..5\n")

respondents = {
    "experimenter": {
        item.id: 5 if item.target_style is LearningStyle.SS else 2
        for item in questionnaire.items
    },
    "planner": {
        item.id: 5 if item.target_style is LearningStyle.CA else 3
        for item in questionnaire.items
    },
    "straight threes": {item.id: 3 for item in questionnaire.items},
}

for name, responses in respondents.items():
    profile = score_questionnaire(questionnaire, responses)
    scores = ", ".join(f"{s.value}={v}" for s, v in sorted(profile.scores.items()))
    print(f"{name:>15}: dominant={profile.dominant.value:<4} ({scores})")

print("\nknowledge bands for a few scores:")
for score in (100, 86, 85, 51, 50, 31, 30, 0):
    print(f"  {score:>3} -> {classify_knowledge(score).value}")
