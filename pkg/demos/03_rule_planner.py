#!/usr/bin/env python3
"""The expert-system layer: planning rules, gating, and method choice.

Every decision comes back with the ordered list of rules that fired.
"""

from importlib import resources

from adaptutor import (
    default_config,
    gate_pretest,
    choose_presentation,
    load_knowledge_base,
    new_learner,
    plan_test,
)
from adaptutor.errors import InsufficientBankError
from adaptutor.learner import LearningStyle
from adaptutor.pedagogy import TestPhase

with resources.files("adaptutor.data").joinpath("sample_kb.json").open("rb") as fh:
    kb = load_knowledge_base(fh)
config = default_config()
model = new_learner("demo", seed=2024)

plan, trace = plan_test(kb, model, "fraction_basics", TestPhase.PRE_TEST, config.level_mix, seed=1)
print(f"pre-test plan for fraction_basics ({model.level.value} mix): "
      f"{len(plan.question_ids)} questions, total weight {plan.total_weight}")
for firing in trace:
    print(f"  [{firing.rule}] {firing.because}")

print("\nafter answering, those questions never come back:")
model.asked_questions.update(plan.question_ids)
plan2, _ = plan_test(kb, model, "fraction_basics", TestPhase.POST_TEST, config.level_mix, seed=2)
overlap = set(plan.question_ids) & set(plan2.question_ids)
print(f"  second plan shares {len(overlap)} questions with the first")

print("\nexhausting a section raises a hard error (never silently relaxed):")
model.asked_questions.update(kb.concept_question_ids("decimal_notation"))
try:
    plan_test(kb, model, "decimal_notation", TestPhase.PRE_TEST, config.level_mix, seed=3)
except InsufficientBankError as err:
    print(f"  InsufficientBank: {err}")

print("\npre-test gate at a few scores:")
for score, prereqs in [(95, []), (60, []), (20, ["fraction_basics"]), (20, [])]:
    decision, gtrace = gate_pretest(score, unmastered_prereqs=prereqs)
    extra = f" -> {decision.prerequisite}" if decision.prerequisite else ""
    print(f"  score {score:>3}: {decision.action.value}{extra}  ({gtrace[0].because})")

print("\nmethod choice rotates on repeated failures (sensation-seeker):")
concept = kb.concepts["fraction_basics"]
for attempt in range(6):
    method, _ = choose_presentation(LearningStyle.SS, attempt, config.preference_table, concept)
    print(f"  training attempt {attempt}: {method.value}")
