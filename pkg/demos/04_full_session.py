#!/usr/bin/env python3
"""A complete scripted tutoring session, printed as it unfolds.

The scripted learner aces the first concept's pre-test (skip), struggles
with the second (train, fail, retrain via a different method), then
finishes the curriculum.
"""

import random
from importlib import resources

from adaptutor import default_config, default_questionnaire, load_knowledge_base, new_learner
from adaptutor.session import SessionState, start_session

with resources.files("adaptutor.data").joinpath("sample_kb.json").open("rb") as fh:
    kb = load_knowledge_base(fh)
questionnaire = default_questionnaire()
model = new_learner("scripted", seed=99)
session = start_session(model, kb, default_config(), questionnaire, clock=lambda: 0.0)

session.submit_questionnaire({i.id: 4 if i.target_style.value == "dla" else 2
                              for i in questionnaire.items})
print(f"style: {model.style.dominant.value}\n")

rng = random.Random(7)
struggle = {"place_value"}  # concepts this learner fails once


def answer(plan, correctly):
    answers = {}
    for qid in plan.question_ids:
        q = kb.questions[qid]
        if correctly:
            answers[qid] = q.correct_index
        else:
            answers[qid] = (q.correct_index + 1) % len(q.choices)
    return answers


failed = set()
steps = 0
while session.state is not SessionState.COMPLETED and steps < 100:
    steps += 1
    if session.state in (SessionState.SELECTING_CONCEPT, SessionState.PRESENTING):
        if session.state is SessionState.PRESENTING:
            step = session.current_step()
            print(f"    teach {step['concept_id']} via {step['method']} ({step['asset']})")
        session.advance()
    else:
        plan = session.current_plan
        cid = session.current_concept_id
        if plan.phase.value == "pretest":
            correctly = cid not in struggle
        else:
            correctly = cid not in struggle or cid in failed
            failed.add(cid)
        graded, result = session.submit_answers(answer(plan, correctly))
        print(f"{plan.phase.value:>8} {cid}: score {graded.score:>3} "
              f"({graded.level.value}) -> {result['decision']}")

print(f"\ncompleted in {steps} steps; learner level: {model.level.value}")
print("final record:")
for cid, knowledge in sorted(model.concept_knowledge.items()):
    print(f"  {cid}: {knowledge.last_score} ({knowledge.level.value}), "
          f"{knowledge.attempts} attempt(s)")
print(f"questions seen (never to repeat): {len(model.asked_questions)}")
print(f"transcript entries: {len(session.transcript)}")
