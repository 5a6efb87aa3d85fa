"""Session engine: drives one learner through the tutoring loop.

An explicit state machine walks questionnaire -> concept selection ->
pre-test -> gated presentation -> post-test -> model update -> next
concept. Every transition appends to an append-only transcript (which is
also the learner's persistent event log) and persists the learner model,
so sessions survive restarts and replay deterministically: plan seeds
derive from the persisted per-learner seed plus a plan counter, and the
clock is injectable.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

from .errors import (
    InvalidAnswerError,
    MissingAnswerError,
    UnknownQuestionError,
    WrongStateError,
)
from .kb import EducationMethod, KnowledgeBase
from .learner import (
    KnowledgeLevel,
    LearnerModel,
    LearningEvent,
    Questionnaire,
    aggregate_topic_knowledge,
    append_event,
    classify_knowledge,
    model_to_document,
    round_half_up,
    score_questionnaire,
    update_after_posttest,
)
from .pedagogy import (
    GateAction,
    PedagogyConfig,
    RuleFiring,
    TestPhase,
    TestPlan,
    choose_presentation,
    gate_pretest,
    is_mastered,
    next_concept,
    plan_test,
    trace_to_payload,
    unmastered_prerequisites,
)
from .store import LearnerStore


class SessionState(str, Enum):
    AWAIT_QUESTIONNAIRE = "await_questionnaire"
    SELECTING_CONCEPT = "selecting_concept"
    AWAIT_PRE_TEST = "await_pretest"
    PRESENTING = "presenting"
    AWAIT_POST_TEST = "await_posttest"
    COMPLETED = "completed"


@dataclass(frozen=True)
class GradedTest:
    plan: TestPlan
    answers: dict[str, int]
    score: int
    correctness: dict[str, bool]
    level: KnowledgeLevel


def derive_plan_seed(learner_seed: int, counter: int) -> int:
    """Stable 64-bit plan seed from the persisted learner seed and a counter."""
    digest = hashlib.blake2b(
        f"{learner_seed}:{counter}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


def grade_test(kb: KnowledgeBase, plan: TestPlan, answers: dict[str, int]) -> GradedTest:
    """Grade a submitted test against the plan's weight snapshot.

    Answers must be keyed exactly by the plan's question ids. Out-of-range
    choice indexes grade as incorrect; non-integers are rejected.
    """
    planned = set(plan.question_ids)
    unknown = sorted(set(answers) - planned)
    if unknown:
        raise UnknownQuestionError(f"answers for question(s) not in the plan: {unknown}")
    missing = sorted(planned - set(answers))
    if missing:
        raise MissingAnswerError(f"missing answer(s) for question(s): {missing}")
    for qid, value in answers.items():
        if not isinstance(value, int) or isinstance(value, bool):
            raise InvalidAnswerError(
                f"answer for '{qid}' must be an integer choice index, got {value!r}"
            )

    correctness = {
        qid: answers[qid] == kb.questions[qid].correct_index
        for qid in plan.question_ids
    }
    earned = sum(plan.weights[qid] for qid in plan.question_ids if correctness[qid])
    score = round_half_up(100 * earned / plan.total_weight)
    return GradedTest(
        plan=plan,
        answers=dict(answers),
        score=score,
        correctness=correctness,
        level=classify_knowledge(score),
    )


class Session:
    """Single-writer state machine binding one learner to one curriculum walk.

    Callers must serialize operations on one session; distinct sessions may
    run concurrently over the shared immutable knowledge base.
    """

    def __init__(
        self,
        model: LearnerModel,
        kb: KnowledgeBase,
        config: PedagogyConfig,
        questionnaire: Questionnaire,
        store: LearnerStore | None = None,
        clock: Callable[[], float] = time.time,
    ):
        self.model = model
        self.kb = kb
        self.config = config
        self.questionnaire = questionnaire
        self.store = store
        self.clock = clock
        self.transcript: list[LearningEvent] = []
        self.current_concept_id: str | None = None
        self.current_plan: TestPlan | None = None
        self.current_method: EducationMethod | None = None
        self.forced_next: str | None = None
        self.presentation_delivered = False
        self.state = (
            SessionState.AWAIT_QUESTIONNAIRE
            if model.style is None
            else SessionState.SELECTING_CONCEPT
        )
        self._record("session_started", {"learner_id": model.learner_id, "state": self.state.value})
        self._persist()

    # -- bookkeeping ---------------------------------------------------------

    def _record(self, kind: str, data: dict[str, Any]) -> None:
        event = append_event(self.model, kind, data, at=self.clock())
        self.transcript.append(event)

    def _persist(self) -> None:
        if self.store is not None:
            self.store.save(self.model)

    def _enter(self, state: SessionState, **context: Any) -> None:
        self.state = state
        self._record("state_entered", {"state": state.value, **context})

    def snapshot(self) -> dict[str, Any]:
        """Canonical view of all mutable state; rejected operations must not change it."""
        return {
            "state": self.state.value,
            "concept": self.current_concept_id,
            "plan": list(self.current_plan.question_ids) if self.current_plan else None,
            "method": self.current_method.value if self.current_method else None,
            "forced_next": self.forced_next,
            "delivered": self.presentation_delivered,
            "model": model_to_document(self.model),
        }

    # -- step descriptors ------------------------------------------------------

    def current_step(self) -> dict[str, Any]:
        """Describe what the client should render for the current state."""
        if self.state is SessionState.AWAIT_QUESTIONNAIRE:
            return {
                "type": "questionnaire",
                "scale": {"min": 1, "max": 5},
                "items": [
                    {"id": item.id, "prompt": item.prompt}
                    for item in self.questionnaire.items
                ],
            }
        if self.state in (SessionState.AWAIT_PRE_TEST, SessionState.AWAIT_POST_TEST):
            assert self.current_plan is not None and self.current_concept_id is not None
            concept = self.kb.concepts[self.current_concept_id]
            return {
                "type": "test",
                "phase": self.current_plan.phase.value,
                "concept_id": concept.id,
                "concept_title": concept.title,
                "questions": [
                    {
                        "id": qid,
                        "body": self.kb.questions[qid].body,
                        "choices": list(self.kb.questions[qid].choices),
                        "difficulty": self.kb.questions[qid].difficulty.value,
                        "weight": self.kb.questions[qid].weight,
                    }
                    for qid in self.current_plan.question_ids
                ],
            }
        if self.state is SessionState.PRESENTING:
            assert self.current_concept_id is not None and self.current_method is not None
            concept = self.kb.concepts[self.current_concept_id]
            return {
                "type": "presentation",
                "concept_id": concept.id,
                "concept_title": concept.title,
                "method": self.current_method.value,
                "asset": concept.assets[self.current_method],
            }
        if self.state is SessionState.COMPLETED:
            return self._completion_step()
        return {"type": "selecting"}

    def _completion_step(self) -> dict[str, Any]:
        return {
            "type": "completed",
            "learner_level": self.model.level.value,
            "topics": [
                {
                    "id": topic.id,
                    "title": topic.title,
                    "score": aggregate_topic_knowledge(self.model, topic),
                }
                for topic in self.kb.topics
            ],
        }

    # -- operations ---------------------------------------------------------------

    def submit_questionnaire(self, responses: dict[str, int]) -> dict[str, Any]:
        if self.state is not SessionState.AWAIT_QUESTIONNAIRE:
            raise WrongStateError(self.state.value, "submit questionnaire responses")
        profile = score_questionnaire(self.questionnaire, responses)
        self.model.style = profile
        self._record(
            "questionnaire_scored",
            {
                "scores": {s.value: v for s, v in sorted(profile.scores.items())},
                "dominant": profile.dominant.value,
            },
        )
        self._enter(SessionState.SELECTING_CONCEPT)
        self._persist()
        return {"dominant_style": profile.dominant.value, "scores": {s.value: v for s, v in sorted(profile.scores.items())}}

    def advance(self) -> dict[str, Any]:
        """Move out of SelectingConcept or Presenting and return the next step."""
        if self.state is SessionState.SELECTING_CONCEPT:
            return self._select_concept()
        if self.state is SessionState.PRESENTING:
            assert self.current_concept_id is not None
            return self._plan_for(
                self.current_concept_id, TestPhase.POST_TEST, SessionState.AWAIT_POST_TEST
            )
        raise WrongStateError(self.state.value, "advance")

    def _select_concept(self) -> dict[str, Any]:
        if self.forced_next is not None and not is_mastered(
            self.model, self.forced_next, self.config.mastery_bar
        ):
            cid = self.forced_next
            trace = [
                RuleFiring(
                    "FORCED_NEXT",
                    f"'{cid}' was forced next by the previous gate or retrain decision",
                )
            ]
        else:
            cid, trace = next_concept(self.kb, self.model, self.config.mastery_bar)

        if cid is None:
            self.forced_next = None
            self.current_concept_id = None
            self.current_plan = None
            self.current_method = None
            self._enter(SessionState.COMPLETED, trace=trace_to_payload(trace))
            self._persist()
            return self.current_step()

        step = self._plan_for(
            cid,
            TestPhase.PRE_TEST,
            SessionState.AWAIT_PRE_TEST,
            selection=("concept_selected", {"concept_id": cid, "trace": trace_to_payload(trace)}),
        )
        return step

    def _plan_for(
        self,
        concept_id: str,
        phase: TestPhase,
        target: SessionState,
        selection: tuple[str, dict[str, Any]] | None = None,
    ) -> dict[str, Any]:
        # Plan before touching any state: a planning failure (bank exhausted)
        # must leave the session exactly as it was.
        seed = derive_plan_seed(self.model.seed, self.model.plan_counter)
        plan, trace = plan_test(
            self.kb, self.model, concept_id, phase, self.config.level_mix, seed
        )
        if selection is not None:
            self._record(*selection)
        self.forced_next = None
        self.current_concept_id = concept_id
        self.model.plan_counter += 1
        self.current_plan = plan
        self.current_method = None
        self.presentation_delivered = False
        self._record(
            "test_planned",
            {
                "phase": phase.value,
                "concept_id": concept_id,
                "question_ids": list(plan.question_ids),
                "total_weight": plan.total_weight,
                "trace": trace_to_payload(trace),
            },
        )
        self._enter(target, concept_id=concept_id)
        self._persist()
        return self.current_step()

    def submit_answers(self, answers: dict[str, int]) -> tuple[GradedTest, dict[str, Any]]:
        """Grade the pending test, apply the gate or mastery rule, and persist.

        Returns the graded test plus a result payload (score, decision, and
        the fired-rule justifications) for display.
        """
        if self.state not in (SessionState.AWAIT_PRE_TEST, SessionState.AWAIT_POST_TEST):
            raise WrongStateError(self.state.value, "submit answers")
        assert self.current_plan is not None and self.current_concept_id is not None
        graded = grade_test(self.kb, self.current_plan, answers)

        # No failures past this point: mutations are safe to apply.
        cid = self.current_concept_id
        self.model.asked_questions.update(graded.plan.question_ids)
        self._record(
            "test_graded",
            {
                "phase": graded.plan.phase.value,
                "concept_id": cid,
                "score": graded.score,
                "level": graded.level.value,
                "correctness": {qid: graded.correctness[qid] for qid in sorted(graded.correctness)},
            },
        )
        if self.state is SessionState.AWAIT_PRE_TEST:
            result = self._apply_pretest_gate(graded, cid)
        else:
            result = self._apply_posttest_outcome(graded, cid)
        self._persist()
        return graded, result

    def _apply_pretest_gate(self, graded: GradedTest, cid: str) -> dict[str, Any]:
        decision, trace = gate_pretest(
            graded.score,
            skip_threshold=self.config.skip_threshold,
            train_threshold=self.config.train_threshold,
            unmastered_prereqs=unmastered_prerequisites(
                self.kb, self.model, cid, self.config.mastery_bar
            ),
        )
        self._record(
            "gate_decided",
            {
                "concept_id": cid,
                "action": decision.action.value,
                "prerequisite": decision.prerequisite,
                "trace": trace_to_payload(trace),
            },
        )
        result: dict[str, Any] = {
            "phase": TestPhase.PRE_TEST.value,
            "concept_id": cid,
            "score": graded.score,
            "knowledge_level": graded.level.value,
            "decision": decision.action.value,
            "trace": trace_to_payload(trace),
        }
        if decision.action is GateAction.SKIP:
            update_after_posttest(self.model, cid, graded.score, kb=self.kb, at=self.clock())
            self.current_plan = None
            self.current_concept_id = None
            self._enter(SessionState.SELECTING_CONCEPT)
        elif decision.action is GateAction.TRAIN:
            assert self.model.style is not None
            attempt = self.model.training_attempts.get(cid, 0)
            method, mtrace = choose_presentation(
                self.model.style.dominant,
                attempt,
                self.config.preference_table,
                self.kb.concepts[cid],
                fixed_method=self.config.fixed_method,
            )
            self.current_method = method
            self.current_plan = None
            self.presentation_delivered = False
            self._record(
                "presentation_chosen",
                {
                    "concept_id": cid,
                    "method": method.value,
                    "attempt": attempt,
                    "trace": trace_to_payload(mtrace),
                },
            )
            self._enter(SessionState.PRESENTING, concept_id=cid, method=method.value)
            result["method"] = method.value
            result["trace"] = result["trace"] + trace_to_payload(mtrace)
        else:
            assert decision.prerequisite is not None
            self.forced_next = decision.prerequisite
            self.current_plan = None
            self.current_concept_id = None
            self._enter(SessionState.SELECTING_CONCEPT)
        return result

    def _apply_posttest_outcome(self, graded: GradedTest, cid: str) -> dict[str, Any]:
        update_after_posttest(self.model, cid, graded.score, kb=self.kb, at=self.clock())
        mastered = graded.score >= self.config.mastery_bar
        if mastered:
            trace = [
                RuleFiring(
                    "MASTERY_REACHED",
                    f"post-test score {graded.score} is at or above the mastery "
                    f"bar ({self.config.mastery_bar}); moving on",
                )
            ]
        else:
            self.model.training_attempts[cid] = self.model.training_attempts.get(cid, 0) + 1
            self.forced_next = cid
            trace = [
                RuleFiring(
                    "RETRAIN_SAME_CONCEPT",
                    f"post-test score {graded.score} fell below the mastery bar "
                    f"({self.config.mastery_bar}); re-teaching the concept via the "
                    f"next preferred method with fresh questions",
                )
            ]
        self._record(
            "mastery_decided",
            {
                "concept_id": cid,
                "score": graded.score,
                "mastered": mastered,
                "trace": trace_to_payload(trace),
            },
        )
        self.current_plan = None
        self.current_method = None
        self.current_concept_id = None
        self._enter(SessionState.SELECTING_CONCEPT)
        return {
            "phase": TestPhase.POST_TEST.value,
            "concept_id": cid,
            "score": graded.score,
            "knowledge_level": graded.level.value,
            "decision": "mastered" if mastered else "retrain",
            "trace": trace_to_payload(trace),
        }


def start_session(
    model: LearnerModel,
    kb: KnowledgeBase,
    config: PedagogyConfig,
    questionnaire: Questionnaire,
    store: LearnerStore | None = None,
    clock: Callable[[], float] = time.time,
) -> Session:
    """Open a session; the questionnaire is skipped when a profile exists."""
    return Session(model, kb, config, questionnaire, store=store, clock=clock)
