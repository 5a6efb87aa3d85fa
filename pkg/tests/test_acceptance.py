"""Acceptance suite: one test per release criterion, each timed and reported.

Run with `pytest tests/test_acceptance.py -v -s` to see the PASS lines.
"""

from __future__ import annotations

import json
import random
import time
from importlib import resources

import jsonschema
import pytest
from fastapi.testclient import TestClient

from adaptutor.errors import InsufficientBankError
from adaptutor.kb import Difficulty, load_knowledge_base
from adaptutor.learner import (
    classify_knowledge,
    default_questionnaire,
    new_learner,
)
from adaptutor.pedagogy import TestPhase as Phase
from adaptutor.pedagogy import default_config, plan_test
from adaptutor.service import ServiceSettings, create_app
from adaptutor.session import SessionState, start_session
from adaptutor.sim import SimConfig, compare_policies
from adaptutor.store import LearnerStore
from kbtools import build_kb_doc, correct_answers, wrong_answers
from oracles import (
    assert_plan_satisfies_rules,
    feasible_plan_exists_bruteforce,
    knowledge_band_oracle,
)


def report(name: str, started: float, budget: float | None = None, detail: str = ""):
    elapsed = time.perf_counter() - started
    if budget is not None:
        assert elapsed < budget, f"{name}: {elapsed:.1f}s exceeded the {budget:.0f}s budget"
    suffix = f" [{detail}]" if detail else ""
    print(f"ACCEPTANCE PASS: {name} ({elapsed:.2f}s){suffix}")


# 1. ------------------------------------------------------------------------------

def test_knowledge_band_table_conformance():
    started = time.perf_counter()
    expected_bands = {
        "excellent": range(86, 101),
        "very_good": range(71, 86),
        "good": range(51, 71),
        "average": range(31, 51),
        "weak": range(0, 31),
    }
    preimages: dict[str, list[int]] = {name: [] for name in expected_bands}
    for score in range(101):
        level = classify_knowledge(score).value
        assert level == knowledge_band_oracle(score), f"score {score}"
        preimages[level].append(score)
    for name, span in expected_bands.items():
        assert preimages[name] == list(span), f"band {name} mismatched"
    report("Table-of-bands conformance over 0..100", started, budget=1.0)


# 2. ------------------------------------------------------------------------------

def test_selection_rule_suite_1000_randomized_cases():
    started = time.perf_counter()
    rng = random.Random(0xACCE97)
    config = default_config()
    planned = exhausted = 0
    for case in range(1000):
        doc = build_kb_doc(
            [{"id": "c1", "sections": rng.randint(1, 2)}],
            per_cell=rng.randint(1, 3),
        )
        kb = load_knowledge_base(doc)
        model = new_learner("fuzz", seed=case)
        model.level = rng.choice(list(model.level.__class__))
        bank = list(kb.concept_question_ids("c1"))
        # Mostly light histories (feasible banks), sometimes heavy (exhausted).
        if rng.random() < 0.6:
            asked_n = rng.randint(0, max(1, len(bank) // 4))
        else:
            asked_n = rng.randint(0, len(bank))
        model.asked_questions.update(rng.sample(bank, asked_n))
        row = config.level_mix[model.level]
        feasible = feasible_plan_exists_bruteforce(kb, "c1", model.asked_questions, row)
        try:
            plan, trace = plan_test(
                kb, model, "c1", Phase.PRE_TEST, config.level_mix, seed=rng.getrandbits(48)
            )
        except InsufficientBankError:
            assert not feasible, f"case {case}: planner gave up on a feasible bank"
            exhausted += 1
        else:
            assert feasible, f"case {case}: planner built a plan the oracle says cannot exist"
            assert_plan_satisfies_rules(kb, plan, "c1", set(model.asked_questions), row)
            assert trace
            planned += 1
    assert planned + exhausted == 1000 and planned > 200 and exhausted > 100
    report(
        "Selection-rule suite, 1000 randomized cases",
        started,
        budget=30.0,
        detail=f"{planned} plans, {exhausted} exhaustions, 0 violations",
    )


# 3. ------------------------------------------------------------------------------

def test_cross_session_no_repeat_after_three_failures(tmp_path):
    started = time.perf_counter()
    doc = build_kb_doc(
        [{"id": "c1", "assets": ["film", "game", "puzzle", "dynamic_view", "text"]}],
        per_cell=20,
    )
    kb = load_knowledge_base(doc)
    store = LearnerStore(tmp_path)
    questionnaire = default_questionnaire()
    config = default_config()

    model = new_learner("kai", learner_id="kai1", seed=314159)
    session = start_session(model, kb, config, questionnaire, store=store, clock=lambda: 0.0)
    session.submit_questionnaire({i.id: 4 for i in questionnaire.items})

    test_sets: list[frozenset[str]] = []
    phases: list[str] = []
    for round_no in range(3):
        session.advance()  # fresh pre-test
        test_sets.append(frozenset(session.current_plan.question_ids))
        phases.append(session.current_plan.phase.value)
        session.submit_answers(wrong_answers(doc, list(session.current_plan.question_ids)))
        assert session.state is SessionState.PRESENTING
        session.advance()  # acknowledge, plan post-test
        test_sets.append(frozenset(session.current_plan.question_ids))
        phases.append(session.current_plan.phase.value)
        session.submit_answers(wrong_answers(doc, list(session.current_plan.question_ids)))

        # End the session; the next round resumes from the persisted record.
        model = store.load("kai1")
        session = start_session(model, kb, config, questionnaire, store=store, clock=lambda: 0.0)

    post_tests = [s for s, phase in zip(test_sets, phases) if phase == "posttest"]
    assert len(post_tests) == 3
    one_pre_plus_posts = [test_sets[0], *post_tests]
    assert len(one_pre_plus_posts) == 4
    for i in range(len(test_sets)):
        for j in range(i + 1, len(test_sets)):
            assert test_sets[i].isdisjoint(test_sets[j]), (
                f"test {i} and test {j} share questions: exact disjointness required"
            )
    report(
        "Cross-session no-repeat after 3 failures",
        started,
        detail=f"{len(test_sets)} tests, all pairwise disjoint",
    )


# 4. ------------------------------------------------------------------------------

LEGAL_TRANSITIONS = {
    (SessionState.AWAIT_QUESTIONNAIRE, SessionState.SELECTING_CONCEPT),
    (SessionState.SELECTING_CONCEPT, SessionState.AWAIT_PRE_TEST),
    (SessionState.SELECTING_CONCEPT, SessionState.COMPLETED),
    (SessionState.AWAIT_PRE_TEST, SessionState.PRESENTING),
    (SessionState.AWAIT_PRE_TEST, SessionState.SELECTING_CONCEPT),
    (SessionState.PRESENTING, SessionState.AWAIT_POST_TEST),
    (SessionState.AWAIT_POST_TEST, SessionState.SELECTING_CONCEPT),
}


def test_state_machine_fuzz_10000_sequences():
    started = time.perf_counter()
    doc = build_kb_doc([{"id": "c1"}, {"id": "c2", "prereqs": ["c1"]}], per_cell=2)
    kb = load_knowledge_base(doc)
    config = default_config()
    questionnaire = default_questionnaire()
    good_responses = {i.id: 3 for i in questionnaire.items}
    rng = random.Random(0xF022)
    operations = 0
    rejections = 0

    for sequence in range(10_000):
        model = new_learner("fz", seed=sequence)
        if sequence % 2:
            from adaptutor.learner import score_questionnaire

            model.style = score_questionnaire(questionnaire, good_responses)
        session = start_session(model, kb, config, questionnaire, clock=lambda: 0.0)
        for _ in range(rng.randint(3, 7)):
            operations += 1
            op = rng.choice(("questionnaire", "advance", "answers", "bad_answers", "step"))
            state_before = session.state
            before = session.snapshot()
            try:
                if op == "questionnaire":
                    session.submit_questionnaire(good_responses)
                elif op == "advance":
                    session.advance()
                elif op == "answers":
                    plan = session.current_plan
                    if plan is None or session.state not in (
                        SessionState.AWAIT_PRE_TEST, SessionState.AWAIT_POST_TEST
                    ):
                        session.submit_answers({})
                    else:
                        qids = list(plan.question_ids)
                        answers = (
                            correct_answers(doc, qids)
                            if rng.random() < 0.5
                            else wrong_answers(doc, qids)
                        )
                        session.submit_answers(answers)
                elif op == "bad_answers":
                    session.submit_answers({"bogus": 0})
                else:
                    session.current_step()
            except Exception:
                rejections += 1
                assert session.snapshot() == before, (
                    f"sequence {sequence}: rejected '{op}' mutated state"
                )
                assert session.state is state_before
            else:
                if session.state is not state_before:
                    assert (state_before, session.state) in LEGAL_TRANSITIONS, (
                        f"illegal transition {state_before} -> {session.state} via {op}"
                    )
    report(
        "State-machine fuzz, 10,000 sequences",
        started,
        budget=60.0,
        detail=f"{operations} operations, {rejections} clean rejections",
    )


# 5. ------------------------------------------------------------------------------

def test_deterministic_session_replay_byte_identical():
    started = time.perf_counter()
    doc = build_kb_doc(
        [{"id": "c1", "assets": ["film", "text"]}, {"id": "c2", "prereqs": ["c1"]}],
        per_cell=14,
    )
    questionnaire = default_questionnaire()

    def scripted_run() -> bytes:
        kb = load_knowledge_base(doc)
        model = new_learner("rep", learner_id="rep1", seed=271828)
        ticks = iter(range(10_000))
        session = start_session(
            model, kb, default_config(), questionnaire, clock=lambda: float(next(ticks))
        )
        session.submit_questionnaire({i.id: 2 + (len(i.id) % 3) for i in questionnaire.items})
        answer_policy = random.Random(5)  # scripted: seeded policy, part of the script
        while session.state is not SessionState.COMPLETED:
            if session.state in (SessionState.SELECTING_CONCEPT, SessionState.PRESENTING):
                session.advance()
            else:
                qids = list(session.current_plan.question_ids)
                answers = (
                    correct_answers(doc, qids)
                    if answer_policy.random() < 0.7
                    else wrong_answers(doc, qids)
                )
                session.submit_answers(answers)
        return json.dumps(
            [
                {"seq": e.seq, "at": e.at, "kind": e.kind, "data": e.data}
                for e in session.transcript
            ],
            sort_keys=True,
        ).encode()

    first = scripted_run()
    second = scripted_run()
    assert first == second, "replay with identical seeds must be byte-identical"
    report(
        "Deterministic end-to-end replay",
        started,
        detail=f"transcript {len(first)} bytes, identical",
    )


# 6. ------------------------------------------------------------------------------

SIM_SEED = 20240810


def test_simulator_paired_comparison_on_sample_kb():
    started = time.perf_counter()
    with resources.files("adaptutor.data").joinpath("sample_kb.json").open("rb") as fh:
        kb = load_knowledge_base(fh)

    with_bonus = compare_policies(kb, 500, SIM_SEED, SimConfig(method_match_bonus=0.2))
    delta = with_bonus["results"]["paired_delta"]["mastery_rate_points"]
    assert delta >= 5.0, f"adaptive should beat static by >= 5 points, got {delta:+.2f}"

    control = compare_policies(kb, 500, SIM_SEED, SimConfig(method_match_bonus=0.0))
    control_delta = control["results"]["paired_delta"]["mastery_rate_points"]
    assert control["results"]["no_bonus_control"] is True
    assert abs(control_delta) <= 2.0, (
        f"no-bonus control must stay within 2 points, got {control_delta:+.2f}"
    )
    report(
        "Simulator paired comparison (n=500, pinned seed)",
        started,
        budget=60.0,
        detail=f"bonus delta {delta:+.2f} pts, control delta {control_delta:+.2f} pts",
    )


# 7. ------------------------------------------------------------------------------

ERROR_SCHEMA = {
    "type": "object",
    "required": ["code", "message"],
    "properties": {"code": {"type": "string"}, "message": {"type": "string"}},
}
REGISTER_SCHEMA = {
    "type": "object",
    "required": ["learner_id", "name", "token", "resumed"],
    "additionalProperties": False,
    "properties": {
        "learner_id": {"type": "string", "minLength": 1},
        "name": {"type": "string"},
        "token": {"type": "string", "minLength": 16},
        "resumed": {"type": "boolean"},
    },
}
SESSION_SCHEMA = {
    "type": "object",
    "required": ["session_id", "state"],
    "additionalProperties": False,
    "properties": {"session_id": {"type": "string"}, "state": {"type": "string"}},
}
QUESTION_SCHEMA = {
    "type": "object",
    "required": ["id", "body", "choices", "difficulty", "weight"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string"},
        "body": {"type": "string"},
        "choices": {"type": "array", "items": {"type": "string"}, "minItems": 2},
        "difficulty": {"enum": ["easy", "medium", "hard"]},
        "weight": {"type": "integer", "minimum": 1},
    },
}
STEP_SCHEMA = {
    "type": "object",
    "required": ["session_id", "state", "step"],
    "properties": {
        "step": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["type", "items", "scale"],
                    "properties": {
                        "type": {"const": "questionnaire"},
                        "items": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "required": ["id", "prompt"],
                                "additionalProperties": False,
                                "properties": {
                                    "id": {"type": "string"},
                                    "prompt": {"type": "string"},
                                },
                            },
                        },
                    },
                },
                {
                    "type": "object",
                    "required": ["type", "phase", "concept_id", "questions"],
                    "properties": {
                        "type": {"const": "test"},
                        "phase": {"enum": ["pretest", "posttest"]},
                        "questions": {"type": "array", "items": QUESTION_SCHEMA},
                    },
                },
                {
                    "type": "object",
                    "required": ["type", "concept_id", "method", "asset"],
                    "properties": {
                        "type": {"const": "presentation"},
                        "method": {
                            "enum": ["film", "dynamic_view", "game", "puzzle", "text"]
                        },
                    },
                },
                {
                    "type": "object",
                    "required": ["type", "learner_level", "topics"],
                    "properties": {"type": {"const": "completed"}},
                },
            ]
        }
    },
}
SUBMIT_SCHEMA = {
    "type": "object",
    "required": ["session_id", "state", "result"],
    "properties": {"result": {"type": "object"}},
}
MODEL_SCHEMA = {
    "type": "object",
    "required": ["learner_id", "name", "learner_level", "style", "concepts", "topics"],
    "properties": {
        "concepts": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "concept_id", "title", "topic_id", "score", "knowledge_level", "attempts",
                ],
            },
        }
    },
}


def walk_for_banned_keys(node, banned=("correct_index", "correct_answer", "answer_key")):
    found = []

    def walk(item, path):
        if isinstance(item, dict):
            for key, value in item.items():
                if key in banned:
                    found.append(f"{path}.{key}")
                walk(value, f"{path}.{key}")
        elif isinstance(item, list):
            for i, value in enumerate(item):
                walk(value, f"{path}[{i}]")

    walk(node, "$")
    return found


def test_api_contract_full_session_over_http(tmp_path):
    started = time.perf_counter()
    doc = build_kb_doc(
        [
            {"id": "c1", "assets": ["game", "text"]},
            {"id": "c2", "prereqs": ["c1"], "assets": ["film", "text"]},
        ],
        per_cell=14,
    )
    kb_path = tmp_path / "kb.json"
    kb_path.write_text(json.dumps(doc))
    app = create_app(ServiceSettings(kb_path=kb_path, data_dir=tmp_path / "data"))

    checked = 0

    def validated(response, schema, status=200):
        nonlocal checked
        assert response.status_code == status, response.text
        body = response.json()
        jsonschema.validate(body, schema)
        leaks = walk_for_banned_keys(body)
        assert not leaks, f"answer key leaked at {leaks}"
        checked += 1
        return body

    with TestClient(app) as client:
        registered = validated(
            client.post("/api/learners", json={"name": "contract"}), REGISTER_SCHEMA, 201
        )
        headers = {"Authorization": f"Bearer {registered['token']}"}
        opened = validated(client.post("/api/sessions", headers=headers), SESSION_SCHEMA, 201)
        sid = opened["session_id"]

        failed_once = False
        saw = {"questionnaire": 0, "test": 0, "presentation": 0, "completed": 0}
        for _ in range(60):
            step_body = validated(
                client.get(f"/api/sessions/{sid}/step", headers=headers), STEP_SCHEMA
            )
            step = step_body["step"]
            saw[step["type"]] += 1
            if step["type"] == "questionnaire":
                payload = {"responses": {i["id"]: 4 for i in step["items"]}}
            elif step["type"] == "test":
                qids = [q["id"] for q in step["questions"]]
                if step["phase"] == "pretest":
                    correctly = False  # force the training path
                else:
                    correctly = failed_once
                    failed_once = True
                payload = {
                    "answers": correct_answers(doc, qids)
                    if correctly
                    else wrong_answers(doc, qids)
                }
            elif step["type"] == "presentation":
                continue
            else:
                break
            validated(
                client.post(f"/api/sessions/{sid}/submit", headers=headers, json=payload),
                SUBMIT_SCHEMA,
            )

        assert saw["completed"] == 1, f"never completed: {saw}"
        assert saw["questionnaire"] >= 1 and saw["test"] >= 4 and saw["presentation"] >= 3

        validated(
            client.get(f"/api/learners/{registered['learner_id']}/model", headers=headers),
            MODEL_SCHEMA,
        )
        error = client.post(f"/api/sessions/{sid}/submit", headers=headers, json={"answers": {}})
        assert error.status_code == 409
        jsonschema.validate(error.json(), ERROR_SCHEMA)
        checked += 1

    report(
        "API contract: full HTTP session, schema-valid, no key leaks",
        started,
        detail=f"{checked} responses validated",
    )
