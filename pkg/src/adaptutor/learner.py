"""Learner model: style profiling, knowledge classification, and aggregation.

The learner is profiled once by a five-style questionnaire, then tracked
per concept through post-test scores. Scores classify into five knowledge
bands; a coarse learner level (weak / slow learner / smart / genius) is
re-derived from recent performance after every update and drives how many
questions of each difficulty later tests draw.
"""

from __future__ import annotations

import json
import os
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import IO, Any
from uuid import uuid4

from .errors import (
    MissingResponseError,
    OutOfRangeResponseError,
    QuestionnaireError,
    ScoreOutOfRangeError,
    UnknownConceptError,
    UnknownItemError,
)
from .kb import KnowledgeBase, Topic

LEARNER_SCHEMA_VERSION = 1

# Event kind appended by update_after_posttest; the learner-level window
# and the session transcript both key off it.
POST_TEST_EVENT = "post_test"

# How many recent post-test scores feed the learner-level rolling mean.
LEVEL_WINDOW = 5


class LearningStyle(str, Enum):
    """Five learner archetypes; declaration order is the dominance tie-break."""

    SS = "ss"    # sensation seeking
    GOA = "goa"  # goal-oriented achiever
    EIA = "eia"  # emotionally intelligent achiever
    CA = "ca"    # conscientious achiever
    DLA = "dla"  # deep-learning achiever


class KnowledgeLevel(str, Enum):
    """Five score bands, declared in ascending order."""

    WEAK = "weak"
    AVERAGE = "average"
    GOOD = "good"
    VERY_GOOD = "very_good"
    EXCELLENT = "excellent"

    @property
    def rank(self) -> int:
        return list(type(self)).index(self)


class LearnerLevel(str, Enum):
    """Coarse ability tiers, declared in ascending order."""

    WEAK = "weak"
    SLOW_LEARNER = "slow_learner"
    SMART = "smart"
    GENIUS = "genius"

    @property
    def rank(self) -> int:
        return list(type(self)).index(self)


def round_half_up(value: float) -> int:
    """Round non-negative values with .5 going up (3.5 -> 4)."""
    return int(value + 0.5)


def classify_knowledge(score: int) -> KnowledgeLevel:
    """Map an integer score 0..100 into its knowledge band.

    86-100 excellent, 71-85 very good, 51-70 good, 31-50 average, 0-30 weak.
    """
    if not isinstance(score, int) or isinstance(score, bool) or not 0 <= score <= 100:
        raise ScoreOutOfRangeError(f"score must be an integer in 0..100, got {score!r}")
    if score >= 86:
        return KnowledgeLevel.EXCELLENT
    if score >= 71:
        return KnowledgeLevel.VERY_GOOD
    if score >= 51:
        return KnowledgeLevel.GOOD
    if score >= 31:
        return KnowledgeLevel.AVERAGE
    return KnowledgeLevel.WEAK


# --- questionnaire ----------------------------------------------------------

@dataclass(frozen=True)
class QuestionnaireItem:
    id: str
    prompt: str
    target_style: LearningStyle


@dataclass(frozen=True)
class Questionnaire:
    """Ordered items on a fixed 1..5 agreement scale."""

    items: tuple[QuestionnaireItem, ...]

    def item_ids(self) -> tuple[str, ...]:
        return tuple(item.id for item in self.items)


@dataclass(frozen=True)
class StyleProfile:
    scores: dict[LearningStyle, int]
    dominant: LearningStyle


def load_questionnaire(source: bytes | str | list | IO | os.PathLike) -> Questionnaire:
    """Load a questionnaire from a JSON list of items."""
    if isinstance(source, list):
        doc = source
    else:
        if isinstance(source, os.PathLike):
            with open(source, "rb") as fh:
                raw = fh.read()
        elif hasattr(source, "read"):
            raw = source.read()
        else:
            raw = source
        try:
            doc = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise QuestionnaireError(f"malformed questionnaire document: {exc}") from exc
    if not isinstance(doc, list) or not doc:
        raise QuestionnaireError("questionnaire must be a non-empty JSON list of items")

    items = []
    seen: set[str] = set()
    for i, entry in enumerate(doc):
        try:
            item = QuestionnaireItem(
                id=str(entry["id"]),
                prompt=str(entry["prompt"]),
                target_style=LearningStyle(entry["target_style"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise QuestionnaireError(f"item {i} is invalid: {exc}") from exc
        if item.id in seen:
            raise QuestionnaireError(f"duplicate item id '{item.id}'")
        seen.add(item.id)
        items.append(item)
    targeted = {item.target_style for item in items}
    missing = [s.value for s in LearningStyle if s not in targeted]
    if missing:
        raise QuestionnaireError(f"no items target style(s): {missing}")
    return Questionnaire(items=tuple(items))


def default_questionnaire() -> Questionnaire:
    """The bundled 15-item sample questionnaire (3 items per style).

    Sample content with the right scoring shape, not a validated
    psychometric instrument.
    """
    with resources.files("adaptutor.data").joinpath("questionnaire.json").open("rb") as fh:
        return load_questionnaire(fh)


def score_questionnaire(
    questionnaire: Questionnaire, responses: dict[str, int]
) -> StyleProfile:
    """Sum responses per targeted style; dominant breaks ties in declaration order."""
    known = set(questionnaire.item_ids())
    unknown = sorted(set(responses) - known)
    if unknown:
        raise UnknownItemError(f"responses for unknown item(s): {unknown}")
    missing = sorted(known - set(responses))
    if missing:
        raise MissingResponseError(f"missing response(s) for item(s): {missing}")

    scores = {style: 0 for style in LearningStyle}
    for item in questionnaire.items:
        value = responses[item.id]
        if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
            raise OutOfRangeResponseError(
                f"item '{item.id}': response must be an integer in 1..5, got {value!r}"
            )
        scores[item.target_style] += value
    dominant = max(LearningStyle, key=lambda s: scores[s])  # first max wins
    return StyleProfile(scores=scores, dominant=dominant)


# --- learner model -----------------------------------------------------------

@dataclass
class LearningEvent:
    """One append-only record entry; the session transcript is made of these."""

    seq: int
    at: float
    kind: str
    data: dict[str, Any]


@dataclass
class ConceptKnowledge:
    last_score: int
    level: KnowledgeLevel
    attempts: int


@dataclass
class LearnerModel:
    """Mutable per-learner state; owned by at most one active session."""

    learner_id: str
    name: str
    seed: int
    style: StyleProfile | None = None
    level: LearnerLevel = LearnerLevel.SLOW_LEARNER
    concept_knowledge: dict[str, ConceptKnowledge] = field(default_factory=dict)
    asked_questions: set[str] = field(default_factory=set)
    training_attempts: dict[str, int] = field(default_factory=dict)
    plan_counter: int = 0
    events: list[LearningEvent] = field(default_factory=list)


def new_learner(name: str, learner_id: str | None = None, seed: int | None = None) -> LearnerModel:
    if seed is None:
        seed = random.SystemRandom().getrandbits(63)
    return LearnerModel(learner_id=learner_id or uuid4().hex, name=name, seed=seed)


def append_event(
    model: LearnerModel, kind: str, data: dict[str, Any], at: float | None = None
) -> LearningEvent:
    event = LearningEvent(
        seq=len(model.events),
        at=time.time() if at is None else at,
        kind=kind,
        data=data,
    )
    model.events.append(event)
    return event


def update_after_posttest(
    model: LearnerModel,
    concept_id: str,
    score: int,
    *,
    kb: KnowledgeBase,
    at: float | None = None,
) -> LearnerModel:
    """Record a graded test for a concept and re-derive the learner level."""
    if concept_id not in kb.concepts:
        raise UnknownConceptError(f"concept '{concept_id}' is not in the knowledge base")
    level = classify_knowledge(score)  # also validates the score range
    existing = model.concept_knowledge.get(concept_id)
    model.concept_knowledge[concept_id] = ConceptKnowledge(
        last_score=score,
        level=level,
        attempts=(existing.attempts if existing else 0) + 1,
    )
    append_event(
        model,
        POST_TEST_EVENT,
        {"concept_id": concept_id, "score": score, "level": level.value},
        at=at,
    )
    model.level = derive_learner_level(model)
    return model


def derive_learner_level(model: LearnerModel) -> LearnerLevel:
    """Rolling mean of the last up-to-5 recorded test scores.

    Bands: below 31 weak, below 51 slow learner, below 86 smart, else
    genius. With no history the learner starts as a slow learner.
    """
    scores = [e.data["score"] for e in model.events if e.kind == POST_TEST_EVENT]
    if not scores:
        return LearnerLevel.SLOW_LEARNER
    mean = sum(scores[-LEVEL_WINDOW:]) / len(scores[-LEVEL_WINDOW:])
    if mean < 31:
        return LearnerLevel.WEAK
    if mean < 51:
        return LearnerLevel.SLOW_LEARNER
    if mean < 86:
        return LearnerLevel.SMART
    return LearnerLevel.GENIUS


def aggregate_topic_knowledge(model: LearnerModel, topic: Topic) -> int:
    """Objective-level score: mean of last concept scores, unattempted = 0."""
    scores = [
        model.concept_knowledge[cid].last_score if cid in model.concept_knowledge else 0
        for cid in topic.concept_ids
    ]
    return round_half_up(sum(scores) / len(scores))


# --- serialization ------------------------------------------------------------

def model_to_document(model: LearnerModel) -> dict[str, Any]:
    return {
        "schema_version": LEARNER_SCHEMA_VERSION,
        "learner_id": model.learner_id,
        "name": model.name,
        "seed": model.seed,
        "style": None
        if model.style is None
        else {
            "scores": {s.value: v for s, v in sorted(model.style.scores.items())},
            "dominant": model.style.dominant.value,
        },
        "level": model.level.value,
        "concept_knowledge": {
            cid: {"last_score": ck.last_score, "level": ck.level.value, "attempts": ck.attempts}
            for cid, ck in sorted(model.concept_knowledge.items())
        },
        "asked_questions": sorted(model.asked_questions),
        "training_attempts": dict(sorted(model.training_attempts.items())),
        "plan_counter": model.plan_counter,
        "events": [
            {"seq": e.seq, "at": e.at, "kind": e.kind, "data": e.data} for e in model.events
        ],
    }


def model_from_document(doc: dict[str, Any]) -> LearnerModel:
    version = doc.get("schema_version")
    if version != LEARNER_SCHEMA_VERSION:
        raise ValueError(f"unsupported learner record schema_version: {version!r}")
    style = None
    if doc["style"] is not None:
        style = StyleProfile(
            scores={LearningStyle(s): v for s, v in doc["style"]["scores"].items()},
            dominant=LearningStyle(doc["style"]["dominant"]),
        )
    return LearnerModel(
        learner_id=doc["learner_id"],
        name=doc["name"],
        seed=doc["seed"],
        style=style,
        level=LearnerLevel(doc["level"]),
        concept_knowledge={
            cid: ConceptKnowledge(
                last_score=ck["last_score"],
                level=KnowledgeLevel(ck["level"]),
                attempts=ck["attempts"],
            )
            for cid, ck in doc["concept_knowledge"].items()
        },
        asked_questions=set(doc["asked_questions"]),
        training_attempts=dict(doc["training_attempts"]),
        plan_counter=doc["plan_counter"],
        events=[
            LearningEvent(seq=e["seq"], at=e["at"], kind=e["kind"], data=e["data"])
            for e in doc["events"]
        ],
    )
