"""Expert-system layer: plans tests, gates concepts, and picks presentation.

Test planning enforces three selection rules:

  R1  questions are never repeated against a learner, even across sessions;
  R2  every section of the target concept contributes at least one question;
  R3  every difficulty level appears at least once.

The number of questions drawn per difficulty comes from a per-learner-level
mix; selection and ordering are uniform-random under a caller-supplied seed,
so plans are reproducible. Every decision function returns the ordered list
of rules that fired, with human-readable justifications.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass
from enum import Enum
from typing import IO, Any

from .errors import (
    ConfigError,
    InsufficientBankError,
    NoAssetError,
    ScoreOutOfRangeError,
    UnknownConceptError,
)
from .kb import Concept, Difficulty, EducationMethod, KnowledgeBase
from .learner import KnowledgeLevel, LearnerLevel, LearnerModel, LearningStyle

# Mastery bar: lowest band that counts as learned (the 'good' band floor).
DEFAULT_MASTERY_BAR = 51
DEFAULT_SKIP_THRESHOLD = 86
DEFAULT_TRAIN_THRESHOLD = 51

LevelMix = dict[LearnerLevel, dict[Difficulty, int]]
PreferenceTable = dict[LearningStyle, tuple[EducationMethod, ...]]


@dataclass(frozen=True)
class RuleFiring:
    rule: str
    because: str


RuleTrace = list[RuleFiring]


def trace_to_payload(trace: RuleTrace) -> list[dict[str, str]]:
    return [{"rule": f.rule, "because": f.because} for f in trace]


class TestPhase(str, Enum):
    PRE_TEST = "pretest"
    POST_TEST = "posttest"


@dataclass(frozen=True)
class TestPlan:
    phase: TestPhase
    question_ids: tuple[str, ...]
    weights: dict[str, int]
    total_weight: int


class GateAction(str, Enum):
    SKIP = "skip"
    TRAIN = "train"
    REMEDIATE = "remediate"


@dataclass(frozen=True)
class GateDecision:
    action: GateAction
    prerequisite: str | None = None


# --- configuration -----------------------------------------------------------

_DEFAULT_PREFERENCES: dict[LearningStyle, tuple[EducationMethod, ...]] = {
    LearningStyle.SS: (
        EducationMethod.GAME,
        EducationMethod.DYNAMIC_VIEW,
        EducationMethod.PUZZLE,
        EducationMethod.FILM,
        EducationMethod.TEXT,
    ),
    LearningStyle.GOA: (
        EducationMethod.PUZZLE,
        EducationMethod.TEXT,
        EducationMethod.FILM,
        EducationMethod.DYNAMIC_VIEW,
        EducationMethod.GAME,
    ),
    LearningStyle.EIA: (
        EducationMethod.PUZZLE,
        EducationMethod.TEXT,
        EducationMethod.DYNAMIC_VIEW,
        EducationMethod.FILM,
        EducationMethod.GAME,
    ),
    LearningStyle.CA: (
        EducationMethod.TEXT,
        EducationMethod.FILM,
        EducationMethod.DYNAMIC_VIEW,
        EducationMethod.PUZZLE,
        EducationMethod.GAME,
    ),
    LearningStyle.DLA: (
        EducationMethod.DYNAMIC_VIEW,
        EducationMethod.FILM,
        EducationMethod.GAME,
        EducationMethod.PUZZLE,
        EducationMethod.TEXT,
    ),
}

_DEFAULT_MIX: LevelMix = {
    LearnerLevel.WEAK: {Difficulty.EASY: 3, Difficulty.MEDIUM: 1, Difficulty.HARD: 1},
    LearnerLevel.SLOW_LEARNER: {Difficulty.EASY: 3, Difficulty.MEDIUM: 1, Difficulty.HARD: 1},
    LearnerLevel.SMART: {Difficulty.EASY: 1, Difficulty.MEDIUM: 3, Difficulty.HARD: 1},
    LearnerLevel.GENIUS: {Difficulty.EASY: 1, Difficulty.MEDIUM: 1, Difficulty.HARD: 3},
}


@dataclass(frozen=True)
class PedagogyConfig:
    preference_table: PreferenceTable
    level_mix: LevelMix
    skip_threshold: int = DEFAULT_SKIP_THRESHOLD
    train_threshold: int = DEFAULT_TRAIN_THRESHOLD
    mastery_bar: int = DEFAULT_MASTERY_BAR
    # When set, presentation always uses this method (static-policy override).
    fixed_method: EducationMethod | None = None


def default_config() -> PedagogyConfig:
    return PedagogyConfig(
        preference_table=dict(_DEFAULT_PREFERENCES),
        level_mix={level: dict(row) for level, row in _DEFAULT_MIX.items()},
    )


def _validate_config(config: PedagogyConfig) -> PedagogyConfig:
    for style in LearningStyle:
        row = config.preference_table.get(style)
        if row is None:
            raise ConfigError(f"preference_table missing style '{style.value}'")
        if sorted(m.value for m in row) != sorted(m.value for m in EducationMethod):
            raise ConfigError(
                f"preference_table['{style.value}'] must be a permutation of all "
                f"five methods, got {[m.value for m in row]}"
            )
    for level in LearnerLevel:
        row = config.level_mix.get(level)
        if row is None:
            raise ConfigError(f"level_mix missing learner level '{level.value}'")
        for diff in Difficulty:
            if row.get(diff, 0) < 1:
                raise ConfigError(
                    f"level_mix['{level.value}'] must draw at least one "
                    f"'{diff.value}' question"
                )
    if not 0 <= config.train_threshold < config.skip_threshold <= 100:
        raise ConfigError(
            f"thresholds must satisfy 0 <= train < skip <= 100, got "
            f"train={config.train_threshold} skip={config.skip_threshold}"
        )
    if not 0 <= config.mastery_bar <= 100:
        raise ConfigError(f"mastery_bar out of range: {config.mastery_bar}")
    return config


def load_pedagogy_config(source: bytes | str | dict | IO | os.PathLike) -> PedagogyConfig:
    """Load a pedagogy config JSON; absent keys fall back to the defaults."""
    if isinstance(source, dict):
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
            raise ConfigError(f"malformed pedagogy config: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("pedagogy config must be a JSON object")

    defaults = default_config()
    try:
        prefs = dict(defaults.preference_table)
        for style_key, row in doc.get("preference_table", {}).items():
            prefs[LearningStyle(style_key)] = tuple(EducationMethod(m) for m in row)
        mix = {level: dict(row) for level, row in defaults.level_mix.items()}
        for level_key, row in doc.get("level_mix", {}).items():
            mix[LearnerLevel(level_key)] = {
                Difficulty(d): int(n) for d, n in row.items()
            }
        thresholds = doc.get("thresholds", {})
        fixed = doc.get("fixed_method")
        config = PedagogyConfig(
            preference_table=prefs,
            level_mix=mix,
            skip_threshold=int(thresholds.get("skip", defaults.skip_threshold)),
            train_threshold=int(thresholds.get("train", defaults.train_threshold)),
            mastery_bar=int(doc.get("mastery_bar", defaults.mastery_bar)),
            fixed_method=None if fixed is None else EducationMethod(fixed),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid pedagogy config: {exc}") from exc
    return _validate_config(config)


# --- mastery helpers -----------------------------------------------------------

def is_mastered(model: LearnerModel, concept_id: str, mastery_bar: int = DEFAULT_MASTERY_BAR) -> bool:
    knowledge = model.concept_knowledge.get(concept_id)
    return knowledge is not None and knowledge.last_score >= mastery_bar


def unmastered_prerequisites(
    kb: KnowledgeBase,
    model: LearnerModel,
    concept_id: str,
    mastery_bar: int = DEFAULT_MASTERY_BAR,
) -> list[str]:
    concept = kb.concepts[concept_id]
    return [p for p in concept.prerequisites if not is_mastered(model, p, mastery_bar)]


# --- test planning -----------------------------------------------------------

def plan_test(
    kb: KnowledgeBase,
    model: LearnerModel,
    concept_id: str,
    phase: TestPhase,
    mix: LevelMix,
    seed: int,
) -> tuple[TestPlan, RuleTrace]:
    """Select and order questions for one test under rules R1-R3.

    Draw counts per difficulty follow the learner-level mix row, raised
    where section coverage forces extra picks. Deterministic for fixed
    inputs and seed. Raises InsufficientBankError when no plan can satisfy
    the rules (never silently relaxes them).
    """
    if concept_id not in kb.concepts:
        raise UnknownConceptError(f"concept '{concept_id}' is not in the knowledge base")
    row = mix.get(model.level)
    if row is None:
        raise ConfigError(f"level_mix has no row for learner level '{model.level.value}'")

    concept = kb.concepts[concept_id]
    rng = random.Random(seed)
    trace: RuleTrace = []

    bank_size = len(kb.concept_question_ids(concept_id))
    blocked = sum(1 for qid in kb.concept_question_ids(concept_id) if qid in model.asked_questions)
    trace.append(
        RuleFiring(
            "R1_NO_REPEAT",
            f"excluded {blocked} of {bank_size} bank questions already asked "
            f"to this learner",
        )
    )

    def unused(section_id: str, difficulty: Difficulty) -> list[str]:
        return [
            qid
            for qid in kb.questions_for(concept_id, section_id, difficulty)
            if qid not in model.asked_questions
        ]

    selected: list[str] = []
    chosen: set[str] = set()

    # R2: one pick per section, drawn uniformly across its unused questions.
    for section in concept.sections:
        candidates = [qid for diff in Difficulty for qid in unused(section.id, diff)]
        if not candidates:
            raise InsufficientBankError(
                concept_id, f"section '{section.id}' has no unused questions left"
            )
        pick = rng.choice(candidates)
        selected.append(pick)
        chosen.add(pick)
    trace.append(
        RuleFiring(
            "R2_SECTION_COVERAGE",
            f"drew one question from each of the {len(concept.sections)} section(s)",
        )
    )

    # R3 + mix: top up each difficulty to the learner-level row.
    for diff in Difficulty:
        target = row[diff]
        have = sum(1 for qid in selected if kb.questions[qid].difficulty is diff)
        if have >= target:
            continue
        pool = [
            qid
            for section in concept.sections
            for qid in unused(section.id, diff)
            if qid not in chosen
        ]
        need = target - have
        if len(pool) < need:
            raise InsufficientBankError(
                concept_id,
                f"only {have + len(pool)} unused '{diff.value}' question(s) "
                f"available, {target} required",
            )
        picks = rng.sample(pool, need)
        selected.extend(picks)
        chosen.update(picks)
    counts = {
        diff.value: sum(1 for qid in selected if kb.questions[qid].difficulty is diff)
        for diff in Difficulty
    }
    trace.append(
        RuleFiring(
            "R3_ALL_LEVELS",
            f"difficulty counts {counts} meet the '{model.level.value}' mix",
        )
    )

    rng.shuffle(selected)
    trace.append(RuleFiring("ORDER_SHUFFLE", "question order randomized under the plan seed"))

    weights = {qid: kb.questions[qid].weight for qid in selected}
    plan = TestPlan(
        phase=phase,
        question_ids=tuple(selected),
        weights=weights,
        total_weight=sum(weights.values()),
    )
    return plan, trace


def feasible_plan_exists(
    kb: KnowledgeBase,
    asked_questions: set[str],
    concept_id: str,
    row: dict[Difficulty, int],
) -> bool:
    """Whether any R1-R3-satisfying plan exists for this bank state and mix row."""
    concept = kb.concepts[concept_id]
    for section in concept.sections:
        if not any(
            qid
            for diff in Difficulty
            for qid in kb.questions_for(concept_id, section.id, diff)
            if qid not in asked_questions
        ):
            return False
    for diff in Difficulty:
        available = sum(
            1
            for section in concept.sections
            for qid in kb.questions_for(concept_id, section.id, diff)
            if qid not in asked_questions
        )
        if available < row[diff]:
            return False
    return True


# --- gating --------------------------------------------------------------------

def gate_pretest(
    score: int,
    *,
    skip_threshold: int = DEFAULT_SKIP_THRESHOLD,
    train_threshold: int = DEFAULT_TRAIN_THRESHOLD,
    unmastered_prereqs: list[str] | None = None,
) -> tuple[GateDecision, RuleTrace]:
    """Decide skip / train / remediate from a graded pre-test score."""
    if not train_threshold < skip_threshold:
        raise ConfigError("skip threshold must exceed train threshold")
    if not isinstance(score, int) or isinstance(score, bool) or not 0 <= score <= 100:
        raise ScoreOutOfRangeError(f"score must be an integer in 0..100, got {score!r}")
    prereqs = unmastered_prereqs or []

    if score >= skip_threshold:
        return GateDecision(GateAction.SKIP), [
            RuleFiring(
                "GATE_SKIP",
                f"pre-test score {score} reached the skip threshold "
                f"{skip_threshold}; concept already known",
            )
        ]
    if score >= train_threshold:
        return GateDecision(GateAction.TRAIN), [
            RuleFiring(
                "GATE_TRAIN",
                f"pre-test score {score} is between the train threshold "
                f"{train_threshold} and the skip threshold {skip_threshold}",
            )
        ]
    if prereqs:
        return GateDecision(GateAction.REMEDIATE, prerequisite=prereqs[0]), [
            RuleFiring(
                "GATE_REMEDIATE",
                f"pre-test score {score} fell below {train_threshold} and "
                f"prerequisite '{prereqs[0]}' is not yet mastered; teaching "
                f"it first",
            )
        ]
    return GateDecision(GateAction.TRAIN), [
        RuleFiring(
            "GATE_TRAIN",
            f"pre-test score {score} fell below {train_threshold} but the "
            f"concept has no unmastered prerequisites; training it directly",
        )
    ]


# --- presentation choice ---------------------------------------------------------

def choose_presentation(
    style: LearningStyle,
    attempt: int,
    prefs: PreferenceTable,
    concept: Concept,
    fixed_method: EducationMethod | None = None,
) -> tuple[EducationMethod, RuleTrace]:
    """Pick the presentation method for a training attempt.

    Walks the style's preference row starting at position (attempt mod 5),
    so repeated failures rotate through methods; returns the first method
    the concept has an asset for.
    """
    if not concept.assets:
        raise NoAssetError(f"concept '{concept.id}' has no presentation assets")
    if fixed_method is not None:
        if fixed_method in concept.assets:
            return fixed_method, [
                RuleFiring(
                    "METHOD_POLICY_FIXED",
                    f"policy pins presentation to '{fixed_method.value}' "
                    f"regardless of learning style",
                )
            ]
        raise NoAssetError(
            f"concept '{concept.id}' has no '{fixed_method.value}' asset for the pinned policy"
        )

    row = prefs[style]
    start = attempt % len(row)
    for offset in range(len(row)):
        method = row[(start + offset) % len(row)]
        if method in concept.assets:
            trace = [
                RuleFiring(
                    "METHOD_PREFERENCE",
                    f"style '{style.value}' prefers {[m.value for m in row]}; "
                    f"training attempt {attempt} starts the walk at "
                    f"'{row[start].value}'",
                )
            ]
            if offset:
                trace.append(
                    RuleFiring(
                        "METHOD_FALLBACK",
                        f"skipped {offset} preferred method(s) without assets; "
                        f"presenting via '{method.value}'",
                    )
                )
            return method, trace
    raise NoAssetError(f"concept '{concept.id}' has no asset for any method")


# --- concept sequencing ----------------------------------------------------------

def next_concept(
    kb: KnowledgeBase,
    model: LearnerModel,
    mastery_bar: int = DEFAULT_MASTERY_BAR,
) -> tuple[str | None, RuleTrace]:
    """First concept, in prerequisite-refined curriculum order, not yet mastered.

    Returns (None, trace) when the whole curriculum is at or above the bar.
    """
    for cid in kb.curriculum:
        if not is_mastered(model, cid, mastery_bar):
            knowledge = model.concept_knowledge.get(cid)
            held = (
                f"last score {knowledge.last_score} ({knowledge.level.value})"
                if knowledge
                else "not attempted yet"
            )
            return cid, [
                RuleFiring(
                    "NEXT_UNMASTERED",
                    f"'{cid}' is the first concept in curriculum order below the "
                    f"mastery bar ({mastery_bar}, the '{KnowledgeLevel.GOOD.value}' "
                    f"band floor): {held}",
                )
            ]
    return None, [
        RuleFiring(
            "CURRICULUM_COMPLETE",
            f"every concept is at or above the mastery bar ({mastery_bar})",
        )
    ]
