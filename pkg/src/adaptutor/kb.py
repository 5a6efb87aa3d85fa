"""Knowledge-base model: immutable curriculum content.

A knowledge base is a tree of topics -> concepts -> sections plus a
multiple-choice question bank. It is loaded once from a UTF-8 JSON
document, fully validated, and never mutated afterwards, so a single
instance is safe to share across concurrent sessions.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import IO, Any

import jsonschema

from .errors import KBParseError, KBValidationError

ID_PATTERN = re.compile(r"^[a-z0-9_-]+$")


class EducationMethod(str, Enum):
    """Presentation modality for a concept. Text is the universal fallback."""

    FILM = "film"
    DYNAMIC_VIEW = "dynamic_view"
    GAME = "game"
    PUZZLE = "puzzle"
    TEXT = "text"


class Difficulty(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"


@dataclass(frozen=True)
class Question:
    """One single-correct multiple-choice question worth ``weight`` points."""

    id: str
    concept_id: str
    section_id: str
    difficulty: Difficulty
    weight: int
    body: str
    choices: tuple[str, ...]
    correct_index: int


@dataclass(frozen=True)
class Section:
    """A subdivision of a concept, weighted per education method."""

    id: str
    title: str
    importance: dict[EducationMethod, int]


@dataclass(frozen=True)
class Concept:
    """The smallest teachable unit; the grain of the pre-test/learn/post-test loop."""

    id: str
    title: str
    sections: tuple[Section, ...]
    prerequisites: tuple[str, ...]
    assets: dict[EducationMethod, str]

    def section_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.sections)


@dataclass(frozen=True)
class Topic:
    id: str
    title: str
    concept_ids: tuple[str, ...]


@dataclass(frozen=True)
class KnowledgeBase:
    topics: tuple[Topic, ...]
    concepts: dict[str, Concept]
    questions: dict[str, Question]
    # Derived lookups, built once at load; excluded from equality.
    topic_of: dict[str, str] = field(compare=False, repr=False, default_factory=dict)
    curriculum: tuple[str, ...] = field(compare=False, repr=False, default=())
    _section_bank: dict[tuple[str, str, Difficulty], tuple[str, ...]] = field(
        compare=False, repr=False, default_factory=dict
    )

    def questions_for(
        self, concept_id: str, section_id: str, difficulty: Difficulty
    ) -> tuple[str, ...]:
        """Question ids for one (section, difficulty) cell, in stable id order."""
        return self._section_bank.get((concept_id, section_id, difficulty), ())

    def concept_question_ids(self, concept_id: str) -> tuple[str, ...]:
        out = []
        for concept_key, _section, _diff in sorted(self._section_bank):
            if concept_key == concept_id:
                out.extend(self._section_bank[(concept_key, _section, _diff)])
        return tuple(sorted(out))


def _schema() -> dict[str, Any]:
    with resources.files("adaptutor.data").joinpath("kb.schema.json").open("rb") as fh:
        return json.load(fh)


def _structural_violations(doc: Any) -> list[str]:
    validator = jsonschema.Draft202012Validator(_schema())
    out = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: str(e.json_path)):
        out.append(f"{err.json_path}: {err.message}")
    return out


def _semantic_violations(doc: dict[str, Any]) -> list[str]:
    violations: list[str] = []
    concepts: dict[str, Any] = doc["concepts"]
    questions: dict[str, Any] = doc["questions"]

    # Topic layer: ids unique, references resolve, concepts partition into topics.
    seen_topics: set[str] = set()
    owner: dict[str, str] = {}
    for ti, topic in enumerate(doc["topics"]):
        tid = topic["id"]
        if tid in seen_topics:
            violations.append(f"$.topics[{ti}].id: duplicate topic id '{tid}'")
        seen_topics.add(tid)
        for ci, cid in enumerate(topic["concepts"]):
            path = f"$.topics[{ti}].concepts[{ci}]"
            if cid not in concepts:
                violations.append(f"{path}: dangling reference to concept '{cid}'")
            elif cid in owner:
                violations.append(
                    f"{path}: concept '{cid}' already belongs to topic '{owner[cid]}'"
                )
            else:
                owner[cid] = tid
    for cid in concepts:
        if cid not in owner:
            violations.append(f"$.concepts.{cid}: concept belongs to no topic")

    # Concept layer.
    for cid, concept in concepts.items():
        base = f"$.concepts.{cid}"
        section_ids: set[str] = set()
        for si, section in enumerate(concept["sections"]):
            if section["id"] in section_ids:
                violations.append(
                    f"{base}.sections[{si}].id: duplicate section id '{section['id']}'"
                )
            section_ids.add(section["id"])

        asset_methods = set(concept["assets"])
        if EducationMethod.TEXT.value not in asset_methods:
            violations.append(f"{base}.assets: missing mandatory 'text' fallback asset")

        # All sections of a concept must weight the same method set, and that
        # set must cover every method the concept has an asset for.
        method_sets = {frozenset(s["importance"]) for s in concept["sections"]}
        if len(method_sets) > 1:
            violations.append(
                f"{base}.sections: sections disagree on which methods they weight"
            )
            continue
        methods = set(next(iter(method_sets)))
        missing = asset_methods - methods
        if missing:
            violations.append(
                f"{base}.sections: importance missing entries for asset method(s) "
                f"{sorted(missing)}"
            )
            continue

        # Arg-max section must be unique and identical for every method.
        argmax_by_method: dict[str, str] = {}
        tied = False
        for method in sorted(methods):
            best = max(s["importance"][method] for s in concept["sections"])
            winners = [s["id"] for s in concept["sections"] if s["importance"][method] == best]
            if len(winners) > 1:
                violations.append(
                    f"{base}.sections: importance tie for method '{method}' "
                    f"between sections {winners}"
                )
                tied = True
            else:
                argmax_by_method[method] = winners[0]
        if not tied and len(set(argmax_by_method.values())) > 1:
            violations.append(
                f"{base}.sections: most important section differs across methods "
                f"({argmax_by_method})"
            )

    # Prerequisite graph: references resolve, no cycles.
    for cid, concept in concepts.items():
        for pi, pid in enumerate(concept.get("prerequisites", [])):
            if pid not in concepts:
                violations.append(
                    f"$.concepts.{cid}.prerequisites[{pi}]: dangling reference to '{pid}'"
                )
            if pid == cid:
                violations.append(
                    f"$.concepts.{cid}.prerequisites[{pi}]: concept requires itself"
                )
    cycle = _find_cycle(concepts)
    if cycle:
        violations.append(
            "$.concepts: cyclic prerequisites: " + " -> ".join(cycle)
        )

    # Question layer.
    coverage: dict[tuple[str, str, str], int] = {}
    for qid, q in questions.items():
        base = f"$.questions.{qid}"
        cid = q["concept_id"]
        if cid not in concepts:
            violations.append(f"{base}.concept_id: dangling reference to '{cid}'")
            continue
        section_ids = {s["id"] for s in concepts[cid]["sections"]}
        if q["section_id"] not in section_ids:
            violations.append(
                f"{base}.section_id: section '{q['section_id']}' does not belong "
                f"to concept '{cid}'"
            )
            continue
        if q["correct_index"] >= len(q["choices"]):
            violations.append(
                f"{base}.correct_index: index {q['correct_index']} out of range "
                f"for {len(q['choices'])} choices"
            )
        coverage[(cid, q["section_id"], q["difficulty"])] = (
            coverage.get((cid, q["section_id"], q["difficulty"]), 0) + 1
        )

    # Every section needs at least one question per difficulty, otherwise the
    # all-levels selection rule can never be satisfied.
    for cid, concept in concepts.items():
        for section in concept["sections"]:
            for diff in Difficulty:
                if (cid, section["id"], diff.value) not in coverage:
                    violations.append(
                        f"$.concepts.{cid}.sections: section '{section['id']}' has no "
                        f"'{diff.value}' question"
                    )

    return violations


def _find_cycle(concepts: dict[str, Any]) -> list[str] | None:
    """Return one prerequisite cycle as an id path, or None."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {cid: WHITE for cid in concepts}
    stack: list[str] = []

    def visit(cid: str) -> list[str] | None:
        color[cid] = GRAY
        stack.append(cid)
        for pid in concepts[cid].get("prerequisites", []):
            if pid not in concepts:
                continue
            if color[pid] == GRAY:
                return stack[stack.index(pid):] + [pid]
            if color[pid] == WHITE:
                found = visit(pid)
                if found:
                    return found
        stack.pop()
        color[cid] = BLACK
        return None

    for cid in sorted(concepts):
        if color[cid] == WHITE:
            found = visit(cid)
            if found:
                return found
    return None


def _curriculum_order(
    topics: tuple[Topic, ...], concepts: dict[str, Concept]
) -> tuple[str, ...]:
    """Topic listing order refined so every prerequisite precedes its dependents.

    Deterministic: among ready concepts the one earliest in topic order (then
    smallest id) is emitted first.
    """
    base = [cid for topic in topics for cid in topic.concept_ids]
    position = {cid: i for i, cid in enumerate(base)}
    pending = set(base)
    emitted: list[str] = []
    emitted_set: set[str] = set()
    while pending:
        ready = [
            cid
            for cid in pending
            if all(p in emitted_set for p in concepts[cid].prerequisites)
        ]
        # Acyclicity was validated at load, so progress is guaranteed.
        nxt = min(ready, key=lambda cid: (position[cid], cid))
        emitted.append(nxt)
        emitted_set.add(nxt)
        pending.remove(nxt)
    return tuple(emitted)


def _build(doc: dict[str, Any]) -> KnowledgeBase:
    topics = tuple(
        Topic(id=t["id"], title=t["title"], concept_ids=tuple(t["concepts"]))
        for t in doc["topics"]
    )
    concepts = {
        cid: Concept(
            id=cid,
            title=c["title"],
            sections=tuple(
                Section(
                    id=s["id"],
                    title=s["title"],
                    importance={EducationMethod(m): w for m, w in s["importance"].items()},
                )
                for s in c["sections"]
            ),
            prerequisites=tuple(c.get("prerequisites", [])),
            assets={EducationMethod(m): ref for m, ref in c["assets"].items()},
        )
        for cid, c in doc["concepts"].items()
    }
    questions = {
        qid: Question(
            id=qid,
            concept_id=q["concept_id"],
            section_id=q["section_id"],
            difficulty=Difficulty(q["difficulty"]),
            weight=q["weight"],
            body=q["body"],
            choices=tuple(q["choices"]),
            correct_index=q["correct_index"],
        )
        for qid, q in doc["questions"].items()
    }

    bank: dict[tuple[str, str, Difficulty], list[str]] = {}
    for qid in sorted(questions):
        q = questions[qid]
        bank.setdefault((q.concept_id, q.section_id, q.difficulty), []).append(qid)
    section_bank = {key: tuple(ids) for key, ids in bank.items()}

    topic_of = {cid: t.id for t in topics for cid in t.concept_ids}
    curriculum = _curriculum_order(topics, concepts)
    return KnowledgeBase(
        topics=topics,
        concepts=concepts,
        questions=questions,
        topic_of=topic_of,
        curriculum=curriculum,
        _section_bank=section_bank,
    )


def load_knowledge_base(source: bytes | str | dict | IO | os.PathLike) -> KnowledgeBase:
    """Load and validate a knowledge base.

    ``source`` may be the JSON document itself (str/bytes/dict), an open
    file object, or a filesystem path.

    Raises KBParseError for malformed JSON and KBValidationError carrying
    the full list of invariant violations, each citing a JSON path.
    """
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
            raise KBParseError(f"malformed knowledge-base document: {exc}") from exc

    violations = _structural_violations(doc)
    if violations:
        raise KBValidationError(violations)
    violations = _semantic_violations(doc)
    if violations:
        raise KBValidationError(violations)
    return _build(doc)


def kb_to_document(kb: KnowledgeBase) -> dict[str, Any]:
    """Serialize back to the KB file structure (load -> dump round-trips)."""
    return {
        "topics": [
            {"id": t.id, "title": t.title, "concepts": list(t.concept_ids)}
            for t in kb.topics
        ],
        "concepts": {
            cid: {
                "title": c.title,
                "prerequisites": list(c.prerequisites),
                "sections": [
                    {
                        "id": s.id,
                        "title": s.title,
                        "importance": {m.value: w for m, w in sorted(s.importance.items())},
                    }
                    for s in c.sections
                ],
                "assets": {m.value: ref for m, ref in sorted(c.assets.items())},
            }
            for cid, c in sorted(kb.concepts.items())
        },
        "questions": {
            qid: {
                "concept_id": q.concept_id,
                "section_id": q.section_id,
                "difficulty": q.difficulty.value,
                "weight": q.weight,
                "body": q.body,
                "choices": list(q.choices),
                "correct_index": q.correct_index,
            }
            for qid, q in sorted(kb.questions.items())
        },
    }


def dump_knowledge_base(kb: KnowledgeBase) -> str:
    return json.dumps(kb_to_document(kb), ensure_ascii=False, indent=2, sort_keys=True)


def most_important_section(concept: Concept) -> str:
    """Id of the section with maximal importance.

    Method-independent by the validated arg-max invariant; ties were
    rejected at load time.
    """
    method = next(iter(sorted(concept.sections[0].importance)))
    return max(concept.sections, key=lambda s: s.importance[method]).id
