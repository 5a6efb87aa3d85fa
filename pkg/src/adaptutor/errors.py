"""Exception hierarchy shared across the tutoring engine."""

from __future__ import annotations


class TutorError(Exception):
    """Base class for every error raised by this package."""

    code = "TUTOR_ERROR"


# --- knowledge base -------------------------------------------------------

class KBParseError(TutorError):
    """The knowledge-base document is not well-formed JSON."""

    code = "KB_PARSE_ERROR"


class KBValidationError(TutorError):
    """The knowledge-base document violates one or more invariants.

    ``violations`` is a list of human-readable messages, each citing the
    JSON path of the offending element.
    """

    code = "KB_VALIDATION_ERROR"

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        summary = "; ".join(self.violations[:3])
        if len(self.violations) > 3:
            summary += f" (+{len(self.violations) - 3} more)"
        super().__init__(f"{len(self.violations)} violation(s): {summary}")


# --- questionnaire / learner ----------------------------------------------

class QuestionnaireError(TutorError):
    code = "QUESTIONNAIRE_ERROR"


class MissingResponseError(QuestionnaireError):
    code = "MISSING_RESPONSE"


class UnknownItemError(QuestionnaireError):
    code = "UNKNOWN_ITEM"


class OutOfRangeResponseError(QuestionnaireError):
    code = "OUT_OF_RANGE_RESPONSE"


class ScoreOutOfRangeError(TutorError):
    """A score fell outside the 0..100 band."""

    code = "SCORE_OUT_OF_RANGE"


class UnknownConceptError(TutorError):
    code = "UNKNOWN_CONCEPT"


# --- record store -----------------------------------------------------------

class LearnerNotFoundError(TutorError):
    code = "LEARNER_NOT_FOUND"


class StorageError(TutorError):
    code = "STORAGE_ERROR"


# --- pedagogy ----------------------------------------------------------------

class ConfigError(TutorError):
    """A pedagogy or simulation config file is invalid."""

    code = "CONFIG_ERROR"


class InsufficientBankError(TutorError):
    """The question bank cannot satisfy the selection rules.

    Signals content exhaustion for ``concept_id``; never silently relaxed.
    """

    code = "INSUFFICIENT_BANK"

    def __init__(self, concept_id: str, reason: str):
        self.concept_id = concept_id
        self.reason = reason
        super().__init__(f"concept '{concept_id}': {reason}")


class NoAssetError(TutorError):
    code = "NO_ASSET"


# --- session / grading -------------------------------------------------------

class WrongStateError(TutorError):
    """Operation not legal in the session's current state."""

    code = "WRONG_STATE"

    def __init__(self, state: str, operation: str):
        self.state = state
        self.operation = operation
        super().__init__(f"cannot {operation} while in state '{state}'")


class MissingAnswerError(TutorError):
    code = "MISSING_ANSWER"


class UnknownQuestionError(TutorError):
    code = "UNKNOWN_QUESTION"


class InvalidAnswerError(TutorError):
    """An answer value is not an integer choice index."""

    code = "INVALID_ANSWER"
