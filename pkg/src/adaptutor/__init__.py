"""Adaptive, rule-driven tutoring engine.

Models a learner from a learning-styles questionnaire, plans
non-repeating, section-covering, level-spanning tests, gates concepts on
pre-test scores, teaches through style-matched presentation methods, and
tracks mastery across sessions. Ships with an HTTP service and a
population simulator.
"""

from .errors import (
    ConfigError,
    InsufficientBankError,
    KBParseError,
    KBValidationError,
    LearnerNotFoundError,
    NoAssetError,
    StorageError,
    TutorError,
    WrongStateError,
)
from .kb import (
    Concept,
    Difficulty,
    EducationMethod,
    KnowledgeBase,
    Question,
    Section,
    Topic,
    dump_knowledge_base,
    kb_to_document,
    load_knowledge_base,
    most_important_section,
)
from .learner import (
    KnowledgeLevel,
    LearnerLevel,
    LearnerModel,
    LearningStyle,
    Questionnaire,
    StyleProfile,
    aggregate_topic_knowledge,
    classify_knowledge,
    default_questionnaire,
    derive_learner_level,
    load_questionnaire,
    new_learner,
    score_questionnaire,
    update_after_posttest,
)
from .pedagogy import (
    GateAction,
    GateDecision,
    PedagogyConfig,
    RuleFiring,
    TestPhase,
    TestPlan,
    choose_presentation,
    default_config,
    gate_pretest,
    load_pedagogy_config,
    next_concept,
    plan_test,
)
from .session import GradedTest, Session, SessionState, grade_test, start_session
from .sim import SimConfig, compare_policies, load_sim_config, simulate_population
from .store import LearnerStore

__version__ = "0.1.0"
