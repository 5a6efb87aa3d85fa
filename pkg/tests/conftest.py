from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from adaptutor.kb import load_knowledge_base
from adaptutor.learner import default_questionnaire
from adaptutor.pedagogy import default_config


@pytest.fixture(scope="session")
def sample_kb():
    with resources.files("adaptutor.data").joinpath("sample_kb.json").open("rb") as fh:
        return load_knowledge_base(fh)


@pytest.fixture(scope="session")
def questionnaire():
    return default_questionnaire()


@pytest.fixture(scope="session")
def pedagogy_config():
    return default_config()
