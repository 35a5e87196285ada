from __future__ import annotations

import pytest

from querydialog import build_runtime
from querydialog.config import RuntimeConfig


@pytest.fixture(scope="session")
def runtime():
    return build_runtime(RuntimeConfig())


@pytest.fixture(scope="session")
def runtime_en():
    return build_runtime(RuntimeConfig(language="en"))


@pytest.fixture()
def fresh_session(runtime):
    from querydialog.session import DialogueSession

    session = DialogueSession(runtime)
    session.start()
    return session
