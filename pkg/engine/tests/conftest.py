from pathlib import Path

import pytest

from exstruct.core.config import Settings
from exstruct.services.exactfield import Field
from exstruct.services.workspace import load_workspace

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def settings(tmp_path_factory) -> Settings:
    return Settings(cache_enabled=False, cache_dir=tmp_path_factory.mktemp("cache"))


def _load(name: str, settings: Settings):
    return load_workspace(FIXTURES / f"{name}.json", settings=settings, use_cache=False)


@pytest.fixture(scope="session")
def ss(settings):
    return _load("ss", settings)


@pytest.fixture(scope="session")
def a2(settings):
    return _load("a2", settings)


@pytest.fixture(scope="session")
def a2_p2(settings):
    return _load("a2_p2", settings)


@pytest.fixture(scope="session")
def dual(settings):
    return _load("dual", settings)


@pytest.fixture(scope="session")
def dual_p2(settings):
    return _load("dual_p2", settings)


@pytest.fixture(scope="session")
def a3(settings):
    return _load("a3", settings)


@pytest.fixture(scope="session")
def a3_p2(settings):
    return _load("a3_p2", settings)


@pytest.fixture
def f7() -> Field:
    return Field(7)