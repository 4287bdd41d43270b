import functools

import pytest
from hypothesis import settings

from sirs_activity.scenarios import preset
from sirs_activity.solver import solve

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def _solved(name, kind, overrides):
    sc = preset(name)
    if overrides:
        sc = sc.with_overrides(**dict(overrides))
    return solve(kind, sc.initial, sc.params, sc.policy, sc.config)


@pytest.fixture(scope="session")
def solved():
    """Full-horizon preset solves shared across test modules: ``solved(name, kind, **overrides)``."""
    def get(name, kind, **overrides):
        return _solved(name, kind, tuple(sorted(overrides.items())))
    return get
