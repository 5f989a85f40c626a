import functools

import pytest

from rotlab.fixtures import builtin_map
from rotlab.orbit import iterate_domain


@functools.lru_cache(maxsize=None)
def series(name, grid_res, N):
    """Orbit series shared across test modules (computed once per session)."""
    return iterate_domain(builtin_map(name), grid_res, N)


@pytest.fixture(scope="session")
def get_series():
    return series


@functools.lru_cache(maxsize=None)
def pipeline(name):
    """Full pipeline on a builtin config; returns the Pipeline with its report and evidence."""
    from rotlab.fixtures import builtin_config
    from rotlab.pipeline import Pipeline

    p = Pipeline(builtin_config(name))
    p.run()
    return p


@pytest.fixture(scope="session")
def get_pipeline():
    return pipeline
