"""Shared fixtures: the expensive spectral/oracle objects are session-scoped."""

import pytest

from gkw import SpectralOptions, eigenvalue, oracle_eigenvalues


DEFAULT_OPTS = SpectralOptions(precision=128, v_max=32)


@pytest.fixture(scope="session")
def opts128():
    return DEFAULT_OPTS


@pytest.fixture(scope="session")
def eigen_cache():
    """Refined eigenvalues at default options for the indices the suite uses."""
    cache = {}

    def get(n, opts=DEFAULT_OPTS):
        key = (n, opts)
        if key not in cache:
            cache[key] = eigenvalue(n, opts)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def oracle_cache():
    cache = {}

    def get(N, count=6, prec=128):
        key = (N, count, prec)
        if key not in cache:
            cache[key] = oracle_eigenvalues(N, count, prec)
        return cache[key]

    return get
