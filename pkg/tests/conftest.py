import itertools
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from minred.forms import BinaryForm, UnimodularMatrix, is_squarefree, is_stable

settings.register_profile(
    "repo", derandomize=True, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

CUBIC = BinaryForm([-2, 2, 3, 127])
QMAP = ([50, 795, 2120], [265, 0, 106])


@pytest.fixture(autouse=True, scope="session")
def _cache_dir(tmp_path_factory):
    # keep the constants cache out of the home directory during tests
    old = os.environ.get("MINRED_CACHE_DIR")
    os.environ["MINRED_CACHE_DIR"] = str(tmp_path_factory.mktemp("cache"))
    yield
    if old is None:
        os.environ.pop("MINRED_CACHE_DIR", None)
    else:
        os.environ["MINRED_CACHE_DIR"] = old


def random_form(rng, n, lo=-20, hi=20, squarefree=False, stable=True):
    while True:
        F = BinaryForm(rng.integers(lo, hi + 1, size=n + 1).tolist())
        if not any(F.coeffs):
            continue
        if squarefree and not is_squarefree(F):
            continue
        if stable and not is_stable(F):
            continue
        return F


def sl2_matrices(bound):
    """All (a b; c d) in SL(2,Z) with entries in [-bound, bound]."""
    r = range(-bound, bound + 1)
    out = []
    for a, b, c in itertools.product(r, r, r):
        if a:
            if (1 + b * c) % a == 0:
                d = (1 + b * c) // a
                if abs(d) <= bound:
                    out.append(UnimodularMatrix(a, b, c, d))
        elif b * c == -1:
            out.extend(UnimodularMatrix(0, b, c, d) for d in r)
    return out


def random_sl2(rng, bound=5):
    while True:
        a, b, c = (int(v) for v in rng.integers(-bound, bound + 1, size=3))
        if a and (1 + b * c) % a == 0 and abs((1 + b * c) // a) <= bound:
            return UnimodularMatrix(a, b, c, (1 + b * c) // a)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
