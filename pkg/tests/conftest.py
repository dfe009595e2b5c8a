import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from pvi_rh_lab.backlund import INFINITY, ExtendedState, TimeConfig, random_numeric_state
from pvi_rh_lab.scalars import GaussianRational
from pvi_rh_lab.weyl import Kappa

settings.register_profile("lab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=1000)
gaussians = st.builds(GaussianRational, rationals, rationals)
nonzero_gaussians = gaussians.filter(lambda z: z != 0)


@st.composite
def kappas(draw, fuchs=True):
    k1, k2, k3, k4 = (draw(gaussians) for _ in range(4))
    if fuchs:
        return Kappa.from_k1234(k1, k2, k3, k4)
    return Kappa.unchecked(draw(gaussians), k1, k2, k3, k4)


@st.composite
def exact_states(draw, t4_finite=False, fuchs=True):
    kappa = draw(kappas(fuchs))
    n = 4 if t4_finite else 3
    ts = draw(st.lists(gaussians, min_size=n, max_size=n, unique=True))
    q = draw(gaussians.filter(lambda z: z not in ts))
    p = draw(nonzero_gaussians)
    t = TimeConfig(*ts) if t4_finite else TimeConfig(*ts, INFINITY)
    if fuchs:
        return ExtendedState(kappa, t, q, p)
    return kappa, t, q, p


def fr(n, d=1):
    """The rational n/d as an exact scalar."""
    return GaussianRational(Fraction(n, d))


@pytest.fixture
def numeric_states():
    def make(seed, n):
        rng = random.Random(seed)
        return [random_numeric_state(rng) for _ in range(n)]
    return make


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
