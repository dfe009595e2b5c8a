import cmath
import math
import random

import pytest
from hypothesis import given, strategies as st

from pvi_rh_lab.errors import EmptyCurveError
from pvi_rh_lab.scalars import GaussianRational, I
from pvi_rh_lab.takano import (CoverPoint, TakanoParams, brute_force_member, case_of,
                               domain_membership, gamma_curve, random_takano_params,
                               takano_lambda, takano_QP)
from pvi_rh_lab.weyl import Kappa

from conftest import fr


def _params(k1, k3, c1, c2, **kw):
    kappa = Kappa.from_k1234(k1, 0, k3, 0)
    return TakanoParams(c1, c2, kw.get("rho", 0.5), kw.get("rho0", 0.05), kw.get("mu", 1e-4), kappa)


def test_lambda_example():
    p = _params(0, I, fr(1, 10), fr(1, 10))
    assert takano_lambda(p) == GaussianRational(fr(102, 100).re, -1)


def test_lambda_without_c():
    p = _params(fr(1, 3), I, 0, 0)
    assert takano_lambda(p) == 1 - fr(1, 3) - I


@pytest.mark.parametrize("case", range(1, 6))
def test_sampler_hits_each_row(case):
    rng = random.Random(case)
    for _ in range(5):
        p = random_takano_params(rng, case)
        assert p.valid
        assert case_of(p.lam()) == case
        assert complex(p.lam()).imag != 0


@pytest.mark.parametrize("case", range(1, 6))
def test_table_matches_inequalities(case):
    rng = random.Random(100 + case)
    p = random_takano_params(rng, case)
    members = 0
    for _ in range(2000):
        x = CoverPoint(-rng.uniform(1e-6, 30), rng.uniform(-30, 30))
        v = domain_membership(x, p).member
        assert v == brute_force_member(x, p)
        members += v
    assert 0 < members < 2000


@given(st.floats(-20, -1e-3), st.floats(-20, 20))
def test_first_integral_and_covering_action(ell, arg):
    p = random_takano_params(random.Random(0), 3)
    x = CoverPoint(ell, arg)
    Q, P = takano_QP(x, p)
    c = complex(p.c1) * complex(p.c2)
    assert abs(Q * P - c) <= 1e-12 * max(abs(c), abs(Q * P))
    Q2, _ = takano_QP(CoverPoint(ell, arg + 2 * math.pi), p)
    lam = complex(p.lam())
    assert abs(Q2 - Q * cmath.exp(2j * math.pi * lam)) <= 1e-9 * max(abs(Q2), 1e-300)


def test_row_two_is_limit_of_row_one():
    # on Re lambda = 1 the lower log bound of row 1 runs off to -infinity
    rng = random.Random(3)
    p2 = random_takano_params(rng, 2)
    x = CoverPoint(-25.0, 0.0)
    rep = domain_membership(x, p2)
    assert math.isnan(rep.L2)
    assert rep.member == brute_force_member(x, p2)


def test_boundary_is_not_member():
    # Re lambda = 0 and c1 = rho: on arg x = 0 one has |Q| = rho exactly
    from fractions import Fraction

    p4 = random_takano_params(random.Random(4), 4)
    c1 = GaussianRational(Fraction(p4.rho))
    c2 = GaussianRational(0, Fraction(p4.rho0 / (4 * p4.rho)))
    p = TakanoParams(c1, c2, p4.rho, p4.rho0, p4.mu, p4.kappa)
    assert complex(p.lam()).real == 0
    x = CoverPoint(-1.0, 0.0)
    assert abs(takano_QP(x, p)[0]) == pytest.approx(p.rho, rel=1e-15)
    assert not brute_force_member(x, p)
    assert not domain_membership(x, p).member


@pytest.mark.parametrize("case", range(1, 6))
def test_gamma_curve(case):
    p = random_takano_params(random.Random(20 + case), case)
    pts = gamma_curve(p, 200)
    c = abs(complex(p.c1) * complex(p.c2))
    for x in pts:
        Q, P = takano_QP(x, p)
        assert abs(abs(Q) - p.mu) <= 1e-12
        assert abs(abs(P) - c / p.mu) <= 1e-9 * c / p.mu
        assert domain_membership(x, p).member
    if case == 4:
        assert max(x.arg for x in pts) == min(x.arg for x in pts)
    else:
        args = [x.arg for x in pts]
        radii = [x.log_abs for x in pts]
        assert all(b < a for a, b in zip(radii, radii[1:]))
        d = [b - a for a, b in zip(args, args[1:])]
        assert all(v > 0 for v in d) or all(v < 0 for v in d)


def test_gamma_curve_rejects_bad_params():
    p = random_takano_params(random.Random(1), 1)
    bad = TakanoParams(p.c1, p.c2, p.rho, p.rho0, 10.0, p.kappa)
    with pytest.raises(EmptyCurveError):
        gamma_curve(bad)
