import cmath
import json
import math
import random

import pytest
from hypothesis import assume, given, strategies as st

from pvi_rh_lab.backlund import INFINITY, ExtendedState, TimeConfig, s_apply
from pvi_rh_lab.errors import ChartError, NotResonantError, PoleError
from pvi_rh_lab.fuchsian import (FuchsianCoeffs, apparent_obstruction, build_coeff3, build_coeff4,
                                 coalesce, coalesced_trace, d_action, d_poly, discriminant,
                                 expected_exponents, gauge_power, gauge_shift, has_exponents,
                                 indicial, lmn, normalize3, normalize3_direct, normalize_coalesced,
                                 perturb_residue, sqrt_delta)
from pvi_rh_lab.hamiltonians import h3
from pvi_rh_lab.weyl import Kappa

from conftest import exact_states, fr, kappas, gaussians

PERMS = [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)]


@given(exact_states())
def test_coeff3_residues(s):
    c = build_coeff3(s)
    assert c.pole(s.q).c1 == 1
    for i in (1, 2, 3):
        assert c.pole(s.t[i]).c1 == s.kappa[i] - 1
    assert c.residue_sum_u2() == 0


@pytest.mark.parametrize("form", ["coeff3", "coeff4", "normal3"])
@given(data=st.data())
def test_exponents_as_advertised(form, data):
    s = data.draw(exact_states(t4_finite=form == "coeff4"))
    c = build_coeff4(s) if form == "coeff4" else build_coeff3(s)
    if form == "normal3":
        c = normalize3(c, s)
    for e in expected_exponents(s, form):
        assert has_exponents(c, e.at, (e.e_plus, e.e_minus)), e


@given(exact_states())
def test_normal_form_two_routes(s):
    c = build_coeff3(s)
    assert normalize3(c, s) == normalize3_direct(c, s)


@given(exact_states())
def test_apparent_at_q_coeff3(s):
    c = build_coeff3(s)
    assert apparent_obstruction(c, s.q, (0, 2)) == 0
    assert apparent_obstruction(perturb_residue(c, s.q, 1), s.q, (0, 2)) != 0


@given(exact_states(t4_finite=True))
def test_apparent_at_q_and_removable_infinity_coeff4(s):
    c = build_coeff4(s)
    assert apparent_obstruction(c, s.q, (0, 2)) == 0
    assert apparent_obstruction(perturb_residue(c, s.q, 1), s.q, (0, 2)) != 0
    k0 = s.kappa.k0
    assert apparent_obstruction(c, INFINITY, (k0, k0 + 1)) == 0


def test_not_resonant():
    s = ExtendedState(Kappa.from_k1234(fr(1, 3), fr(1, 5), fr(1, 7), 0),
                      TimeConfig(fr(0), fr(1), fr(3), INFINITY), fr(2), fr(1))
    c = build_coeff3(s)
    with pytest.raises(NotResonantError):
        apparent_obstruction(c, s.t.t1, (0, fr(1, 3)))


@given(exact_states(), st.integers(1, 3))
def test_gauge_shift_is_backlund(s, i):
    _, read = gauge_shift(build_coeff3(s), i, s)
    assert read == s_apply(s, i)


@given(exact_states(t4_finite=True), st.integers(1, 4))
def test_gauge_shift_is_backlund_finite_t4(s, i):
    _, read = gauge_shift(build_coeff4(s), i, s)
    assert read == s_apply(s, i)


@given(exact_states(), st.integers(1, 3))
def test_gauge_shift_trivial_and_invertible(s, i):
    c = build_coeff3(s)
    ti, ki = s.t[i], s.kappa[i]
    assert gauge_power(gauge_power(c, ti, ki), ti, -ki) == c
    assert gauge_power(c, ti, 0 * ki) == c


@given(exact_states(), st.sampled_from(PERMS))
def test_lemma2_M_is_L_minus_p(s, ijk):
    i, j, k = ijk
    if s.q in (s.t[i], s.t[j]):
        return
    data = coalesce(s, i, j, k)
    assert data.M - (data.L - s.p) == 0


def _fit_slope(eps, vals):
    xs = [math.log(e) for e in eps]
    ys = [math.log(v) for v in vals]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    return sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / sum((a - mx) ** 2 for a in xs)


@pytest.mark.parametrize("seed", range(5))
def test_lemma2_limits(seed):
    from pvi_rh_lab.backlund import random_numeric_state

    s = random_numeric_state(random.Random(seed))
    i, j, k = 1, 2, 3
    tj = complex(s.t[j])
    qi, qj = s.q - complex(s.t[i]), s.q - tj
    L, _, N = lmn(qi, qj, s.p, s.kappa, i, j, k, complex(s.t[i]) - tj)
    eps = (1e-3, 1e-4, 1e-5)
    dl, dn = [], []
    for e in eps:
        t = s.t.with_t(k, tj + e)
        dl.append(abs(h3(i, s.q, s.p, t, s.kappa) - L))
        dn.append(abs(-(tj - (tj + e)) * h3(j, s.q, s.p, t, s.kappa) - N))
    assert _fit_slope(eps, dl) >= 0.9
    assert _fit_slope(eps, dn) >= 0.9


def test_D_worked_example():
    kap = Kappa(fr(1, 2), 0, 0, 0, 0)
    assert d_poly(fr(1), fr(2), fr(1), kap, 1, 2, 3) == 25
    qi, qj, p, k2 = d_action(0, fr(1), fr(2), fr(1), kap, 1, 2, 3)
    assert (qi, qj, p) == (fr(3, 2), fr(5, 2), fr(1))
    assert tuple(k2) == (fr(-1, 2), fr(1, 2), fr(1, 2), fr(1, 2), fr(1, 2))
    assert d_poly(qi, qj, p, k2, 1, 2, 3) == 25


@given(exact_states(), st.sampled_from(PERMS))
def test_D_is_minus_tij_delta(s, ijk):
    i, j, k = ijk
    if s.q in (s.t[i], s.t[j]):
        return
    delta, D = discriminant(s, i, j, k)
    assert D == -(s.t[i] - s.t[j]) * delta


@given(exact_states(), st.sampled_from(PERMS), st.integers(0, 4))
def test_key_lemma_on_locus(s, ijk, letter):
    i, j, k = ijk
    qi, qj = s.q - s.t[i], s.q - s.t[j]
    D = d_poly(qi, qj, s.p, s.kappa, i, j, k)
    img = d_action(letter, qi, qj, s.p, s.kappa, i, j, k)
    assert d_poly(*img, i, j, k) == D


@given(gaussians, gaussians, gaussians.filter(lambda z: z != 0), kappas(fuchs=False),
       st.sampled_from(PERMS))
def test_difference_formulas_off_locus(qi, qj, p, kap, ijk):
    i, j, k = ijk
    assume(qi != 0 and qj != 0)
    eta = kap.eta
    D = d_poly(qi, qj, p, kap, i, j, k)

    def diff(letter):
        return d_poly(*d_action(letter, qi, qj, p, kap, i, j, k), i, j, k) - D

    # the s0 formula carries a 1/p
    assert diff(0) == -4 * kap.k0 * (2 * qj * p + kap.k0) * eta / p
    assert diff(i) == 4 * kap[i] * qj * eta
    assert diff(j) == 4 * kap[j] * qj * eta
    assert diff(k) == 4 * kap[k] * qj * eta
    assert diff(4) == 0


def test_printed_s0_formula_lacks_a_factor():
    kap = Kappa.unchecked(fr(1, 2), fr(1, 3), 0, 0, 0)
    qi, qj, p = fr(1), fr(2), fr(3)
    D = d_poly(qi, qj, p, kap, 1, 2, 3)
    diff = d_poly(*d_action(0, qi, qj, p, kap, 1, 2, 3), 1, 2, 3) - D
    printed = -4 * kap.k0 * (2 * qj * p + kap.k0) * kap.eta
    assert diff != printed and diff == printed / p


@given(exact_states())
def test_discriminant_invariant_under_s4(s):
    if s.q in (s.t[1], s.t[2]):
        return
    assert discriminant(s_apply(s, 4), 1, 2, 3) == discriminant(s, 1, 2, 3)


@given(exact_states(), st.sampled_from(PERMS))
def test_coalesced_normal_form_exponents(s, ijk):
    i, j, k = ijk
    if s.q in (s.t[i], s.t[j]):
        return
    data = coalesce(s, i, j, k)
    norm = normalize_coalesced(data.coeffs, s, i, j)
    delta, _ = discriminant(s, i, j, k)
    b, c = indicial(norm, s.t[j])
    # roots (-1 +- sqrt(Delta))/2: sum -1, product (1 - Delta)/4
    assert -b == -1 and c == (1 - delta) / 4
    assert has_exponents(norm, s.q, (1, -1))
    half = s.kappa[i] / 2
    assert has_exponents(norm, s.t[i], (half, -half))


@given(st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False))
def test_coalesced_trace_branch(delta):
    r = sqrt_delta(delta)
    assert r.imag >= 0
    assert abs(coalesced_trace(delta) - (-2 * cmath.cos(math.pi * -r))) <= 1e-9 * max(1, abs(coalesced_trace(delta)))


@given(exact_states())
def test_coeffs_json_roundtrip(s):
    c = build_coeff3(s)
    doc = json.loads(json.dumps(c.to_json()))
    assert FuchsianCoeffs.from_json(doc) == c
