import json

import pytest
from hypothesis import assume, given, strategies as st

from pvi_rh_lab.backlund import (INFINITY, U_MATRIX, ExtendedState, TimeConfig, qvars, s_apply,
                                 s_word)
from pvi_rh_lab.errors import ChartError, PoleError
from pvi_rh_lab.weyl import Kappa, apply_word, reflect, theta_of_kappa

from conftest import exact_states, fr


def _state(kappa, q, p, t=(0, 1, 3)):
    return ExtendedState(kappa, TimeConfig(*(fr(v) for v in t), INFINITY), q, p)


def test_s0_example():
    st0 = _state(Kappa(fr(1, 2), 0, 0, 0, 0), fr(2), fr(1))
    out = s_apply(st0, 0)
    assert (out.q, out.p) == (fr(5, 2), fr(1))
    assert tuple(out.kappa) == (fr(-1, 2), fr(1, 2), fr(1, 2), fr(1, 2), fr(1, 2))


def test_s1_example():
    st1 = _state(Kappa.from_k1234(fr(1, 3), 0, 0, 0), fr(2), fr(1))
    out = s_apply(st1, 1)
    assert (out.q, out.p) == (fr(2), fr(5, 6))


@given(exact_states())
def test_s4_at_infinity_moves_kappa_only(s):
    out = s_apply(s, 4)
    assert (out.q, out.p, out.t) == (s.q, s.p, s.t)
    assert out.kappa == reflect(s.kappa, 4)


def test_s0_pole():
    st0 = _state(Kappa(fr(1, 2), 0, 0, 0, 0), fr(2), fr(0))
    with pytest.raises(PoleError):
        s_apply(st0, 0)


def test_s0_can_leave_the_chart():
    st0 = _state(Kappa(fr(1, 2), 0, 0, 0, 0), fr(5, 2), fr(1), t=(0, 1, 3))
    with pytest.raises(ChartError):
        s_word(st0, [0])


def test_qvars_example():
    st0 = _state(Kappa(fr(1, 2), 0, 0, 0, 0), fr(2), fr(5))
    assert list(qvars(st0))[:4] == [fr(5), fr(2), fr(1), fr(-1)]
    assert qvars(st0).q4 is INFINITY


def test_u_matrix_antisymmetric():
    for i in range(5):
        for j in range(5):
            assert U_MATRIX[i][j] == -U_MATRIX[j][i]


@given(exact_states(t4_finite=True), st.integers(0, 4))
def test_unified_form(s, i):
    q = qvars(s)
    try:
        image = s_apply(s, i)
    except ChartError:
        assume(False)
    qi_img = qvars(image)
    for j in range(5):
        assert qi_img[j] - q[j] == s.kappa[i] / q[i] * U_MATRIX[i][j]


@given(exact_states(), st.integers(0, 4))
def test_generators_are_involutions(s, i):
    try:
        assert s_word(s, [i, i]) == s
    except (PoleError, ChartError):
        assume(False)


@given(exact_states())
def test_coxeter_relations_on_states(s):
    words = [[0, i] * 3 for i in range(1, 5)]
    words += [[i, j] * 2 for i in range(1, 5) for j in range(1, 5) if i != j]
    for w in words:
        try:
            assert s_word(s, w) == s
        except (PoleError, ChartError):
            pass


@given(exact_states(t4_finite=True))
def test_coxeter_relations_finite_t4(s):
    for w in [[0, 4] * 3, [1, 4] * 2, [4, 2] * 2]:
        try:
            assert s_word(s, w) == s
        except (PoleError, ChartError):
            pass


@given(exact_states(), st.lists(st.integers(0, 4), max_size=8))
def test_kappa_equivariance_and_theta(s, word):
    try:
        out = s_word(s, word)
    except (PoleError, ChartError):
        assume(False)
    assert out.kappa == apply_word(s.kappa, word)
    a, b = theta_of_kappa(s.kappa), theta_of_kappa(out.kappa)
    assert max(abs(complex(x) - complex(y)) for x, y in zip(a, b)) < 1e-9 * max(1, *(abs(complex(x)) for x in a))


@given(exact_states())
def test_state_json_roundtrip(s):
    doc = json.loads(json.dumps(s.to_json()))
    assert doc["t"][3] == "inf"
    assert ExtendedState.from_json(doc) == s


def test_word_error_names_the_letter():
    st0 = _state(Kappa(fr(1, 2), 0, 0, 0, 0), fr(2), fr(0))
    with pytest.raises(PoleError, match="letter #1"):
        s_word(st0, [2, 0])
