from hypothesis import given, strategies as st

from pvi_rh_lab.backlund import ExtendedState, s_apply
from pvi_rh_lab.heuristics import E_coefficients_claimed, heuristic_E, heuristic_solve
from pvi_rh_lab.weyl import Kappa

from conftest import exact_states, gaussians

PERMS = [(1, 2, 3), (2, 3, 1), (3, 1, 2)]


def _free_state(kappa, t, q, p):
    # kappa was built unchecked, so the state is off the Fuchs locus
    return ExtendedState(kappa, t, q, p)


@given(exact_states(fuchs=False), gaussians, gaussians, st.sampled_from(PERMS))
def test_E12_closed_form(raw, Q, P, ijk):
    s = _free_state(*raw)
    E = heuristic_E(Q, P, s, *ijk)
    assert E[(1, 2)] == E_coefficients_claimed(Q, P, s, *ijk)[(1, 2)]


@given(exact_states(), gaussians, gaussians, st.sampled_from(PERMS))
def test_E11_closed_form_on_fuchs_locus(s, Q, P, ijk):
    E = heuristic_E(Q, P, s, *ijk)
    assert E[(1, 1)] == E_coefficients_claimed(Q, P, s, *ijk)[(1, 1)]


@given(exact_states(), st.sampled_from(PERMS))
def test_first_candidate_kills_E_and_is_s0(s, ijk):
    cand = heuristic_solve()
    Q, P = cand.sol1(s)
    assert all(v == 0 for v in heuristic_E(Q, P, s, *ijk).values())
    img = s_apply(s, 0)
    assert (Q, P) == (img.q, img.p)


@given(exact_states(), st.sampled_from(PERMS))
def test_second_candidate_E02(s, ijk):
    i, j, k = ijk
    cand = heuristic_solve()
    Q, P = cand.sol2(s, i)
    E = heuristic_E(Q, P, s, *ijk)
    assert E[(0, 2)] == 4 * cand.e02_condition(s.kappa, i, j, k) * s.p


@given(exact_states(), st.sampled_from(PERMS), st.booleans())
def test_second_candidate_residual_conditions(s, ijk, ee_holds):
    # put kappa on the hyperplane E02 = 0 and, optionally, on k_i = 0
    i, j, k = ijk
    kap = list(s.kappa)
    if ee_holds:
        kap[i] = 0 * kap[i]
    kap[j] = 2 * kap[i] - kap[k] + 1
    kappa = Kappa.from_k1234(*kap[1:])
    st0 = ExtendedState(kappa, s.t, s.q, s.p)
    cand = heuristic_solve()
    assert cand.e02_condition(kappa, i, j, k) == 0
    Q, P = cand.sol2(st0, i)
    E = heuristic_E(Q, P, st0, *ijk)
    ee = cand.ee_condition(kappa, i)
    assert E[(0, 0)] == 2 * ee / st0.p
    assert all(v == 0 for key, v in E.items() if key != (0, 0))
    assert (E[(0, 0)] == 0) == (ee == 0)
