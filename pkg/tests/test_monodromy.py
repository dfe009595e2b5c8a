import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pvi_rh_lab.backlund import INFINITY, TimeConfig, random_exact_state, random_numeric_state
from pvi_rh_lab.errors import GeometryError
from pvi_rh_lab.integrate import Arc, Segment, winding_number
from pvi_rh_lab.monodromy import (IDENTITY, LoopPath, Monodromy2x2, choose_base, cubic_f,
                                  cubic_residual, monodromy_matrices, normal_form, rh_compute,
                                  rh_map, standard_loops, trace_coords, transport,
                                  TraceCoords, _points, _ray_angle)
from pvi_rh_lab.weyl import ThetaVec

cnum = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def _state(seed):
    return random_numeric_state(random.Random(seed))


@pytest.mark.parametrize("seed", range(4))
def test_loop_windings(seed):
    s = _state(seed)
    loops = standard_loops(s.t, None, s.q)
    pts = [complex(s.t[m]) for m in (1, 2, 3)]
    for lp in loops:
        assert lp.closed()
        for j, z in enumerate(pts, start=1):
            w = winding_number(lp.pieces, z)
            want = -1 if lp.encircles == 4 else int(j == lp.encircles)
            assert abs(w - want) < 1e-6
        wq = winding_number(lp.pieces, complex(s.q))
        assert abs(wq - (-1 if lp.encircles == 4 else 0)) < 1e-6


def test_loops_reject_crowded_points():
    t = TimeConfig(0j, 1e-12 + 0j, 1 + 1j, INFINITY)
    with pytest.raises(GeometryError):
        standard_loops(t, base=0.5 - 0.5j)


def test_contractible_loop_is_identity():
    s = _state(1)
    c = normal_form(s)
    base = choose_base(s.t, avoid=[complex(s.q)])
    pts = [complex(s.t[m]) for m in (1, 2, 3)] + [complex(s.q)]
    r = 0.2 * min(abs(base - z) for z in pts)
    u = 1 + 0j
    out = Segment(base, base + r * u)
    circle = Arc(base, r, 0.0, 2 * math.pi)
    path = LoopPath(base, (out, circle, out.reversed()), 0)
    M = transport(c, path, 1e-9)
    assert np.max(np.abs(M.array() - np.eye(2))) < 1e-9


def test_det_precision_ladder():
    s = _state(2)
    a = monodromy_matrices(s, 1e-11)
    assert max(a.det_defects) < 1e-9
    b = monodromy_matrices(s, 2e-11, base=a.base)
    for Ma, Mb in zip(a.matrices, b.matrices):
        assert np.max(np.abs(Ma.array() - Mb.array())) < 10 * 2e-11 * max(1, np.max(np.abs(Ma.array())))


@pytest.mark.parametrize("seed", range(3))
def test_monodromy_certificates(seed):
    s = _state(seed)
    r = rh_compute(s, 1e-9)
    k = s.kappa.to_approx()
    want = [2 * cmath.cos(math.pi * k[i]) for i in (1, 2, 3)] + [-2 * cmath.cos(math.pi * k.k4)]
    assert max(abs(a - b) for a, b in zip(r.traces, want)) < 1e-6
    assert max(r.monodromy.det_defects) < 1e-9
    assert r.monodromy.product_defect < 1e-6
    assert r.monodromy.m4_crosscheck < 1e-6
    assert r.residual < 1e-6


def test_identity_matrices_give_222():
    x = trace_coords([IDENTITY] * 4)
    assert tuple(x) == (2, 2, 2)


@given(st.lists(st.tuples(cnum, cnum, cnum), min_size=4, max_size=4), st.tuples(cnum, cnum, cnum, cnum))
def test_trace_coords_conjugation_invariant(entries, g):
    mats = []
    for a, b, c in entries:
        if abs(a) < 1e-3:
            a = 1 + 0j
        mats.append(Monodromy2x2(a, b, c, (1 + b * c) / a))
    G = np.array([[g[0], g[1]], [g[2], g[3]]])
    if abs(np.linalg.det(G)) < 1e-2:
        G = G + 2 * np.eye(2)
    Gi = np.linalg.inv(G)
    conj = [Monodromy2x2.from_array(G @ M.array() @ Gi) for M in mats]
    x, y = trace_coords(mats), trace_coords(conj)
    scale = max(1.0, *(abs(v) for v in x)) * np.linalg.cond(G) ** 2
    assert max(abs(a - b) for a, b in zip(x, y)) < 1e-12 * scale


def test_cubic_hand_value():
    th = ThetaVec(0, 0, 0, -4)
    assert cubic_f((2, 2, 2), th) == 16
    assert cubic_residual(TraceCoords(2, 2, 2, th)) == 16


def _cubic_horner(x, th):
    # independent arrangement of the same polynomial
    x1, x2, x3 = x
    return x1 * (x2 * x3 + x1 - th[0]) + x2 * (x2 - th[1]) + x3 * (x3 - th[2]) + th[3]


@given(st.tuples(cnum, cnum, cnum), st.tuples(cnum, cnum, cnum, cnum))
def test_cubic_dual_implementation(x, th):
    a, b = cubic_f(x, th), _cubic_horner(x, th)
    assert abs(a - b) < 1e-12 * max(1.0, abs(a), 100)


def test_precision_ladder_x():
    s = _state(3)
    r = rh_compute(s, 1e-9)
    x2 = rh_map(s, 1e-10, base=r.monodromy.base)
    assert max(abs(a - b) for a, b in zip(r.coords, x2)) < 1e-7


def test_base_point_independence():
    s = _state(4)
    q = complex(s.q)
    b1 = choose_base(s.t, avoid=[q])
    x1 = rh_map(s, 1e-9, base=b1)
    pts = [complex(s.t[m]) for m in (1, 2, 3)]
    center = sum(pts) / 3
    spread = max(abs(z - center) for z in pts)
    found = 0
    for ang in np.linspace(0, 2 * math.pi, 24, endpoint=False):
        b2 = center + 1.5 * spread * cmath.exp(1j * ang)
        if abs(b2 - b1) < 0.1 * spread:
            continue
        try:
            x2 = rh_map(s, 1e-9, base=b2)
        except GeometryError:
            continue
        found += 1
        assert max(abs(a - b) for a, b in zip(x1, x2)) < 1e-7
        if found == 2:
            break
    assert found >= 1


def test_exact_state_is_accepted():
    s = random_exact_state(random.Random(5), bound=9)
    doc = rh_compute(s, 1e-8).to_json()
    assert set(doc) >= {"a", "x", "theta", "residual", "certificates"}
    assert set(doc["certificates"]) >= {"det_defects", "product_defect"}


def test_theta_from_monodromy_matches_kappa():
    from pvi_rh_lab.weyl import theta_of_kappa

    s = _state(6)
    x = rh_map(s, 1e-9)
    want = theta_of_kappa(s.kappa)
    assert max(abs(complex(a) - complex(b)) for a, b in zip(x.theta, want)) < 1e-6


def test_base_serves_a_whole_path():
    # t3 slides onto t2 from below: one base must keep the spoke order all the way
    t = TimeConfig(0j, 1 + 0j, -0.43 - 0.8j, INFINITY)
    end = 1 + 1e-3 * (-1.43 - 0.8j)
    path = [t.with_t(3, t[3] + (end - t[3]) * n / 200) for n in range(201)]
    b = choose_base(t, also=[path[-1]], path=path)
    for u in path:
        assert _ray_angle(b, _points(u)) is not None
