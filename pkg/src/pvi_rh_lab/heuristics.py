"""Rediscovering s0 from the invariance of D.

E(t_i, t_j) = D(Q, P, t, sigma_0(kappa)) - D(q, p, t, kappa) is a polynomial
of degree <= 1 in t_i and <= 2 in t_j. Its coefficients E_mn are recovered
exactly by interpolation on small integer grids, with one extra node per
variable as a degree certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .backlund import ExtendedState
from .fuchsian import d_poly
from .scalars import exactify
from .weyl import reflect

__all__ = ["heuristic_E", "heuristic_solve", "HeuristicCandidates", "E_coefficients_claimed"]

DEG_I = 1
DEG_J = 2


def _interp_coeffs(values):
    """Monomial coefficients of the polynomial through (0, v0), (1, v1), ...

    Newton forward differences on integer nodes.
    """
    n = len(values)
    diffs = [list(values)]
    for _ in range(1, n):
        prev = diffs[-1]
        diffs.append([prev[m + 1] - prev[m] for m in range(len(prev) - 1)])
    # Newton form sum_d Delta^d f(0) * C(t, d); expand the falling factorials
    coeffs = [0] * n
    fact = 1
    for d in range(n):
        if d:
            fact *= d
        poly = [1]  # t (t-1) ... (t-d+1)
        for r in range(d):
            nxt = [0] * (len(poly) + 1)
            for e, c in enumerate(poly):
                nxt[e + 1] += c
                nxt[e] -= r * c
            poly = nxt
        lead = diffs[d][0] / exactify(fact)
        for e, c in enumerate(poly):
            coeffs[e] = coeffs[e] + lead * c
    return coeffs


def heuristic_E(Q, P, state: ExtendedState, i: int, j: int, k: int) -> dict:
    """Coefficients {(m, n): E_mn} of t_i^m t_j^n in E.

    kappa is used as given (the Fuchs relation is not assumed). Raises
    ArithmeticError if the degree certificate fails.
    """
    q, p, kappa = state.q, state.p, state.kappa
    Q, P = exactify(Q), exactify(P)
    k_bar = reflect(kappa, 0)

    def E(ti, tj):
        return (d_poly(Q - ti, Q - tj, P, k_bar, i, j, k)
                - d_poly(q - ti, q - tj, p, kappa, i, j, k))

    # rows: fixed t_i, interpolate in t_j (one spare node)
    rows = []
    for ti in range(DEG_I + 2):
        vals = [E(exactify(ti), exactify(tj)) for tj in range(DEG_J + 2)]
        cj = _interp_coeffs(vals)
        if cj[DEG_J + 1] != 0:
            raise ArithmeticError("E has degree > 2 in t_j")
        rows.append(cj[:DEG_J + 1])
    out = {}
    for n in range(DEG_J + 1):
        ci = _interp_coeffs([rows[ti][n] for ti in range(DEG_I + 2)])
        if ci[DEG_I + 1] != 0:
            raise ArithmeticError("E has degree > 1 in t_i")
        for m in range(DEG_I + 1):
            out[(m, n)] = ci[m]
    return out


def E_coefficients_claimed(Q, P, state: ExtendedState, i: int, j: int, k: int) -> dict:
    """Closed forms of E_12 and E_11 (the latter uses the Fuchs relation)."""
    q, p, kap = state.q, state.p, state.kappa
    return {
        (1, 2): 4 * (p - P) * (p + P),
        (1, 1): 4 * p * (kap[j] + kap[k] - 1 - 2 * q * p) + 4 * P * (kap[i] + kap[4] + 2 * Q * P),
    }


@dataclass(frozen=True)
class HeuristicCandidates:
    sol1: Callable
    sol2: Callable
    e02_condition: Callable
    ee_condition: Callable


def _sol1(state: ExtendedState, i: int = None):
    return state.q + state.kappa.k0 / state.p, state.p


def _sol2(state: ExtendedState, i: int):
    k = state.kappa
    return state.q + (k.k0 + k[i] + k.k4) / state.p, -state.p


def _e02(kappa, i, j, k):
    """2 k_i - k_j - k_k + 1."""
    return 2 * kappa[i] - kappa[j] - kappa[k] + 1


def _ee(kappa, i):
    """k_i (k_4 - k_i)(k_4 + k_i)."""
    return kappa[i] * (kappa.k4 - kappa[i]) * (kappa.k4 + kappa[i])


def heuristic_solve() -> HeuristicCandidates:
    """The two solutions of E_12 = E_11 = 0 and the residual conditions for the second.

    sol1(state) -> (Q, P) = (q + k0/p, p); sol2(state, i) -> (q + (k0+k_i+k4)/p, -p).
    The conditions return the quantity that must vanish.
    """
    return HeuristicCandidates(_sol1, _sol2, _e02, _ee)
