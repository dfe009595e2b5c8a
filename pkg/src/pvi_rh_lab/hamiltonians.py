"""The three Hamiltonian forms of PVI, their vector fields and flows.

* h_single(q, p, x): one time variable, t = (0, 1, x, inf).
* H4(i, ...): four time variables t1..t4, all finite.
* h3(i, ...): three time variables, t4 = inf.

Every Hamiltonian has the shape (A p^2 - B p + C) / T with A, B, C
polynomial in q and T a product of time differences, so values and
partial derivatives are written out in closed form and work in both the
exact and the approximate field.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .backlund import INFINITY, ExtendedState, TimeConfig, s_apply
from .errors import ChartError, InfinityError, PoleError, SingularityError
from .integrate import integrate_path, polyline

__all__ = [
    "HamiltonianValue",
    "HDerivs",
    "h_single",
    "h_single_derivs",
    "H4",
    "h3",
    "hamiltonian",
    "hamiltonian_grad",
    "limit_defect",
    "lemma_indep_defect",
    "lemma_indep_table",
    "Trajectory",
    "flow",
    "pvi_rhs",
    "pvi_residual",
]


@dataclass(frozen=True)
class HamiltonianValue:
    value: complex
    which: str  # "h-single", "H4(i)" or "h3(i)"


@dataclass(frozen=True)
class HDerivs:
    value: complex
    dq: complex
    dp: complex
    dpp: complex
    dpq: complex
    dpx: complex


# --- single time variable --------------------------------------------------

def h_single_derivs(q, p, x, kappa) -> HDerivs:
    """h and the partials needed for the PVI residual."""
    k0, k1, k2, k3, k4 = kappa
    den = x * (x - 1)
    if den == 0:
        raise PoleError(f"h is singular at x = {x}")
    F = q * (q - 1) * (q - x)
    F_q = (q - 1) * (q - x) + q * (q - x) + q * (q - 1)
    F_x = -q * (q - 1)
    B = (k3 - 1) * q * (q - 1) + k1 * (q - 1) * (q - x) + k2 * q * (q - x)
    B_q = (k3 - 1) * (2 * q - 1) + k1 * (2 * q - 1 - x) + k2 * (2 * q - x)
    B_x = -k1 * (q - 1) - k2 * q
    c = k0 * (k0 + k4)
    num_p = 2 * F * p - B
    return HDerivs(
        value=(F * p * p - B * p + c * (q - x)) / den,
        dq=(F_q * p * p - B_q * p + c) / den,
        dp=num_p / den,
        dpp=2 * F / den,
        dpq=(2 * F_q * p - B_q) / den,
        dpx=(2 * F_x * p - B_x) / den - num_p * (2 * x - 1) / (den * den),
    )


def h_single(q, p, x, kappa):
    return h_single_derivs(q, p, x, kappa).value


# --- several time variables ------------------------------------------------

def _others(i: int, n: int) -> list[int]:
    if not 1 <= i <= n:
        raise IndexError(f"Hamiltonian index {i} out of range 1..{n}")
    return [m for m in range(1, n + 1) if m != i]


def _prod(vals):
    out = 1
    for v in vals:
        out = out * v
    return out


def _sym(cs, qs):
    """B = sum_m c_m prod_{n != m} q_n and dB/dq (every q_n has dq_n/dq = 1)."""
    n = len(qs)
    B = 0
    dB = 0
    for m in range(n):
        rest = [qs[r] for r in range(n) if r != m]
        B = B + cs[m] * _prod(rest)
        for a in range(len(rest)):
            dB = dB + cs[m] * _prod(rest[:a] + rest[a + 1:])
    return B, dB


def _poly_parts(i, q, t, kappa, four: bool):
    """(A, dA, B, dB, C, dC, T) for H4(i) (four=True) or h3(i)."""
    n = 4 if four else 3
    idx = [i] + _others(i, n)
    qs = [q - t[m] for m in idx]
    tt = [t[i] - t[m] for m in idx[1:]]
    k0 = kappa.k0
    A = _prod(qs)
    dA, _ = _sym([1] * n, qs)
    cs = [kappa[idx[0]] - 1] + [kappa[m] for m in idx[1:]]
    B, dB = _sym(cs, qs)
    if four:
        S = (kappa[i] - 1) * qs[0]
        dS = kappa[i] - 1
        for pos, m in enumerate(idx[1:], start=1):
            S = S + (kappa[m] + k0) * qs[pos]
            dS = dS + (kappa[m] + k0)
        C = k0 * qs[0] * S
        dC = k0 * (S + qs[0] * dS)
    else:
        c = k0 * (k0 + kappa.k4)
        C = c * qs[0]
        dC = c
    T = _prod(tt)
    if T == 0:
        raise PoleError("time variables coincide")
    return A, dA, B, dB, C, dC, T


def _check_finite(t: TimeConfig, four: bool):
    if four and t.t4 is INFINITY:
        raise InfinityError("H4 needs a finite t4")


def H4(i: int, q, p, t: TimeConfig, kappa):
    _check_finite(t, True)
    A, _, B, _, C, _, T = _poly_parts(i, q, t, kappa, True)
    return (A * p * p - B * p + C) / T


def h3(i: int, q, p, t: TimeConfig, kappa):
    A, _, B, _, C, _, T = _poly_parts(i, q, t, kappa, False)
    return (A * p * p - B * p + C) / T


def hamiltonian(i: int, q, p, t: TimeConfig, kappa):
    """H4(i) for finite t4; h3(i) when t4 = inf (and 0 for i = 4 there)."""
    if t.t4 is INFINITY:
        return 0 * p if i == 4 else h3(i, q, p, t, kappa)
    return H4(i, q, p, t, kappa)


def hamiltonian_grad(i: int, q, p, t: TimeConfig, kappa):
    """(dH/dq, dH/dp) of the Hamiltonian selected as in :func:`hamiltonian`."""
    if t.t4 is INFINITY and i == 4:
        return 0 * p, 0 * p
    A, dA, B, dB, C, dC, T = _poly_parts(i, q, t, kappa, t.t4 is not INFINITY)
    return (dA * p * p - dB * p + dC) / T, (2 * A * p - B) / T


def limit_defect(i: int, q, p, t123, t4, kappa):
    """H4(i) - h3(i) for i <= 3, H4(4) for i = 4, at the given finite t4."""
    t1, t2, t3 = list(t123)[:3]
    t = TimeConfig(t1, t2, t3, t4)
    if i == 4:
        return H4(4, q, p, t, kappa)
    return H4(i, q, p, t, kappa) - h3(i, q, p, TimeConfig(t1, t2, t3), kappa)


def lemma_indep_defect(i: int, j: int, state: ExtendedState, *, correction: bool = True):
    """s_i(H_j) - H_j + delta_ij k_i / q_i at the state's (q, p).

    s_i(H_j) is H_j evaluated at the transformed point and parameters. With
    ``correction=False`` the delta term is dropped (negative control).
    """
    image = s_apply(state, i)
    value = (hamiltonian(j, image.q, image.p, image.t, image.kappa)
             - hamiltonian(j, state.q, state.p, state.t, state.kappa))
    if correction and i == j:
        qi = state.q - state.t[i]
        value = value + state.kappa[i] / qi
    return value


def lemma_indep_table(state: ExtendedState, *, correction: bool = True) -> dict:
    """lemma_indep_defect for every (i, j), i in 0..4, j in 1..4, sharing the images.

    Pairs whose image hits a pole or leaves the chart are omitted.
    """
    base = {j: hamiltonian(j, state.q, state.p, state.t, state.kappa) for j in range(1, 5)}
    out = {}
    for i in range(5):
        try:
            image = s_apply(state, i)
        except (PoleError, ChartError):
            continue
        for j in range(1, 5):
            value = hamiltonian(j, image.q, image.p, image.t, image.kappa) - base[j]
            if correction and i == j:
                value = value + state.kappa[i] / (state.q - state.t[i])
            out[i, j] = value
    return out


# --- flows -------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Samples (time, q, p) along a flow in one time variable."""

    samples: tuple
    t: TimeConfig  # time configuration at the start
    moving: int
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.samples)

    @property
    def end(self):
        return self.samples[-1]

    def state_at(self, n: int, kappa) -> ExtendedState:
        tm, q, p = self.samples[n]
        return ExtendedState(kappa, self.t.with_t(self.moving, tm), q, p)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re_time", "im_time", "re_q", "im_q", "re_p", "im_p"])
            for tm, q, p in self.samples:
                w.writerow([repr(v) for v in (tm.real, tm.imag, q.real, q.imag, p.real, p.imag)])

    def meta_json(self) -> dict:
        return {
            "moving": self.moving,
            "t": self.t.to_approx().to_json(),
            "n_samples": len(self.samples),
            **self.meta,
        }

    def write(self, csv_path, meta_path=None) -> None:
        self.to_csv(csv_path)
        if meta_path is not None:
            with open(meta_path, "w") as fh:
                json.dump(self.meta_json(), fh, indent=2, sort_keys=True)

    @classmethod
    def read_csv(cls, path, t: TimeConfig, moving: int) -> "Trajectory":
        rows = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                v = {k: float(x) for k, x in row.items()}
                rows.append((complex(v["re_time"], v["im_time"]),
                             complex(v["re_q"], v["im_q"]),
                             complex(v["re_p"], v["im_p"])))
        return cls(tuple(rows), t, moving)


GUARD_FRACTION = 1e-4
BLOWUP = 1e8
RTOL_FACTOR = 0.1  # integrate a bit tighter than the requested tolerance


def _min_distance(points) -> float:
    pts = list(points)
    return min(abs(a - b) for n, a in enumerate(pts) for b in pts[n + 1:])


def flow(state: ExtendedState, time_path: Sequence, tol: float = 1e-9, *,
         moving: int = 3) -> Trajectory:
    """Integrate dq/dt_m = dH_m/dp, dp/dt_m = -dH_m/dq along a polyline in t_m.

    ``time_path`` lists waypoints for t_m; the first must be the state's
    current t_m. All arithmetic is in complex floating point.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    st = state.to_approx()
    t0 = st.t
    if t0[moving] is INFINITY:
        raise InfinityError(f"cannot flow in t{moving} = inf")
    waypoints = [complex(z) for z in time_path]
    if not waypoints:
        waypoints = [t0[moving]]
    if abs(waypoints[0] - t0[moving]) > 1e-12 * (1 + abs(t0[moving])):
        raise ValueError("time path must start at the current value of the moving time")
    others = [t0[m] for m in range(1, 5) if m != moving and t0[m] is not INFINITY]
    guard_r = GUARD_FRACTION * _min_distance(t0.finite_points())
    scale = max(1.0, abs(st.q), abs(st.p), *(abs(z) for z in t0.finite_points()))
    kappa = st.kappa

    def rhs(z, y):
        t = t0.with_t(moving, z)
        Hq, Hp = hamiltonian_grad(moving, y[0], y[1], t, kappa)
        return np.array([Hp, -Hq])

    def guard(z, y, s):
        for tj in others:
            if abs(z - tj) < guard_r:
                raise SingularityError(f"t{moving} reached the guard disk of a fixed point", s)
            if abs(y[0] - tj) < guard_r:
                raise SingularityError("q reached the guard disk of a singular point", s)
        if abs(z - y[0]) < guard_r:
            raise SingularityError("q reached the guard disk of the moving point", s)
        if abs(y[0]) > BLOWUP * scale or abs(y[1]) > BLOWUP * scale:
            raise SingularityError("solution blows up (movable pole)", s)

    pieces = polyline(waypoints)
    res = integrate_path(rhs, [st.q, st.p], pieces, rtol=RTOL_FACTOR * tol,
                         atol=RTOL_FACTOR * tol, guard=guard, record=True)
    if res.samples:
        samples = tuple((z, complex(y[0]), complex(y[1])) for z, y in res.samples)
    else:
        samples = ((waypoints[0], complex(st.q), complex(st.p)),)
    meta = {"tol": tol, "n_steps": res.n_steps, "n_fev": res.n_fev,
            "kappa": kappa.to_json(), "integrator": "DOP853"}
    return Trajectory(samples, t0, moving, meta)


# --- PVI ---------------------------------------------------------------------

def pvi_rhs(q, qx, x, kappa):
    """Right-hand side of PVI for q_xx."""
    _, k1, k2, k3, k4 = kappa
    first = 0.5 * (1 / q + 1 / (q - 1) + 1 / (q - x)) * qx * qx
    second = -(1 / x + 1 / (x - 1) + 1 / (q - x)) * qx
    third = q * (q - 1) * (q - x) / (2 * x * x * (x - 1) ** 2) * (
        k4 * k4 - k1 * k1 * x / (q * q) + k2 * k2 * (x - 1) / (q - 1) ** 2
        + (1 - k3 * k3) * x * (x - 1) / (q - x) ** 2)
    return first + second + third


def pvi_residual(traj: Trajectory, kappa) -> float:
    """max |q_xx - PVI(q, q_x, x)| over the samples.

    q_x = dh/dp and q_xx = h_px + h_pq q_x + h_pp p_x come from the
    Hamiltonian vector field, so the residual measures consistency of the
    Hamiltonian with PVI at each sampled point.
    """
    t = traj.t
    if traj.moving != 3 or t.t4 is not INFINITY or complex(t.t1) != 0 or complex(t.t2) != 1:
        raise ValueError("pvi_residual needs a flow in x = t3 with t = (0, 1, x, inf)")
    k = [complex(v) for v in kappa]
    worst = 0.0
    for x, q, p in traj.samples:
        d = h_single_derivs(q, p, x, k)
        qx = d.dp
        px = -d.dq
        qxx = d.dpx + d.dpq * qx + d.dpp * px
        worst = max(worst, abs(qxx - pvi_rhs(q, qx, x, k)))
    return worst
