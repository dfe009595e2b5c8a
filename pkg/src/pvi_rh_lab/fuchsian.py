"""Second-order Fuchsian equations f'' - u1 f' + u2 f = 0 in partial-fraction form.

u1 = sum c1/(z - a), u2 = sum [c2_first/(z - a) + c2_second/(z - a)^2].
Coefficients live in either scalar field; every construction here is exact
over Gaussian rationals except where a square root is unavoidable.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Iterable, Sequence

from .backlund import INFINITY, ExtendedState, TimeConfig
from .errors import InfinityError, NotResonantError, PoleError
from .hamiltonians import H4, h3
from .scalars import exactify, format_scalar, is_exact, parse_scalar
from .weyl import Kappa

__all__ = [
    "Pole",
    "FuchsianCoeffs",
    "ExponentPair",
    "build_coeff3",
    "build_coeff4",
    "gauge_power",
    "gauge_powers",
    "normalize3",
    "normalize3_direct",
    "gauge_shift",
    "read_state",
    "perturb_residue",
    "laurent",
    "indicial",
    "has_exponents",
    "exponents",
    "apparent_obstruction",
    "expected_exponents",
    "CoalescedData",
    "coalesce",
    "lmn",
    "discriminant",
    "d_poly",
    "d_action",
    "normalize_coalesced",
    "sqrt_delta",
    "coalesced_trace",
]


@dataclass(frozen=True)
class Pole:
    loc: object
    c1: object
    c2_first: object
    c2_second: object


@dataclass(frozen=True)
class FuchsianCoeffs:
    poles: tuple

    def __post_init__(self):
        locs = [p.loc for p in self.poles]
        for n, a in enumerate(locs):
            if a is INFINITY:
                raise ValueError("poles are finite; infinity is described by the Laurent data")
            if any(a == b for b in locs[n + 1:]):
                raise ValueError(f"duplicate pole location {a}")

    @property
    def locations(self) -> list:
        return [p.loc for p in self.poles]

    def pole(self, loc) -> Pole:
        for p in self.poles:
            if p.loc == loc:
                return p
        raise KeyError(f"no pole at {loc}")

    def u1(self, z):
        return sum((p.c1 / (z - p.loc) for p in self.poles), 0 * z)

    def u2(self, z):
        out = 0 * z
        for p in self.poles:
            d = z - p.loc
            out = out + p.c2_first / d + p.c2_second / (d * d)
        return out

    def residue_sum_u2(self):
        return sum((p.c2_first for p in self.poles), 0)

    def to_approx(self) -> "FuchsianCoeffs":
        return FuchsianCoeffs(tuple(Pole(*(complex(v) for v in (p.loc, p.c1, p.c2_first, p.c2_second)))
                                    for p in self.poles))

    def __eq__(self, other):
        """Equality as rational functions: same pole set, same data."""
        if not isinstance(other, FuchsianCoeffs):
            return NotImplemented
        mine = {p.loc: p for p in self.poles if _nonzero_pole(p)}
        theirs = {p.loc: p for p in other.poles if _nonzero_pole(p)}
        if set(mine) != set(theirs):
            return False
        return all(mine[a].c1 == theirs[a].c1 and mine[a].c2_first == theirs[a].c2_first
                   and mine[a].c2_second == theirs[a].c2_second for a in mine)

    __hash__ = None

    def to_json(self) -> dict:
        poles = [{"loc": format_scalar(p.loc), "c1": format_scalar(p.c1),
                  "c2_first": format_scalar(p.c2_first), "c2_second": format_scalar(p.c2_second)}
                 for p in self.poles]
        doc = {"poles": poles}
        if self.residue_sum_u2() == 0 or not is_exact(self.residue_sum_u2()):
            alpha, beta = laurent(self, INFINITY, 0)
            doc["inf"] = {"alpha_-1": format_scalar(alpha[0]), "beta_-2": format_scalar(beta[0]),
                          "u2_residue_sum": format_scalar(self.residue_sum_u2())}
        return doc

    @classmethod
    def from_json(cls, doc: dict, field: str | None = None) -> "FuchsianCoeffs":
        return cls(tuple(Pole(*(parse_scalar(p[key], field)
                                for key in ("loc", "c1", "c2_first", "c2_second")))
                         for p in doc["poles"]))


def perturb_residue(coeffs: FuchsianCoeffs, loc, delta) -> FuchsianCoeffs:
    """Shift the u2-residue at ``loc`` by ``delta``, leaving everything else."""
    poles = tuple(Pole(p.loc, p.c1, p.c2_first + delta, p.c2_second) if p.loc == loc else p
                  for p in coeffs.poles)
    return FuchsianCoeffs(poles)


def _nonzero_pole(p: Pole) -> bool:
    return bool(p.c1 != 0 or p.c2_first != 0 or p.c2_second != 0)


@dataclass(frozen=True)
class ExponentPair:
    at: object
    e_plus: object
    e_minus: object


# --- construction ------------------------------------------------------------

def build_coeff3(state: ExtendedState) -> FuchsianCoeffs:
    """v1 = 1/(z-q) + sum (k_i - 1)/(z-t_i), v2 = p/(z-q) - sum h_i/(z-t_i)."""
    if state.t.t4 is not INFINITY:
        raise ValueError("build_coeff3 needs t4 = inf; use build_coeff4")
    k, t, q, p = state.kappa, state.t, state.q, state.p
    poles = [Pole(q, 1 + 0 * q, p, 0 * p)]
    for i in (1, 2, 3):
        poles.append(Pole(t[i], k[i] - 1, -h3(i, q, p, t, k), 0 * p))
    return FuchsianCoeffs(tuple(poles))


def build_coeff4(state: ExtendedState) -> FuchsianCoeffs:
    """u1, u2 with the four Hamiltonians H_i; needs all t_i finite."""
    if state.t.t4 is INFINITY:
        raise InfinityError("build_coeff4 needs a finite t4")
    k, t, q, p = state.kappa, state.t, state.q, state.p
    poles = [Pole(q, 1 + 0 * q, p, 0 * p)]
    for i in (1, 2, 3, 4):
        poles.append(Pole(t[i], k[i] - 1, -H4(i, q, p, t, k), 0 * p))
    return FuchsianCoeffs(tuple(poles))


# --- partial-fraction algebra --------------------------------------------------

class _PF:
    """Mutable accumulator: first- and second-order parts keyed by location."""

    def __init__(self, locs: Iterable):
        self.order = list(locs)
        self.first = {a: 0 for a in self.order}
        self.second = {a: 0 for a in self.order}

    def _touch(self, a):
        if a not in self.first:
            self.order.append(a)
            self.first[a] = 0
            self.second[a] = 0

    def add_first(self, a, c):
        self._touch(a)
        self.first[a] = self.first[a] + c

    def add_second(self, a, c):
        self._touch(a)
        self.second[a] = self.second[a] + c

    def add_product(self, b, cb, a, ca):
        """Add cb/(z-b) * ca/(z-a)."""
        if b == a:
            self.add_second(a, cb * ca)
        else:
            w = cb * ca / (b - a)
            self.add_first(b, w)
            self.add_first(a, -w)


def _match_field(coeffs: FuchsianCoeffs, *vals):
    """Constants in the field of the coefficients (complex if anything is inexact)."""
    data = [v for pl in coeffs.poles for v in (pl.loc, pl.c1, pl.c2_first, pl.c2_second)]
    if all(is_exact(v) for v in data + list(vals)):
        return tuple(exactify(v) for v in vals)
    return tuple(complex(v) for v in vals)


def gauge_power(coeffs: FuchsianCoeffs, a, s) -> FuchsianCoeffs:
    """Coefficients for F where f = (z - a)^s F.

    U1 = u1 - 2s/(z-a), U2 = u2 - s u1/(z-a) + s(s-1)/(z-a)^2.
    """
    a, s = _match_field(coeffs, a, s)
    c1 = _PF(coeffs.locations)
    c2 = _PF(coeffs.locations)
    for p in coeffs.poles:
        c1.add_first(p.loc, p.c1)
        c2.add_first(p.loc, p.c2_first)
        c2.add_second(p.loc, p.c2_second)
    c1.add_first(a, -2 * s)
    for p in coeffs.poles:
        c2.add_product(p.loc, p.c1, a, -s)
    c2.add_second(a, s * (s - 1))
    return _assemble(c1, c2)


def _assemble(c1: _PF, c2: _PF) -> FuchsianCoeffs:
    order = list(c1.order)
    for a in c2.order:
        if a not in c1.first:
            order.append(a)
    poles = []
    for a in order:
        poles.append(Pole(a, c1.first.get(a, 0), c2.first.get(a, 0), c2.second.get(a, 0)))
    return FuchsianCoeffs(tuple(_normalize_pole(p) for p in poles))


def _normalize_pole(p: Pole) -> Pole:
    vals = [p.loc, p.c1, p.c2_first, p.c2_second]
    if all(is_exact(v) for v in vals):
        return Pole(*(exactify(v) for v in vals))
    return Pole(*(complex(v) for v in vals))


def gauge_powers(coeffs: FuchsianCoeffs, powers: Sequence[tuple]) -> FuchsianCoeffs:
    """Apply f = prod (z - a)^s F one factor at a time."""
    for a, s in powers:
        coeffs = gauge_power(coeffs, a, s)
    return coeffs


def _normal_powers(state: ExtendedState) -> list[tuple]:
    k, t = state.kappa, state.t
    return [(state.q, 1)] + [(t[i], k[i] / 2) for i in (1, 2, 3)]


def normalize3(coeffs: FuchsianCoeffs, state: ExtendedState) -> FuchsianCoeffs:
    """Normal form via phi = (z-q) prod (z-t_i)^(k_i/2), as a chain of power gauges."""
    return gauge_powers(coeffs, _normal_powers(state))


def normalize3_direct(coeffs: FuchsianCoeffs, state: ExtendedState) -> FuchsianCoeffs:
    """Same normal form from V1 = v1 - 2L, V2 = v2 - L v1 + L' + L^2, L = phi'/phi."""
    powers = [_match_field(coeffs, a, s) for a, s in _normal_powers(state)]
    c1 = _PF(coeffs.locations)
    c2 = _PF(coeffs.locations)
    for p in coeffs.poles:
        c1.add_first(p.loc, p.c1)
        c2.add_first(p.loc, p.c2_first)
        c2.add_second(p.loc, p.c2_second)
    for a, s in powers:
        c1.add_first(a, -2 * s)
        c2.add_second(a, -s)  # L'
        for p in coeffs.poles:
            c2.add_product(a, -s, p.loc, p.c1)  # -L v1
        for b, r in powers:
            c2.add_product(a, s, b, r)  # L^2
    return _assemble(c1, c2)


def read_state(coeffs: FuchsianCoeffs, t: TimeConfig, kappa4_hint=None) -> ExtendedState:
    """Recover (kappa, q, p) from coefficients of standard shape.

    q is the pole not among the t's, p the u2-residue there, k_j = c1(t_j) + 1.
    With t4 = inf the value of k4 is not visible in the pole data and is
    taken from ``kappa4_hint``; k0 then follows from the Fuchs relation.
    """
    t_pts = t.finite_points()
    extra = [pl for pl in coeffs.poles if not any(pl.loc == tp for tp in t_pts)]
    extra = [pl for pl in extra if _nonzero_pole(pl)]
    if len(extra) != 1:
        raise ValueError("coefficients do not have exactly one apparent pole")
    qp = extra[0]
    if qp.c1 != 1 or qp.c2_second != 0:
        raise ValueError("apparent pole is not of standard shape")
    ks = {}
    for n, tp in enumerate(t, start=1):
        if tp is INFINITY:
            continue
        pl = coeffs.pole(tp)
        if pl.c2_second != 0:
            raise ValueError(f"second-order part at t{n}: not of standard shape")
        ks[n] = pl.c1 + 1
    if t.t4 is INFINITY:
        if kappa4_hint is None:
            raise ValueError("k4 is needed when t4 = inf")
        ks[4] = kappa4_hint
    kappa = Kappa.from_k1234(ks[1], ks[2], ks[3], ks[4])
    return ExtendedState(kappa, t, qp.loc, qp.c2_first)


def gauge_shift(coeffs: FuchsianCoeffs, i: int, state: ExtendedState):
    """Apply f = (z - t_i)^{k_i} fbar and read off the new state.

    Returns (coefficients, state). For t4 = inf only i = 1, 2, 3 are gauge
    transformations of the pole data; k4 is carried over unchanged.
    """
    if not 1 <= i <= 4:
        raise IndexError(i)
    ti = state.t[i]
    if ti is INFINITY:
        raise InfinityError(f"gauge shift at t{i} = inf")
    ki = state.kappa[i]
    bar = gauge_power(coeffs, ti, ki)
    hint = None
    if state.t.t4 is INFINITY:
        hint = state.kappa.k4
    return bar, read_state(bar, state.t, hint)


# --- local analysis ------------------------------------------------------------

def laurent(coeffs: FuchsianCoeffs, at, n_terms: int):
    """Laurent coefficients of the two ODE coefficients at ``at``.

    Returns (alpha, beta) with alpha[m] = alpha_{m-1} for u1 and
    beta[m] = beta_{m-2} for u2, m = 0..n_terms. At infinity the expansion
    is of the transformed equation in w = 1/z.
    """
    if at is INFINITY:
        if coeffs.residue_sum_u2() != 0 and is_exact(coeffs.residue_sum_u2()):
            raise ValueError("infinity is an irregular singular point (u2 ~ 1/z)")
        alpha = [-2 - sum((p.c1 for p in coeffs.poles), 0)]
        for m in range(n_terms):  # alpha_m, m = 0..n-1
            alpha.append(-sum((p.c1 * p.loc ** (m + 1) for p in coeffs.poles), 0))
        beta = []
        for m in range(-2, n_terms - 1):  # beta_m, m = -2..n-2
            beta.append(sum((p.c2_first * p.loc ** (m + 3) + (m + 3) * p.c2_second * p.loc ** (m + 2)
                             for p in coeffs.poles), 0))
        return alpha, beta
    here = coeffs.pole(at)
    alpha = [here.c1]
    beta = [here.c2_second, here.c2_first]
    others = [p for p in coeffs.poles if not p.loc == at]
    for m in range(n_terms):
        s1 = 0
        s2 = 0
        for p in others:
            d = at - p.loc
            sign = -1 if m % 2 else 1
            s1 = s1 + sign * p.c1 / d ** (m + 1)
            s2 = s2 + sign * (p.c2_first / d ** (m + 1) + (m + 1) * p.c2_second / d ** (m + 2))
        alpha.append(s1)
        beta.append(s2)
    return alpha[:n_terms + 1], beta[:n_terms + 1]


def indicial(coeffs: FuchsianCoeffs, at):
    """(b, c) of the indicial polynomial rho^2 + b rho + c."""
    alpha, beta = laurent(coeffs, at, 0)
    return -(1 + alpha[0]), beta[0]


def has_exponents(coeffs: FuchsianCoeffs, at, pair) -> bool:
    """Exact test: the two given numbers are the roots of the indicial polynomial."""
    b, c = indicial(coeffs, at)
    e1, e2 = pair
    return (e1 + e2) == -b and e1 * e2 == c


def exponents(coeffs: FuchsianCoeffs, at) -> tuple[complex, complex]:
    """Numerical roots of the indicial polynomial, larger real part first."""
    b, c = (complex(v) for v in indicial(coeffs, at))
    r = cmath.sqrt(b * b - 4 * c)
    e1, e2 = (-b + r) / 2, (-b - r) / 2
    return (e1, e2) if (e1.real, e1.imag) >= (e2.real, e2.imag) else (e2, e1)


def apparent_obstruction(coeffs: FuchsianCoeffs, at, exponents=(0, 2)):
    """Frobenius obstruction at a resonant point.

    With exponents (r, r + n), n a positive integer, the recursion from r
    reaches I(r + n) c_n = R_n with I(r + n) = 0; the point is free of
    logarithms exactly when R_n = 0. Returns R_n (c_0 = 1).
    """
    r, r2 = (exactify(e) for e in exponents)
    n_val = r2 - r
    n = _positive_int(n_val)
    if n is None:
        raise NotResonantError(f"exponent difference {n_val} is not a positive integer")
    if not has_exponents(coeffs, at, (r, r2)) and (is_exact(r) and is_exact(r2)):
        raise ValueError(f"{exponents} are not the exponents at {at}")
    alpha, beta = laurent(coeffs, at, n)
    a_m1, b_m2 = alpha[0], beta[0]

    def a(k):  # alpha_k
        return alpha[k + 1]

    def b(k):  # beta_k
        return beta[k + 2]

    c = [1 + 0 * a_m1]
    for m in range(1, n + 1):
        rhs = 0
        for k in range(m):
            rhs = rhs + (a(m - 1 - k) * (k + r) - b(m - 2 - k)) * c[k]
        if m == n:
            return rhs
        rho = r + m
        c.append(rhs / (rho * (rho - 1) - a_m1 * rho + b_m2))
    raise AssertionError("unreachable")


def _positive_int(x):
    if is_exact(x):
        x = exactify(x)
        if x.im == 0 and x.re.denominator == 1 and x.re > 0:
            return int(x.re)
        return None
    z = complex(x)
    n = round(z.real)
    if n > 0 and abs(z - n) < 1e-9:
        return n
    return None


def expected_exponents(state: ExtendedState, form: str) -> list[ExponentPair]:
    """Advertised exponents for form in {"coeff3", "coeff4", "normal3"}."""
    k, t, q = state.kappa, state.t, state.q
    half = exactify(1) / 2
    if form == "coeff3":
        out = [ExponentPair(t[i], k[i], 0) for i in (1, 2, 3)]
        out += [ExponentPair(q, 2, 0), ExponentPair(INFINITY, k.k0 + k.k4, k.k0)]
    elif form == "coeff4":
        out = [ExponentPair(t[i], k[i], 0) for i in (1, 2, 3, 4)]
        out += [ExponentPair(q, 2, 0), ExponentPair(INFINITY, k.k0 + 1, k.k0)]
    elif form == "normal3":
        out = [ExponentPair(t[i], k[i] * half, -k[i] * half) for i in (1, 2, 3)]
        out += [ExponentPair(q, 1, -1),
                ExponentPair(INFINITY, (3 + k.k4) * half, (3 - k.k4) * half)]
    else:
        raise ValueError(f"unknown form {form!r}")
    return out


# --- coalescence ---------------------------------------------------------------

@dataclass(frozen=True)
class CoalescedData:
    coeffs: FuchsianCoeffs
    L: object
    M: object
    N: object


def _ijk(i, j, k):
    if sorted((i, j, k)) != [1, 2, 3]:
        raise ValueError(f"(i, j, k) = {(i, j, k)} is not a permutation of (1, 2, 3)")


def lmn(qi, qj, p, kappa, i, j, k, tij=None):
    """L, M, N of the coalesced equation in terms of q_i, q_j (q_k = q_j)."""
    if tij is None:
        tij = qj - qi
    if tij == 0:
        raise PoleError("t_i = t_j")
    c = kappa.k0 * (kappa.k0 + kappa.k4)
    kjk = kappa[j] + kappa[k]
    ki = kappa[i]
    base = qi * qj * qj * p * p
    L = (base - ((ki - 1) * qj + kjk * qi) * qj * p + c * qi) / (tij * tij)
    M = (base - (qi * qi + (kjk - 2) * qi * qj + ki * qj * qj) * p + c * qi) / (tij * tij)
    N = (base - ((kjk - 1) * qi + ki * qj) * qj * p + c * qj) / tij
    return L, M, N


def coalesce(state: ExtendedState, i: int, j: int, k: int) -> CoalescedData:
    """Limit t_k -> t_j of the equation built from (coeff3)."""
    _ijk(i, j, k)
    if state.t.t4 is not INFINITY:
        raise ValueError("coalescence is set up for t4 = inf")
    kap, t, q, p = state.kappa, state.t, state.q, state.p
    if q == t[i] or q == t[j]:
        raise PoleError("q sits on a singular point")
    L, M, N = lmn(q - t[i], q - t[j], p, kap, i, j, k, t[i] - t[j])
    z = 0 * p
    coeffs = FuchsianCoeffs((
        Pole(q, 1 + z, p, z),
        Pole(t[i], kap[i] - 1, -L, z),
        Pole(t[j], kap[j] + kap[k] - 2, M, N),
    ))
    return CoalescedData(coeffs, L, M, N)


def d_poly(qi, qj, p, kappa, i, j, k):
    """D(q_i, q_j, p, kappa) = -t_ij Delta, a polynomial."""
    e = kappa[j] + kappa[k] - 1
    c = kappa.k0 * (kappa.k0 + kappa.k4)
    return e * e * (qi - qj) + 4 * qj * (qi * qj * p * p - (e * qi + kappa[i] * qj) * p + c)


def d_action(letter: int, qi, qj, p, kappa, i, j, k):
    """Action of s_letter on (q_i, q_j, p, kappa) with q_k = q_j and t4 = inf.

    kappa is reflected without the Fuchs check, since the identities for D
    are stated off that hyperplane.
    """
    from .weyl import reflect

    new_k = reflect(kappa, letter)
    if letter == 0:
        if p == 0:
            raise PoleError("s0 is undefined on p = 0")
        shift = kappa.k0 / p
        return qi + shift, qj + shift, p, new_k
    if letter == 4:
        return qi, qj, p, new_k
    q_letter = qi if letter == i else qj  # q_k = q_j
    return qi, qj, p - kappa[letter] / q_letter, new_k


def discriminant(state: ExtendedState, i: int, j: int, k: int):
    """(Delta, D) at the coalesced point t_k = t_j."""
    data = coalesce(state, i, j, k)
    e = state.kappa[j] + state.kappa[k] - 1
    delta = e * e - 4 * data.N
    qi = state.q - state.t[i]
    qj = state.q - state.t[j]
    return delta, d_poly(qi, qj, state.p, state.kappa, i, j, k)


def normalize_coalesced(wcoeffs: FuchsianCoeffs, state: ExtendedState, i: int, j: int) -> FuchsianCoeffs:
    """Gauge by psi = (z-q)(z-t_i)^{k_i/2}(z-t_j)^{(k_j+k_k)/2}."""
    k = ({1, 2, 3} - {i, j}).pop()
    kap, t = state.kappa, state.t
    return gauge_powers(wcoeffs, [(state.q, 1), (t[i], kap[i] / 2),
                                  (t[j], (kap[j] + kap[k]) / 2)])


def sqrt_delta(delta) -> complex:
    """Principal square root, flipped so that Im >= 0."""
    r = cmath.sqrt(complex(delta))
    if r.imag < 0 or (r.imag == 0 and r.real < 0):
        r = -r
    return r


def coalesced_trace(delta) -> complex:
    """-2 cos(pi sqrt(Delta)); independent of the root chosen."""
    return -2 * cmath.cos(cmath.pi * sqrt_delta(delta))
