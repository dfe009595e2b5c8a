"""Backlund transformations s0..s4 on the extended phase space (kappa, t, q, p)."""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, replace
from typing import Iterable

from .errors import ChartError, PoleError, WordError
from .scalars import GaussianRational, Scalar, exactify, format_scalar, is_exact, parse_scalar
from .scalars import random_gaussian
from .weyl import GroupWord, Kappa, random_exact_kappa, reflect

__all__ = [
    "INFINITY",
    "TimeConfig",
    "ExtendedState",
    "QVars",
    "U_MATRIX",
    "s_apply",
    "s_word",
    "qvars",
    "random_exact_state",
    "random_numeric_state",
]


class _Infinity:
    """The point t4 = infinity. A tagged value, not a large float."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

# u_ij = {q_i, q_j}
U_MATRIX: tuple[tuple[int, ...], ...] = (
    (0, 1, 1, 1, 1),
    (-1, 0, 0, 0, 0),
    (-1, 0, 0, 0, 0),
    (-1, 0, 0, 0, 0),
    (-1, 0, 0, 0, 0),
)


def _scalar_json(v):
    return "inf" if v is INFINITY else format_scalar(v)


def _scalar_from_json(s, field):
    if isinstance(s, str) and s.strip().lower() in ("inf", "infinity"):
        return INFINITY
    return parse_scalar(s, field)


@dataclass(frozen=True)
class TimeConfig:
    t1: Scalar
    t2: Scalar
    t3: Scalar
    t4: Scalar | _Infinity = INFINITY

    def __post_init__(self):
        for name in ("t1", "t2", "t3", "t4"):
            object.__setattr__(self, name, exactify(getattr(self, name)))
        finite = self.finite_points()
        for a in range(len(finite)):
            for b in range(a + 1, len(finite)):
                if finite[a] == finite[b]:
                    raise ValueError(f"time variables must be distinct: {self}")

    def __getitem__(self, i: int):
        """1-based access t[1]..t[4]."""
        if not 1 <= i <= 4:
            raise IndexError(i)
        return (self.t1, self.t2, self.t3, self.t4)[i - 1]

    def __iter__(self):
        return iter((self.t1, self.t2, self.t3, self.t4))

    @property
    def t4_infinite(self) -> bool:
        return self.t4 is INFINITY

    def finite_points(self) -> list:
        return [t for t in self if t is not INFINITY]

    def with_t(self, i: int, value) -> "TimeConfig":
        return replace(self, **{f"t{i}": value})

    def to_approx(self) -> "TimeConfig":
        return TimeConfig(*(t if t is INFINITY else complex(t) for t in self))

    def to_json(self) -> list:
        return [_scalar_json(t) for t in self]


@dataclass(frozen=True)
class ExtendedState:
    """A point (q, p) of the chart E_t(kappa) together with its parameters."""

    kappa: Kappa
    t: TimeConfig
    q: Scalar
    p: Scalar

    def __post_init__(self):
        object.__setattr__(self, "q", exactify(self.q))
        object.__setattr__(self, "p", exactify(self.p))
        for i, ti in enumerate(self.t, start=1):
            if ti is not INFINITY and self.q == ti:
                raise ChartError(f"q coincides with t{i} = {ti}")

    @property
    def field(self) -> str:
        vals = [*self.kappa, *self.t.finite_points(), self.q, self.p]
        return "exact" if all(is_exact(v) for v in vals) else "approx"

    def to_approx(self) -> "ExtendedState":
        return ExtendedState(self.kappa.to_approx(), self.t.to_approx(),
                             complex(self.q), complex(self.p))

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa.to_json(),
            "t": self.t.to_json(),
            "q": format_scalar(self.q),
            "p": format_scalar(self.p),
            "field": self.field,
        }

    @classmethod
    def from_json(cls, doc: dict, strict_kappa: bool = True) -> "ExtendedState":
        field = doc.get("field")
        if field not in (None, "exact", "approx"):
            raise ValueError(f"unknown field {field!r}")
        kappa = Kappa.from_json(doc["kappa"], field, strict=strict_kappa)
        t_raw = doc["t"]
        if len(t_raw) == 3:
            t_raw = [*t_raw, "inf"]
        t = TimeConfig(*(_scalar_from_json(x, field) for x in t_raw))
        return cls(kappa, t, parse_scalar(doc["q"], field), parse_scalar(doc["p"], field))


@dataclass(frozen=True)
class QVars:
    """(q0, ..., q4) with q0 = p and q_i = q - t_i (INFINITY when t_i is)."""

    q0: Scalar
    q1: Scalar
    q2: Scalar
    q3: Scalar
    q4: Scalar | _Infinity

    def __getitem__(self, i):
        return (self.q0, self.q1, self.q2, self.q3, self.q4)[i]

    def __iter__(self):
        return iter((self.q0, self.q1, self.q2, self.q3, self.q4))


def qvars(state: ExtendedState) -> QVars:
    t = state.t
    q4 = INFINITY if t.t4_infinite else state.q - t.t4
    return QVars(state.p, state.q - t.t1, state.q - t.t2, state.q - t.t3, q4)


def s_apply(state: ExtendedState, i: int) -> ExtendedState:
    """Apply the generator s_i.

    s0: q -> q + k0/p; s_i (i >= 1): p -> p - k_i/(q - t_i). With t4 at
    infinity s4 moves kappa only.
    """
    kappa = state.kappa
    new_kappa = reflect(kappa, i)
    q, p = state.q, state.p
    if i == 0:
        if p == 0:
            raise PoleError("s0 is undefined on p = 0")
        q = q + kappa.k0 / p
    else:
        ti = state.t[i]
        if ti is not INFINITY:
            # q != t_i is guaranteed by the chart invariant
            p = p - kappa[i] / (q - ti)
    try:
        return ExtendedState(new_kappa, state.t, q, p)
    except ChartError as exc:
        raise ChartError(f"s{i} leaves the chart: {exc}") from None


def s_word(state: ExtendedState, word: GroupWord | Iterable[int]) -> ExtendedState:
    if not isinstance(word, GroupWord):
        word = GroupWord(tuple(word))
    for pos, letter in enumerate(word):
        try:
            state = s_apply(state, letter)
        except (PoleError, ChartError) as exc:
            err = WordError(pos, letter, exc)
            raise type(exc)(str(err)) from exc
    return state


def random_exact_state(rng: random.Random, *, t4_finite: bool = False,
                       bound: int = 1000) -> ExtendedState:
    """Random Gaussian-rational state on the Fuchs locus, p != 0, q off the t's."""
    kappa = random_exact_kappa(rng, bound)
    while True:
        ts = [random_gaussian(rng, bound) for _ in range(4 if t4_finite else 3)]
        if len(set(ts)) == len(ts):
            break
    t = TimeConfig(*ts) if t4_finite else TimeConfig(*ts, INFINITY)
    while True:
        q = random_gaussian(rng, bound)
        p = random_gaussian(rng, bound)
        if q not in ts and p != 0:
            return ExtendedState(kappa, t, q, p)


def random_numeric_state(rng: random.Random, *, re_scale: float = 0.45,
                         im_scale: float = 0.15, h_bound: float = 1.0) -> ExtendedState:
    """Well-conditioned floating-point state with t = (0, 1, x, inf) on the Fuchs locus.

    k1..k4 are moderate (so the monodromy is of moderate size), x keeps
    distance >= 0.5 from 0 and 1, q keeps distance >= 0.25 from the t's and
    0.3 <= |p| <= 1. States whose accessory parameters h_i exceed
    ``h_bound`` in modulus are redrawn: solutions of the linear equation grow
    roughly like exp(sqrt|h|), and with them the monodromy entries.
    """
    from .hamiltonians import h3

    while True:
        state = _numeric_candidate(rng, re_scale, im_scale)
        if max(abs(h3(i, state.q, state.p, state.t, state.kappa)) for i in (1, 2, 3)) <= h_bound:
            return state


def _numeric_candidate(rng, re_scale, im_scale) -> ExtendedState:
    ks = [complex(rng.uniform(-re_scale, re_scale), rng.uniform(-im_scale, im_scale))
          for _ in range(4)]
    kappa = Kappa.from_k1234(*ks)
    while True:
        x = complex(rng.uniform(-0.5, 1.5), rng.choice((-1, 1)) * rng.uniform(0.5, 1.2))
        if min(abs(x), abs(x - 1)) >= 0.5:
            break
    pts = (0j, 1 + 0j, x)
    while True:
        q = complex(rng.uniform(-0.5, 1.5), rng.uniform(-1.2, 1.2))
        if min(abs(q - z) for z in pts) >= 0.25:
            break
    p = rng.uniform(0.3, 1.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    return ExtendedState(kappa, TimeConfig(0j, 1 + 0j, x), q, p)
