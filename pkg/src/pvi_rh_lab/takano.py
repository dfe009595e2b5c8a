"""Geometry of the reduced solutions Q = c1 x^lam, P = c2 x^-lam near x = 0.

Points of the universal cover of the punctured x-disk are kept as
(log|x|, arg x) with the argument unreduced; all comparisons below are done
in these coordinates.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import EmptyCurveError
from .scalars import GaussianRational, is_exact
from .weyl import Kappa

__all__ = [
    "CoverPoint",
    "TakanoParams",
    "DomainReport",
    "takano_lambda",
    "takano_QP",
    "domain_membership",
    "brute_force_member",
    "gamma_curve",
    "case_of",
    "random_takano_params",
    "CASE_RE_LAMBDA",
]

# a representative Re(lambda) for each row of the table
CASE_RE_LAMBDA = {1: (1, 2), 2: (1, 1), 3: (0, 1), 4: (0, 0), 5: (-1, 0)}


@dataclass(frozen=True)
class CoverPoint:
    log_abs: float
    arg: float

    @classmethod
    def from_complex(cls, x: complex, sheet: int = 0) -> "CoverPoint":
        return cls(math.log(abs(x)), cmath.phase(x) + 2 * math.pi * sheet)

    @property
    def x(self) -> complex:
        return cmath.exp(complex(self.log_abs, self.arg))

    def log(self) -> complex:
        return complex(self.log_abs, self.arg)


@dataclass(frozen=True)
class TakanoParams:
    c1: complex
    c2: complex
    rho: float
    rho0: float
    mu: float
    kappa: Kappa
    M: float = 3.0  # Takano's constant, assumed > 2
    r: float = 1.0  # radius of the x-disk

    def checks(self) -> dict:
        """Every admissibility condition, by name."""
        k = self.kappa
        g = complex(1 - k.k1 - k.k3)
        prod = abs(complex(self.c1) * complex(self.c2))
        k0 = abs(complex(k.k0))
        out = {
            "generic": g.imag != 0,
            "M_gt_2": self.M > 2,
            "rho0_bounds": 0 < self.rho0 < min(self.rho, abs(g.imag) / 2, 1.0),
            "rho0_k0": k0 == 0 or self.rho0 < k0 / 2,
            "c_in_U": 0 < prod < self.rho0,
            "mu_range": 0 < self.mu < prod / (self.M * (k0 + 8)),
            "r_positive": self.r > 0,
        }
        return out

    @property
    def valid(self) -> bool:
        return all(self.checks().values())

    def lam(self):
        return takano_lambda(self)


def takano_lambda(params: TakanoParams):
    """lambda = 1 - k1 - k3 + 2 c1 c2 (exact if every input is exact)."""
    k = params.kappa
    vals = (k.k1, k.k3, params.c1, params.c2)
    if not all(is_exact(v) for v in vals):
        vals = tuple(complex(v) for v in vals)
    k1, k3, c1, c2 = vals
    return 1 - k1 - k3 + 2 * c1 * c2


def takano_QP(x: CoverPoint, params: TakanoParams) -> tuple[complex, complex]:
    lam = complex(takano_lambda(params))
    e = lam * x.log()
    return complex(params.c1) * cmath.exp(e), complex(params.c2) * cmath.exp(-e)


def case_of(lam) -> int:
    """Row of the table selected by Re lambda (1: > 1, 2: = 1, 3: in (0,1), 4: = 0, 5: < 0)."""
    re = lam.re if is_exact(lam) and hasattr(lam, "re") else complex(lam).real
    if re > 1:
        return 1
    if re == 1:
        return 2
    if re > 0:
        return 3
    if re == 0:
        return 4
    return 5


@dataclass(frozen=True)
class DomainReport:
    case_id: int
    constraints_ok: dict = field(default_factory=dict)  # {"arg": bool, "log": bool}
    L0: float = 0.0
    L1: float = 0.0
    L2: float = 0.0

    @property
    def member(self) -> bool:
        return self.constraints_ok["arg"] and self.constraints_ok["log"]

    def to_json(self) -> dict:
        return {"case_id": self.case_id, "constraints_ok": dict(self.constraints_ok),
                "L0": _finite_or_none(self.L0), "L1": _finite_or_none(self.L1),
                "L2": _finite_or_none(self.L2), "member": self.member}


def _finite_or_none(v: float):
    return v if math.isfinite(v) else None


def domain_membership(x: CoverPoint, params: TakanoParams) -> DomainReport:
    """Classify by the rows of the table: arg constraint and log|x| window."""
    if not math.exp(x.log_abs) < params.r:
        raise ValueError("point outside the x-disk")
    lam_exact = takano_lambda(params)
    case = case_of(lam_exact)
    lam = complex(lam_exact)
    re, im = lam.real, lam.imag
    A = math.log(params.rho / abs(complex(params.c1)))
    B = math.log(params.rho / abs(complex(params.c2)))
    L0 = re * B + (re - 1) * A
    L1 = (im * x.arg + A) / re if re != 0 else math.nan
    L2 = (im * x.arg - B) / (re - 1) if re != 1 else math.nan
    ia = im * x.arg
    ell = x.log_abs
    if case == 1:
        ok = {"arg": ia < L0, "log": L2 < ell < L1}
    elif case == 2:
        ok = {"arg": ia < L0, "log": ell < L1}
    elif case == 3:
        ok = {"arg": True, "log": ell < min(L1, L2)}
    elif case == 4:
        ok = {"arg": ia > L0, "log": ell < L2}
    else:
        ok = {"arg": ia > L0, "log": L1 < ell < L2}
    return DomainReport(case, ok, L0, L1, L2)


def brute_force_member(x: CoverPoint, params: TakanoParams) -> bool:
    """|Q| < rho and |x P| < rho, evaluated in logarithms."""
    lam = complex(takano_lambda(params))
    re, im = lam.real, lam.imag
    logQ = math.log(abs(complex(params.c1))) + re * x.log_abs - im * x.arg
    logxP = math.log(abs(complex(params.c2))) + (1 - re) * x.log_abs + im * x.arg
    lr = math.log(params.rho)
    return logQ < lr and logxP < lr


def gamma_curve(params: TakanoParams, n_points: int = 200, span: float = 20.0) -> list[CoverPoint]:
    """Points of the curve |Q| = mu inside the disk, ordered towards the origin.

    Parameterized by log|x| from just below min(log(mu rho/|c1c2|), log r)
    down by ``span``; arg x = ((Re lam) log|x| - log(mu/|c1|)) / Im lam.
    """
    checks = params.checks()
    bad = [name for name, ok in checks.items() if not ok]
    if bad:
        raise EmptyCurveError(f"parameter constraints fail: {', '.join(bad)}")
    if n_points < 1:
        raise ValueError("n_points must be positive")
    lam = complex(takano_lambda(params))
    re, im = lam.real, lam.imag
    c1, c2 = complex(params.c1), complex(params.c2)
    top = min(math.log(params.mu * params.rho / abs(c1 * c2)), math.log(params.r))
    top -= 1e-9 * max(1.0, abs(top))
    level = math.log(params.mu / abs(c1))
    pts = []
    for n in range(n_points):
        ell = top - span * n / max(n_points - 1, 1)
        pts.append(CoverPoint(ell, (re * ell - level) / im))
    for x in pts:
        if not domain_membership(x, params).member:
            raise EmptyCurveError(f"curve point {x} left the domain")
    return pts


def _frac_between(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 1000) -> Fraction:
    return lo + (hi - lo) * Fraction(rng.randint(1, den - 1), den)


def random_takano_params(rng: random.Random, case: int, *, M: float = 3.0, r: float = 1.0) -> TakanoParams:
    """Admissible exact parameters whose lambda falls in the given row of the table.

    c1 is real and c2 purely imaginary, so Re lambda = Re(1 - k1 - k3) exactly;
    rows 2 and 4 are therefore hit on the nose.
    """
    lo, hi = CASE_RE_LAMBDA[case]
    if lo == hi:
        re_g = Fraction(lo)
    elif case == 1:
        re_g = _frac_between(rng, Fraction(1), Fraction(3))
    elif case == 3:
        re_g = _frac_between(rng, Fraction(0), Fraction(1))
    else:
        re_g = -_frac_between(rng, Fraction(0), Fraction(2))
    im_g = _frac_between(rng, Fraction(1, 5), Fraction(3, 2)) * rng.choice((1, -1))
    k1 = GaussianRational(_frac_between(rng, Fraction(-1), Fraction(1)), _frac_between(rng, Fraction(-1), Fraction(1)))
    k3 = GaussianRational(1 - re_g, -im_g) - k1
    k2 = GaussianRational(_frac_between(rng, Fraction(-1), Fraction(1)), _frac_between(rng, Fraction(-1), Fraction(1)))
    k4 = GaussianRational(_frac_between(rng, Fraction(-1), Fraction(1)), _frac_between(rng, Fraction(-1), Fraction(1)))
    kappa = Kappa.from_k1234(k1, k2, k3, k4)
    rho = float(_frac_between(rng, Fraction(1, 4), Fraction(1)))
    k0 = abs(complex(kappa.k0))
    bound = min(rho, abs(float(im_g)) / 2, 1.0, k0 / 2 if k0 else 1.0)
    rho0 = bound * float(_frac_between(rng, Fraction(1, 2), Fraction(9, 10)))
    size = rho0 * float(_frac_between(rng, Fraction(1, 10), Fraction(9, 10)))
    split = float(_frac_between(rng, Fraction(1, 4), Fraction(4)))
    c1 = GaussianRational(Fraction(size * split).limit_denominator(10**12), 0)
    c2 = GaussianRational(0, Fraction(size / split).limit_denominator(10**12) * rng.choice((1, -1)))
    prod = abs(complex(c1) * complex(c2))
    mu = prod / (M * (k0 + 8)) * float(_frac_between(rng, Fraction(1, 10), Fraction(9, 10)))
    params = TakanoParams(c1, c2, rho, rho0, mu, kappa, M, r)
    if not params.valid:  # rounding at the edges; redraw
        return random_takano_params(rng, case, M=M, r=r)
    return params
