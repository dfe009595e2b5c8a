"""Numerical Riemann-Hilbert map: monodromy of the normal form around standard loops.

Conventions
-----------
Y' = [[0, 1], [-V2, V1]] Y is integrated from Y(base) = I, so the monodromy
along a loop is the final frame. Continuation along gamma then delta gives
M_{gamma delta} = M_delta M_gamma, hence gamma1 gamma2 gamma3 gamma4 = 1
reads M4 M3 M2 M1 = I.

Spokes leave the base point in counter-clockwise angular order t1, t2, t3
and each loop circles its point counter-clockwise; gamma4 is a large
clockwise circle (a positive loop about infinity). The apparent point q has
trivial local monodromy, so loops only need to keep a numerical distance
from it and may pass on either side.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .backlund import INFINITY, ExtendedState, TimeConfig
from .errors import AccuracyError, GeometryError
from .fuchsian import FuchsianCoeffs, build_coeff3, normalize3
from .integrate import Arc, Segment, integrate_path, path_length, winding_number
from .weyl import ThetaVec, theta_from_traces

__all__ = [
    "Monodromy2x2",
    "TraceCoords",
    "LoopPath",
    "choose_base",
    "guard_radius",
    "standard_loops",
    "transport",
    "monodromy_matrices",
    "MonodromyResult",
    "trace_coords",
    "cubic_f",
    "cubic_residual",
    "rh_map",
    "RHResult",
    "rh_compute",
]

TRANSPORT_SAFETY = 1e-4  # integrator tolerance relative to the requested tol


@dataclass(frozen=True)
class Monodromy2x2:
    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @classmethod
    def from_array(cls, a) -> "Monodromy2x2":
        a = np.asarray(a, dtype=complex)
        return cls(complex(a[0, 0]), complex(a[0, 1]), complex(a[1, 0]), complex(a[1, 1]))

    def array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def trace(self) -> complex:
        return self.m11 + self.m22

    def __matmul__(self, other: "Monodromy2x2") -> "Monodromy2x2":
        return Monodromy2x2.from_array(self.array() @ other.array())

    def inverse(self) -> "Monodromy2x2":
        return Monodromy2x2.from_array(np.linalg.inv(self.array()))

    def to_json(self) -> list:
        return [[_cjson(self.m11), _cjson(self.m12)], [_cjson(self.m21), _cjson(self.m22)]]


IDENTITY = Monodromy2x2(1, 0, 0, 1)


def _cjson(z: complex) -> list:
    return [z.real, z.imag]


@dataclass(frozen=True)
class TraceCoords:
    x1: complex
    x2: complex
    x3: complex
    theta: ThetaVec

    def __iter__(self):
        return iter((self.x1, self.x2, self.x3))

    def __getitem__(self, i):
        return (self.x1, self.x2, self.x3)[i - 1]


@dataclass(frozen=True)
class LoopPath:
    base_point: complex
    pieces: tuple
    encircles: int  # 1..4, 4 meaning infinity
    winding: dict = field(default_factory=dict, compare=False)

    @property
    def length(self) -> float:
        return path_length(self.pieces)

    def closed(self, tol=1e-9) -> bool:
        return (abs(self.pieces[0].start - self.base_point) < tol
                and abs(self.pieces[-1].end - self.base_point) < tol)


# --- geometry ----------------------------------------------------------------

def _seg_dist(a: complex, b: complex, z: complex) -> float:
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(z - a)
    s = ((z - a) * d.conjugate()).real / L2
    s = min(1.0, max(0.0, s))
    return abs(z - (a + s * d))


def _points(t: TimeConfig) -> list[complex]:
    if t.t4 is not INFINITY:
        raise ValueError("loops are built for t4 = inf")
    return [complex(t[i]) for i in (1, 2, 3)]


def _spoke_angles(b: complex, pts) -> list[float]:
    return [cmath.phase(z - b) for z in pts]


def _ray_angle(b: complex, pts) -> float | None:
    """Direction of the gamma_4 ray: bisector of the CCW gap from spoke 3 to spoke 1.

    None unless the spokes, read counter-clockwise from that gap, come in
    the order 1, 2, 3.
    """
    a1, a2, a3 = _spoke_angles(b, pts)
    two_pi = 2 * math.pi
    d12 = (a2 - a1) % two_pi
    d13 = (a3 - a1) % two_pi
    if not 0 < d12 < d13:
        return None
    gap = two_pi - d13
    return a3 + gap / 2


def _clearance(b: complex, pts, ray: float) -> float:
    far = b + 1e3 * max(abs(z - b) for z in pts) * cmath.exp(1j * ray)
    c = min(_seg_dist(b, far, z) for z in pts)
    for i, zi in enumerate(pts):
        for m, zm in enumerate(pts):
            if m != i:
                c = min(c, _seg_dist(b, zi, zm))
    return c


BASE_CLEARANCE = 1 / 4  # spokes vs. other points, relative to the closest t-pair
MIN_CLEARANCE = 0.21  # fallback; guard circles have radius 0.2 of the closest pair
PATH_CLEARANCE = 1 / 50  # same, for configurations the path only passes through


def _path_clear(b: complex, configs) -> bool:
    for ps in configs:
        dm = min(abs(a - c) for n, a in enumerate(ps) for c in ps[n + 1:])
        ray = _ray_angle(b, ps)
        if ray is None or _clearance(b, ps, ray) < PATH_CLEARANCE * dm:
            return False
    return True


def choose_base(t: TimeConfig, avoid: Sequence[complex] = (), n_angles: int = 72, *,
                also: Sequence[TimeConfig] = (), path: Sequence[TimeConfig] = ()) -> complex:
    """Base point with spokes in CCW order t1, t2, t3 and clear of the other t's.

    Candidates sit on circles about the centroid (and at the centroid); among
    those whose spokes and gamma_4 ray keep a distance of at least a quarter
    of the closest t-pair, the one with the shortest spokes wins. Short spokes
    keep the transported frame well conditioned.

    With ``also`` the base must be admissible for every listed time
    configuration as well. Configurations in ``path`` are only passed
    through, never integrated: they need the same spoke order and a small
    positive clearance (PATH_CLEARANCE), so the loop system deforms
    continuously and one base serves a whole deformation path.
    """
    configs = [_points(t)] + [_points(u) for u in also]
    path_pts = [_points(u) for u in path]
    pts = configs[0]
    c = sum(pts) / 3
    spread = max(abs(z - c) for z in pts)
    dmins = [min(abs(a - b) for n, a in enumerate(ps) for b in ps[n + 1:]) for ps in configs]
    cands = [c]
    for f in (0.2, 0.3, 0.4, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0):
        R = f * spread + 0.5 * dmins[0]
        cands += [c + R * cmath.exp(2j * math.pi * (n + 0.5) / n_angles) for n in range(n_angles)]
    best, best_key = None, None
    for b in cands:
        ratio = math.inf  # clearance relative to the closest t-pair, worst configuration
        for ps, dm in zip(configs, dmins):
            ray = _ray_angle(b, ps)
            if ray is None:
                ratio = -1.0
                break
            ratio = min(ratio, _clearance(b, ps, ray) / dm)
        for z in avoid:
            ratio = min(ratio, abs(b - complex(z)) / dmins[0])
        if ratio < MIN_CLEARANCE or not _path_clear(b, path_pts):
            continue
        # any base reaching BASE_CLEARANCE beats every fallback base
        key = (ratio < BASE_CLEARANCE, sum(abs(z - b) for z in pts) - ratio * dmins[0])
        if best_key is None or key < best_key:
            best, best_key = b, key
    if best is None:
        raise GeometryError("no base point with clear spokes")
    return best


def guard_radius(t: TimeConfig, base: complex, q: complex | None = None) -> float:
    """0.1 times the smallest pairwise distance among t1, t2, t3, q and the base."""
    pts = _points(t) + [complex(base)] + ([] if q is None else [complex(q)])
    return 0.1 * min(abs(a - b) for n, a in enumerate(pts) for b in pts[n + 1:])


def _detour(a: complex, b: complex, q: complex, r: float) -> list:
    """Segment a -> b, going round the disk |z - q| < r if it cuts it."""
    if _seg_dist(a, b, q) >= r:
        return [Segment(a, b)]
    d = b - a
    L = abs(d)
    u = d / L
    s0 = ((q - a) * u.conjugate()).real
    h = math.sqrt(max(r * r - abs(q - (a + s0 * u)) ** 2, 0.0))
    s_in, s_out = s0 - h, s0 + h
    if s_in <= 0 or s_out >= L:
        raise GeometryError("apparent point too close to a loop endpoint")
    p_in, p_out = a + s_in * u, a + s_out * u
    th_in = cmath.phase(p_in - q)
    sweep = (cmath.phase(p_out - q) - th_in) % (2 * math.pi)
    if sweep > math.pi:
        sweep -= 2 * math.pi
    return [Segment(a, p_in), Arc(q, r, th_in, sweep), Segment(p_out, b)]


def _out_and_back(a: complex, b: complex, q, r: float) -> tuple[list, list]:
    out = [Segment(a, b)] if q is None else _detour(a, b, q, r)
    return out, [p.reversed() for p in reversed(out)]


def standard_loops(t: TimeConfig, base: complex | None = None, q: complex | None = None,
                   *, certify: bool = True) -> list[LoopPath]:
    """gamma_1..gamma_4 from a common base point.

    Each t_i gets a circle of twice the guard radius; spokes that pass the
    apparent point q go round it at the same distance, on the same side out
    and back, so q lies inside no gamma_i for i <= 3. With ``certify`` the
    winding numbers about every t_j and q are computed by argument
    accumulation and checked.
    """
    pts = _points(t)
    qc = None if q is None else complex(q)
    if base is None:
        base = choose_base(t, avoid=[] if qc is None else [qc])
    base = complex(base)
    if any(abs(base - z) == 0 for z in pts + ([qc] if qc is not None else [])):
        raise GeometryError("base point coincides with a singular point")
    g = guard_radius(t, base, qc)
    scale = max(abs(a - b) for a in pts for b in pts)
    if g < 1e-8 * scale:
        raise GeometryError(f"guard radius {g:.3e} too small: points too close")
    ray = _ray_angle(base, pts)
    if ray is None:
        raise GeometryError("spokes from this base point are not in CCW order t1, t2, t3")
    r = 2 * g
    loops = []
    for i, ti in enumerate(pts, start=1):
        u = (base - ti) / abs(base - ti)
        out, back = _out_and_back(base, ti + r * u, qc, r)
        circle = Arc(ti, r, cmath.phase(u), 2 * math.pi)
        loops.append(LoopPath(base, tuple(out + [circle] + back), i))
    center = sum(pts) / 3
    extent = max([abs(z - center) for z in pts] + [abs(base - center)]
                 + ([abs(qc - center)] if qc is not None else []))
    R = 10 * extent
    # start of the big circle: where the ray leaves the disk |z - center| < R
    e = cmath.exp(1j * ray)
    w = base - center
    bq = (w * e.conjugate()).real
    s_hit = -bq + math.sqrt(bq * bq - abs(w) ** 2 + R * R)
    far = base + s_hit * e
    out, back = _out_and_back(base, far, qc, r)
    circle = Arc(center, R, cmath.phase(far - center), -2 * math.pi)
    loops.append(LoopPath(base, tuple(out + [circle] + back), 4))
    if certify:
        loops = [_certify(lp, pts, qc, g) for lp in loops]
    return loops


def _certify(loop: LoopPath, pts, q, g: float, samples: int = 400) -> LoopPath:
    marks = {f"t{j}": z for j, z in enumerate(pts, start=1)}
    if q is not None:
        marks["q"] = q
    w = {name: round(winding_number(loop.pieces, z, samples), 6) for name, z in marks.items()}
    i = loop.encircles
    for name in marks:
        if i == 4:
            want = -1
        else:
            want = 1 if name == f"t{i}" else 0
        if abs(w[name] - want) > 1e-6:
            raise GeometryError(f"loop {i} winds {w[name]} times about {name}, expected {want}")
    if not loop.closed():
        raise GeometryError(f"loop {i} is not closed")
    for piece in loop.pieces:
        for n in range(samples + 1):
            z = piece.point(piece.length * n / samples)
            for name, m in marks.items():
                if abs(z - m) < g * (1 - 1e-9):
                    raise GeometryError(f"loop {i} enters the guard disk of {name}")
    return LoopPath(loop.base_point, loop.pieces, loop.encircles, w)


# --- transport ------------------------------------------------------------------

class _Field:
    """Fast complex evaluation of the companion matrix of a FuchsianCoeffs."""

    def __init__(self, coeffs: FuchsianCoeffs):
        c = coeffs.to_approx()
        self.a = np.array([p.loc for p in c.poles], dtype=complex)
        self.c1 = np.array([p.c1 for p in c.poles], dtype=complex)
        self.f = np.array([p.c2_first for p in c.poles], dtype=complex)
        self.s = np.array([p.c2_second for p in c.poles], dtype=complex)

    def __call__(self, z: complex, y: np.ndarray) -> np.ndarray:
        inv = 1.0 / (z - self.a)
        u1 = np.dot(self.c1, inv)
        u2 = np.dot(self.f, inv) + np.dot(self.s, inv * inv)
        # Y = [[y0, y1], [y2, y3]];  Y' = [[0, 1], [-u2, u1]] Y
        return np.array([y[2], y[3], -u2 * y[0] + u1 * y[2], -u2 * y[1] + u1 * y[3]])


def transport(coeffs: FuchsianCoeffs, path: LoopPath, tol: float = 1e-9, *,
              check_det: bool = True) -> Monodromy2x2:
    """Monodromy of the companion system along a closed path, frame I at the base."""
    fld = coeffs if isinstance(coeffs, _Field) else _Field(coeffs)
    res = integrate_path(fld, np.array([1, 0, 0, 1], dtype=complex), path.pieces,
                         rtol=TRANSPORT_SAFETY * tol, atol=TRANSPORT_SAFETY * tol)
    y = res.y
    M = Monodromy2x2(y[0], y[1], y[2], y[3])
    if check_det and abs(M.det - 1) > 10 * tol:
        raise AccuracyError(f"det M - 1 = {abs(M.det - 1):.3e} exceeds 10 tol")
    return M


@dataclass(frozen=True)
class MonodromyResult:
    matrices: tuple  # M1..M4
    det_defects: tuple
    product_defect: float  # |M4 M3 M2 M1 - I|
    m4_crosscheck: float  # |M4 (big circle) - (M3 M2 M1)^-1|
    loops: tuple
    base: complex


def normal_form(state: ExtendedState) -> FuchsianCoeffs:
    return normalize3(build_coeff3(state), state)


def monodromy_matrices(state: ExtendedState, tol: float = 1e-9, *, base: complex | None = None,
                       loops: Sequence[LoopPath] | None = None) -> MonodromyResult:
    if state.t.t4 is not INFINITY:
        raise ValueError("monodromy is computed for t4 = inf")
    fld = _Field(normal_form(state))
    q = complex(state.q)
    if loops is None:
        loops = standard_loops(state.t, base, q)
    Ms = tuple(transport(fld, lp, tol, check_det=False) for lp in loops)
    M1, M2, M3, M4 = Ms
    prod = (M4 @ M3 @ M2 @ M1).array() - np.eye(2)
    inv = (M3 @ M2 @ M1).inverse().array()
    return MonodromyResult(
        matrices=Ms,
        det_defects=tuple(abs(M.det - 1) for M in Ms),
        product_defect=float(np.max(np.abs(prod))),
        m4_crosscheck=float(np.max(np.abs(M4.array() - inv))),
        loops=tuple(loops),
        base=loops[0].base_point,
    )


def trace_coords(Ms: Sequence[Monodromy2x2]) -> TraceCoords:
    """x1 = Tr M2M3, x2 = Tr M3M1, x3 = Tr M1M2; theta from the local traces."""
    M1, M2, M3, M4 = Ms
    a = [M.trace for M in Ms]
    return TraceCoords((M2 @ M3).trace, (M3 @ M1).trace, (M1 @ M2).trace, theta_from_traces(a))


def cubic_f(x: Sequence, theta: Sequence) -> complex:
    x1, x2, x3 = x
    th1, th2, th3, th4 = theta
    return x1 * x2 * x3 + x1 * x1 + x2 * x2 + x3 * x3 - th1 * x1 - th2 * x2 - th3 * x3 + th4


def cubic_residual(x: TraceCoords) -> float:
    return abs(cubic_f(tuple(x), tuple(x.theta)))


@dataclass(frozen=True)
class RHResult:
    coords: TraceCoords
    monodromy: MonodromyResult
    traces: tuple

    @property
    def residual(self) -> float:
        return cubic_residual(self.coords)

    def to_json(self) -> dict:
        m = self.monodromy
        return {
            "a": [_cjson(complex(v)) for v in self.traces],
            "x": [_cjson(complex(v)) for v in self.coords],
            "theta": [_cjson(complex(v)) for v in self.coords.theta],
            "residual": self.residual,
            "certificates": {
                "det_defects": list(m.det_defects),
                "product_defect": m.product_defect,
                "m4_crosscheck": m.m4_crosscheck,
            },
            "base_point": _cjson(m.base),
        }


def rh_compute(state: ExtendedState, tol: float = 1e-9, *, base: complex | None = None) -> RHResult:
    res = monodromy_matrices(state.to_approx() if state.field == "exact" else state, tol, base=base)
    coords = trace_coords(res.matrices)
    return RHResult(coords, res, tuple(M.trace for M in res.matrices))


def rh_map(state: ExtendedState, tol: float = 1e-9, *, base: complex | None = None) -> TraceCoords:
    return rh_compute(state, tol, base=base).coords
