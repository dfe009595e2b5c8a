"""Adaptive integration of holomorphic ODEs along piecewise-smooth paths in C.

A path is a list of pieces (segments and circular arcs) parameterized by
arclength s. For dy/dz = F(z, y) we integrate dy/ds = F(z(s), y) z'(s) with
scipy's DOP853 pair, one step at a time, so a guard can inspect every
accepted step.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import DOP853

from .errors import StepError

__all__ = ["Segment", "Arc", "PathResult", "integrate_path", "polyline", "path_length",
           "winding_number"]

# DOP853 refuses rtol below 100 * machine epsilon.
_MIN_RTOL = 100 * np.finfo(float).eps


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    @property
    def length(self) -> float:
        return abs(self.b - self.a)

    def point(self, s: float) -> complex:
        L = self.length
        return self.b if s >= L else self.a + (self.b - self.a) * (s / L)

    def tangent(self, s: float) -> complex:
        return (self.b - self.a) / self.length

    @property
    def start(self) -> complex:
        return self.a

    @property
    def end(self) -> complex:
        return self.b

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)


@dataclass(frozen=True)
class Arc:
    """center + radius * exp(i(theta0 + s/radius * sign(sweep)))."""

    center: complex
    radius: float
    theta0: float
    sweep: float  # signed angle; positive is counter-clockwise

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    def _angle(self, s: float) -> float:
        return self.theta0 + math.copysign(s / self.radius, self.sweep)

    def point(self, s: float) -> complex:
        if s >= self.length:
            return self.end
        return self.center + self.radius * cmath.exp(1j * self._angle(s))

    def tangent(self, s: float) -> complex:
        return 1j * math.copysign(1.0, self.sweep) * cmath.exp(1j * self._angle(s))

    @property
    def start(self) -> complex:
        return self.center + self.radius * cmath.exp(1j * self.theta0)

    @property
    def end(self) -> complex:
        return self.center + self.radius * cmath.exp(1j * (self.theta0 + self.sweep))

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.theta0 + self.sweep, -self.sweep)


Piece = Segment | Arc


def polyline(points: Sequence[complex]) -> list[Segment]:
    """Segments joining consecutive points; zero-length legs are dropped."""
    pts = [complex(z) for z in points]
    return [Segment(a, b) for a, b in zip(pts, pts[1:]) if a != b]


def path_length(pieces: Sequence[Piece]) -> float:
    return float(sum(p.length for p in pieces))


def winding_number(pieces: Sequence[Piece], z0: complex, samples_per_piece: int = 400) -> float:
    """Argument-principle accumulation of arg(z - z0) along the path / 2 pi."""
    total = 0.0
    for piece in pieces:
        L = piece.length
        prev = piece.point(0.0) - z0
        for n in range(1, samples_per_piece + 1):
            cur = piece.point(L * n / samples_per_piece) - z0
            total += cmath.phase(cur / prev)
            prev = cur
    return total / (2 * math.pi)


@dataclass
class PathResult:
    y: np.ndarray
    samples: list = field(default_factory=list)  # (z, y) after each accepted step
    n_steps: int = 0
    n_fev: int = 0


def integrate_path(
    rhs: Callable[[complex, np.ndarray], np.ndarray],
    y0,
    pieces: Sequence[Piece],
    *,
    rtol: float,
    atol: float,
    guard: Callable[[complex, np.ndarray, float], None] | None = None,
    record: bool = False,
    max_steps: int = 200_000,
) -> PathResult:
    """Integrate dy/dz = rhs(z, y) along ``pieces``.

    ``guard(z, y, arclength)`` is called after every accepted step and may
    raise to abort. Raises StepError if the step size collapses.
    """
    y = np.array(y0, dtype=complex)
    result = PathResult(y=y)
    if record and pieces:
        result.samples.append((complex(pieces[0].start), y.copy()))
    rtol = max(rtol, _MIN_RTOL)
    travelled = 0.0
    for piece in pieces:
        L = piece.length
        if L == 0.0:
            continue

        def fun(s, yy, piece=piece):
            return rhs(piece.point(s), yy) * piece.tangent(s)

        solver = DOP853(fun, 0.0, y, L, rtol=rtol, atol=atol)
        while solver.status == "running":
            msg = solver.step()
            result.n_steps += 1
            if solver.status == "failed":
                raise StepError(f"integrator failed at arclength {travelled + solver.t:.6g}: {msg}")
            if not np.all(np.isfinite(solver.y)):
                raise StepError(f"non-finite state at arclength {travelled + solver.t:.6g}")
            z = piece.point(solver.t)
            if guard is not None:
                guard(z, solver.y, travelled + solver.t)
            if record:
                result.samples.append((z, solver.y.copy()))
            if result.n_steps > max_steps:
                raise StepError(f"more than {max_steps} steps")
        result.n_fev += solver.nfev
        y = np.array(solver.y, dtype=complex)
        travelled += L
    result.y = y
    return result
