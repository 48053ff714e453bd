"""Exact geometry and the angle-contracting bounce map on the triangle.

Coordinates: the boundary of the unit-side equilateral triangle is
parametrised counterclockwise by arc length ``s in (0, 3)``; side
``i = floor(s)`` runs from vertex i to vertex i+1.  The outgoing angle
``theta in (-pi/2, pi/2)`` is measured from the inward normal of the
current side, positive toward increasing arc length.  At a collision the
outgoing angle is ``-lam`` times the signed incoming angle.

Positions are computed by Cartesian ray-segment intersection; the closed
forms for the vertex-aiming curve, the vertex cutting line and the
symmetric period-3 orbit serve as independent cross-checks in the tests.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import SQRT3, STEP_OK

__all__ = [
    "PhasePoint",
    "TableGeometry",
    "StepOutcome",
    "OrbitRecord",
    "VertexHit",
    "delta",
    "step",
    "jacobian_step",
    "jacobian_product",
    "iterate",
]


class VertexHit(Exception):
    """The trajectory meets a vertex (within 1e-12 of arc length)."""

    def __init__(self, arc: float, message: str = ""):
        self.arc = arc
        super().__init__(message or f"trajectory hits the vertex at arc length {arc:g}")


def _validate_lambda(lam):
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"contraction factor must lie in (0, 1], got {lam!r}")


@dataclass(frozen=True)
class PhasePoint:
    """One post-collision state (arc length, outgoing angle)."""

    s: float
    theta: float

    def __post_init__(self):
        s, theta = self.s, self.theta
        if not (0.0 < s < 3.0) or s == math.floor(s):
            raise ValueError(f"arc length must lie in (0,3) off the vertices, got {s!r}")
        if not abs(theta) < math.pi / 2.0:
            raise ValueError(f"angle must lie in (-pi/2, pi/2), got {theta!r}")

    @property
    def side(self) -> int:
        return int(self.s)


@dataclass(frozen=True)
class TableGeometry:
    """The triangular table: three unit-length sides, counterclockwise."""

    vertices: tuple  # ((x0,y0), (x1,y1), (x2,y2))

    @classmethod
    def unit_equilateral(cls) -> "TableGeometry":
        return cls(vertices=((0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 2.0)))

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.shape != (3, 2):
            raise ValueError("expected three planar vertices")
        for i in range(3):
            length = float(np.hypot(*(v[(i + 1) % 3] - v[i])))
            if abs(length - 1.0) > 1e-12:
                raise ValueError(f"side {i} has length {length!r}, expected 1")
        e1 = v[1] - v[0]
        e2 = v[2] - v[0]
        area2 = float(e1[0] * e2[1] - e1[1] * e2[0])
        if area2 <= 0:
            raise ValueError("vertices must be in counterclockwise order")

    def vertex(self, k: int) -> np.ndarray:
        return np.asarray(self.vertices[k % 3], dtype=float)

    def tangent(self, i: int) -> np.ndarray:
        i %= 3
        return self.vertex(i + 1) - self.vertex(i)

    def inward_normal(self, i: int) -> np.ndarray:
        tx, ty = self.tangent(i)
        return np.array([-ty, tx])

    def point_at(self, s: float) -> np.ndarray:
        i = int(s) % 3
        return self.vertex(i) + (s - int(s)) * self.tangent(i)

    def direction(self, p: PhasePoint) -> np.ndarray:
        """Unit outgoing direction of a phase point."""
        i = p.side
        return math.sin(p.theta) * self.tangent(i) + math.cos(p.theta) * self.inward_normal(i)


TABLE = TableGeometry.unit_equilateral()


@dataclass(frozen=True)
class StepOutcome:
    """Result of one successful bounce."""

    next: PhasePoint
    sign: int  # +1 right bounce (side i+1), -1 left bounce (side i-1)
    flight: float  # chord length, in (0, 1]
    incoming: float  # signed incoming angle eta at the landing point


def delta(s: float) -> float:
    """Angle that aims arc-length position s exactly at the opposite vertex.

    Strictly decreasing on each side with image (-pi/6, pi/6); it separates
    right bounces (theta > delta(s)) from left bounces (theta < delta(s)).
    """
    if not (0.0 < s < 3.0) or s == math.floor(s):
        raise ValueError(f"arc length must lie in (0,3) off the vertices, got {s!r}")
    u = s - int(s)
    return math.atan((1.0 - 2.0 * u) / SQRT3)


def step(p: PhasePoint, lam: float) -> StepOutcome:
    """One bounce of the map; raises VertexHit on the singular set."""
    _validate_lambda(lam)
    if not isinstance(p, PhasePoint):
        p = PhasePoint(*p)
    s1, th1, z, flight, eta, status = _kernels.step_kernel(p.s, p.theta, lam)
    if status != STEP_OK:
        raise VertexHit(s1)
    return StepOutcome(next=PhasePoint(s1, th1), sign=int(z), flight=flight, incoming=eta)


def jacobian_step(p: PhasePoint, outcome: StepOutcome, lam: float) -> np.ndarray:
    """Derivative of one bounce at p: -[[A, B], [0, lam]].

    A = cos(theta0)/cos(eta1) and B = flight/cos(eta1); flat walls make the
    matrix upper-triangular, and |det| = lam * A.
    """
    ce = math.cos(outcome.incoming)
    a = math.cos(p.theta) / ce
    b = outcome.flight / ce
    return np.array([[-a, -b], [0.0, -lam]])


@dataclass
class OrbitRecord:
    """A finite orbit: post-step states plus per-step bounce data."""

    initial: PhasePoint
    s: np.ndarray
    theta: np.ndarray
    signs: np.ndarray
    flights: np.ndarray
    incomings: np.ndarray
    termination: str  # "completed" | "vertex_hit"

    def __len__(self) -> int:
        return len(self.s)

    def point(self, k: int) -> PhasePoint:
        return PhasePoint(float(self.s[k]), float(self.theta[k]))

    def closure_residual(self) -> float:
        """max(|s_end - s_0|, |theta_end - theta_0|); inf for empty orbits."""
        if len(self) == 0:
            return math.inf
        return max(
            abs(float(self.s[-1]) - self.initial.s),
            abs(float(self.theta[-1]) - self.initial.theta),
        )


def iterate(p: PhasePoint, lam: float, n: int) -> OrbitRecord:
    """Iterate the map up to n steps, recording the trajectory.

    A vertex hit truncates the record (termination "vertex_hit") rather
    than raising.
    """
    _validate_lambda(lam)
    if not isinstance(p, PhasePoint):
        p = PhasePoint(*p)
    if n < 0:
        raise ValueError("step count must be non-negative")
    if n == 0:
        empty = np.empty(0)
        return OrbitRecord(
            p, empty, empty.copy(), np.empty(0, np.int8), empty.copy(), empty.copy(), "completed"
        )
    ss, ths, zs, fls, ets, status = _kernels.orbit_kernel(p.s, p.theta, lam, n)
    term = "completed" if status == STEP_OK else "vertex_hit"
    return OrbitRecord(p, ss, ths, zs, fls, ets, term)


def jacobian_product(record: OrbitRecord, lam: float) -> np.ndarray:
    """Chain-rule product of the step derivatives along a recorded orbit.

    The product of upper-triangular step matrices is upper-triangular: the
    lower-right entry is (-lam)^n (the angular contraction) and the
    upper-left entry is +/- the horizontal expansion factor.
    """
    out = np.eye(2)
    for k in range(len(record)):
        theta0 = record.initial.theta if k == 0 else float(record.theta[k - 1])
        ce = math.cos(float(record.incomings[k]))
        a = math.cos(theta0) / ce
        b = float(record.flights[k]) / ce
        out = np.array([[-a, -b], [0.0, -lam]]) @ out
    return out
