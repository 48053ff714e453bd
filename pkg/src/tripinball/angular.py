"""One-dimensional angular dynamics of the bounce map.

The angle after a bounce depends only on the previous angle and the bounce
side: ``phi(sign, theta) = lam * (sign*pi/3 - theta)``.  Iterating these two
affine maps generates signed geometric series ``(pi/3) * sum z_n lam^n``;
for ``lam < 1/2`` the closure of those values is a Cantor set whose gap
structure, coding and periodic points are computed here.
"""

import math
from dataclasses import dataclass

from .geometry import OrbitRecord

__all__ = [
    "phi",
    "SignSeries",
    "eval_series",
    "decode_angle",
    "GapInterval",
    "gaps",
    "periodic_angle",
    "Period3Orbit",
    "period3",
    "expansion_factor",
    "cantor_sup",
    "OutOfCantorRange",
    "WordTooShort",
    "NotClosed",
]

PI_3 = math.pi / 3.0


class OutOfCantorRange(ValueError):
    """The angle cannot be bracketed by any signed geometric series."""


class WordTooShort(ValueError):
    """Periodic itineraries need length at least 3."""


class NotClosed(ValueError):
    """The orbit record does not close onto its initial point."""


def phi(sign: int, theta: float, lam: float) -> float:
    """Angle map of one bounce: lam * (sign*pi/3 - theta)."""
    return lam * (sign * PI_3 - theta)


def cantor_sup(lam: float) -> float:
    """Supremum of the reachable angle set, (pi/3) * lam/(1-lam)."""
    return PI_3 * lam / (1.0 - lam)


@dataclass(frozen=True)
class SignSeries:
    """Finite-depth truncation of a signed geometric series of angles.

    value = (pi/3) * sum_{n=1..d} signs[n-1] * lam^n; any infinite
    completion lies within `tail` of `value`.
    """

    signs: tuple
    lam: float

    def __post_init__(self):
        if len(self.signs) < 1:
            raise ValueError("need depth >= 1")
        if any(z not in (-1, 1) for z in self.signs):
            raise ValueError("signs must be +1 or -1")

    @property
    def depth(self) -> int:
        return len(self.signs)

    @property
    def value(self) -> float:
        acc = 0.0
        p = 1.0
        for z in self.signs:
            p *= self.lam
            acc += z * p
        return PI_3 * acc

    @property
    def tail(self) -> float:
        return PI_3 * self.lam ** (self.depth + 1) / (1.0 - self.lam)


def eval_series(series: SignSeries) -> tuple:
    """(partial-sum value, tail radius bounding any completion)."""
    return series.value, series.tail


def decode_angle(theta: float, lam: float, depth: int, atol: float = 1e-12) -> SignSeries:
    """Greedy sign extraction of an angle in the Cantor set (lam < 1/2).

    At each level the remainder must stay within the geometric tail bound
    (plus `atol`); ties at exact gap boundaries resolve toward +1.  Raises
    OutOfCantorRange when the angle cannot be bracketed.
    """
    if not (0.0 < lam < 0.5):
        raise ValueError("unique coding requires lam < 1/2")
    if depth < 1:
        raise ValueError("need depth >= 1")
    signs = []
    r = theta
    p = 1.0
    for _ in range(depth):
        p *= lam
        z = 1 if r >= 0.0 else -1
        r -= z * PI_3 * p
        if abs(r) > PI_3 * p * lam / (1.0 - lam) + atol:
            raise OutOfCantorRange(
                f"angle {theta!r} leaves the series tail at level {len(signs) + 1}"
            )
        signs.append(z)
    return SignSeries(tuple(signs), lam)


@dataclass(frozen=True)
class GapInterval:
    """Level-m excluded interval around a partial sum (empty of series values)."""

    center: float
    half_width: float
    level: int

    @property
    def lo(self) -> float:
        return self.center - self.half_width

    @property
    def hi(self) -> float:
        return self.center + self.half_width


def gaps(lam: float, max_level: int) -> list:
    """All gaps of level 1..max_level; 2**(m-1) intervals at level m.

    The level-m half width is (pi/3) * (1-2*lam)/(1-lam) * lam**m, positive
    for lam < 1/2 and zero at lam = 1/2.
    """
    if not (0.0 < lam <= 0.5):
        raise ValueError("gap structure requires lam <= 1/2")
    if max_level < 1:
        raise ValueError("need max_level >= 1")
    if max_level > 24:
        raise ValueError("enumeration beyond level 24 is not supported")
    out = []
    centers = [0.0]
    p = 1.0
    factor = PI_3 * (1.0 - 2.0 * lam) / (1.0 - lam)
    for level in range(1, max_level + 1):
        p *= lam
        half = factor * p
        out.extend(GapInterval(c, half, level) for c in centers)
        if level < max_level:
            offset = PI_3 * p
            centers = [c + z * offset for c in centers for z in (1, -1)]
    return out


def in_any_gap(theta: float, gap_list, shrink: float = 0.0) -> bool:
    """True when theta lies strictly inside some gap shrunk by `shrink`."""
    return any(abs(theta - g.center) < g.half_width - shrink for g in gap_list)


def periodic_angle(word, lam: float) -> float:
    """Fixed angle of the bounce-sign word w (applied w[0] first).

    theta_w = (pi/3) * [sum_{j=1..m} (-1)^(j-1) w[m-j] lam^j] / (1 - (-lam)^m),
    the unique solution of phi_{w[m-1]} o ... o phi_{w[0]} (theta) = theta.
    """
    m = len(word)
    if m < 3:
        raise WordTooShort("periodic orbits in the triangle have period >= 3")
    acc = 0.0
    p = 1.0
    sign = 1.0
    for j in range(1, m + 1):
        p *= lam
        acc += sign * word[m - j] * p
        sign = -sign
    return PI_3 * acc / (1.0 - (-lam) ** m)


@dataclass(frozen=True)
class Period3Orbit:
    """The symmetric period-3 orbit (one per orientation).

    theta_star = (pi/3) * lam/(1+lam) is the fixed point of phi(+1, .);
    s3 = 2/(sqrt(3)*tan(theta_star) + 3) is its base arc length on side 0.
    The mirror orbit carries (-theta_star) at arc length 1 - s3.
    """

    theta_star: float
    s3: float
    orientation: int

    @property
    def phase_point(self):
        from .geometry import PhasePoint

        if self.orientation == 1:
            return PhasePoint(self.s3, self.theta_star)
        return PhasePoint(1.0 - self.s3, -self.theta_star)


def period3(lam: float) -> tuple:
    """Both orientations of the symmetric period-3 orbit, (+1 first)."""
    if not (0.0 < lam <= 1.0):
        raise ValueError("need lam in (0, 1]")
    theta_star = PI_3 * lam / (lam + 1.0)
    s3 = 2.0 / (math.sqrt(3.0) * math.tan(theta_star) + 3.0)
    return (
        Period3Orbit(theta_star, s3, orientation=1),
        Period3Orbit(theta_star, s3, orientation=-1),
    )


def expansion_factor(orbit: OrbitRecord, lam: float, tol: float = 1e-8) -> float:
    """Horizontal expansion of a closed cycle: prod cos(lam*eta)/cos(eta) > 1.

    Equals the magnitude of the top-left entry of the cycle's derivative
    product.  Raises NotClosed unless the record ends within `tol` of its
    initial point (componentwise).
    """
    if orbit.termination != "completed" or len(orbit) == 0:
        raise NotClosed("orbit record is empty or hit a vertex")
    if orbit.closure_residual() > tol:
        raise NotClosed(f"endpoint residual {orbit.closure_residual():.3e} exceeds {tol:g}")
    mu = 1.0
    for eta in orbit.incomings:
        mu *= math.cos(lam * eta) / math.cos(eta)
    return mu
