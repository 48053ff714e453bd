"""Itinerary coding and the symbolic model of the dynamics.

For angles |theta| < pi/6, a full-side horizontal interval is split by the
vertex-aiming curve into two cells whose continuous extensions each map
affinely ONTO a full side (orientation-reversing, expanding).  Nesting those
cells along a sign word pins down arc-length intervals with a prescribed
itinerary; together with the sign-series coding of the angle this realises
the conjugacy between the map and the shift-with-sign-flips model

    tau[(w, z), i] = [(sigma(w), (w1, -z1, -z2, ...)), i + w1 mod 3].
"""

import math
from dataclasses import dataclass

from .angular import PI_3, SignSeries, decode_angle, phi
from .geometry import PhasePoint, iterate

__all__ = [
    "ItineraryWord",
    "itinerary",
    "MarkovCell",
    "markov_cell",
    "refine",
    "SymbolState",
    "point_from_code",
    "tau",
    "connecting_word",
    "angle_after",
    "periodic_orbit_from_word",
    "expansion_floor",
    "NotMarkovian",
    "EmptyWord",
    "NotInCantor",
    "DegenerateWord",
]

SQRT3 = math.sqrt(3.0)
PI_6 = math.pi / 6.0
_VERTEX_MARGIN = 1e-9  # fixed points this close to a vertex are degenerate


class NotMarkovian(ValueError):
    """The horizontal interval at this angle does not split over two sides."""


class EmptyWord(ValueError):
    """The symbolic step needs at least one future bounce sign."""


class NotInCantor(ValueError):
    """The angle is not within decode tolerance of the invariant angle set."""


class DegenerateWord(ValueError):
    """The word's formal periodic point sits on a vertex (no orbit exists).

    Repetitions of a two-sign pattern would describe a period-2 trajectory
    between two non-parallel sides; the fixed point of the word's affine
    return map then lands exactly on the shared vertex, outside phase space.
    """


@dataclass(frozen=True)
class ItineraryWord:
    """A finite sequence of bounce signs; flagged when a vertex cut it short."""

    signs: tuple
    vertex_truncated: bool = False

    def __post_init__(self):
        if any(z not in (-1, 1) for z in self.signs):
            raise ValueError("signs must be +1 or -1")

    def __len__(self):
        return len(self.signs)

    def __iter__(self):
        return iter(self.signs)


def itinerary(p: PhasePoint, lam: float, n: int) -> ItineraryWord:
    """Signs of the first n bounces; truncated and flagged on a vertex hit."""
    if n < 1:
        raise ValueError("need n >= 1")
    record = iterate(p, lam, n)
    return ItineraryWord(
        tuple(int(z) for z in record.signs),
        vertex_truncated=(record.termination == "vertex_hit"),
    )


def split_point(theta: float) -> float:
    """Local coordinate of the vertex-aiming position at angle theta.

    Inverse of the aiming curve: u = (1 - sqrt(3)*tan(theta))/2, in (0,1)
    exactly when |theta| < pi/6.
    """
    return 0.5 * (1.0 - SQRT3 * math.tan(theta))


def project_u(u: float, theta: float, sign: int) -> float:
    """Extended cell map in local coordinates: side i -> side i+sign.

    Affine, orientation-reversing, with |slope| = 1/|cell|:
      sign=+1: u' = (1-u) / ((1 + sqrt(3)tan(theta))/2)
      sign=-1: u' = 1 - u / ((1 - sqrt(3)tan(theta))/2)
    """
    t = SQRT3 * math.tan(theta)
    if sign == 1:
        return (1.0 - u) / (0.5 * (1.0 + t))
    return 1.0 - u / (0.5 * (1.0 - t))


@dataclass(frozen=True)
class MarkovCell:
    """One half of a full-side horizontal interval at angle |theta| < pi/6.

    The open interior lies in a single continuity domain, and the continuous
    extension of the map sends the cell onto the full target side with
    constant expansion 1/length.
    """

    side: int
    theta: float
    half: str  # "L" or "R"

    def __post_init__(self):
        if self.half not in ("L", "R"):
            raise ValueError("half must be 'L' or 'R'")
        if not abs(self.theta) < PI_6:
            raise NotMarkovian(f"|theta| = {abs(self.theta)!r} is not below pi/6")

    @property
    def sign(self) -> int:
        return 1 if self.half == "R" else -1

    @property
    def split(self) -> float:
        """Arc length of the splitting point d_theta on this side."""
        return self.side + split_point(self.theta)

    @property
    def lo(self) -> float:
        return float(self.side) if self.half == "L" else self.split

    @property
    def hi(self) -> float:
        return self.split if self.half == "L" else float(self.side + 1)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def target_side(self) -> int:
        return (self.side + self.sign) % 3

    @property
    def expansion(self) -> float:
        return 1.0 / self.length

    def map_arc(self, s: float) -> float:
        """Extended affine image (arc length on the target side)."""
        return self.target_side + project_u(s - self.side, self.theta, self.sign)

    def image_angle(self, lam: float) -> float:
        return phi(self.sign, self.theta, lam)


def markov_cell(i: int, theta: float, half: str) -> MarkovCell:
    """The L or R cell of the full-side interval at (side i, angle theta)."""
    return MarkovCell(side=i % 3, theta=theta, half=half)


def expansion_floor(lam: float) -> float:
    """Uniform lower bound on cell expansion for angles |theta| <= lam*pi/2.

    The widest cell half ((1 + sqrt(3)tan|theta|)/2) grows with |theta|, so
    the minimum expansion is attained at the band edge:
    rho = 2/(1 + sqrt(3)*tan(lam*pi/2)) > 1 for lam < 1/3.
    """
    if not (0.0 < lam < 1.0 / 3.0):
        raise ValueError("uniform horizontal expansion needs lam < 1/3")
    return 2.0 / (1.0 + SQRT3 * math.tan(lam * math.pi / 2.0))


def _refine_local(i: int, theta: float, word, lam: float):
    """Nested-interval core: returns (u_lo, u_hi) in side-i local coordinates."""
    if len(word) < 1:
        raise ValueError("need a word of length >= 1")
    h_lo, h_hi = 0.0, 1.0
    m, c = 1.0, 0.0  # forward affine: u0 -> current side's local coordinate
    th = theta
    for w in word:
        if not abs(th) < PI_6:
            raise NotMarkovian(
                f"intermediate angle {th!r} left the Markovian band; refinement undefined"
            )
        d = split_point(th)
        lo_k, hi_k = (d, 1.0) if w == 1 else (0.0, d)
        e1 = (lo_k - c) / m
        e2 = (hi_k - c) / m
        h_lo, h_hi = (e1, e2) if e1 <= e2 else (e2, e1)
        t = SQRT3 * math.tan(th)
        if w == 1:
            a = -1.0 / (0.5 * (1.0 + t))
            b = -a
        else:
            a = -1.0 / (0.5 * (1.0 - t))
            b = 1.0
        m, c = a * m, a * c + b
        th = phi(w, th, lam)
    return h_lo, h_hi


def refine(i: int, theta: float, word, lam: float) -> tuple:
    """Closed arc-length interval on side i whose itinerary starts with `word`.

    Nested in the word: extending the word shrinks the interval, with width
    at most expansion_floor(lam)**(-len(word)).  Requires lam < 1/3 so every
    intermediate angle stays Markovian (checked at runtime).
    """
    if not (0.0 < lam < 1.0 / 3.0):
        raise ValueError("refinement requires lam < 1/3")
    u_lo, u_hi = _refine_local(i % 3, theta, tuple(word), lam)
    return (i % 3 + u_lo, i % 3 + u_hi)


@dataclass(frozen=True)
class SymbolState:
    """Point of the symbolic model: future itinerary, angle code, side index."""

    w: tuple  # future bounce signs
    z: tuple  # angle sign-series code
    i: int  # side index in Z_3

    def __post_init__(self):
        if any(x not in (-1, 1) for x in self.w) or any(x not in (-1, 1) for x in self.z):
            raise ValueError("signs must be +1 or -1")
        if self.i not in (0, 1, 2):
            raise ValueError("side index must be 0, 1 or 2")


def tau(state: SymbolState) -> SymbolState:
    """Symbolic step: shift the itinerary, push its head onto the negated code.

    [(w, z), i] -> [(sigma(w), (w1, -z1, -z2, ...)), i + w1 mod 3].
    """
    if len(state.w) == 0:
        raise EmptyWord("cannot shift an empty future itinerary")
    w1 = state.w[0]
    return SymbolState(
        w=state.w[1:],
        z=(w1,) + tuple(-x for x in state.z),
        i=(state.i + w1) % 3,
    )


def point_from_code(state: SymbolState, lam: float) -> PhasePoint:
    """Phase point realising a finite symbolic state (lam < 1/3).

    Returns the midpoint of the nested interval of the itinerary prefix at
    the angle encoded by the sign series; the arc-length error is bounded by
    the interval width and the angle error by the series tail.
    """
    theta = SignSeries(state.z, lam).value
    if len(state.w) == 0:
        return PhasePoint(state.i + 0.5, theta)
    lo, hi = refine(state.i, theta, state.w, lam)
    return PhasePoint(0.5 * (lo + hi), theta)


def angle_after(word, theta0: float, lam: float) -> float:
    """Closed form for the angle after following `word` from theta0.

    (pi/3) * sum_{j=1..n} (-1)^(j-1) w[n-j] lam^j + (-lam)^n * theta0;
    identical to composing phi along the word.
    """
    n = len(word)
    acc = 0.0
    p = 1.0
    sgn = 1.0
    for j in range(1, n + 1):
        p *= lam
        acc += sgn * word[n - j] * p
        sgn = -sgn
    return PI_3 * acc + (-lam) ** n * theta0


def connecting_word(src: tuple, dst: tuple, epsilon: float, lam: float) -> ItineraryWord:
    """A word steering side src[0] onto side dst[0] with angle within epsilon.

    Both angles must code into the invariant angle set (lam < 1/3).  The word
    replays the target's sign code in reverse with alternating flips, plus at
    most two leading signs that fix the side index; following it from any
    admissible point lands on side dst[0] with |angle - dst[1]| < epsilon.
    """
    if epsilon <= 0.0:
        raise ValueError("need epsilon > 0")
    if not (0.0 < lam < 1.0 / 3.0):
        raise ValueError("word surgery requires lam < 1/3")
    i_src, theta_src = src
    i_dst, theta_dst = dst

    try:
        decode_angle(theta_src, lam, depth=8)
    except ValueError as exc:
        raise NotInCantor(f"source angle {theta_src!r}: {exc}") from exc

    # depth: two sequences agreeing to level k differ by < (2pi/3) lam^(k+1)/(1-lam)
    bound = epsilon * 3.0 * (1.0 - lam) / (2.0 * math.pi)
    k = max(1, math.ceil(math.log(bound) / math.log(lam)) - 1)
    while (2.0 * math.pi / 3.0) * lam ** (k + 1) / (1.0 - lam) >= epsilon:
        k += 1
    try:
        code = decode_angle(theta_dst, lam, depth=k).signs
    except ValueError as exc:
        raise NotInCantor(f"target angle {theta_dst!r}: {exc}") from exc

    # consumed last-to-first, the core writes code[0..k-1] onto the angle code
    core = [(-1) ** (k - j - 1) * code[k - j - 1] for j in range(k)]
    diff = (i_dst - i_src - sum(core)) % 3
    prefix = {0: [], 1: [1], 2: [1, 1]}[diff]
    return ItineraryWord(tuple(prefix + core))


def periodic_orbit_from_word(word, lam: float):
    """Construct the periodic orbit with itinerary `word` starting on side 0.

    Composes the extended affine cell maps along the word at the word's fixed
    angle and solves for the arc-length fixed point.  Returns
    (PhasePoint, side_shift) where side_shift = sum(word) mod 3 is the side
    offset after one period (0 for a true period-m orbit; otherwise the
    orbit closes after three periods).  The result is verified by iterating
    the actual map.  Raises DegenerateWord for two-sign repetitions, whose
    formal fixed point is a vertex.
    """
    from .angular import periodic_angle

    word = tuple(word)
    theta_w = periodic_angle(word, lam)
    m_tot, c_tot = 1.0, 0.0
    th = theta_w
    for w in word:
        if not abs(th) < PI_6:
            raise NotMarkovian(f"angle {th!r} along the word leaves the Markovian band")
        t = SQRT3 * math.tan(th)
        if w == 1:
            a = -1.0 / (0.5 * (1.0 + t))
            b = -a
        else:
            a = -1.0 / (0.5 * (1.0 - t))
            b = 1.0
        m_tot, c_tot = a * m_tot, a * c_tot + b
        th = phi(w, th, lam)
    u_star = c_tot / (1.0 - m_tot)
    if u_star <= _VERTEX_MARGIN or u_star >= 1.0 - _VERTEX_MARGIN:
        raise DegenerateWord(
            f"word {word} pins its periodic point at u = {u_star!r}, on a vertex"
        )
    if not (0.0 < u_star < 1.0):
        raise ValueError(f"fixed point {u_star!r} fell outside the side")
    p = PhasePoint(u_star, theta_w)
    realized = itinerary(p, lam, len(word))
    if realized.vertex_truncated or tuple(realized.signs) != word:
        raise ValueError(f"word {word} is not realised at the constructed point")
    return p, sum(word) % 3
