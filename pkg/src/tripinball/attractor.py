"""Phenomenology engine: attractor samples, forbidden regions, manifolds,
homoclinic detection, transitive components, basins and orbit statistics.

Long orbits and rasters run in the compiled kernels; this module owns the
sampling protocol (seeded counter-based streams, restart-on-vertex), the
derived geometry of the non-accessible regions and the merge/classify logic
built on top of the raw loops.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .angular import period3
from .raster import GridSpec, RasterGrid, dilate, occupancy

__all__ = [
    "AttractorSample",
    "sample_attractor",
    "InaccessibleBoundary",
    "inaccessible_boundary",
    "cutting_line",
    "escape_time_raster",
    "ManifoldCurve",
    "unstable_manifold",
    "HomoclinicResult",
    "homoclinic_test",
    "ComponentAnalysis",
    "transitive_components",
    "component_label_grid",
    "basin_raster",
    "MeasureStats",
    "measure_stats",
    "band_count",
    "ScanRow",
    "lambda_scan",
    "box_count_slope",
]

PI = math.pi
PI_3 = math.pi / 3.0
PI_6 = math.pi / 6.0
SQRT3 = math.sqrt(3.0)

_MAX_RESTARTS = 10_000


def _as_u64(x: int) -> np.uint64:
    return np.uint64(int(x) & ((1 << 64) - 1))


# ---------------------------------------------------------------------------
# attractor sampling
# ---------------------------------------------------------------------------


@dataclass
class AttractorSample:
    """Post-transient phase points collected from seeded random orbits."""

    lam: float
    seed: int
    n_transient: int
    n_keep: int
    n_seeds: int
    base_stream: int
    s: np.ndarray
    theta: np.ndarray
    restarts: int

    def __len__(self):
        return len(self.s)


def sample_attractor(
    lam: float,
    seed: int,
    n_transient: int = 10_000,
    n_keep: int = 100_000,
    n_seeds: int = 1,
    base_stream: int = 0,
) -> AttractorSample:
    """Iterate from random initial conditions and keep post-transient points.

    Each of `n_seeds` streams (indices base_stream..) contributes an equal
    share of the `n_keep` points.  A vertex hit restarts the stream from a
    fresh random point (counted in `restarts`).
    """
    if not (0.0 < lam < 1.0):
        raise ValueError("attractor sampling needs lam in (0, 1)")
    if n_keep < 1 or n_transient < 0 or n_seeds < 1:
        raise ValueError("counts must be positive")
    per = -(-n_keep // n_seeds)  # ceil
    chunks_s, chunks_t = [], []
    restarts = 0
    for k in range(n_seeds):
        ss, tt, r = _kernels.attractor_kernel(
            lam, _as_u64(seed), _as_u64(base_stream + k), n_transient, per, _MAX_RESTARTS
        )
        chunks_s.append(ss)
        chunks_t.append(tt)
        restarts += int(r)
    s = np.concatenate(chunks_s)[:n_keep]
    theta = np.concatenate(chunks_t)[:n_keep]
    return AttractorSample(
        lam, seed, n_transient, n_keep, n_seeds, base_stream, s, theta, restarts
    )


# ---------------------------------------------------------------------------
# non-accessible regions
# ---------------------------------------------------------------------------


def cutting_line(t: float) -> float:
    """Arc length hit by a ray leaving vertex 0 at angle t: 1 + 2/(1+sqrt(3)tan t)."""
    return 1.0 + 2.0 / (1.0 + SQRT3 * math.tan(t))


@dataclass(frozen=True)
class InaccessibleBoundary:
    """Closed-form boundary of the phase-space region the dynamics abandons.

    After one step every angle satisfies |theta| < lam*pi/2; after two steps
    the central strip |theta| <= min(alpha, lam*pi/6) empties, with
    alpha = (pi/6)(2*lam - 3*lam**2).  For 1/3 < lam <= 2/3 the band
    alpha < |theta| < lam*pi/6 is reachable only left of the curve
    gamma(t) = (cutting_line(t), lam*(pi/3 - t)), which carves triangular
    notches near the far vertex of each side (mirrored for negative angles).
    """

    lam: float

    @property
    def alpha(self) -> float:
        return (PI / 6.0) * (2.0 * self.lam - 3.0 * self.lam**2)

    @property
    def strip(self) -> float:
        return self.lam * PI / 2.0

    @property
    def central(self) -> float:
        return min(max(self.alpha, 0.0), self.lam * PI_6)

    def gamma(self, t: float) -> tuple:
        """The image curve of the vertical side edge, for t in (pi/6, lam*pi/2)."""
        return cutting_line(t), self.lam * (PI_3 - t)

    def notch_cut(self, a: float) -> float:
        """Local coordinate of gamma at angle a in (alpha, lam*pi/6): forbidden beyond."""
        t = PI_3 - a / self.lam
        return cutting_line(t) - 1.0

    def contains(self, s: float, theta: float, margin_s: float = 0.0, margin_theta: float = 0.0) -> bool:
        """True when (s, theta) is non-accessible (shrunk by the margins).

        Valid for lam <= 2/3; above that the one/two-step images overlap and
        only the outer strip is claimed.
        """
        a = abs(theta)
        if a >= self.strip + margin_theta:
            return True
        if a <= self.central - margin_theta:
            return True
        if self.lam <= 2.0 / 3.0 and self.alpha + margin_theta < a < self.lam * PI_6 - margin_theta:
            u = s - int(s)
            cut = self.notch_cut(a)
            if theta > 0.0 and u >= cut + margin_s:
                return True
            if theta < 0.0 and u <= 1.0 - cut - margin_s:
                return True
        return False


def inaccessible_boundary(lam: float) -> InaccessibleBoundary:
    if not (0.0 < lam < 1.0):
        raise ValueError("need lam in (0, 1)")
    return InaccessibleBoundary(lam)


# ---------------------------------------------------------------------------
# escape-time raster and manifolds
# ---------------------------------------------------------------------------


def escape_time_raster(
    lam: float, grid: GridSpec, n: int = 30, target_sign: int = 1
) -> RasterGrid:
    """Per-cell count of consecutive bounces matching target_sign (capped at n).

    Cells whose value reaches n enclose the local stable set of the orbit
    with that constant itinerary; a vertex hit keeps the count so far.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if target_sign not in (-1, 1):
        raise ValueError("target_sign must be +1 or -1")
    data = _kernels.escape_kernel(
        lam,
        grid.s_min,
        grid.s_max,
        grid.theta_min,
        grid.theta_max,
        grid.width,
        grid.height,
        n,
        target_sign,
    )
    return RasterGrid(grid, data)


@dataclass
class ManifoldCurve:
    """Union of horizontal segments approximating an unstable manifold.

    segments holds rows (theta, s_lo, s_hi) with both endpoints on one side;
    every segment is exactly horizontal.
    """

    lam: float
    generations: int
    orientation: int
    segments: np.ndarray
    samples_per_segment: int = 8
    per_generation: list = field(default_factory=list)

    def __len__(self):
        return len(self.segments)

    def point_cloud(self, per_segment: int = 0) -> tuple:
        """(s, theta) samples along every segment (endpoints included)."""
        k = per_segment or self.samples_per_segment
        fracs = np.linspace(0.0, 1.0, max(k, 2))
        th = np.repeat(self.segments[:, 0], len(fracs))
        s = (
            self.segments[:, 1][:, None]
            + (self.segments[:, 2] - self.segments[:, 1])[:, None] * fracs[None, :]
        ).ravel()
        return s, th

    def rasterize(self, spec: GridSpec) -> np.ndarray:
        """Boolean grid of every cell crossed by some segment (exact)."""
        mask = np.zeros((spec.height, spec.width), bool)
        s_hi_edge = math.nextafter(spec.s_max, -math.inf)
        for theta, s_lo, s_hi in self.segments:
            if not (spec.theta_min < theta <= spec.theta_max):
                continue
            if s_hi < spec.s_min or s_lo >= spec.s_max:
                continue
            r = spec.row_of(theta)
            c_lo = spec.col_of(max(s_lo, spec.s_min))
            c_hi = spec.col_of(min(s_hi, s_hi_edge))
            mask[r, c_lo : c_hi + 1] = True
        return mask


_TRIM = _kernels.VERTEX_EPS


def _advance_segments(side, th, lo, hi, lam):
    """One map image of horizontal segments, split at the aiming curve.

    Local coordinates throughout: a segment (side, theta, [lo, hi]) maps to
    its left child (side-1) where u < d(theta) and its right child (side+1)
    where u > d(theta); children are clipped away from the vertices.
    """
    tan3 = SQRT3 * np.tan(th)
    d = 0.5 * (1.0 - tan3)

    out_side, out_th, out_lo, out_hi = [], [], [], []

    # left children: u in [lo, min(hi, d)), image 1 - u/lenL on side-1
    len_l = d
    l_hi = np.minimum(hi, d)
    lmask = lo < l_hi - 2.0 * _TRIM
    if np.any(lmask):
        a = lo[lmask]
        b = l_hi[lmask]
        ll = len_l[lmask]
        new_lo = 1.0 - b / ll
        new_hi = 1.0 - a / ll
        new_lo = np.clip(new_lo, _TRIM, 1.0 - _TRIM)
        new_hi = np.clip(new_hi, _TRIM, 1.0 - _TRIM)
        keep = new_hi - new_lo > 2.0 * _TRIM
        out_side.append((side[lmask][keep] + 2) % 3)
        out_th.append(lam * (-PI_3 - th[lmask][keep]))
        out_lo.append(new_lo[keep])
        out_hi.append(new_hi[keep])

    # right children: u in (max(lo, d), hi], image (1-u)/lenR on side+1
    len_r = 1.0 - d
    r_lo = np.maximum(lo, d)
    rmask = r_lo < hi - 2.0 * _TRIM
    if np.any(rmask):
        a = r_lo[rmask]
        b = hi[rmask]
        lr = len_r[rmask]
        new_lo = (1.0 - b) / lr
        new_hi = (1.0 - a) / lr
        new_lo = np.clip(new_lo, _TRIM, 1.0 - _TRIM)
        new_hi = np.clip(new_hi, _TRIM, 1.0 - _TRIM)
        keep = new_hi - new_lo > 2.0 * _TRIM
        out_side.append((side[rmask][keep] + 1) % 3)
        out_th.append(lam * (PI_3 - th[rmask][keep]))
        out_lo.append(new_lo[keep])
        out_hi.append(new_hi[keep])

    if not out_side:
        empty = np.empty(0)
        return np.empty(0, np.int64), empty, empty.copy(), empty.copy()
    return (
        np.concatenate(out_side),
        np.concatenate(out_th),
        np.concatenate(out_lo),
        np.concatenate(out_hi),
    )


def _dedupe_cap(side, th, lo, hi, cap):
    rows = np.stack([side.astype(float), th, lo, hi], axis=1)
    rows = np.unique(rows, axis=0)
    if len(rows) > cap:
        lengths = rows[:, 3] - rows[:, 2]
        order = np.argsort(-lengths, kind="stable")[:cap]
        rows = rows[np.sort(order)]
    return rows[:, 0].astype(np.int64), rows[:, 1], rows[:, 2], rows[:, 3]


def unstable_manifold(
    lam: float,
    generations: int = 60,
    samples_per_segment: int = 8,
    orientation: int = 1,
    seed_halfwidth: float = 1e-4,
    max_segments: int = 40_000,
) -> ManifoldCurve:
    """Iterate a local horizontal interval through the period-3 point.

    The local unstable manifold is exactly horizontal, so a short segment of
    half-width `seed_halfwidth` through the periodic point is iterated
    generation by generation, splitting at the aiming curve and trimming at
    the vertices.  Output is the union over all generations, deduplicated
    and capped at `max_segments` (longest kept) per generation.
    """
    if not (0.0 < lam < 1.0):
        raise ValueError("need lam in (0, 1)")
    orbit = period3(lam)[0 if orientation == 1 else 1]
    p = orbit.phase_point
    u0 = p.s - int(p.s)
    side = np.array([int(p.s)], np.int64)
    th = np.array([p.theta])
    lo = np.array([max(u0 - seed_halfwidth, _TRIM)])
    hi = np.array([min(u0 + seed_halfwidth, 1.0 - _TRIM)])

    all_rows = [np.stack([th, side + lo, side + hi], axis=1)]
    per_generation = [1]
    for _ in range(generations):
        side, th, lo, hi = _advance_segments(side, th, lo, hi, lam)
        if len(side) == 0:
            break
        side, th, lo, hi = _dedupe_cap(side, th, lo, hi, max_segments)
        per_generation.append(len(side))
        all_rows.append(np.stack([th, side + lo, side + hi], axis=1))

    rows = np.unique(np.concatenate(all_rows, axis=0), axis=0)
    return ManifoldCurve(
        lam=lam,
        generations=generations,
        orientation=orientation,
        segments=rows,
        samples_per_segment=samples_per_segment,
        per_generation=per_generation,
    )


@dataclass(frozen=True)
class HomoclinicResult:
    """Outcome of the stable/unstable intersection search."""

    found: bool
    lam: float
    n: int
    witness_row: int = -1
    witness_col: int = -1
    witness_s: float = float("nan")
    witness_theta: float = float("nan")

    def __bool__(self):
        return self.found


def homoclinic_test(
    lam: float,
    n: int = 30,
    grid: GridSpec = None,
    generations: int = 60,
    max_segments: int = 40_000,
    exclude_rows: float = 2.0,
) -> HomoclinicResult:
    """Does the unstable manifold cross the order-n stable enclosure?

    The enclosure is the escape-time raster over side 0 at positive angles
    (cells whose first n bounces all go right).  Unstable segments on the
    periodic point's own horizontal line are the trivial intersection and
    are excluded by skipping segments within `exclude_rows` grid rows of
    theta_star; any other segment meeting a saturated cell is a witness.
    """
    if grid is None:
        grid = GridSpec.side0_positive(800, 800)
    raster = escape_time_raster(lam, grid, n=n, target_sign=1)
    curve = unstable_manifold(lam, generations=generations, max_segments=max_segments)
    theta_star = period3(lam)[0].theta_star
    band = exclude_rows * grid.dtheta
    saturated = raster.data >= n

    for theta, s_lo, s_hi in curve.segments:
        if int(s_lo) != 0:
            continue
        if not (grid.theta_min < theta <= grid.theta_max):
            continue
        if abs(theta - theta_star) <= band:
            continue
        r = grid.row_of(theta)
        c_lo = grid.col_of(max(s_lo, grid.s_min))
        c_hi = grid.col_of(min(s_hi, math.nextafter(grid.s_max, -math.inf)))
        cols = np.nonzero(saturated[r, c_lo : c_hi + 1])[0]
        if len(cols):
            c = c_lo + int(cols[0])
            return HomoclinicResult(
                True, lam, n, r, c, grid.s_center(c), grid.theta_center(r)
            )
    return HomoclinicResult(False, lam, n)


# ---------------------------------------------------------------------------
# transitive components and basins
# ---------------------------------------------------------------------------


@dataclass
class ComponentAnalysis:
    """Clustering of seeded attractor samples into non-communicating parts."""

    lam: float
    seed: int
    count: int
    groups: tuple  # tuple of tuples of stream indices
    theta_supports: tuple  # (lo, hi) per component, sorted by descending hi
    occupancies: list  # boolean grids per component (on `grid`)
    grid: GridSpec
    samples: list


def _clouds_overlap(occ_a, occ_b, pts_a, pts_b, grid, radius, frac):
    """Symmetric proximity test: >= frac of each cloud within radius cells."""
    dil_a = dilate(occ_a, radius)
    dil_b = dilate(occ_b, radius)

    def coverage(dil, pts):
        rows = np.clip(
            ((grid.theta_max - pts[1]) / grid.dtheta).astype(np.int64), 0, grid.height - 1
        )
        cols = np.clip(
            ((pts[0] - grid.s_min) / grid.ds).astype(np.int64), 0, grid.width - 1
        )
        return float(np.mean(dil[rows, cols]))

    return coverage(dil_b, pts_a) >= frac and coverage(dil_a, pts_b) >= frac


def transitive_components(
    lam: float,
    seed: int = 0,
    n_seeds: int = 12,
    n_keep: int = 50_000,
    n_transient: int = 10_000,
    grid: GridSpec = None,
    radius: int = 2,
    overlap: float = 0.9,
) -> ComponentAnalysis:
    """Count distinct transitive parts by merging overlapping orbit clouds.

    Each stream contributes one cloud; two clouds merge when at least
    `overlap` of each one's points fall within `radius` cells of the other
    on the comparison grid (default 400x400 over full phase space).
    """
    if grid is None:
        grid = GridSpec.phase_space(400, 400)
    samples = [
        sample_attractor(lam, seed, n_transient, n_keep, base_stream=k)
        for k in range(n_seeds)
    ]
    occs = [occupancy(grid, smp.s, smp.theta).data > 0 for smp in samples]

    parent = list(range(n_seeds))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(n_seeds):
        for b in range(a + 1, n_seeds):
            if find(a) == find(b):
                continue
            if _clouds_overlap(
                occs[a],
                occs[b],
                (samples[a].s, samples[a].theta),
                (samples[b].s, samples[b].theta),
                grid,
                radius,
                overlap,
            ):
                parent[find(b)] = find(a)

    buckets = {}
    for k in range(n_seeds):
        buckets.setdefault(find(k), []).append(k)
    groups = []
    for members in buckets.values():
        thetas = np.concatenate([samples[k].theta for k in members])
        groups.append((tuple(members), (float(thetas.min()), float(thetas.max()))))
    groups.sort(key=lambda g: -g[1][1])  # top angle band first

    merged_occs = []
    for members, _ in groups:
        occ = np.zeros((grid.height, grid.width), bool)
        for k in members:
            occ |= occs[k]
        merged_occs.append(occ)

    return ComponentAnalysis(
        lam=lam,
        seed=seed,
        count=len(groups),
        groups=tuple(m for m, _ in groups),
        theta_supports=tuple(sup for _, sup in groups),
        occupancies=merged_occs,
        grid=grid,
        samples=samples,
    )


def component_label_grid(analysis: ComponentAnalysis, pad: int = 1) -> np.ndarray:
    """Paint component ids 1.. onto the analysis grid (0 stays unresolved)."""
    labels = np.zeros((analysis.grid.height, analysis.grid.width), np.int32)
    for idx, occ in enumerate(analysis.occupancies, start=1):
        region = dilate(occ, pad) if pad else occ
        labels[(labels == 0) & region] = idx
    return labels


def basin_raster(
    lam: float,
    grid: GridSpec,
    horizon: int = 4000,
    seed: int = 0,
    analysis: ComponentAnalysis = None,
    extra: int = 400,
) -> tuple:
    """Classify cell centers by the component their orbit settles on.

    Returns (RasterGrid of ids, ComponentAnalysis).  Requires at least two
    transitive components at this contraction factor.
    """
    if analysis is None:
        analysis = transitive_components(lam, seed=seed)
    if analysis.count < 2:
        raise ValueError(
            f"single transitive component at lam={lam:g}; no basins to draw"
        )
    labels = component_label_grid(analysis)
    data = _kernels.basin_kernel(
        lam,
        grid.s_min,
        grid.s_max,
        grid.theta_min,
        grid.theta_max,
        grid.width,
        grid.height,
        horizon,
        extra,
        labels,
        labels.shape[0],
        labels.shape[1],
    )
    return RasterGrid(grid, data), analysis


def box_count_slope(boundary: np.ndarray, factors=(1, 2, 4, 8)) -> float:
    """Least-squares box-counting slope of a boundary mask over grid halvings."""
    counts = []
    h, w = boundary.shape
    for f in factors:
        hh, ww = h // f, w // f
        m = boundary[: hh * f, : ww * f].reshape(hh, f, ww, f).any(axis=(1, 3))
        counts.append(max(int(m.sum()), 1))
    x = np.log(np.asarray(factors, dtype=float))
    y = np.log(np.asarray(counts, dtype=float))
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def basin_boundary(ids: np.ndarray) -> np.ndarray:
    """Cells adjacent (4-neighborhood) to a different basin id."""
    b = np.zeros(ids.shape, bool)
    b[:, :-1] |= ids[:, :-1] != ids[:, 1:]
    b[:, 1:] |= ids[:, :-1] != ids[:, 1:]
    b[:-1, :] |= ids[:-1, :] != ids[1:, :]
    b[1:, :] |= ids[:-1, :] != ids[1:, :]
    return b


# ---------------------------------------------------------------------------
# orbit statistics and the parameter scan
# ---------------------------------------------------------------------------


@dataclass
class BandStat:
    """One heavily-visited angle band and its arc-length histogram."""

    theta_lo: float
    theta_hi: float
    count: int
    s_hist: np.ndarray


@dataclass
class MeasureStats:
    """Birkhoff frequencies along one long orbit."""

    lam: float
    seed: int
    n: int
    sign_freq: float
    side_freq: np.ndarray
    theta_hist: np.ndarray
    theta_edges: np.ndarray
    bands: list
    restarts: int


def measure_stats(
    lam: float,
    n: int = 1_000_000,
    seed: int = 0,
    n_transient: int = 10_000,
    theta_bins: int = 1024,
    s_bins: int = 64,
    top_bands: int = 4,
) -> MeasureStats:
    """Sign/side frequencies and arc-length histograms of top angle bands.

    Restricted to lam < 1/3, where the invariant measure is a product of a
    fair coin on the signs with side weight 1/3 and conditionals on
    horizontal lines of full support.
    """
    if not (0.0 < lam < 1.0 / 3.0):
        raise ValueError("measure statistics are defined for lam < 1/3")
    hist, sides, plus, collected, restarts = _kernels.measure_kernel(
        lam,
        _as_u64(seed),
        _as_u64(0),
        n,
        n_transient,
        theta_bins,
        s_bins,
        _MAX_RESTARTS,
    )
    if collected < n:
        raise RuntimeError("sampling failed to collect the requested orbit length")
    theta_hist = hist.sum(axis=1)
    edges = np.linspace(-PI / 2.0, PI / 2.0, theta_bins + 1)
    order = np.argsort(-theta_hist, kind="stable")[:top_bands]
    bands = [
        BandStat(
            theta_lo=float(edges[b]),
            theta_hi=float(edges[b + 1]),
            count=int(theta_hist[b]),
            s_hist=hist[b].copy(),
        )
        for b in order
    ]
    return MeasureStats(
        lam=lam,
        seed=seed,
        n=n,
        sign_freq=plus / collected,
        side_freq=sides / collected,
        theta_hist=theta_hist,
        theta_edges=edges,
        bands=bands,
        restarts=int(restarts),
    )


def band_count(theta_hist: np.ndarray, floor: int = 10) -> int:
    """Number of runs of angle-histogram bins holding at least `floor` points."""
    occupied = np.asarray(theta_hist) >= floor
    return int(np.sum(occupied[1:] & ~occupied[:-1]) + (1 if occupied[0] else 0))


@dataclass
class ScanRow:
    """One row of the structural scan over the contraction factor."""

    lam: float
    components: int
    homoclinic: bool
    bands: int
    alpha: float
    gap_covered: bool


def lambda_scan(
    lams,
    seed: int = 0,
    n_keep: int = 100_000,
    n_transient: int = 10_000,
    n_seeds: int = 12,
    component_keep: int = 50_000,
    escape_n: int = 30,
    grid: GridSpec = None,
    generations: int = 60,
    band_floor: int = 10,
    theta_bins: int = 1024,
) -> list:
    """Structural observables per contraction factor.

    Per lambda: transitive component count, homoclinic verdict, number of
    occupied angle bands, the central-gap half-width alpha and whether the
    non-Markovian images cover the central gap (alpha < lam*pi/6).
    """
    rows = []
    for lam in lams:
        smp = sample_attractor(lam, seed, n_transient, n_keep)
        hist, _ = np.histogram(
            smp.theta, bins=theta_bins, range=(-PI / 2.0, PI / 2.0)
        )
        bands = band_count(hist, floor=band_floor)
        comp = transitive_components(
            lam, seed=seed, n_seeds=n_seeds, n_keep=component_keep, n_transient=n_transient
        )
        hom = homoclinic_test(lam, n=escape_n, grid=grid, generations=generations)
        boundary = inaccessible_boundary(lam)
        rows.append(
            ScanRow(
                lam=lam,
                components=comp.count,
                homoclinic=hom.found,
                bands=bands,
                alpha=boundary.alpha,
                gap_covered=boundary.alpha < lam * PI_6,
            )
        )
    return rows
