"""Phase-space rasters and portable graymap/pixmap output.

Grids are row-major with row 0 at the top (theta_max); cell (r, c) covers
s in [s_min + c*ds, +ds) and theta in (theta_max - (r+1)*dt, theta_max - r*dt].
PGM (P5) and PPM (P6) files are binary with maxval 255.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridSpec",
    "RasterGrid",
    "occupancy",
    "dilate",
    "log_scale",
    "linear_scale",
    "write_pgm",
    "write_ppm",
    "BASIN_PALETTE",
]


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sampling window of phase space."""

    s_min: float
    s_max: float
    theta_min: float
    theta_max: float
    width: int
    height: int

    def __post_init__(self):
        if self.s_min >= self.s_max or self.theta_min >= self.theta_max:
            raise ValueError("empty grid window")
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be >= 1")
        if self.width > 8192 or self.height > 8192:
            raise ValueError("grid dimensions are capped at 8192")

    @classmethod
    def phase_space(cls, width: int, height: int) -> "GridSpec":
        return cls(0.0, 3.0, -math.pi / 2.0, math.pi / 2.0, width, height)

    @classmethod
    def side0_positive(cls, width: int, height: int) -> "GridSpec":
        return cls(0.0, 1.0, 0.0, math.pi / 2.0, width, height)

    @property
    def ds(self) -> float:
        return (self.s_max - self.s_min) / self.width

    @property
    def dtheta(self) -> float:
        return (self.theta_max - self.theta_min) / self.height

    def row_of(self, theta: float) -> int:
        r = int((self.theta_max - theta) / self.dtheta)
        return min(max(r, 0), self.height - 1)

    def col_of(self, s: float) -> int:
        c = int((s - self.s_min) / self.ds)
        return min(max(c, 0), self.width - 1)

    def theta_center(self, r: int) -> float:
        return self.theta_max - (r + 0.5) * self.dtheta

    def s_center(self, c: int) -> float:
        return self.s_min + (c + 0.5) * self.ds

    def contains(self, s: float, theta: float) -> bool:
        return (
            self.s_min <= s < self.s_max and self.theta_min < theta <= self.theta_max
        )


@dataclass
class RasterGrid:
    """A GridSpec plus one unsigned payload per cell."""

    spec: GridSpec
    data: np.ndarray

    def __post_init__(self):
        if self.data.shape != (self.spec.height, self.spec.width):
            raise ValueError("payload shape does not match the grid spec")


def occupancy(spec: GridSpec, s, theta) -> RasterGrid:
    """Visit counts of the sample (s, theta) on the grid."""
    s = np.asarray(s, dtype=float)
    theta = np.asarray(theta, dtype=float)
    inside = (
        (s >= spec.s_min)
        & (s < spec.s_max)
        & (theta > spec.theta_min)
        & (theta <= spec.theta_max)
    )
    rows = np.clip(
        ((spec.theta_max - theta[inside]) / spec.dtheta).astype(np.int64),
        0,
        spec.height - 1,
    )
    cols = np.clip(
        ((s[inside] - spec.s_min) / spec.ds).astype(np.int64), 0, spec.width - 1
    )
    data = np.zeros((spec.height, spec.width), np.uint32)
    np.add.at(data, (rows, cols), 1)
    return RasterGrid(spec, data)


def dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    """Chebyshev (square) dilation of a boolean mask."""
    out = mask.copy()
    h, w = mask.shape
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            if dr == 0 and dc == 0:
                continue
            src = mask[
                max(0, -dr) : h - max(0, dr),
                max(0, -dc) : w - max(0, dc),
            ]
            out[
                max(0, dr) : h - max(0, -dr),
                max(0, dc) : w - max(0, -dc),
            ] |= src
    return out


def log_scale(data: np.ndarray) -> np.ndarray:
    """Log-scale counts to 0..255 (zero stays zero)."""
    data = np.asarray(data, dtype=np.float64)
    top = data.max()
    if top <= 0:
        return np.zeros(data.shape, np.uint8)
    out = np.rint(255.0 * np.log1p(data) / np.log1p(top))
    return out.astype(np.uint8)


def linear_scale(data: np.ndarray, vmax: float) -> np.ndarray:
    """Linearly scale 0..vmax to 0..255."""
    out = np.rint(255.0 * np.clip(np.asarray(data, dtype=np.float64), 0, vmax) / vmax)
    return out.astype(np.uint8)


def write_pgm(path, gray: np.ndarray) -> None:
    """Binary P5 graymap, maxval 255, row 0 first (top of the grid)."""
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    if gray.ndim != 2:
        raise ValueError("expected a 2-d array")
    h, w = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(gray.tobytes())


def write_ppm(path, rgb: np.ndarray) -> None:
    """Binary P6 pixmap, maxval 255, row 0 first (top of the grid)."""
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("expected an (h, w, 3) array")
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


# basin ids: 0 unresolved, then red/green/blue
BASIN_PALETTE = {
    0: (0, 0, 0),
    1: (255, 0, 0),
    2: (0, 255, 0),
    3: (0, 0, 255),
}


def basin_rgb(ids: np.ndarray) -> np.ndarray:
    """Map component ids to the fixed palette (extra ids wrap onto 1..3)."""
    ids = np.asarray(ids)
    wrapped = np.where(ids == 0, 0, (ids - 1) % 3 + 1)
    lut = np.zeros((4, 3), np.uint8)
    for k, c in BASIN_PALETTE.items():
        lut[k] = c
    return lut[wrapped]
