"""Non-elastic (angle-contracting) billiard dynamics in the equilateral triangle.

The bounce map contracts the outgoing angle toward the inward normal by a
factor lam in (0, 1]; the package computes its attractors, symbolic coding,
periodic orbits, manifolds, basins, and renders phase-space rasters.
"""

__version__ = "0.1.0"

from .angular import (
    GapInterval,
    Period3Orbit,
    SignSeries,
    decode_angle,
    eval_series,
    expansion_factor,
    gaps,
    period3,
    periodic_angle,
    phi,
)
from .attractor import (
    AttractorSample,
    ManifoldCurve,
    basin_raster,
    escape_time_raster,
    homoclinic_test,
    inaccessible_boundary,
    lambda_scan,
    measure_stats,
    sample_attractor,
    transitive_components,
    unstable_manifold,
)
from .geometry import (
    OrbitRecord,
    PhasePoint,
    StepOutcome,
    TableGeometry,
    VertexHit,
    delta,
    iterate,
    jacobian_product,
    jacobian_step,
    step,
)
from .raster import GridSpec, RasterGrid
from .symbolic import (
    ItineraryWord,
    MarkovCell,
    SymbolState,
    angle_after,
    connecting_word,
    itinerary,
    markov_cell,
    point_from_code,
    refine,
    tau,
)

__all__ = [name for name in dir() if not name.startswith("_")]
