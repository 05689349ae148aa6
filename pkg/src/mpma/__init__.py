"""Interval-decomposable approximation of multi-parameter persistence modules."""

from .approximation import (
    ApproxModule,
    CornerAssertionError,
    Corner,
    EndpointLabels,
    IntervalModule,
    Summand,
    approximate_interval,
    approximate_module,
    compute_corners,
    label_endpoints,
    support_contains,
)
from .bench import BenchRow, random_lower_star, run_bench
from .complex import ComplexError, FilteredComplex, Simplex, lower_star, parse_complex, serialize, validate
from .fixtures import FIXTURE_NAMES, fixture, fixture_info
from .grid import (
    Box,
    DiagonalLine,
    LineGrid,
    build_grid,
    comparable,
    consecutive,
    point_at,
    push,
    snake_order,
    surrounding_set,
)
from .matching import BarMatch, compatibility_match, compatible, compatible_with_empty
from .metrics import (
    Raster,
    bottleneck_estimate,
    dimension_at,
    estimate_interleaving,
    fibered_barcode,
    rasterize,
    recthull,
)
from .persistence import Bar, Barcode, ReducedMatrix, barcode, order_simplices, reduce
from .vineyard import VineyardState, advance, transposition_update

__version__ = "0.1.0"
