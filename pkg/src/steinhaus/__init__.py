"""Difference-set iteration K_n = (K_{n-1} - K_{n-1}) / 2 and Steinhaus radius bounds."""
from .errors import (BudgetExceeded, DimensionMismatch, EmptyInner, EmptySet, InvalidInput,
                     NonLatticeShift, NotSymmetric, NullMeasure, PointOutsideHull,
                     QThresholdNotMet, ResolutionTooCoarse, SteinhausError)
from .sets import Ball, ConvexPolytope, GridSandwich, GridSet, IntervalUnion, PointSet, box
from .minkowski import iterate_process, mstar_estimate, steinhaus_map
from .metrics import diameter, hausdorff_distance, hausdorff_with_error, volume
from .raster import rasterize, sandwich

__version__ = "0.1.0"

__all__ = [
    "Ball", "BudgetExceeded", "ConvexPolytope", "DimensionMismatch", "EmptyInner", "EmptySet",
    "GridSandwich", "GridSet", "IntervalUnion", "InvalidInput", "NonLatticeShift",
    "NotSymmetric", "NullMeasure", "PointOutsideHull", "PointSet", "QThresholdNotMet",
    "ResolutionTooCoarse", "SteinhausError", "box", "diameter", "hausdorff_distance",
    "hausdorff_with_error", "iterate_process",
    "mstar_estimate", "rasterize", "sandwich", "steinhaus_map", "volume",
]
