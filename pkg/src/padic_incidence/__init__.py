"""Exact incidence geometry over the rings Z/p^kZ and a harness that checks
incidence bounds on generated instances."""

from .geometry import Cube, Direction, Line, Point, Tube, angle, intersect, line_distance, point_distance
from .incidence import WeightedLineSet, WeightedPointSet, incidences
from .ring import RingParams

__all__ = [
    "Cube",
    "Direction",
    "Line",
    "Point",
    "RingParams",
    "Tube",
    "WeightedLineSet",
    "WeightedPointSet",
    "angle",
    "incidences",
    "intersect",
    "line_distance",
    "point_distance",
]
__version__ = "0.1.0"
