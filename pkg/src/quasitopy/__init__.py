"""Immersed cooriented curves on polygonal surfaces, up to quasitopy.

Core entry points are re-exported here; the submodules hold the rest.
"""

from .errors import QscError, QscSyntaxError
from .surface import (
    Alignment,
    DualPath,
    Gluing,
    SideRef,
    Step,
    SurfaceComplex,
    evaluation_basis,
    reverse_face,
    subdivide_side,
    validate_complex,
)
from .curve import Chord, Circle, EdgePoint, Multicurve, PointCopy, crossing_report, obstruction_nontrivial, validate_curve
from .resolver import resolve
from .invariants import bsigma, class_vector, evaluate_path, flip, realize_class
from .assembly import add_kink, boundary_sum, disjoint_union, finger_move, random_curve
from .qsc import parse, serialize

__version__ = "0.1.0"
