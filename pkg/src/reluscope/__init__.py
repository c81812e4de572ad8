"""Piecewise-affine analysis of feedforward ReLU networks.

A ReLU network is affine on each set of inputs sharing an activation
pattern.  This package extracts those patterns, assembles the per-region
affine maps and their rank-one atoms, enumerates the input-space partition
exactly over a box, and computes Lipschitz and gradient-stability bounds,
with canonical JSON/CSV/SVG exports and an HTTP service around it all.
"""

from .affine import (
    AffinePiece,
    Atom,
    AtomicDecomposition,
    SynthesisCoefficients,
    affine_piece,
    atomic_decomposition,
    evaluate,
    synthesis_coefficients,
)
from .bounds import (
    BoundReport,
    gradient_backward_product,
    gradient_stability_report,
    lipschitz_config_bound,
    lipschitz_global_bound,
    spectral_lipschitz_bound,
    spectral_norm,
)
from .errors import (
    BudgetExceededError,
    GeometryError,
    NetworkFormatError,
    ShapeError,
    UnsupportedError,
    ValidationError,
)
from .netio import (
    canonical_json,
    config_from_string,
    config_to_string,
    load_network,
    network_to_json_text,
    save_network,
)
from .network import (
    ActivationTrace,
    Configuration,
    Layer,
    NetworkSpec,
    config_of,
    forward_pass,
)
from .regions import (
    DEFAULT_BOX_HALF_WIDTH,
    DEFAULT_BUDGET,
    DEFAULT_TOL,
    Box,
    ConstraintSystem,
    FeasibilityResult,
    Halfspace,
    RegionNode,
    RegionTree,
    Verdict,
    check_feasibility,
    enumerate_regions,
    is_feasible,
    polygon_of_region_2d,
    region_constraints,
)
from .tiling import build_tiling_document, render_tiling_svg

__version__ = "0.1.0"

__all__ = [
    "ActivationTrace",
    "AffinePiece",
    "Atom",
    "AtomicDecomposition",
    "BoundReport",
    "Box",
    "BudgetExceededError",
    "Configuration",
    "ConstraintSystem",
    "DEFAULT_BOX_HALF_WIDTH",
    "DEFAULT_BUDGET",
    "DEFAULT_TOL",
    "FeasibilityResult",
    "GeometryError",
    "Halfspace",
    "Layer",
    "NetworkFormatError",
    "NetworkSpec",
    "RegionNode",
    "RegionTree",
    "ShapeError",
    "SynthesisCoefficients",
    "UnsupportedError",
    "ValidationError",
    "Verdict",
    "affine_piece",
    "atomic_decomposition",
    "build_tiling_document",
    "canonical_json",
    "check_feasibility",
    "config_from_string",
    "config_of",
    "config_to_string",
    "enumerate_regions",
    "evaluate",
    "forward_pass",
    "gradient_backward_product",
    "gradient_stability_report",
    "is_feasible",
    "lipschitz_config_bound",
    "lipschitz_global_bound",
    "load_network",
    "network_to_json_text",
    "polygon_of_region_2d",
    "region_constraints",
    "render_tiling_svg",
    "save_network",
    "spectral_lipschitz_bound",
    "spectral_norm",
    "synthesis_coefficients",
]
