"""Four-species discrete-time Lotka-Volterra models: simulation, fixed points,
linear stability and stability diagrams over hunting efficiencies."""

from .lvmap import (
    CoeffParams,
    EcoParams,
    GenericLV,
    Trajectory,
    compile,
    normalize,
    persistence,
    simulate,
    step,
    step_generic,
)
from .scenarios import get_preset, list_presets
from .stability import Stability, classify, diagram, fixed_point, jacobian

__version__ = "0.1.0"

__all__ = [
    "CoeffParams",
    "EcoParams",
    "GenericLV",
    "Stability",
    "Trajectory",
    "classify",
    "compile",
    "diagram",
    "fixed_point",
    "get_preset",
    "jacobian",
    "list_presets",
    "normalize",
    "persistence",
    "simulate",
    "step",
    "step_generic",
]
