"""Target control of asynchronous Boolean networks."""

__version__ = "0.1.0"

from .model import (BooleanNetwork, Control, ModelError, apply_control_state,
                    classify_inputs, controlled_network, load_network, parse_network)
from .symbolic import Schema, StateSet, Universe, largest_cube, schema_cover
from .dynamics import (Attractor, Kind, admissible_space, compute_attractors,
                       strong_basin, weak_basin)
from .control import ControlResult, Mode, itc, ptc, solve, ttc, verify_ptc, verify_ttc

__all__ = [
    "Attractor", "BooleanNetwork", "Control", "ControlResult", "Kind", "Mode",
    "ModelError", "Schema", "StateSet", "Universe", "admissible_space",
    "apply_control_state", "classify_inputs", "compute_attractors",
    "controlled_network", "itc", "largest_cube", "load_network", "parse_network",
    "ptc", "schema_cover", "solve", "strong_basin", "ttc", "verify_ptc",
    "verify_ttc", "weak_basin",
]
