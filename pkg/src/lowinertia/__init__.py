"""Transient response of a generating station coupled to a finite-inertia grid."""
from .errors import *  # noqa: F401,F403
from .model import (ModelKind, PendulumParams, Phase, StationScenario, Trajectory,
                    angles_from_delta, equilibrium_angle, reduce)
from .hierarchy import Truncation, assemble_blocks

__version__ = "0.1.0"

__all__ = [
    "ModelKind", "Phase", "StationScenario", "PendulumParams", "Trajectory",
    "reduce", "equilibrium_angle", "angles_from_delta", "Truncation", "assemble_blocks",
]
