"""
world package

Verdad del simulador: cinemática, trayectorias de referencia, controlador y sensores.
"""

from .kinematics import (
    Pose2D,
    ControlMeasurement,
    propagate_states,
    motion_jacobian,
    step_true_pose,
    deadreckon,
    poses_to_array,
    array_to_poses,
)
from .reference import (
    ReferenceProfile,
    ControllerGains,
    reference_velocity,
    track_controller,
)
from .sensors import (
    NoiseConfig,
    SensorBiases,
    WorldSnapshot,
    SensorFrame,
    draw_turn_on_biases,
    sense,
)

__all__ = [
    "Pose2D",
    "ControlMeasurement",
    "propagate_states",
    "motion_jacobian",
    "step_true_pose",
    "deadreckon",
    "poses_to_array",
    "array_to_poses",
    "ReferenceProfile",
    "ControllerGains",
    "reference_velocity",
    "track_controller",
    "NoiseConfig",
    "SensorBiases",
    "WorldSnapshot",
    "SensorFrame",
    "draw_turn_on_biases",
    "sense",
]
