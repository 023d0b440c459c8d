"""
ranging_ekf package

EKF cooperativo de distancias sobre las poses apiladas del grupo.
"""

from .ekf import (
    EkfConfig,
    EkfEstimate,
    DegenerateGeometryError,
    predict,
    update,
    correct,
    range_jacobian_row,
    estimate_with_deadreckoning,
    relative_positions,
    CooperativeRangingEkf,
)

__all__ = [
    "EkfConfig",
    "EkfEstimate",
    "DegenerateGeometryError",
    "predict",
    "update",
    "correct",
    "range_jacobian_row",
    "estimate_with_deadreckoning",
    "relative_positions",
    "CooperativeRangingEkf",
]
