from .helpers import (
    setup_console_encoding,
    wrap_angle,
    circular_mean,
    safe_float,
    fmt_optional,
)
from .logger_manager import RunLogger

__all__ = [
    'setup_console_encoding',
    'wrap_angle',
    'circular_mean',
    'safe_float',
    'fmt_optional',
    'RunLogger',
]
