from .core import (DetectionService, ServiceConfig, StateError,
                   detect_segment, segment_lanes)
from .archive import FlightArchive


def create_app(*args, **kwargs):
    """Lazy wrapper so importing the package does not require FastAPI."""
    from .app import create_app as _create_app
    return _create_app(*args, **kwargs)


__all__ = [
    "DetectionService",
    "ServiceConfig",
    "StateError",
    "detect_segment",
    "segment_lanes",
    "FlightArchive",
    "create_app",
]
