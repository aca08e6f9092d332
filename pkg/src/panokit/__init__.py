"""panokit: geometry toolkit for 360-degree panoramic video."""

from panokit.sphere import (
    Direction3,
    EquirectCoord,
    EulerPose,
    FieldOfView,
    NdcCoord,
    SphericalCoord,
)

__version__ = "0.1.0"
