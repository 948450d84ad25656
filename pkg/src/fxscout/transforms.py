"""Rigid reorientation / scale / duration-scale transformations.

The alignment search enumerates a finite grid of these. Azimuthal rotation is
deliberately absent: representations are axisymmetric, so spinning about the
polar axis is already captured by the trail's phi component. The four axis
reorientations are 180-degree rotations chosen to be involutions, which keeps
every grid transformation's inverse inside the grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

REORIENTATIONS = ("identity", "tilt_x_90", "tilt_y_90", "flip")

# 180-degree rotations about: nothing, the (x+z) diagonal (polar axis -> +x),
# the (y+z) diagonal (polar axis -> +y), and the x axis (polar axis -> -z).
_MATRICES = {
    "identity": np.eye(3),
    "tilt_x_90": np.array([[0.0, 0.0, 1.0],
                           [0.0, -1.0, 0.0],
                           [1.0, 0.0, 0.0]]),
    "tilt_y_90": np.array([[-1.0, 0.0, 0.0],
                           [0.0, 0.0, 1.0],
                           [0.0, 1.0, 0.0]]),
    "flip": np.array([[1.0, 0.0, 0.0],
                      [0.0, -1.0, 0.0],
                      [0.0, 0.0, -1.0]]),
}

# Sense of azimuthal spin about the image of the polar axis after each
# reorientation, relative to the original spin.
SPIN_SIGN = {"identity": 1.0, "tilt_x_90": -1.0, "tilt_y_90": 1.0,
             "flip": -1.0}


@dataclass(frozen=True)
class Transformation:
    """One alignment element: reorientation + uniform scale + duration scale."""

    axis_reorientation: str = "identity"
    scale: float = 1.0
    duration_scale: float = 1.0

    def __post_init__(self):
        if self.axis_reorientation not in REORIENTATIONS:
            raise ValueError(
                f"unknown axis_reorientation {self.axis_reorientation!r}")
        if self.scale <= 0 or self.duration_scale <= 0:
            raise ValueError("scale and duration_scale must be positive")

    @property
    def matrix(self) -> np.ndarray:
        return _MATRICES[self.axis_reorientation]

    @property
    def spin_sign(self) -> float:
        return SPIN_SIGN[self.axis_reorientation]

    def to_dict(self) -> dict:
        return {"axis_reorientation": self.axis_reorientation,
                "scale": self.scale,
                "duration_scale": self.duration_scale}

    @classmethod
    def from_dict(cls, data: dict) -> "Transformation":
        return cls(axis_reorientation=data.get("axis_reorientation",
                                               "identity"),
                   scale=float(data.get("scale", 1.0)),
                   duration_scale=float(data.get("duration_scale", 1.0)))


IDENTITY = Transformation()


def reorientation_matrix(name: str) -> np.ndarray:
    return _MATRICES[name]
