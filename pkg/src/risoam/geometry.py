"""Element-level geometry: rotated UCAs and rectangular RIS grids."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class EmptyGeometryError(ValueError):
    """An array or RIS spec describes zero elements."""


def rotation_matrix_x(angle: float) -> np.ndarray:
    """Right-handed rotation about the x-axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_matrix_y(angle: float) -> np.ndarray:
    """Right-handed rotation about the y-axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True)
class Attitude:
    """Orientation built as rotation about x followed by rotation about y."""

    rot_x: float = 0.0
    rot_y: float = 0.0

    def matrix(self) -> np.ndarray:
        return rotation_matrix_y(self.rot_y) @ rotation_matrix_x(self.rot_x)


@dataclass(frozen=True)
class UcaSpec:
    """Uniform circular array: `count` elements on a circle of `radius` around `center`."""

    center: tuple[float, float, float]
    radius: float
    count: int
    initial_azimuth: float = 0.0
    attitude: Attitude = field(default_factory=Attitude)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"UCA radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class RisSpec:
    """Rectangular RIS grid centered on `center`, spanning the local y'/z' axes."""

    center: tuple[float, float, float]
    count_y: int
    count_z: int
    spacing_y: float
    spacing_z: float
    attitude: Attitude = field(default_factory=Attitude)

    @property
    def count(self) -> int:
        return self.count_y * self.count_z


def uca_element_positions(spec: UcaSpec) -> np.ndarray:
    """(count, 3) element coordinates: center + R [r cos(phi_n), r sin(phi_n), 0]^T."""
    if spec.count < 1:
        raise EmptyGeometryError(f"UCA needs at least one element, got count={spec.count}")
    phi = 2.0 * np.pi * np.arange(spec.count) / spec.count + spec.initial_azimuth
    local = np.stack(
        [spec.radius * np.cos(phi), spec.radius * np.sin(phi), np.zeros_like(phi)]
    )
    return np.asarray(spec.center, dtype=float) + (spec.attitude.matrix() @ local).T


def eve_center(distance: float, theta: float, varphi: float) -> np.ndarray:
    """Eavesdropper center at range `distance`, polar angle `varphi` from z, azimuth `theta`."""
    if distance <= 0:
        raise ValueError(f"distance must be positive, got {distance}")
    sv = np.sin(varphi)
    return distance * np.array([sv * np.cos(theta), sv * np.sin(theta), np.cos(varphi)])


def ris_element_positions(spec: RisSpec) -> np.ndarray:
    """(Q, 3) grid coordinates; grid index runs z-major (y varies fastest)."""
    if spec.count_y < 1 or spec.count_z < 1:
        raise EmptyGeometryError(
            f"RIS needs a nonempty grid, got {spec.count_y} x {spec.count_z}"
        )
    off_y = spec.spacing_y * (np.arange(1, spec.count_y + 1) - (1 + spec.count_y) / 2.0)
    off_z = spec.spacing_z * (np.arange(1, spec.count_z + 1) - (1 + spec.count_z) / 2.0)
    oz, oy = np.meshgrid(off_z, off_y, indexing="ij")
    local = np.stack([np.zeros(spec.count), oy.ravel(), oz.ravel()])
    return np.asarray(spec.center, dtype=float) + (spec.attitude.matrix() @ local).T
