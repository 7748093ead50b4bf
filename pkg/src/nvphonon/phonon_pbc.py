"""Lowest acoustic mode under periodic boundary conditions.

The particle is treated as one repeat cell of length l along the propagation
direction (l = diameter for a sphere, the matching edge for a box). Only the
longitudinal branch (polarization parallel to k) is modeled:

    k = 2*pi / l,   nu = c * k,   eta = (zeta / c) * sqrt(hbar / (2 M nu))

which follows from eta = zeta * (k / nu) * sqrt(hbar / (2 M nu)) with the
linear dispersion nu = c k. eta scales as sqrt(l / V): 1/d for spheres,
1/sqrt(R) for a slab of fixed thickness and area ~ R^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .errors import NonPositiveDimension
from .material import Geometry, MaterialModel


@dataclass(frozen=True)
class PbcMode:
    k: float                            # wavenumber, rad/m
    direction: tuple[float, float, float]  # unit propagation/polarization axis
    nu: float                           # angular frequency, rad/s
    eta: float                          # dimensionless coupling

    def __post_init__(self):
        if not self.eta > 0.0:
            raise NonPositiveDimension(f"eta must be positive, got {self.eta!r}")


def _unit(direction) -> tuple[float, float, float]:
    d = np.asarray(direction, dtype=float)
    n = float(np.linalg.norm(d))
    if n == 0.0:
        raise NonPositiveDimension("direction must be a nonzero vector")
    return tuple(d / n)


def _repeat_length(geometry: Geometry, direction) -> float:
    if geometry.shape == "sphere":
        return 2.0 * geometry.radius
    # box: the repeat length is the edge along the (axis-aligned) direction
    d = np.asarray(_unit(direction))
    axis = int(np.argmax(np.abs(d)))
    if abs(abs(d[axis]) - 1.0) > 1e-12:
        raise NonPositiveDimension(
            f"box modes need an axis-aligned direction, got {tuple(d)!r}")
    return geometry.edge_lengths[axis]


def eta_general_shape(geometry: Geometry, direction, material: MaterialModel) -> PbcMode:
    """Lowest longitudinal mode along `direction` for any supported shape."""
    unit = _unit(direction)
    length = _repeat_length(geometry, direction)
    k = 2.0 * math.pi / length
    nu = material.c_pbc * k
    eta = (material.zeta / material.c_pbc) * math.sqrt(
        hbar / (2.0 * geometry.mass * nu))
    return PbcMode(k=k, direction=unit, nu=nu, eta=eta)


def lowest_mode(geometry: Geometry, material: MaterialModel,
                direction=(1.0, 0.0, 0.0)) -> PbcMode:
    """Lowest mode of the particle; for a sphere the repeat length is the
    diameter independent of direction."""
    return eta_general_shape(geometry, direction, material)
