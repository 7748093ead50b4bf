"""Material constants and particle geometry.

Every frequency-like quantity in this package is angular (rad/s). Quantities
quoted in ordinary cycles enter through the CLI / config layer and are
converted exactly once at that boundary; `to_angular` / `to_ordinary` are the
round-trip helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import NonPositiveDimension

TWO_PI = 2.0 * math.pi


def to_angular(f_ordinary: float) -> float:
    """Ordinary frequency (Hz or any 1/s rate) -> angular (rad/s)."""
    return TWO_PI * f_ordinary


def to_ordinary(omega_angular: float) -> float:
    """Angular frequency (rad/s) -> ordinary (1/s)."""
    return omega_angular / TWO_PI


@dataclass(frozen=True)
class MaterialModel:
    zeta: float      # deformation-potential coupling of the orbital doublet, rad/s
    beta: float      # relative axial (e_zz) deformation response, dimensionless
    rho: float       # mass density, kg/m^3
    v_t: float       # transverse sound velocity, m/s
    v_l: float       # longitudinal sound velocity, m/s
    c_pbc: float     # effective sound velocity for the periodic estimate, m/s
    gamma_e: float   # excited-state radiative decay rate, rad/s
    gamma_nd: float  # decay rate inside the nanoparticle, rad/s
    lambda0: float   # zero-phonon-line wavelength, m
    n_refr: float    # refractive index at lambda0
    xi0: float       # radiative branching weight into the ZPL, dimensionless
    delta_es: float  # splitting to the second excited orbital branch, rad/s

    def __post_init__(self):
        positive = {
            "zeta": self.zeta, "beta": self.beta, "rho": self.rho,
            "v_t": self.v_t, "v_l": self.v_l, "c_pbc": self.c_pbc,
            "gamma_e": self.gamma_e, "gamma_nd": self.gamma_nd,
            "lambda0": self.lambda0, "delta_es": self.delta_es,
        }
        for name, value in positive.items():
            if not value > 0.0:
                raise NonPositiveDimension(f"{name} must be positive, got {value!r}")
        if not 0.0 < self.xi0 <= 1.0:
            raise NonPositiveDimension(f"xi0 must lie in (0, 1], got {self.xi0!r}")
        if not self.n_refr >= 1.0:
            raise NonPositiveDimension(f"n_refr must be >= 1, got {self.n_refr!r}")
        if not self.v_l > self.v_t:
            raise NonPositiveDimension(
                f"v_l must exceed v_t, got v_l={self.v_l!r}, v_t={self.v_t!r}")

    def with_overrides(self, **kw) -> "MaterialModel":
        """Copy with selected fields replaced (used by the config layer)."""
        return replace(self, **kw)


def diamond_default() -> MaterialModel:
    """Diamond host with an NV center, in SI / angular units."""
    return MaterialModel(
        zeta=TWO_PI * 610e12,
        beta=1.0,
        rho=3512.0,
        v_t=1.283e4,
        v_l=1.831e4,
        c_pbc=1.2e4,
        gamma_e=TWO_PI * 15e6,
        gamma_nd=TWO_PI * 7.5e6,
        lambda0=637e-9,
        n_refr=2.4,
        xi0=0.0309,
        delta_es=TWO_PI * 4e9,
    )


@dataclass(frozen=True)
class Geometry:
    shape: str                              # 'sphere' or 'box'
    radius: float | None                    # m, sphere only
    edge_lengths: tuple[float, ...] | None  # m, box only
    volume: float                           # m^3
    mass: float                             # kg

    @property
    def diameter(self) -> float:
        if self.shape != "sphere":
            raise AttributeError("diameter is defined for spheres only")
        return 2.0 * self.radius


def make_geometry(shape: str, dimensions, material: MaterialModel) -> Geometry:
    """Build a particle geometry; mass = rho * V.

    dimensions: (radius,) for a sphere, (lx, ly, lz) for a box, meters.
    """
    dims = tuple(float(d) for d in dimensions)
    if any(not d > 0.0 for d in dims):
        raise NonPositiveDimension(f"dimensions must be positive, got {dims!r}")
    if shape == "sphere":
        if len(dims) != 1:
            raise NonPositiveDimension(
                f"sphere takes a single radius, got {len(dims)} dimensions")
        radius = dims[0]
        volume = 4.0 / 3.0 * math.pi * radius ** 3
        return Geometry("sphere", radius, None, volume, material.rho * volume)
    if shape == "box":
        if len(dims) != 3:
            raise NonPositiveDimension(
                f"box takes three edge lengths, got {len(dims)}")
        volume = dims[0] * dims[1] * dims[2]
        return Geometry("box", None, dims, volume, material.rho * volume)
    raise NonPositiveDimension(f"unknown shape {shape!r} (sphere|box)")
