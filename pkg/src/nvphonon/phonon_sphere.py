"""Free elastic-sphere eigenmodes (torsional and spheroidal families).

Displacement ansatz, with psi_x = j_l(x r) Y_lm(theta, phi) and each partial
wave normalized by its own wavenumber:

    u_tor = N curl[e_r r psi_k]
    u_sph = N [ p_l grad(psi_h)/h + q_l curl curl(e_r r psi_k)/k ]

where k = chi/R and h = xi/R are the transverse and longitudinal wavenumbers,
nu = v_t k = v_l h, so xi = (v_t/v_l) chi. Traction-free boundary conditions
(sigma_rr = sigma_rtheta = 0 at r = R) give the eigenvalue problems

    torsional:   (l-1) j_l(chi) - chi j_{l+1}(chi) = 0      (l >= 1)
    spheroidal:  det[[alpha_l, beta_l], [gamma_l, delta_l]] = 0   (l >= 1)
                 alpha_0 = 0 with q_0 = 0                    (l = 0)

with the boundary functions

    alpha_l = -(chi^2/xi) j_l(xi) + 2(l+2) j_{l+1}(xi)
    beta_l  = l chi j_l(chi) - 2 l (l+2) j_{l+1}(chi)
    gamma_l = -(chi^2/xi) j_l(xi) + 2(l-1) j_{l-1}(xi)
    delta_l = (l+1) [ 2(l-1) j_{l-1}(chi) - chi j_l(chi) ]

The rows are the two traction conditions up to invertible row mixing, and the
columns follow the per-wavenumber normalization above, so the null vector
(p_l, q_l) feeds the displacement profiles directly. The torsional equation
has no material parameter. Modes are normalized over the particle volume,
int |u|^2 d^3r = 1.

Deformation-potential coupling: the interaction is proportional to div(u),
and only the gradient part of u_sph contributes. With the normalization
above,

    div u_sph = -N p_l h j_l(h r) Y_lm .

The single power of h is tied to the grad(psi_h)/h convention; quoting the
same formula with mixed conventions overstates the coupling by v_l/v_t
(about 1.4 in diamond). See docs/formats.md for the CSV conventions.

Real-valued fields are exposed using the real-combination harmonics
documented in `special`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import hbar
from scipy.integrate import quad
from scipy.optimize import bisect

from .errors import (
    DegenerateNullspace,
    InvalidQuantumNumber,
    NoRootInBracket,
    PointOutsideSphere,
    QuadratureNotConverged,
)
from .material import Geometry, MaterialModel
from .special import (
    real_ylm,
    real_ylm_dphi_over_sin,
    real_ylm_dtheta,
    sph_jl,
    sph_jl_prime,
)

DEFAULT_CHI_MAX = 30.0
_SCAN_STEP = 0.01
_BISECT_XTOL = 1e-13


# ---------------------------------------------------------------- eigenvalues

def torsional_characteristic(l: int, chi):
    return (l - 1) * sph_jl(l, chi) - chi * sph_jl(l + 1, chi)


def spheroidal_rows(l: int, chi, speed_ratio: float):
    """Boundary-condition rows ((alpha, beta), (gamma, delta)); xi = ratio*chi."""
    xi = speed_ratio * chi
    alpha = -(chi ** 2 / xi) * sph_jl(l, xi) + 2 * (l + 2) * sph_jl(l + 1, xi)
    beta = l * chi * sph_jl(l, chi) - 2 * l * (l + 2) * sph_jl(l + 1, chi)
    gamma = -(chi ** 2 / xi) * sph_jl(l, xi) + 2 * (l - 1) * sph_jl(l - 1, xi)
    delta = (l + 1) * (2 * (l - 1) * sph_jl(l - 1, chi) - chi * sph_jl(l, chi))
    return (alpha, beta), (gamma, delta)


def _spheroidal_characteristic(l: int, speed_ratio: float):
    if l == 0:
        def f(chi):
            (alpha, _), _ = spheroidal_rows(0, chi, speed_ratio)
            return alpha
    else:
        def f(chi):
            (alpha, beta), (gamma, delta) = spheroidal_rows(l, chi, speed_ratio)
            return alpha * delta - beta * gamma
    return f


def _scan_roots(f, n_max: int, chi_max: float, what: str) -> list[float]:
    xs = np.arange(_SCAN_STEP, chi_max + _SCAN_STEP / 2, _SCAN_STEP)
    fs = np.array([f(x) for x in xs])
    roots: list[float] = []
    for i in range(len(xs) - 1):
        if len(roots) >= n_max:
            break
        if fs[i] == 0.0:
            roots.append(float(xs[i]))
        elif fs[i] * fs[i + 1] < 0.0:
            roots.append(float(bisect(f, xs[i], xs[i + 1], xtol=_BISECT_XTOL)))
    if len(roots) < n_max:
        raise NoRootInBracket(
            f"{what}: found {len(roots)} roots in (0, {chi_max}], "
            f"need {n_max}; raise chi_max")
    return roots[:n_max]


def torsional_eigenvalues(l: int, n_max: int,
                          chi_max: float = DEFAULT_CHI_MAX) -> list[float]:
    """First n_max torsional eigenvalues chi (material-independent)."""
    if l < 1:
        raise InvalidQuantumNumber("torsional modes require l >= 1")
    if n_max < 1:
        raise InvalidQuantumNumber("n_max must be >= 1")
    return _scan_roots(lambda x: torsional_characteristic(l, x),
                       n_max, chi_max, f"torsional l={l}")


def spheroidal_eigenvalues(l: int, n_max: int, material: MaterialModel,
                           chi_max: float = DEFAULT_CHI_MAX):
    """First n_max spheroidal roots as (chi, xi, p_l, q_l) tuples.

    (p_l, q_l) is the unit null vector of the boundary matrix with p_l >= 0
    (q_l >= 0 where p_l = 0); the field normalization itself lives in the
    mode's norm constant.
    """
    if l < 0:
        raise InvalidQuantumNumber("spheroidal modes require l >= 0")
    if n_max < 1:
        raise InvalidQuantumNumber("n_max must be >= 1")
    ratio = material.v_t / material.v_l
    f = _spheroidal_characteristic(l, ratio)
    chis = _scan_roots(f, n_max, chi_max, f"spheroidal l={l}")
    out = []
    for chi in chis:
        xi = ratio * chi
        if l == 0:
            out.append((chi, xi, 1.0, 0.0))
            continue
        row1, row2 = spheroidal_rows(l, chi, ratio)
        n1 = math.hypot(*row1)
        n2 = math.hypot(*row2)
        scale = max(abs(v) for v in (*row1, *row2))
        if max(n1, n2) < 1e-8 * max(scale, 1.0) or scale == 0.0:
            raise DegenerateNullspace(
                f"spheroidal l={l}, chi={chi:.6f}: boundary matrix has no "
                f"usable row (rank 0); cannot fix (p, q)")
        a, b = row1 if n1 >= n2 else row2
        p, q = b / math.hypot(a, b), -a / math.hypot(a, b)
        if p < 0.0 or (p == 0.0 and q < 0.0):
            p, q = -p, -q
        out.append((chi, xi, p, q))
    return out


# ---------------------------------------------------------------- mode object

@dataclass(frozen=True)
class SphereMode:
    family: str          # 'torsional' | 'spheroidal'
    l: int
    m: int
    n: int               # overtone index, 0-based
    chi_mode: float      # k R
    xi_mode: float | None  # h R, spheroidal only
    nu: float            # angular frequency, rad/s
    p_l: float           # mixing coefficients (torsional: 0)
    q_l: float
    norm: float | None   # N, m^{-3/2}; set by normalize_mode
    radius: float        # particle radius, m

    def __post_init__(self):
        if self.family not in ("torsional", "spheroidal"):
            raise InvalidQuantumNumber(f"unknown family {self.family!r}")
        if self.family == "torsional" and self.l < 1:
            raise InvalidQuantumNumber("torsional modes require l >= 1")
        if abs(self.m) > self.l:
            raise InvalidQuantumNumber(f"|m| <= l violated: m={self.m}, l={self.l}")

    @property
    def k_wavenumber(self) -> float:
        return self.chi_mode / self.radius

    @property
    def h_wavenumber(self) -> float | None:
        if self.xi_mode is None:
            return None
        return self.xi_mode / self.radius


def make_sphere_mode(family: str, l: int, m: int, n: int,
                     geometry: Geometry, material: MaterialModel,
                     chi_max: float = DEFAULT_CHI_MAX) -> SphereMode:
    """Solve, assemble and normalize one sphere mode."""
    if n < 0:
        raise InvalidQuantumNumber("overtone index n must be >= 0")
    radius = geometry.radius
    if family == "torsional":
        chi = torsional_eigenvalues(l, n + 1, chi_max)[n]
        mode = SphereMode(family, l, m, n, chi, None,
                          material.v_t * chi / radius, 0.0, 0.0, None, radius)
    elif family == "spheroidal":
        chi, xi, p, q = spheroidal_eigenvalues(l, n + 1, material, chi_max)[n]
        mode = SphereMode(family, l, m, n, chi, xi,
                          material.v_t * chi / radius, p, q, None, radius)
    else:
        raise InvalidQuantumNumber(f"unknown family {family!r}")
    return normalize_mode(mode, geometry)


# ------------------------------------------------------------- field profile

def _jl_over_x(l: int, x: float) -> float:
    if x < 1e-8:
        return 1.0 / 3.0 if l == 1 else 0.0
    return sph_jl(l, x) / x


def _radial_profiles(mode: SphereMode, r: float) -> tuple[float, float]:
    """Radial coefficients (A, B) of u = N [A Y e_r + B (dY e_th + ... e_ph)]."""
    k = mode.k_wavenumber
    xk = k * r
    if mode.family == "torsional":
        raise ValueError("radial profiles of the spheroidal parametrization")
    h = mode.h_wavenumber
    xh = h * r
    l, p, q = mode.l, mode.p_l, mode.q_l
    if r < 1e-8 * mode.radius:
        if l == 1:
            val = p / 3.0 + q * 2.0 / 3.0
            return val, val
        return 0.0, 0.0
    a = p * sph_jl_prime(l, xh) + q * l * (l + 1) * _jl_over_x(l, xk)
    if l == 0:
        b = 0.0
    else:
        b = p * _jl_over_x(l, xh) \
            + q * (sph_jl(l, xk) + xk * sph_jl_prime(l, xk)) / xk
    return float(a), float(b)


def _spherical_coords(point) -> tuple[float, float, float]:
    x, y, z = (float(v) for v in point)
    r = math.sqrt(x * x + y * y + z * z)
    if r == 0.0:
        return 0.0, 0.0, 0.0
    theta = math.acos(max(-1.0, min(1.0, z / r)))
    phi = math.atan2(y, x)
    return r, theta, phi


def _check_inside(r: float, radius: float):
    if r > radius * (1.0 + 1e-12):
        raise PointOutsideSphere(f"|point| = {r:.3e} m exceeds R = {radius:.3e} m")


def displacement_field(mode: SphereMode, point) -> np.ndarray:
    """Dimensionless mode shape (norm constant excluded) at a Cartesian point.

    Returns the real-combination field as a Cartesian 3-vector; multiply by
    mode.norm for the normalized field.
    """
    r, theta, phi = _spherical_coords(point)
    _check_inside(r, mode.radius)
    y = real_ylm(mode.l, mode.m, theta, phi)
    t = real_ylm_dtheta(mode.l, mode.m, theta, phi)
    pp = real_ylm_dphi_over_sin(mode.l, mode.m, theta, phi)
    if mode.family == "torsional":
        jl = sph_jl(mode.l, mode.k_wavenumber * r)
        u_r, u_th, u_ph = 0.0, jl * pp, -jl * t
    else:
        a, b = _radial_profiles(mode, r)
        u_r, u_th, u_ph = a * y, b * t, b * pp
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    e_r = np.array([st * cp, st * sp, ct])
    e_th = np.array([ct * cp, ct * sp, -st])
    e_ph = np.array([-sp, cp, 0.0])
    return u_r * e_r + u_th * e_th + u_ph * e_ph


def divergence_shape(mode: SphereMode, point) -> float:
    """div u / N at a point: -p h j_l(h r) Y_lm, 0 for torsional."""
    r, theta, phi = _spherical_coords(point)
    _check_inside(r, mode.radius)
    if mode.family == "torsional":
        return 0.0
    h = mode.h_wavenumber
    return float(-mode.p_l * h * sph_jl(mode.l, h * r)
                 * real_ylm(mode.l, mode.m, theta, phi))


# ------------------------------------------------------------- normalization

def _norm_integral(mode: SphereMode, radius: float) -> float:
    l = mode.l
    if mode.family == "torsional":
        k = mode.k_wavenumber

        def integrand(r):
            return l * (l + 1) * sph_jl(l, k * r) ** 2 * r * r
    else:
        def integrand(r):
            a, b = _radial_profiles(mode, r)
            return (a * a + l * (l + 1) * b * b) * r * r

    value, abserr = quad(integrand, 0.0, radius, epsabs=1e-30, epsrel=1e-11,
                         limit=200)
    if not math.isfinite(value) or value <= 0.0 or abserr > 1e-9 * abs(value):
        raise QuadratureNotConverged(
            f"norm integral: value={value!r}, abserr={abserr!r}")
    return value


def normalize_mode(mode: SphereMode, geometry: Geometry) -> SphereMode:
    """Return the mode with N fixed so that int |u|^2 d^3r = 1."""
    if abs(geometry.radius - mode.radius) > 1e-12 * mode.radius:
        raise PointOutsideSphere(
            "geometry radius does not match the radius the mode was solved on")
    integral = _norm_integral(mode, geometry.radius)
    return replace(mode, norm=1.0 / math.sqrt(integral))


# ------------------------------------------------------------------ coupling

def coupling_eta(mode: SphereMode, nv_position, material: MaterialModel,
                 geometry: Geometry) -> float:
    """Dimensionless deformation-potential coupling at an NV site.

    eta = zeta sqrt(hbar / (2 rho nu)) * N * div-shape / nu, zero for
    torsional modes. The sign follows the p_l >= 0 mode-phase convention;
    CSV emitters working on log axes write |eta|.
    """
    r, _, _ = _spherical_coords(nv_position)
    _check_inside(r, geometry.radius)
    if mode.family == "torsional":
        return 0.0
    m = mode if mode.norm is not None else normalize_mode(mode, geometry)
    prefactor = material.zeta * math.sqrt(
        hbar / (2.0 * material.rho * m.nu)) * m.norm
    return float(prefactor * divergence_shape(m, nv_position) / m.nu)


@dataclass(frozen=True)
class CouplingProfile:
    mode: SphereMode
    material: MaterialModel
    geometry: Geometry

    def eta_of_position(self, r: float, theta: float, phi: float) -> float:
        point = (r * math.sin(theta) * math.cos(phi),
                 r * math.sin(theta) * math.sin(phi),
                 r * math.cos(theta))
        return coupling_eta(self.mode, point, self.material, self.geometry)

    __call__ = eta_of_position


def coupling_profile(mode: SphereMode, material: MaterialModel,
                     geometry: Geometry) -> CouplingProfile:
    m = mode if mode.norm is not None else normalize_mode(mode, geometry)
    return CouplingProfile(m, material, geometry)
