"""Spherical Bessel / spherical harmonic helpers.

Thin wrappers over scipy.special with the conventions used by the mode
solver pinned down in one place:

- complex Y_lm with Condon-Shortley phase (scipy's sph_harm_y);
- real-combination harmonics for exposing real-valued mode fields,
    m = 0:  Y_l0
    m > 0:  sqrt(2) (-1)^m Re Y_lm
    m < 0:  sqrt(2) (-1)^m Im Y_l|m|
  which stay orthonormal on the sphere;
- theta derivatives via the ladder identity
    dY_lm/dtheta = m cot(theta) Y_lm + sqrt((l-m)(l+m+1)) e^{-i phi} Y_{l,m+1},
  with theta clamped 1e-9 away from the poles (the m != 0 fields vanish
  there; the m = 0 branch needs no cot term at all).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import spherical_jn, sph_harm_y

_POLE_CLAMP = 1e-9


def sph_jl(l: int, x):
    """Spherical Bessel j_l(x), vectorized."""
    return spherical_jn(l, x)


def sph_jl_prime(l: int, x):
    """d/dx j_l(x), vectorized."""
    return spherical_jn(l, x, derivative=True)


def ylm(l: int, m: int, theta, phi):
    """Complex spherical harmonic Y_lm(theta, phi)."""
    if abs(m) > l:
        return np.zeros(np.broadcast(theta, phi).shape, dtype=complex) \
            if np.ndim(theta) or np.ndim(phi) else 0.0j
    return sph_harm_y(l, m, theta, phi)


def ylm_dtheta(l: int, m: int, theta, phi):
    """d/dtheta of the complex Y_lm."""
    theta = np.clip(theta, _POLE_CLAMP, math.pi - _POLE_CLAMP)
    ladder = math.sqrt(max((l - m) * (l + m + 1), 0))
    out = ladder * np.exp(-1j * np.asarray(phi)) * ylm(l, m + 1, theta, phi)
    if m != 0:
        out = out + m * (np.cos(theta) / np.sin(theta)) * ylm(l, m, theta, phi)
    return out


def _real_combination(m: int, complex_value):
    if m == 0:
        return np.real(complex_value)
    sign = -1.0 if (abs(m) % 2) else 1.0
    if m > 0:
        return math.sqrt(2.0) * sign * np.real(complex_value)
    return math.sqrt(2.0) * sign * np.imag(complex_value)


def real_ylm(l: int, m: int, theta, phi):
    """Real-combination spherical harmonic (orthonormal)."""
    return _real_combination(m, ylm(l, abs(m), theta, phi))


def real_ylm_dtheta(l: int, m: int, theta, phi):
    """d/dtheta of the real-combination harmonic."""
    return _real_combination(m, ylm_dtheta(l, abs(m), theta, phi))


def real_ylm_dphi_over_sin(l: int, m: int, theta, phi):
    """(1/sin theta) d/dphi of the real-combination harmonic.

    For the complex harmonic this is i m Y_lm / sin(theta); the real
    combination swaps Re/Im with the sign bookkeeping of d/dphi.
    """
    if m == 0:
        return np.zeros_like(np.broadcast_arrays(
            np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))[0])
    theta = np.clip(theta, _POLE_CLAMP, math.pi - _POLE_CLAMP)
    mm = abs(m)
    y = ylm(l, mm, theta, phi)
    sign = -1.0 if (mm % 2) else 1.0
    if m > 0:
        # d/dphi of sqrt2*sign*Re(Y) = -mm*sqrt2*sign*Im(Y)
        val = -mm * math.sqrt(2.0) * sign * np.imag(y)
    else:
        # d/dphi of sqrt2*sign*Im(Y) = mm*sqrt2*sign*Re(Y)
        val = mm * math.sqrt(2.0) * sign * np.real(y)
    return val / np.sin(theta)
