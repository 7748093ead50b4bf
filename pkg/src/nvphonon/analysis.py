"""Closed-form gate evolution, figure-of-merit sweeps, closure times."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from .errors import ConfigError, NoAdmissibleM, NoRootInBracket, \
    TruncationTooSmall
from .hilbert import HilbertSpace, two_level_space
from .material import Geometry, MaterialModel, make_geometry
from .phonon_pbc import lowest_mode

TWO_PI = 2.0 * math.pi


# ------------------------------------------------------------ exact solution

@dataclass(frozen=True)
class ExactEvolution:
    """Integrated double-path flip dynamics for two centers on one mode.

    The generator is i(omega_tilde/2) e^{i delta_eps t} a^dag O + h.c. with
    O = sigma_x^1 + sigma_x^2 + 2, which commutes with its conjugate, so the
    propagator factors into a displacement D(alpha(t) O) and a phase
    exp(i Im beta(t) O^2) on each O eigenspace.
    """
    omega_tilde: float
    delta_eps: float

    def __post_init__(self):
        if self.delta_eps == 0.0:
            raise ConfigError("delta_eps must be nonzero for the closed form")

    def alpha(self, t: float) -> complex:
        """Displacement amplitude per unit O eigenvalue."""
        ratio = self.omega_tilde / self.delta_eps
        return -0.5j * ratio * (cmath.exp(1j * self.delta_eps * t) - 1.0)

    def beta(self, t: float) -> complex:
        """Accumulated phase coefficient; Im beta grows linearly at closure."""
        de = self.delta_eps
        osc = (1j / de) * (cmath.exp(1j * de * t) - 1.0)
        return 0.25j * self.omega_tilde ** 2 / de * (t + osc)

    def closure_time(self, m: int) -> float:
        if m < 1:
            raise ConfigError(f"closure index must be >= 1, got {m}")
        return TWO_PI * m / abs(self.delta_eps)


def _displacement(z: complex, fock_dim: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, fock_dim, dtype=float)), k=1)
    return expm(z * a.conj().T - np.conjugate(z) * a)


def exact_unitary(omega_tilde: float, delta_eps: float, t: float,
                  hilbert: HilbertSpace | None = None):
    """Closed-form propagator of the compensated double-path flip term.

    Returns (alpha, beta, U) with U dense on the 2-qubit x Fock space. The
    O eigenvalues are 0, 2, 4 (sigma_x sums shifted by the identity part),
    so the largest displacement is 4 alpha.
    """
    if hilbert is None:
        hilbert = two_level_space(n_centers=2)
    if hilbert.n_centers != 2 or hilbert.nv_levels != 2:
        raise ConfigError("closed form lives on two qubit centers")
    ev = ExactEvolution(omega_tilde, delta_eps)
    alpha, beta = ev.alpha(t), ev.beta(t)

    lam_max = 4.0
    # worst case during the evolution, not just at t: |alpha| <= ratio
    reach = abs(omega_tilde / delta_eps) * lam_max
    if reach ** 2 > 0.25 * hilbert.n_max:
        raise TruncationTooSmall(
            f"peak displacement {reach:.3f} needs fock_dim well above "
            f"{hilbert.fock_dim}")

    eigvals = np.array([1.0, -1.0])
    eigvecs = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)

    dim = hilbert.dim
    u = np.zeros((dim, dim), dtype=complex)
    for i1, s1 in enumerate(eigvals):
        for i2, s2 in enumerate(eigvals):
            lam = s1 + s2 + 2.0
            block = _displacement(lam * alpha, hilbert.fock_dim)
            block = block * cmath.exp(1j * beta.imag * lam ** 2)
            v1 = eigvecs[:, i1]
            v2 = eigvecs[:, i2]
            proj = np.kron(np.outer(v1, v1), np.outer(v2, v2))
            u += np.kron(proj, block)
    return alpha, beta, u


def factor_local_sx(u: np.ndarray, rates, t: float,
                    hilbert: HilbertSpace) -> np.ndarray:
    """Strip per-center sigma_x windings exp(-i rate_k t sigma_x / 2) off U."""
    out = np.asarray(u, dtype=complex)
    for k, rate in enumerate(rates):
        out = out @ expm(0.5j * rate * t * hilbert.sigma_x(k))
    return out


def unitary_fidelity(u: np.ndarray, v: np.ndarray, keep=None) -> float:
    """Global-phase-insensitive operator fidelity |tr(U^dag V)| / dim.

    keep restricts both operators to the given flat indices first; use it to
    hold a guard band against the Fock edge, where a time-ordered
    integration and the closed form legitimately disagree.
    """
    u = np.asarray(u)
    if u.shape != np.shape(v):
        raise ConfigError(f"operator shapes differ: {u.shape} vs {np.shape(v)}")
    if keep is not None:
        keep = np.asarray(keep, dtype=int)
        u = u[np.ix_(keep, keep)]
        v = np.asarray(v)[np.ix_(keep, keep)]
    return float(abs(np.trace(u.conj().T @ v)) / u.shape[0])


# ------------------------------------------------------------ figure of merit

@dataclass(frozen=True)
class SweepPoint:
    diameter: float        # m
    kappa1: float
    kappa2: float
    eta: float
    nu: float              # rad/s
    omega2: float          # rad/s
    omega_gate: float      # rad/s
    gamma_eff: float       # rad/s
    ratio: float           # omega_gate / gamma_eff


def _raman_bracket(eps: float, delta_es: float | None) -> float:
    """Sum of the two Raman denominators, eps1 = eps2 = eps.

    With the neighbouring excited branch included the two contributions
    subtract, shifted by the branch splitting.
    """
    bracket = 2.0 / eps
    if delta_es is not None:
        bracket -= 2.0 / (eps + delta_es)
    return bracket


def _merit_point(diameter: float, kappa1: float, kappa2: float,
                 material: MaterialModel, gamma: float,
                 delta_es: float | None) -> SweepPoint:
    geometry = make_geometry("sphere", (0.5 * diameter,), material)
    mode = lowest_mode(geometry, material)
    omega2 = kappa1 * mode.nu
    eps = mode.eta * omega2 / kappa1
    omega_tilde = 0.25 * (mode.eta * omega2) ** 2 * _raman_bracket(
        eps, delta_es)
    omega_gate = kappa2 * omega_tilde
    gamma_eff = kappa1 ** 2 * gamma
    return SweepPoint(
        diameter=diameter, kappa1=kappa1, kappa2=kappa2, eta=mode.eta,
        nu=mode.nu, omega2=omega2, omega_gate=omega_gate,
        gamma_eff=gamma_eff, ratio=omega_gate / gamma_eff)


def gate_figure_of_merit(diameters, kappa1s, kappa2s,
                         material: MaterialModel, *,
                         second_state: bool = True,
                         gamma: float | None = None) -> list[SweepPoint]:
    """Gate frequency vs decay across sizes and off-resonance choices.

    Conventions: omega2 = kappa1 nu, omega1 = eta omega2, the detunings
    eps1 = eps2 = eta omega2 / kappa1. With second_state the contribution
    of the neighbouring excited branch (splitting material.delta_es) is
    subtracted from the Raman amplitude.
    """
    if gamma is None:
        gamma = material.gamma_e
    des = material.delta_es if second_state else None
    return [_merit_point(d, k1, k2, material, gamma, des)
            for d in diameters for k1 in kappa1s for k2 in kappa2s]


def crossing_diameter(kappa2: float, material: MaterialModel, *,
                      second_state: bool = True, gamma: float | None = None,
                      bracket=(5e-9, 200e-9)) -> float:
    """Diameter at which omega_gate falls to gamma_eff (ratio = 1).

    The ratio is independent of kappa1, so any value serves; bisection runs
    on log(ratio), which is smooth and monotone over the bracket.
    """
    if gamma is None:
        gamma = material.gamma_e
    des = material.delta_es if second_state else None

    def log_ratio(d):
        return math.log(_merit_point(d, 0.05, kappa2, material, gamma,
                                     des).ratio)

    lo, hi = bracket
    if log_ratio(lo) * log_ratio(hi) > 0.0:
        raise NoRootInBracket(
            f"ratio does not cross 1 for d in [{lo:.1e}, {hi:.1e}] m")
    return float(brentq(log_ratio, lo, hi, xtol=1e-14))


# --------------------------------------------------------- direct comparison

@dataclass(frozen=True)
class DirectGateReport:
    ratio_raman: float     # omega_gate / gamma_eff of the Raman scheme
    ratio_direct: float    # gate / decay on the bare ground-excited gate
    quotient: float        # raman advantage factor


def direct_gate_comparison(kappa1: float, kappa2: float, eta: float,
                           omega: float, gamma: float) -> DirectGateReport:
    """Raman-induced scheme vs a gate run directly on the optical transition.

    Both schemes share the drive amplitude limit omega; the Raman ratio
    gains the kappa2/kappa1^2 quotient because its decay is suppressed by
    the excited-state occupation kappa1^2.
    """
    if gamma <= 0.0:
        raise ConfigError(f"gamma must be positive, got {gamma!r}")
    ratio_raman = (kappa2 / kappa1) * eta * omega / gamma
    ratio_direct = kappa1 * eta * omega / gamma
    return DirectGateReport(ratio_raman=ratio_raman,
                            ratio_direct=ratio_direct,
                            quotient=ratio_raman / ratio_direct)


# -------------------------------------------------------------- closure time

@dataclass(frozen=True)
class ClosureTime:
    m: int
    t_gate: float          # s
    kappa2: float


def closure_times(delta_eps: float, theta: float, *,
                  path: str = "double_path", echo: bool = True,
                  mw: bool = False, m: int | None = None,
                  kappa2_max: float = 1.0) -> ClosureTime:
    """Smallest phonon-loop closure that realizes a theta rotation.

    t_gate = 2 pi m / delta_eps; the implied off-resonance follows from
    theta = omega_gate t_gate, i.e. kappa2 = sqrt(theta / (2 pi m)) for the
    Raman gate and kappa2 = (8/3) sqrt(theta / (2 pi m)) for the
    microwave-assisted variant. With echo the refocusing pulse at t_gate/2
    must itself land on a closure, so m must be even.
    """
    if not 0.0 < theta <= math.pi:
        raise ConfigError(f"rotation angle must be in (0, pi], got {theta!r}")
    if path not in ("single_path", "double_path"):
        raise ConfigError(f"unknown path {path!r}")
    if delta_eps == 0.0:
        raise ConfigError("delta_eps must be nonzero")

    def implied_kappa2(mm: int) -> float:
        if mw:
            return (8.0 / 3.0) * math.sqrt(theta / (TWO_PI * mm))
        return math.sqrt(theta / (TWO_PI * mm))

    step = 2 if echo else 1
    candidates = [m] if m is not None else range(step, 10001, step)
    for mm in candidates:
        if echo and mm % 2:
            raise NoAdmissibleM(
                f"echo at t_gate/2 needs an even closure index, got {mm}")
        k2 = implied_kappa2(mm)
        if k2 <= kappa2_max:
            return ClosureTime(m=mm, t_gate=TWO_PI * mm / abs(delta_eps),
                               kappa2=k2)
    raise NoAdmissibleM(
        f"no closure index below 10000 keeps kappa2 <= {kappa2_max}")
