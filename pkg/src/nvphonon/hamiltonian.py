"""Strain matrices, drive Hamiltonians, and effective gate models.

Conventions used throughout:

* angular frequencies (rad/s) everywhere;
* the optical drive tones are parametrized by detunings eps1 (carrier branch)
  and eps2 (sideband branch) below the excited state, with the mode at nu;
* kappa1 = omega1/eps1 measures the excited-state admixture, kappa2 =
  omega_tilde/delta_eps the virtual-phonon admixture of the second
  elimination;
* "double_path" drives both ground states symmetrically (the echo-friendly
  sigma_x sigma_x gate), "single_path" drives only one leg;
* the phonon-number dependence of the light shifts is kept as an operator:
  delta = delta_scalar + delta_n * n_hat.

The effective tiers implement the eliminated models as displayed (tier I:
excited state removed; tier II: virtual phonon removed), not re-derived;
cross-checks against the full dynamics live in the tests.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, physical_constants
from scipy.linalg import expm

from .errors import (
    ConfigError,
    DressedResonance,
    HierarchyWarning,
    InvalidQuantumNumber,
    PerturbationInvalid,
    PerturbationWarning,
    QuasiResonantDoubleExcitation,
    TruncationTooSmall,
    WeakDriving,
    ZeroSeparation,
)
from .hilbert import (
    TRIPLET_LABELS,
    HilbertSpace,
    OperatorMatrix,
    SpaceDescriptor,
    three_level_space,
    triplet_space,
    two_level_space,
)
from .material import TWO_PI, MaterialModel

GYROMAGNETIC_EL = physical_constants["electron gyromag. ratio"][0]  # rad/s/T
MU0_OVER_4PI = 1e-7  # T^2 m^3 / J

GROUND_TRIPLET_LABELS = ("g+1", "g0", "g-1")
EXCITED_LABELS = ("A1", "A2", "Ex", "Ey", "E1", "E2")


# ------------------------------------------------------------------- strain

@dataclass(frozen=True)
class StrainTensor:
    """Displacement-gradient tensor e_{mu nu} = d u_mu / d r_nu."""
    e: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float)
        if e.shape != (3, 3) or not np.all(np.isfinite(e)):
            raise ConfigError(f"strain tensor must be finite 3x3, got {self.e!r}")
        e = e.copy()
        e.flags.writeable = False
        object.__setattr__(self, "e", e)

    @property
    def epsilon(self) -> np.ndarray:
        """Symmetrized strain (e + e^T)/2."""
        return 0.5 * (self.e + self.e.T)


def strain_deltas(strain: StrainTensor, material: MaterialModel):
    """(delta1, delta2, delta3, delta4) strain-coupling energies, rad/s."""
    e = strain.e
    z = material.zeta
    d1 = -z * (e[0, 0] + e[1, 1])
    d2 = -z * (e[0, 0] - e[1, 1])
    d3 = -z * (e[0, 1] + e[1, 0])
    d4 = -8.0 * material.beta ** 2 * z * e[2, 2]
    return d1, d2, d3, d4


def strain_gs(strain: StrainTensor, material: MaterialModel) -> OperatorMatrix:
    """Common shift 2*delta1 of the ground-state spin triplet."""
    d1, _, _, _ = strain_deltas(strain, material)
    space = SpaceDescriptor((3,), (GROUND_TRIPLET_LABELS,))
    return OperatorMatrix(space, 2.0 * d1 * np.eye(3))


def strain_es(strain: StrainTensor, material: MaterialModel) -> OperatorMatrix:
    """Excited-state sextet in the basis (A1, A2, Ex, Ey, E1, E2)."""
    d1, d2, d3, d4 = strain_deltas(strain, material)
    d0 = d1 + d4
    h = np.array([
        [d0, 0, 0, 0, d2, -1j * d3],
        [0, d0, 0, 0, 1j * d3, -d2],
        [0, 0, d0 + d2, d3, 0, 0],
        [0, 0, d3, d0 - d2, 0, 0],
        [d2, -1j * d3, 0, 0, d0, 0],
        [1j * d3, -d2, 0, 0, 0, d0],
    ], dtype=complex)
    space = SpaceDescriptor((6,), (EXCITED_LABELS,))
    return OperatorMatrix(space, h)


# -------------------------------------------------------------- drive config

@dataclass(frozen=True)
class DriveConfig:
    """Two-tone Raman drive of one or two NV centers sharing a mode."""
    omega1: float            # carrier-branch Rabi frequency, rad/s
    omega2: float            # sideband-branch Rabi frequency, rad/s
    eps1: float              # carrier detuning, rad/s
    eps2: float              # sideband detuning, rad/s
    nu: float                # mode frequency, rad/s
    eta: tuple = (0.0,)      # per-NV coupling, dimensionless
    path: str = "double_path"
    compensate_eta2: bool = True
    omega_mw: float = 0.0    # microwave Rabi frequency, rad/s

    def __post_init__(self):
        if isinstance(self.eta, (int, float)):
            object.__setattr__(self, "eta", (float(self.eta),))
        else:
            object.__setattr__(self, "eta", tuple(float(v) for v in self.eta))
        if len(self.eta) not in (1, 2):
            raise ConfigError(f"eta must cover 1 or 2 centers, got {self.eta!r}")
        if self.path not in ("single_path", "double_path"):
            raise ConfigError(f"unknown path {self.path!r}")
        for name in ("eps1", "eps2", "nu"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive")
        for name in ("omega1", "omega2", "omega_mw"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be non-negative")
        self._hierarchy_warnings()

    def _hierarchy_warnings(self):
        if self.omega1 > 0 and self.eps1 < 5.0 * self.omega1:
            warnings.warn("eps1 is not large against omega1; excited-state "
                          "elimination is marginal", HierarchyWarning,
                          stacklevel=3)
        sideband = max(self.eta) * self.omega2
        if sideband > 0 and self.eps2 < 5.0 * sideband:
            warnings.warn("eps2 is not large against eta*omega2; excited-state "
                          "elimination is marginal", HierarchyWarning,
                          stacklevel=3)
        if max(self.eps1, self.eps2) > self.nu / 5.0:
            warnings.warn("detunings are not small against the mode frequency",
                          HierarchyWarning, stacklevel=3)
        if self.omega1 > 0 and self.omega2 > 0:
            for k, eta_k in enumerate(self.eta):
                target = eta_k * self.omega2
                if target > 0 and abs(self.omega1 - target) > 0.05 * max(
                        self.omega1, target):
                    warnings.warn(
                        f"omega1 deviates from eta*omega2 by >5% on center {k}; "
                        "the two Raman paths are unbalanced",
                        HierarchyWarning, stacklevel=3)

    @property
    def kappa1(self) -> float:
        return self.omega1 / self.eps1

    @property
    def chi_shift(self) -> float:
        return 0.25 if self.path == "double_path" else 0.125

    @property
    def delta_eps(self) -> float:
        """eps1 - eps2 plus the coupling-induced shift of the sideband leg."""
        return (self.eps1 - self.eps2
                + self.chi_shift * self.eta[0] ** 2 * self.omega2 ** 2 / self.eps2)

    def omega_tilde(self, k: int = 0) -> float:
        """Raman flip-flop amplitude for center k (no second-state term)."""
        return (0.25 * self.omega1 * self.eta[k] * self.omega2
                * (self.eps1 + self.eps2) / (self.eps1 * self.eps2))

    @property
    def kappa2(self) -> float:
        d = self.delta_eps
        if d == 0.0:
            return math.inf
        return abs(self.omega_tilde(0) / d)


# ------------------------------------------------------------ effective model

@dataclass(frozen=True)
class DipolarBlock:
    j_opt: float
    j_mag: float
    j_opt_tilde: float
    omega_a: tuple


@dataclass(frozen=True)
class EffectiveModel:
    """Coefficients of the eliminated models (tier I / II)."""
    tier: str
    path: str
    nu: float
    omega_tilde: tuple          # per covered NV, rad/s
    delta_scalar: tuple         # per NV scalar part of delta, rad/s
    delta_n: tuple              # per NV coefficient of n_hat in delta, rad/s
    delta_eps: float
    kappa1: float
    kappa2: float | None = None
    omega_gate: float | None = None
    dipolar: DipolarBlock | None = None

    def __post_init__(self):
        if self.tier not in ("I", "II"):
            raise ConfigError(f"unknown tier {self.tier!r}")
        if self.tier == "II":
            if self.omega_gate is None or self.kappa2 is None:
                raise ConfigError("tier II requires omega_gate and kappa2")
            if self.dipolar is None and len(self.omega_tilde) == 2:
                expected = (self.omega_tilde[0] * self.omega_tilde[1]
                            / self.delta_eps)
                if abs(self.omega_gate - expected) > 1e-12 * max(
                        abs(expected), 1e-300):
                    raise ConfigError(
                        "omega_gate inconsistent with omega_tilde^2/delta_eps")

    def delta(self, k: int, n_mean: float = 0.0) -> float:
        """Scalar snapshot of delta_k at a declared mean occupation."""
        return self.delta_scalar[k] + self.delta_n[k] * n_mean


def _validity_ratios(drive: DriveConfig, ks) -> list:
    r = [abs(drive.omega1 / drive.eps1),
         abs(drive.omega2 / (drive.nu + drive.eps2))]
    for k in ks:
        r.append(abs(drive.eta[k] * drive.omega2 / drive.eps2))
    return r


def _check_perturbative(drive: DriveConfig, ks):
    ratios = _validity_ratios(drive, ks)
    if any(r >= 1.0 for r in ratios):
        raise PerturbationInvalid(
            f"elimination ratios {ratios} contain a value >= 1")
    if any(r > 0.2 for r in ratios):
        warnings.warn(f"elimination ratios {ratios} exceed 0.2; effective "
                      "models are rough", PerturbationWarning, stacklevel=3)


def _second_state_bracket(drive: DriveConfig, second_state: str,
                          delta_es: float | None) -> float:
    e1, e2 = drive.eps1, drive.eps2
    bracket = (e1 + e2) / (e1 * e2)
    if second_state == "off":
        return bracket
    if delta_es is None:
        raise ConfigError("second_state requires delta_es",
                          key="second_state")
    other = (e1 + e2 + 2.0 * delta_es) / ((e1 + delta_es) * (e2 + delta_es))
    if second_state == "subtract":
        return bracket - other
    if second_state == "add":
        return bracket + other
    raise ConfigError(f"unknown second_state {second_state!r}")


def effective_I(drive: DriveConfig, hilbert: HilbertSpace | None = None, *,
                k: int | None = None, second_state: str = "off",
                delta_es: float | None = None):
    """Excited state eliminated: per-NV light shifts plus phonon sideband.

    Returns (EffectiveModel, OperatorMatrix) on {g+1, g-1} (x N) tensor Fock.
    The delta coefficients keep their n_hat part separate; compensate_eta2
    on the drive removes the eta^2 pieces (the compensation drive is assumed
    perfect) while delta_eps always keeps the physical shift.
    """
    ks = list(range(len(drive.eta))) if k is None else [k]
    _check_perturbative(drive, ks)
    bracket = _second_state_bracket(drive, second_state, delta_es)

    o1, o2 = drive.omega1, drive.omega2
    e1, e2, nu = drive.eps1, drive.eps2, drive.nu
    omega_tilde = tuple(0.25 * o1 * drive.eta[kk] * o2 * bracket for kk in ks)

    d_scalar, d_n = [], []
    for kk in ks:
        eta2 = drive.eta[kk] ** 2
        stark_e = o1 ** 2 / e1
        stark_c = o2 ** 2 / (nu + e2)
        stark_s = eta2 * o2 ** 2 / e2
        if drive.compensate_eta2:
            stark_s = 0.0
        if drive.path == "double_path":
            d_scalar.append(0.5 * (stark_e + stark_s + stark_c))
            d_n.append(0.5 * stark_s)
        else:
            d_scalar.append(0.25 * (stark_e - stark_s - stark_c))
            d_n.append(-0.25 * stark_s)
    model = EffectiveModel(
        tier="I", path=drive.path, nu=nu,
        omega_tilde=omega_tilde,
        delta_scalar=tuple(d_scalar), delta_n=tuple(d_n),
        delta_eps=drive.delta_eps, kappa1=drive.kappa1)
    if hilbert is None:
        hilbert = two_level_space(n_centers=len(ks))
    return model, effective_operator(model, hilbert)


def effective_operator(model: EffectiveModel,
                       hilbert: HilbertSpace) -> OperatorMatrix:
    """Assemble the tier-I/II Hamiltonian on a two-level (x N) Fock space."""
    n_cov = len(model.omega_tilde)
    if hilbert.nv_levels != 2 or hilbert.n_centers != n_cov:
        raise InvalidQuantumNumber(
            f"model covers {n_cov} centers on 2 levels; space has "
            f"{hilbert.n_centers} centers x {hilbert.nv_levels}")
    n_op = hilbert.number()
    adag = hilbert.destroy().conj().T
    static = np.zeros((hilbert.dim, hilbert.dim), dtype=complex)
    terms = []
    dp = model.path == "double_path"
    for c in range(n_cov):
        axis = hilbert.sigma_x(c) if dp else hilbert.sigma_z(c)
        static += 0.5 * model.delta_scalar[c] * axis
        static += 0.5 * model.delta_n[c] * (n_op @ axis)
        if model.tier == "I":
            if dp:
                flip = hilbert.sigma_x(c) + hilbert.identity()
            else:
                flip = hilbert.sigma_plus(c)
            m = 0.5j * model.omega_tilde[c] * (adag @ flip)
            if model.dipolar is not None and dp:
                # the sigma_x and identity sidebands split once j_opt != 0
                m = (0.5j * model.omega_tilde[c] * (adag @ hilbert.sigma_x(c))
                     + 0.5j * model.dipolar.omega_a[c] * adag)
            terms.append((m, model.delta_eps))
    if model.tier == "I":
        # Each center also pulls the shared mode frequency by |delta_n|/2
        # per phonon (the spin-identity part of its Stark shift).  delta_eps
        # already absorbs the first center's pull, so with several centers
        # on one mode the remainder stays as an explicit number shift.  It
        # vanishes when the number-dependent terms are compensated away.
        residual_pull = 0.5 * sum(abs(model.delta_n[k])
                                  for k in range(1, n_cov))
        if residual_pull:
            static += residual_pull * n_op
    if model.tier == "I" and model.dipolar is not None:
        static += _dipolar_static(model, hilbert, secular=False)
    if model.tier == "II":
        if n_cov != 2:
            raise InvalidQuantumNumber("tier II needs two covered centers")
        sx1, sx2 = hilbert.sigma_x(0), hilbert.sigma_x(1)
        if dp:
            static += -0.5 * model.omega_gate * (sx1 @ sx2)
        else:
            sy1, sy2 = hilbert.sigma_y(0), hilbert.sigma_y(1)
            static += -0.125 * model.omega_gate * (sx1 @ sx2 + sy1 @ sy2)
        if model.dipolar is not None:
            static += _dipolar_static(model, hilbert, secular=True)
    return OperatorMatrix(hilbert.descriptor(), static, terms)


def _dipolar_static(model: EffectiveModel, hilbert: HilbertSpace,
                    secular: bool) -> np.ndarray:
    blk = model.dipolar
    sx1, sx2 = hilbert.sigma_x(0), hilbert.sigma_x(1)
    sy1, sy2 = hilbert.sigma_y(0), hilbert.sigma_y(1)
    sz1, sz2 = hilbert.sigma_z(0), hilbert.sigma_z(1)
    out = np.zeros((hilbert.dim, hilbert.dim), dtype=complex)
    # the exchange block commutes with the local shift axis on both paths,
    # so it survives time averaging whole
    out += 0.5 * blk.j_opt_tilde * (sx1 @ sx2 + sy1 @ sy2 + sz1 @ sz2)
    if not secular or model.path == "single_path":
        # bare magnetic coupling; on the single path it commutes with the
        # sigma_z shifts as well
        out += 0.5 * blk.j_mag * (sz1 @ sz2)
    else:
        out += 0.25 * blk.j_mag * (sz1 @ sz2 + sy1 @ sy2)
    return out


def effective_II(model1: EffectiveModel, model2: EffectiveModel, *,
                 time_conditioned: bool = False,
                 hilbert: HilbertSpace | None = None):
    """Virtual phonon eliminated: static two-qubit gate model.

    Accepts the two per-NV tier-I models (pass the same two-NV model twice
    for identical centers). Returns (EffectiveModel, OperatorMatrix).
    """
    for m in (model1, model2):
        if m.tier != "I":
            raise ConfigError("effective_II consumes tier-I models")
    if model1.path != model2.path or model1.nu != model2.nu:
        raise ConfigError("tier-I models disagree on path or mode")
    de = model1.delta_eps
    if abs(model2.delta_eps - de) > 1e-9 * max(abs(de), 1e-300):
        raise ConfigError("tier-I models disagree on delta_eps")
    if (model1.dipolar is None) != (model2.dipolar is None):
        raise ConfigError("tier-I models disagree on dipolar content")

    ot = (model1.omega_tilde[0], model2.omega_tilde[-1])
    kappa2 = math.sqrt(abs(ot[0] * ot[1])) / abs(de)
    if kappa2 >= 1.0:
        raise PerturbationInvalid(f"kappa2 = {kappa2:.3f} >= 1")
    if kappa2 > 0.2 and not time_conditioned:
        warnings.warn(f"kappa2 = {kappa2:.3f} > 0.2 without time conditioning",
                      PerturbationWarning, stacklevel=2)
    omega_gate = ot[0] * ot[1] / de

    dipolar = model1.dipolar
    if dipolar is not None:
        amp = dipolar.omega_a[0] + model2.dipolar.omega_a[-1]
    else:
        amp = ot[0] + ot[1]

    ds, dn = [], []
    sources = (model1, model2)
    for pos, m in enumerate(sources):
        idx = 0 if pos == 0 else len(m.omega_tilde) - 1
        s, n = m.delta_scalar[idx], m.delta_n[idx]
        if m.path == "double_path":
            s = s + amp * ot[pos] / de
        else:
            s = s + ot[pos] ** 2 / (4.0 * de)
            n = n + ot[pos] ** 2 / (2.0 * de)
        ds.append(s)
        dn.append(n)

    model = EffectiveModel(
        tier="II", path=model1.path, nu=model1.nu,
        omega_tilde=ot, delta_scalar=tuple(ds), delta_n=tuple(dn),
        delta_eps=de, kappa1=model1.kappa1, kappa2=kappa2,
        omega_gate=omega_gate, dipolar=dipolar)
    if hilbert is None:
        hilbert = two_level_space(n_centers=2)
    return model, effective_operator(model, hilbert)


# ------------------------------------------------------------ lab / rotating

def lab_hamiltonian(drive: DriveConfig, hilbert: HilbertSpace | None = None, *,
                    omega0: float = 0.0, n_mean_estimate: float = 0.0,
                    displacement: str = "linear") -> OperatorMatrix:
    """Pre-elimination drive Hamiltonian of one center.

    Static part (omega0 + eta^2 nu)(P_e - 1/2) + nu n_hat; each tone couples
    |e><g_i| through the displaced carrier 1 + i eta (a + a^dag) (first order;
    displacement="exact" uses the full exponential for cross-checks).
    """
    if hilbert is None:
        hilbert = three_level_space(n_centers=1)
    if hilbert.n_centers != 1 or "e" not in hilbert.nv_labels:
        raise InvalidQuantumNumber("lab model lives on one 3-level center")
    if hilbert.n_max < 4.0 * n_mean_estimate:
        raise TruncationTooSmall(
            f"n_max = {hilbert.n_max} below 4x estimated occupation "
            f"{n_mean_estimate}")
    eta = drive.eta[0]
    a = hilbert.destroy()
    x = a + a.conj().T
    if displacement == "linear":
        d_plus = hilbert.identity() + 1j * eta * x
    elif displacement == "exact":
        d_plus = expm(1j * eta * x)
    else:
        raise ConfigError(f"unknown displacement {displacement!r}")
    omega0_shifted = omega0 + eta ** 2 * drive.nu
    static = (omega0_shifted * (hilbert.projector(0, "e")
                                - 0.5 * hilbert.identity())
              + drive.nu * hilbert.number())
    grounds_1 = ["g+1"]
    grounds_2 = ["g-1"]
    if drive.path == "double_path":
        grounds_1.append("g-1")
        grounds_2.append("g+1")
    terms = []
    for g in grounds_1:
        m = 0.5 * drive.omega1 * (hilbert.ket_bra(0, "e", g) @ d_plus)
        terms.append((m, -(omega0_shifted - drive.eps1)))
    for g in grounds_2:
        m = 0.5 * drive.omega2 * (hilbert.ket_bra(0, "e", g) @ d_plus)
        terms.append((m, -(omega0_shifted - drive.nu - drive.eps2)))
    return OperatorMatrix(hilbert.descriptor(), static, terms)


def rotating_frame_hamiltonian(drive: DriveConfig,
                               hilbert: HilbertSpace | None = None
                               ) -> OperatorMatrix:
    """Raman drive in the frame rotating with mode and transitions.

    Per center: carrier |e><g+1| at e^{-i eps1 t}, displaced carrier
    |e><g-1| at e^{-i (nu+eps2) t}, and the eta-weighted blue sideband
    a^dag |e><g-1| at e^{-i eps2 t}; the double path adds the
    g+1 <-> g-1 swapped copy of all three.
    """
    if hilbert is None:
        hilbert = three_level_space(n_centers=len(drive.eta))
    if hilbert.nv_levels != 3:
        raise InvalidQuantumNumber("rotating-frame model needs 3 NV levels")
    if hilbert.n_centers != len(drive.eta):
        raise InvalidQuantumNumber(
            f"drive covers {len(drive.eta)} centers, space has "
            f"{hilbert.n_centers}")
    adag = hilbert.destroy().conj().T
    terms = []
    for c in range(hilbert.n_centers):
        pairs = [("g+1", "g-1")]
        if drive.path == "double_path":
            pairs.append(("g-1", "g+1"))
        for g_carrier, g_sideband in pairs:
            terms.append((0.5 * drive.omega1 * hilbert.ket_bra(c, "e", g_carrier),
                          -drive.eps1))
            sb = hilbert.ket_bra(c, "e", g_sideband)
            terms.append((0.5 * drive.omega2 * sb, -(drive.nu + drive.eps2)))
            terms.append((0.5j * drive.eta[c] * drive.omega2 * (adag @ sb),
                          -drive.eps2))
    static = np.zeros((hilbert.dim, hilbert.dim), dtype=complex)
    return OperatorMatrix(hilbert.descriptor(), static, terms)


# ----------------------------------------------------------------- dipolar

def dipolar_couplings(separation, p1_hat, p2_hat, material: MaterialModel, *,
                      mag_power: int = 3):
    """Optical and magnetic dipole-dipole couplings (j_opt, j_mag), rad/s.

    separation is the 3-vector between the centers (m). mag_power selects
    the r-dependence of the magnetic part: 3 is the physical 1/r^3; 2
    reproduces the alternative printed scaling anchored at 10 nm.
    """
    sep = np.asarray(separation, dtype=float)
    r = float(np.linalg.norm(sep))
    if r <= 0.0:
        raise ZeroSeparation("centers coincide")
    e_r = sep / r
    p1 = np.asarray(p1_hat, dtype=float)
    p2 = np.asarray(p2_hat, dtype=float)
    if np.linalg.norm(p1) == 0 or np.linalg.norm(p2) == 0:
        raise ConfigError("dipole orientations must be nonzero")
    p1 = p1 / np.linalg.norm(p1)
    p2 = p2 / np.linalg.norm(p2)
    ang = float(p1 @ p2 - 3.0 * (p1 @ e_r) * (p2 @ e_r))

    nk0r = material.n_refr * (TWO_PI / material.lambda0) * r
    if nk0r >= 1.0:
        warnings.warn(f"n k0 r = {nk0r:.2f} is not small; near-field "
                      "dipole-dipole form is unreliable", HierarchyWarning,
                      stacklevel=2)
    j_opt = 1.5 * material.gamma_e * material.xi0 / nk0r ** 3 * ang

    if mag_power == 3:
        radial = 1.0 / r ** 3
    elif mag_power == 2:
        r_ref = 10e-9
        radial = (r_ref / r) ** 2 / r_ref ** 3
    else:
        raise ConfigError(f"mag_power must be 2 or 3, got {mag_power!r}")
    j_mag = 2.0 * MU0_OVER_4PI * GYROMAGNETIC_EL ** 2 * hbar * radial * ang
    return j_opt, j_mag


def effective_I_dipolar(drive: DriveConfig, j_opt: float, j_mag: float,
                        n_mean: float = 0.0,
                        hilbert: HilbertSpace | None = None):
    """Tier I with optically and magnetically coupled centers.

    All Raman denominators acquire the dressed-state shift eps -> eps - j/2;
    at j_opt = j_mag = 0 every coefficient reduces to effective_I. Returns
    (EffectiveModel, OperatorMatrix) on two centers.
    """
    if len(drive.eta) != 2:
        raise ConfigError("dipolar model needs two centers in the drive")
    ks = [0, 1]
    _check_perturbative(drive, ks)
    jh = 0.5 * j_opt
    o1, o2, e1, e2, nu = (drive.omega1, drive.omega2, drive.eps1, drive.eps2,
                          drive.nu)
    floor = 5.0 * max(abs(o1), max(abs(drive.eta[k] * o2) for k in ks))
    for eps in (e1, e2):
        if abs(eps - jh) < floor:
            raise DressedResonance(
                f"|eps - j_opt/2| = {abs(eps - jh):.3e} under 5x the drive "
                f"amplitudes {floor / 5:.3e}")
    for eps in (e1, e2):
        if abs(drive.kappa1 ** 2 * j_opt / eps) >= 0.1:
            raise QuasiResonantDoubleExcitation(
                "kappa1^2 j_opt/eps reaches the double-excitation regime")

    omega_tilde, omega_a, d_scalar, d_n = [], [], [], []
    for k in ks:
        eo2 = drive.eta[k] * o2
        ot = 0.25 * eo2 * o1 * (1.0 / (e1 - jh) + 1.0 / (e2 - jh))
        omega_tilde.append(ot)
        omega_a.append(0.5 * ot - 0.125 * eo2 * o1 * (
            e1 / (jh ** 2 - e1 ** 2) + e2 / (jh ** 2 - e2 ** 2)))
        stark_e = o1 ** 2 / (e1 - jh)
        stark_c = o2 ** 2 / ((nu + e2) - jh)
        stark_s = drive.eta[k] ** 2 * o2 ** 2 / (e2 - jh)
        if drive.compensate_eta2:
            stark_s = 0.0
        if drive.path == "double_path":
            d_scalar.append(0.5 * (stark_e + stark_s + stark_c))
            d_n.append(0.5 * stark_s)
        else:
            d_scalar.append(0.25 * (stark_e - stark_s - stark_c))
            d_n.append(-0.25 * stark_s)

    delta_eps = (e1 - e2
                 + drive.chi_shift * drive.eta[0] ** 2 * o2 ** 2 / (e2 - jh))
    eta2 = drive.eta[0] ** 2
    den1 = jh ** 2 - e1 ** 2
    den2 = jh ** 2 - e2 ** 2
    den3 = jh ** 2 - (nu + e2) ** 2
    common = [o1 ** 2 / den1,
              eta2 * o2 ** 2 * (1.0 + n_mean) / den2,
              o2 ** 2 / den3]
    if drive.path == "double_path":
        cross = (eta2 * o1 ** 2 * o2 ** 2 * j_opt / (16.0 * delta_eps)
                 * (1.0 / den1 + 1.0 / den2) ** 2)
        j_tilde = -0.25 * j_opt * (sum(common) + cross)
    else:
        j_tilde = -0.125 * j_opt * sum(common)

    model = EffectiveModel(
        tier="I", path=drive.path, nu=nu,
        omega_tilde=tuple(omega_tilde),
        delta_scalar=tuple(d_scalar), delta_n=tuple(d_n),
        delta_eps=delta_eps, kappa1=drive.kappa1,
        dipolar=DipolarBlock(j_opt, j_mag, j_tilde, tuple(omega_a)))
    if hilbert is None:
        hilbert = two_level_space(n_centers=2)
    return model, effective_operator(model, hilbert)


def manifold_rates(model: EffectiveModel) -> dict:
    """Rotation rates of the even/odd two-qubit manifolds (tier II).

    M1 spans {|g+1,g-1>, |g-1,g+1>}, M2 spans {|g+1,g+1>, |g-1,g-1>}; the
    rate is twice the off-diagonal coupling within each manifold.
    """
    if model.tier != "II":
        raise ConfigError("manifold rates are a tier-II notion")
    dp = model.path == "double_path"
    j_tilde = model.dipolar.j_opt_tilde if model.dipolar else 0.0
    j_mag = model.dipolar.j_mag if model.dipolar else 0.0
    if dp:
        c_xx = -0.5 * model.omega_gate + 0.5 * j_tilde
        c_yy = 0.5 * j_tilde + 0.25 * j_mag
    else:
        c_xx = -0.125 * model.omega_gate + 0.5 * j_tilde
        c_yy = c_xx    # magnetic part is diagonal on the single path
    return {"M1": 2.0 * (c_xx + c_yy), "M2": 2.0 * (c_xx - c_yy)}


# --------------------------------------------------------------- microwave

MW_RWA_SUBSTITUTIONS = {
    # time averages in the strong-MW interaction frame, triplet basis
    # (g+1, g0, g-1)
    "sigma_x": np.array([[-0.25, 0, 0.75],
                         [0, 0.5, 0],
                         [0.75, 0, -0.25]], dtype=complex),
    "sigma_y": np.zeros((3, 3), dtype=complex),
    "sigma_z": np.zeros((3, 3), dtype=complex),
    "pm_identity": np.array([[0.75, 0, -0.25],
                             [0, 0.5, 0],
                             [-0.25, 0, 0.75]], dtype=complex),
}


@dataclass(frozen=True)
class MwGateModel:
    full: OperatorMatrix
    rwa: OperatorMatrix
    effective: EffectiveModel
    delta_identity: float
    delta_sp: float


def mw_hamiltonian(drive: DriveConfig, hilbert: HilbertSpace | None = None, *,
                   include_carrier: bool = True) -> MwGateModel:
    """Microwave-dressed gate on the ground triplet pair.

    Builds the full model (continuous S_x drive + light shifts + shared
    sideband) and its strong-drive time-averaged companion; the effective
    gate rate is (9/8) omega_tilde^2 / (8 delta_eps). delta_eps here is the
    bare eps1 - eps2 (the eta^2 shift is assumed compensated).
    """
    if not drive.compensate_eta2:
        raise ConfigError("the microwave gate model assumes the eta^2 "
                          "compensation drive", key="compensate_eta2")
    if drive.omega_mw <= 0.0:
        raise ConfigError("omega_mw must be positive for the microwave gate")
    if hilbert is None:
        hilbert = triplet_space(n_centers=2)
    if hilbert.nv_labels != TRIPLET_LABELS or hilbert.n_centers != 2:
        raise InvalidQuantumNumber(
            "microwave model lives on two ground-triplet centers")

    o1, o2, e1, e2, nu = (drive.omega1, drive.omega2, drive.eps1, drive.eps2,
                          drive.nu)
    carrier = o2 ** 2 / (nu + e2) if include_carrier else 0.0
    delta_id = 0.25 * (o1 ** 2 / e1 + carrier)
    delta_sp = 0.25 * (o1 ** 2 / e1 - carrier)
    eta = drive.eta[0]
    omega_tilde = 0.25 * o1 * eta * o2 * (1.0 / e1 + 1.0 / e2)
    delta_eps = e1 - e2

    scale = max(abs(omega_tilde), abs(delta_sp), abs(delta_id))
    if drive.omega_mw <= scale:
        raise WeakDriving(
            f"omega_mw = {drive.omega_mw:.3e} does not dominate the "
            f"residual couplings {scale:.3e}")
    if drive.omega_mw < 10.0 * scale:
        warnings.warn("omega_mw is below 10x the residual couplings; the "
                      "RWA model degrades", PerturbationWarning, stacklevel=2)

    adag = hilbert.destroy().conj().T
    static = np.zeros((hilbert.dim, hilbert.dim), dtype=complex)
    flip = np.zeros((hilbert.dim, hilbert.dim), dtype=complex)
    static_rwa = np.zeros_like(static)
    flip_rwa = np.zeros_like(static)
    for c in (0, 1):
        static += 0.5 * drive.omega_mw * hilbert.spin1_sx(c)
        static += 0.5 * delta_id * hilbert.pm_identity(c)
        static += 0.5 * delta_sp * hilbert.sigma_z(c)
        flip += hilbert.sigma_plus(c)
        sub_id = hilbert.nv_operator(MW_RWA_SUBSTITUTIONS["pm_identity"], c)
        sub_x = hilbert.nv_operator(MW_RWA_SUBSTITUTIONS["sigma_x"], c)
        static_rwa += 0.5 * delta_id * sub_id
        flip_rwa += 0.5 * sub_x          # sigma_+ -> (sub_x + i*0)/2
    full = OperatorMatrix(hilbert.descriptor(), static,
                          [(0.5j * omega_tilde * (adag @ flip), delta_eps)])
    rwa = OperatorMatrix(hilbert.descriptor(), static_rwa,
                         [(0.5j * omega_tilde * (adag @ flip_rwa), delta_eps)])
    omega_gate = (9.0 / 8.0) * omega_tilde ** 2 / (8.0 * delta_eps)
    eff = EffectiveModel(
        tier="II", path=drive.path, nu=nu,
        omega_tilde=(omega_tilde, omega_tilde),
        delta_scalar=(delta_sp, delta_sp), delta_n=(0.0, 0.0),
        delta_eps=delta_eps, kappa1=drive.kappa1,
        kappa2=abs(omega_tilde / delta_eps), omega_gate=omega_gate,
        dipolar=DipolarBlock(0.0, 0.0, 0.0, (0.0, 0.0)))
    return MwGateModel(full, rwa, eff, delta_id, delta_sp)


# ------------------------------------------------------------- construction

def drive_for_kappas(eta, nu: float, kappa1: float, kappa2: float, *,
                     path: str = "double_path", compensate: bool = True,
                     max_iter: int = 200) -> DriveConfig:
    """Drive with the recommended hierarchy and an exact kappa2 target.

    eps2 = eta nu, omega2 = kappa1 nu, omega1 = eta omega2; eps1 solves
    kappa2 = omega_tilde/delta_eps by fixed-point iteration. Note that the
    kappa1 property of the result (omega1/eps1) deviates from the requested
    kappa1 by order delta_eps/eps2, because eps1 must sit off eps2.
    """
    if isinstance(eta, (int, float)):
        eta = (float(eta),)
    else:
        eta = tuple(float(v) for v in eta)
    eta0 = eta[0]
    if eta0 <= 0 or nu <= 0 or kappa1 <= 0 or kappa2 <= 0:
        raise ConfigError("eta, nu, kappa1, kappa2 must be positive")
    eps2 = eta0 * nu
    omega2 = kappa1 * nu
    omega1 = eta0 * omega2
    chi = 0.25 if path == "double_path" else 0.125
    shift = chi * eta0 ** 2 * omega2 ** 2 / eps2
    eps1 = eps2 * 1.1
    for _ in range(max_iter):
        ot = 0.25 * omega1 * eta0 * omega2 * (eps1 + eps2) / (eps1 * eps2)
        new = eps2 - shift + ot / kappa2
        if abs(new - eps1) <= 1e-14 * abs(new):
            eps1 = new
            break
        eps1 = new
    else:
        raise ConfigError("kappa fixed point did not converge")
    return DriveConfig(omega1=omega1, omega2=omega2, eps1=eps1, eps2=eps2,
                       nu=nu, eta=eta, path=path, compensate_eta2=compensate)
