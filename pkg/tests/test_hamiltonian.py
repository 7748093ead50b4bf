import math
import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from nvphonon.errors import (ConfigError, DressedResonance, HierarchyWarning,
                             InvalidQuantumNumber, PerturbationInvalid,
                             PerturbationWarning,
                             QuasiResonantDoubleExcitation, TruncationTooSmall,
                             WeakDriving, ZeroSeparation)
from nvphonon.hamiltonian import (MW_RWA_SUBSTITUTIONS, DriveConfig,
                                  EffectiveModel, StrainTensor,
                                  dipolar_couplings, drive_for_kappas,
                                  effective_I, effective_I_dipolar,
                                  effective_II, effective_operator,
                                  lab_hamiltonian, manifold_rates,
                                  mw_hamiltonian, rotating_frame_hamiltonian,
                                  strain_es, strain_gs)
from nvphonon.hilbert import (three_level_space, triplet_space,
                              two_level_space)
from nvphonon.material import TWO_PI

NU15 = 5.0265e12
ETA15 = 0.01313116


def quiet(fn, *args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*args, **kwargs)


def canonical_drive(k1=0.05, k2=0.05, **kw):
    return quiet(drive_for_kappas, (ETA15, ETA15), NU15, k1, k2, **kw)


# ------------------------------------------------------------------- strain

def test_strain_ground_state_is_hydrostatic_shift(mat):
    rng = np.random.default_rng(7)
    e = rng.normal(size=(3, 3))
    gs = strain_gs(StrainTensor(e), mat)
    d1 = -mat.zeta * (e[0, 0] + e[1, 1])
    assert np.allclose(gs.static, 2 * d1 * np.eye(3))
    es = strain_es(StrainTensor(e), mat)
    assert np.max(np.abs(es.static - es.static.conj().T)) \
        < 1e-15 * np.max(np.abs(es.static))


def test_strain_shear_splits_orbital_doublet(mat):
    s = 1e-6
    es = strain_es(StrainTensor(np.diag([s, -s, 0.0])), mat)
    d2 = -mat.zeta * (2 * s)
    gap = es.static[2, 2] - es.static[3, 3]
    assert abs(abs(gap) - 2 * abs(d2)) < 1e-6 * abs(d2)


def test_strain_hydrostatic_moves_all_levels_together(mat):
    s = 1e-6
    es = strain_es(StrainTensor(s * np.eye(3)), mat.with_overrides(beta=1.0))
    target = -10.0 * mat.zeta * s
    assert np.allclose(np.linalg.eigvalsh(es.static), target)


def test_strain_tensor_validation():
    with pytest.raises(ConfigError):
        StrainTensor(np.full((3, 3), np.nan))
    with pytest.raises(ConfigError):
        StrainTensor(np.eye(2))


# ----------------------------------------------------------------- tier I/II

def test_effective_I_coefficients():
    eps = 1e9
    dr = quiet(DriveConfig, omega1=1e7, omega2=1e9, eta=(ETA15,), eps1=eps,
               eps2=eps, nu=NU15, compensate_eta2=False)
    model, _ = quiet(effective_I, dr)
    flip = dr.omega1 * ETA15 * dr.omega2 / (2 * eps)
    assert model.omega_tilde[0] == pytest.approx(flip, rel=1e-12)
    ds = 0.5 * (dr.omega1 ** 2 / eps + ETA15 ** 2 * dr.omega2 ** 2 / eps
                + dr.omega2 ** 2 / (NU15 + eps))
    assert model.delta_scalar[0] == pytest.approx(ds, rel=1e-12)
    dn = 0.5 * ETA15 ** 2 * dr.omega2 ** 2 / eps
    assert model.delta_n[0] == pytest.approx(dn, rel=1e-12)


def test_compensation_removes_number_dependence():
    eps = 1e9
    dr = quiet(DriveConfig, omega1=1e7, omega2=1e9, eta=(ETA15,), eps1=eps,
               eps2=eps, nu=NU15, compensate_eta2=True)
    model, _ = quiet(effective_I, dr)
    assert model.delta_n == (0.0,)
    ds = 0.5 * (dr.omega1 ** 2 / eps + dr.omega2 ** 2 / (NU15 + eps))
    assert model.delta_scalar[0] == pytest.approx(ds, rel=1e-12)


def test_single_path_coefficient_signs():
    eps = 1e9
    dr = quiet(DriveConfig, omega1=1e7, omega2=1e9, eta=(ETA15,), eps1=eps,
               eps2=eps, nu=NU15, path="single_path", compensate_eta2=False)
    model, _ = quiet(effective_I, dr)
    e = dr.omega1 ** 2 / eps
    s = ETA15 ** 2 * dr.omega2 ** 2 / eps
    c = dr.omega2 ** 2 / (NU15 + eps)
    assert model.delta_scalar[0] == pytest.approx(0.25 * (e - s - c),
                                                  rel=1e-12)
    assert model.delta_n[0] == pytest.approx(-0.25 * s, rel=1e-12)


def test_delta_eps_shift_depends_on_path():
    common = dict(omega1=1e7, omega2=1e9, eta=(ETA15,), eps1=1.05e9,
                  eps2=1e9, nu=NU15, compensate_eta2=False)
    dp = quiet(DriveConfig, **common)
    sp = quiet(DriveConfig, path="single_path", **common)
    base = 0.05e9
    shift = ETA15 ** 2 * 1e18 / 1e9
    assert dp.delta_eps == pytest.approx(base + 0.25 * shift, rel=1e-12)
    assert sp.delta_eps == pytest.approx(base + 0.125 * shift, rel=1e-12)


def test_drive_for_kappas_hits_targets():
    dr = canonical_drive()
    assert dr.omega2 == pytest.approx(0.05 * NU15, rel=1e-14)
    assert dr.eps2 == pytest.approx(ETA15 * NU15, rel=1e-14)
    assert dr.omega1 == pytest.approx(ETA15 * dr.omega2, rel=1e-14)
    assert dr.kappa2 == pytest.approx(0.05, rel=1e-12)
    # kappa1 differs from the target only through the detuning split
    assert dr.kappa1 == pytest.approx(0.05, rel=0.05)


def test_drive_for_kappas_validation():
    with pytest.raises(ConfigError):
        drive_for_kappas((0.0, 0.0), NU15, 0.05, 0.05)
    with pytest.raises(ConfigError):
        drive_for_kappas((ETA15,), NU15, -0.05, 0.05)


def test_effective_II_gate_rate():
    m1, _ = quiet(effective_I, canonical_drive())
    m2, _ = quiet(effective_II, m1, m1)
    og = m1.omega_tilde[0] * m1.omega_tilde[1] / m1.delta_eps
    assert m2.omega_gate == pytest.approx(og, rel=1e-12)
    assert m2.kappa2 == pytest.approx(0.05, abs=1e-13)
    # the closed-form small-parameter estimate
    approx = 0.5 * 0.05 ** 2 * 0.05 * ETA15 * NU15
    assert m2.omega_gate == pytest.approx(approx, rel=0.05)


def test_assembled_operators_stay_hermitian():
    m1, op1 = quiet(effective_I, canonical_drive())
    _, op2 = quiet(effective_II, m1, m1)
    rng = np.random.default_rng(7)
    for op in (op1, op2):
        for t in rng.uniform(0, 1e-6, size=20):
            assert op.hermiticity_defect(t) < 1e-12


def test_single_path_gate_has_no_local_flips():
    dr = canonical_drive(path="single_path")
    msp, _ = quiet(effective_I, dr)
    _, opsp2 = quiet(effective_II, msp, msp)
    sx1 = two_level_space(n_centers=2).sigma_x(0)
    for t in (0.0, 1.3e-9, 7.7e-8):
        assert abs(np.trace(opsp2.at(t) @ sx1)) < 1e-9


def test_residual_mode_pull_of_second_center():
    hs = two_level_space(n_centers=2)
    dr = canonical_drive(compensate=False)
    model, op = quiet(effective_I, dr)
    i0 = hs.index("g+1", "g+1", n=0)
    i1 = hs.index("g+1", "g+1", n=1)
    pull = (op.static[i1, i1] - op.static[i0, i0]).real
    assert pull == pytest.approx(0.5 * abs(model.delta_n[1]), rel=1e-12)
    model_c, op_c = quiet(effective_I, canonical_drive(compensate=True))
    assert model_c.delta_n == (0.0, 0.0)
    assert op_c.static[i1, i1] == op_c.static[i0, i0]


def test_second_state_requires_splitting():
    dr = canonical_drive()
    with pytest.raises(ConfigError):
        quiet(effective_I, dr, second_state="subtract")
    with pytest.raises(ConfigError):
        quiet(effective_I, dr, second_state="both", delta_es=1e9)


def test_second_state_subtract_weakens_flip(mat):
    dr = canonical_drive()
    base, _ = quiet(effective_I, dr)
    sub, _ = quiet(effective_I, dr, second_state="subtract",
                   delta_es=mat.delta_es)
    add, _ = quiet(effective_I, dr, second_state="add",
                   delta_es=mat.delta_es)
    assert abs(sub.omega_tilde[0]) < abs(base.omega_tilde[0])
    assert abs(add.omega_tilde[0]) > abs(base.omega_tilde[0])
    assert sub.omega_tilde[0] + add.omega_tilde[0] == pytest.approx(
        2 * base.omega_tilde[0], rel=1e-12)


def test_effective_II_input_validation():
    def mk(path="double_path", delta_eps=10.0):
        return EffectiveModel(
            tier="I", path=path, nu=1.0, omega_tilde=(1.0,),
            delta_scalar=(0.0,), delta_n=(0.0,), delta_eps=delta_eps,
            kappa1=0.1)
    big = mk()
    with pytest.raises(PerturbationInvalid):
        quiet(effective_II, mk(delta_eps=0.5), mk(delta_eps=0.5))
    with pytest.raises(ConfigError):
        quiet(effective_II, big, mk(path="single_path"))
    with pytest.raises(ConfigError):
        quiet(effective_II, big, mk(delta_eps=11.0))
    m1, _ = quiet(effective_I, canonical_drive())
    m2, _ = quiet(effective_II, m1, m1)
    with pytest.raises(ConfigError):
        quiet(effective_II, m2, m2)


def test_effective_II_warns_unless_time_conditioned():
    mk = lambda: EffectiveModel(
        tier="I", path="double_path", nu=1.0, omega_tilde=(0.3,),
        delta_scalar=(0.0,), delta_n=(0.0,), delta_eps=1.0, kappa1=0.1)
    with pytest.warns(PerturbationWarning):
        effective_II(mk(), mk())
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        effective_II(mk(), mk(), time_conditioned=True)


def test_effective_operator_space_mismatch():
    model, _ = quiet(effective_I, canonical_drive())
    with pytest.raises(InvalidQuantumNumber):
        effective_operator(model, two_level_space(n_centers=1))
    with pytest.raises(InvalidQuantumNumber):
        effective_operator(model, three_level_space(n_centers=2))


def test_effective_model_tier_checks():
    with pytest.raises(ConfigError):
        EffectiveModel(tier="III", path="double_path", nu=1.0,
                       omega_tilde=(1.0,), delta_scalar=(0.0,),
                       delta_n=(0.0,), delta_eps=1.0, kappa1=0.1)
    with pytest.raises(ConfigError):
        EffectiveModel(tier="II", path="double_path", nu=1.0,
                       omega_tilde=(1.0, 1.0), delta_scalar=(0.0, 0.0),
                       delta_n=(0.0, 0.0), delta_eps=1.0, kappa1=0.1)
    with pytest.raises(ConfigError):
        EffectiveModel(tier="II", path="double_path", nu=1.0,
                       omega_tilde=(1.0, 1.0), delta_scalar=(0.0, 0.0),
                       delta_n=(0.0, 0.0), delta_eps=1.0, kappa1=0.1,
                       kappa2=1e-3, omega_gate=0.5)


# ------------------------------------------------------------------- dipolar

def test_dipolar_coupling_anchor_values(mat):
    sep = np.array([10e-9, 0.0, 0.0])
    p = np.array([0.0, 0.0, 1.0])
    j_opt, j_mag = dipolar_couplings(sep, p, p, mat)
    assert j_opt / TWO_PI / 1e6 == pytest.approx(52.404, abs=0.01)
    assert j_mag / TWO_PI / 1e3 == pytest.approx(104.08, abs=0.05)


def test_dipolar_magic_angle(mat):
    sep = np.array([10e-9, 0.0, 0.0])
    p = np.array([0.0, 0.0, 1.0])
    j_opt, j_mag = dipolar_couplings(sep, p, p, mat)
    c = 1 / math.sqrt(3)
    pm = np.array([c, math.sqrt(1 - c ** 2), 0.0])
    jo0, jm0 = dipolar_couplings(sep, pm, pm, mat)
    assert abs(jo0) < 1e-12 * abs(j_opt)
    assert abs(jm0) < 1e-12 * abs(j_mag)


def test_dipolar_mag_power_anchoring(mat):
    sep = np.array([10e-9, 0.0, 0.0])
    p = np.array([0.0, 0.0, 1.0])
    _, jm3 = dipolar_couplings(sep, p, p, mat)
    _, jm2 = dipolar_couplings(sep, p, p, mat, mag_power=2)
    assert jm2 == pytest.approx(jm3, rel=1e-12)
    _, jm3_far = dipolar_couplings(2 * sep, p, p, mat)
    _, jm2_far = dipolar_couplings(2 * sep, p, p, mat, mag_power=2)
    assert jm2_far == pytest.approx(2 * jm3_far, rel=1e-12)


def test_dipolar_validation(mat):
    p = np.array([0.0, 0.0, 1.0])
    with pytest.raises(ZeroSeparation):
        dipolar_couplings(np.zeros(3), p, p, mat)
    with pytest.raises(ConfigError):
        dipolar_couplings(np.array([10e-9, 0, 0]), np.zeros(3), p, mat)
    with pytest.raises(ConfigError):
        dipolar_couplings(np.array([10e-9, 0, 0]), p, p, mat, mag_power=4)
    with pytest.warns(HierarchyWarning):
        dipolar_couplings(np.array([50e-9, 0, 0]), p, p, mat)


def test_dipolar_model_reduces_at_zero_coupling():
    dr = canonical_drive()
    plain, op_plain = quiet(effective_I, dr)
    dip, op_dip = quiet(effective_I_dipolar, dr, 0.0, 0.0)
    for field in ("omega_tilde", "delta_scalar", "delta_n"):
        a = np.array(getattr(plain, field))
        b = np.array(getattr(dip, field))
        assert np.all(np.abs(a - b) <= 1e-12 * np.abs(a)), field
    assert dip.delta_eps == pytest.approx(plain.delta_eps, rel=1e-12)
    assert np.allclose(op_plain.static, op_dip.static, atol=1e-20)
    assert len(op_plain.terms) == len(op_dip.terms)
    for (ma, fa), (mb, fb) in zip(op_plain.terms, op_dip.terms):
        assert fa == fb
        assert np.max(np.abs(ma - mb)) <= 1e-12 * np.max(np.abs(ma))
    assert np.max(np.abs(np.array(dip.dipolar.omega_a)
                         - np.array(dip.omega_tilde))) \
        <= 1e-12 * abs(dip.omega_tilde[0])


def test_manifold_rates_match_matrix_elements(mat):
    sep = np.array([10e-9, 0.0, 0.0])
    p = np.array([0.0, 0.0, 1.0])
    j_opt, j_mag = dipolar_couplings(sep, p, p, mat)
    dr = canonical_drive()
    mdip, _ = quiet(effective_I_dipolar, dr, j_opt * 1e-4, j_mag * 1e-2)
    mII, opII = quiet(effective_II, mdip, mdip)
    rates = manifold_rates(mII)
    hs = two_level_space(n_centers=2)
    h0 = opII.static
    elem_m1 = h0[hs.index("g-1", "g+1", n=0), hs.index("g+1", "g-1", n=0)]
    elem_m2 = h0[hs.index("g-1", "g-1", n=0), hs.index("g+1", "g+1", n=0)]
    assert rates["M1"] == pytest.approx(2 * elem_m1.real, rel=1e-9)
    assert rates["M2"] == pytest.approx(2 * elem_m2.real, rel=1e-9)
    jt = mII.dipolar.j_opt_tilde
    assert rates["M1"] == pytest.approx(
        -mII.omega_gate + 2 * jt + 0.5 * j_mag * 1e-2, rel=1e-9)
    assert rates["M2"] == pytest.approx(
        -mII.omega_gate - 0.5 * j_mag * 1e-2, rel=1e-9)


def test_manifold_rates_single_path():
    msp, _ = quiet(effective_I, canonical_drive(path="single_path"))
    msp2, opsp2 = quiet(effective_II, msp, msp)
    rates = manifold_rates(msp2)
    assert rates["M1"] == pytest.approx(-0.5 * msp2.omega_gate, rel=1e-12)
    assert abs(rates["M2"]) < 1e-15 * abs(msp2.omega_gate)
    hs = two_level_space(n_centers=2)
    elem = opsp2.static[hs.index("g-1", "g+1", n=0),
                        hs.index("g+1", "g-1", n=0)]
    assert rates["M1"] == pytest.approx(2 * elem.real, rel=1e-9)


def test_manifold_rates_need_tier_II():
    m1, _ = quiet(effective_I, canonical_drive())
    with pytest.raises(ConfigError):
        manifold_rates(m1)


def test_dipolar_model_guards():
    dr = canonical_drive()
    with pytest.raises(DressedResonance):
        quiet(effective_I_dipolar, dr, 2 * dr.eps2, 0.0)
    with pytest.raises(QuasiResonantDoubleExcitation):
        quiet(effective_I_dipolar, dr, 3e12, 0.0)
    single = canonical_drive()
    single = quiet(DriveConfig, omega1=single.omega1, omega2=single.omega2,
                   eps1=single.eps1, eps2=single.eps2, nu=single.nu,
                   eta=(ETA15,))
    with pytest.raises(ConfigError):
        quiet(effective_I_dipolar, single, 0.0, 0.0)


# ----------------------------------------------------------------- microwave

def test_mw_substitutions_are_interaction_frame_averages():
    sq = 1 / math.sqrt(2)
    sx3 = np.array([[0, sq, 0], [sq, 0, sq], [0, sq, 0]], dtype=complex)
    bases = {
        "sigma_x": np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex),
        "sigma_y": np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]],
                            dtype=complex),
        "sigma_z": np.diag([1.0, 0.0, -1.0]).astype(complex),
        "pm_identity": np.diag([1.0, 0.0, 1.0]).astype(complex),
    }
    omega = 1.0
    period = 4 * np.pi / omega
    ts = np.linspace(0, period, 256, endpoint=False)
    for name, base in bases.items():
        acc = np.zeros((3, 3), dtype=complex)
        for t in ts:
            u = expm(1j * omega / 2 * sx3 * t)
            acc += u @ base @ u.conj().T
        acc /= len(ts)
        assert np.max(np.abs(acc - MW_RWA_SUBSTITUTIONS[name])) < 1e-12, name


def mw_drive(omega_mw=TWO_PI * 10e6):
    om1 = TWO_PI * 6.3e6
    nu = 5.159265e12
    e1 = TWO_PI * 0.4e9
    return DriveConfig(omega1=om1, omega2=om1 / ETA15, eps1=e1,
                       eps2=e1 - TWO_PI * 53e6, nu=nu,
                       eta=(ETA15, ETA15), omega_mw=omega_mw)


def test_mw_gate_reference_numbers():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gate = mw_hamiltonian(mw_drive())
    ot = gate.effective.omega_tilde[0]
    og = gate.effective.omega_gate
    de = gate.effective.delta_eps
    assert ot == pytest.approx(3.355e5, abs=0.01e5)
    assert og == pytest.approx(47.53, abs=0.1)
    assert de == pytest.approx(TWO_PI * 53e6, abs=1.0)
    # dressed-frame averaging rescales the bare quotient by 9/64
    assert og == pytest.approx((9 / 64) * ot ** 2 / de, rel=1e-12)
    rng = np.random.default_rng(3)
    for op in (gate.full, gate.rwa):
        for t in rng.uniform(0, 1e-7, size=10):
            assert op.hermiticity_defect(t) < 1e-12


def test_mw_carrier_toggle():
    gate = quiet(mw_hamiltonian, mw_drive(), include_carrier=False)
    om1 = TWO_PI * 6.3e6
    e1 = TWO_PI * 0.4e9
    assert gate.delta_identity == gate.delta_sp == 0.25 * om1 ** 2 / e1
    gate_c = quiet(mw_hamiltonian, mw_drive())
    assert gate_c.delta_identity != gate_c.delta_sp


def test_mw_validation():
    d = mw_drive()
    uncomp = DriveConfig(omega1=d.omega1, omega2=d.omega2, eps1=d.eps1,
                         eps2=d.eps2, nu=d.nu, eta=d.eta,
                         omega_mw=d.omega_mw, compensate_eta2=False)
    with pytest.raises(ConfigError) as err:
        quiet(mw_hamiltonian, uncomp)
    assert err.value.key == "compensate_eta2"
    no_mw = DriveConfig(omega1=d.omega1, omega2=d.omega2, eps1=d.eps1,
                        eps2=d.eps2, nu=d.nu, eta=d.eta)
    with pytest.raises(ConfigError):
        quiet(mw_hamiltonian, no_mw)
    with pytest.raises(WeakDriving):
        quiet(mw_hamiltonian, mw_drive(omega_mw=1e5))
    with pytest.warns(PerturbationWarning):
        mw_hamiltonian(mw_drive(omega_mw=1e6))
    with pytest.raises(InvalidQuantumNumber):
        quiet(mw_hamiltonian, d, triplet_space(n_centers=1))


# ----------------------------------------------------------- lab and rotating

def test_lab_hamiltonian_without_coupling_conserves_phonons():
    dr = quiet(DriveConfig, omega1=1e7, omega2=1e7, eps1=1e9, eps2=1e9,
               nu=NU15, eta=(0.0,), path="single_path")
    h = lab_hamiltonian(dr, omega0=TWO_PI * 470e12)
    nmat = three_level_space(n_centers=1).number()
    for m, _ in h.terms:
        comm = m @ nmat - nmat @ m
        assert np.max(np.abs(comm)) < 1e-6 * np.max(np.abs(m))


def test_lab_hamiltonian_static_structure():
    hs = three_level_space(n_centers=1)
    dr = quiet(DriveConfig, omega1=0.0, omega2=0.0, eps1=1e9, eps2=1e9,
               nu=NU15, eta=(0.1,))
    h = lab_hamiltonian(dr)
    full = h.at(0.33)
    assert np.max(np.abs(full - np.diag(np.diag(full)))) == 0
    shift = (h.static[hs.index("e", n=0), hs.index("e", n=0)]
             - h.static[hs.index("g+1", n=0), hs.index("g+1", n=0)]).real
    assert shift == pytest.approx(0.1 ** 2 * NU15, abs=1e-6)


def test_lab_exact_displacement_close_to_linear():
    dr = quiet(DriveConfig, omega1=1e7, omega2=1e7, eps1=1e9, eps2=1e9,
               nu=NU15, eta=(1e-3,), path="single_path")
    h_lin = lab_hamiltonian(dr, displacement="linear")
    h_ex = lab_hamiltonian(dr, displacement="exact")
    diff = max(np.max(np.abs(a[0] - b[0]))
               for a, b in zip(h_lin.terms, h_ex.terms))
    scale = np.max(np.abs(h_lin.terms[0][0]))
    n_max = three_level_space(n_centers=1).n_max
    assert diff / scale < 0.75 * 1e-6 * (2 * n_max + 1)


def test_lab_hamiltonian_guards():
    dr = quiet(DriveConfig, omega1=1e7, omega2=1e7, eps1=1e9, eps2=1e9,
               nu=NU15, eta=(0.1,), path="single_path")
    with pytest.raises(TruncationTooSmall):
        lab_hamiltonian(dr, n_mean_estimate=5.0)
    with pytest.raises(ConfigError):
        lab_hamiltonian(dr, displacement="quadratic")
    with pytest.raises(InvalidQuantumNumber):
        lab_hamiltonian(dr, two_level_space(n_centers=1))


def test_rotating_frame_term_count():
    h_dp = quiet(rotating_frame_hamiltonian, canonical_drive())
    assert len(h_dp.terms) == 12
    h_sp = quiet(rotating_frame_hamiltonian,
                 canonical_drive(path="single_path"))
    assert len(h_sp.terms) == 6
    rng = np.random.default_rng(5)
    for t in rng.uniform(0, 1e-8, size=10):
        assert h_dp.hermiticity_defect(t) < 1e-12
    with pytest.raises(InvalidQuantumNumber):
        quiet(rotating_frame_hamiltonian, canonical_drive(),
              two_level_space(n_centers=2))
    with pytest.raises(InvalidQuantumNumber):
        quiet(rotating_frame_hamiltonian, canonical_drive(),
              three_level_space(n_centers=1))


# -------------------------------------------------------- config and warnings

def test_drive_config_validation():
    good = dict(omega1=1e7, omega2=1e9, eps1=1e9, eps2=1e9, nu=1e12)
    with pytest.raises(ConfigError):
        quiet(DriveConfig, eta=(0.1, 0.1, 0.1), **good)
    with pytest.raises(ConfigError):
        quiet(DriveConfig, path="triple_path", **good)
    with pytest.raises(ConfigError):
        quiet(DriveConfig, omega1=1e7, omega2=1e9, eps1=-1e9, eps2=1e9,
              nu=1e12)
    with pytest.raises(ConfigError):
        quiet(DriveConfig, omega1=-1e7, omega2=1e9, eps1=1e9, eps2=1e9,
              nu=1e12)


@pytest.mark.parametrize("kwargs,needle", [
    (dict(omega1=1e9, omega2=0, eps1=2e9, eps2=1e9, nu=1e12), "eps1"),
    (dict(omega1=0, omega2=1e9, eta=(0.5,), eps1=2e9, eps2=1e9, nu=1e12),
     "eps2"),
    (dict(omega1=1e6, omega2=1e6, eps1=5e11, eps2=1e9, nu=1e12),
     "mode frequency"),
    (dict(omega1=1e7, omega2=1e9, eta=(0.5,), eps1=1e11, eps2=1e11, nu=1e13),
     "unbalanced"),
])
def test_hierarchy_warnings_fire(kwargs, needle):
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        DriveConfig(**kwargs)
    assert any(needle in str(w.message) for w in rec), \
        [str(w.message) for w in rec]


def test_elimination_breaks_down_loudly():
    dr = quiet(DriveConfig, omega1=3e9, omega2=0, eps1=2e9, eps2=1e9, nu=1e12)
    with pytest.raises(PerturbationInvalid):
        quiet(effective_I, dr)
