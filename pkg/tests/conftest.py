"""Shared fixtures: material, the 15 nm reference mode, and the gate runs
that several test modules (and the acceptance suite) read from."""

import pytest

from nvphonon.dynamics import DtPolicy, GateConfig, simulate_gate
from nvphonon.material import diamond_default, make_geometry
from nvphonon.phonon_pbc import lowest_mode


@pytest.fixture(scope="session")
def mat():
    return diamond_default()


@pytest.fixture(scope="session")
def mode15(mat):
    """Lowest periodic-boundary mode of a 15 nm sphere."""
    geometry = make_geometry("sphere", (7.5e-9,), mat)
    return lowest_mode(geometry, mat)


@pytest.fixture(scope="session")
def gate_runs(mode15):
    """Echoed pi/2 gate at d = 15 nm, kappa1 = kappa2 = 0.05, m = 100,
    run in both effective tiers. Returned as {"I": (traj, report), ...}."""
    out = {}
    for tier in ("effective_II", "effective_I"):
        cfg = GateConfig(eta=mode15.eta, nu=mode15.nu, kappa1=0.05,
                         kappa2=0.05, m_closure=100, tier=tier, echo=True,
                         dt_policy=DtPolicy(rtol=1e-11, atol=1e-13,
                                            n_store=101))
        out[tier.split("_")[1]] = simulate_gate(cfg)
    return out


@pytest.fixture(scope="session")
def damped_gate_run(mat, mode15):
    """Short gate with a damped thermal mode (density-matrix path)."""
    cfg = GateConfig(eta=mode15.eta, nu=mode15.nu, kappa1=0.05, kappa2=0.05,
                     m_closure=2, tier="effective_II", echo=True,
                     fock_dim=8, n_th=0.2, q_factor=1e5, material=mat,
                     dt_policy=DtPolicy(rtol=1e-11, atol=1e-13, n_store=51))
    return simulate_gate(cfg)


@pytest.fixture(scope="session")
def fast_gate_run(mode15):
    """Single-loop gate (m = 2, kappa2 = 1/(2 sqrt 2)): the pi/2 rotation
    with a visible phonon transient."""
    cfg = GateConfig(eta=mode15.eta, nu=mode15.nu, kappa1=0.05,
                     kappa2=0.3535533905932738, m_closure=2,
                     tier="effective_I", echo=True,
                     dt_policy=DtPolicy(rtol=1e-11, atol=1e-13, n_store=201))
    return simulate_gate(cfg)
