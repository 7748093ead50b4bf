"""Command line front end: CSV/JSON emission for every figure and report.

All physics comes from the library modules; this file only resolves
configuration, orchestrates sweeps, and serializes. Every CSV starts with a
provenance comment (tool version, config digest) followed by the header row;
numbers are written with 17 significant digits so a rerun of the same config
on the same build is byte-identical. Exit codes: 0 ok, 2 configuration
problem (with line/key diagnostics), 3 numerical failure (named invariant).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np

from . import __version__
from .analysis import (
    closure_times,
    crossing_diameter,
    exact_unitary,
    factor_local_sx,
    gate_figure_of_merit,
    unitary_fidelity,
)
from .config import ETA_MAP_SERIES, RunConfig, load_config
from .dynamics import DtPolicy, GateConfig, propagator, simulate_gate, \
    simulate_mw_gate
from .errors import ConfigError, NumericalError, NvPhononError
from .hamiltonian import (
    DriveConfig,
    dipolar_couplings,
    drive_for_kappas,
    effective_I,
    effective_I_dipolar,
    effective_II,
    lab_hamiltonian,
    mw_hamiltonian,
)
from .hilbert import two_level_space
from .material import Geometry, MaterialModel, make_geometry, to_ordinary
from .phonon_pbc import lowest_mode
from .phonon_sphere import (
    coupling_eta,
    make_sphere_mode,
    spheroidal_eigenvalues,
    torsional_eigenvalues,
)

DEFAULT_DIAMETER = 15e-9


def _worker_count() -> int:
    env = os.environ.get("NVPHONON_WORKERS")
    if env is not None:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(
                f"NVPHONON_WORKERS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("NVPHONON_WORKERS must be >= 1")
        return n
    return min(8, os.cpu_count() or 1)


# ----------------------------------------------------------------- emission

def _format(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def write_csv(path: str, header, rows, cfg: RunConfig) -> None:
    lines = [f"# nvphonon {__version__} config={cfg.digest} "
             f"command={cfg.command}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_format(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (np.floating, np.integer)):
        return _jsonable(value.item())
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(path: str, payload: dict, cfg: RunConfig) -> None:
    doc = {"tool": f"nvphonon {__version__}", "config": cfg.digest,
           "command": cfg.command}
    doc.update(_jsonable(payload))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(doc, handle, indent=2, sort_keys=False)
        handle.write("\n")


def _require_out(cfg: RunConfig, kind: str) -> str:
    path = getattr(cfg.output, kind)
    if path is None:
        raise ConfigError(f"this command writes a {kind.upper()} file; "
                          f"pass --out or set output.{kind}")
    return path


# ------------------------------------------------------- geometry and drives

def _geometry(cfg: RunConfig, diameter: float | None = None) -> Geometry:
    if cfg.shape == "box":
        if cfg.edges is None:
            raise ConfigError("box geometry needs geometry.edges_nm")
        return make_geometry("box", cfg.edges, cfg.material)
    d = diameter if diameter is not None else cfg.require_diameter()
    return make_geometry("sphere", (0.5 * d,), cfg.material)


def _sphere_point(position, radius: float):
    r_frac, theta, phi = position
    r = r_frac * radius
    return (r * math.sin(theta) * math.cos(phi),
            r * math.sin(theta) * math.sin(phi),
            r * math.cos(theta))


def _mode_eta_nu(cfg: RunConfig, geometry: Geometry):
    """(eta, nu) of the configured mode; drives use |eta|."""
    if cfg.mode.source == "pbc":
        mode = lowest_mode(geometry, cfg.material)
        return mode.eta, mode.nu
    mode = make_sphere_mode(cfg.mode.family, cfg.mode.l, cfg.mode.m,
                            cfg.mode.n, geometry, cfg.material)
    point = _sphere_point(cfg.mode.position, geometry.radius)
    eta = coupling_eta(mode, point, cfg.material, geometry)
    return eta, mode.nu


def _gate_material(cfg: RunConfig) -> MaterialModel:
    if cfg.gate.gamma == "nd":
        return cfg.material.with_overrides(gamma_e=cfg.material.gamma_nd)
    return cfg.material


def _raman_drive(cfg: RunConfig) -> DriveConfig:
    geometry = _geometry(cfg)
    eta, nu = _mode_eta_nu(cfg, geometry)
    return drive_for_kappas((abs(eta), abs(eta)), nu, cfg.drive.kappa1,
                            cfg.drive.kappa2, path=cfg.drive.path,
                            compensate=cfg.drive.compensate_eta2)


def _mw_drive(cfg: RunConfig) -> DriveConfig:
    for name, value in (("drive.omega1_mhz", cfg.drive.omega1),
                        ("drive.eps1_ghz", cfg.drive.eps1),
                        ("drive.delta_eps_mhz", cfg.drive.delta_eps)):
        if value is None:
            raise ConfigError("the microwave gate takes raw drive "
                              "parameters", key=name)
    if cfg.drive.omega_mw <= 0.0:
        raise ConfigError("the microwave gate needs drive.omega_mw_mhz > 0",
                          key="drive.omega_mw_mhz")
    geometry = _geometry(cfg)
    eta, nu = _mode_eta_nu(cfg, geometry)
    eta = abs(eta)
    eps2 = cfg.drive.eps1 - cfg.drive.delta_eps
    if eps2 <= 0.0:
        raise ConfigError("delta_eps must stay below eps1",
                          key="drive.delta_eps_mhz")
    return DriveConfig(
        omega1=cfg.drive.omega1, omega2=cfg.drive.omega1 / eta,
        eps1=cfg.drive.eps1, eps2=eps2, nu=nu, eta=(eta, eta),
        path=cfg.drive.path, compensate_eta2=cfg.drive.compensate_eta2,
        omega_mw=cfg.drive.omega_mw)


# ---------------------------------------------------------------- subcommands

def run_modes(cfg: RunConfig) -> int:
    out = _require_out(cfg, "csv")
    geometry = _geometry(cfg)
    if cfg.modes.which == "pbc":
        mode = lowest_mode(geometry, cfg.material)
        write_csv(out, ("k_rad_m", "nu_rad_s", "f_hz", "eta"),
                  [(mode.k, mode.nu, to_ordinary(mode.nu), mode.eta)], cfg)
        return 0
    radius = geometry.radius
    rows = []
    if cfg.modes.family in ("both", "torsional"):
        for l in range(1, cfg.modes.lmax + 1):
            chis = torsional_eigenvalues(l, cfg.modes.nmax)
            for n, chi in enumerate(chis):
                nu = cfg.material.v_t * chi / radius
                rows.append(("torsional", l, n, 2 * l + 1, chi,
                             float("nan"), nu, to_ordinary(nu)))
    if cfg.modes.family in ("both", "spheroidal"):
        for l in range(0, cfg.modes.lmax + 1):
            roots = spheroidal_eigenvalues(l, cfg.modes.nmax, cfg.material)
            for n, (chi, xi, _, _) in enumerate(roots):
                nu = cfg.material.v_t * chi / radius
                rows.append(("spheroidal", l, n, 2 * l + 1, chi, xi,
                             nu, to_ordinary(nu)))
    write_csv(out, ("family", "l", "n", "degeneracy", "chi", "xi",
                    "nu_rad_s", "f_hz"), rows, cfg)
    return 0


# series tag -> (family, l, m, n, (r/R, theta, phi)); None marks the
# periodic-boundary reference
_SERIES_DEF = {
    "pbc": None,
    "breathing_n0": ("spheroidal", 0, 0, 0, (0.0, 0.0, 0.0)),
    "breathing_n1": ("spheroidal", 0, 0, 1, (0.0, 0.0, 0.0)),
    "quad_m0": ("spheroidal", 2, 0, 0, (0.5, 0.0, 0.0)),
    "quad_m1": ("spheroidal", 2, 1, 0, (0.5, 0.25 * math.pi, 0.0)),
}


def _series_eta_nu(tag: str, cfg: RunConfig, geometry: Geometry):
    spec = _SERIES_DEF[tag]
    if spec is None:
        mode = lowest_mode(geometry, cfg.material)
        return mode.eta, mode.nu
    family, l, m, n, position = spec
    mode = make_sphere_mode(family, l, m, n, geometry, cfg.material)
    point = _sphere_point(position, geometry.radius)
    return coupling_eta(mode, point, cfg.material, geometry), mode.nu


def run_eta_map(cfg: RunConfig) -> int:
    out = _require_out(cfg, "csv")
    if cfg.etamap.radial:
        return _run_eta_radial(cfg, out)
    header = ["d_nm"]
    for tag in cfg.etamap.series:
        header += [f"eta_abs_{tag}", f"f_hz_{tag}"]
    rows = []
    for d_nm in cfg.etamap.d_nm:
        geometry = _geometry(cfg, diameter=d_nm * 1e-9)
        row = [d_nm]
        for tag in cfg.etamap.series:
            eta, nu = _series_eta_nu(tag, cfg, geometry)
            row += [abs(eta), to_ordinary(nu)]
        rows.append(row)
    write_csv(out, header, rows, cfg)
    return 0


def _run_eta_radial(cfg: RunConfig, out: str) -> int:
    tags = [t for t in cfg.etamap.series if t != "pbc"]
    if not tags:
        raise ConfigError("radial profiles need at least one sphere series",
                          key="etamap.series")
    geometry = _geometry(cfg)
    modes = {}
    for tag in tags:
        family, l, m, n, position = _SERIES_DEF[tag]
        modes[tag] = (make_sphere_mode(family, l, m, n, geometry,
                                       cfg.material), position)
    rows = []
    for i in range(cfg.etamap.points):
        r_frac = i / (cfg.etamap.points - 1) if cfg.etamap.points > 1 else 0.0
        r_frac = min(r_frac, 1.0 - 1e-9)
        row = [r_frac]
        for tag in tags:
            mode, position = modes[tag]
            point = _sphere_point((r_frac,) + tuple(position[1:]),
                                  geometry.radius)
            row.append(coupling_eta(mode, point, cfg.material, geometry))
        rows.append(row)
    write_csv(out, ["r_over_R"] + [f"eta_{t}" for t in tags], rows, cfg)
    return 0


def run_sweep(cfg: RunConfig) -> int:
    out = _require_out(cfg, "csv")
    material = _gate_material(cfg)
    diameters = [d * 1e-9 for d in cfg.sweep.d_nm]

    def one(diameter: float):
        return gate_figure_of_merit([diameter], cfg.sweep.k1, cfg.sweep.k2,
                                    material,
                                    second_state=cfg.sweep.second_state)

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        chunks = list(pool.map(one, diameters))
    rows = []
    for chunk in chunks:
        for p in chunk:
            rows.append((p.diameter * 1e9, p.kappa1, p.kappa2, p.eta,
                         p.nu, p.omega2, p.omega_gate, p.gamma_eff,
                         to_ordinary(p.omega_gate), to_ordinary(p.gamma_eff),
                         p.ratio))
    write_csv(out, ("d_nm", "kappa1", "kappa2", "eta", "nu_rad_s",
                    "omega2_rad_s", "omega_gate_rad_s", "gamma_eff_rad_s",
                    "omega_gate_hz", "gamma_eff_hz", "ratio"), rows, cfg)
    if cfg.output.json is not None:
        crossings = {}
        for k2 in cfg.sweep.k2:
            key = "%.17g" % k2
            try:
                d = crossing_diameter(k2, material,
                                      second_state=cfg.sweep.second_state)
                crossings[key] = d * 1e9
            except NumericalError:
                crossings[key] = None
        write_json(cfg.output.json, {"crossing_d_nm": crossings}, cfg)
    return 0


def run_gate_sim(cfg: RunConfig) -> int:
    out = _require_out(cfg, "csv")
    if cfg.gate.tier == "mw":
        drive = _mw_drive(cfg)
        traj, report = simulate_mw_gate(
            drive, m_closure=cfg.gate.m_closure, fock_dim=cfg.gate.fock_dim,
            include_carrier=cfg.gate.include_carrier,
            model=cfg.gate.mw_model)
    else:
        geometry = _geometry(cfg)
        eta, nu = _mode_eta_nu(cfg, geometry)
        gate_cfg = GateConfig(
            eta=(abs(eta), abs(eta)), nu=nu, kappa1=cfg.drive.kappa1,
            kappa2=cfg.drive.kappa2, m_closure=cfg.gate.m_closure,
            tier=cfg.gate.tier, path=cfg.drive.path, echo=cfg.gate.echo,
            initial=cfg.gate.initial, fock_dim=cfg.gate.fock_dim,
            n_th=cfg.gate.n_th, q_factor=cfg.gate.q_factor,
            optical_decay=cfg.gate.optical_decay,
            compensate_eta2=cfg.drive.compensate_eta2,
            store_states=cfg.gate.store_states,
            material=_gate_material(cfg))
        traj, report = simulate_gate(gate_cfg)

    pops = traj.populations
    fidelity = traj.fidelity
    if fidelity is None:
        fidelity = np.full(len(traj.times), float("nan"))
    rows = []
    for i, t in enumerate(traj.times):
        rows.append((t * 1e6,
                     pops["g+1,g+1"][i], pops["g-1,g-1"][i],
                     pops["g+1,g-1"][i], pops["g-1,g+1"][i],
                     traj.n_mean[i], fidelity[i]))
    write_csv(out, ("t_us", "pop_pp", "pop_mm", "pop_pm", "pop_mp",
                    "n_mean", "fidelity"), rows, cfg)
    if cfg.output.json is not None:
        write_json(cfg.output.json, dataclasses.asdict(report), cfg)
    return 0


def run_exact_check(cfg: RunConfig) -> int:
    out = _require_out(cfg, "json")
    diameter = cfg.diameter if cfg.diameter is not None else DEFAULT_DIAMETER
    geometry = _geometry(cfg, diameter=diameter)
    eta, nu = _mode_eta_nu(cfg, geometry)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        drive = drive_for_kappas((abs(eta), abs(eta)), nu, cfg.drive.kappa1,
                                 cfg.exact.kappa2, path="double_path",
                                 compensate=True)
        hilbert = two_level_space(2, cfg.exact.fock_dim)
        model, operator = effective_I(drive, hilbert)
    t_gate = 2.0 * math.pi * cfg.exact.m / abs(model.delta_eps)
    u_num = propagator(operator, t_gate,
                       dt_policy=DtPolicy(rtol=1e-12, atol=1e-14))
    _, _, u_exact = exact_unitary(model.omega_tilde[0], model.delta_eps,
                                  t_gate, hilbert)
    stripped = factor_local_sx(
        u_num, [model.delta_scalar[0], model.delta_scalar[1]], t_gate,
        hilbert)
    keep = [i for i in range(hilbert.dim)
            if i % hilbert.fock_dim <= cfg.exact.guard_n]
    fid_interior = unitary_fidelity(stripped, u_exact, keep=keep)
    fid_full = unitary_fidelity(stripped, u_exact)
    theta = abs(model.omega_tilde[0] ** 2 / model.delta_eps) * t_gate
    try:
        ct = closure_times(model.delta_eps, theta, echo=False,
                           m=cfg.exact.m, kappa2_max=2.0)
        kappa2_back = ct.kappa2
    except NvPhononError:
        # theta outside (0, pi]: the consistency readback does not apply
        kappa2_back = None
    write_json(out, {
        "kappa2": cfg.exact.kappa2,
        "m": cfg.exact.m,
        "fock_dim": cfg.exact.fock_dim,
        "guard_n": cfg.exact.guard_n,
        "diameter_nm": diameter * 1e9,
        "omega_tilde_rad_s": model.omega_tilde[0],
        "delta_eps_rad_s": model.delta_eps,
        "t_gate_s": t_gate,
        "kappa2_for_theta": kappa2_back,
        "infidelity_interior": 1.0 - fid_interior,
        "infidelity_full_space": 1.0 - fid_full,
    }, cfg)
    return 0


def run_dipolar(cfg: RunConfig) -> int:
    out = _require_out(cfg, "csv")
    rows = []
    for r_nm in cfg.dipolar.r_nm:
        sep = (r_nm * 1e-9, 0.0, 0.0)
        j_opt, j_mag = dipolar_couplings(sep, cfg.dipolar.p1, cfg.dipolar.p2,
                                         cfg.material,
                                         mag_power=cfg.dipolar.mag_power)
        e_r = np.array([1.0, 0.0, 0.0])
        p1 = np.asarray(cfg.dipolar.p1, float)
        p2 = np.asarray(cfg.dipolar.p2, float)
        p1 = p1 / np.linalg.norm(p1)
        p2 = p2 / np.linalg.norm(p2)
        ang = float(p1 @ p2 - 3.0 * (p1 @ e_r) * (p2 @ e_r))
        rows.append((r_nm, ang, j_opt, to_ordinary(j_opt), j_mag,
                     to_ordinary(j_mag)))
    write_csv(out, ("r_nm", "angular_factor", "j_opt_rad_s", "j_opt_hz",
                    "j_mag_rad_s", "j_mag_hz"), rows, cfg)
    return 0


def _model_payload(model) -> dict:
    payload = {
        "tier": model.tier, "path": model.path, "nu_rad_s": model.nu,
        "omega_tilde_rad_s": list(model.omega_tilde),
        "delta_scalar_rad_s": list(model.delta_scalar),
        "delta_n_rad_s": list(model.delta_n),
        "delta_eps_rad_s": model.delta_eps,
        "kappa1": model.kappa1, "kappa2": model.kappa2,
        "omega_gate_rad_s": model.omega_gate,
    }
    if model.dipolar is not None:
        payload["dipolar"] = {
            "j_opt_rad_s": model.dipolar.j_opt,
            "j_mag_rad_s": model.dipolar.j_mag,
            "j_opt_tilde_rad_s": model.dipolar.j_opt_tilde,
            "omega_a_rad_s": list(model.dipolar.omega_a),
        }
    return payload


def _save_matrices(path: str, operator) -> None:
    arrays = {"static": operator.static}
    for i, (matrix, freq) in enumerate(operator.terms):
        arrays[f"term_{i}"] = matrix
        arrays[f"freq_{i}"] = np.array(freq)
    np.savez(path, **arrays)


def run_hamiltonian(cfg: RunConfig) -> int:
    out = _require_out(cfg, "json")
    tier = cfg.ham.tier
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if tier == "mw":
            gate = mw_hamiltonian(_mw_drive(cfg),
                                  include_carrier=cfg.gate.include_carrier)
            payload = _model_payload(gate.effective)
            payload.update(delta_identity_rad_s=gate.delta_identity,
                           delta_sp_rad_s=gate.delta_sp)
            operator = gate.full
        elif tier == "lab":
            drive = _raman_drive(cfg)
            single = dataclasses.replace(drive, eta=(drive.eta[0],))
            operator = lab_hamiltonian(single, omega0=cfg.ham.omega0)
            payload = {
                "omega0_rad_s": cfg.ham.omega0,
                "omega1_rad_s": drive.omega1, "omega2_rad_s": drive.omega2,
                "eps1_rad_s": drive.eps1, "eps2_rad_s": drive.eps2,
                "nu_rad_s": drive.nu, "eta": drive.eta[0],
                "path": drive.path,
            }
        else:
            drive = _raman_drive(cfg)
            model1, op1 = effective_I(drive)
            if tier == "eff1":
                payload, operator = _model_payload(model1), op1
            elif tier == "eff2":
                model2, op2 = effective_II(model1, model1,
                                           time_conditioned=True)
                payload, operator = _model_payload(model2), op2
            else:
                r_nm = cfg.dipolar.r_nm[0]
                j_opt, j_mag = dipolar_couplings(
                    (r_nm * 1e-9, 0.0, 0.0), cfg.dipolar.p1, cfg.dipolar.p2,
                    cfg.material, mag_power=cfg.dipolar.mag_power)
                model, operator = effective_I_dipolar(
                    drive, j_opt, j_mag, n_mean=cfg.ham.n_mean)
                payload = _model_payload(model)
                payload["separation_nm"] = r_nm
    payload["hilbert_dims"] = list(operator.space.dims)
    payload["n_terms"] = len(operator.terms)
    if cfg.output.npz is not None:
        _save_matrices(cfg.output.npz, operator)
        payload["matrices_npz"] = cfg.output.npz
    write_json(out, {"tier": tier, "coefficients": payload}, cfg)
    return 0


# --------------------------------------------------------------- entry point

_RUNNERS = {
    "modes": run_modes,
    "eta-map": run_eta_map,
    "hamiltonian": run_hamiltonian,
    "gate-sim": run_gate_sim,
    "sweep": run_sweep,
    "exact-check": run_exact_check,
    "dipolar": run_dipolar,
}


def preset_path(name: str) -> str:
    base = resources.files("nvphonon") / "presets" / f"{name}.cfg"
    if not base.is_file():
        raise ConfigError(f"unknown preset {name!r}", key="preset")
    return str(base)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--preset", help="named in-package config")
    parser.add_argument("--out", help="primary output path")
    parser.add_argument("--json", dest="json_out",
                        help="secondary JSON output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nvphonon",
        description="Nanoparticle phonon modes and strain-coupled NV gates")
    parser.add_argument("--version", action="version",
                        version=f"nvphonon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modes", help="eigenmode table for one geometry")
    p.add_argument("which", nargs="?", choices=("sphere", "pbc"))
    p.add_argument("--diameter-nm", type=float)
    p.add_argument("--lmax", type=int)
    p.add_argument("--nmax", type=int)
    _add_common(p)

    p = sub.add_parser("eta-map", help="coupling and frequency maps")
    p.add_argument("--d-nm", help="start:stop:step or comma list")
    p.add_argument("--series", help="comma list of " + ",".join(ETA_MAP_SERIES))
    p.add_argument("--radial", action="store_true")
    p.add_argument("--diameter-nm", type=float)
    _add_common(p)

    p = sub.add_parser("hamiltonian", help="coefficient tables")
    p.add_argument("action", choices=("dump",))
    p.add_argument("--tier", choices=("lab", "eff1", "eff2", "mw", "dipolar"))
    p.add_argument("--diameter-nm", type=float)
    p.add_argument("--matrices", help="also save dense matrices (npz)")
    _add_common(p)

    p = sub.add_parser("gate-sim", help="two-center gate trajectory")
    p.add_argument("--tier")
    p.add_argument("--k1", type=float)
    p.add_argument("--k2", type=float)
    p.add_argument("--m", type=int, help="closure multiple of 2 pi/delta-eps")
    p.add_argument("--diameter-nm", type=float)
    p.add_argument("--fock-dim", type=int)
    _add_common(p)

    p = sub.add_parser("sweep", help="gate figure of merit over sizes")
    p.add_argument("--k1", help="comma list")
    p.add_argument("--k2", help="comma list")
    p.add_argument("--d-nm", help="start:stop:step or comma list")
    _add_common(p)

    p = sub.add_parser("exact-check", help="closed-form vs integrated gate")
    p.add_argument("--k2", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--fock-dim", type=int)
    p.add_argument("--diameter-nm", type=float)
    _add_common(p)

    p = sub.add_parser("dipolar", help="dipole-dipole coupling table")
    p.add_argument("--r-nm", help="start:stop:step or comma list")
    p.add_argument("--mag-power", type=int, choices=(2, 3))
    _add_common(p)
    return parser


# argparse attribute -> config key, per subcommand
_FLAG_KEYS = {
    "modes": {"which": "modes.which", "diameter_nm": "geometry.diameter_nm",
              "lmax": "modes.lmax", "nmax": "modes.nmax"},
    "eta-map": {"d_nm": "etamap.d_nm", "series": "etamap.series",
                "diameter_nm": "geometry.diameter_nm"},
    "hamiltonian": {"tier": "ham.tier",
                    "diameter_nm": "geometry.diameter_nm",
                    "matrices": "output.npz"},
    "gate-sim": {"tier": "gate.tier", "k1": "drive.kappa1",
                 "k2": "drive.kappa2", "m": "gate.m_closure",
                 "diameter_nm": "geometry.diameter_nm",
                 "fock_dim": "gate.fock_dim"},
    "sweep": {"k1": "sweep.k1", "k2": "sweep.k2", "d_nm": "sweep.d_nm"},
    "exact-check": {"k2": "exact.kappa2", "m": "exact.m",
                    "fock_dim": "exact.fock_dim",
                    "diameter_nm": "geometry.diameter_nm"},
    "dipolar": {"r_nm": "dipolar.r_nm", "mag_power": "dipolar.mag_power"},
}

# subcommands whose --out is the JSON report rather than a CSV
_JSON_OUT = ("exact-check", "hamiltonian")


def _cli_items(args: argparse.Namespace) -> dict:
    items = {}
    for attr, key in _FLAG_KEYS[args.command].items():
        value = getattr(args, attr, None)
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        items[key] = str(value)
    if getattr(args, "radial", False):
        items["etamap.radial"] = "true"
    out_key = "output.json" if args.command in _JSON_OUT else "output.csv"
    if args.out is not None:
        items[out_key] = args.out
    if args.json_out is not None:
        items["output.json"] = args.json_out
    return items


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    path = args.config
    if args.preset is not None:
        if path is not None:
            raise ConfigError("--config and --preset are exclusive")
        path = preset_path(args.preset)
    cfg = load_config(path, _cli_items(args), command=args.command)
    return _RUNNERS[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"nvphonon: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"nvphonon: numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3
    except NvPhononError as exc:
        print(f"nvphonon: config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
