"""Flat `key = value` run configuration for the command line front end.

One setting per line, `#` comments, keys namespaced by a section prefix
(`drive.kappa2 = 0.05`). Unknown keys and duplicate keys are rejected with
the offending line number. Values are converted to SI / angular units here,
exactly once: suffixed keys (`*_nm`, `*_mhz`, `*_ghz`, `*_thz`) take the
ordinary-unit number and everything downstream sees meters and rad/s.

The resolved `RunConfig` is frozen; `config_digest` hashes the canonical
key/value list so output files can record which configuration made them.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .material import MaterialModel, diamond_default, to_angular

COMMANDS = ("modes", "eta-map", "hamiltonian", "gate-sim", "sweep",
            "exact-check", "dipolar")

ETA_MAP_SERIES = ("pbc", "breathing_n0", "breathing_n1", "quad_m0", "quad_m1")


# ----------------------------------------------------------- value converters

def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def _parse_int(text: str) -> int:
    try:
        return int(text, 10)
    except ValueError:
        raise ValueError(f"expected an integer, got {text!r}") from None


def _parse_floats(text: str) -> tuple:
    return tuple(_parse_float(part) for part in text.split(","))


def _parse_range(text: str) -> tuple:
    """`start:stop:step` (inclusive) or a comma list."""
    if ":" not in text:
        return _parse_floats(text)
    pieces = text.split(":")
    if len(pieces) != 3:
        raise ValueError(f"ranges are start:stop:step, got {text!r}")
    start, stop, step = (_parse_float(p) for p in pieces)
    if step <= 0.0 or stop < start:
        raise ValueError(f"range needs stop >= start and step > 0, got {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(count))


def _parse_vec3(text: str) -> tuple:
    vec = _parse_floats(text)
    if len(vec) != 3:
        raise ValueError(f"expected three comma-separated numbers, got {text!r}")
    return vec


def _parse_pair(text: str) -> tuple:
    pair = tuple(part.strip() for part in text.split(","))
    if len(pair) != 2:
        raise ValueError(f"expected two comma-separated labels, got {text!r}")
    return pair


def _choice(*options: str):
    def convert(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {options}, got {text!r}")
        return text
    return convert


def _series_list(text: str) -> tuple:
    tags = tuple(part.strip() for part in text.split(","))
    for tag in tags:
        if tag not in ETA_MAP_SERIES:
            raise ValueError(
                f"unknown series {tag!r}; known: {', '.join(ETA_MAP_SERIES)}")
    return tags


_IDENTITY = str

# key -> (converter, default). None defaults mean "not set"; commands check
# for what they need at run time so unrelated sections stay optional.
_SCHEMA = {
    "command": (_choice(*COMMANDS), None),
    "seed": (_parse_int, 0),

    "material.zeta": (_parse_float, None),
    "material.beta": (_parse_float, None),
    "material.rho": (_parse_float, None),
    "material.v_t": (_parse_float, None),
    "material.v_l": (_parse_float, None),
    "material.c_pbc": (_parse_float, None),
    "material.gamma_e": (_parse_float, None),
    "material.gamma_nd": (_parse_float, None),
    "material.lambda0": (_parse_float, None),
    "material.n_refr": (_parse_float, None),
    "material.xi0": (_parse_float, None),
    "material.delta_es": (_parse_float, None),

    "geometry.shape": (_choice("sphere", "box"), "sphere"),
    "geometry.diameter_nm": (_parse_float, None),
    "geometry.edges_nm": (_parse_vec3, None),

    "mode.source": (_choice("pbc", "sphere"), "pbc"),
    "mode.family": (_choice("spheroidal", "torsional"), "spheroidal"),
    "mode.l": (_parse_int, 0),
    "mode.m": (_parse_int, 0),
    "mode.n": (_parse_int, 0),
    "mode.position": (_parse_vec3, (0.0, 0.0, 0.0)),

    "drive.kappa1": (_parse_float, 0.05),
    "drive.kappa2": (_parse_float, 0.05),
    "drive.path": (_choice("single_path", "double_path"), "double_path"),
    "drive.compensate_eta2": (_parse_bool, True),
    "drive.omega_mw_mhz": (_parse_float, 0.0),
    "drive.omega1_mhz": (_parse_float, None),
    "drive.eps1_ghz": (_parse_float, None),
    "drive.delta_eps_mhz": (_parse_float, None),

    "gate.tier": (_choice("rotating", "effective_I", "effective_II", "mw"),
                  "effective_I"),
    "gate.m_closure": (_parse_int, 100),
    "gate.echo": (_parse_bool, True),
    "gate.initial": (_parse_pair, ("g+1", "g+1")),
    "gate.fock_dim": (_parse_int, 16),
    "gate.n_th": (_parse_float, 0.0),
    "gate.q_factor": (_parse_float, None),
    "gate.optical_decay": (_parse_bool, False),
    "gate.gamma": (_choice("bulk", "nd"), "bulk"),
    "gate.mw_model": (_choice("full", "rwa"), "full"),
    "gate.include_carrier": (_parse_bool, True),
    "gate.store_states": (_parse_bool, True),

    "modes.which": (_choice("sphere", "pbc"), "sphere"),
    "modes.lmax": (_parse_int, 2),
    "modes.nmax": (_parse_int, 2),
    "modes.family": (_choice("both", "torsional", "spheroidal"), "both"),

    "etamap.series": (_series_list, ("pbc",)),
    "etamap.d_nm": (_parse_range, tuple(float(d) for d in range(5, 51))),
    "etamap.radial": (_parse_bool, False),
    "etamap.points": (_parse_int, 200),

    "sweep.k1": (_parse_floats, (0.05,)),
    "sweep.k2": (_parse_floats, (0.05, 0.1)),
    "sweep.d_nm": (_parse_range, tuple(float(d) for d in range(5, 51))),
    "sweep.second_state": (_parse_bool, True),

    "exact.kappa2": (_parse_float, 0.05),
    "exact.m": (_parse_int, 2),
    "exact.fock_dim": (_parse_int, 16),
    "exact.guard_n": (_parse_int, 8),

    "dipolar.r_nm": (_parse_range, tuple(float(r) for r in range(5, 51))),
    "dipolar.p1": (_parse_vec3, (0.0, 0.0, 1.0)),
    "dipolar.p2": (_parse_vec3, (0.0, 0.0, 1.0)),
    "dipolar.mag_power": (_parse_int, 3),

    "ham.tier": (_choice("lab", "eff1", "eff2", "mw", "dipolar"), "eff1"),
    "ham.omega0_thz": (_parse_float, 470.0),
    "ham.n_mean": (_parse_float, 0.0),

    "output.csv": (_IDENTITY, None),
    "output.json": (_IDENTITY, None),
    "output.npz": (_IDENTITY, None),
}

_MATERIAL_KEYS = tuple(k for k in _SCHEMA if k.startswith("material."))


# ------------------------------------------------------------------- parsing

def parse_config_text(text: str, source: str = "<config>") -> list:
    """Split config text into (line_no, key, raw_value) triples."""
    entries = []
    seen = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value' in {source}",
                              line=line_no)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=line_no)
        if key in seen:
            raise ConfigError(
                f"duplicate key (first set on line {seen[key]})",
                line=line_no, key=key)
        seen[key] = line_no
        entries.append((line_no, key, value))
    return entries


def _convert_all(entries) -> dict:
    values = {}
    for line_no, key, raw in entries:
        if key not in _SCHEMA:
            raise ConfigError("unknown key", line=line_no, key=key)
        converter, _ = _SCHEMA[key]
        try:
            values[key] = converter(raw)
        except ValueError as exc:
            raise ConfigError(str(exc), line=line_no, key=key) from None
    return values


def config_digest(values: dict) -> str:
    """Stable short hash of the effective (converted) settings.

    Output destinations are excluded so the digest identifies what was
    computed, not where it was written.
    """
    canon = "\n".join(f"{k} = {values[k]!r}" for k in sorted(values)
                      if not k.startswith("output."))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


# ------------------------------------------------------------ resolved config

@dataclass(frozen=True)
class ModeSelect:
    source: str
    family: str
    l: int
    m: int
    n: int
    position: tuple   # (r / R, theta, phi)


@dataclass(frozen=True)
class DriveSettings:
    kappa1: float
    kappa2: float
    path: str
    compensate_eta2: bool
    omega_mw: float                 # rad/s
    omega1: float | None            # rad/s; raw-parameter drives only
    eps1: float | None              # rad/s
    delta_eps: float | None         # rad/s target for eps2 = eps1 - delta_eps


@dataclass(frozen=True)
class GateSettings:
    tier: str
    m_closure: int
    echo: bool
    initial: tuple
    fock_dim: int
    n_th: float
    q_factor: float | None
    optical_decay: bool
    gamma: str
    mw_model: str
    include_carrier: bool
    store_states: bool


@dataclass(frozen=True)
class SweepSettings:
    k1: tuple
    k2: tuple
    d_nm: tuple
    second_state: bool


@dataclass(frozen=True)
class ModesSettings:
    which: str
    lmax: int
    nmax: int
    family: str


@dataclass(frozen=True)
class EtaMapSettings:
    series: tuple
    d_nm: tuple
    radial: bool
    points: int


@dataclass(frozen=True)
class ExactSettings:
    kappa2: float
    m: int
    fock_dim: int
    guard_n: int


@dataclass(frozen=True)
class DipolarSettings:
    r_nm: tuple
    p1: tuple
    p2: tuple
    mag_power: int


@dataclass(frozen=True)
class HamSettings:
    tier: str
    omega0: float                   # rad/s
    n_mean: float


@dataclass(frozen=True)
class OutputSettings:
    csv: str | None
    json: str | None
    npz: str | None


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int
    material: MaterialModel
    shape: str
    diameter: float | None          # m
    edges: tuple | None             # m
    mode: ModeSelect
    drive: DriveSettings
    gate: GateSettings
    sweep: SweepSettings
    modes: ModesSettings
    etamap: EtaMapSettings
    exact: ExactSettings
    dipolar: DipolarSettings
    ham: HamSettings
    output: OutputSettings
    digest: str = field(default="", compare=False)

    def require_diameter(self) -> float:
        if self.diameter is None:
            raise ConfigError("this command needs geometry.diameter_nm")
        return self.diameter


def _get(values: dict, key: str):
    if key in values:
        return values[key]
    return _SCHEMA[key][1]


def resolve(values: dict, command: str | None = None) -> RunConfig:
    """Typed, SI-resolved configuration from converted key/values.

    `command` (from the CLI subcommand) must agree with any `command` key
    in the file; either alone is fine.
    """
    file_command = values.get("command")
    if command is not None and file_command is not None \
            and command != file_command:
        raise ConfigError(
            f"config says command = {file_command}, command line says "
            f"{command}", key="command")
    effective = command or file_command
    if effective is None:
        raise ConfigError("no command given (subcommand or 'command =' key)",
                          key="command")

    overrides = {k.split(".", 1)[1]: values[k]
                 for k in _MATERIAL_KEYS if k in values}
    material = diamond_default().with_overrides(**overrides)

    diameter = _get(values, "geometry.diameter_nm")
    edges = _get(values, "geometry.edges_nm")

    def angular(key: str, factor: float):
        raw = _get(values, key)
        return None if raw is None else to_angular(raw * factor)

    drive = DriveSettings(
        kappa1=_get(values, "drive.kappa1"),
        kappa2=_get(values, "drive.kappa2"),
        path=_get(values, "drive.path"),
        compensate_eta2=_get(values, "drive.compensate_eta2"),
        omega_mw=to_angular(_get(values, "drive.omega_mw_mhz") * 1e6),
        omega1=angular("drive.omega1_mhz", 1e6),
        eps1=angular("drive.eps1_ghz", 1e9),
        delta_eps=angular("drive.delta_eps_mhz", 1e6),
    )
    gate = GateSettings(
        tier=_get(values, "gate.tier"),
        m_closure=_get(values, "gate.m_closure"),
        echo=_get(values, "gate.echo"),
        initial=_get(values, "gate.initial"),
        fock_dim=_get(values, "gate.fock_dim"),
        n_th=_get(values, "gate.n_th"),
        q_factor=_get(values, "gate.q_factor"),
        optical_decay=_get(values, "gate.optical_decay"),
        gamma=_get(values, "gate.gamma"),
        mw_model=_get(values, "gate.mw_model"),
        include_carrier=_get(values, "gate.include_carrier"),
        store_states=_get(values, "gate.store_states"),
    )
    return RunConfig(
        command=effective,
        seed=_get(values, "seed"),
        material=material,
        shape=_get(values, "geometry.shape"),
        diameter=None if diameter is None else diameter * 1e-9,
        edges=None if edges is None else tuple(e * 1e-9 for e in edges),
        mode=ModeSelect(
            source=_get(values, "mode.source"),
            family=_get(values, "mode.family"),
            l=_get(values, "mode.l"),
            m=_get(values, "mode.m"),
            n=_get(values, "mode.n"),
            position=_get(values, "mode.position"),
        ),
        drive=drive,
        gate=gate,
        sweep=SweepSettings(
            k1=_get(values, "sweep.k1"),
            k2=_get(values, "sweep.k2"),
            d_nm=_get(values, "sweep.d_nm"),
            second_state=_get(values, "sweep.second_state"),
        ),
        modes=ModesSettings(
            which=_get(values, "modes.which"),
            lmax=_get(values, "modes.lmax"),
            nmax=_get(values, "modes.nmax"),
            family=_get(values, "modes.family"),
        ),
        etamap=EtaMapSettings(
            series=_get(values, "etamap.series"),
            d_nm=_get(values, "etamap.d_nm"),
            radial=_get(values, "etamap.radial"),
            points=_get(values, "etamap.points"),
        ),
        exact=ExactSettings(
            kappa2=_get(values, "exact.kappa2"),
            m=_get(values, "exact.m"),
            fock_dim=_get(values, "exact.fock_dim"),
            guard_n=_get(values, "exact.guard_n"),
        ),
        dipolar=DipolarSettings(
            r_nm=_get(values, "dipolar.r_nm"),
            p1=_get(values, "dipolar.p1"),
            p2=_get(values, "dipolar.p2"),
            mag_power=_get(values, "dipolar.mag_power"),
        ),
        ham=HamSettings(
            tier=_get(values, "ham.tier"),
            omega0=to_angular(_get(values, "ham.omega0_thz") * 1e12),
            n_mean=_get(values, "ham.n_mean"),
        ),
        output=OutputSettings(
            csv=_get(values, "output.csv"),
            json=_get(values, "output.json"),
            npz=_get(values, "output.npz"),
        ),
        digest=config_digest(values),
    )


def load_config(path: str | None, cli_items: dict | None = None,
                command: str | None = None) -> RunConfig:
    """Read a config file (optional), apply CLI overrides, resolve.

    cli_items maps full config keys to raw value strings; they win over the
    file and are reported as line 0 on conversion errors.
    """
    entries = []
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        entries = parse_config_text(text, source=path)
    if cli_items:
        entries = [(ln, k, v) for ln, k, v in entries if k not in cli_items]
        entries.extend((0, k, v) for k, v in cli_items.items())
    return resolve(_convert_all(entries), command=command)
