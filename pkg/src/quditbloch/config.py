"""Simulation config files (YAML or JSON).

Example::

    spins: ["1/2", "1"]
    field:
      - indices: ["1,z", "unit"]
        profile: {kind: const, amplitude: 1.0}
      - indices: ["1,1,x", "2,z"]
        profile:
          - {kind: cos, amplitude: 0.2, omega: 1.0, phase: 0.0}
          - {kind: pulse, amplitude: 0.5, t_on: 0.0, t_off: 2.0}
    initial:
      kind: product
      vectors:
        - [0, 0, 1]          # components in canonical order
        - {m: 1}             # or a pure substate |S, m>
                             # or {"k,q,x": value, ...} by label
    integration: {method: rk4, dt: 1.0e-3, t0: 0, t1: 10, sample_every: 100}
    output: {path: run.csv, format: csv, monitors: [bloch_length, purity, energy, min_eig]}
    validation: {tol: 1.0e-8}
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
import yaml

from .basis import BasisLabel, label_index
from .dynamics import MONITORS, BlochState, SystemSpec, bloch_from_density, product_state
from .field import Constant, Cosine, FieldSpec, FieldTerm, Pulse, Sine
from .integrator import IntegrationConfig
from .wigner import HalfInteger

__all__ = ["ConfigError", "SimConfig", "load_config", "parse_config", "load_density"]


class ConfigError(ValueError):
    pass


@dataclass
class SimConfig:
    system: SystemSpec
    field: FieldSpec
    initial: BlochState
    integration: IntegrationConfig
    output_path: Path | None = None
    output_format: str = "csv"
    monitors: tuple = MONITORS
    tol: float = 1e-8
    raw: dict = dc_field(default_factory=dict, repr=False)


def _primitive(d: dict):
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError(f"profile entry needs a 'kind': {d!r}")
    kind = str(d["kind"]).lower()
    try:
        amp = float(d["amplitude"])
        if kind in ("const", "constant"):
            return Constant(amp)
        if kind in ("cos", "cosine"):
            return Cosine(amp, float(d["omega"]), float(d.get("phase", 0.0)))
        if kind in ("sin", "sine"):
            return Sine(amp, float(d["omega"]), float(d.get("phase", 0.0)))
        if kind == "pulse":
            return Pulse(amp, float(d["t_on"]), float(d["t_off"]))
    except KeyError as exc:
        raise ConfigError(f"profile {kind!r} is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad profile {d!r}: {exc}") from None
    raise ConfigError(f"unknown profile kind {kind!r}")


def _field(system: SystemSpec, entries) -> FieldSpec:
    terms = []
    for entry in entries or []:
        labels = entry.get("indices")
        if not isinstance(labels, (list, tuple)) or len(labels) != system.count:
            raise ConfigError(f"field term needs {system.count} basis labels: {entry!r}")
        try:
            index = tuple(label_index(s, BasisLabel.parse(lab)) for s, lab in zip(system.spins, labels))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        prof = entry.get("profile")
        prims = prof if isinstance(prof, list) else [prof]
        terms.append(FieldTerm(index, tuple(_primitive(p) for p in prims)))
    return FieldSpec(tuple(terms))


def _local_vector(spin, spec) -> np.ndarray:
    n = (spin.twice_value + 1) ** 2 - 1
    if isinstance(spec, dict) and set(spec) == {"m"}:
        # pure magnetic substate |S, m>
        try:
            m = HalfInteger.parse(str(spec["m"]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if abs(m.twice_value) > spin.twice_value or (spin.twice_value - m.twice_value) % 2:
            raise ConfigError(f"m = {m} is not a substate of spin {spin}")
        d = spin.twice_value + 1
        rho = np.zeros((d, d), dtype=complex)
        row = (spin.twice_value - m.twice_value) // 2
        rho[row, row] = 1.0
        return bloch_from_density(SystemSpec((spin,)), rho).R[1:]
    if isinstance(spec, dict):
        vec = np.zeros(n)
        for lab, v in spec.items():
            try:
                idx = label_index(spin, BasisLabel.parse(lab))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            if idx == 0:
                raise ConfigError("local Bloch vectors have no unit component")
            vec[idx - 1] = float(v)
        return vec
    vec = np.asarray(spec, dtype=float).reshape(-1)
    if vec.size != n:
        raise ConfigError(f"spin {spin} local Bloch vector needs {n} components, got {vec.size}")
    return vec


def load_density(path: Path) -> np.ndarray:
    """Density matrix from ``.npy`` or JSON ``{"real": [[..]], "imag": [[..]]}``."""
    path = Path(path)
    if path.suffix == ".npy":
        return np.load(path).astype(complex)
    data = json.loads(path.read_text())
    rho = np.asarray(data["real"], dtype=float).astype(complex)
    if "imag" in data:
        rho = rho + 1j * np.asarray(data["imag"], dtype=float)
    return rho


def _initial(system: SystemSpec, spec: dict, base: Path) -> BlochState:
    kind = str(spec.get("kind", "product")).lower()
    if kind == "product":
        vectors = spec.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != system.count:
            raise ConfigError("product initial state needs one vector per qudit")
        state = product_state(system, [_local_vector(s, v) for s, v in zip(system.spins, vectors)])
    elif kind == "density":
        rho = load_density(base / spec["path"])
        if not np.allclose(rho, rho.conj().T, atol=1e-12):
            raise ConfigError("initial density matrix is not Hermitian")
        state = bloch_from_density(system, rho)
    elif kind == "bloch":
        R = np.asarray(spec["R"], dtype=float)
        if R.size != system.size:
            raise ConfigError(f"Bloch initial state needs {system.size} components, got {R.size}")
        state = BlochState(system, R)
    else:
        raise ConfigError(f"unknown initial state kind {kind!r}")
    return state


def parse_config(raw: dict, base: Path = Path(".")) -> SimConfig:
    raw = copy.deepcopy(raw)
    try:
        system = SystemSpec(tuple(str(s) for s in raw["spins"]))
        field = _field(system, raw.get("field", []))
        initial = _initial(system, raw.get("initial", {"kind": "product", "vectors": None}), base)
        integ = raw.get("integration", {}) or {}
        integration = IntegrationConfig(
            method=str(integ.get("method", "rk4")),
            dt=float(integ.get("dt", 1e-3)),
            t0=float(integ.get("t0", 0.0)),
            t1=float(integ.get("t1", 1.0)),
            sample_every=int(integ.get("sample_every", 1)),
            rtol=float(integ.get("rtol", 1e-10)),
            atol=float(integ.get("atol", 1e-12)),
            dt_init=None if integ.get("dt_init") is None else float(integ["dt_init"]),
        )
        out = raw.get("output", {}) or {}
        fmt = str(out.get("format", "csv")).lower()
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown output format {fmt!r}")
        mons = tuple(out.get("monitors", MONITORS))
        unknown = set(mons) - set(MONITORS)
        if unknown:
            raise ConfigError(f"unknown monitors {sorted(unknown)}")
        tol = float((raw.get("validation") or {}).get("tol", 1e-8))
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"missing config key {exc.args[0]!r}") from None
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(str(exc)) from None
    path = out.get("path")
    return SimConfig(
        system=system,
        field=field,
        initial=initial,
        integration=integration,
        output_path=None if path is None else base / path,
        output_format=fmt,
        monitors=mons,
        tol=tol,
        raw=raw,
    )


def load_config(path) -> SimConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    return parse_config(raw, path.parent)
