"""Scenario presets, runs, parameter sweeps and result files.

A scenario is described by a flat ``key = value`` text file with dotted keys::

    # seven-by-seven lattice, mixed start, moderate interaction
    lattice.n_a = 6
    lattice.n_b = 6
    model.u_over_omega = 0.125
    scenario.initial = mixed_center
    scenario.overlay = true

Values are parsed as JSON where possible (numbers, booleans, lists) and kept
as bare strings otherwise.  See ``CONFIG_KEYS`` for the full schema.
"""
from __future__ import annotations

import json
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._io import csv_text, fmt, write_atomic
from .angular import coupled_state
from .errors import BJJError, ConfigurationError, DomainError
from .lattice import LatticeShape, ModelParams, build_hamiltonian
from .observables import (
    ImbalanceDistribution,
    grid_to_csv,
    imbalance_distribution,
    mean_imbalance,
    odd_suppression_metric,
    site_probabilities,
    variance_imbalance,
)
from .photonics import FUSED_SILICA, CouplingLaw, FabricationPreset, build_layout, diagonal_overlay
from .propagation import AmplitudeField, decompose, evolve, evolve_trajectory

DEFAULT_SAMPLES = 201

CONFIG_KEYS = {
    "scenario.name": "label used in messages and output",
    "lattice.n_a": "number of A particles",
    "lattice.n_b": "number of B particles",
    "model.omega": "common tunneling rate (1/cm); default pi/(2 L)",
    "model.omega_a": "A tunneling rate (1/cm), overrides model.omega",
    "model.omega_b": "B tunneling rate (1/cm), overrides model.omega",
    "model.u_iso": "common interaction strength (1/cm)",
    "model.u_over_omega": "common interaction strength in units of omega_a",
    "model.u_a": "A-A interaction (1/cm)",
    "model.u_b": "B-B interaction (1/cm)",
    "model.u_ab": "A-B interaction (1/cm)",
    "model.detuning": "raw | shifted",
    "scenario.initial": "single_species_center | mixed_center | separated_corner | coupled(j,m) | fock(k,l) | amplitudes(path)",
    "scenario.t_final": "final propagation distance (cm); default pi/(2 omega)",
    "scenario.t_samples": "number of uniform samples on [0, t_final]",
    "scenario.overlay": "also simulate with diagonal couplings (true/false)",
    "sweep.u_iso": "list of interaction strengths (1/cm) to sweep",
    "sweep.u_over_omega": "list of interaction strengths in units of omega_a",
    "sweep.workers": "thread count for sweeps",
    "photonics.c_a": "law A prefactor (1/cm)",
    "photonics.alpha_a": "law A decay (1/um)",
    "photonics.c_b": "law B prefactor (1/cm)",
    "photonics.alpha_b": "law B decay (1/um)",
    "photonics.wavelength_nm": "wavelength (nm), metadata",
    "photonics.length_cm": "sample length (cm)",
}


@dataclass(frozen=True)
class ScenarioConfig:
    shape: LatticeShape
    params: ModelParams
    initial_state: str = "fock(0,0)"
    detuning_mode: str = "raw"
    overlay_enabled: bool = False
    t_final: float | None = None
    t_samples: int = DEFAULT_SAMPLES
    sweep: tuple[float, ...] | None = None
    fabrication: FabricationPreset = FUSED_SILICA
    name: str = "scenario"
    base_dir: str = "."
    workers: int | None = None

    def __post_init__(self):
        if self.detuning_mode not in ("raw", "shifted"):
            raise ConfigurationError(f"detuning mode must be raw or shifted, got {self.detuning_mode!r}")
        if int(self.t_samples) != self.t_samples or self.t_samples < 1:
            raise ConfigurationError(f"t_samples must be a positive integer, got {self.t_samples!r}")
        if self.t_final is not None and not (self.t_final > 0 and math.isfinite(self.t_final)):
            raise ConfigurationError(f"t_final must be positive, got {self.t_final!r}")

    @property
    def omega(self) -> float:
        """Reference tunneling rate setting the default final time."""
        return max(self.params.omega_a, self.params.omega_b)

    @property
    def final_time(self) -> float:
        if self.t_final is not None:
            return float(self.t_final)
        if self.omega <= 0:
            raise ConfigurationError("no tunneling: give scenario.t_final explicitly")
        return math.pi / (2 * self.omega)

    def times(self) -> np.ndarray:
        if self.t_samples == 1:
            return np.array([self.final_time])
        return np.linspace(0.0, self.final_time, self.t_samples)

    def echo(self) -> dict:
        """Flat dotted-key view of the configuration."""
        fab = self.fabrication
        return {
            "scenario.name": self.name,
            "lattice.n_a": self.shape.n_a,
            "lattice.n_b": self.shape.n_b,
            "model.omega_a": self.params.omega_a,
            "model.omega_b": self.params.omega_b,
            "model.u_a": self.params.u_a,
            "model.u_b": self.params.u_b,
            "model.u_ab": self.params.u_ab,
            "model.detuning": self.detuning_mode,
            "scenario.initial": self.initial_state,
            "scenario.t_final": self.final_time,
            "scenario.t_samples": self.t_samples,
            "scenario.overlay": self.overlay_enabled,
            "sweep.u_iso": list(self.sweep) if self.sweep is not None else None,
            "photonics.c_a": fab.law_a.c0,
            "photonics.alpha_a": fab.law_a.alpha,
            "photonics.c_b": fab.law_b.c0,
            "photonics.alpha_b": fab.law_b.alpha,
            "photonics.wavelength_nm": fab.wavelength_nm,
            "photonics.length_cm": fab.length_cm,
        }


# --- config files -----------------------------------------------------------

_LINE = re.compile(r"^\s*([A-Za-z_][\w.]*)\s*=\s*(.*?)\s*$")


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _LINE.match(line)
        if not match:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = match.groups()
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = json.loads(value)
        except json.JSONDecodeError:
            values[key] = value.strip("\"'")
    return values


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    values = parse_config_text(text)
    values.setdefault("_base_dir", str(path.parent))
    return values


def _number(values, key, default=None):
    value = values.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{key} must be a number, got {value!r}")
    return float(value)


def _flag(values, key, default=False):
    value = values.get(key, default)
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("on", "off", "yes", "no", "true", "false"):
        return value.lower() in ("on", "yes", "true")
    raise ConfigurationError(f"{key} must be a boolean, got {value!r}")


def config_from_values(values: dict) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from a dotted-key mapping."""
    unknown = set(values) - set(CONFIG_KEYS) - {"_base_dir"}
    if unknown:
        raise ConfigurationError(f"unknown keys: {sorted(unknown)}")
    fab = FabricationPreset(
        CouplingLaw(_number(values, "photonics.c_a", FUSED_SILICA.law_a.c0),
                    _number(values, "photonics.alpha_a", FUSED_SILICA.law_a.alpha)),
        CouplingLaw(_number(values, "photonics.c_b", FUSED_SILICA.law_b.c0),
                    _number(values, "photonics.alpha_b", FUSED_SILICA.law_b.alpha)),
        _number(values, "photonics.wavelength_nm", FUSED_SILICA.wavelength_nm),
        _number(values, "photonics.length_cm", FUSED_SILICA.length_cm),
    )
    for key in ("lattice.n_a", "lattice.n_b"):
        if key not in values:
            raise ConfigurationError(f"missing required key {key}")
    shape = LatticeShape(values["lattice.n_a"], values["lattice.n_b"])

    omega = _number(values, "model.omega", fab.omega)
    omega_a = _number(values, "model.omega_a", omega)
    omega_b = _number(values, "model.omega_b", omega)
    iso_keys = [k for k in ("model.u_iso", "model.u_over_omega") if k in values]
    split_keys = [k for k in ("model.u_a", "model.u_b", "model.u_ab") if k in values]
    if len(iso_keys) > 1 or (iso_keys and split_keys):
        raise ConfigurationError(f"conflicting interaction keys: {iso_keys + split_keys}")
    if "model.u_over_omega" in values:
        u = _number(values, "model.u_over_omega") * omega_a
        u_a = u_b = u_ab = u
    elif "model.u_iso" in values:
        u_a = u_b = u_ab = _number(values, "model.u_iso")
    else:
        u_a, u_b, u_ab = (_number(values, k, 0.0) for k in ("model.u_a", "model.u_b", "model.u_ab"))
    params = ModelParams(omega_a, omega_b, u_a, u_b, u_ab)

    sweep = None
    if "sweep.u_iso" in values and "sweep.u_over_omega" in values:
        raise ConfigurationError("give either sweep.u_iso or sweep.u_over_omega")
    for key, scale in (("sweep.u_iso", 1.0), ("sweep.u_over_omega", omega_a)):
        if key in values:
            raw = values[key]
            if not isinstance(raw, list) or not raw:
                raise ConfigurationError(f"{key} must be a non-empty list")
            sweep = tuple(_number({key: v}, key) * scale for v in raw)

    workers = values.get("sweep.workers")
    if workers is not None and (isinstance(workers, bool) or not isinstance(workers, int) or workers < 1):
        raise ConfigurationError(f"sweep.workers must be a positive integer, got {workers!r}")

    t_samples = values.get("scenario.t_samples", DEFAULT_SAMPLES)
    if isinstance(t_samples, bool) or not isinstance(t_samples, int):
        raise ConfigurationError(f"scenario.t_samples must be an integer, got {t_samples!r}")

    return ScenarioConfig(
        shape=shape,
        params=params,
        initial_state=str(values.get("scenario.initial", "fock(0,0)")),
        detuning_mode=str(values.get("model.detuning", "raw")),
        overlay_enabled=_flag(values, "scenario.overlay"),
        t_final=_number(values, "scenario.t_final"),
        t_samples=t_samples,
        sweep=sweep,
        fabrication=fab,
        name=str(values.get("scenario.name", "scenario")),
        base_dir=values.get("_base_dir", "."),
        workers=workers,
    )


# --- presets ----------------------------------------------------------------

_START = {
    "single": ((0, 12), "single_species_center"),
    "mixed": ((6, 6), "mixed_center"),
    "separated": ((6, 6), "separated_corner"),
    "symmetric": ((6, 6), "coupled(6,0)"),
    "singlet": ((6, 6), "coupled(0,0)"),
}
_STRENGTH = {"free": 0.0, "moderate": 0.125, "strong": 1.0}


def _preset_values(start: str, u_over_omega: float | None, sweep: bool) -> dict:
    (n_a, n_b), initial = _START[start]
    values = {
        "lattice.n_a": n_a,
        "lattice.n_b": n_b,
        "scenario.initial": initial,
        "scenario.overlay": n_a > 0,
        "model.detuning": "shifted",
    }
    if u_over_omega is not None:
        values["model.u_over_omega"] = u_over_omega
    if sweep:
        values["sweep.u_over_omega"] = [round(x, 6) for x in np.linspace(-2.0, 2.0, 33).tolist()]
        values["scenario.t_samples"] = 1
    return values


PRESETS = {}
for _start in _START:
    for _label, _u in _STRENGTH.items():
        PRESETS[f"{_label}-{_start}"] = _preset_values(_start, _u, sweep=False)
    PRESETS[f"sweep-{_start}"] = _preset_values(_start, None, sweep=True)
for _name, _values in PRESETS.items():
    _values["scenario.name"] = _name


def preset_config(name: str, overrides: dict | None = None) -> ScenarioConfig:
    """Named configuration, optionally with dotted-key overrides applied on top."""
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    values = dict(PRESETS[name])
    for key, value in (overrides or {}).items():
        if key in ("model.u_iso", "model.u_over_omega", "model.u_a", "model.u_b", "model.u_ab"):
            for k in ("model.u_iso", "model.u_over_omega", "model.u_a", "model.u_b", "model.u_ab"):
                values.pop(k, None)
        if key in ("sweep.u_iso", "sweep.u_over_omega"):
            values.pop("sweep.u_iso", None)
            values.pop("sweep.u_over_omega", None)
        values[key] = value
    return config_from_values(values)


# --- initial states ---------------------------------------------------------

_CALL = re.compile(r"^\s*(\w+)\s*(?:\((.*)\))?\s*$")


def _parse_half(text: str):
    try:
        return Fraction(text.strip())
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse {text!r} as a number") from exc


def resolve_initial_state(config: ScenarioConfig) -> AmplitudeField:
    shape = config.shape
    match = _CALL.match(config.initial_state)
    if not match:
        raise ConfigurationError(f"cannot parse initial state {config.initial_state!r}")
    kind, args = match.group(1), match.group(2)
    if kind == "single_species_center":
        if shape.n_a != 0 or shape.n_b % 2:
            raise ConfigurationError("single_species_center requires n_a = 0 and even n_b")
        return AmplitudeField.fock(shape, 0, shape.n_b // 2)
    if kind == "mixed_center":
        if shape.n_a != shape.n_b or shape.n_a % 2:
            raise ConfigurationError("mixed_center requires n_a = n_b and both even")
        return AmplitudeField.fock(shape, shape.n_a // 2, shape.n_b // 2)
    if kind == "separated_corner":
        return AmplitudeField.fock(shape, shape.n_a, 0)
    if kind == "fock":
        try:
            k, l = (int(x) for x in args.split(","))
        except (AttributeError, ValueError) as exc:
            raise ConfigurationError(f"fock(k,l) expects two integers, got {config.initial_state!r}") from exc
        try:
            return AmplitudeField.fock(shape, k, l)
        except IndexError as exc:
            raise ConfigurationError(str(exc)) from exc
    if kind == "coupled":
        parts = (args or "").split(",")
        if len(parts) != 2:
            raise ConfigurationError(f"coupled(j,m) expects two numbers, got {config.initial_state!r}")
        j, m = (_parse_half(p) for p in parts)
        try:
            return coupled_state(shape, j, m)
        except DomainError as exc:
            raise ConfigurationError(f"coupled({j},{m}): {exc}") from exc
    if kind == "amplitudes":
        if not args:
            raise ConfigurationError("amplitudes(path) needs a file path")
        return read_amplitudes(shape, Path(config.base_dir) / args.strip())
    raise ConfigurationError(f"unknown initial state {kind!r}")


def read_amplitudes(shape: LatticeShape, path) -> AmplitudeField:
    """Read a ``k,l,re,im`` CSV (header required); missing sites are zero."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read amplitudes {path}: {exc}") from exc
    if not lines or lines[0].replace(" ", "") != "k,l,re,im":
        raise ConfigurationError(f"{path}: header must be 'k,l,re,im'")
    c = np.zeros(shape.n_sites, dtype=complex)
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        try:
            k, l, re_, im_ = line.split(",")
            c[shape.index(int(k), int(l))] = complex(float(re_), float(im_))
        except (ValueError, IndexError) as exc:
            raise ConfigurationError(f"{path}:{lineno}: {exc}") from exc
    try:
        return AmplitudeField.from_unnormalized(shape, c)
    except DomainError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc


# --- running ----------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    """Results of one simulation branch (with or without diagonal couplings)."""

    trajectory: list[ImbalanceDistribution] = field(repr=False)
    final_grid: np.ndarray = field(repr=False)

    @property
    def final(self) -> ImbalanceDistribution:
        return self.trajectory[-1]


@dataclass(frozen=True)
class ScenarioResult:
    config: ScenarioConfig
    times: np.ndarray = field(repr=False)
    ideal: Branch = field(repr=False)
    with_overlay: Branch | None = field(default=None, repr=False)
    sweep: list[tuple[float, float, float | None]] | None = None

    def summary(self) -> dict:
        out = {"t_final": float(self.times[-1])}
        out.update(_moments(self.ideal.final, ""))
        if self.with_overlay is not None:
            out.update(_moments(self.with_overlay.final, "_overlay"))
        return out


def _moments(dist, suffix):
    out = {
        f"mean{suffix}": mean_imbalance(dist),
        f"variance{suffix}": variance_imbalance(dist),
    }
    if dist.shape.n_total % 2 == 0:
        out[f"odd_weight{suffix}"] = odd_suppression_metric(dist)
    return out


def scenario_overlay(config: ScenarioConfig) -> np.ndarray:
    fab = config.fabrication
    layout = build_layout(config.shape, config.params, fab.law_a, fab.law_b, fab.wavelength_nm, fab.length_cm)
    return diagonal_overlay(layout)


def _branch(config, params, initial, times, overlay):
    h = build_hamiltonian(config.shape, params, config.detuning_mode, overlay)
    fields = evolve_trajectory(decompose(h), initial, times)
    return Branch([imbalance_distribution(f) for f in fields], site_probabilities(fields[-1]))


def _final_variance(config, params, initial, overlay):
    h = build_hamiltonian(config.shape, params, config.detuning_mode, overlay)
    return variance_imbalance(imbalance_distribution(evolve(decompose(h), initial, config.final_time)))


def _sweep_point(config, initial, overlay, u):
    params = config.params.with_interaction(u)
    plain = _final_variance(config, params, initial, None)
    dressed = _final_variance(config, params, initial, overlay) if overlay is not None else None
    return (u, plain, dressed)


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Simulate the configured trajectory and, if requested, the sweep."""
    try:
        initial = resolve_initial_state(config)
        times = config.times()
        overlay = scenario_overlay(config) if config.overlay_enabled else None
        ideal = _branch(config, config.params, initial, times, None)
        dressed = _branch(config, config.params, initial, times, overlay) if overlay is not None else None
        sweep = None
        if config.sweep is not None:
            workers = config.workers or min(8, os.cpu_count() or 1)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                sweep = list(pool.map(lambda u: _sweep_point(config, initial, overlay, u), config.sweep))
    except BJJError as exc:
        raise type(exc)(f"[{config.name}] {exc}") from exc
    return ScenarioResult(config, times, ideal, dressed, sweep)


# --- output -----------------------------------------------------------------


def _trajectory_csv(times, branch):
    rows = []
    for t, dist in zip(times, branch.trajectory):
        rows.extend((t, tm, p) for tm, p in zip(dist.two_m.tolist(), dist.probs))
    return csv_text(("t_cm", "two_m", "p"), rows)


def _sweep_csv(sweep):
    return csv_text(
        ("u_per_cm", "var_no_overlay", "var_overlay"),
        ((u, a, "" if b is None else b) for u, a, b in sweep),
    )


def _json_ready(obj):
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_json_ready(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def emit(results: ScenarioResult, format: str = "csv", out_dir=".") -> list[Path]:
    """Write result files atomically; returns the written paths in order."""
    if format not in ("csv", "json"):
        raise ConfigurationError(f"unknown output format {format!r}")
    out = Path(out_dir)
    summary = {"config": results.config.echo(), "summary": results.summary()}
    written = [write_atomic(out / "summary.json", _dump_json(summary))]
    branches = [("", results.ideal)]
    if results.with_overlay is not None:
        branches.append(("_overlay", results.with_overlay))

    if format == "csv":
        for suffix, branch in branches:
            written.append(write_atomic(out / f"distribution{suffix}.csv", branch.final.to_csv()))
            written.append(write_atomic(out / f"trajectory{suffix}.csv", _trajectory_csv(results.times, branch)))
            written.append(write_atomic(out / f"grid{suffix}.csv", grid_to_csv(branch.final_grid)))
        if results.sweep is not None:
            written.append(write_atomic(out / "sweep.csv", _sweep_csv(results.sweep)))
        return written

    payload = dict(summary)
    payload["times"] = results.times.tolist()
    for suffix, branch in branches:
        key = "ideal" if not suffix else "overlay"
        payload[key] = {
            "two_m": branch.final.two_m.tolist(),
            "trajectory": [d.probs.tolist() for d in branch.trajectory],
            "final_grid": branch.final_grid.tolist(),
        }
    if results.sweep is not None:
        payload["sweep"] = [
            {"u_per_cm": u, "var_no_overlay": a, "var_overlay": b} for u, a, b in results.sweep
        ]
    written.append(write_atomic(out / "results.json", _dump_json(payload)))
    return written


def with_overlay(config: ScenarioConfig, enabled: bool) -> ScenarioConfig:
    return replace(config, overlay_enabled=enabled)
