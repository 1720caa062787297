"""Scenario configuration files and the built-in figure presets."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ValidationError
from .fock import Basis, FockState, check_state
from .evolution import StateVector
from .lattice import LatticeSpec


class ConfigError(ValidationError):
    """A scenario config is malformed; the message names the offending field."""


def _fail(where: str, msg: str):
    raise ConfigError(f"{where}: {msg}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(where, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        _fail(where, f"expected a finite number, got {value!r}")
    return float(value)


def _amplitude(value, where: str) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            _fail(where, "complex amplitudes are written as [re, im]")
        return complex(_number(value[0], f"{where}[0]"), _number(value[1], f"{where}[1]"))
    return complex(_number(value, where))


def _occupations(value, where: str, modes: int) -> FockState:
    if not isinstance(value, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in value):
        _fail(where, f"expected a list of integers, got {value!r}")
    try:
        return check_state(value, M=modes)
    except ValidationError as exc:
        _fail(where, str(exc))


@dataclass
class ScenarioConfig:
    """Lattice, initial state and z grid of one propagation run.

    ``coupling`` is either the M-1 nearest-neighbour couplings or a full
    M x M matrix. ``initial`` holds ``(state, amplitude)`` terms; a single
    Fock state is one term with amplitude 1.
    """

    modes: int
    beta: list[float]
    coupling: list
    initial: list[tuple[FockState, complex]] | None = None
    photons: int | None = None
    z_max: float = 2 * math.pi
    steps: int = 200
    outputs: dict[str, str] = field(default_factory=dict)
    name: str | None = None

    @classmethod
    def from_dict(cls, doc: Any, source: str = "config") -> "ScenarioConfig":
        if not isinstance(doc, dict):
            _fail(source, "top level must be a JSON object")
        known = {"name", "modes", "beta", "coupling", "initial", "photons", "z_max", "steps", "outputs"}
        for key in doc:
            if key not in known:
                _fail(f"{source}.{key}", "unknown field")
        if "modes" not in doc:
            _fail(f"{source}.modes", "required field missing")
        modes = doc["modes"]
        if isinstance(modes, bool) or not isinstance(modes, int) or modes < 1:
            _fail(f"{source}.modes", f"expected a positive integer, got {modes!r}")

        beta = doc.get("beta", [0.0] * modes)
        if isinstance(beta, (int, float)) and not isinstance(beta, bool):
            beta = [beta] * modes
        if not isinstance(beta, list):
            _fail(f"{source}.beta", "expected a list of numbers")
        beta = [_number(b, f"{source}.beta[{i}]") for i, b in enumerate(beta)]
        if len(beta) != modes:
            _fail(f"{source}.beta", f"expected {modes} values, got {len(beta)}")

        if "coupling" not in doc:
            _fail(f"{source}.coupling", "required field missing")
        coupling = doc["coupling"]
        if isinstance(coupling, (int, float)) and not isinstance(coupling, bool):
            coupling = [coupling] * (modes - 1)
        if not isinstance(coupling, list):
            _fail(f"{source}.coupling", "expected a list of couplings or an M x M matrix")
        if coupling and all(isinstance(row, list) for row in coupling):
            if len(coupling) != modes or any(len(row) != modes for row in coupling):
                _fail(f"{source}.coupling", f"coupling matrix must be {modes}x{modes}")
            coupling = [
                [_number(k, f"{source}.coupling[{i}][{j}]") for j, k in enumerate(row)] for i, row in enumerate(coupling)
            ]
        else:
            coupling = [_number(k, f"{source}.coupling[{i}]") for i, k in enumerate(coupling)]
            if len(coupling) != modes - 1:
                _fail(f"{source}.coupling", f"expected {modes - 1} nearest-neighbour couplings, got {len(coupling)}")

        initial = None
        if doc.get("initial") is not None:
            initial = cls._parse_initial(doc["initial"], f"{source}.initial", modes)

        photons = doc.get("photons")
        if photons is not None and (isinstance(photons, bool) or not isinstance(photons, int) or photons < 1):
            _fail(f"{source}.photons", f"expected a positive integer, got {photons!r}")
        if initial is not None:
            totals = {sum(s) for s, _ in initial}
            if len(totals) != 1:
                _fail(f"{source}.initial", "superposition mixes different photon numbers")
            n = totals.pop()
            if photons is not None and photons != n:
                _fail(f"{source}.photons", f"photons={photons} disagrees with the initial state ({n} photons)")
            photons = n

        z_max = _number(doc.get("z_max", 2 * math.pi), f"{source}.z_max")
        if z_max <= 0:
            _fail(f"{source}.z_max", "must be positive")
        steps = doc.get("steps", 200)
        if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
            _fail(f"{source}.steps", f"expected a positive integer, got {steps!r}")
        outputs = doc.get("outputs", {})
        if not isinstance(outputs, dict) or not all(isinstance(v, str) for v in outputs.values()):
            _fail(f"{source}.outputs", "expected an object of path strings")
        name = doc.get("name")
        if name is not None and not isinstance(name, str):
            _fail(f"{source}.name", "expected a string")

        cfg = cls(
            modes=modes, beta=beta, coupling=coupling, initial=initial, photons=photons,
            z_max=z_max, steps=steps, outputs=dict(outputs), name=name,
        )
        try:
            cfg.spec()
        except ValidationError as exc:
            _fail(f"{source}.coupling", str(exc))
        return cfg

    @staticmethod
    def _parse_initial(value, where: str, modes: int) -> list[tuple[FockState, complex]]:
        if isinstance(value, list):
            return [(_occupations(value, where, modes), 1 + 0j)]
        if not isinstance(value, dict):
            _fail(where, "expected a Fock state list, {'state': [...]} or {'superposition': [...]}")
        if "state" in value:
            return [(_occupations(value["state"], f"{where}.state", modes), 1 + 0j)]
        if "superposition" in value:
            terms = value["superposition"]
            if not isinstance(terms, list) or not terms:
                _fail(f"{where}.superposition", "expected a non-empty list of terms")
            out = []
            for i, term in enumerate(terms):
                w = f"{where}.superposition[{i}]"
                if not isinstance(term, dict) or "state" not in term or "amplitude" not in term:
                    _fail(w, "each term needs 'state' and 'amplitude'")
                out.append((_occupations(term["state"], f"{w}.state", modes), _amplitude(term["amplitude"], f"{w}.amplitude")))
            return out
        _fail(where, "expected 'state' or 'superposition'")

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {}
        if self.name is not None:
            doc["name"] = self.name
        doc["modes"] = self.modes
        doc["photons"] = self.photons
        doc["beta"] = list(self.beta)
        doc["coupling"] = [list(r) for r in self.coupling] if self.coupling and isinstance(self.coupling[0], list) else list(self.coupling)
        if self.initial is not None:
            if len(self.initial) == 1 and self.initial[0][1] == 1:
                doc["initial"] = {"state": list(self.initial[0][0])}
            else:
                doc["initial"] = {
                    "superposition": [
                        {"state": list(s), "amplitude": [a.real, a.imag]} for s, a in self.initial
                    ]
                }
        doc["z_max"] = self.z_max
        doc["steps"] = self.steps
        if self.outputs:
            doc["outputs"] = dict(self.outputs)
        return doc

    def spec(self) -> LatticeSpec:
        if self.coupling and isinstance(self.coupling[0], list):
            return LatticeSpec(self.beta, np.array(self.coupling))
        return LatticeSpec.chain(self.coupling, self.beta)

    def z_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.z_max, self.steps + 1)

    def initial_state(self, basis: Basis) -> StateVector:
        if self.initial is None:
            raise ConfigError("config.initial: required for propagation")
        return StateVector.from_superposition(basis, self.initial)


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a JSON scenario file, reporting syntax errors with line and column."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc
    return ScenarioConfig.from_dict(doc, source=str(path))


_S = 1 / math.sqrt(2)

PRESETS: dict[str, dict] = {
    # |5,5> in a beamsplitter of identical guides
    "fig2a": {"modes": 2, "beta": [1.0, 1.0], "coupling": [1.0], "initial": [5, 5], "z_max": 6.0, "steps": 600},
    # Bloch slope beta_1 - beta_2 = -4; two revival periods of 2 pi / sqrt(20)
    "fig2b": {
        "modes": 2, "beta": [0.0, 4.0], "coupling": [1.0], "initial": [5, 5],
        "z_max": 4 * math.pi / math.sqrt(20), "steps": 400,
    },
    "fig3a": {"modes": 3, "beta": [0.0, 0.0, 0.0], "coupling": [1.0, 1.0], "initial": [1, 0, 1], "z_max": 10.0, "steps": 1000},
    "fig3b": {"modes": 3, "beta": [0.0, 2.0, 0.0], "coupling": [1.0, 1.0], "initial": [1, 0, 1], "z_max": 10.0, "steps": 1000},
    "fig7": {
        "modes": 3, "beta": [0.0, 0.0, 0.0], "coupling": [_S, _S],
        "initial": {
            "superposition": [
                {"state": [2, 0, 0], "amplitude": _S},
                {"state": [1, 1, 0], "amplitude": 0.5 * _S},
                {"state": [1, 0, 1], "amplitude": -0.5},
                {"state": [0, 1, 1], "amplitude": -0.5 * _S},
            ]
        },
        "z_max": 4 * math.pi, "steps": 400,
    },
    # z = pi/4 is grid point 50
    "hom": {"modes": 2, "beta": [0.0, 0.0], "coupling": [1.0], "initial": [1, 1], "z_max": math.pi / 2, "steps": 100},
}


def preset(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    return ScenarioConfig.from_dict(dict(PRESETS[name], name=name), source=f"preset {name}")
