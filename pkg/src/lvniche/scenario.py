"""Scenario files and CSV output.

Scenario schema (JSON, UTF-8, unknown keys rejected)::

    {
      "title": "...",
      "species": [{"name": "...", "r": 1.0, "K": 26.0, "N0": 24.0}, ...],
      "alpha": [[1.0, 0.25], [1.0, 1.0]],
      "sim": {"method": "euler", "step": 0.01, "steps": 1500, "record_every": 1}
    }

``alpha[i][j]`` is the pressure of species j on species i.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from lvniche.dynamics import METHODS, SimulationProtocol, Trajectory
from lvniche.model import CompetitionModel, ModelError, PopulationState, validate_model

BUNDLED = ("unca_2species", "nova_k16", "nova_k29", "nova_k31", "tehuacan_k1_plus10", "nova_k31_swapped")

_TOP_KEYS = {"title", "species", "alpha", "sim"}
_SPECIES_KEYS = {"name", "r", "K", "N0"}
_SIM_KEYS = {"method", "step", "steps", "record_every"}


class ScenarioError(ValueError):
    """A scenario file is malformed or describes an invalid model."""


@dataclass(frozen=True)
class Scenario:
    model: CompetitionModel
    initial: PopulationState
    protocol: SimulationProtocol
    title: str = ""


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ScenarioError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{where}: expected an integer, got {value!r}")
    return value


def _keys(obj, required: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object, got {type(obj).__name__}")
    extra = sorted(set(obj) - required)
    if extra:
        raise ScenarioError(f"{where}: unknown key(s) {extra}")
    missing = sorted(required - set(obj))
    if missing:
        raise ScenarioError(f"{where}: missing key(s) {missing}")


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    _keys(doc, _TOP_KEYS, "scenario")
    if not isinstance(doc["title"], str):
        raise ScenarioError("title: expected a string")

    species = doc["species"]
    if not isinstance(species, list) or not species:
        raise ScenarioError("species: expected a nonempty list")
    names, r, K, N0 = [], [], [], []
    for i, sp in enumerate(species):
        where = f"species[{i}]"
        _keys(sp, _SPECIES_KEYS, where)
        if not isinstance(sp["name"], str):
            raise ScenarioError(f"{where}.name: expected a string")
        names.append(sp["name"])
        r.append(_number(sp["r"], f"{where}.r"))
        K.append(_number(sp["K"], f"{where}.K"))
        N0.append(_number(sp["N0"], f"{where}.N0"))
        if N0[-1] < 0:
            raise ScenarioError(f"{where}.N0: initial population must be >= 0, got {N0[-1]!r}")

    n = len(species)
    alpha = doc["alpha"]
    if not isinstance(alpha, list) or len(alpha) != n:
        raise ScenarioError(f"alpha: expected {n} rows")
    rows = []
    for i, row in enumerate(alpha):
        if not isinstance(row, list) or len(row) != n:
            raise ScenarioError(f"alpha[{i}]: expected a row of {n} numbers")
        rows.append([_number(v, f"alpha[{i}][{j}]") for j, v in enumerate(row)])
    for i in range(n):
        if rows[i][i] != 1.0:
            raise ScenarioError(f"alpha[{i}][{i}]: diagonal entry must be 1, got {rows[i][i]!r}")

    sim = doc["sim"]
    _keys(sim, _SIM_KEYS, "sim")
    if sim["method"] not in METHODS:
        raise ScenarioError(f"sim.method: expected one of {list(METHODS)}, got {sim['method']!r}")
    try:
        protocol = SimulationProtocol(
            sim["method"],
            _number(sim["step"], "sim.step"),
            _integer(sim["steps"], "sim.steps"),
            _integer(sim["record_every"], "sim.record_every"),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"sim: {exc}") from exc

    model = CompetitionModel(names, r, K, rows)
    try:
        validate_model(model)
    except ModelError as exc:
        raise ScenarioError(f"model: {exc}") from exc
    return Scenario(model, PopulationState(N0), protocol, doc["title"])


def serialize_scenario(scenario: Scenario) -> str:
    m = scenario.model
    p = scenario.protocol
    doc = {
        "title": scenario.title,
        "species": [
            {"name": name, "r": float(m.r[i]), "K": float(m.K[i]), "N0": float(scenario.initial.N[i])}
            for i, name in enumerate(m.species_names)
        ],
        "alpha": m.alpha.tolist(),
        "sim": {"method": p.method, "step": p.step, "steps": p.steps, "record_every": p.record_every},
    }
    return json.dumps(doc, indent=2) + "\n"


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario from a file path, or from a bundled name such as ``nova_k31``."""
    p = Path(path)
    if not p.exists() and str(path).removesuffix(".json") in BUNDLED:
        return bundled_scenario(str(path))
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from exc
    try:
        return parse_scenario(text)
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def bundled_scenario(name: str) -> Scenario:
    stem = name.removesuffix(".json")
    if stem not in BUNDLED:
        raise ScenarioError(f"no bundled scenario named {name!r}; available: {', '.join(BUNDLED)}")
    text = resources.files("lvniche.scenarios").joinpath(f"{stem}.json").read_text(encoding="utf-8")
    return parse_scenario(text)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_trajectory_csv(trajectory: Trajectory, names) -> str:
    names = list(names)
    if trajectory.N.shape[1] != len(names):
        raise ValueError(f"{len(names)} names for a {trajectory.N.shape[1]}-species trajectory")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", *names])
    for t, row in zip(trajectory.t, trajectory.N):
        w.writerow([_fmt(t), *(_fmt(v) for v in row)])
    return buf.getvalue()


def read_trajectory_csv(text: str) -> tuple[list[str], Trajectory]:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in row] for row in body], dtype=float).reshape(len(body), len(header))
    return header[1:], Trajectory(data[:, 0], data[:, 1:])
