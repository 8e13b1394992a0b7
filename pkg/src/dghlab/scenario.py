"""Scenario configs: a YAML document describing one experiment run.

Every field is validated before the run and unknown keys are rejected, so a
typo in a config never silently changes an experiment.  See the README for
the full schema and one example per experiment kind.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .grid import Grid, GridKind, make_grid
from .solver import PhysParams, SimConfig

__all__ = ["ExperimentKind", "Scenario", "ScenarioError", "load_scenario", "parse_scenario"]


class ScenarioError(ValueError):
    """Invalid scenario configuration."""


class ExperimentKind(enum.Enum):
    FREE_RUN = "FreeRun"
    SUPPORT_PROPAGATION = "SupportPropagation"
    TAIL_FORMATION = "TailFormation"
    CONTINUATION_PROBE = "ContinuationProbe"
    DISSIPATIVE_EQUIVALENCE = "DissipativeEquivalence"
    INVARIANT_AUDIT = "InvariantAudit"
    MANUFACTURED_CONVERGENCE = "ManufacturedConvergence"


_GRID_KEYS = {"kind", "n", "half_width"}
_PARAM_KEYS = {"omega", "gamma", "lambda"}
_INITIAL_KEYS = {"family", "amplitude", "center", "width", "modes", "mean", "space"}
_SOLVER_KEYS = {"dt", "t_end", "snapshot_stride", "blowup_guard"}
_TOP_KEYS = {"name", "kind", "grid", "params", "initial", "solver", "output_dir", "options"}

_OPTION_KEYS: dict[ExperimentKind, set[str]] = {
    ExperimentKind.FREE_RUN: set(),
    ExperimentKind.SUPPORT_PROPAGATION: {"support_threshold_rel", "margin_spacings"},
    ExperimentKind.TAIL_FORMATION: {"window_offset", "window_width", "rate_tol"},
    ExperimentKind.CONTINUATION_PROBE: {"residual_tol"},
    ExperimentKind.DISSIPATIVE_EQUIVALENCE: {"lambdas", "error_tol"},
    ExperimentKind.INVARIANT_AUDIT: {
        "energy_tol",
        "mass_tol",
        "discriminate_h2",
        "expect_decreasing_energy",
    },
    ExperimentKind.MANUFACTURED_CONVERGENCE: {"dts", "error_tol", "order", "order_tol"},
}


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: ExperimentKind
    grid: Grid
    params: PhysParams
    initial: dict
    solver: dict
    options: dict = field(default_factory=dict)
    output_dir: str | None = None

    def sim_config(self, **overrides) -> SimConfig:
        kw = dict(self.solver)
        kw.update(overrides)
        return SimConfig(self.grid, self.params, **kw)

    def echo(self) -> dict:
        """Plain-data copy of the configuration for run metadata."""
        return {
            "name": self.name,
            "kind": self.kind.value,
            "grid": {
                "kind": self.grid.kind.value,
                "n": self.grid.n,
                "length": self.grid.length,
            },
            "params": {
                "omega": self.params.omega,
                "gamma": self.params.gamma,
                "lambda": self.params.lam,
            },
            "initial": dict(self.initial),
            "solver": dict(self.solver),
            "options": dict(self.options),
        }


def _require_mapping(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where} must be a mapping, got {type(obj).__name__}")
    return obj


def _reject_unknown(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioError(
            f"unknown key(s) {sorted(unknown)} in {where}; allowed: {sorted(allowed)}"
        )


def _number(mapping: dict, key: str, where: str, default=None, minimum=None):
    if key not in mapping:
        if default is None:
            raise ScenarioError(f"missing required key '{key}' in {where}")
        return default
    v = mapping[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{where}.{key} must be a number, got {v!r}")
    if minimum is not None and v < minimum:
        raise ScenarioError(f"{where}.{key} must be >= {minimum}, got {v}")
    return float(v)


def parse_scenario(doc: dict, source: str = "<config>") -> Scenario:
    doc = _require_mapping(doc, source)
    _reject_unknown(doc, _TOP_KEYS, source)
    for key in ("name", "kind", "grid", "params", "initial", "solver"):
        if key not in doc:
            raise ScenarioError(f"missing required key '{key}' in {source}")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise ScenarioError("name must be a nonempty string")
    try:
        kind = ExperimentKind(doc["kind"])
    except ValueError:
        raise ScenarioError(
            f"unknown experiment kind {doc['kind']!r}; choose from "
            f"{[k.value for k in ExperimentKind]}"
        ) from None

    gsec = _require_mapping(doc["grid"], "grid")
    _reject_unknown(gsec, _GRID_KEYS, "grid")
    gkind = gsec.get("kind")
    if gkind not in ("periodic", "line"):
        raise ScenarioError(f"grid.kind must be 'periodic' or 'line', got {gkind!r}")
    n = gsec.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ScenarioError(f"grid.n must be an integer, got {n!r}")
    if gkind == "periodic":
        if "half_width" in gsec:
            raise ScenarioError("grid.half_width applies to line grids only")
        grid = make_grid(GridKind.PERIODIC, n)
    else:
        half_width = _number(gsec, "half_width", "grid", minimum=1e-12)
        grid = make_grid(GridKind.TRUNCATED_LINE, n, half_width)

    psec = _require_mapping(doc["params"], "params")
    _reject_unknown(psec, _PARAM_KEYS, "params")
    params = PhysParams(
        omega=_number(psec, "omega", "params", default=0.0),
        gamma=_number(psec, "gamma", "params", default=0.0),
        lam=_number(psec, "lambda", "params", default=0.0, minimum=0.0),
    )

    isec = _require_mapping(doc["initial"], "initial")
    _reject_unknown(isec, _INITIAL_KEYS, "initial")
    family = isec.get("family")
    if family not in ("zero", "gaussian", "cosine", "bump"):
        raise ScenarioError(f"initial.family must name a known family, got {family!r}")
    space = isec.get("space", "u")
    if space not in ("u", "m"):
        raise ScenarioError(f"initial.space must be 'u' or 'm', got {space!r}")
    initial = dict(isec)
    initial.setdefault("space", "u")

    ssec = _require_mapping(doc["solver"], "solver")
    _reject_unknown(ssec, _SOLVER_KEYS, "solver")
    solver = {
        "dt": _number(ssec, "dt", "solver", minimum=1e-15),
        "t_end": _number(ssec, "t_end", "solver", minimum=1e-15),
        "snapshot_stride": int(_number(ssec, "snapshot_stride", "solver", default=1, minimum=1)),
        "blowup_guard": _number(ssec, "blowup_guard", "solver", default=1e3, minimum=1e-15),
    }

    options = dict(_require_mapping(doc.get("options", {}), "options"))
    _reject_unknown(options, _OPTION_KEYS[kind], "options")

    output_dir = doc.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ScenarioError("output_dir must be a string path")

    if kind is ExperimentKind.DISSIPATIVE_EQUIVALENCE:
        if params.omega != 0.0 or params.gamma != 0.0:
            raise ScenarioError(
                "DissipativeEquivalence requires omega = gamma = 0 (the exponential "
                "rescaling is exact only for the drift-free member of the family)"
            )
    if kind is ExperimentKind.CONTINUATION_PROBE:
        if abs(params.gamma + 2.0 * params.omega) > 1e-12:
            raise ScenarioError("ContinuationProbe requires gamma = -2 omega")
    if (
        kind is ExperimentKind.MANUFACTURED_CONVERGENCE
        and grid.kind is not GridKind.PERIODIC
    ):
        raise ScenarioError("ManufacturedConvergence runs on periodic grids")

    return Scenario(name, kind, grid, params, initial, solver, options, output_dir)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"config {path} is not valid YAML: {exc}") from exc
    return parse_scenario(doc, source=str(path))
