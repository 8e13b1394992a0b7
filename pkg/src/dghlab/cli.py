"""Command-line front end: run scenario configs, list and describe experiment kinds.

Verbs:
    dghlab run <config.yaml>     run one scenario, write artifacts
    dghlab list                  enumerate experiment kinds
    dghlab describe <kind>       explain what one kind checks
    dghlab version               print the package version

Exit codes: 0 all checks passed; 1 at least one check failed; 2 invalid
configuration; 3 numerical failure (partial artifacts are kept).  The output
root defaults to ./runs and can be overridden with DGHLAB_OUTPUT_ROOT.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from .artifacts import write_metadata, write_series_csv, write_snapshot_csv, write_svg_lineplot
from .experiments import ExperimentResult, execute
from .grid import NonFiniteFieldError
from .helmholtz import apply_lambda2
from .scenario import ExperimentKind, Scenario, ScenarioError, load_scenario

__all__ = ["describe", "entrypoint", "list_kinds", "main", "run_scenario"]

OUTPUT_ROOT_ENV = "DGHLAB_OUTPUT_ROOT"

_DESCRIPTIONS = {
    ExperimentKind.FREE_RUN: (
        "Integrate the equation from the configured initial data and record\n"
        "field snapshots plus energy and mass time series.  Checks only that\n"
        "the run stays finite."
    ),
    ExperimentKind.SUPPORT_PROPAGATION: (
        "Start from initial data whose momentum combination m + omega + gamma/2\n"
        "is a compact bump, track the characteristic paths q(t, .) of the two\n"
        "support edges (dq/dt = u(t, q) - gamma), and check that the detected\n"
        "support of m(t) + omega + gamma/2 stays inside the transported cone\n"
        "[q(t, a) - 3h, q(t, b) + 3h].  The momentum support moves with the\n"
        "flow; it never spreads ahead of it."
    ),
    ExperimentKind.TAIL_FORMATION: (
        "Evolve compactly supported initial data briefly on the truncated line\n"
        "(with gamma = -2 omega) and fit the decay rate of ln|u| in windows\n"
        "outside the momentum support.  The velocity field instantly develops\n"
        "pure exponential tails: rate -1 on the right, +1 on the left, because\n"
        "outside the momentum support u is an exponentially weighted moment of\n"
        "the momentum."
    ),
    ExperimentKind.CONTINUATION_PROBE: (
        "For gamma = -2 omega the equation is equivalent to the pointwise\n"
        "identity F = -(u_t + (u + 2 omega) u_x) where F is the spatial\n"
        "derivative of the smoothed quadratic density u^2 + u_x^2/2.  This\n"
        "experiment evaluates the residual of that identity on every snapshot\n"
        "(with u_t from the semidiscrete right-hand side) and also counts\n"
        "space-time rectangles on which the solution vanishes; a nontrivial\n"
        "run must admit none."
    ),
    ExperimentKind.DISSIPATIVE_EQUIVALENCE: (
        "Simulate the weakly damped equation (damping lambda * (u - u_xx))\n"
        "directly, then rebuild the same solution from an undamped run through\n"
        "the exponential clock change u(t, x) = exp(-lambda t) v(tau, x) with\n"
        "tau = (1 - exp(-lambda t))/lambda, and report the per-time difference.\n"
        "Requires omega = gamma = 0, where the change of variables is exact."
    ),
    ExperimentKind.INVARIANT_AUDIT: (
        "Track the conserved functionals along a run: the quadratic energy\n"
        "(half the squared H^1 norm), the mass, and both printed variants of\n"
        "the cubic functional.  For conservative runs the energy and mass\n"
        "drifts must stay below tolerance; for damped runs the energy must\n"
        "decrease strictly.  Optionally rerun at half the time step to decide\n"
        "empirically which cubic variant is the conserved one."
    ),
    ExperimentKind.MANUFACTURED_CONVERGENCE: (
        "Force the equation so that u*(t, x) = exp(-t) * (initial profile) is\n"
        "an exact solution, then measure the max-norm error at the final time\n"
        "for a ladder of time steps.  The error must match the exact solution\n"
        "to tolerance and shrink at the integrator's fourth order."
    ),
}


def list_kinds() -> str:
    lines = ["Available experiment kinds:"]
    for kind in ExperimentKind:
        first = _DESCRIPTIONS[kind].splitlines()[0]
        lines.append(f"  {kind.value:24s} {first}")
    return "\n".join(lines)


def describe(kind_name: str) -> str:
    try:
        kind = ExperimentKind(kind_name)
    except ValueError:
        raise ScenarioError(
            f"unknown experiment kind {kind_name!r}; choose from "
            f"{[k.value for k in ExperimentKind]}"
        ) from None
    return f"{kind.value}\n\n{_DESCRIPTIONS[kind]}"


def _output_dir(scn: Scenario, root_override: str | None) -> Path:
    root = Path(root_override or os.environ.get(OUTPUT_ROOT_ENV, "runs"))
    if scn.output_dir is not None:
        out = Path(scn.output_dir)
        return out if out.is_absolute() else root / out
    return root / scn.name


def _write_artifacts(scn: Scenario, result: ExperimentResult, outdir: Path) -> list[str]:
    written: list[str] = []
    for name, (times, values) in result.series.items():
        p = write_series_csv(outdir / f"series_{name}.csv", times, values)
        written.append(p.name)
    for label, snap in result.snapshots:
        m = apply_lambda2(snap)
        p = write_snapshot_csv(outdir / f"snapshot_{label}.csv", snap.x, snap.values, m.values)
        written.append(p.name)
    drift_like = {
        name: (t, np.abs(v - v[0]) / max(1.0, abs(v[0])))
        for name, (t, v) in result.series.items()
        if name in ("energy_h1", "mass") and len(v)
    }
    if drift_like:
        p = write_svg_lineplot(
            outdir / "plot_drift.svg", drift_like, scn.name, "t", "|drift|"
        )
        written.append(p.name)
    if result.snapshots:
        snaps = {label: (snap.x, snap.values) for label, snap in result.snapshots}
        p = write_svg_lineplot(outdir / "plot_snapshots.svg", snaps, scn.name, "x", "u")
        written.append(p.name)
    return written


def run_scenario(config_path: str | Path, output_root: str | None = None) -> int:
    """Run one scenario config; returns the process exit code."""
    try:
        scn = load_scenario(config_path)
    except ScenarioError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2

    outdir = _output_dir(scn, output_root)
    outdir.mkdir(parents=True, exist_ok=True)
    meta_path = outdir / "metadata.json"
    payload = {"config": scn.echo(), "version": __version__, "status": "started"}
    try:
        result = execute(scn)
    except (NonFiniteFieldError, FloatingPointError, OverflowError) as exc:
        payload.update(status="numerical_failure", error=str(exc))
        write_metadata(meta_path, payload)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ScenarioError, ValueError) as exc:
        # configuration-induced rejections (unknown options, CFL gate,
        # misaligned t_end) surface as invalid-config exits
        payload.update(status="invalid", error=str(exc))
        write_metadata(meta_path, payload)
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # keep the metadata trail even for unexpected bugs
        payload.update(status="error", error=repr(exc), trace=traceback.format_exc())
        write_metadata(meta_path, payload)
        raise

    written = _write_artifacts(scn, result, outdir)
    status = "ok" if result.all_passed else "check_failed"
    if result.numerical_failure:
        status = "numerical_failure"
    payload.update(
        status=status,
        checks=[
            {
                "name": c.name,
                "passed": c.passed,
                "value": c.value,
                "threshold": c.threshold,
                "detail": c.detail,
            }
            for c in result.checks
        ],
        results=result.metadata,
        artifacts=sorted(written),
    )
    write_metadata(meta_path, payload)

    for c in result.checks:
        print(c.line())
    print(f"artifacts: {outdir}")
    if result.numerical_failure:
        return 3
    return 0 if result.all_passed else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dghlab",
        description="Scenario-driven experiments for the DGH shallow-water equation.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config", help="path to a YAML scenario file")
    p_run.add_argument("--output-root", default=None, help=f"artifact root (or ${OUTPUT_ROOT_ENV})")
    sub.add_parser("list", help="list experiment kinds")
    p_desc = sub.add_parser("describe", help="describe one experiment kind")
    p_desc.add_argument("kind", help="experiment kind name")
    sub.add_parser("version", help="print version")

    args = parser.parse_args(argv)
    if args.verb == "run":
        return run_scenario(args.config, args.output_root)
    if args.verb == "list":
        print(list_kinds())
        return 0
    if args.verb == "describe":
        try:
            print(describe(args.kind))
        except ScenarioError as exc:
            print(str(exc), file=sys.stderr)
            return 2
        return 0
    if args.verb == "version":
        print(__version__)
        return 0
    return 2


def entrypoint() -> None:
    sys.exit(main())
