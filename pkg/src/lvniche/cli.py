"""Command-line entry point ``lvniche``.

Species and parameter indices on the command line are 1-based, matching
subscripts such as alpha[2][1]; everything behind the flag parsing is 0-based.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from lvniche.analysis import (
    EquilibriumError,
    ParamPath,
    classify_two_species,
    enumerate_equilibria,
    interior_equilibrium,
    linearized_percent_for_target,
    percent_change_for_target,
    perturbed_equilibrium,
    sensitivity_matrix,
    sweep,
)
from lvniche.dynamics import EXTINCT_BELOW, SURVIVES_AT, SimulationProtocol, simulate
from lvniche.estimation import alpha_from_income_fraction, alpha_from_population_ratio
from lvniche.model import CompetitionModel
from lvniche.scenario import Scenario, ScenarioError, bundled_scenario, load_scenario, write_trajectory_csv

# Published figures for the two-species Unca model, keyed by (parameter, relative change, species).
_PUBLISHED_PERTURBED = {
    ("K[2]", 0.01, 1): 8.42,
    ("alpha[2][1]", -0.01, 1): 8.29,
}
_PUBLISHED_PERCENT = {
    ("K[2]", 1): 2.4,
    ("alpha[2][1]", 1): -3.5,
}


def _is_published_model(model: CompetitionModel) -> bool:
    ref = bundled_scenario("unca_2species").model
    return (
        model.n == 2
        and np.array_equal(model.K, ref.K)
        and np.array_equal(model.alpha, ref.alpha)
    )


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _protocol(sc: Scenario, args) -> SimulationProtocol:
    changes = {}
    for flag, key in (("method", "method"), ("step", "step"), ("steps", "steps"), ("record_every", "record_every")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[key] = value
    if "steps" in changes and "record_every" not in changes:
        changes["record_every"] = min(sc.protocol.record_every, changes["steps"])
    return replace(sc.protocol, **changes)


def _c(z: complex) -> str:
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}j"


# ---------------------------------------------------------------- commands


def cmd_simulate(args) -> int:
    sc = load_scenario(args.scenario)
    traj = simulate(sc.model, sc.initial, _protocol(sc, args))
    _write_atomic(args.out, write_trajectory_csv(traj, sc.model.species_names))
    final = traj.final
    print(f"{sc.title}: t = {final.t:g}")
    for name, v in zip(sc.model.species_names, final.N):
        flag = " (extinct)" if v < EXTINCT_BELOW else ""
        print(f"  {name:>12} {v:12.6f}{flag}")
    if traj.clamps:
        print(f"  {len(traj.clamps)} negative overshoot(s) clamped to zero")
    return 0


def cmd_equilibria(args) -> int:
    sc = load_scenario(args.scenario)
    model = sc.model
    reports = enumerate_equilibria(model)
    regime = classify_two_species(model).name if model.n == 2 else None
    names = model.species_names
    if args.format == "json":
        doc = {
            "title": sc.title,
            "species": list(names),
            "equilibria": [
                {
                    "support": [names[i] for i in rep.support],
                    "state": None if rep.singular else rep.state.N.tolist(),
                    "eigenvalues": None if rep.singular else [[z.real, z.imag] for z in rep.eigenvalues],
                    "feasible": rep.feasible,
                    "stable": rep.stable,
                    "marginal": rep.marginal,
                    "singular": rep.singular,
                }
                for rep in reports
            ],
            "regime": regime,
        }
        print(json.dumps(doc, indent=2))
        return 0
    print(sc.title)
    for rep in reports:
        support = "{" + ", ".join(names[i] for i in rep.support) + "}"
        if rep.singular:
            print(f"  {support:<28} singular subsystem")
            continue
        verdict = "stable" if rep.stable else ("marginal" if rep.marginal else "unstable")
        if not rep.feasible:
            verdict += ", infeasible"
        state = ", ".join(f"{v:.6g}" for v in rep.state.N)
        eig = ", ".join(_c(z) for z in rep.eigenvalues)
        print(f"  {support:<28} N = ({state})  eig = [{eig}]  {verdict}")
    if regime:
        print(f"  two-species regime: {regime}")
    return 0


def cmd_sensitivity(args) -> int:
    sc = load_scenario(args.scenario)
    model = sc.model
    n = model.n
    names = model.species_names
    published = _is_published_model(model)
    rep = sensitivity_matrix(model)
    print(sc.title)
    print("interior equilibrium: " + ", ".join(f"{k}={v:.6g}" for k, v in zip(names, rep.base_equilibrium.N)))
    print("dN*_i/dK_j:")
    for i in range(n):
        print(f"  {names[i]:>12} " + " ".join(f"{v:10.6g}" for v in rep.dN_dK[i]))
    print("dN*_i/dalpha[j][k] (nonzero off-diagonal entries):")
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            col = ", ".join(f"{names[i]}={rep.dN_dalpha[i, j, k]:.6g}" for i in range(n))
            print(f"  alpha[{j + 1}][{k + 1}]: {col}")

    params = [ParamPath("K", i) for i in range(n)]
    params += [ParamPath("alpha", j, k) for j in range(n) for k in range(n) if j != k]
    species = range(n) if args.species is None else [args.species - 1]
    for s in species:
        if not 0 <= s < n:
            raise ValueError(f"--species must be in 1..{n}")
    print("perturbed equilibria (exact re-solve):")
    for p in params:
        for rc in (0.01, -0.01):
            try:
                N = perturbed_equilibrium(model, p, rc).N
            except EquilibriumError as exc:
                print(f"  {str(p):>12} {rc:+.0%}: {exc}")
                continue
            line = ", ".join(f"{names[i]}={N[i]:.6g}" for i in range(n))
            notes = []
            for s in species:
                fig = _PUBLISHED_PERTURBED.get((str(p), rc, s)) if published else None
                if fig is not None:
                    tag = "agrees to 2 d.p." if abs(N[s] - fig) < 0.01 else "DISCREPANCY"
                    notes.append(f"published {names[s]}* = {fig} [{tag}]")
            print(f"  {str(p):>12} {rc:+.0%}: {line}" + (f"  ({'; '.join(notes)})" if notes else ""))
    print(f"percent change for +{args.target_delta:g} student(s):")
    for s in species:
        for p in params:
            try:
                pct = percent_change_for_target(model, p, s, args.target_delta)
                lin = linearized_percent_for_target(model, p, s, args.target_delta)
            except EquilibriumError:
                print(f"  {names[s]:>12} via {str(p):<12} unreachable")
                continue
            note = ""
            fig = _PUBLISHED_PERCENT.get((str(p), s)) if published and args.target_delta == 1 else None
            if fig is not None:
                tag = "agrees after rounding" if abs(pct - fig) <= 0.1 else "DISCREPANCY"
                note = f"  (published {fig:+g}% [{tag}])"
            print(f"  {names[s]:>12} via {str(p):<12} exact {pct:+.4f}%  linearized {lin:+.4f}%{note}")
    return 0


def cmd_sweep(args) -> int:
    sc = load_scenario(args.scenario)
    path = ParamPath.parse(args.param)
    if args.points < 1:
        raise ValueError("--points must be >= 1")
    values = np.linspace(args.start, args.stop, args.points)
    protocol = _protocol(sc, args)
    rows = sweep(sc.model, path, values, sc.initial, protocol)
    names = sc.model.species_names
    header = [str(path), *names, "settled"]
    header += [f"extinct_{n}" for n in names] + [f"survives_{n}" for n in names]
    lines = [",".join(header)]
    for row in rows:
        cells = [f"{row.value:.12g}", *(f"{v:.12g}" for v in row.final.N), str(int(row.settled))]
        cells += [str(int(b)) for b in row.extinct] + [str(int(b)) for b in row.survives]
        lines.append(",".join(cells))
    _write_atomic(args.out, "\n".join(lines) + "\n")
    for row in rows:
        alive = [n for n, s in zip(names, row.survives) if s]
        print(f"  {str(path)} = {row.value:<10.6g} survivors (N >= {SURVIVES_AT:g}): {', '.join(alive) or 'none'}")
    return 0


def cmd_estimate(args) -> int:
    if args.income_fraction is not None:
        pair = alpha_from_income_fraction(args.income_fraction)
        print(f"alpha[1][2] = {pair.forward:.6g}  (external pool on the local institution)")
        print(f"alpha[2][1] = {pair.backward:.6g}  (local institution on the external pool)")
    else:
        small, large = args.pop_ratio
        pair = alpha_from_population_ratio(small, large)
        print(f"forward  = {pair.forward:.6g}  (small-catchment institution on the large one)")
        print(f"backward = {pair.backward:.6g}  (1 - forward)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lvniche", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def proto_flags(p):
        p.add_argument("--method", choices=("euler", "rk4"))
        p.add_argument("--step", type=float)
        p.add_argument("--steps", type=int)
        p.add_argument("--record-every", dest="record_every", type=int)

    p = sub.add_parser("simulate", help="integrate a scenario and write its trajectory as CSV")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    proto_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("equilibria", help="enumerate and classify all equilibria")
    p.add_argument("--scenario", required=True)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("sensitivity", help="derivatives, +/-1%% perturbations and thresholds")
    p.add_argument("--scenario", required=True)
    p.add_argument("--species", type=int, help="1-based species index (default: all)")
    p.add_argument("--target-delta", dest="target_delta", type=float, default=1.0)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("sweep", help="simulate across a range of one parameter")
    p.add_argument("--scenario", required=True)
    p.add_argument("--param", required=True, help="K[i] or alpha[i][j], 1-based")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--out", required=True)
    proto_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("estimate", help="competition coefficients from niche data")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--income-fraction", dest="income_fraction", type=float)
    g.add_argument("--pop-ratio", dest="pop_ratio", type=float, nargs=2, metavar=("SMALL", "LARGE"))
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, EquilibriumError, ValueError, OSError) as exc:
        print(f"lvniche: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
