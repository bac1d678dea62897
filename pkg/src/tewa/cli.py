"""Batch command-line front end.

Subcommands:

* ``validate`` -- schema and cross-reference checks on a scenario file.
* ``run`` -- execute one scenario, write the event log and report, print a
  summary table.
* ``compare`` -- run the two-stage and greedy policies over a seed list and
  tabulate covered threats, leakers, surviving asset value and shots.
* ``gen`` -- emit a generated scenario document for a stock profile.

Exit status is 0 only on full success; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .engine import Outcome, SimReport, Simulation
from .scenario import (PROFILES, document_to_yaml, generate_document,
                       load_scenario, validate_document)


def _print_err(*lines: str) -> None:
    for line in lines:
        print(line, file=sys.stderr)


def cmd_validate(args) -> int:
    diagnostics = validate_document(Path(args.scenario))
    if diagnostics:
        _print_err(f"{args.scenario}: {len(diagnostics)} problem(s)")
        _print_err(*(f"  {d}" for d in diagnostics))
        return 1
    print(f"{args.scenario}: valid")
    return 0


def _summary_lines(report: SimReport) -> list[str]:
    counts = report.counts
    total = len(report.outcomes)
    allocated = sum(1 for v in report.ever_assigned.values() if v)
    modes = ", ".join(sorted({m for _, m in report.mode_timeline})) or "-"
    wall = report.cycle_wall_times
    mean_ms = 1000.0 * sum(wall) / len(wall) if wall else 0.0
    max_ms = 1000.0 * max(wall) if wall else 0.0
    rows = [
        ("scenario", report.scenario),
        ("policy", report.policy),
        ("seed", report.seed),
        ("threats", total),
        ("allocated to asset", f"{allocated}/{total}"),
        ("destroyed", counts["destroyed"]),
        ("leakers", counts["leaker"]),
        ("still active", counts["active"]),
        ("shots fired", report.shots_fired),
        ("idle weapons", f"{len(report.idle_weapons)}/{len(report.ws_shots)}"),
        ("mode(s)", modes),
        ("surviving asset value", f"{sum(report.da_survival.values()):.3f}"),
        ("decision cycle mean/max", f"{mean_ms:.2f} ms / {max_ms:.2f} ms"),
    ]
    width = max(len(k) for k, _ in rows)
    return [f"{k:<{width}}  {v}" for k, v in rows]


def cmd_run(args) -> int:
    try:
        scenario = load_scenario(Path(args.scenario))
    except Exception as exc:
        _print_err(f"error: {exc}")
        return 1
    sim = Simulation(scenario, policy=args.policy, seed=args.seed, horizon=args.horizon)
    report = sim.run()
    if args.out_log:
        Path(args.out_log).write_text(sim.event_log())
    if args.out_report:
        Path(args.out_report).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    print("\n".join(_summary_lines(report)))
    return 0


def _run_one(path: Path, policy: str, seed: int, horizon) -> SimReport:
    scenario = load_scenario(path)
    return Simulation(scenario, policy=policy, seed=seed, horizon=horizon).run()


def cmd_compare(args) -> int:
    path = Path(args.scenario)
    try:
        seeds = ([int(s) for s in args.seeds.split(",")] if args.seeds
                 else [load_scenario(path).config.seed])
    except Exception as exc:
        _print_err(f"error: {exc}")
        return 1
    jobs = [(policy, seed) for seed in seeds for policy in ("two-stage", "greedy")]
    with ThreadPoolExecutor(max_workers=min(8, len(jobs))) as pool:
        reports = list(pool.map(lambda j: _run_one(path, j[0], j[1], args.horizon), jobs))
    by_key = {job: rep for job, rep in zip(jobs, reports)}

    header = f"{'seed':>6}  {'policy':<9} {'covered':>7} {'leakers':>7} {'survival':>9} {'shots':>6}"
    print(header)
    print("-" * len(header))
    metrics: dict[str, dict[str, list[float]]] = {p: {"covered": [], "leakers": [], "survival": [], "shots": []}
                                                  for p in ("two-stage", "greedy")}
    greedy_worse = []
    for seed in seeds:
        row = {}
        for policy in ("two-stage", "greedy"):
            rep = by_key[(policy, seed)]
            covered = rep.counts["destroyed"]
            leakers = rep.counts["leaker"]
            survival = sum(rep.da_survival.values())
            metrics[policy]["covered"].append(covered)
            metrics[policy]["leakers"].append(leakers)
            metrics[policy]["survival"].append(survival)
            metrics[policy]["shots"].append(rep.shots_fired)
            row[policy] = covered
            print(f"{seed:>6}  {policy:<9} {covered:>7} {leakers:>7} {survival:>9.3f} {rep.shots_fired:>6}")
        if row["greedy"] < row["two-stage"]:
            greedy_worse.append(seed)
    print("-" * len(header))
    for policy in ("two-stage", "greedy"):
        m = metrics[policy]
        n = len(seeds)
        print(f"{'mean':>6}  {policy:<9} {sum(m['covered'])/n:>7.2f} {sum(m['leakers'])/n:>7.2f} "
              f"{sum(m['survival'])/n:>9.3f} {sum(m['shots'])/n:>6.1f}")
    if greedy_worse:
        print(f"greedy covered strictly fewer threats on seed(s): "
              f"{', '.join(str(s) for s in greedy_worse)}")
    if args.out_report:
        payload = {
            "scenario": str(path),
            "seeds": seeds,
            "runs": {f"{p}:{s}": by_key[(p, s)].to_dict() for p, s in jobs},
            "greedy_covered_fewer_on": greedy_worse,
        }
        Path(args.out_report).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


def cmd_gen(args) -> int:
    try:
        doc = generate_document(args.profile, args.seed if args.seed is not None else 0)
    except ValueError as exc:
        _print_err(f"error: {exc}")
        return 1
    sys.stdout.write(document_to_yaml(doc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tewa",
                                     description="Two-stage threat evaluation and weapon assignment simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a scenario file")
    p.add_argument("--scenario", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("run", help="run one scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--policy", choices=["two-stage", "greedy"], default="two-stage")
    p.add_argument("--out-log", default=None, help="write the event log here")
    p.add_argument("--out-report", default=None, help="write the JSON report here")
    p.add_argument("--horizon", type=float, default=None, help="override the horizon (s)")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("compare", help="compare two-stage against greedy over seeds")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seeds", default=None, help="comma-separated seed list")
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--out-report", default=None)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("gen", help="generate a scenario document on stdout")
    p.add_argument("--profile", choices=list(PROFILES), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_gen)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
