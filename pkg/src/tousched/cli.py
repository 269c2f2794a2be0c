"""Command line front end tying the pipeline together.

Exit codes: 0 success, 1 infeasible or failed validation, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import datagen, isg, model, modelgen, solver, spaces


@dataclass
class BenchRecord:
    """One benchmark row: best cost found (ub), proved lower bound (lb),
    wall seconds and the optimality gap percentage."""

    instance: str
    n: int
    h: int
    ub: int | None
    lb: int | None
    t: float
    gap: float | None

    def row(self) -> list[str]:
        fmt = lambda v: "" if v is None else str(v)
        gap = "" if self.gap is None else f"{self.gap:.2f}"
        return [self.instance, str(self.n), str(self.h), fmt(self.ub), fmt(self.lb),
                f"{self.t:.3f}", gap]


def _resolve_preset(name: str) -> datagen.MachinePreset:
    if name == "nosby":
        return datagen.preset_nosby()
    if name == "twosby":
        return datagen.preset_twosby()
    path = Path(name)
    if path.exists():
        return datagen.load_custom_preset(path)
    raise model.InputError(f"unknown preset {name!r} (expected nosby, twosby or a "
                           f"machine JSON file)")


def _table_for(inst: model.Instance, phi_path: str | None, parallel: int = 1,
               prune: bool = True) -> spaces.SpacesTable:
    g = isg.build_graph(inst)
    if phi_path:
        return spaces.load_table(phi_path, inst, graph=g)
    table = spaces.compute_spaces(inst, g, parallelism=parallel)
    if prune:
        table = spaces.apply_pruning(table, inst)
    return table


def cmd_gen(args) -> int:
    preset = _resolve_preset(args.preset)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.multiple is not None:
        insts = [datagen.generate_instance(args.jobs, preset, args.multiple, args.seed)]
    else:
        insts = datagen.generate_family(args.jobs, preset, args.seed)
    for inst in insts:
        name = datagen.instance_filename(preset.name, args.jobs, inst.horizon, args.seed)
        path = out_dir / name
        model.save_instance(inst, path)
        print(path)
    return 0


def cmd_preprocess(args) -> int:
    inst = model.load_instance(args.instance)
    g = isg.build_graph(inst)
    t0 = time.monotonic()
    table = spaces.compute_spaces(inst, g, parallelism=args.parallel)
    if not args.no_prune:
        table = spaces.apply_pruning(table, inst)
    dt = time.monotonic() - t0
    out = spaces.save_table(table, args.out)
    defined = int((table.phi_matrix < spaces._UNREACHABLE).sum())
    print(f"window {table.window}, {defined} switching costs, "
          f"{len(table.pruned_pairs()) if not args.no_prune else 0} pruned, "
          f"{dt:.2f}s -> {out}")
    if args.dump_csv:
        spaces.write_phi_csv(table, args.dump_csv)
        print(args.dump_csv)
    if args.dump_dot:
        Path(args.dump_dot).write_text(isg.to_dot(g), encoding="utf-8")
        print(args.dump_dot)
    return 0


def cmd_solve(args) -> int:
    inst = model.load_instance(args.instance)
    if args.method == "bruteforce":
        result = solver.brute_force_schedule(inst)
    else:
        table = _table_for(inst, args.phi)
        result = solver.solve_exact(inst, table, time_limit=args.time_limit)
    if result.status == "infeasible":
        print("infeasible: no schedule fits the processing window", file=sys.stderr)
        return 1
    print(f"TEC {result.tec}")
    if result.status == "timeout":
        print(f"time limit reached; best bound {result.stats.lower_bound}", file=sys.stderr)
    if args.out:
        stats = {"status": result.status, "states": result.stats.states,
                 "wall_time": round(result.stats.wall_time, 6),
                 "lower_bound": result.stats.lower_bound}
        model.save_schedule(result.schedule, result.tec, args.out, stats=stats)
    return 0


def cmd_validate(args) -> int:
    inst = model.load_instance(args.instance)
    sched, tec = model.load_schedule(args.schedule)
    problems = model.validate_schedule(inst, sched)
    if not problems and tec is not None:
        actual = model.compute_tec(inst, sched)
        if actual != tec:
            problems.append(model.Violation("tec", "schedule",
                                            f"file claims tec {tec}, recomputed {actual}"))
    if problems:
        for v in problems:
            print(v, file=sys.stderr)
        return 1
    print("valid")
    return 0


def cmd_emit_lp(args) -> int:
    inst = model.load_instance(args.instance)
    table = _table_for(inst, args.phi, prune=not args.no_prune)
    artifact = modelgen.emit_ilp_spaces(inst, table, prune=not args.no_prune)
    lp_path, map_path = modelgen.write_artifact(artifact, args.out)
    print(lp_path)
    print(map_path)
    return 0


def cmd_import_solution(args) -> int:
    inst = model.load_instance(args.instance)
    table = _table_for(inst, args.phi, prune=False)
    artifact = modelgen.load_varmap(args.model_map)
    assignment = modelgen.parse_solution_text(Path(args.solution).read_text(encoding="utf-8"))
    result = modelgen.import_solution(inst, table, artifact, assignment)
    print(f"TEC {result.tec}")
    if args.out:
        model.save_schedule(result.schedule, result.tec, args.out,
                            stats={"status": result.status})
    return 0


def cmd_bench(args) -> int:
    paths = sorted(Path(args.dir).glob("*.json"))
    if not paths:
        raise model.InputError(f"no instance files in {args.dir}")
    records = []
    for path in paths:
        try:
            inst = model.load_instance(path)
        except model.InputError as exc:
            raise model.InputError(f"{path.name}: {exc}") from exc
        t0 = time.monotonic()
        if args.method == "bruteforce":
            result = solver.brute_force_schedule(inst)
        else:
            try:
                table = _table_for(inst, None)
            except model.InfeasibleError:
                result = solver.SolveResult(tec=None, schedule=None, status="infeasible")
            else:
                result = solver.solve_exact(inst, table, time_limit=args.time_limit)
        dt = time.monotonic() - t0
        if result.status == "infeasible":
            rec = BenchRecord(path.stem, inst.n_jobs, inst.horizon, None, None, dt, None)
        else:
            ub = result.tec
            lb = result.stats.lower_bound if result.stats.lower_bound is not None else ub
            gap = 0.0 if ub == 0 else max(0.0, min(100.0, (ub - lb) / ub * 100.0))
            rec = BenchRecord(path.stem, inst.n_jobs, inst.horizon, ub, lb, dt, gap)
        records.append(rec)
        print(",".join(rec.row()))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["instance", "n", "h", "ub", "lb", "t", "gap"])
        for rec in records:
            writer.writerow(rec.row())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tousched",
                                     description="Single machine scheduling under "
                                                 "time-of-use tariffs with machine "
                                                 "power states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate benchmark instances")
    p.add_argument("--jobs", type=int, required=True)
    p.add_argument("--preset", required=True,
                   help="nosby, twosby, or a machine JSON file")
    p.add_argument("--seed", type=int, default=0)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--multiple", type=str, default=None,
                     help="one horizon multiple, e.g. 1.6")
    grp.add_argument("--family", action="store_true",
                     help="all four canonical multiples (default)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("preprocess", help="compute the switching cost table")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True, help="table output (.npz)")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--dump-csv", default=None, help="also dump phi as CSV")
    p.add_argument("--dump-dot", default=None, help="also dump the graph as DOT")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("solve", help="find an optimal schedule")
    p.add_argument("--instance", required=True)
    p.add_argument("--phi", default=None, help="precomputed table (.npz)")
    p.add_argument("--method", choices=["dp", "bruteforce"], default="dp")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--out", default=None, help="schedule output (JSON)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a schedule against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("emit-lp", help="write the integer program")
    p.add_argument("--instance", required=True)
    p.add_argument("--phi", default=None)
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--out", required=True, help="LP file; sidecar gains .varmap.json")
    p.set_defaults(func=cmd_emit_lp)

    p = sub.add_parser("import-solution", help="turn a solver dump into a schedule")
    p.add_argument("--instance", required=True)
    p.add_argument("--model-map", required=True, help="the .varmap.json sidecar")
    p.add_argument("--solution", required=True, help="name value lines")
    p.add_argument("--phi", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_import_solution)

    p = sub.add_parser("bench", help="solve a directory of instances to CSV")
    p.add_argument("--dir", required=True)
    p.add_argument("--method", choices=["dp", "bruteforce"], default="dp")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--out", required=True, help="CSV report path")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except model.InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except model.InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: not valid JSON: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
