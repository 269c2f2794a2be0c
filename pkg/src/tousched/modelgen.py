"""Emit the schedule problem as an LP-format integer program and import
external solutions back into schedules.

Variables: x_<j>_<i> places job j at start interval i (only admissible
starts inside the processing window are created); y_<i>_<ip> activates the
gap (i, ip) at its switching cost (only gaps with a non-empty body, a
defined switching cost and, when pruning is on, an unpruned flag). One
assignment equality per job, one covering equality per interior interval:
each is processed by exactly one job or bridged by exactly one gap.

The two boundary off intervals contribute a constant that is deliberately
kept out of the LP text and reported in the sidecar instead, so any
LP-format reader consumes the file unchanged.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from .model import (InfeasibleError, InputError, Instance, compute_tec, job_cost,
                    validate_schedule)
from .solver import SolveResult, SolveStats, _boundary_constant, assemble_schedule
from .spaces import SpacesTable, _UNREACHABLE

_WRAP = 200  # keep LP lines comfortably under common reader limits


@dataclass
class IlpModelArtifact:
    lp_text: str
    varmap: dict[str, dict]
    constant_term: int


def _wrap_terms(head: str, terms: list[str], tail: str) -> list[str]:
    lines = []
    cur = head
    for k, term in enumerate(terms):
        piece = term if k == 0 else " + " + term
        if len(cur) + len(piece) > _WRAP and cur != head:
            lines.append(cur)
            cur = "   " + piece.lstrip()
        else:
            cur += piece
    lines.append(cur + tail)
    return lines


def emit_ilp_spaces(inst: Instance, table: SpacesTable, prune: bool = True) -> IlpModelArtifact:
    """Build the LP text, the variable map and the objective constant."""
    h = inst.horizon
    t_on, t_off = table.window
    phi = table.phi_matrix
    n = inst.n_jobs

    x_vars: list[tuple[str, int, int, int]] = []  # name, j, i, cost
    starts_of: dict[int, list[int]] = {}
    for j in range(1, n + 1):
        p = inst.jobs[j - 1]
        hi = t_off - p + 1
        if t_on > hi:
            raise InfeasibleError(f"infeasible window: job {j} has no admissible start")
        starts_of[j] = list(range(t_on, hi + 1))
        for i in starts_of[j]:
            x_vars.append((f"x_{j}_{i}", j, i, job_cost(inst, j, i)))

    y_vars: list[tuple[str, int, int, int]] = []  # name, i, ip, cost
    for i in range(1, h):
        row = phi[i]
        for ip in range(i + 2, h + 1):
            if row[ip] >= _UNREACHABLE:
                continue
            if prune and table.pruned_mask[i, ip]:
                continue
            y_vars.append((f"y_{i}_{ip}", i, ip, int(row[ip])))

    obj_terms = [f"{cost} {name}" for name, _j, _i, cost in x_vars]
    obj_terms += [f"{cost} {name}" for name, _i, _ip, cost in y_vars]

    lines = ["Minimize"]
    lines += _wrap_terms(" obj: ", obj_terms, "")
    lines.append("Subject To")

    for j in range(1, n + 1):
        terms = [f"x_{j}_{i}" for i in starts_of[j]]
        lines += _wrap_terms(f" assign_{j}: ", terms, " = 1")

    covering_x: dict[int, list[str]] = {i: [] for i in range(2, h)}
    for name, j, i, _cost in x_vars:
        p = inst.jobs[j - 1]
        for k in range(max(2, i), min(h - 1, i + p - 1) + 1):
            covering_x[k].append(name)
    covering_y: dict[int, list[str]] = {i: [] for i in range(2, h)}
    for name, i, ip, _cost in y_vars:
        for k in range(max(2, i + 1), min(h - 1, ip - 1) + 1):
            covering_y[k].append(name)

    for k in range(2, h):
        terms = covering_x[k] + covering_y[k]
        if not terms:
            raise InfeasibleError(f"interval {k} can be neither processed nor bridged")
        lines += _wrap_terms(f" cover_{k}: ", terms, " = 1")

    lines.append("Binary")
    lines += [f" {name}" for name, _j, _i, _c in x_vars]
    lines += [f" {name}" for name, _i, _ip, _c in y_vars]
    lines.append("End")

    varmap: dict[str, dict] = {}
    for name, j, i, _cost in x_vars:
        varmap[name] = {"kind": "x", "j": j, "i": i}
    for name, i, ip, _cost in y_vars:
        varmap[name] = {"kind": "y", "i": i, "ip": ip}

    return IlpModelArtifact(lp_text="\n".join(lines) + "\n", varmap=varmap,
                            constant_term=_boundary_constant(inst))


def write_artifact(artifact: IlpModelArtifact, lp_path, map_path=None) -> tuple[str, str]:
    """Write the LP text and its sidecar; returns both paths. The sidecar
    defaults to the LP path plus .varmap.json."""
    lp_path = str(lp_path)
    if map_path is None:
        map_path = lp_path + ".varmap.json"
    with open(lp_path, "w", encoding="utf-8") as fh:
        fh.write(artifact.lp_text)
    with open(map_path, "w", encoding="utf-8") as fh:
        json.dump({"constant_term": artifact.constant_term, "variables": artifact.varmap},
                  fh, indent=2)
        fh.write("\n")
    return lp_path, str(map_path)


def load_varmap(map_path) -> IlpModelArtifact:
    with open(map_path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{map_path}: not valid JSON: {exc}") from exc
    try:
        return IlpModelArtifact(lp_text="", varmap=dict(doc["variables"]),
                                constant_term=int(doc["constant_term"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{map_path}: malformed variable map: {exc}") from exc


def parse_solution_text(text: str) -> dict[str, float]:
    """Read whitespace-separated "name value" lines, the common solver dump
    shape; lines that do not parse as a name plus a number are skipped."""
    out: dict[str, float] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            continue
        try:
            val = float(parts[1])
        except ValueError:
            continue
        out[parts[0]] = val
    return out


def import_solution(inst: Instance, table: SpacesTable, artifact: IlpModelArtifact,
                    assignment: dict[str, float]) -> SolveResult:
    """Decode a 0/1 assignment over the model variables into a schedule.

    Values must sit within 1e-6 of 0 or 1; variables missing from the
    assignment count as 0. The rebuilt schedule is re-priced from scratch
    and must match the assignment's objective plus the constant term.
    """
    t0 = time.monotonic()
    tol = 1e-6
    h = inst.horizon

    starts: dict[int, int] = {}
    gaps: list[tuple[int, int]] = []
    objective = 0
    for name, meta in artifact.varmap.items():
        val = assignment.get(name, 0.0)
        if abs(val) <= tol:
            continue
        if abs(val - 1.0) > tol:
            raise InputError(f"non-integral assignment: {name} = {val}")
        if meta["kind"] == "x":
            j, i = int(meta["j"]), int(meta["i"])
            if j in starts:
                raise InfeasibleError(f"cover violated: job {j} assigned twice")
            starts[j] = i
            objective += job_cost(inst, j, i)
        elif meta["kind"] == "y":
            i, ip = int(meta["i"]), int(meta["ip"])
            cost = table.phi(i, ip)
            if cost is None:
                raise InputError(f"variable {name} refers to a gap with no switching")
            gaps.append((i, ip))
            objective += cost
        else:
            raise InputError(f"unknown variable kind for {name}")

    missing = [j for j in range(1, inst.n_jobs + 1) if j not in starts]
    if missing:
        raise InfeasibleError(f"cover violated: jobs {missing} unassigned")

    cover = np.zeros(h + 1, dtype=np.int64)
    for j, i in starts.items():
        cover[i:i + inst.jobs[j - 1]] += 1
    for i, ip in gaps:
        cover[i + 1:ip] += 1
    bad = [int(k) for k in range(2, h) if cover[k] != 1]
    if bad:
        raise InfeasibleError(f"cover violated at intervals {bad[:5]}")

    placement = sorted(starts.items())
    sched = assemble_schedule(inst, placement, table, spaces=sorted(gaps))
    problems = validate_schedule(inst, sched)
    if problems:
        raise InfeasibleError("imported solution is infeasible: "
                              + "; ".join(str(v) for v in problems[:3]))
    tec = compute_tec(inst, sched)
    if tec != objective + artifact.constant_term:
        raise InputError(f"assignment objective {objective} + constant "
                         f"{artifact.constant_term} does not match the "
                         f"re-priced schedule cost {tec}")
    return SolveResult(tec=tec, schedule=sched, status="imported",
                       stats=SolveStats(states=0, wall_time=time.monotonic() - t0,
                                        lower_bound=None))
