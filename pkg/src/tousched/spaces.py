"""Optimal switching costs for every gap between processing blocks.

phi(i, ip) is the cheapest energy cost of bridging the gap after interval i
up to interval ip: leaving proc after I_i and being back in proc at I_ip,
with the off boundary taking the place of proc when i = 1 or ip = h. The
table is filled by one shortest path sweep per gap start.

The sweep is implemented as a forward dynamic program over the interval
axis that advances every start simultaneously: a (starts x states) distance
block is relaxed interval by interval, with an instantaneous-transition
closure at each index. Edge weights depend only on the interval and the
state pair, never on the start, so each relaxation is one vectorized add
and minimum. Starts occupy disjoint rows, which is what makes the
parallel contract trivial: any row split computes identical values.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .isg import INF, DistanceMap, IntervalStateGraph, build_graph, proc_window, sssp, tree_path
from .model import InfeasibleError, InputError, Instance, StatePair, instance_to_dict

_UNREACHABLE = np.int64(INF) // 2  # values at or above this mean "no path"


@dataclass
class SpacesTable:
    """phi values, pruning flags and lazily materialized switching paths.

    phi_matrix[i, ip] holds phi(i, ip) for 1 <= i < ip <= h, with INF as
    the absent sentinel; row 0 and column 0 are padding so indices match
    the 1-based interval convention.
    """

    horizon: int
    window: tuple[int, int]
    phi_matrix: np.ndarray
    pruned_mask: np.ndarray
    graph: IntervalStateGraph
    _sources: dict[int, DistanceMap] = field(default_factory=dict, repr=False)

    def phi(self, i: int, ip: int) -> int | None:
        """Switching cost for the pair, or None when no switching exists."""
        if not 1 <= i < ip <= self.horizon:
            raise InputError(f"need 1 <= i < ip <= {self.horizon}, got ({i}, {ip})")
        v = self.phi_matrix[i, ip]
        return None if v >= _UNREACHABLE else int(v)

    def is_pruned(self, i: int, ip: int) -> bool:
        return bool(self.pruned_mask[i, ip])

    def pruned_pairs(self) -> list[tuple[int, int]]:
        return [(int(i), int(ip)) for i, ip in np.argwhere(self.pruned_mask)]

    def source_distances(self, i: int) -> DistanceMap:
        """Single-source run for gap start i, cached for path extraction."""
        dm = self._sources.get(i)
        if dm is None:
            dm = sssp(self.graph, self.graph.source_vertex(i))
            self._sources[i] = dm
        return dm


def _sweep_rows(g: IntervalStateGraph, starts: np.ndarray, phi: np.ndarray) -> None:
    """Fill phi rows for the given gap starts (ascending 1-based indices)."""
    inst = g.inst
    h = inst.horizon
    n_s = len(g.states)
    C = g.cost_prefix
    off, proc = g.off_index, g.proc_index

    zero_steps = [(s, sp) for s in range(n_s) for sp in range(n_s)
                  if s != sp and g.duration[s, sp] == 0]
    pos_steps = [(s, sp, int(g.duration[s, sp]), int(g.power[s, sp]))
                 for s in range(n_s) for sp in range(n_s) if g.duration[s, sp] >= 1]
    t_max = max(t for _s, _sp, t, _pw in pos_steps)

    n_rows = len(starts)
    ring = np.full((t_max + 1, n_rows, n_s), INF, dtype=np.int64)
    act_k = np.where(starts == 1, 2, starts + 1)
    act_s = np.where(starts == 1, off, proc)

    for k in range(2, h + 1):
        cur = ring[k % (t_max + 1)]

        entering = act_k == k
        if entering.any():
            cur[np.nonzero(entering)[0], act_s[entering]] = 0

        for _ in range(max(0, n_s - 1)) if zero_steps else range(0):
            for s, sp in zero_steps:
                np.minimum(cur[:, sp], cur[:, s], out=cur[:, sp])

        if k < h:
            phi[starts, k] = cur[:, proc]
        else:
            phi[starts, h] = cur[:, off]

        for s, sp, t, pw in pos_steps:
            if k + t > h:  # transition would not complete by the last interval
                continue
            w = int(C[k + t - 1] - C[k - 1]) * pw
            tgt = ring[(k + t) % (t_max + 1)]
            np.minimum(tgt[:, sp], cur[:, s] + w, out=tgt[:, sp])

        cur[:] = INF  # slot is reused for interval k + t_max + 1


def compute_spaces(inst: Instance, g: IntervalStateGraph, parallelism: int = 1) -> SpacesTable:
    """Build the full phi table; the result is identical for any
    parallelism because gap starts occupy disjoint rows."""
    if parallelism < 1:
        raise InputError("parallelism must be >= 1")
    window = proc_window(g)
    h = inst.horizon
    phi = np.full((h + 1, h + 1), INF, dtype=np.int64)
    starts = np.arange(1, h, dtype=np.int64)
    if len(starts):
        chunks = [c for c in np.array_split(starts, parallelism) if len(c)]
        if len(chunks) == 1:
            _sweep_rows(g, chunks[0], phi)
        else:
            with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
                list(pool.map(lambda c: _sweep_rows(g, c, phi), chunks))
    phi[phi >= _UNREACHABLE] = INF
    pruned = np.zeros((h + 1, h + 1), dtype=bool)
    return SpacesTable(horizon=h, window=window, phi_matrix=phi,
                       pruned_mask=pruned, graph=g)


def switching_path(table: SpacesTable, i: int, ip: int) -> list[StatePair]:
    """A minimum-cost transition step sequence bridging the gap (i, ip).

    Steps are one entry per transition; instantaneous steps expand to no
    interval. Raises when the pair has no switching.
    """
    cost = table.phi(i, ip)
    if cost is None:
        raise InfeasibleError(f"no switching exists for ({i}, {ip})")
    g = table.graph
    dm = table.source_distances(i)
    target = g.target_vertex(ip)
    steps = tree_path(dm, target)
    if steps is None or dm.dist[target] != cost:
        raise RuntimeError(f"path extraction disagrees with phi at ({i}, {ip})")
    return steps


def expand_space(table: SpacesTable, i: int, ip: int) -> list[StatePair]:
    """Per-interval labels for the gap body, intervals i+1 .. ip-1.

    Each step (s, sp) of time d contributes d copies of its label;
    instantaneous steps contribute none.
    """
    steps = switching_path(table, i, ip)
    tr = table.graph.inst.transitions
    labels: list[StatePair] = []
    for s, sp in steps:
        labels.extend([(s, sp)] * tr.time(s, sp))
    if len(labels) != ip - i - 1:
        raise RuntimeError(f"expansion of ({i}, {ip}) covers {len(labels)} intervals, "
                           f"expected {ip - i - 1}")
    return labels


def apply_pruning(table: SpacesTable, inst: Instance) -> SpacesTable:
    """Flag gaps that cannot appear in any feasible schedule.

    With window (t_on, t_off), the processing capacity left of a gap
    start i is i - t_on + 1 and right of a gap end ip is t_off - ip + 1;
    on a horizon boundary (i = 1 or ip = h) that side carries no
    processing and counts as 0. A gap is flagged when the longest job
    fits on neither side, or when the two sides together cannot hold the
    total processing time.
    """
    h = table.horizon
    t_on, t_off = table.window
    max_p = max(inst.jobs)
    sum_p = sum(inst.jobs)

    idx = np.arange(h + 1, dtype=np.int64)
    left = idx - t_on + 1
    left[1] = 0
    right = t_off - idx + 1
    right[h] = 0

    pc1 = (max_p > left)[:, None] & (max_p > right)[None, :]
    pc2 = left[:, None] + right[None, :] < sum_p
    valid = (idx >= 1)[:, None] & (idx[None, :] > idx[:, None])
    pruned = (pc1 | pc2) & valid

    return SpacesTable(horizon=h, window=table.window, phi_matrix=table.phi_matrix,
                       pruned_mask=pruned, graph=table.graph, _sources=table._sources)


def write_phi_csv(table: SpacesTable, path) -> None:
    """Debug dump of all defined phi values, one "i,ip,phi" row per pair."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("i,ip,phi\n")
        for i, ip in np.argwhere(table.phi_matrix < _UNREACHABLE):
            fh.write(f"{i},{ip},{int(table.phi_matrix[i, ip])}\n")


def _fingerprint(inst: Instance) -> str:
    doc = json.dumps(instance_to_dict(inst), sort_keys=True).encode()
    return hashlib.sha256(doc).hexdigest()


def save_table(table: SpacesTable, path) -> str:
    """Write the table as an .npz archive; returns the actual path, which
    gains the .npz suffix when missing."""
    path = str(path)
    if not path.endswith(".npz"):
        path += ".npz"
    np.savez_compressed(path, phi=table.phi_matrix, pruned=table.pruned_mask,
                        window=np.asarray(table.window, dtype=np.int64),
                        horizon=np.int64(table.horizon),
                        fingerprint=np.str_(_fingerprint(table.graph.inst)))
    return path


def load_table(path, inst: Instance, graph: IntervalStateGraph | None = None) -> SpacesTable:
    with np.load(path, allow_pickle=False) as doc:
        if str(doc["fingerprint"]) != _fingerprint(inst):
            raise InputError(f"{path}: phi table was computed for a different instance")
        phi = doc["phi"].astype(np.int64)
        pruned = doc["pruned"].astype(bool)
        window = (int(doc["window"][0]), int(doc["window"][1]))
        horizon = int(doc["horizon"])
    if graph is None:
        graph = build_graph(inst)
    return SpacesTable(horizon=horizon, window=window, phi_matrix=phi,
                       pruned_mask=pruned, graph=graph)
