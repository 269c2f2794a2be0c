"""The interval-state graph and its shortest path primitives.

Vertices are (interval, state) pairs: v(1, off), v(i, s) for every interval
i in 2..h and state s, and v(h+1, off). An edge v(i, s) -> v(i+t, sp)
exists for every allowed transition (s, sp) of time t that completes by the
start of the last interval, weighted by the cost of the intervals it covers
times its power. Two boundary (off, off) edges tie the off runs to the
horizon ends. Time-0 transitions give weight-0 edges that stay at the same
interval index, so all weights are non-negative and paths never move
backwards in time.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .model import InfeasibleError, InputError, Instance, StatePair, validate_instance

Vertex = tuple[int, str]

INF = np.int64(2) ** 62  # unreachable sentinel; far above any real distance
_APSP_INF = np.int64(2) ** 61  # halved so sentinel + sentinel cannot overflow


@dataclass
class IntervalStateGraph:
    """Immutable after build_graph; shareable across threads."""

    inst: Instance
    states: tuple[str, ...]
    off_index: int
    proc_index: int
    duration: np.ndarray  # (nS, nS) transition times, -1 where forbidden
    power: np.ndarray  # (nS, nS) transition powers, 0 where forbidden
    cost_prefix: np.ndarray  # (h+1,) prefix sums, [0] = 0
    vertices: list[Vertex]
    edges: list[tuple[Vertex, Vertex, int]]
    adj: dict[Vertex, list[tuple[Vertex, int, StatePair]]] = field(repr=False, default_factory=dict)

    @property
    def horizon(self) -> int:
        return self.inst.horizon

    def off_vertex_first(self) -> Vertex:
        return (1, self.states[self.off_index])

    def source_vertex(self, i: int) -> Vertex:
        """Start vertex of the gap after interval i: on the off boundary for
        i = 1, otherwise in proc right after the interval."""
        if i == 1:
            return (2, self.states[self.off_index])
        return (i + 1, self.states[self.proc_index])

    def target_vertex(self, ip: int) -> Vertex:
        """End vertex of the gap before interval ip: on the off boundary for
        ip = h, otherwise in proc at the start of the interval."""
        if ip == self.horizon:
            return (self.horizon, self.states[self.off_index])
        return (ip, self.states[self.proc_index])


def build_graph(inst: Instance) -> IntervalStateGraph:
    problems = validate_instance(inst)
    if problems:
        raise InputError("invalid instance: " + "; ".join(str(v) for v in problems[:3]))

    h = inst.horizon
    states = inst.state_set.states
    n_s = len(states)
    off = inst.state_set.index(inst.state_set.off_state)
    proc = inst.state_set.index(inst.state_set.proc_state)

    duration = np.full((n_s, n_s), -1, dtype=np.int64)
    power = np.zeros((n_s, n_s), dtype=np.int64)
    for (s, sp), (t, pw) in inst.transitions.entries.items():
        duration[inst.state_set.index(s), inst.state_set.index(sp)] = t
        power[inst.state_set.index(s), inst.state_set.index(sp)] = pw

    C = np.zeros(h + 1, dtype=np.int64)
    np.cumsum(np.asarray(inst.costs, dtype=np.int64), out=C[1:])

    off_name = states[off]
    vertices: list[Vertex] = [(1, off_name)]
    vertices.extend((i, s) for i in range(2, h + 1) for s in states)
    vertices.append((h + 1, off_name))

    edges: list[tuple[Vertex, Vertex, int]] = []
    adj: dict[Vertex, list[tuple[Vertex, int, StatePair]]] = {v: [] for v in vertices}

    def add(u: Vertex, v: Vertex, w: int, step: StatePair) -> None:
        edges.append((u, v, w))
        adj[u].append((v, w, step))

    for i in range(2, h + 1):
        for (s, sp), (t, pw) in inst.transitions.entries.items():
            if (i - 1) + t > h - 1:
                continue
            ip = i + t
            w = int(C[ip - 1] - C[i - 1]) * pw
            add((i, s), (ip, sp), w, (s, sp))

    off_pw = inst.transitions.power(off_name, off_name)
    add((1, off_name), (2, off_name), int(inst.costs[0]) * off_pw, (off_name, off_name))
    if h >= 2:
        add((h, off_name), (h + 1, off_name), int(inst.costs[h - 1]) * off_pw,
            (off_name, off_name))

    return IntervalStateGraph(inst=inst, states=states, off_index=off, proc_index=proc,
                              duration=duration, power=power, cost_prefix=C,
                              vertices=vertices, edges=edges, adj=adj)


@dataclass
class DistanceMap:
    """Shortest distances from one source; unreachable vertices are absent.

    pred holds the shortest path tree: pred[v] = (previous vertex, step),
    with ties broken toward fewer edges and then smaller vertices so path
    reconstruction is deterministic.
    """

    source: Vertex
    dist: dict[Vertex, int]
    pred: dict[Vertex, tuple[Vertex, StatePair]] = field(repr=False, default_factory=dict)

    def get(self, v: Vertex) -> int | None:
        return self.dist.get(v)


def sssp(g: IntervalStateGraph, source: Vertex) -> DistanceMap:
    """Label-setting shortest paths from source (all weights >= 0)."""
    if source not in g.adj:
        raise InputError(f"unknown vertex {source!r}")
    dist: dict[Vertex, int] = {source: 0}
    hops: dict[Vertex, int] = {source: 0}
    pred: dict[Vertex, tuple[Vertex, StatePair]] = {}
    done: set[Vertex] = set()
    heap: list[tuple[int, int, Vertex]] = [(0, 0, source)]
    while heap:
        d, hp, u = heapq.heappop(heap)
        if u in done or d != dist.get(u) or hp != hops.get(u):
            continue
        done.add(u)
        for v, w, step in g.adj[u]:
            if v in done:
                continue
            nd = d + w
            nh = hp + 1
            cur = dist.get(v)
            if cur is None or nd < cur or (nd == cur and (nh, u) < (hops[v], pred[v][0])):
                dist[v] = nd
                hops[v] = nh
                pred[v] = (u, step)
                heapq.heappush(heap, (nd, nh, v))
    return DistanceMap(source=source, dist=dist, pred=pred)


def tree_path(dm: DistanceMap, target: Vertex) -> list[StatePair] | None:
    """Transition steps along the shortest path tree, source to target."""
    if target not in dm.dist:
        return None
    steps: list[StatePair] = []
    v = target
    while v != dm.source:
        v, step = dm.pred[v]
        steps.append(step)
    steps.reverse()
    return steps


def proc_window(g: IntervalStateGraph) -> tuple[int, int]:
    """(t_on, t_off): the earliest and latest interval in which the machine
    can be processing, given it starts and ends the horizon in off."""
    h = g.horizon
    proc_name = g.states[g.proc_index]
    off_name = g.states[g.off_index]
    if h < 2:
        raise InfeasibleError("no feasible processing window")

    dm = sssp(g, (2, off_name))
    t_on = next((i for i in range(2, h + 1) if (i, proc_name) in dm.dist), None)

    rev: dict[Vertex, list[Vertex]] = {}
    for u, v, _w in g.edges:
        rev.setdefault(v, []).append(u)
    reaches_end: set[Vertex] = set()
    stack = [(h, off_name)]
    while stack:
        v = stack.pop()
        if v in reaches_end:
            continue
        reaches_end.add(v)
        stack.extend(rev.get(v, ()))

    t_off = None
    for i in range(h - 1, 0, -1):
        # occupying proc during interval i needs the unit (proc, proc) edge
        # or some longer proc exit starting there
        exit_ok = any(t >= 1 and (i - 1) + t <= h - 1
                      for t in g.duration[g.proc_index] if t >= 0)
        if exit_ok and (i + 1, proc_name) in reaches_end:
            t_off = i
            break

    if t_on is None or t_off is None or t_off < t_on:
        raise InfeasibleError("no feasible processing window")
    return t_on, t_off


class ApspResult:
    """All-pairs distances with mapping-style access; unreachable pairs
    return None from get and raise KeyError from indexing."""

    def __init__(self, index: dict[Vertex, int], dist: np.ndarray):
        self._index = index
        self._dist = dist

    def get(self, u: Vertex, v: Vertex) -> int | None:
        iu = self._index.get(u)
        iv = self._index.get(v)
        if iu is None or iv is None:
            return None
        d = self._dist[iu, iv]
        return None if d >= _APSP_INF else int(d)

    def __getitem__(self, pair: tuple[Vertex, Vertex]) -> int:
        d = self.get(*pair)
        if d is None:
            raise KeyError(pair)
        return d


def apsp_oracle(g: IntervalStateGraph, max_vertices: int = 2000) -> ApspResult:
    """All-pairs shortest distances by the cubic relaxation scheme; a
    testing oracle, guarded against large graphs."""
    n = len(g.vertices)
    if n > max_vertices:
        raise InputError(f"graph has {n} vertices, oracle limit is {max_vertices}")
    index = {v: k for k, v in enumerate(g.vertices)}
    # The sentinel is far above any real distance yet small enough that
    # sentinel + sentinel stays inside int64 during the relaxation.
    dist = np.full((n, n), _APSP_INF, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    for u, v, w in g.edges:
        iu, iv = index[u], index[v]
        if w < dist[iu, iv]:
            dist[iu, iv] = w
    for k in range(n):
        np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :], out=dist)
    return ApspResult(index, dist)


def to_dot(g: IntervalStateGraph) -> str:
    """DOT text for visual inspection of small graphs."""
    lines = ["digraph interval_state {", "  rankdir=LR;"]
    for i, s in g.vertices:
        lines.append(f'  "{i}:{s}";')
    for (i, s), (ip, sp), w in g.edges:
        lines.append(f'  "{i}:{s}" -> "{ip}:{sp}" [label="{w}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
