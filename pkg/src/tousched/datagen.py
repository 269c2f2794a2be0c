"""Machine presets and the seeded benchmark instance generator.

Random draws come from a splitmix-style 64-bit generator with rejection
sampling, so any implementation of the same recipe reproduces identical
instances from the same seed. Processing times are uniform on {1..5},
interval costs uniform on {1..10}.

Horizons are derived from the total processing time: for a multiple m the
horizon is round(m * sum_p) + d_on + d_off + 1, where d_on and d_off are
the shortest switch-on and switch-off durations of the machine and
rounding is half-up. A family shares one cost stream across its four
multiples, so shorter members' costs are prefixes of longer ones.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .model import Instance, InputError, MachineStateSet, TransitionSpec, instance_from_dict

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

FAMILY_MULTIPLES = (Fraction(13, 10), Fraction(16, 10), Fraction(19, 10), Fraction(22, 10))


class SplitMix64:
    """Deterministic 64-bit generator; the reproducibility contract of
    every generated instance."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform_int(self, lo: int, hi: int) -> int:
        """Unbiased draw from {lo..hi} by rejection."""
        m = hi - lo + 1
        if m < 1:
            raise InputError(f"empty range {{{lo}..{hi}}}")
        limit = ((1 << 64) // m) * m
        while True:
            u = self.next_u64()
            if u < limit:
                return lo + (u % m)


@dataclass(frozen=True)
class MachinePreset:
    name: str
    state_set: MachineStateSet
    transitions: TransitionSpec


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one generated instance."""

    n: int
    preset: MachinePreset
    multiple: Fraction
    seed: int


def preset_nosby() -> MachinePreset:
    """Machine without a standby state: off, proc and a parking idle state
    reachable instantaneously from proc.

    Switching on takes 2 intervals at power 8; switching off takes 1 at
    power 1. Holding proc draws 6 per interval, idle 2, off nothing.
    """
    states = MachineStateSet(states=("off", "proc", "idle"))
    entries = {
        ("off", "off"): (1, 0),
        ("proc", "proc"): (1, 6),
        ("idle", "idle"): (1, 2),
        ("off", "proc"): (2, 8),
        ("proc", "off"): (1, 1),
        ("proc", "idle"): (0, 0),
        ("idle", "proc"): (0, 0),
    }
    return MachinePreset(name="nosby", state_set=states,
                         transitions=TransitionSpec(entries=entries))


def preset_twosby() -> MachinePreset:
    """Machine with two standby states offering a cost-dependent choice.

    sb1 is cheap to hold (1 per interval) but takes a paid interval to
    enter and to leave; sb2 is entered and left instantaneously but holds
    at 3 per interval. Short gaps favor sb2, long cheap gaps favor sb1.
    Switching on takes 3 intervals, switching off 2.
    """
    states = MachineStateSet(states=("off", "proc", "sb1", "sb2"))
    entries = {
        ("off", "off"): (1, 0),
        ("proc", "proc"): (1, 6),
        ("sb1", "sb1"): (1, 1),
        ("sb2", "sb2"): (1, 3),
        ("off", "proc"): (3, 8),
        ("proc", "off"): (2, 2),
        ("proc", "sb1"): (1, 4),
        ("sb1", "proc"): (1, 4),
        ("proc", "sb2"): (0, 0),
        ("sb2", "proc"): (0, 0),
    }
    return MachinePreset(name="twosby", state_set=states,
                         transitions=TransitionSpec(entries=entries))


def load_custom_preset(path) -> MachinePreset:
    """Read a machine description from a JSON file with "states" and
    "transitions" fields shaped like the instance format."""
    import json

    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not valid JSON: {exc}") from exc
    doc = dict(doc)
    doc.setdefault("horizon", 1)
    doc.setdefault("costs", [0])
    doc.setdefault("jobs", [1])
    inst = instance_from_dict(doc)
    name = str(doc.get("name", "custom"))
    return MachinePreset(name=name, state_set=inst.state_set, transitions=inst.transitions)


def switch_durations(preset: MachinePreset) -> tuple[int, int]:
    """Shortest off->proc and proc->off durations, through any state chain."""
    states = preset.state_set.states

    def shortest(src: str, dst: str) -> int:
        best = {src: 0}
        heap = [(0, src)]
        while heap:
            d, s = heapq.heappop(heap)
            if s == dst:
                return d
            if d > best.get(s, 0):
                continue
            for sp in states:
                if sp == s:
                    continue
                t = preset.transitions.time(s, sp)
                if t is None:
                    continue
                nd = d + t
                if nd < best.get(sp, nd + 1):
                    best[sp] = nd
                    heapq.heappush(heap, (nd, sp))
        raise InputError(f"preset {preset.name}: no {src}->{dst} transition chain")

    off = preset.state_set.off_state
    proc = preset.state_set.proc_state
    return shortest(off, proc), shortest(proc, off)


def _as_multiple(multiple) -> Fraction:
    if isinstance(multiple, Fraction):
        return multiple
    if isinstance(multiple, int):
        return Fraction(multiple)
    # go through str so 1.3 means the decimal 1.3, not its float neighbor
    return Fraction(str(multiple))


def horizon_for(total_p: int, multiple, d_on: int, d_off: int) -> int:
    """round(multiple * total_p) half-up, plus the switch overhead + 1."""
    m = _as_multiple(multiple)
    core = (2 * m.numerator * total_p + m.denominator) // (2 * m.denominator)
    return int(core) + d_on + d_off + 1


def _draw_jobs(rng: SplitMix64, n: int) -> tuple[int, ...]:
    return tuple(rng.uniform_int(1, 5) for _ in range(n))


def _build(preset: MachinePreset, jobs: tuple[int, ...], costs: tuple[int, ...]) -> Instance:
    return Instance(horizon=len(costs), costs=costs, jobs=jobs,
                    state_set=preset.state_set, transitions=preset.transitions)


def generate_instance(n: int, preset: MachinePreset, multiple, seed: int) -> Instance:
    """One instance. Draw order: n processing times, then one cost per
    interval; identical to the matching family member."""
    if n < 1:
        raise InputError("n must be >= 1")
    d_on, d_off = switch_durations(preset)
    rng = SplitMix64(seed)
    jobs = _draw_jobs(rng, n)
    h = horizon_for(sum(jobs), multiple, d_on, d_off)
    costs = tuple(rng.uniform_int(1, 10) for _ in range(h))
    return _build(preset, jobs, costs)


def generate_family(n: int, preset: MachinePreset, seed: int) -> list[Instance]:
    """Four instances, one per canonical multiple, sharing processing times
    and a common cost stream so shorter horizons are cost prefixes."""
    if n < 1:
        raise InputError("n must be >= 1")
    d_on, d_off = switch_durations(preset)
    rng = SplitMix64(seed)
    jobs = _draw_jobs(rng, n)
    total = sum(jobs)
    horizons = [horizon_for(total, m, d_on, d_off) for m in FAMILY_MULTIPLES]
    stream = tuple(rng.uniform_int(1, 10) for _ in range(max(horizons)))
    return [_build(preset, jobs, stream[:h]) for h in horizons]


def instance_filename(preset_name: str, n: int, h: int, seed: int) -> str:
    return f"inst_{preset_name}_{n}_{h}_{seed}.json"
