import random

import pytest

from tousched import (
    Instance,
    MachineStateSet,
    Schedule,
    TransitionSpec,
    build_graph,
    proc_window,
)
from tousched.datagen import preset_nosby, preset_twosby
from tousched.model import InfeasibleError

# A small published benchmark instance used as a fixed anchor throughout
# the suite: three jobs on a 16-interval horizon with a machine that has
# an off state, a processing state, and an idle state.
WORKED_COSTS = (2, 1, 2, 1, 8, 16, 14, 3, 2, 5, 3, 10, 3, 2, 1, 2)
WORKED_JOBS = (2, 1, 2)
WORKED_TEC = 177
WORKED_SIGMA = (9, 3, 12)
WORKED_OMEGA = (
    ("off", "off"),
    ("off", "proc"),
    ("off", "proc"),
    ("proc", "proc"),
    ("proc", "off"),
    ("off", "off"),
    ("off", "off"),
    ("off", "proc"),
    ("off", "proc"),
    ("proc", "proc"),
    ("proc", "proc"),
    ("idle", "idle"),
    ("proc", "proc"),
    ("proc", "proc"),
    ("proc", "off"),
    ("off", "off"),
)
WORKED_WINDOW = (4, 14)


def worked_instance() -> Instance:
    pre = preset_nosby()
    return Instance(16, WORKED_COSTS, WORKED_JOBS, pre.state_set, pre.transitions)


@pytest.fixture(scope="session")
def worked() -> Instance:
    return worked_instance()


@pytest.fixture(scope="session")
def worked_schedule() -> Schedule:
    return Schedule(WORKED_SIGMA, WORKED_OMEGA)


def random_machine(rng: random.Random, max_extra: int = 2):
    """Draw a valid machine: off and proc always exist with direct
    transitions both ways, plus up to max_extra standby states that
    bridge to and from proc (sometimes instantaneously, mirroring the
    zero-length bridges of the shipped presets)."""
    n_extra = rng.randint(0, max_extra)
    names = ["off", "proc"] + [f"sb{k}" for k in range(1, n_extra + 1)]
    entries = {
        ("off", "off"): (1, rng.choice((0, 0, 1))),
        ("proc", "proc"): (1, rng.randint(2, 9)),
        ("off", "proc"): (rng.randint(1, 3), rng.randint(1, 9)),
        ("proc", "off"): (rng.randint(1, 3), rng.randint(0, 5)),
    }
    for k in range(1, n_extra + 1):
        s = f"sb{k}"
        entries[(s, s)] = (1, rng.randint(1, 5))
        if rng.random() < 0.5:
            entries[("proc", s)] = (0, 0)
            entries[(s, "proc")] = (0, 0)
        else:
            entries[("proc", s)] = (rng.randint(0, 2), rng.randint(0, 4))
            entries[(s, "proc")] = (rng.randint(0, 2), rng.randint(0, 4))
        if rng.random() < 0.3:
            entries[(s, "off")] = (rng.randint(1, 2), rng.randint(0, 3))
    return MachineStateSet(tuple(names)), TransitionSpec(entries)


def random_instance(rng: random.Random, n_max: int = 4, h_max: int = 18,
                    max_extra: int = 2, require_room: bool = True) -> Instance:
    """Draw a random valid instance; when require_room is set, retry until
    the processing window has capacity for every job."""
    for _ in range(500):
        states, trans = random_machine(rng, max_extra=max_extra)
        n = rng.randint(1, n_max)
        jobs = tuple(rng.randint(1, 4) for _ in range(n))
        h_lo = min(h_max, sum(jobs) + 6)
        h = rng.randint(h_lo, h_max)
        costs = tuple(rng.randint(1, 12) for _ in range(h))
        inst = Instance(h, costs, jobs, states, trans)
        if not require_room:
            return inst
        try:
            t_on, t_off = proc_window(build_graph(inst))
        except InfeasibleError:
            continue
        if t_off - t_on + 1 >= sum(jobs):
            return inst
    raise RuntimeError("could not draw an instance with processing room")


def nosby_instance(rng: random.Random, n_max: int = 4, h_max: int = 18) -> Instance:
    """Random instance on the fixed three-state preset machine."""
    pre = preset_nosby()
    for _ in range(500):
        n = rng.randint(1, n_max)
        jobs = tuple(rng.randint(1, 4) for _ in range(n))
        h = rng.randint(min(h_max, sum(jobs) + 6), h_max)
        costs = tuple(rng.randint(1, 12) for _ in range(h))
        inst = Instance(h, costs, jobs, pre.state_set, pre.transitions)
        try:
            t_on, t_off = proc_window(build_graph(inst))
        except InfeasibleError:
            continue
        if t_off - t_on + 1 >= sum(jobs):
            return inst
    raise RuntimeError("could not draw an instance with processing room")


__all__ = [
    "WORKED_COSTS", "WORKED_JOBS", "WORKED_TEC", "WORKED_SIGMA",
    "WORKED_OMEGA", "WORKED_WINDOW", "worked_instance", "random_machine",
    "random_instance", "nosby_instance", "preset_nosby", "preset_twosby",
]
