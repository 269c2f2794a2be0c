"""
A complete walk through one small scheduling day
================================================

Three jobs, sixteen hourly intervals, hourly energy prices that spike in
the middle of the day, and a machine that can switch off, process, or
sit idle. We find the cheapest feasible schedule end to end.
"""

from tousched import (
    Instance,
    apply_pruning,
    build_graph,
    compute_spaces,
    compute_tec,
    expand_space,
    job_cost,
    preset_nosby,
    proc_window,
    solve_exact,
    validate_instance,
    validate_schedule,
)

# the running example: cheap mornings, an expensive midday spike,
# cheap evenings
costs = (2, 1, 2, 1, 8, 16, 14, 3, 2, 5, 3, 10, 3, 2, 1, 2)
jobs = (2, 1, 2)

machine = preset_nosby()
inst = Instance(horizon=16, costs=costs, jobs=jobs,
                state_set=machine.state_set, transitions=machine.transitions)
assert validate_instance(inst) == []

# the interval-state graph encodes every legal way the machine can move
# between its states over time
g = build_graph(inst)
print(f"graph: {len(g.vertices)} vertices, {len(g.edges)} edges")

# the machine needs 2 intervals to warm up and 1 to shut down, so it can
# only be processing between intervals 4 and 14
print("processing window:", proc_window(g))

# bridging costs between processing blocks: phi(i, ip) is the cheapest
# energy spent between a block ending at i and the next starting at ip
table = apply_pruning(compute_spaces(inst, g), inst)
print("phi(4, 10) =", table.phi(4, 10), " (cross the midday spike)")
print("phi(11, 13) =", table.phi(11, 13), "(one idle interval)")
print("phi(1, 4)  =", table.phi(1, 4), " (morning ramp-up)")

# the same bridge, written out one interval at a time
print("bridge 4 -> 10:", expand_space(table, 4, 10))

# gaps that cannot leave room for all jobs are flagged ahead of time
print("flagged gap (2, 15)?", table.is_pruned(2, 15))

# the exact solver picks block positions over the bridging table
result = solve_exact(inst, table)
print("status:", result.status)
print("TEC:", result.tec)
print("job starts:", result.schedule.sigma)

# the cost splits into ramps, bridges, and the processing blocks
parts = [
    table.phi(1, 4), job_cost(inst, 2, 4), table.phi(4, 10),
    job_cost(inst, 1, 10), table.phi(11, 13), job_cost(inst, 3, 13),
    table.phi(14, 16),
]
print("decomposition:", " + ".join(map(str, parts)), "=", sum(parts))
assert sum(parts) == result.tec == compute_tec(inst, result.schedule)
assert validate_schedule(inst, result.schedule) == []
print("schedule is feasible")
