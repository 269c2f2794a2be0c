import json
import random

import pytest

from tousched import (
    Instance,
    InputError,
    apply_pruning,
    build_graph,
    compute_spaces,
    emit_ilp_spaces,
    import_solution,
    load_varmap,
    parse_solution_text,
    solve_exact,
    validate_schedule,
    write_artifact,
)
from tousched.model import InfeasibleError

from conftest import WORKED_TEC, nosby_instance

WORKED_OPTIMAL_ASSIGNMENT = {
    "x_1_10": 1, "x_2_4": 1, "x_3_13": 1,
    "y_1_4": 1, "y_4_10": 1, "y_11_13": 1, "y_14_16": 1,
}


def make_table(inst, prune=True):
    tab = compute_spaces(inst, build_graph(inst))
    return apply_pruning(tab, inst) if prune else tab


def test_worked_artifact_shape(worked):
    art = emit_ilp_spaces(worked, make_table(worked))
    assert len(art.varmap) == 102
    assert art.constant_term == 0
    text = art.lp_text
    assert text.index("Minimize") < text.index("Subject To") < \
        text.index("Binary") < text.index("End")
    assert all(len(line) <= 200 for line in text.splitlines())


def test_worked_objective_coefficients(worked):
    text = emit_ilp_spaces(worked, make_table(worked)).lp_text
    obj = text[text.index("Minimize"):text.index("Subject To")]
    for term in ("48 x_1_10", "6 x_2_4", "30 x_3_13",
                 "24 y_1_4", "48 y_4_10", "20 y_11_13", "1 y_14_16"):
        assert term in obj, term


def test_worked_constraint_rows(worked):
    text = emit_ilp_spaces(worked, make_table(worked)).lp_text
    for j in (1, 2, 3):
        assert f"assign_{j}:" in text
    for k in range(2, 16):
        assert f"cover_{k}:" in text
    assert "cover_1:" not in text and "cover_16:" not in text


def test_worked_variable_domain(worked):
    names = set(emit_ilp_spaces(worked, make_table(worked)).varmap)
    # placements stay inside the processing window
    assert "x_1_4" in names and "x_1_13" in names
    assert "x_1_3" not in names and "x_1_14" not in names
    assert "x_2_14" in names  # the length-1 job can run on the window edge
    # the flagged gap is not offered to the model
    assert "y_2_15" not in names
    assert "y_4_10" in names and "y_1_4" in names and "y_14_16" in names


def test_unpruned_model_keeps_more_gaps(worked):
    pruned = set(emit_ilp_spaces(worked, make_table(worked)).varmap)
    loose = set(emit_ilp_spaces(worked, make_table(worked), prune=False).varmap)
    assert pruned < loose
    assert "y_2_15" in loose


def test_import_worked_optimum(worked):
    tab = make_table(worked)
    art = emit_ilp_spaces(worked, tab)
    res = import_solution(worked, tab, art, WORKED_OPTIMAL_ASSIGNMENT)
    assert res.status == "imported"
    assert res.tec == WORKED_TEC
    assert validate_schedule(worked, res.schedule) == []


def test_import_accepts_solver_noise(worked):
    tab = make_table(worked)
    art = emit_ilp_spaces(worked, tab)
    noisy = {name: v + 3e-7 for name, v in WORKED_OPTIMAL_ASSIGNMENT.items()}
    noisy["y_1_10"] = 1e-9  # a zero the solver printed imprecisely
    res = import_solution(worked, tab, art, noisy)
    assert res.tec == WORKED_TEC


def test_import_rejects_fractional(worked):
    tab = make_table(worked)
    art = emit_ilp_spaces(worked, tab)
    bad = dict(WORKED_OPTIMAL_ASSIGNMENT, x_1_10=0.5)
    with pytest.raises(InputError):
        import_solution(worked, tab, art, bad)


def test_import_rejects_missing_job(worked):
    tab = make_table(worked)
    art = emit_ilp_spaces(worked, tab)
    bad = dict(WORKED_OPTIMAL_ASSIGNMENT)
    del bad["x_2_4"]
    with pytest.raises(InfeasibleError):
        import_solution(worked, tab, art, bad)


def test_import_rejects_double_assignment(worked):
    tab = make_table(worked)
    art = emit_ilp_spaces(worked, tab)
    bad = dict(WORKED_OPTIMAL_ASSIGNMENT, x_2_5=1)
    with pytest.raises(InfeasibleError):
        import_solution(worked, tab, art, bad)


def test_import_rejects_uncovered_interval(worked):
    tab = make_table(worked)
    art = emit_ilp_spaces(worked, tab)
    bad = dict(WORKED_OPTIMAL_ASSIGNMENT)
    del bad["y_11_13"]
    with pytest.raises(InfeasibleError):
        import_solution(worked, tab, art, bad)


def test_import_round_trips_solver_output():
    rng = random.Random(53)
    for _ in range(10):
        inst = nosby_instance(rng, n_max=4, h_max=18)
        tab = make_table(inst)
        res = solve_exact(inst, tab)
        if res.status != "optimal":
            continue
        art = emit_ilp_spaces(inst, tab)
        # rebuild the variable assignment the exact schedule corresponds to
        assignment = {}
        blocks = sorted((start + 1, j) for j, start in
                        enumerate(res.schedule.sigma, start=1))
        for i, j in blocks:
            assignment[f"x_{j}_{i}"] = 1
        edges = [1] + [i + inst.jobs[j - 1] - 1
                       for i, j in blocks] + [inst.horizon]
        starts = [i for i, _ in blocks] + [inst.horizon]
        for e, s2 in zip(edges, starts):
            if s2 > e + 1 or (e == 1 and s2 > e) or s2 == inst.horizon:
                if e != s2:
                    assignment[f"y_{e}_{s2}"] = 1
        back = import_solution(inst, tab, art, assignment)
        assert back.tec == res.tec


def test_write_artifact_and_load_varmap(tmp_path, worked):
    tab = make_table(worked)
    art = emit_ilp_spaces(worked, tab)
    lp_path, map_path = write_artifact(art, tmp_path / "model.lp")
    assert lp_path.endswith("model.lp")
    assert map_path.endswith("model.lp.varmap.json")
    doc = json.loads(open(map_path).read())
    assert set(doc) == {"constant_term", "variables"}
    back = load_varmap(map_path)
    assert back.varmap == art.varmap
    assert back.constant_term == art.constant_term


def test_load_varmap_rejects_junk(tmp_path):
    bad = tmp_path / "x.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        load_varmap(bad)


def test_parse_solution_text():
    text = """
    # a comment line
    x_1_10 1
    x_2_4 1.0000000
    y_1_4  0.9999998
    Objective 177

    garbage-without-number one
    lonely
    """
    out = parse_solution_text(text)
    assert out["x_1_10"] == 1
    assert out["y_1_4"] == pytest.approx(0.9999998)
    assert out["Objective"] == 177
    assert "garbage-without-number" not in out
    assert "lonely" not in out


def test_emit_rejects_job_without_room(worked):
    inst = Instance(8, worked.costs[:8], (6,), worked.state_set,
                    worked.transitions)
    with pytest.raises(InfeasibleError):
        emit_ilp_spaces(inst, make_table(inst))


def test_line_wrap_on_wide_models():
    rng = random.Random(59)
    inst = nosby_instance(rng, n_max=5, h_max=18)
    art = emit_ilp_spaces(inst, make_table(inst))
    assert all(len(line) <= 200 for line in art.lp_text.splitlines())
