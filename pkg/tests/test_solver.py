import pytest

from orientcut.errors import InfeasibleError, InputError, TimeLimitError
from orientcut.graphs import (
    BidirectedDigraph,
    UndirectedGraph,
    complete_graph,
    cycle_graph,
    dag_longest_path,
    is_acyclic,
    path_graph,
    petersen_graph,
)
from orientcut.model import AO, AS, LinearRow, ModelConfig, ModelPoint, check_integral_feasible
from orientcut.polytope import brute_force_optimum
from orientcut.solver import (
    Objective,
    check_load_reduction,
    chromatic_number,
    default_objective,
    guaranteed_feasible_z,
    min_diameter_orientation,
    solve_ao,
    solve_model,
)

from conftest import BATTERY


def test_default_objectives():
    ao = default_objective(ModelConfig(kappa=2, variant=AO), m=3)
    assert ao.z_coeff == 1 and not ao.w_coeffs
    as_ = default_objective(ModelConfig(kappa=2, variant=AS), m=3)
    assert as_.z_coeff == 1
    assert all(c == -4 for c in as_.w_coeffs.values())
    assert len(as_.w_coeffs) == 6
    pt = ModelPoint((1.0, 0.0, 1.0, 0.0, 1.0, 0.0), 2.0)
    assert as_.value(pt) == pytest.approx(2.0 - 12.0)


def test_solve_ao_matches_brute_force_on_battery():
    for name, g, _ in BATTERY:
        for kappa in (1, 2, 3):
            rep = solve_ao(g, kappa)
            ref, _ = brute_force_optimum(g, ModelConfig(kappa=kappa, variant=AO))
            assert rep.status == "optimal", (name, kappa)
            assert rep.objective == pytest.approx(ref), (name, kappa)
            d = BidirectedDigraph(g)
            ok, why = check_integral_feasible(d, ModelConfig(kappa=kappa, variant=AO), rep.best_point)
            assert ok, (name, kappa, why)


def test_solve_as_matches_brute_force_on_battery():
    for name, g, _ in BATTERY:
        cfg = ModelConfig(kappa=2, variant=AS)
        rep = solve_model(g, cfg)
        ref, _ = brute_force_optimum(g, cfg)
        assert rep.objective == pytest.approx(ref), name


def test_infeasible_window_reported():
    rep = solve_model(complete_graph(3), ModelConfig(kappa=2, variant=AO, z_fixed=0))
    assert rep.status == "infeasible"
    assert rep.best_point is None


def test_timeout_is_honest():
    rep = solve_ao(petersen_graph(), 3, time_limit=0.0)
    assert rep.status == "timeout"
    assert rep.objective is None or rep.bound <= rep.objective + 1e-9


def test_feasibility_stop_returns_valid_point():
    g = complete_graph(4)
    rep = solve_ao(g, 3, feasibility_stop=True)
    assert rep.status == "optimal" and rep.best_point is not None
    ok, _ = check_integral_feasible(BidirectedDigraph(g), ModelConfig(kappa=3, variant=AO), rep.best_point)
    assert ok


def test_extra_rows_cut_off_solutions():
    # forbid z below 2 via an explicit row; optimum moves from 1 to 2
    g = path_graph(3)
    base = solve_ao(g, 1)
    assert base.objective == pytest.approx(1.0)
    push = LinearRow({}, -1, -2, "<=", "bound")  # -z <= -2
    rep = solve_ao(g, 1, extra_rows=(push,))
    assert rep.objective == pytest.approx(2.0) or rep.status == "infeasible"


def test_no_good_rows_are_hard_constraints():
    g = complete_graph(3)
    d = BidirectedDigraph(g)
    cfg = ModelConfig(kappa=2, variant=AS)
    ref, best = brute_force_optimum(g, cfg)
    # forbid the brute-force optimum's arc set outright
    arcs = sorted(best.arc_set())
    block = LinearRow({a: 1.0 for a in arcs}, 0, len(arcs) - 1, "<=", "no-good")
    rep = solve_model(g, cfg, extra_rows=(block,))
    assert rep.status == "optimal"
    assert block.satisfied(rep.best_point.w, rep.best_point.z)
    assert rep.objective >= ref - 1e-9


def test_pool_rows_seed_valid_cuts_without_changing_optimum():
    from orientcut.separation import template_rows

    g = complete_graph(3)
    d = BidirectedDigraph(g)
    cfg = ModelConfig(kappa=2, variant=AS)
    pool = list(template_rows(d, 2, tags=("cycle-z",)))
    assert pool
    rep = solve_model(g, cfg, pool_rows=pool)
    ref, _ = brute_force_optimum(g, cfg)
    assert rep.objective == pytest.approx(ref)


def test_seed_and_thread_determinism():
    g = cycle_graph(5)
    a = solve_ao(g, 2, seed=11)
    b = solve_ao(g, 2, seed=11)
    c = solve_ao(g, 2, seed=11, threads=3)
    assert a.objective == b.objective == c.objective
    assert a.node_count == b.node_count == c.node_count
    assert a.node_bound_histories == b.node_bound_histories == c.node_bound_histories


def test_node_bound_histories_monotone():
    rep = solve_ao(petersen_graph(), 2)
    assert rep.node_bound_histories
    for hist in rep.node_bound_histories:
        for lo, hi in zip(hist, hist[1:]):
            assert hi >= lo - 1e-9


def test_chromatic_number_named_graphs():
    expected = {"edge": 2, "P3": 2, "P4": 2, "C4": 2, "K3": 3, "paw": 3, "K4": 4}
    for name, g, _ in BATTERY:
        chi, colors = chromatic_number(g)
        assert chi == expected[name], name
        assert len(colors) == g.n and max(colors) + 1 == chi
        assert all(colors[u] != colors[v] for u, v in g.edges)
    assert chromatic_number(cycle_graph(5))[0] == 3
    assert chromatic_number(petersen_graph())[0] == 3


def test_chromatic_number_disconnected():
    g = UndirectedGraph(6, [(0, 1), (1, 2), (0, 2), (4, 5)])
    chi, colors = chromatic_number(g)
    assert chi == 3
    assert colors[4] != colors[5]


def test_min_diameter_orientation_realizes_q():
    for name, g, q in BATTERY:
        orient, got = min_diameter_orientation(g)
        assert got == q, name
        d = BidirectedDigraph(g)
        arcs = orient.arcs()
        assert is_acyclic(d, arcs)
        assert dag_longest_path(d, arcs) == q


def test_min_diameter_orientation_reports_and_ub():
    reports = []
    orient, q = min_diameter_orientation(complete_graph(3), ub=2, reports=reports)
    assert q == 2 and reports
    assert all(r.status == "optimal" for r in reports)


def test_guaranteed_feasible_z_values():
    assert guaranteed_feasible_z(3, 1) == 3 - 3 // 2
    assert guaranteed_feasible_z(5, 2) == 5 - 5 // 3
    assert guaranteed_feasible_z(4, 4) == 4
    with pytest.raises(InputError):
        guaranteed_feasible_z(0, 1)


def test_check_load_reduction_on_min_diameter_orientations():
    for name, g, q in BATTERY:
        orient, _ = min_diameter_orientation(g)
        for kappa in range(q + 1, q + 4):
            assert check_load_reduction(g, kappa, orient), (name, kappa)
