import itertools
import random

import pytest

from orientcut.errors import InputError
from orientcut.graphs import (
    BidirectedDigraph,
    UndirectedGraph,
    complete_graph,
    cycle_graph,
    enumerate_cycles,
    enumerate_paths_k,
    paw_graph,
)
from orientcut.model import ModelConfig, AS, row_cycle, row_path
from orientcut.polytope import enumerate_feasible_points
from orientcut.separation import (
    TEMPLATE_TAGS,
    separate_cycles,
    separate_paths,
    separate_templates,
    template_rows,
)

from conftest import BATTERY, random_point


def _cycle_rows(d):
    return [row_cycle(d, c) for c in enumerate_cycles(d, d.n)]


def _path_rows(d, kappa):
    return [row_path(d, p, kappa) for p in enumerate_paths_k(d, kappa)]


def test_cycle_separation_finds_short_and_long_cycles():
    d = BidirectedDigraph(complete_graph(3))
    w = [0.9] * 6
    rows = separate_cycles(d, w)
    sizes = sorted(len(r.coeffs) for r in rows)
    assert sizes == [2, 2, 2, 3, 3]
    for r in rows:
        assert r.violation(w, 0.0) > 1e-6
    two = [r for r in rows if len(r.coeffs) == 2]
    assert two[0].violation(w, 0.0) == pytest.approx(0.8)
    tri = [r for r in rows if len(r.coeffs) == 3]
    assert tri[0].violation(w, 0.0) == pytest.approx(0.7)


def test_cycle_separation_empty_on_acyclic_support():
    d = BidirectedDigraph(complete_graph(3))
    # transitive triangle, pairs sum to 1: no violated cycle row exists
    w = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0]
    assert separate_cycles(d, w) == []
    assert separate_cycles(d, [0.5] * 6) == []


def test_cycle_separation_exact_on_random_points(rng):
    for name, g, _ in BATTERY:
        d = BidirectedDigraph(g)
        exhaustive = _cycle_rows(d)
        for _ in range(200):
            pt = random_point(g, 2, rng)
            found = separate_cycles(d, pt.w)
            reference = [r for r in exhaustive if r.violation(pt.w, 0.0) > 1e-6]
            assert bool(found) == bool(reference), (name, pt)
            for r in found:
                assert r.violation(pt.w, 0.0) > 1e-6


def test_path_separation_spec_point():
    d = BidirectedDigraph(complete_graph(3))
    rows = separate_paths(d, [0.5] * 6, 0.75, 2)
    assert len(rows) == 6
    for r in rows:
        assert r.violation([0.5] * 6, 0.75) == pytest.approx(0.25)
    assert separate_paths(d, [0.5] * 6, 2.0, 2) == []


def test_path_separation_exact_on_random_points(rng):
    for name, g, _ in BATTERY:
        d = BidirectedDigraph(g)
        for kappa in (2, 3):
            exhaustive = _path_rows(d, kappa)
            for _ in range(100):
                pt = random_point(g, kappa, rng)
                found = separate_paths(d, pt.w, pt.z, kappa)
                reference = [r for r in exhaustive if r.violation(pt.w, pt.z) > 1e-6]
                assert bool(found) == bool(reference), (name, kappa)
                for r in found:
                    assert r.violation(pt.w, pt.z) > 1e-6


def test_template_separation_cycle_z_example():
    d = BidirectedDigraph(complete_graph(3))
    w = [2.0 / 3.0] * 6
    rows = separate_templates(d, w, 1.9, 2)
    assert any(r.tag == "cycle-z" for r in rows)
    best = max(r.violation(w, 1.9) for r in rows if r.tag == "cycle-z")
    assert best == pytest.approx(0.1)


def test_template_separation_empty_on_integral_points():
    g = paw_graph()
    d = BidirectedDigraph(g)
    cfg = ModelConfig(kappa=2, variant=AS)
    for pt in enumerate_feasible_points(g, cfg)[::7]:
        if pt.is_integral():
            assert separate_templates(d, list(pt.w), pt.z, 2) == []


def test_template_rows_rejects_unknown_tag():
    d = BidirectedDigraph(complete_graph(3))
    with pytest.raises(InputError):
        list(template_rows(d, 2, tags=("nope",)))


def test_template_rows_all_tags_instantiate_somewhere():
    # K4 plus a pendant path is rich enough for every family at kappa=3
    g = UndirectedGraph(6, list(itertools.combinations(range(4), 2)) + [(3, 4), (4, 5)])
    d = BidirectedDigraph(g)
    seen = set()
    for kappa in (2, 3):
        for r in template_rows(d, kappa):
            seen.add(r.tag)
    assert seen == set(TEMPLATE_TAGS)


def test_adjacent_paths_generator_respects_tail_disjointness():
    # the two 3-arc paths 0-3-1-2 and 0-3-2-1 would meet again; no row may
    # pair them, and every generated row must hold at the point that once
    # broke the naive family
    g = UndirectedGraph(4, [(0, 3), (1, 2), (1, 3), (2, 3)])
    d = BidirectedDigraph(g)
    w = [0.0] * 8
    w[d.arc(1, 2)] = 1.0
    w[d.arc(3, 2)] = 1.0
    for r in template_rows(d, 3, tags=("adjacent-paths",)):
        assert r.satisfied(w, 1.0)


def test_separated_rows_are_valid_on_feasible_points(rng):
    g = paw_graph()
    d = BidirectedDigraph(g)
    kappa = 2
    cfg = ModelConfig(kappa=kappa, variant=AS)
    points = enumerate_feasible_points(g, cfg)
    for _ in range(50):
        pt = random_point(g, kappa, rng)
        rows = (separate_cycles(d, pt.w)
                + separate_paths(d, pt.w, pt.z, kappa)
                + separate_templates(d, pt.w, pt.z, kappa))
        for r in rows:
            for q in points:
                assert r.satisfied(q.w, q.z), (r, q)
