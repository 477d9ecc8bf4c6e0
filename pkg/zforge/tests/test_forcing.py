import random
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zforge.errors import GraphError, LimitExceeded
from zforge.forcing import (
    ForceEvent,
    closure,
    forcing_candidates,
    is_zero_forcing_set,
    minimum_zero_forcing_set,
    run_sequential,
    run_to_fixpoint,
    step_synchronous,
    zero_forcing_lower_bound,
)
from zforge.graph import Color, ColoredGraph


def path(n, black=()):
    vertices = [str(i) for i in range(1, n + 1)]
    return ColoredGraph.from_edges(vertices, zip(vertices, vertices[1:]), black)


def triangle(black=()):
    return ColoredGraph.from_edges(("1", "2", "3"), [("1", "2"), ("1", "3"), ("2", "3")], black)


@st.composite
def colored_graphs(draw, max_vertices=8):
    n = draw(st.integers(min_value=0, max_value=max_vertices))
    vertices = [str(i) for i in range(n)]
    pairs = list(combinations(vertices, 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    painted = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    return ColoredGraph.from_edges(
        vertices,
        [pair for pair, keep in zip(pairs, chosen) if keep],
        [v for v, black in zip(vertices, painted) if black],
    )


def test_path_from_one_end():
    trace = run_to_fixpoint(path(3, black=("1",)))
    assert [record.events for record in trace.steps] == [
        (ForceEvent(2, "1", "2"),),
        (ForceEvent(3, "2", "3"),),
    ]
    assert trace.final_black == {"1", "2", "3"}
    assert trace.fixpoint_step == 2
    assert trace.final_step == 3
    assert trace.black_step == {"1": 1, "2": 2, "3": 3}


def test_triangle_with_one_black_vertex_is_stuck():
    trace = run_to_fixpoint(triangle(black=("1",)))
    assert trace.steps == ()
    assert trace.final_black == {"1"}
    assert trace.fixpoint_step == 0
    assert trace.final_step == 1


def test_triangle_with_two_black_vertices():
    trace = run_to_fixpoint(triangle(black=("1", "2")))
    assert trace.events == [ForceEvent(2, "1", "3"), ForceEvent(2, "2", "3")]
    assert trace.final_black == {"1", "2", "3"}


def test_empty_and_isolated_vertices():
    empty = ColoredGraph.from_edges((), ())
    assert run_to_fixpoint(empty).final_coloring == {}
    assert minimum_zero_forcing_set(empty) == frozenset()

    isolated = ColoredGraph.from_edges(("1", "2"), (), black=("1",))
    trace = run_to_fixpoint(isolated)
    assert trace.final_coloring == {"1": Color.BLACK, "2": Color.WHITE}
    assert minimum_zero_forcing_set(isolated) == {"1", "2"}


def test_candidates_and_single_round():
    graph = path(4, black=("1", "4"))
    assert forcing_candidates(graph) == [("1", "2"), ("4", "3")]
    after, events = step_synchronous(graph, step=2)
    assert after.black == {"1", "2", "3", "4"}
    assert [e.forced for e in events] == ["2", "3"]
    unchanged, none = step_synchronous(after)
    assert none == () and unchanged is after


def test_trace_json_document():
    data = run_to_fixpoint(path(3, black=("1",))).to_json_dict()
    assert data == {
        "steps": [
            {"step": 2, "events": [{"forcer": "1", "forced": "2"}]},
            {"step": 3, "events": [{"forcer": "2", "forced": "3"}]},
        ],
        "final_black": ["1", "2", "3"],
        "fixpoint_step": 2,
    }


def test_confluence_on_random_graphs():
    for seed in range(200):
        rng = random.Random(seed)
        nxg = nx.gnp_random_graph(rng.randint(1, 12), 0.3, seed=seed)
        graph = ColoredGraph.from_networkx(nxg, black=[v for v in nxg.nodes if rng.random() < 0.3])
        expected = run_to_fixpoint(graph).final_coloring
        for schedule in range(20):
            assert run_sequential(graph, schedule) == expected


def test_sequential_schedule_needs_a_seed():
    graph = triangle(black=("1", "2"))
    assert run_sequential(graph, 0) == run_sequential(graph, 1) == run_to_fixpoint(graph).final_coloring
    with pytest.raises(TypeError):
        run_sequential(graph)


@settings(max_examples=200)
@given(colored_graphs())
def test_black_set_only_grows(graph):
    trace = run_to_fixpoint(graph)
    black = set(graph.black)
    for record in trace.steps:
        assert all(event.forced not in black for event in record.events)
        black |= {event.forced for event in record.events}
    assert black == trace.final_black
    assert run_to_fixpoint(graph) == trace


@settings(max_examples=200)
@given(colored_graphs(), st.data())
def test_more_initial_black_never_ends_with_less(graph, data):
    extra = data.draw(st.sets(st.sampled_from(graph.vertices))) if len(graph) else set()
    smaller = run_to_fixpoint(graph).final_black
    larger = run_to_fixpoint(graph.with_black(extra)).final_black
    assert smaller <= larger


def test_zero_forcing_set_checks():
    assert is_zero_forcing_set(path(4), ["1"])
    assert not is_zero_forcing_set(path(4), ["2"])
    assert is_zero_forcing_set(triangle(), ["1", "2"])
    with pytest.raises(GraphError):
        is_zero_forcing_set(path(2), ["9"])


@pytest.mark.parametrize(
    "graph, size",
    [
        (triangle(), 2),
        (path(5), 1),
        (ColoredGraph.from_networkx(nx.complete_graph(4)), 3),
        (ColoredGraph.from_networkx(nx.cycle_graph(6)), 2),
        (ColoredGraph.from_networkx(nx.star_graph(4)), 3),
    ],
)
def test_minimum_zero_forcing_set_sizes(graph, size):
    found = minimum_zero_forcing_set(graph)
    assert len(found) == size
    assert is_zero_forcing_set(graph, found)


def test_minimum_is_lexicographically_first():
    assert minimum_zero_forcing_set(path(5)) == {"1"}
    assert minimum_zero_forcing_set(triangle()) == {"1", "2"}


def brute_force_minimum(graph):
    order = sorted(graph.vertices)
    for size in range(len(order) + 1):
        for combo in combinations(order, size):
            if len(closure(graph, combo)) == len(graph):
                return frozenset(combo)


def test_minimum_agrees_with_brute_force_on_small_connected_graphs():
    checked = 0
    for atlas in nx.graph_atlas_g():
        if not 1 <= atlas.number_of_nodes() <= 6 or not nx.is_connected(atlas):
            continue
        graph = ColoredGraph.from_networkx(atlas)
        assert minimum_zero_forcing_set(graph) == brute_force_minimum(graph)
        checked += 1
    assert checked == 1 + 1 + 2 + 6 + 21 + 112


def test_lower_bound_counts_components():
    graph = ColoredGraph.from_networkx(nx.disjoint_union(nx.complete_graph(4), nx.path_graph(3)))
    assert zero_forcing_lower_bound(graph) == 3 + 1
    assert len(minimum_zero_forcing_set(graph)) == 4


def test_limit_is_enforced():
    with pytest.raises(LimitExceeded):
        minimum_zero_forcing_set(path(21))
    assert minimum_zero_forcing_set(path(21), limit=21) == {"1"}
    with pytest.raises(LimitExceeded):
        minimum_zero_forcing_set(path(5), limit=4)
