import pytest

from zforge.errors import ArityMismatch, GraphError, LimitExceeded, NetlistError
from zforge.forcing import is_zero_forcing_set, run_to_fixpoint
from zforge.gadgets import (
    AND,
    CONST0,
    CONST1,
    COPY,
    IDENTITY,
    OR,
    Gadget,
    Harness,
    HarnessContext,
    and_gadget,
    copy_gadget,
    filter_gadget,
    measure_latency,
    measure_output_latencies,
    mount,
    or3_gadget,
    or_gadget,
    search_minimal_gadget,
    transmits_back_force,
    verify_gadget,
    wire_gadget,
)
from zforge.graph import ColoredGraph


def settle(gadget, bits, context=HarnessContext.STUB):
    return run_to_fixpoint(mount(gadget, bits, context).graph)


@pytest.mark.parametrize(
    "gadget, function",
    [
        (and_gadget(), AND),
        (or_gadget(), OR),
        (copy_gadget(), COPY),
        (filter_gadget(), IDENTITY),
        (wire_gadget(1), IDENTITY),
        (wire_gadget(4), IDENTITY),
    ],
)
def test_library_gadgets_pass_the_harness(gadget, function):
    report = verify_gadget(gadget, function)
    assert report.correct
    assert report.propagates
    assert report.passed
    assert measure_latency(gadget) == gadget.latency
    assert measure_output_latencies(gadget) == gadget.output_latencies
    for row in report.rows:
        for port, step in enumerate(row.output_steps):
            if step is not None:
                assert step - 1 == gadget.output_latencies[port]


def test_and_gadget_rows():
    both = settle(and_gadget(), (1, 1))
    assert both.black_step["3"] == 2
    assert both.black_step["~sink0.0"] == 3

    one = settle(and_gadget(), (1, 0))
    assert "3" not in one.final_black
    assert "2" not in one.final_black


def test_or_gadget_single_input_fills_in_the_other():
    trace = settle(or_gadget(), (1, 0))
    assert trace.black_step["4"] == 2
    assert trace.black_step["2"] == 2
    assert trace.black_step["~sink0.0"] == 3

    idle = settle(or_gadget(), (0, 0))
    assert idle.final_black == {"3"}


def test_copy_gadget_staggers_its_outputs():
    trace = settle(copy_gadget(), (1,))
    assert trace.black_step["o1"] == 2
    assert trace.black_step["o2"] == 3
    assert copy_gadget().latency == 2


def test_wire_length_sets_latency():
    assert settle(wire_gadget(3), (1,)).black_step["out"] == 4
    with pytest.raises(NetlistError):
        wire_gadget(0)


def test_filter_passes_forward_in_two_rounds():
    trace = settle(filter_gadget(), (1,))
    assert trace.black_step["o"] == 3


def test_or3_computes_or_but_does_not_propagate():
    report = verify_gadget(or3_gadget(), OR)
    assert report.correct
    assert not report.propagates
    assert not report.row((1, 0)).propagates_forward
    assert report.row((1, 1)).propagates_forward


def test_path_and_is_only_rejected_by_the_bare_context():
    path_and = Gadget(
        "path",
        ColoredGraph.from_edges(("1", "2", "3"), [("1", "2"), ("2", "3")]),
        ("2", "3"),
        ("1",),
        latency=1,
    )
    stub_only = verify_gadget(path_and, AND, Harness(contexts=(HarnessContext.STUB,)))
    assert stub_only.correct
    assert not verify_gadget(path_and, AND).correct


def test_harness_contexts():
    stub = mount(and_gadget(), (0, 1), HarnessContext.STUB)
    bare = mount(and_gadget(), (0, 1), HarnessContext.BARE)
    assert stub.stubs[0] == ("~stub0.0", "~stub0.1")
    assert bare.stubs[0] == ()
    assert bare.graph.black == {"2", "~stub1.0", "~stub1.1"}
    with pytest.raises(ArityMismatch):
        mount(and_gadget(), (1,))


@pytest.mark.parametrize(
    "gadget, bits, expected",
    [
        (and_gadget(), (1, 0), True),
        (and_gadget(), (0, 0), False),
        (or_gadget(), (0, 0), False),
        (copy_gadget(), (0,), True),
        (filter_gadget(), (0,), False),
        (wire_gadget(2), (0,), True),
    ],
)
def test_transmits_back_force(gadget, bits, expected):
    assert transmits_back_force(gadget, bits) is expected


def test_filter_blocks_backward_force():
    mounted = mount(filter_gadget(), (0,))
    forced = mounted.graph.with_black(["o", "~sink0.0"])
    final = run_to_fixpoint(forced).final_black
    assert "i" not in final
    assert "t" not in final
    assert "x" in final


def test_gadgets_are_not_zero_forcing_sets_of_themselves():
    for gadget in (and_gadget(), or_gadget(), copy_gadget(), filter_gadget()):
        assert not is_zero_forcing_set(gadget.fragment, gadget.fragment.black)


def test_ports_must_start_white():
    fragment = ColoredGraph.from_edges(("1", "2"), [("1", "2")], black=("1",))
    with pytest.raises(GraphError):
        Gadget("bad", fragment, ("1",), ("2",), latency=1)


def test_verify_rejects_wrong_arity():
    with pytest.raises(ArityMismatch):
        verify_gadget(and_gadget(), IDENTITY)


def test_minimal_and_is_the_triangle():
    found = search_minimal_gadget(AND, max_vertices=4)
    assert found
    smallest = found[0]
    assert len(smallest.fragment) == 3
    assert smallest.fragment.edge_count == 3
    assert not smallest.fragment.black
    assert smallest.latency == 1
    assert all(len(g.fragment) >= 3 for g in found)
    assert [g for g in found if len(g.fragment) == 3] == [smallest]


def test_minimal_propagating_or_needs_four_vertices_and_edges():
    found = search_minimal_gadget(OR, max_vertices=4)
    assert found
    assert (len(found[0].fragment), found[0].fragment.edge_count) == (4, 4)
    assert all(len(g.fragment) == 4 and g.fragment.edge_count >= 4 for g in found)
    assert search_minimal_gadget(OR, max_vertices=3) == []


def test_constant_gadgets():
    zero = search_minimal_gadget(CONST0, max_vertices=1)
    assert len(zero) == 1 and len(zero[0].fragment) == 1

    assert search_minimal_gadget(CONST1, max_vertices=1) == []
    one = search_minimal_gadget(CONST1, max_vertices=2)
    assert len(one[0].fragment) == 2
    assert len(one[0].fragment.black) == 1


def test_search_limit():
    with pytest.raises(LimitExceeded):
        search_minimal_gadget(AND, max_vertices=7)


def test_gadget_json_document():
    data = copy_gadget().to_json_dict()
    assert data["input_ports"] == ["a"]
    assert data["output_ports"] == ["o1", "o2"]
    assert data["output_latencies"] == [1, 2]
    assert {"id": "b", "color": "black"} in data["vertices"]
