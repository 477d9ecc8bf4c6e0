import pytest

from zforge.analysis import (
    Direction,
    Verdict,
    assignments,
    back_forcing_report,
    classify_forces,
    describe_condition,
    evaluate,
    leakage_analysis,
    observed_vertices,
    truth_table,
)
from zforge.compiler import CompileOptions, compile_formula
from zforge.errors import InvalidPartition, LimitExceeded
from zforge.forcing import ForceEvent
from zforge.formula import Mode


def test_evaluation_events(two_and_or):
    result = evaluate(two_and_or, {"x1": 1, "x2": 1, "x3": 0, "x4": 0})
    assert result.output == 1
    assert result.trace.events == [
        ForceEvent(2, "in.x1", "n1"),
        ForceEvent(2, "in.x2", "n1"),
        ForceEvent(3, "n1", "n3"),
        ForceEvent(3, "g3.3", "n2"),
    ]


def test_classification(two_and_or):
    result = evaluate(two_and_or, {"x1": 1, "x2": 1, "x3": 0, "x4": 0})
    directions = [c.direction for c in classify_forces(two_and_or, result.trace)]
    assert directions == [Direction.INTERNAL, Direction.INTERNAL, Direction.FORWARD, Direction.BACKWARD]


def test_back_force_reaches_the_last_input(two_and_or):
    result = evaluate(two_and_or, {"x1": 1, "x2": 1, "x3": 1, "x4": 0})
    assert result.trace.black_step["in.x4"] == 4


def test_single_gadget_circuits_only_force_internally():
    for text in ("x1 AND x2", "x1 OR x2"):
        circuit = compile_formula(text, Mode.MONOTONE, CompileOptions())
        for assignment in assignments(circuit.input_names):
            trace = evaluate(circuit, assignment).trace
            assert all(c.direction is Direction.INTERNAL for c in classify_forces(circuit, trace))


def test_truth_table(two_and_or):
    table = truth_table(two_and_or)
    assert table.inputs == ["x1", "x2", "x3", "x4"]
    assert [row.input for row in table.rows][:3] == ["0000", "0001", "0010"]
    assert table.column() == [int(r.input[:2] == "11" or r.input[2:] == "11") for r in table.rows]
    text = table.to_text()
    assert text.splitlines()[0] == "x1 x2 x3 x4 | out"
    assert text.splitlines()[-1] == "1 1 1 1 | 1"


def test_back_forcing_report(two_and_or):
    report = back_forcing_report(two_and_or)
    assert report.all_inputs_black == ["0111", "1011", "1101", "1110", "1111"]
    assert report.condition == "at least 3 of 4 inputs set"
    row = report.row("1100")
    assert row.output == 1
    assert row.backward_events == 1
    assert not row.inputs_all_black
    assert report.row("1110").back_forced_inputs == ["x4"]
    assert report.row("0000").backward_events == 0
    dumped = report.model_dump(mode="json")
    assert dumped["assignments"][12] == {
        "input": "1100",
        "outputs": {"out": 1},
        "output_step": 3,
        "output": 1,
        "backward_events": 1,
        "inputs_all_black": False,
        "back_forced_inputs": [],
        "filter_crossings": 0,
    }


def test_filters_stop_back_forcing(two_and_or_filtered):
    report = back_forcing_report(two_and_or_filtered)
    assert all(row.filter_crossings == 0 for row in report.assignments)
    assert report.all_inputs_black == ["1111"]
    assert report.condition == "at least 4 of 4 inputs set"
    result = evaluate(two_and_or_filtered, {"x1": 1, "x2": 1, "x3": 0, "x4": 0})
    assert "in.x3" not in result.trace.final_black
    assert "in.x4" not in result.trace.final_black


def test_filters_do_not_change_outputs(two_and_or, two_and_or_filtered):
    plain = truth_table(two_and_or)
    filtered = truth_table(two_and_or_filtered)
    assert filtered.column() == plain.column()


@pytest.mark.parametrize(
    "labels, width, expected",
    [
        ([], 2, "never"),
        (["00", "01", "10", "11"], 2, "always"),
        (["11"], 2, "at least 2 of 2 inputs set"),
        (["01", "10"], 2, "assignments: 01, 10"),
    ],
)
def test_condition_summary(labels, width, expected):
    assert describe_condition(labels, width) == expected


def test_leakage(two_and_or):
    report = leakage_analysis(two_and_or, {"A": ["x1", "x2"], "B": ["x3", "x4"]})
    assert report.parties["A"].observed_vertices == ["in.x1", "in.x2"]
    assert report.verdict("A", "00") is Verdict.NEVER
    assert report.verdict("A", "10") is Verdict.ALWAYS
    assert report.verdict("A", "01") is Verdict.ALWAYS
    assert report.verdict("A", "11") is Verdict.ALWAYS
    assert report.verdict("B", "00") is Verdict.NEVER


def test_a_party_filter_reveals_the_backward_force(two_and_or_filtered):
    report = leakage_analysis(two_and_or_filtered, {"A": ["x1", "x2"], "B": ["x3", "x4"]})
    assert report.parties["A"].observed_vertices == ["in.x1", "in.x2", "n1", "g4.b", "g4.t", "g4.x"]
    assert report.verdict("A", "00") is Verdict.ALWAYS
    assert report.verdict("A", "10") is Verdict.ALWAYS


def test_depends_verdict(two_and_or):
    report = leakage_analysis(two_and_or, {"A": ["x1"], "B": ["x2", "x3", "x4"]})
    choice = report.parties["A"].choices["0"]
    assert choice.verdict is Verdict.DEPENDS
    assert choice.inferable == ["0111"]
    assert "0011" in choice.ambiguous


def test_single_party_sees_its_own_circuit(two_and_or):
    report = leakage_analysis(two_and_or, {"all": ["x1", "x2", "x3", "x4"]})
    assert set(report.parties["all"].observed_vertices) == set(two_and_or.graph.vertices)
    assert all(c.verdict is Verdict.ALWAYS for c in report.parties["all"].choices.values())


@pytest.mark.parametrize(
    "partition",
    [
        {"A": ["x1", "x2"], "B": ["x3"]},
        {"A": ["x1", "x2"], "B": ["x2", "x3", "x4"]},
        {"A": ["x1", "x2", "x3", "x4", "x5"]},
        {"A": [], "B": ["x1", "x2", "x3", "x4"]},
    ],
)
def test_invalid_partitions(two_and_or, partition):
    with pytest.raises(InvalidPartition):
        leakage_analysis(two_and_or, partition)


def test_observed_vertices_skip_shared_nets(two_and_or):
    assert observed_vertices(two_and_or, ["x3", "x4"]) == ["in.x3", "in.x4"]


def test_sweep_limit(two_and_or):
    with pytest.raises(LimitExceeded):
        truth_table(two_and_or, limit=3)
    with pytest.raises(LimitExceeded):
        back_forcing_report(two_and_or, limit=3)
