"""Evaluate compiled circuits and study how forces travel through them.

Forces are classified by the layers of the gadget instances that own the forcer and
the forced vertex: moving to a deeper layer is forward, to a shallower one backward.
"""
from __future__ import annotations

import enum
import logging
from collections import defaultdict
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, computed_field

from zforge import SETTINGS
from zforge.compiler import CompiledCircuit, apply_inputs
from zforge.errors import InvalidPartition, LimitExceeded
from zforge.forcing import ForceEvent, ForcingTrace, run_to_fixpoint
from zforge.formula import Mode
from zforge.graph import Color, VertexId
from zforge.netlist import GateKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Evaluation:
    assignment: Mapping[str, int]
    outputs: Mapping[str, Optional[int]]
    output_steps: Mapping[str, Optional[int]]
    trace: ForcingTrace

    @property
    def output(self) -> Optional[int]:
        if len(self.outputs) != 1:
            raise ValueError(f"circuit has {len(self.outputs)} outputs")
        return next(iter(self.outputs.values()))

    @property
    def valid(self) -> bool:
        return all(value is not None for value in self.outputs.values())


def _decode(circuit: CompiledCircuit, rails: Tuple[VertexId, ...], coloring: Mapping[VertexId, Color]) -> Optional[int]:
    lit = [coloring[v] is Color.BLACK for v in rails]
    if circuit.mode is Mode.MONOTONE:
        return int(lit[0])
    if lit[0] == lit[1]:
        return None
    return int(lit[1])


def evaluate(circuit: CompiledCircuit, assignment: Mapping[str, int]) -> Evaluation:
    """Apply `assignment`, force to the fixpoint and decode every output."""
    trace = run_to_fixpoint(apply_inputs(circuit, assignment))
    outputs = {}
    steps = {}
    for name, rails in circuit.outputs.items():
        outputs[name] = _decode(circuit, rails, trace.final_coloring)
        if outputs[name] is None:
            steps[name] = None
        else:
            # the rail that decided the value
            rail = rails[0] if circuit.mode is Mode.MONOTONE else rails[outputs[name]]
            steps[name] = trace.black_step.get(rail)
    return Evaluation(dict(assignment), outputs, steps, trace)


def assignments(names: Sequence[str]) -> Iterator[Dict[str, int]]:
    """Every assignment in binary counting order, the first name being the most significant bit."""
    for bits in product((0, 1), repeat=len(names)):
        yield dict(zip(names, bits))


def bits_label(assignment: Mapping[str, int], names: Sequence[str]) -> str:
    return "".join(str(int(bool(assignment[name]))) for name in names)


def _check_sweep(circuit: CompiledCircuit, limit: Optional[int]) -> None:
    limit = SETTINGS.analysis.sweep_limit if limit is None else limit
    if len(circuit.inputs) > limit:
        raise LimitExceeded("input count", len(circuit.inputs), limit)


class TruthTableEntry(BaseModel):
    input: str
    outputs: Dict[str, Optional[int]]
    output_steps: Dict[str, Optional[int]]


class CircuitTruthTable(BaseModel):
    inputs: List[str]
    outputs: List[str]
    rows: List[TruthTableEntry]

    def column(self, output: Optional[str] = None) -> List[Optional[int]]:
        output = output or self.outputs[0]
        return [row.outputs[output] for row in self.rows]

    def to_text(self) -> str:
        header = " ".join(self.inputs) + " | " + " ".join(self.outputs)
        lines = [header]
        for row in self.rows:
            values = ["-" if row.outputs[o] is None else str(row.outputs[o]) for o in self.outputs]
            lines.append(" ".join(row.input) + " | " + " ".join(values))
        return "\n".join(lines) + "\n"


def truth_table(circuit: CompiledCircuit, limit: Optional[int] = None) -> CircuitTruthTable:
    _check_sweep(circuit, limit)
    names = circuit.input_names
    rows = []
    for assignment in assignments(names):
        result = evaluate(circuit, assignment)
        rows.append(
            TruthTableEntry(
                input=bits_label(assignment, names),
                outputs=dict(result.outputs),
                output_steps=dict(result.output_steps),
            )
        )
    return CircuitTruthTable(inputs=names, outputs=circuit.output_names, rows=rows)


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    INTERNAL = "internal"


@dataclass(frozen=True)
class ClassifiedEvent:
    event: ForceEvent
    direction: Direction
    from_layer: int
    to_layer: int
    crossed_filter: Optional[str] = None


def _crossed_filter(circuit: CompiledCircuit, event: ForceEvent) -> Optional[str]:
    """Gate id of the filter whose input port this event forces from inside, if any."""
    gate_id = circuit.owner_of.get(event.forcer)
    if gate_id is None:
        return None
    instance = circuit.instance(gate_id)
    if instance.kind is GateKind.FILTER and event.forced == instance.input_ports[0]:
        return gate_id
    return None


def classify_forces(circuit: CompiledCircuit, trace: ForcingTrace) -> List[ClassifiedEvent]:
    classified = []
    for event in trace.events:
        source = circuit.layer_of[event.forcer]
        target = circuit.layer_of[event.forced]
        if target > source:
            direction = Direction.FORWARD
        elif target < source:
            direction = Direction.BACKWARD
        else:
            direction = Direction.INTERNAL
        classified.append(
            ClassifiedEvent(event, direction, source, target, _crossed_filter(circuit, event))
        )
    return classified


class BackForcingRow(BaseModel):
    input: str
    outputs: Dict[str, Optional[int]]
    output_step: Optional[int]
    backward_events: int
    inputs_all_black: bool
    back_forced_inputs: List[str]
    filter_crossings: int

    @computed_field
    @property
    def output(self) -> Optional[int]:
        return next(iter(self.outputs.values())) if len(self.outputs) == 1 else None


class BackForcingReport(BaseModel):
    inputs: List[str]
    assignments: List[BackForcingRow]

    @computed_field
    @property
    def all_inputs_black(self) -> List[str]:
        return [row.input for row in self.assignments if row.inputs_all_black]

    @computed_field
    @property
    def condition(self) -> str:
        return describe_condition(self.all_inputs_black, len(self.inputs))

    def row(self, label: str) -> BackForcingRow:
        for row in self.assignments:
            if row.input == label:
                return row
        raise KeyError(label)


def describe_condition(labels: Iterable[str], width: int) -> str:
    """Summarize a set of bit strings as a weight threshold when it is one."""
    labels = sorted(labels)
    if not labels:
        return "never"
    chosen = set(labels)
    for threshold in range(width + 1):
        expected = {
            "".join(bits) for bits in product("01", repeat=width) if bits.count("1") >= threshold
        }
        if chosen == expected:
            return "always" if threshold == 0 else f"at least {threshold} of {width} inputs set"
    return "assignments: " + ", ".join(labels)


def back_forcing_report(circuit: CompiledCircuit, limit: Optional[int] = None) -> BackForcingReport:
    """ For every assignment, count backward forces and check whether every input vertex
    ends up black even though only some inputs were set.
    """
    _check_sweep(circuit, limit)
    names = circuit.input_names
    input_vertices = circuit.input_vertices()
    rows = []
    for assignment in assignments(names):
        result = evaluate(circuit, assignment)
        classified = classify_forces(circuit, result.trace)
        final = result.trace.final_coloring
        steps = list(result.output_steps.values())
        back_forced = [
            name
            for name, rails in circuit.inputs.items()
            for rail in rails
            if rail not in result.trace.initial_black and final[rail] is Color.BLACK
        ]
        rows.append(
            BackForcingRow(
                input=bits_label(assignment, names),
                outputs=dict(result.outputs),
                output_step=max(steps) if steps and None not in steps else None,
                backward_events=sum(1 for c in classified if c.direction is Direction.BACKWARD),
                inputs_all_black=all(final[v] is Color.BLACK for v in input_vertices),
                back_forced_inputs=sorted(set(back_forced), key=names.index),
                filter_crossings=sum(1 for c in classified if c.crossed_filter is not None),
            )
        )
    report = BackForcingReport(inputs=names, assignments=rows)
    logger.info(f"all inputs black for {len(report.all_inputs_black)} of {len(rows)} assignments")
    return report


class Verdict(str, enum.Enum):
    ALWAYS = "always_inferable"
    NEVER = "never_inferable"
    DEPENDS = "depends"


class ChoiceLeakage(BaseModel):
    verdict: Verdict
    inferable: List[str]
    ambiguous: List[str]


class PartyLeakage(BaseModel):
    inputs: List[str]
    observed_vertices: List[str]
    choices: Dict[str, ChoiceLeakage]


class LeakageReport(BaseModel):
    inputs: List[str]
    partition: Dict[str, List[str]]
    parties: Dict[str, PartyLeakage]

    def verdict(self, party: str, choice: str) -> Verdict:
        return self.parties[party].choices[choice].verdict


def _validate_partition(circuit: CompiledCircuit, partition: Mapping[str, Iterable[str]]) -> Dict[str, List[str]]:
    parties = {party: list(names) for party, names in partition.items()}
    seen: Dict[str, str] = {}
    for party, names in parties.items():
        if not names:
            raise InvalidPartition(f"party {party!r} owns no inputs")
        for name in names:
            if name not in circuit.inputs:
                raise InvalidPartition(f"party {party!r} names unknown input {name!r}")
            if name in seen:
                raise InvalidPartition(f"input {name!r} belongs to both {seen[name]!r} and {party!r}")
            seen[name] = party
    uncovered = [name for name in circuit.inputs if name not in seen]
    if uncovered:
        raise InvalidPartition(f"inputs {uncovered} belong to no party")
    return parties


def observed_vertices(circuit: CompiledCircuit, party_inputs: Iterable[str]) -> List[VertexId]:
    """ What a party sees: its own input vertices plus every vertex that only belongs to
    gadget instances whose inputs depend on nothing but the party's own inputs.
    """
    own = set(party_inputs)
    exclusive = {i.gate_id for i in circuit.instances if i.support and i.support <= own}
    membership: Dict[VertexId, set] = defaultdict(set)
    for instance in circuit.instances:
        for vertex in instance.vertices:
            membership[vertex].add(instance.gate_id)
    rails = {v for name in own for v in circuit.inputs[name]}
    return [
        v
        for v in circuit.graph.vertices
        if v in rails or (membership[v] and membership[v] <= exclusive)
    ]


def leakage_analysis(
    circuit: CompiledCircuit,
    partition: Mapping[str, Iterable[str]],
    limit: Optional[int] = None,
) -> LeakageReport:
    """ Decide, for each party and each of its input choices, whether the final coloring
    of the vertices it observes determines the circuit's output.
    """
    parties = _validate_partition(circuit, partition)
    _check_sweep(circuit, limit)
    names = circuit.input_names
    runs = []
    for assignment in assignments(names):
        result = evaluate(circuit, assignment)
        runs.append((assignment, tuple(result.outputs.values()), result.trace.final_coloring))

    report = {}
    for party, own in parties.items():
        own = [name for name in names if name in own]
        seen = observed_vertices(circuit, own)
        groups: Dict[str, Dict[tuple, set]] = defaultdict(lambda: defaultdict(set))
        members: Dict[str, List[Tuple[str, tuple]]] = defaultdict(list)
        for assignment, outputs, coloring in runs:
            choice = bits_label(assignment, own)
            view = tuple(coloring[v] is Color.BLACK for v in seen)
            groups[choice][view].add(outputs)
            members[choice].append((bits_label(assignment, names), view))

        choices = {}
        for choice, runs_for_choice in members.items():
            inferable = [label for label, view in runs_for_choice if len(groups[choice][view]) == 1]
            ambiguous = [label for label, view in runs_for_choice if len(groups[choice][view]) > 1]
            if not ambiguous:
                verdict = Verdict.ALWAYS
            elif not inferable:
                verdict = Verdict.NEVER
            else:
                verdict = Verdict.DEPENDS
            choices[choice] = ChoiceLeakage(verdict=verdict, inferable=inferable, ambiguous=ambiguous)
        report[party] = PartyLeakage(inputs=own, observed_vertices=seen, choices=choices)

    return LeakageReport(inputs=names, partition={p: list(v) for p, v in parties.items()}, parties=report)
