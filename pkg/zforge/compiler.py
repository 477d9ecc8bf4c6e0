"""Compile netlists into a single colored graph by gluing gadget instances at their nets.

Every net becomes one vertex: a gate's output port and the next gate's input port are
the same vertex. Net ids are kept as vertex ids, gadget-internal vertices are named
`{gate_id}.{local}`.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Tuple, Union

from zforge import SETTINGS
from zforge.errors import InputError, MissingVariable, UnknownVariable
from zforge.forcing import ForcingTrace
from zforge.formula import Formula, Mode, formula_variables, parse_formula
from zforge.gadgets import (
    Gadget,
    and_gadget,
    copy_gadget,
    filter_gadget,
    or_gadget,
    wire_gadget,
)
from zforge.graph import ColoredGraph, VertexId
from zforge.netlist import (
    GateKind,
    Gate,
    Netlist,
    insert_delays,
    logical_name,
    lower_dual_rail,
    lower_to_netlist,
    lower_toffoli,
    splice_filters,
    splice_wires,
)

logger = logging.getLogger(__name__)


class VertexRole(str, enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    HELPER = "helper"
    INTERNAL = "internal"


@dataclass(frozen=True)
class CompileOptions:
    balance_delays: bool = True
    insert_filters: bool = False
    net_delay: int = 0

    @classmethod
    def from_settings(cls, **overrides: Union[bool, int, None]) -> CompileOptions:
        options = cls(
            balance_delays=SETTINGS.compiler.balance_delays,
            insert_filters=SETTINGS.compiler.insert_filters,
            net_delay=SETTINGS.compiler.net_delay,
        )
        return replace(options, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True)
class GadgetInstance:
    gate_id: str
    kind: GateKind
    label: str
    layer: int
    vertices: Tuple[VertexId, ...]
    input_ports: Tuple[VertexId, ...]
    output_ports: Tuple[VertexId, ...]
    support: FrozenSet[str]


@dataclass(frozen=True)
class CompiledCircuit:
    """ The glued graph plus everything analysis needs to read it back.

    `inputs`/`outputs` map logical names to their vertices: one vertex in monotone mode,
    a (zero-rail, one-rail) pair in dual-rail mode. `owner_of` attributes every vertex to
    one gadget instance (the driver of a glued net, the consumer of a primary input), and
    `layer_of` is that instance's layer, 0 for unattributed vertices.
    """

    graph: ColoredGraph
    mode: Mode
    inputs: Mapping[str, Tuple[VertexId, ...]]
    outputs: Mapping[str, Tuple[VertexId, ...]]
    layer_of: Mapping[VertexId, int]
    owner_of: Mapping[VertexId, Optional[str]]
    roles: Mapping[VertexId, VertexRole]
    instances: Tuple[GadgetInstance, ...]
    netlist: Netlist
    expected_output_step: Optional[int]
    options: CompileOptions = field(default_factory=CompileOptions)
    formula: Optional[str] = None

    @property
    def input_names(self) -> List[str]:
        return list(self.inputs)

    @property
    def output_names(self) -> List[str]:
        return list(self.outputs)

    @property
    def output(self) -> Tuple[VertexId, ...]:
        if len(self.outputs) != 1:
            raise InputError(f"circuit has {len(self.outputs)} outputs")
        return next(iter(self.outputs.values()))

    def instance(self, gate_id: str) -> GadgetInstance:
        for instance in self.instances:
            if instance.gate_id == gate_id:
                return instance
        raise KeyError(gate_id)

    def input_vertices(self) -> List[VertexId]:
        return [v for rails in self.inputs.values() for v in rails]

    def to_json_dict(self) -> Dict[str, Any]:
        def packed(rails: Tuple[VertexId, ...]):
            return rails[0] if self.mode is Mode.MONOTONE else list(rails)

        data = self.graph.to_json_dict()
        data.update(
            mode=self.mode.value,
            formula=self.formula,
            options=asdict(self.options),
            inputs={name: packed(rails) for name, rails in self.inputs.items()},
            outputs={name: packed(rails) for name, rails in self.outputs.items()},
            layers=dict(self.layer_of),
            roles={v: role.value for v, role in self.roles.items()},
            expected_output_step=self.expected_output_step,
            netlist=self.netlist.to_json_dict(),
        )
        if len(self.outputs) == 1:
            data["output"] = packed(self.output)
        return data

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Any]) -> CompiledCircuit:
        """Rebuild by re-gluing the stored netlist, which already carries filters and delays."""
        try:
            netlist = Netlist.from_json_dict(data["netlist"])
            mode = Mode(data["mode"])
            options = CompileOptions(**data.get("options", {}))
        except (KeyError, TypeError, ValueError) as error:
            raise InputError(f"malformed circuit document: {error}") from None
        return glue(netlist, mode, options, formula=data.get("formula"))


_GADGET_FOR = {
    GateKind.AND: and_gadget,
    GateKind.OR: or_gadget,
    GateKind.COPY: copy_gadget,
    GateKind.FILTER: filter_gadget,
}


def gadget_for(gate: Gate) -> Gadget:
    if gate.kind is GateKind.WIRE:
        return wire_gadget(gate.length)
    return _GADGET_FOR[gate.kind]()


def _support(netlist: Netlist) -> Dict[str, FrozenSet[str]]:
    support = {net: frozenset([logical_name(name)]) for name, net in netlist.primary_inputs.items()}
    for gate in netlist.gates:
        joined = frozenset().union(*(support[net] for net in gate.inputs))
        support.update((net, joined) for net in gate.outputs)
    return support


def glue(
    netlist: Netlist,
    mode: Mode,
    options: Optional[CompileOptions] = None,
    formula: Optional[str] = None,
) -> CompiledCircuit:
    """Instantiate one gadget per gate and identify ports with nets. No netlist rewriting."""
    vertices: Dict[VertexId, None] = {}
    edges: Dict[Tuple[VertexId, VertexId], None] = {}
    black = set()
    owner: Dict[VertexId, Optional[str]] = {}
    helpers = set()
    instances = []
    support = _support(netlist)

    for net in netlist.primary_inputs.values():
        vertices.setdefault(net)
        owner[net] = None

    drivers = netlist.driver_of()
    loads = netlist.load_of()
    for gate in netlist.gates:
        gadget = gadget_for(gate)
        ports = dict(zip(gadget.input_ports, gate.inputs))
        ports.update(zip(gadget.output_ports, gate.outputs))

        def placed(local: VertexId) -> VertexId:
            return ports.get(local, f"{gate.gate_id}.{local}")

        members = [placed(v) for v in gadget.fragment.vertices]
        for vertex in members:
            vertices.setdefault(vertex)
            if vertex not in ports.values():
                owner[vertex] = gate.gate_id
        for u, v in gadget.fragment.edges:
            edges.setdefault((placed(u), placed(v)))
        for helper in gadget.fragment.black:
            black.add(placed(helper))
            helpers.add(placed(helper))

        instances.append(
            GadgetInstance(
                gate_id=gate.gate_id,
                kind=gate.kind,
                label=gate.label,
                layer=netlist.layers[gate.gate_id],
                vertices=tuple(members),
                input_ports=tuple(gate.inputs),
                output_ports=tuple(gate.outputs),
                support=frozenset().union(*(support[net] for net in gate.inputs)),
            )
        )

    for net in netlist.nets():
        driver = drivers.get(net) or loads.get(net)
        owner[net] = driver.gate_id if driver is not None else None

    graph = ColoredGraph.from_edges(vertices, edges, black)
    layer_of = {v: (netlist.layers[owner[v]] if owner.get(v) else 0) for v in graph.vertices}

    input_nets = set(netlist.primary_inputs.values())
    output_nets = set(netlist.primary_outputs.values())
    roles = {}
    for vertex in graph.vertices:
        if vertex in input_nets:
            roles[vertex] = VertexRole.INPUT
        elif vertex in output_nets:
            roles[vertex] = VertexRole.OUTPUT
        elif vertex in helpers:
            roles[vertex] = VertexRole.HELPER
        else:
            roles[vertex] = VertexRole.INTERNAL

    expected = None
    if netlist.is_balanced():
        ready = netlist.ready_steps()
        expected = 1 + max((ready[net] for net in netlist.primary_outputs.values()), default=0)

    circuit = CompiledCircuit(
        graph=graph,
        mode=Mode(mode),
        inputs=_group(netlist.primary_inputs, mode),
        outputs=_group(netlist.primary_outputs, mode),
        layer_of=layer_of,
        owner_of={v: owner.get(v) for v in graph.vertices},
        roles=roles,
        instances=tuple(instances),
        netlist=netlist,
        expected_output_step=expected,
        options=options or CompileOptions(),
        formula=formula,
    )
    logger.info(
        f"compiled {len(instances)} gadgets into {len(graph)} vertices and {graph.edge_count} edges"
    )
    return circuit


def _group(ports: Mapping[str, VertexId], mode: Mode) -> Dict[str, Tuple[VertexId, ...]]:
    if Mode(mode) is Mode.MONOTONE:
        return {name: (net,) for name, net in ports.items()}
    grouped: Dict[str, List[VertexId]] = {}
    for name, net in ports.items():
        grouped.setdefault(logical_name(name), [None, None])[int(name.endswith("#1"))] = net
    return {name: tuple(rails) for name, rails in grouped.items()}


def _prepare(netlist: Netlist, options: CompileOptions) -> Netlist:
    prepared = splice_filters(netlist, everywhere=options.insert_filters)
    prepared = splice_wires(prepared, options.net_delay)
    if options.balance_delays:
        prepared = insert_delays(prepared)
    return prepared


def compile_monotone(netlist: Netlist, options: Optional[CompileOptions] = None) -> CompiledCircuit:
    """ Glue a monotone netlist into one graph.

    COPY branches feeding logic gates are isolated with filters; with
    `options.insert_filters` every gate-to-gate net is. `options.net_delay` puts a delay
    line of that length on every gate-to-gate net. With `options.balance_delays` all
    inputs of every gadget arrive in the same round, so the output is ready at
    `expected_output_step`.
    """
    options = options or CompileOptions.from_settings()
    return glue(_prepare(netlist, options), Mode.MONOTONE, options)


def compile_dual_rail(ast: Formula, options: Optional[CompileOptions] = None) -> CompiledCircuit:
    options = options or CompileOptions.from_settings()
    return glue(_prepare(lower_dual_rail(ast), options), Mode.DUAL_RAIL, options)


def compile_formula(
    text: str,
    mode: Mode = Mode.MONOTONE,
    options: Optional[CompileOptions] = None,
) -> CompiledCircuit:
    """Parse, lower and compile formula text; the text is kept on the circuit."""
    mode = Mode(mode)
    ast = parse_formula(text, mode)
    if mode is Mode.MONOTONE:
        circuit = compile_monotone(lower_to_netlist(ast), options)
    else:
        circuit = compile_dual_rail(ast, options)
    logger.debug(f"variables {formula_variables(ast)} compiled in {mode.value} mode")
    return replace(circuit, formula=text.strip())


def build_toffoli(options: Optional[CompileOptions] = None) -> CompiledCircuit:
    options = options or CompileOptions.from_settings()
    return glue(_prepare(lower_toffoli(), options), Mode.DUAL_RAIL, options)


def apply_inputs(circuit: CompiledCircuit, assignment: Mapping[str, int]) -> ColoredGraph:
    """Color input vertices for `assignment`; helpers keep their black pre-coloring."""
    unknown = sorted(set(assignment) - set(circuit.inputs))
    if unknown:
        raise UnknownVariable(f"circuit has no input named {unknown[0]!r}")
    missing = [name for name in circuit.inputs if name not in assignment]
    if missing:
        raise MissingVariable(f"no value for input {missing[0]!r}")

    black = []
    for name, rails in circuit.inputs.items():
        bit = int(bool(assignment[name]))
        if circuit.mode is Mode.DUAL_RAIL:
            black.append(rails[bit])
        elif bit:
            black.append(rails[0])
    return circuit.graph.with_black(black)


def read_output_at_step(
    circuit: CompiledCircuit,
    trace: ForcingTrace,
    step: Optional[int] = None,
    output: Optional[str] = None,
) -> Optional[int]:
    """ Decode an output from the coloring at `step` (default `expected_output_step`).

    Returns None for a dual-rail output whose rails are both white or both black.
    """
    step = circuit.expected_output_step if step is None else step
    rails = circuit.outputs[output] if output is not None else circuit.output
    lit = [trace.black_step.get(v) is not None and (step is None or trace.black_step[v] <= step) for v in rails]
    if circuit.mode is Mode.MONOTONE:
        return int(lit[0])
    if lit[0] == lit[1]:
        return None
    return int(lit[1])
