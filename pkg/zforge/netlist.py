"""Gate-level netlists and the passes that rewrite them.

A net is a single vertex once the netlist is compiled, so every net has exactly one
driver (a primary input or a gate output) and exactly one load (a gate input or a
primary output). Fan-out is only ever expressed through COPY gates.
"""
from __future__ import annotations

import enum
import logging
import re
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from zforge.errors import MonotoneViolation, NetlistError, NonMonotoneGate
from zforge.formula import And, Formula, Nand, Not, Or, Var, Xor, formula_variables

logger = logging.getLogger(__name__)

NetId = str
RAIL_SUFFIX = ("#0", "#1")


class GateKind(str, enum.Enum):
    AND = "AND"
    OR = "OR"
    COPY = "COPY"
    WIRE = "WIRE"
    FILTER = "FILTER"


_SHAPES = {
    GateKind.AND: (2, 1),
    GateKind.OR: (2, 1),
    GateKind.COPY: (1, 2),
    GateKind.WIRE: (1, 1),
    GateKind.FILTER: (1, 1),
}
NON_MONOTONE_KINDS = ("NOT", "NAND", "XOR")


@dataclass(frozen=True)
class Gate:
    gate_id: str
    kind: GateKind
    inputs: Tuple[NetId, ...]
    outputs: Tuple[NetId, ...]
    length: int = 0

    def __post_init__(self):
        arity, fanout = _SHAPES[self.kind]
        if len(self.inputs) != arity or len(self.outputs) != fanout:
            raise NetlistError(
                f"{self.kind.value} gate {self.gate_id} needs {arity} inputs and {fanout} outputs"
            )
        if self.kind is GateKind.WIRE and self.length < 1:
            raise NetlistError(f"wire {self.gate_id} needs length >= 1")

    @property
    def label(self) -> str:
        return f"WIRE({self.length})" if self.kind is GateKind.WIRE else self.kind.value

    def output_latencies(self) -> Tuple[int, ...]:
        if self.kind is GateKind.COPY:
            return (1, 2)
        if self.kind is GateKind.FILTER:
            return (2,)
        if self.kind is GateKind.WIRE:
            return (self.length,)
        return (1,)

    def apply(self, values: Sequence[int]) -> Tuple[int, ...]:
        if self.kind is GateKind.AND:
            return (values[0] & values[1],)
        if self.kind is GateKind.OR:
            return (values[0] | values[1],)
        if self.kind is GateKind.COPY:
            return (values[0], values[0])
        return (values[0],)


@dataclass(frozen=True)
class Netlist:
    """Gates in topological order, with the layer of each gate (longest path from the inputs)."""

    gates: Tuple[Gate, ...]
    primary_inputs: Mapping[str, NetId]
    primary_outputs: Mapping[str, NetId]
    layers: Mapping[str, int]

    @classmethod
    def build(
        cls,
        gates: Sequence[Gate],
        primary_inputs: Mapping[str, NetId],
        primary_outputs: Mapping[str, NetId],
    ) -> Netlist:
        """Validate the single-driver/single-load discipline, then order and layer the gates."""
        drivers: Dict[NetId, str] = {}
        ids = set()
        for name, net in primary_inputs.items():
            if net in drivers:
                raise NetlistError(f"net {net} has two drivers")
            drivers[net] = f"input {name}"
        for gate in gates:
            if gate.gate_id in ids:
                raise NetlistError(f"duplicate gate id {gate.gate_id}")
            ids.add(gate.gate_id)
            for net in gate.outputs:
                if net in drivers:
                    raise NetlistError(f"net {net} has two drivers")
                drivers[net] = gate.gate_id

        loads: Dict[NetId, str] = {}
        endpoints = [(net, gate.gate_id) for gate in gates for net in gate.inputs]
        endpoints += [(net, f"output {name}") for name, net in primary_outputs.items()]
        for net, user in endpoints:
            if net not in drivers:
                raise NetlistError(f"net {net} used by {user} has no driver")
            if net in loads:
                raise NetlistError(f"net {net} fans out to {loads[net]} and {user}; use COPY")
            loads[net] = user
        for net, driver in drivers.items():
            if net not in loads:
                raise NetlistError(f"net {net} driven by {driver} is never used")

        layers = _layering(gates, drivers)
        position = {gate.gate_id: k for k, gate in enumerate(gates)}
        ordered = sorted(gates, key=lambda g: (layers[g.gate_id], position[g.gate_id]))
        return cls(
            tuple(ordered),
            dict(primary_inputs),
            dict(primary_outputs),
            {g.gate_id: layers[g.gate_id] for g in ordered},
        )

    @property
    def primary_output(self) -> NetId:
        if len(self.primary_outputs) != 1:
            raise NetlistError(f"netlist has {len(self.primary_outputs)} primary outputs")
        return next(iter(self.primary_outputs.values()))

    def gate(self, gate_id: str) -> Gate:
        for gate in self.gates:
            if gate.gate_id == gate_id:
                return gate
        raise KeyError(gate_id)

    def count(self, kind: GateKind) -> int:
        return sum(1 for gate in self.gates if gate.kind is kind)

    def driver_of(self) -> Dict[NetId, Gate]:
        return {net: gate for gate in self.gates for net in gate.outputs}

    def load_of(self) -> Dict[NetId, Gate]:
        return {net: gate for gate in self.gates for net in gate.inputs}

    def nets(self) -> List[NetId]:
        nets = list(self.primary_inputs.values())
        for gate in self.gates:
            nets.extend(gate.outputs)
        return nets

    def evaluate(self, assignment: Mapping[str, int]) -> Dict[NetId, int]:
        """Logical value of every net under `assignment` (primary input name -> bit)."""
        values = {net: int(bool(assignment[name])) for name, net in self.primary_inputs.items()}
        for gate in self.gates:
            values.update(zip(gate.outputs, gate.apply([values[n] for n in gate.inputs])))
        return values

    def ready_steps(self) -> Dict[NetId, int]:
        """Round offset at which each net turns black when every input fires at offset 0.

        Assumes the slowest input of a gate decides; only exact for balanced netlists.
        """
        ready = {net: 0 for net in self.primary_inputs.values()}
        for gate in self.gates:
            start = max(ready[net] for net in gate.inputs)
            for net, latency in zip(gate.outputs, gate.output_latencies()):
                ready[net] = start + latency
        return ready

    def is_balanced(self) -> bool:
        ready = self.ready_steps()
        for gate in self.gates:
            if len({ready[net] for net in gate.inputs}) > 1:
                return False
        return len({ready[net] for net in self.primary_outputs.values()}) <= 1

    def to_json_dict(self) -> Dict[str, Any]:
        gates = []
        for gate in self.gates:
            record = {
                "id": gate.gate_id,
                "kind": gate.kind.value,
                "inputs": list(gate.inputs),
                "outputs": list(gate.outputs),
                "layer": self.layers[gate.gate_id],
            }
            if gate.kind is GateKind.WIRE:
                record["length"] = gate.length
            gates.append(record)
        return {
            "gates": gates,
            "primary_inputs": dict(self.primary_inputs),
            "primary_outputs": dict(self.primary_outputs),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Any]) -> Netlist:
        try:
            gates = []
            for record in data["gates"]:
                kind = str(record["kind"]).upper()
                if kind in NON_MONOTONE_KINDS:
                    raise NonMonotoneGate(f"gate {record['id']} is a {kind} gate")
                gates.append(
                    Gate(
                        gate_id=record["id"],
                        kind=GateKind(kind),
                        inputs=tuple(record["inputs"]),
                        outputs=tuple(record["outputs"]),
                        length=int(record.get("length", 0)),
                    )
                )
            return cls.build(gates, dict(data["primary_inputs"]), dict(data["primary_outputs"]))
        except (AttributeError, KeyError, TypeError, ValueError) as error:
            raise NetlistError(f"malformed netlist document: {error}") from None


def _layering(gates: Sequence[Gate], drivers: Mapping[NetId, str]) -> Dict[str, int]:
    by_id = {gate.gate_id: gate for gate in gates}
    layers: Dict[str, int] = {}
    visiting = set()

    def layer(gate_id: str) -> int:
        if gate_id in layers:
            return layers[gate_id]
        if gate_id in visiting:
            raise NetlistError(f"combinational cycle through gate {gate_id}")
        visiting.add(gate_id)
        upstream = [drivers[net] for net in by_id[gate_id].inputs if drivers[net] in by_id]
        layers[gate_id] = 1 + max((layer(g) for g in upstream), default=0)
        visiting.discard(gate_id)
        return layers[gate_id]

    for gate in gates:
        layer(gate.gate_id)
    return layers


def _next_number(names, prefix: str) -> int:
    pattern = re.compile(rf"^{re.escape(prefix)}(\d+)$")
    numbers = [int(m.group(1)) for m in map(pattern.match, names) if m]
    return max(numbers, default=0) + 1


class _Namer:
    """Fresh gate and net ids that do not collide with those already in a netlist."""

    def __init__(self, netlist: Netlist):
        self._gate = _next_number([g.gate_id for g in netlist.gates], "g")
        self._net = _next_number(netlist.nets(), "n")

    def gate(self) -> str:
        self._gate += 1
        return f"g{self._gate - 1}"

    def net(self) -> NetId:
        self._net += 1
        return f"n{self._net - 1}"


@dataclass
class _Draft:
    kind: GateKind
    inputs: List[NetId]
    outputs: List[NetId]


class NetlistBuilder:
    """ Incremental netlist construction used by the lowering passes.

    Nets may be used any number of times while building; `build` inserts a balanced
    COPY tree wherever a net has more than one load and numbers the gates g1..gN in
    topological order.
    """

    def __init__(self):
        self._drafts: List[_Draft] = []
        self._inputs: Dict[str, NetId] = {}
        self._outputs: Dict[str, NetId] = {}
        self._nets = 0

    def _net(self) -> NetId:
        self._nets += 1
        return f"n{self._nets}"

    def input(self, name: str) -> NetId:
        if name not in self._inputs:
            self._inputs[name] = f"in.{name}"
        return self._inputs[name]

    def gate(self, kind: GateKind, *inputs: NetId) -> Tuple[NetId, ...]:
        outputs = [self._net() for _ in range(_SHAPES[kind][1])]
        self._drafts.append(_Draft(kind, list(inputs), outputs))
        return tuple(outputs)

    def and_(self, a: NetId, b: NetId) -> NetId:
        return self.gate(GateKind.AND, a, b)[0]

    def or_(self, a: NetId, b: NetId) -> NetId:
        return self.gate(GateKind.OR, a, b)[0]

    def output(self, name: str, net: NetId) -> None:
        self._outputs[name] = net

    def _copy_tree(self, net: NetId, branches: int) -> List[NetId]:
        if branches == 1:
            return [net]
        first, second = self.gate(GateKind.COPY, net)
        return self._copy_tree(first, branches - branches // 2) + self._copy_tree(second, branches // 2)

    def build(self) -> Netlist:
        users: Dict[NetId, list] = defaultdict(list)
        for draft in self._drafts:
            for position, net in enumerate(draft.inputs):
                users[net].append((draft, position))
        for name, net in self._outputs.items():
            users[net].append((None, name))

        for net, loads in list(users.items()):
            if len(loads) < 2:
                continue
            for (draft, slot), branch in zip(loads, self._copy_tree(net, len(loads))):
                if draft is None:
                    self._outputs[slot] = branch
                else:
                    draft.inputs[slot] = branch

        provisional = Netlist.build(
            [
                Gate(f"d{k}", d.kind, tuple(d.inputs), tuple(d.outputs))
                for k, d in enumerate(self._drafts)
            ],
            self._inputs,
            self._outputs,
        )
        renamed = [
            replace(gate, gate_id=f"g{k}") for k, gate in enumerate(provisional.gates, start=1)
        ]
        return Netlist.build(renamed, self._inputs, self._outputs)


def _lower_monotone(ast: Formula, builder: NetlistBuilder) -> NetId:
    if isinstance(ast, Var):
        return builder.input(ast.name)
    if isinstance(ast, And):
        return builder.and_(_lower_monotone(ast.left, builder), _lower_monotone(ast.right, builder))
    if isinstance(ast, Or):
        return builder.or_(_lower_monotone(ast.left, builder), _lower_monotone(ast.right, builder))
    raise MonotoneViolation(ast.operator)


def lower_to_netlist(ast: Formula, output: str = "out") -> Netlist:
    """Monotone AST to netlist: one AND/OR gate per operator, COPY trees for repeated variables."""
    builder = NetlistBuilder()
    for name in formula_variables(ast):
        builder.input(name)
    builder.output(output, _lower_monotone(ast, builder))
    return builder.build()


Rails = Tuple[NetId, NetId]


def rail_and(builder: NetlistBuilder, a: Rails, b: Rails) -> Rails:
    return builder.or_(a[0], b[0]), builder.and_(a[1], b[1])


def rail_or(builder: NetlistBuilder, a: Rails, b: Rails) -> Rails:
    return builder.and_(a[0], b[0]), builder.or_(a[1], b[1])


def rail_not(a: Rails) -> Rails:
    return a[1], a[0]


def rail_xor(builder: NetlistBuilder, a: Rails, b: Rails) -> Rails:
    one = builder.or_(builder.and_(a[1], b[0]), builder.and_(a[0], b[1]))
    zero = builder.or_(builder.and_(a[1], b[1]), builder.and_(a[0], b[0]))
    return zero, one


def rail_input(builder: NetlistBuilder, name: str) -> Rails:
    return builder.input(name + RAIL_SUFFIX[0]), builder.input(name + RAIL_SUFFIX[1])


def rail_output(builder: NetlistBuilder, name: str, rails: Rails) -> None:
    builder.output(name + RAIL_SUFFIX[0], rails[0])
    builder.output(name + RAIL_SUFFIX[1], rails[1])


def _lower_rails(ast: Formula, builder: NetlistBuilder) -> Rails:
    if isinstance(ast, Var):
        return rail_input(builder, ast.name)
    if isinstance(ast, Not):
        return rail_not(_lower_rails(ast.child, builder))

    a = _lower_rails(ast.left, builder)
    b = _lower_rails(ast.right, builder)
    if isinstance(ast, And):
        return rail_and(builder, a, b)
    if isinstance(ast, Or):
        return rail_or(builder, a, b)
    if isinstance(ast, Nand):
        return rail_not(rail_and(builder, a, b))
    if isinstance(ast, Xor):
        return rail_xor(builder, a, b)
    raise NetlistError(f"cannot lower {type(ast).__name__}")


def lower_dual_rail(ast: Formula, output: str = "out") -> Netlist:
    """Any AST to a monotone netlist over rail pairs: `x#0` carries x=0, `x#1` carries x=1."""
    builder = NetlistBuilder()
    for name in formula_variables(ast):
        rail_input(builder, name)
    rail_output(builder, output, _lower_rails(ast, builder))
    return builder.build()


def lower_toffoli() -> Netlist:
    """Reversible Toffoli gate (a, b, c) -> (a, b, c XOR (a AND b)) on rail pairs."""
    builder = NetlistBuilder()
    a, b, c = (rail_input(builder, name) for name in "abc")
    target = rail_xor(builder, c, rail_and(builder, a, b))
    rail_output(builder, "a", a)
    rail_output(builder, "b", b)
    rail_output(builder, "c", target)
    return builder.build()


def logical_name(net_name: str) -> str:
    """`x#1` -> `x`; names without a rail suffix are returned unchanged."""
    for suffix in RAIL_SUFFIX:
        if net_name.endswith(suffix):
            return net_name[: -len(suffix)]
    return net_name


def _fanout_needs_filter(driver: Gate, load: Gate) -> bool:
    return driver.kind is GateKind.COPY and load.kind not in (GateKind.COPY, GateKind.FILTER)


def splice_filters(netlist: Netlist, everywhere: bool = False) -> Netlist:
    """ Put a FILTER on gate-to-gate nets.

    COPY branches feeding a logic gate are always filtered, which keeps a force that
    travels backwards out of one branch from reaching the sibling branch. With
    `everywhere`, every other gate-to-gate net is filtered as well.
    """
    namer = _Namer(netlist)
    drivers = netlist.driver_of()
    spliced: List[Gate] = []
    for gate in netlist.gates:
        inputs = list(gate.inputs)
        for slot, net in enumerate(gate.inputs):
            driver = drivers.get(net)
            if driver is None or GateKind.FILTER in (driver.kind, gate.kind):
                continue
            if everywhere or _fanout_needs_filter(driver, gate):
                filtered = namer.net()
                spliced.append(Gate(namer.gate(), GateKind.FILTER, (net,), (filtered,)))
                inputs[slot] = filtered
        spliced.append(replace(gate, inputs=tuple(inputs)))

    logger.debug(f"spliced {len(spliced) - len(netlist.gates)} filters")
    return Netlist.build(spliced, netlist.primary_inputs, netlist.primary_outputs)


def splice_wires(netlist: Netlist, length: int) -> Netlist:
    """ Put a WIRE(length) delay line on every gate-to-gate net.

    Forward values only arrive later, but a force travelling backwards has to cross
    each line too, so back forcing reaches the inputs 2 * length rounds later per net.
    """
    if length < 0:
        raise NetlistError(f"delay line length must be >= 0, got {length}")
    if length == 0:
        return netlist
    namer = _Namer(netlist)
    drivers = netlist.driver_of()
    spliced: List[Gate] = []
    for gate in netlist.gates:
        inputs = list(gate.inputs)
        for slot, net in enumerate(gate.inputs):
            driver = drivers.get(net)
            if driver is None or GateKind.WIRE in (driver.kind, gate.kind):
                continue
            delayed = namer.net()
            spliced.append(Gate(namer.gate(), GateKind.WIRE, (net,), (delayed,), length=length))
            inputs[slot] = delayed
        spliced.append(replace(gate, inputs=tuple(inputs)))

    logger.debug(f"spliced {len(spliced) - len(netlist.gates)} delay lines of length {length}")
    return Netlist.build(spliced, netlist.primary_inputs, netlist.primary_outputs)


def insert_delays(netlist: Netlist) -> Netlist:
    """Pad late-arriving gate inputs and primary outputs with WIRE gates of the exact lag."""
    namer = _Namer(netlist)
    ready = {net: 0 for net in netlist.primary_inputs.values()}
    gates: List[Gate] = []

    def delayed(net: NetId, target: int) -> NetId:
        lag = target - ready[net]
        if lag <= 0:
            return net
        padded = namer.net()
        gates.append(Gate(namer.gate(), GateKind.WIRE, (net,), (padded,), length=lag))
        ready[padded] = target
        return padded

    for gate in netlist.gates:
        start = max(ready[net] for net in gate.inputs)
        gate = replace(gate, inputs=tuple(delayed(net, start) for net in gate.inputs))
        gates.append(gate)
        for net, latency in zip(gate.outputs, gate.output_latencies()):
            ready[net] = start + latency

    finish = max((ready[net] for net in netlist.primary_outputs.values()), default=0)
    outputs = {name: delayed(net, finish) for name, net in netlist.primary_outputs.items()}
    added = len(gates) - len(netlist.gates)
    if added:
        logger.debug(f"inserted {added} delay wires")
    return Netlist.build(gates, netlist.primary_inputs, outputs)
