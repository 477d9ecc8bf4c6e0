"""Boolean gadgets: small colored graph fragments whose forcing behaviour computes a gate.

A gadget is verified inside a standard harness. Every input port gets an upstream stub
path that is fully black when the input is 1 (STUB context) or, in the BARE context, an
input that is 0 has no upstream neighbour at all. Every output port gets a white
downstream sink path, which lets the harness observe whether a 1 keeps propagating.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from itertools import permutations, product
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict

from zforge import SETTINGS
from zforge.errors import ArityMismatch, GraphError, LimitExceeded, NetlistError
from zforge.forcing import closure, run_to_fixpoint
from zforge.graph import ColoredGraph, VertexId

logger = logging.getLogger(__name__)

Bits = Tuple[int, ...]


@dataclass(frozen=True)
class BooleanFunction:
    name: str
    arity: int
    outputs: int
    fn: Callable[[Bits], Sequence[int]] = field(compare=False)

    def __call__(self, bits: Sequence[int]) -> Bits:
        if len(bits) != self.arity:
            raise ArityMismatch(f"{self.name} takes {self.arity} inputs, got {len(bits)}")
        return tuple(int(bool(b)) for b in self.fn(tuple(bits)))

    @classmethod
    def constant(cls, bit: int) -> BooleanFunction:
        return cls(f"CONST{bit}", 0, 1, lambda _: (bit,))


AND = BooleanFunction("AND", 2, 1, lambda b: (b[0] & b[1],))
OR = BooleanFunction("OR", 2, 1, lambda b: (b[0] | b[1],))
COPY = BooleanFunction("COPY", 1, 2, lambda b: (b[0], b[0]))
IDENTITY = BooleanFunction("IDENTITY", 1, 1, lambda b: (b[0],))
CONST0 = BooleanFunction.constant(0)
CONST1 = BooleanFunction.constant(1)

FUNCTIONS: Dict[str, BooleanFunction] = {
    "and": AND,
    "or": OR,
    "copy": COPY,
    "identity": IDENTITY,
    "const0": CONST0,
    "const1": CONST1,
}


@dataclass(frozen=True)
class Gadget:
    """ A graph fragment with designated white input and output ports.

    Pre-colored black vertices of the fragment are its helpers. `latency` is the number
    of rounds from all inputs black to the (last) output black; `output_latencies`
    refines it per output port.
    """

    name: str
    fragment: ColoredGraph
    input_ports: Tuple[VertexId, ...]
    output_ports: Tuple[VertexId, ...]
    latency: int
    output_latencies: Tuple[int, ...] = ()

    def __post_init__(self):
        ports = self.input_ports + self.output_ports
        if len(set(ports)) != len(ports):
            raise GraphError(f"{self.name}: input and output ports must be distinct")
        for port in ports:
            if port not in self.fragment:
                raise GraphError(f"{self.name}: port {port!r} is not a fragment vertex")
            if port in self.fragment.black:
                raise GraphError(f"{self.name}: port {port!r} must start white")
        if not self.output_latencies:
            object.__setattr__(self, "output_latencies", (self.latency,) * len(self.output_ports))

    @property
    def arity(self) -> int:
        return len(self.input_ports)

    @property
    def helpers(self) -> List[VertexId]:
        return self.fragment.black_in_order()

    def to_json_dict(self) -> Dict[str, Any]:
        data = self.fragment.to_json_dict()
        data.update(
            name=self.name,
            input_ports=list(self.input_ports),
            output_ports=list(self.output_ports),
            latency=self.latency,
            output_latencies=list(self.output_latencies),
        )
        return data


def and_gadget() -> Gadget:
    """Triangle on 1, 2, 3; the output 3 turns black only once both inputs are black."""
    fragment = ColoredGraph.from_edges(("1", "2", "3"), [("1", "2"), ("1", "3"), ("2", "3")])
    return Gadget("AND", fragment, ("1", "2"), ("3",), latency=1)


def or_gadget() -> Gadget:
    """4-cycle 1-3-2-4 with 3 pre-colored; a black input lets the helper fill in the other."""
    fragment = ColoredGraph.from_edges(
        ("1", "2", "3", "4"), [("1", "3"), ("1", "4"), ("2", "3"), ("2", "4")], black=("3",)
    )
    return Gadget("OR", fragment, ("1", "2"), ("4",), latency=1)


def or3_gadget() -> Gadget:
    """Path 1-3-2: computes OR but a single 1 input cannot push the output onwards."""
    fragment = ColoredGraph.from_edges(("1", "2", "3"), [("1", "3"), ("2", "3")])
    return Gadget("OR3", fragment, ("1", "2"), ("3",), latency=1)


def copy_gadget() -> Gadget:
    fragment = ColoredGraph.from_edges(
        ("a", "b", "o1", "o2"), [("a", "o1"), ("b", "o1"), ("b", "o2")], black=("b",)
    )
    return Gadget("COPY", fragment, ("a",), ("o1", "o2"), latency=2, output_latencies=(1, 2))


def wire_gadget(length: int) -> Gadget:
    if length < 1:
        raise NetlistError(f"a wire needs length >= 1, got {length}")
    path = ["in"] + [f"w{k}" for k in range(1, length)] + ["out"]
    fragment = ColoredGraph.from_edges(path, zip(path, path[1:]))
    return Gadget(f"WIRE({length})", fragment, ("in",), ("out",), latency=length)


def filter_gadget() -> Gadget:
    """Identity with latency 2 that never lets a force travel from its output back to its input."""
    fragment = ColoredGraph.from_edges(
        ("i", "b", "t", "x", "o"),
        [("i", "x"), ("i", "b"), ("b", "t"), ("x", "t"), ("x", "o")],
        black=("b",),
    )
    return Gadget("FILTER", fragment, ("i",), ("o",), latency=2)


GADGETS: Dict[str, Callable[..., Gadget]] = {
    "and": and_gadget,
    "or": or_gadget,
    "or3": or3_gadget,
    "copy": copy_gadget,
    "wire": wire_gadget,
    "filter": filter_gadget,
}


class HarnessContext(str, enum.Enum):
    STUB = "stub"
    BARE = "bare"


@dataclass(frozen=True)
class Harness:
    contexts: Tuple[HarnessContext, ...] = (HarnessContext.STUB, HarnessContext.BARE)
    stub_length: int = 2
    sink_length: int = 1

    @classmethod
    def standard(cls) -> Harness:
        return cls(stub_length=SETTINGS.gadgets.stub_length, sink_length=SETTINGS.gadgets.sink_length)


@dataclass(frozen=True)
class MountedGadget:
    gadget: Gadget
    graph: ColoredGraph
    stubs: Tuple[Tuple[VertexId, ...], ...]
    sinks: Tuple[Tuple[VertexId, ...], ...]


def mount(
    gadget: Gadget,
    bits: Sequence[int],
    context: HarnessContext = HarnessContext.STUB,
    harness: Optional[Harness] = None,
) -> MountedGadget:
    """Embed `gadget` in the harness with input ports colored by `bits`."""
    harness = harness or Harness.standard()
    if len(bits) != gadget.arity:
        raise ArityMismatch(f"{gadget.name} takes {gadget.arity} inputs, got {len(bits)}")

    vertices = list(gadget.fragment.vertices)
    edges = list(gadget.fragment.edges)
    black = set(gadget.fragment.black)
    stubs = []
    for j, (port, bit) in enumerate(zip(gadget.input_ports, bits)):
        stub: Tuple[VertexId, ...] = ()
        if bit or context is HarnessContext.STUB:
            stub = tuple(f"~stub{j}.{k}" for k in range(harness.stub_length))
            vertices.extend(stub)
            edges.extend(zip((port,) + stub, stub))
        if bit:
            black.add(port)
            black.update(stub)
        stubs.append(stub)

    sinks = []
    for j, port in enumerate(gadget.output_ports):
        sink = tuple(f"~sink{j}.{k}" for k in range(harness.sink_length))
        vertices.extend(sink)
        edges.extend(zip((port,) + sink, sink))
        sinks.append(sink)

    graph = ColoredGraph.from_edges(vertices, edges, black)
    return MountedGadget(gadget, graph, tuple(stubs), tuple(sinks))


class TruthTableRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    inputs: Tuple[int, ...]
    outputs: Tuple[int, ...]
    expected: Tuple[int, ...]
    output_steps: Tuple[Optional[int], ...]
    ready_step: Optional[int] = None
    propagates_forward: bool = False
    context_consistent: bool = True

    @property
    def matches(self) -> bool:
        return self.outputs == self.expected and self.context_consistent


class TruthTableReport(BaseModel):
    gadget: str
    function: str
    rows: List[TruthTableRow]

    @property
    def correct(self) -> bool:
        return all(row.matches for row in self.rows)

    @property
    def propagates(self) -> bool:
        return all(row.propagates_forward for row in self.rows if any(row.outputs))

    @property
    def latencies(self) -> List[List[int]]:
        """Per output port, the distinct rounds-to-black over every row where it fires."""
        if not self.rows:
            return []
        ports = len(self.rows[0].outputs)
        seen: List[set] = [set() for _ in range(ports)]
        for row in self.rows:
            for j, step in enumerate(row.output_steps):
                if step is not None:
                    seen[j].add(step - 1)
        return [sorted(s) for s in seen]

    @property
    def uniform_latency(self) -> bool:
        return all(len(values) <= 1 for values in self.latencies)

    @property
    def passed(self) -> bool:
        return self.correct and self.propagates and self.uniform_latency

    def row(self, bits: Sequence[int]) -> TruthTableRow:
        bits = tuple(bits)
        for row in self.rows:
            if row.inputs == bits:
                return row
        raise KeyError(bits)


@dataclass(frozen=True)
class _Outcome:
    outputs: Bits
    output_steps: Tuple[Optional[int], ...]
    propagates: bool


def _observe(gadget: Gadget, bits: Bits, context: HarnessContext, harness: Harness) -> _Outcome:
    mounted = mount(gadget, bits, context, harness)
    trace = run_to_fixpoint(mounted.graph)
    steps = tuple(trace.black_step.get(port) for port in gadget.output_ports)
    outputs = tuple(int(step is not None) for step in steps)
    propagates = all(
        sink[0] in trace.black_step for sink, bit in zip(mounted.sinks, outputs) if bit
    )
    return _Outcome(outputs, steps, propagates)


def verify_gadget(gadget: Gadget, expected: BooleanFunction, harness: Optional[Harness] = None) -> TruthTableReport:
    """Simulate every input row in every harness context and compare with `expected`."""
    harness = harness or Harness.standard()
    if expected.arity != gadget.arity or expected.outputs != len(gadget.output_ports):
        raise ArityMismatch(
            f"{gadget.name} has {gadget.arity} inputs and {len(gadget.output_ports)} outputs, "
            f"{expected.name} needs {expected.arity} and {expected.outputs}"
        )

    rows = []
    for bits in product((0, 1), repeat=gadget.arity):
        outcomes = [_observe(gadget, bits, context, harness) for context in harness.contexts]
        first = outcomes[0]
        ready = [step for step in first.output_steps if step is not None]
        rows.append(
            TruthTableRow(
                inputs=bits,
                outputs=first.outputs,
                expected=expected(bits),
                output_steps=first.output_steps,
                ready_step=max(ready) if ready else None,
                propagates_forward=any(first.outputs) and all(o.propagates for o in outcomes),
                context_consistent=all(
                    o.outputs == first.outputs and o.output_steps == first.output_steps
                    for o in outcomes[1:]
                ),
            )
        )
    return TruthTableReport(gadget=gadget.name, function=expected.name, rows=rows)


def measure_latency(gadget: Gadget, harness: Optional[Harness] = None) -> int:
    """Rounds from all inputs black to the last output black, in the STUB context."""
    outcome = _observe(gadget, (1,) * gadget.arity, HarnessContext.STUB, harness or Harness.standard())
    steps = [step for step in outcome.output_steps if step is not None]
    return max(steps) - 1 if steps else 0


def measure_output_latencies(gadget: Gadget, harness: Optional[Harness] = None) -> Tuple[int, ...]:
    outcome = _observe(gadget, (1,) * gadget.arity, HarnessContext.STUB, harness or Harness.standard())
    return tuple(0 if step is None else step - 1 for step in outcome.output_steps)


def transmits_back_force(
    gadget: Gadget,
    input_bits: Sequence[int],
    outputs: Optional[Sequence[int]] = None,
    context: HarnessContext = HarnessContext.STUB,
    harness: Optional[Harness] = None,
) -> bool:
    """ True when blackening output ports from downstream turns a white input port black.

    The gadget settles under `input_bits`; then the selected output ports (all by
    default) and their sinks are blackened and forcing resumes.
    """
    mounted = mount(gadget, input_bits, context, harness)
    settled = closure(mounted.graph, mounted.graph.black)
    selected = range(len(gadget.output_ports)) if outputs is None else outputs
    downstream = set()
    for j in selected:
        downstream.add(gadget.output_ports[j])
        downstream.update(mounted.sinks[j])
    resumed = closure(mounted.graph, settled | downstream)
    return any(port not in settled and port in resumed for port in gadget.input_ports)


def _role_graph(gadget: Gadget) -> nx.Graph:
    graph = gadget.fragment.to_networkx()
    for vertex in graph.nodes:
        if vertex in gadget.input_ports:
            role = ("in", gadget.input_ports.index(vertex))
        elif vertex in gadget.output_ports:
            role = ("out", gadget.output_ports.index(vertex))
        else:
            role = ("helper",) if vertex in gadget.fragment.black else ("free",)
        graph.nodes[vertex]["role"] = role
    return graph


def _same_gadget(a: Gadget, b: Gadget) -> bool:
    if len(a.fragment) != len(b.fragment) or a.fragment.edge_count != b.fragment.edge_count:
        return False
    return nx.is_isomorphic(
        _role_graph(a), _role_graph(b), node_match=lambda x, y: x["role"] == y["role"]
    )


def search_minimal_gadget(
    expected: BooleanFunction,
    max_vertices: int,
    harness: Optional[Harness] = None,
    limit: Optional[int] = None,
) -> List[Gadget]:
    """ Every gadget on at most `max_vertices` vertices that passes `verify_gadget`.

    Graphs come from the networkx atlas of all graphs up to seven vertices; every
    placement of ports and every helper coloring of the remaining vertices is tried.
    Results are deduplicated up to isomorphism preserving port roles and sorted by
    (vertex count, edge count).
    """
    harness = harness or Harness.standard()
    limit = SETTINGS.gadgets.search_vertex_limit if limit is None else limit
    if max_vertices > limit:
        raise LimitExceeded("gadget search size", max_vertices, limit)

    ports = expected.arity + expected.outputs
    found: List[Gadget] = []
    for atlas in nx.graph_atlas_g():
        n = atlas.number_of_nodes()
        if n < max(ports, 1) or n > max_vertices:
            continue
        labels = [str(v) for v in range(n)]
        edges = [(str(u), str(v)) for u, v in atlas.edges]
        for inputs in permutations(labels, expected.arity):
            rest = [v for v in labels if v not in inputs]
            for outs in permutations(rest, expected.outputs):
                free = [v for v in rest if v not in outs]
                for mask in product((0, 1), repeat=len(free)):
                    black = [v for v, m in zip(free, mask) if m]
                    fragment = ColoredGraph.from_edges(labels, edges, black)
                    candidate = Gadget(expected.name, fragment, inputs, outs, latency=0)
                    report = verify_gadget(candidate, expected, harness)
                    if not report.passed:
                        continue
                    if any(_same_gadget(candidate, seen) for seen in found):
                        continue
                    per_port = tuple(values[0] if values else 0 for values in report.latencies)
                    found.append(
                        replace(
                            candidate,
                            name=f"{expected.name}-{n}v{len(edges)}e-{len(found) + 1}",
                            latency=max(per_port, default=0),
                            output_latencies=per_port,
                        )
                    )

    logger.info(f"{len(found)} {expected.name} gadgets with at most {max_vertices} vertices")
    return sorted(found, key=lambda g: (len(g.fragment), g.fragment.edge_count))

