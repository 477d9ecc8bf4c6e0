"""Text renderings of graphs, gadgets and circuits: JSON documents and Graphviz DOT."""
import json
from typing import Any, Mapping, Optional

import graphviz

from zforge.compiler import CompiledCircuit, VertexRole
from zforge.gadgets import Gadget
from zforge.graph import ColoredGraph, VertexId

_SHAPE = {
    VertexRole.INPUT: "box",
    VertexRole.OUTPUT: "doublecircle",
    VertexRole.HELPER: "diamond",
    VertexRole.INTERNAL: "circle",
}


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _dot_graph(
    graph: ColoredGraph,
    name: str,
    roles: Optional[Mapping[VertexId, VertexRole]],
) -> graphviz.Graph:
    dot = graphviz.Graph(name=name)
    dot.attr("node", fontname="Helvetica", fontsize="10")
    for vertex in graph.vertices:
        role = roles.get(vertex, VertexRole.INTERNAL) if roles else VertexRole.INTERNAL
        style = {"style": "filled", "fillcolor": "black", "fontcolor": "white"} if vertex in graph.black else {}
        dot.node(vertex, vertex, shape=_SHAPE[role], **style)
    for u, v in graph.edges:
        dot.edge(u, v)
    return dot


def graph_to_dot(
    graph: ColoredGraph,
    name: str = "zforge",
    roles: Optional[Mapping[VertexId, VertexRole]] = None,
) -> str:
    """Undirected DOT; black vertices are drawn filled, shapes follow the vertex role."""
    return _dot_graph(graph, name, roles).source


def gadget_to_dot(gadget: Gadget) -> str:
    roles = {v: VertexRole.HELPER for v in gadget.helpers}
    roles.update({v: VertexRole.INPUT for v in gadget.input_ports})
    roles.update({v: VertexRole.OUTPUT for v in gadget.output_ports})
    return graph_to_dot(gadget.fragment, name=gadget.name, roles=roles)


def circuit_to_dot(circuit: CompiledCircuit) -> str:
    """Circuit graph with one dashed cluster per gadget instance around the vertices it owns."""
    dot = _dot_graph(circuit.graph, "circuit", circuit.roles)
    for instance in circuit.instances:
        with dot.subgraph(name=f"cluster_{instance.gate_id}") as cluster:
            cluster.attr(label=f"{instance.gate_id} {instance.label}", style="dashed")
            for vertex in instance.vertices:
                if circuit.owner_of.get(vertex) == instance.gate_id:
                    cluster.node(vertex)
    return dot.source
