"""Colored simple graphs, the data every zforge simulation runs on."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

import networkx as nx

from zforge.errors import GraphError

VertexId = str
Edge = Tuple[VertexId, VertexId]


class Color(str, enum.Enum):
    WHITE = "white"
    BLACK = "black"


@dataclass(frozen=True)
class ColoredGraph:
    """ An immutable simple graph plus the set of vertices currently colored black.

    `vertices` fixes the canonical order used everywhere a deterministic order matters
    (candidate enumeration, trace output, JSON). `adjacency` lists each vertex's
    neighbours in that same order.
    """

    vertices: Tuple[VertexId, ...]
    adjacency: Mapping[VertexId, Tuple[VertexId, ...]]
    black: FrozenSet[VertexId] = frozenset()

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[VertexId],
        edges: Iterable[Sequence[VertexId]],
        black: Iterable[VertexId] = (),
    ) -> ColoredGraph:
        order = tuple(vertices)
        index: Dict[VertexId, int] = {}
        for vertex in order:
            if not isinstance(vertex, str) or not vertex:
                raise GraphError(f"vertex ids must be non-empty strings, got {vertex!r}")
            if vertex in index:
                raise GraphError(f"duplicate vertex {vertex!r}")
            index[vertex] = len(index)

        neighbours: Dict[VertexId, set] = {vertex: set() for vertex in order}
        for edge in edges:
            if len(edge) != 2:
                raise GraphError(f"an edge joins exactly two vertices, got {edge!r}")
            u, v = edge
            for end in (u, v):
                if end not in index:
                    raise GraphError(f"edge {u!r}-{v!r} names unknown vertex {end!r}")
            if u == v:
                raise GraphError(f"self-loop on {u!r}")
            if v in neighbours[u]:
                raise GraphError(f"duplicate edge {u!r}-{v!r}")
            neighbours[u].add(v)
            neighbours[v].add(u)

        black = frozenset(black)
        unknown = black - index.keys()
        if unknown:
            raise GraphError(f"black set names unknown vertices {sorted(unknown)}")

        adjacency = {
            vertex: tuple(sorted(neighbours[vertex], key=index.__getitem__)) for vertex in order
        }
        return cls(order, adjacency, black)

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, vertex: object) -> bool:
        return vertex in self.adjacency

    @property
    def edges(self) -> List[Edge]:
        """Each edge once, oriented from the earlier to the later vertex."""
        seen = set()
        edges = []
        for u in self.vertices:
            seen.add(u)
            edges.extend((u, v) for v in self.adjacency[u] if v not in seen)
        return edges

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency.values()) // 2

    def neighbors(self, vertex: VertexId) -> Tuple[VertexId, ...]:
        try:
            return self.adjacency[vertex]
        except KeyError:
            raise GraphError(f"unknown vertex {vertex!r}") from None

    def degree(self, vertex: VertexId) -> int:
        return len(self.neighbors(vertex))

    def color(self, vertex: VertexId) -> Color:
        if vertex not in self.adjacency:
            raise GraphError(f"unknown vertex {vertex!r}")
        return Color.BLACK if vertex in self.black else Color.WHITE

    @property
    def coloring(self) -> Dict[VertexId, Color]:
        return {v: (Color.BLACK if v in self.black else Color.WHITE) for v in self.vertices}

    def black_in_order(self) -> List[VertexId]:
        return [v for v in self.vertices if v in self.black]

    def recolored(self, black: Iterable[VertexId]) -> ColoredGraph:
        black = frozenset(black)
        unknown = black - self.adjacency.keys()
        if unknown:
            raise GraphError(f"black set names unknown vertices {sorted(unknown)}")
        return ColoredGraph(self.vertices, self.adjacency, black)

    def with_black(self, extra: Iterable[VertexId]) -> ColoredGraph:
        return self.recolored(self.black | frozenset(extra))

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        for vertex in self.vertices:
            graph.add_node(vertex, color=self.color(vertex).value)
        graph.add_edges_from(self.edges)
        return graph

    @classmethod
    def from_networkx(cls, graph: nx.Graph, black: Iterable[Any] = ()) -> ColoredGraph:
        """Convert a networkx graph; node labels become their `str()`."""
        label = {node: str(node) for node in graph.nodes}
        return cls.from_edges(
            [label[node] for node in graph.nodes],
            [(label[u], label[v]) for u, v in graph.edges],
            [label[node] for node in black],
        )

    def components(self) -> List[FrozenSet[VertexId]]:
        return [frozenset(c) for c in nx.connected_components(self.to_networkx())]

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "vertices": [{"id": v, "color": self.color(v).value} for v in self.vertices],
            "edges": [[u, v] for u, v in self.edges],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Any]) -> ColoredGraph:
        try:
            records = data["vertices"]
            edges = []
            for edge in data["edges"]:
                if not isinstance(edge, list) or len(edge) != 2:
                    raise GraphError(f"an edge is a list of two vertex ids, got {edge!r}")
                edges.append(tuple(edge))
            vertices = [record["id"] for record in records]
            black = []
            for record in records:
                color = Color(record.get("color", Color.WHITE.value))
                if color is Color.BLACK:
                    black.append(record["id"])
        except (AttributeError, KeyError, TypeError, ValueError) as error:
            raise GraphError(f"malformed graph document: {error}") from None
        return cls.from_edges(vertices, edges, black)

