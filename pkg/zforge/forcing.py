"""Zero forcing: the color-change rule, synchronous traces and zero forcing sets.

A black vertex with exactly one white neighbour forces that neighbour black. The
initial coloring is step 1; every synchronous round applies all forces available at
the start of the round, so the first round's events carry step 2.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from zforge import SETTINGS
from zforge.errors import GraphError, LimitExceeded
from zforge.graph import Color, ColoredGraph, VertexId

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class ForceEvent:
    step: int
    forcer: VertexId
    forced: VertexId


@dataclass(frozen=True)
class StepRecord:
    step: int
    events: Tuple[ForceEvent, ...]


@dataclass(frozen=True)
class ForcingTrace:
    initial_black: FrozenSet[VertexId]
    steps: Tuple[StepRecord, ...]
    final_coloring: Mapping[VertexId, Color]
    black_step: Mapping[VertexId, int]

    @property
    def fixpoint_step(self) -> int:
        """Number of rounds that produced at least one force."""
        return len(self.steps)

    @property
    def final_step(self) -> int:
        """Step index of the last coloring change; 1 when nothing was ever forced."""
        return self.steps[-1].step if self.steps else 1

    @property
    def final_black(self) -> FrozenSet[VertexId]:
        return frozenset(v for v, c in self.final_coloring.items() if c is Color.BLACK)

    @property
    def events(self) -> List[ForceEvent]:
        return [event for record in self.steps for event in record.events]

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "steps": [
                {
                    "step": record.step,
                    "events": [{"forcer": e.forcer, "forced": e.forced} for e in record.events],
                }
                for record in self.steps
            ],
            "final_black": [v for v, c in self.final_coloring.items() if c is Color.BLACK],
            "fixpoint_step": self.fixpoint_step,
        }


def _candidates(graph: ColoredGraph, black: FrozenSet[VertexId]) -> List[Tuple[VertexId, VertexId]]:
    pairs = []
    for u in graph.vertices:
        if u not in black:
            continue
        whites = [v for v in graph.neighbors(u) if v not in black]
        if len(whites) == 1:
            pairs.append((u, whites[0]))
    return pairs


def forcing_candidates(graph: ColoredGraph) -> List[Tuple[VertexId, VertexId]]:
    """All (forcer, forced) pairs enabled under the current coloring, in vertex order."""
    return _candidates(graph, graph.black)


def step_synchronous(graph: ColoredGraph, step: int = 2) -> Tuple[ColoredGraph, Tuple[ForceEvent, ...]]:
    """Apply every force enabled at the start of the round simultaneously.

    Returns the recolored graph and the round's events, labelled with `step`.
    """
    pairs = _candidates(graph, graph.black)
    events = tuple(ForceEvent(step, u, v) for u, v in pairs)
    if not events:
        return graph, events
    return graph.with_black(v for _, v in pairs), events


def run_to_fixpoint(graph: ColoredGraph) -> ForcingTrace:
    black_step = {v: 1 for v in graph.black_in_order()}
    steps: List[StepRecord] = []
    current = graph
    step = 2
    while True:
        current, events = step_synchronous(current, step)
        if not events:
            break
        steps.append(StepRecord(step, events))
        for event in events:
            black_step.setdefault(event.forced, step)
        step += 1

    logger.debug(
        f"fixpoint after {len(steps)} rounds: {len(current.black)}/{len(current)} vertices black"
    )
    return ForcingTrace(
        initial_black=graph.black,
        steps=tuple(steps),
        final_coloring=current.coloring,
        black_step=black_step,
    )


def run_sequential(graph: ColoredGraph, schedule_seed: int) -> Dict[VertexId, Color]:
    """Apply one randomly chosen force at a time until none is enabled.

    Used to check confluence: the final coloring never depends on the schedule.
    """
    rng = random.Random(schedule_seed)
    black = set(graph.black)
    while True:
        pairs = _candidates(graph, frozenset(black))
        if not pairs:
            break
        _, forced = rng.choice(pairs)
        black.add(forced)
    return {v: (Color.BLACK if v in black else Color.WHITE) for v in graph.vertices}


def closure(graph: ColoredGraph, initial: Iterable[VertexId]) -> FrozenSet[VertexId]:
    """Black set at the fixpoint reached from `initial`, without recording a trace."""
    black = frozenset(initial)
    while True:
        forced = {v for _, v in _candidates(graph, black)}
        if not forced:
            return black
        black = black | forced


def _validated(graph: ColoredGraph, candidate: Iterable[VertexId]) -> FrozenSet[VertexId]:
    candidate = frozenset(candidate)
    unknown = [v for v in candidate if v not in graph]
    if unknown:
        raise GraphError(f"unknown vertices {sorted(unknown)}")
    return candidate


def is_zero_forcing_set(graph: ColoredGraph, candidate: Iterable[VertexId]) -> bool:
    """True when coloring exactly `candidate` black eventually turns every vertex black."""
    candidate = _validated(graph, candidate)
    return len(closure(graph, candidate)) == len(graph)


def zero_forcing_lower_bound(graph: ColoredGraph) -> int:
    """Sum over connected components of max(1, minimum degree)."""
    return sum(_component_demands(graph).values())


def _component_demands(graph: ColoredGraph) -> Dict[FrozenSet[VertexId], int]:
    return {
        component: max(1, min(graph.degree(v) for v in component))
        for component in graph.components()
    }


def _can_force(graph: ColoredGraph, black: FrozenSet[VertexId]) -> bool:
    return any(
        sum(1 for w in graph.neighbors(u) if w not in black) == 1 for u in black
    )


def minimum_zero_forcing_set(graph: ColoredGraph, limit: Optional[int] = None) -> FrozenSet[VertexId]:
    """ Smallest zero forcing set, lexicographically first among those of minimum size.

    Exhaustive search in size order over sorted vertex ids, starting from the
    component lower bound and skipping candidate sets that cannot possibly force.
    """
    limit = SETTINGS.forcing.exhaustive_limit if limit is None else limit
    if len(graph) > limit:
        raise LimitExceeded("graph order", len(graph), limit)
    if not len(graph):
        return frozenset()

    order: Sequence[VertexId] = sorted(graph.vertices)
    demands = _component_demands(graph)
    component_of = {v: component for component in demands for v in component}
    lower = sum(demands.values())
    logger.debug(f"searching zero forcing sets of {len(graph)} vertices from size {lower}")

    for size in range(lower, len(graph) + 1):
        for combo in combinations(order, size):
            chosen = frozenset(combo)
            counts: Dict[FrozenSet[VertexId], int] = {}
            for v in combo:
                counts[component_of[v]] = counts.get(component_of[v], 0) + 1
            if any(counts.get(c, 0) < need for c, need in demands.items()):
                continue
            if size < len(graph) and not _can_force(graph, chosen):
                continue
            if len(closure(graph, chosen)) == len(graph):
                logger.info(f"minimum zero forcing set has {size} vertices")
                return chosen

    return frozenset(order)
