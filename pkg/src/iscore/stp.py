"""Difference bounds over event times.

When every delta in a constraint set is one contiguous interval, the
set is a simple temporal problem: encode each constraint
t(dst) - t(src) in [a, b] as edge src->dst of weight b and edge
dst->src of weight -a, add an origin node fixed at time 0, close the
graph under shortest paths. The closure answers consistency, gives the
execution window of every event, and is the form the dispatcher runs
on: after each firing, a single local pass over closure edges keeps all
windows exact.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .durations import DurationSet
from .errors import Inconsistent, NonContiguousDuration
from .kernels import floyd_warshall
from .score import ConstraintSet

ORIGIN = "@origin"


class DistanceGraph:
    """Weighted graph where edge u->v of weight w means t(v)-t(u) <= w."""

    def __init__(self, variables):
        self.nodes: tuple[str, ...] = (ORIGIN, *variables)
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate node names")
        n = len(self.nodes)
        self._index = {name: i for i, name in enumerate(self.nodes)}
        self.weights = np.full((n, n), np.inf, dtype=np.float64)
        np.fill_diagonal(self.weights, 0.0)
        # t(v) >= 0 for every variable
        self.weights[1:, 0] = 0.0

    def index(self, node: str) -> int:
        return self._index[node]

    def add_edge(self, src: str, dst: str, weight: float) -> None:
        i, j = self._index[src], self._index[dst]
        if weight < self.weights[i, j]:
            self.weights[i, j] = weight

    def add_bound(self, src: str, dst: str, delta: DurationSet, label: str = "") -> None:
        """Constrain t(dst) - t(src) to a contiguous delta."""
        if not delta.is_contiguous:
            raise NonContiguousDuration(
                f"delta {delta} has gaps and cannot be expressed as one bound",
                constraint=label or f"{src} -> {dst}",
            )
        lo, hi = delta.intervals[0]
        if hi is not None:
            self.add_edge(src, dst, float(hi))
        self.add_edge(dst, src, float(-lo))


def to_stp(cs: ConstraintSet) -> DistanceGraph:
    graph = DistanceGraph(cs.variables)
    for c in cs.constraints:
        graph.add_bound(c.src, c.dst, c.delta, label=f"{c.src} -> {c.dst}")
    return graph


def _negative_cycle(graph: DistanceGraph) -> list[str]:
    """A node cycle of negative total weight, by Bellman-Ford.

    Deliberately independent of the shortest-path kernel; only runs on
    the inconsistent path, so speed does not matter.
    """
    n = len(graph.nodes)
    w = graph.weights
    edges = [
        (i, j, w[i, j])
        for i in range(n)
        for j in range(n)
        if i != j and np.isfinite(w[i, j])
    ]
    dist = [0.0] * n  # virtual source connected to every node
    pred = [-1] * n
    marked = -1
    for round_ in range(n):
        marked = -1
        for i, j, wij in edges:
            if dist[i] + wij < dist[j]:
                dist[j] = dist[i] + wij
                pred[j] = i
                marked = j
        if marked < 0:
            break
    if marked < 0:
        raise AssertionError("no negative cycle in a graph reported inconsistent")
    # marked is reachable from the cycle; n steps back land inside it
    v = marked
    for _ in range(n):
        v = pred[v]
    cycle = [v]
    u = pred[v]
    while u != v:
        cycle.append(u)
        u = pred[u]
    cycle.append(v)
    cycle.reverse()
    return [graph.nodes[i] for i in cycle]


class DistanceMatrix:
    """Shortest-path closure of a consistent distance graph."""

    def __init__(self, nodes: tuple[str, ...], d: np.ndarray):
        self.nodes = nodes
        self.d = d
        self._index = {name: i for i, name in enumerate(nodes)}

    def index(self, node: str) -> int:
        return self._index[node]

    def window(self, node: str) -> tuple[int, Optional[int]]:
        """Admissible times of a node: [lb, ub], ub None when unbounded."""
        i = self._index[node]
        lb = int(-self.d[i, 0])
        ub = None if np.isinf(self.d[0, i]) else int(self.d[0, i])
        return lb, ub

    def relative_window(self, a: str, b: str) -> tuple[Optional[int], Optional[int]]:
        """Bounds on t(b) - t(a); None on an unbounded side."""
        i, j = self._index[a], self._index[b]
        lo = None if np.isinf(self.d[j, i]) else int(-self.d[j, i])
        hi = None if np.isinf(self.d[i, j]) else int(self.d[i, j])
        return lo, hi

    def strictly_before(self, a: str, b: str) -> bool:
        """True when every schedule places a strictly before b."""
        return bool(self.d[self._index[b], self._index[a]] < 0)

    def earliest(self) -> dict[str, int]:
        """The schedule that fires everything as soon as allowed."""
        return {
            name: int(-self.d[i, 0])
            for i, name in enumerate(self.nodes)
            if name != ORIGIN
        }


def apsp(graph: DistanceGraph) -> DistanceMatrix:
    """Close the graph under shortest paths or prove it inconsistent."""
    d = floyd_warshall(graph.weights)
    if (np.diagonal(d) < 0).any():
        cycle = _negative_cycle(graph)
        raise Inconsistent(
            "constraints admit no schedule: "
            + " -> ".join(cycle)
            + " has negative total length",
            cycle=cycle,
        )
    return DistanceMatrix(graph.nodes, d)


class DispatchableNetwork:
    """A closed network annotated with what the dispatcher needs.

    An event is enabled once all its strict predecessors (events that
    every schedule places strictly earlier) have fired. Firing event e
    at time t clamps each pending window to
    [t - d[f][e], t + d[e][f]]; on a closed network this local rule is
    as strong as re-solving from scratch.
    """

    def __init__(self, matrix: DistanceMatrix, interactive=frozenset()):
        self.matrix = matrix
        self.events = tuple(n for n in matrix.nodes if n != ORIGIN)
        self.interactive = frozenset(interactive)
        unknown = self.interactive - set(self.events)
        if unknown:
            raise KeyError(f"interactive events not in network: {sorted(unknown)}")
        self.predecessors = {
            e: frozenset(
                f for f in self.events if f != e and matrix.strictly_before(f, e)
            )
            for e in self.events
        }

    def windows(self) -> dict[str, tuple[int, Optional[int]]]:
        return {e: self.matrix.window(e) for e in self.events}


def make_dispatchable(matrix: DistanceMatrix, interactive=frozenset()) -> DispatchableNetwork:
    return DispatchableNetwork(matrix, interactive)
