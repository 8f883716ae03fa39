"""Brute-force reference implementations, test-suite only.

Each oracle takes a deliberately different computational route from the
code it checks: the trace oracle materializes the full assignment grid
instead of searching, the window oracle reruns all-pairs shortest paths
through scipy instead of propagating locally, and the subset-sum oracle
walks all 2^n bitmasks. None of them import the solver, the engine, or
the kernels.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import NegativeCycleError, csgraph_from_dense, shortest_path

from iscore.score import ConstraintSet
from iscore.stp import ORIGIN, DistanceGraph


def oracle_subset_sum(values, target) -> bool:
    """Literal 2^n scan over non-empty subsets."""
    values = list(values)
    n = len(values)
    for mask in range(1, 1 << n):
        total = 0
        for i in range(n):
            if mask & (1 << i):
                total += values[i]
        if total == target:
            return True
    return False


def _in_delta(delta, value: int) -> bool:
    # membership written out by hand; the oracle does not trust DurationSet
    for lo, hi in delta.intervals:
        if value >= lo and (hi is None or value <= hi):
            return True
    return False


def oracle_enumerate(cs: ConstraintSet, horizon: int) -> list[dict]:
    """Every assignment in [0, horizon]^n, checked against every
    constraint, no search and no pruning. The grid is evaluated as one
    boolean array; cell count is the caller's responsibility.
    """
    names = list(cs.variables)
    n = len(names)
    if n == 0:
        return [{}]
    width = horizon + 1
    if width**n > 80_000_000:
        raise MemoryError(f"oracle grid {width}^{n} too large")
    index = {v: k for k, v in enumerate(names)}
    allowed = np.ones((width,) * n, dtype=bool)
    # pair[a, b] answers: is dst=b legal when src=a, i.e. is (b - a) in delta
    offsets = np.arange(width)[None, :] - np.arange(width)[:, None]
    for c in cs.constraints:
        if c.src == c.dst:
            if not _in_delta(c.delta, 0):
                allowed[:] = False
            continue
        member = np.array(
            [_in_delta(c.delta, off) for off in range(-horizon, horizon + 1)]
        )
        pair = member[offsets + horizon]
        src_axis, dst_axis = index[c.src], index[c.dst]
        if src_axis > dst_axis:
            pair = pair.T
        shape = [1] * n
        shape[min(src_axis, dst_axis)] = width
        shape[max(src_axis, dst_axis)] = width
        allowed &= pair.reshape(shape)
    solutions = np.argwhere(allowed)  # lexicographic by construction
    return [dict(zip(names, (int(t) for t in row))) for row in solutions]


def oracle_windows(graph: DistanceGraph, executed: dict) -> dict:
    """Windows after the given executions, by full re-propagation.

    Copies the distance graph, pins every executed event to the origin
    with a zero-width constraint, and reruns all-pairs shortest paths
    (scipy, Johnson's algorithm). Returns {event: (lb, ub-or-None)} for
    the events not yet executed.
    """
    weights = graph.weights.copy()
    origin = graph.index(ORIGIN)
    for event, t in executed.items():
        i = graph.index(event)
        weights[origin, i] = min(weights[origin, i], float(t))
        weights[i, origin] = min(weights[i, origin], float(-t))
    # null_value=inf keeps genuine zero-weight edges (t >= 0, pins at 0,
    # lower bounds of [0, b] deltas); scipy's dense handling would drop them
    try:
        d = shortest_path(csgraph_from_dense(weights, null_value=np.inf), method="J")
    except NegativeCycleError:
        raise ValueError("pinned graph is inconsistent") from None
    if np.any(np.diag(d) < 0):
        raise ValueError("pinned graph is inconsistent")
    out = {}
    for node in graph.nodes:
        if node == ORIGIN or node in executed:
            continue
        i = graph.index(node)
        lb = 0 if np.isinf(d[i, origin]) else -d[i, origin]
        ub = None if np.isinf(d[origin, i]) else d[origin, i]
        out[node] = (int(lb), None if ub is None else int(ub))
    return out
