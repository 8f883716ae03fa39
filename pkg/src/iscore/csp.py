"""General-case playability: finite-domain search over event times.

Duration sets with gaps put playability outside the shortest-path
fragment (deciding it is NP-complete; the subset-sum generator at the
bottom of this module produces the hard instances witnessing that), so
this module searches integer assignments directly: chronological
backtracking, smallest-domain-first, ascending values, forward checking
plus interval-bounds pruning. Search runs inside the array kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .durations import DurationSet
from .errors import ExplosionGuard, InstanceRejected
from .kernels import BUDGET_EXCEEDED, SOLUTION_CAP, enumerate_all, solve_first
from .score import ConstraintSet, DiffConstraint, Score, TemporalObject, TemporalRelation

NODE_BUDGET = 10_000_000
TRACE_CAP = 200_000
HORIZON_SLACK = 16


def default_horizon(cs: ConstraintSet, slack: int = HORIZON_SLACK) -> int:
    """Sum of finite delta uppers, plus slack per unbounded delta.

    Large enough that bounded scores keep all their traces (up to
    translation) below it; for unbounded deltas it is a documented
    truncation, not a completeness guarantee.
    """
    total = 0
    for c in cs.constraints:
        upper = c.delta.max_value
        total += slack if upper is None else upper
    return total


@dataclass(frozen=True)
class FiniteDomainProblem:
    """Integer times in [0, horizon] for each variable, difference constraints."""

    variables: tuple[str, ...]
    horizon: int
    constraints: tuple[DiffConstraint, ...]

    @classmethod
    def from_constraints(cls, cs: ConstraintSet, horizon: int) -> "FiniteDomainProblem":
        if horizon < 0:
            raise ValueError("horizon must be >= 0")
        variables = tuple(sorted(cs.variables))
        known = set(variables)
        for c in cs.constraints:
            if c.src not in known or c.dst not in known:
                raise ValueError(f"constraint references unknown variable: {c.src} -> {c.dst}")
        return cls(variables, horizon, cs.constraints)


def _lowered(problem: FiniteDomainProblem):
    """The kernel-facing arrays; see kernels module docstring for layout."""
    n = len(problem.variables)
    H = problem.horizon
    index = {v: i for i, v in enumerate(problem.variables)}
    m = len(problem.constraints)
    domains = np.ones((n, H + 1), dtype=np.uint8)
    csrc = np.empty(m, dtype=np.int64)
    cdst = np.empty(m, dtype=np.int64)
    cmask = np.zeros((m, 2 * H + 1), dtype=np.uint8)
    dlo = np.empty(m, dtype=np.int64)
    dhi = np.empty(m, dtype=np.int64)
    for k, c in enumerate(problem.constraints):
        csrc[k] = index[c.src]
        cdst[k] = index[c.dst]
        cmask[k, H:] = c.delta.mask(H)
        dlo[k] = c.delta.min_value
        upper = c.delta.max_value
        dhi[k] = H if upper is None else min(upper, H)
    return domains, csrc, cdst, cmask, dlo, dhi


def solve(problem: FiniteDomainProblem, node_budget: int = NODE_BUDGET) -> Optional[dict[str, int]]:
    """A valid assignment, or None when none exists within the horizon.

    All constraints are differences, so the solution set is closed under
    time shifts inside the box: whenever any solution exists, one exists
    with some variable at 0. The search therefore runs once per variable
    with that variable pinned to 0, which collapses the otherwise huge
    family of mutually shifted assignments to one representative each.
    """
    n = len(problem.variables)
    if n == 0:
        return {}
    domains, csrc, cdst, cmask, dlo, dhi = _lowered(problem)
    remaining = node_budget
    for pinned in range(n):
        pinned_domains = domains.copy()
        pinned_domains[pinned, :] = 0
        pinned_domains[pinned, 0] = 1
        assignment, nodes, status = solve_first(
            pinned_domains, csrc, cdst, cmask, dlo, dhi, remaining
        )
        remaining -= nodes
        if status == BUDGET_EXCEEDED or remaining < 0:
            raise ExplosionGuard(
                f"search gave up after {node_budget} nodes (horizon {problem.horizon})"
            )
        if assignment is not None:
            return {v: int(assignment[i]) for i, v in enumerate(problem.variables)}
    return None


def enumerate_traces(
    problem: FiniteDomainProblem,
    node_budget: int = NODE_BUDGET,
    max_traces: int = TRACE_CAP,
) -> list[dict[str, int]]:
    """Every valid assignment, lexicographic in sorted-variable order."""
    n = len(problem.variables)
    if n == 0:
        return [{}]
    domains, csrc, cdst, cmask, _, _ = _lowered(problem)
    solutions, nodes, status = enumerate_all(
        domains, csrc, cdst, cmask, node_budget, max_traces
    )
    if status == BUDGET_EXCEEDED:
        raise ExplosionGuard(
            f"enumeration gave up after {node_budget} nodes (horizon {problem.horizon})"
        )
    if status == SOLUTION_CAP:
        raise ExplosionGuard(f"more than {max_traces} traces; raise the cap or shrink the horizon")
    return [
        {v: int(solutions[r, i]) for i, v in enumerate(problem.variables)}
        for r in range(solutions.shape[0])
    ]


# ---------------------------------------------------------------------------
# hardness generator


@dataclass(frozen=True)
class SubsetSumInstance:
    """Does some non-empty subset of `values` sum to `target`?"""

    values: tuple[int, ...]
    target: int

    def __post_init__(self):
        if len(self.values) < 1:
            raise InstanceRejected("need at least one value")
        if any((not isinstance(a, int)) or isinstance(a, bool) or a < 1 for a in self.values):
            raise InstanceRejected("values must be positive integers")
        if (not isinstance(self.target, int)) or isinstance(self.target, bool) or self.target < 1:
            raise InstanceRejected("target must be a positive integer")


def gen_subset_sum_score(inst: SubsetSumInstance) -> Score:
    """A score playable iff the instance is a yes-instance.

    One static object per value with durations {0, a_i} (play it or skip
    it), glued end-to-start into a chain, plus one relation forcing the
    whole chain to span exactly the target.
    """
    n = len(inst.values)
    width = max(2, len(str(n)))
    objects = tuple(
        TemporalObject(f"o{i + 1:0{width}d}", DurationSet.from_values((0, a)))
        for i, a in enumerate(inst.values)
    )
    relations = [
        TemporalRelation(
            f"glue:{i + 1:0{width}d}", objects[i].ep, objects[i + 1].sp, DurationSet.zero()
        )
        for i in range(n - 1)
    ]
    relations.append(
        TemporalRelation("span", objects[0].sp, objects[-1].ep, DurationSet.single(inst.target))
    )
    return Score(
        f"subset-sum n={n} target={inst.target}",
        objects,
        tuple(relations),
    )
