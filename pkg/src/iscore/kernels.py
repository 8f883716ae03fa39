"""Array kernels behind shortest-path closure and playability search.

Two interchangeable backends compute the same results: a compiled path
(numba) and a plain numpy path. Set ISCORE_KERNEL=numpy to force the
fallback or ISCORE_KERNEL=numba to insist on compilation; when unset,
the compiled path is used whenever numba imports cleanly.

Problem layout shared by the search kernels, for n variables over the
value range 0..H (W = H + 1 values) and m difference constraints
t(dst) - t(src) in delta:

  domains  uint8 (n, W)      1 where the value is still admissible
  csrc     int64 (m,)        variable index of src
  cdst     int64 (m,)        variable index of dst
  cmask    uint8 (m, 2H+1)   cmask[c, H + off] == 1 iff off in delta
  dlo/dhi  int64 (m,)        interval hull of delta, dhi clamped to H

`solve_first` runs chronological backtracking with forward checking,
smallest-domain-first variable order and ascending values, plus an
interval-bounds fixpoint after every assignment. `enumerate_all` visits
variables in fixed index order with forward checking only, so solutions
come out in lexicographic order. Both count one node per attempted
assignment and stop when the node budget is exceeded; the two backends
make identical decisions, so node counts match exactly.

Statuses: 0 done, 1 node budget exceeded, 2 solution cap reached.
"""

from __future__ import annotations

import os

import numpy as np

DONE = 0
BUDGET_EXCEEDED = 1
SOLUTION_CAP = 2


def _choose_backend() -> str:
    requested = os.environ.get("ISCORE_KERNEL", "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise ValueError(
            f"ISCORE_KERNEL must be 'numba' or 'numpy', got {requested!r}"
        )
    if requested == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if requested == "numba":
            raise
        return "numpy"
    return "numba"


_BACKEND = _choose_backend()


def backend_name() -> str:
    return _BACKEND


# ---------------------------------------------------------------------------
# all-pairs shortest paths


def _fw_numpy(dist: np.ndarray) -> np.ndarray:
    d = dist.astype(np.float64, copy=True)
    for k in range(d.shape[0]):
        np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :], out=d)
    return d


def _fw_loops(d):  # pragma: no cover - compiled
    n = d.shape[0]
    for k in range(n):
        for i in range(n):
            dik = d[i, k]
            if dik == np.inf:
                continue
            for j in range(n):
                alt = dik + d[k, j]
                if alt < d[i, j]:
                    d[i, j] = alt
    return d


def floyd_warshall(dist: np.ndarray) -> np.ndarray:
    """Shortest-path closure of a weight matrix (inf where no edge)."""
    if _BACKEND == "numpy":
        return _fw_numpy(dist)
    return _fw_numba(dist.astype(np.float64, copy=True))


# ---------------------------------------------------------------------------
# first-solution search
#
# The two implementations below must stay in lockstep: same variable
# choice, same propagation results, same node accounting. The numba one
# is scalar loops; the numpy one does the same row operations vectorized.


def _solve_loops(domains, csrc, cdst, cmask, dlo, dhi, node_budget):  # pragma: no cover - compiled
    n, W = domains.shape
    H = W - 1
    m = csrc.shape[0]

    dom = np.empty((n + 1, n, W), np.uint8)
    lo = np.empty((n + 1, n), np.int64)
    hi = np.empty((n + 1, n), np.int64)
    cnt = np.empty((n + 1, n), np.int64)
    dom[0] = domains
    for v in range(n):
        c = 0
        l = -1
        h = -1
        for w in range(W):
            if dom[0, v, w]:
                c += 1
                if l < 0:
                    l = w
                h = w
        cnt[0, v] = c
        lo[0, v] = l
        hi[0, v] = h
    nodes = 0
    empty = np.empty(n, np.int64)
    for v in range(n):
        if cnt[0, v] == 0:
            return empty, nodes, DONE, 0

    # bounds fixpoint at a given level; returns False on a wiped domain
    def _bounds_fixpoint(level):
        changed = True
        while changed:
            changed = False
            for c in range(m):
                s = csrc[c]
                t = cdst[c]
                nl = lo[level, s] + dlo[c]
                nh = hi[level, s] + dhi[c]
                if nl > lo[level, t] or nh < hi[level, t]:
                    l2 = max(lo[level, t], nl)
                    h2 = min(hi[level, t], nh)
                    for w in range(lo[level, t], min(l2, W)):
                        dom[level, t, w] = 0
                    if h2 < hi[level, t]:
                        for w in range(max(h2 + 1, 0), hi[level, t] + 1):
                            dom[level, t, w] = 0
                    cc = 0
                    fl = -1
                    fh = -1
                    for w in range(max(l2, 0), min(h2, H) + 1):
                        if dom[level, t, w]:
                            cc += 1
                            if fl < 0:
                                fl = w
                            fh = w
                    if cc == 0:
                        return False
                    if fl != lo[level, t] or fh != hi[level, t]:
                        changed = True
                    lo[level, t] = fl
                    hi[level, t] = fh
                    cnt[level, t] = cc
                nl = lo[level, t] - dhi[c]
                nh = hi[level, t] - dlo[c]
                if nl > lo[level, s] or nh < hi[level, s]:
                    l2 = max(lo[level, s], nl)
                    h2 = min(hi[level, s], nh)
                    for w in range(lo[level, s], min(l2, W)):
                        dom[level, s, w] = 0
                    if h2 < hi[level, s]:
                        for w in range(max(h2 + 1, 0), hi[level, s] + 1):
                            dom[level, s, w] = 0
                    cc = 0
                    fl = -1
                    fh = -1
                    for w in range(max(l2, 0), min(h2, H) + 1):
                        if dom[level, s, w]:
                            cc += 1
                            if fl < 0:
                                fl = w
                            fh = w
                    if cc == 0:
                        return False
                    if fl != lo[level, s] or fh != hi[level, s]:
                        changed = True
                    lo[level, s] = fl
                    hi[level, s] = fh
                    cnt[level, s] = cc
        return True

    if not _bounds_fixpoint(0):
        return empty, nodes, DONE, 0

    chosen = np.full(n, -1, np.int64)
    val_ptr = np.zeros(n, np.int64)
    assigned = np.zeros(n, np.uint8)
    depth = 0
    while depth >= 0:
        if depth == n:
            out = np.empty(n, np.int64)
            for v in range(n):
                out[v] = lo[n, v]
            return out, nodes, DONE, 1
        if chosen[depth] < 0:
            best = -1
            best_cnt = W + 1
            for v in range(n):
                if assigned[v] == 0 and cnt[depth, v] < best_cnt:
                    best = v
                    best_cnt = cnt[depth, v]
            chosen[depth] = best
            val_ptr[depth] = lo[depth, best]
        var = chosen[depth]
        val = -1
        w = val_ptr[depth]
        while w <= hi[depth, var]:
            if dom[depth, var, w]:
                val = w
                break
            w += 1
        if val < 0:
            chosen[depth] = -1
            depth -= 1
            if depth >= 0:
                assigned[chosen[depth]] = 0
            continue
        val_ptr[depth] = val + 1
        nodes += 1
        if nodes > node_budget:
            return empty, nodes, BUDGET_EXCEEDED, 0
        nxt = depth + 1
        dom[nxt] = dom[depth]
        lo[nxt] = lo[depth]
        hi[nxt] = hi[depth]
        cnt[nxt] = cnt[depth]
        for w in range(W):
            dom[nxt, var, w] = 0
        dom[nxt, var, val] = 1
        lo[nxt, var] = val
        hi[nxt, var] = val
        cnt[nxt, var] = 1
        ok = True
        for c in range(m):
            s = csrc[c]
            t = cdst[c]
            if s == var:
                cc = 0
                fl = -1
                fh = -1
                for w in range(lo[nxt, t], hi[nxt, t] + 1):
                    if dom[nxt, t, w]:
                        if cmask[c, H + w - val] == 0:
                            dom[nxt, t, w] = 0
                        else:
                            cc += 1
                            if fl < 0:
                                fl = w
                            fh = w
                if cc == 0:
                    ok = False
                    break
                lo[nxt, t] = fl
                hi[nxt, t] = fh
                cnt[nxt, t] = cc
            if t == var:
                cc = 0
                fl = -1
                fh = -1
                for w in range(lo[nxt, s], hi[nxt, s] + 1):
                    if dom[nxt, s, w]:
                        if cmask[c, H + val - w] == 0:
                            dom[nxt, s, w] = 0
                        else:
                            cc += 1
                            if fl < 0:
                                fl = w
                            fh = w
                if cc == 0:
                    ok = False
                    break
                lo[nxt, s] = fl
                hi[nxt, s] = fh
                cnt[nxt, s] = cc
        if ok:
            ok = _bounds_fixpoint(nxt)
        if ok:
            assigned[var] = 1
            depth = nxt
    return empty, nodes, DONE, 0


def _restrict_row(row, c, pinned, by_src, cmask, H):
    """Numpy side of forward checking: one row, one pinned endpoint."""
    W = row.shape[0]
    if by_src:
        seg = cmask[c, H - pinned : H - pinned + W]
    else:
        seg = cmask[c, pinned + H - W + 1 : pinned + H + 1][::-1]
    row &= seg


def _row_stats(row):
    nz = np.flatnonzero(row)
    if nz.size == 0:
        return 0, -1, -1
    return int(nz.size), int(nz[0]), int(nz[-1])


def _solve_numpy(domains, csrc, cdst, cmask, dlo, dhi, node_budget):
    n, W = domains.shape
    H = W - 1
    m = csrc.shape[0]
    dom = np.empty((n + 1, n, W), np.uint8)
    lo = np.empty((n + 1, n), np.int64)
    hi = np.empty((n + 1, n), np.int64)
    cnt = np.empty((n + 1, n), np.int64)
    dom[0] = domains
    for v in range(n):
        cnt[0, v], lo[0, v], hi[0, v] = _row_stats(dom[0, v])
    nodes = 0
    empty = np.empty(0, np.int64)
    if (cnt[0] == 0).any():
        return None, nodes, DONE

    def bounds_fixpoint(level):
        changed = True
        while changed:
            changed = False
            for c in range(m):
                for (a, b, add) in ((csrc[c], cdst[c], True), (cdst[c], csrc[c], False)):
                    if add:
                        nl, nh = lo[level, a] + dlo[c], hi[level, a] + dhi[c]
                    else:
                        nl, nh = lo[level, a] - dhi[c], hi[level, a] - dlo[c]
                    if nl <= lo[level, b] and nh >= hi[level, b]:
                        continue
                    l2 = max(lo[level, b], nl)
                    h2 = min(hi[level, b], nh)
                    row = dom[level, b]
                    row[: max(l2, 0)] = 0
                    row[max(h2 + 1, 0) :] = 0
                    cc, fl, fh = _row_stats(row)
                    if cc == 0:
                        return False
                    if fl != lo[level, b] or fh != hi[level, b]:
                        changed = True
                    lo[level, b], hi[level, b], cnt[level, b] = fl, fh, cc
        return True

    if not bounds_fixpoint(0):
        return None, nodes, DONE

    chosen = np.full(n, -1, np.int64)
    val_ptr = np.zeros(n, np.int64)
    assigned = np.zeros(n, np.uint8)
    depth = 0
    while depth >= 0:
        if depth == n:
            return lo[n].copy(), nodes, DONE
        if chosen[depth] < 0:
            free = np.flatnonzero(assigned == 0)
            best = free[np.argmin(cnt[depth, free])]
            chosen[depth] = best
            val_ptr[depth] = lo[depth, best]
        var = chosen[depth]
        row = dom[depth, var]
        nz = np.flatnonzero(row[val_ptr[depth] :])
        if nz.size == 0:
            chosen[depth] = -1
            depth -= 1
            if depth >= 0:
                assigned[chosen[depth]] = 0
            continue
        val = int(val_ptr[depth] + nz[0])
        val_ptr[depth] = val + 1
        nodes += 1
        if nodes > node_budget:
            return None, nodes, BUDGET_EXCEEDED
        nxt = depth + 1
        dom[nxt] = dom[depth]
        lo[nxt] = lo[depth]
        hi[nxt] = hi[depth]
        cnt[nxt] = cnt[depth]
        dom[nxt, var, :] = 0
        dom[nxt, var, val] = 1
        lo[nxt, var] = hi[nxt, var] = val
        cnt[nxt, var] = 1
        ok = True
        for c in range(m):
            s, t = csrc[c], cdst[c]
            if s == var:
                _restrict_row(dom[nxt, t], c, val, True, cmask, H)
                cnt[nxt, t], lo[nxt, t], hi[nxt, t] = _row_stats(dom[nxt, t])
                if cnt[nxt, t] == 0:
                    ok = False
                    break
            if t == var:
                _restrict_row(dom[nxt, s], c, val, False, cmask, H)
                cnt[nxt, s], lo[nxt, s], hi[nxt, s] = _row_stats(dom[nxt, s])
                if cnt[nxt, s] == 0:
                    ok = False
                    break
        if ok:
            ok = bounds_fixpoint(nxt)
        if ok:
            assigned[var] = 1
            depth = nxt
    return None, nodes, DONE


def solve_first(domains, csrc, cdst, cmask, dlo, dhi, node_budget):
    """First solution of the problem, or None.

    Returns (assignment | None, nodes, status). The assignment is an
    int64 array indexed like `domains`.
    """
    if _BACKEND == "numpy":
        return _solve_numpy(domains, csrc, cdst, cmask, dlo, dhi, node_budget)
    out, nodes, status, found = _solve_numba(
        np.ascontiguousarray(domains),
        csrc.astype(np.int64),
        cdst.astype(np.int64),
        np.ascontiguousarray(cmask),
        dlo.astype(np.int64),
        dhi.astype(np.int64),
        np.int64(node_budget),
    )
    return (out if found else None), int(nodes), int(status)


# ---------------------------------------------------------------------------
# exhaustive enumeration


def _enumerate_loops(domains, csrc, cdst, cmask, node_budget, max_solutions):  # pragma: no cover - compiled
    n, W = domains.shape
    H = W - 1
    m = csrc.shape[0]
    dom = np.empty((n + 1, n, W), np.uint8)
    dom[0] = domains
    sols = np.empty((max_solutions, n), np.int64)
    n_sols = 0
    nodes = 0
    assign = np.empty(n, np.int64)
    val_ptr = np.zeros(n, np.int64)
    depth = 0
    while depth >= 0:
        if depth == n:
            if n_sols == max_solutions:
                return sols, n_sols, nodes, SOLUTION_CAP
            for v in range(n):
                sols[n_sols, v] = assign[v]
            n_sols += 1
            depth -= 1
            continue
        val = -1
        w = val_ptr[depth]
        while w < W:
            if dom[depth, depth, w]:
                val = w
                break
            w += 1
        if val < 0:
            val_ptr[depth] = 0
            depth -= 1
            continue
        val_ptr[depth] = val + 1
        nodes += 1
        if nodes > node_budget:
            return sols, n_sols, nodes, BUDGET_EXCEEDED
        assign[depth] = val
        nxt = depth + 1
        dom[nxt] = dom[depth]
        for w in range(W):
            dom[nxt, depth, w] = 0
        dom[nxt, depth, val] = 1
        ok = True
        for c in range(m):
            s = csrc[c]
            t = cdst[c]
            if s == depth:
                alive = 0
                for w in range(W):
                    if dom[nxt, t, w]:
                        if cmask[c, H + w - val] == 0:
                            dom[nxt, t, w] = 0
                        else:
                            alive += 1
                if alive == 0:
                    ok = False
                    break
            if t == depth:
                alive = 0
                for w in range(W):
                    if dom[nxt, s, w]:
                        if cmask[c, H + val - w] == 0:
                            dom[nxt, s, w] = 0
                        else:
                            alive += 1
                if alive == 0:
                    ok = False
                    break
        if ok:
            if nxt < n:
                val_ptr[nxt] = 0
            depth = nxt
    return sols, n_sols, nodes, DONE


def _enumerate_numpy(domains, csrc, cdst, cmask, node_budget, max_solutions):
    n, W = domains.shape
    H = W - 1
    m = csrc.shape[0]
    dom = np.empty((n + 1, n, W), np.uint8)
    dom[0] = domains
    sols = np.empty((max_solutions, n), np.int64)
    n_sols = 0
    nodes = 0
    assign = np.empty(n, np.int64)
    val_ptr = np.zeros(n, np.int64)
    depth = 0
    while depth >= 0:
        if depth == n:
            if n_sols == max_solutions:
                return sols, n_sols, nodes, SOLUTION_CAP
            sols[n_sols] = assign
            n_sols += 1
            depth -= 1
            continue
        row = dom[depth, depth]
        nz = np.flatnonzero(row[val_ptr[depth] :])
        if nz.size == 0:
            val_ptr[depth] = 0
            depth -= 1
            continue
        val = int(val_ptr[depth] + nz[0])
        val_ptr[depth] = val + 1
        nodes += 1
        if nodes > node_budget:
            return sols, n_sols, nodes, BUDGET_EXCEEDED
        assign[depth] = val
        nxt = depth + 1
        dom[nxt] = dom[depth]
        dom[nxt, depth, :] = 0
        dom[nxt, depth, val] = 1
        ok = True
        for c in range(m):
            s, t = csrc[c], cdst[c]
            if s == depth:
                _restrict_row(dom[nxt, t], c, val, True, cmask, H)
                if not dom[nxt, t].any():
                    ok = False
                    break
            if t == depth:
                _restrict_row(dom[nxt, s], c, val, False, cmask, H)
                if not dom[nxt, s].any():
                    ok = False
                    break
        if ok:
            if nxt < n:
                val_ptr[nxt] = 0
            depth = nxt
    return sols, n_sols, nodes, DONE


def enumerate_all(domains, csrc, cdst, cmask, node_budget, max_solutions):
    """Every solution, in lexicographic variable-index order.

    Returns (solutions (k, n) int64, nodes, status); the solution list
    is only complete when status == DONE.
    """
    if _BACKEND == "numpy":
        sols, n_sols, nodes, status = _enumerate_numpy(
            domains, csrc, cdst, cmask, node_budget, max_solutions
        )
    else:
        sols, n_sols, nodes, status = _enumerate_numba(
            np.ascontiguousarray(domains),
            csrc.astype(np.int64),
            cdst.astype(np.int64),
            np.ascontiguousarray(cmask),
            np.int64(node_budget),
            np.int64(max_solutions),
        )
    return sols[:n_sols].copy(), int(nodes), int(status)


if _BACKEND == "numba":
    from numba import njit

    _fw_numba = njit(cache=True)(_fw_loops)
    _enumerate_numba = njit(cache=True)(_enumerate_loops)
    _solve_numba = njit(cache=True)(_solve_loops)
