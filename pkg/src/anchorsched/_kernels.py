"""Hot numeric kernels, in two builds.

Each kernel has a loop implementation (numba-compiled when the numba backend is
active) and a vectorized pure-numpy twin.  ``_backend`` decides which build is
bound to the public name.  Both builds use the same tolerances and tie-breaking
so results are identical across backends.

Graph kernels work on a CSR layout of incoming arcs: for node ``v`` the arcs
ending at ``v`` occupy ``in_src[in_ptr[v]:in_ptr[v+1]]`` (tail node ids) with a
parallel weight array.  ``topo`` is a topological order of all nodes.
"""

from __future__ import annotations

import numpy as np

from ._backend import USE_NUMBA, jit

NEG = -np.inf

# ---------------------------------------------------------------------------
# single-source longest path (DAG sweep)
# ---------------------------------------------------------------------------


def _longest_from_loop(n_nodes, topo, in_ptr, in_src, in_wt, source):
    dist = np.full(n_nodes, NEG)
    dist[source] = 0.0
    for idx in range(n_nodes):
        v = topo[idx]
        best = dist[v]
        for k in range(in_ptr[v], in_ptr[v + 1]):
            cand = dist[in_src[k]] + in_wt[k]
            if cand > best:
                best = cand
        dist[v] = best
    return dist


def _longest_from_vec(n_nodes, topo, in_ptr, in_src, in_wt, source):
    dist = np.full(n_nodes, NEG)
    dist[source] = 0.0
    for v in topo:
        lo, hi = in_ptr[v], in_ptr[v + 1]
        if hi > lo:
            cand = np.max(dist[in_src[lo:hi]] + in_wt[lo:hi])
            if cand > dist[v]:
                dist[v] = cand
    return dist


# ---------------------------------------------------------------------------
# budgeted worst-case DP: states (node, used budget)
# ---------------------------------------------------------------------------


def _budgeted_from_loop(n_nodes, topo, in_ptr, in_src, wt_nom, wt_dev, source, gamma):
    val = np.full((n_nodes, gamma + 1), NEG)
    val[source, 0] = 0.0
    for idx in range(n_nodes):
        v = topo[idx]
        for k in range(in_ptr[v], in_ptr[v + 1]):
            u = in_src[k]
            for g in range(gamma + 1):
                c = val[u, g] + wt_nom[k]
                if c > val[v, g]:
                    val[v, g] = c
                if g < gamma:
                    c = val[u, g] + wt_dev[k]
                    if c > val[v, g + 1]:
                        val[v, g + 1] = c
    return val


def _budgeted_from_vec(n_nodes, topo, in_ptr, in_src, wt_nom, wt_dev, source, gamma):
    val = np.full((n_nodes, gamma + 1), NEG)
    val[source, 0] = 0.0
    for v in topo:
        lo, hi = in_ptr[v], in_ptr[v + 1]
        if hi > lo:
            block = val[in_src[lo:hi], :]
            best = np.max(block + wt_nom[lo:hi, None], axis=0)
            if gamma >= 1:
                dev = np.max(block[:, :-1] + wt_dev[lo:hi, None], axis=0)
                np.maximum(best[1:], dev, out=best[1:])
            np.maximum(val[v], best, out=val[v])
    return val


# ---------------------------------------------------------------------------
# partition-budgeted DP: states are mixed-radix budget vectors
# ---------------------------------------------------------------------------
# group_of[u] is the budget group of node u (-1 for s and t), stride/radix give
# the mixed-radix layout: digit g of state st is (st // stride[g]) % radix[g],
# radix[g] = gamma_g + 1.


def _partition_from_loop(
    n_nodes, topo, in_ptr, in_src, wt_nom, wt_dev, group_of, stride, radix, n_states, source
):
    val = np.full((n_nodes, n_states), NEG)
    val[source, 0] = 0.0
    for idx in range(n_nodes):
        v = topo[idx]
        for k in range(in_ptr[v], in_ptr[v + 1]):
            u = in_src[k]
            g = group_of[u]
            for st in range(n_states):
                c = val[u, st] + wt_nom[k]
                if c > val[v, st]:
                    val[v, st] = c
            if g >= 0:
                sg = stride[g]
                rg = radix[g]
                for st in range(n_states):
                    if (st // sg) % rg < rg - 1:
                        c = val[u, st] + wt_dev[k]
                        if c > val[v, st + sg]:
                            val[v, st + sg] = c
    return val


def _partition_from_vec(
    n_nodes, topo, in_ptr, in_src, wt_nom, wt_dev, group_of, stride, radix, n_states, source
):
    states = np.arange(n_states)
    can_add = [
        ((states // stride[g]) % radix[g]) < radix[g] - 1 for g in range(len(stride))
    ]
    targets = [states[can_add[g]] + stride[g] for g in range(len(stride))]
    val = np.full((n_nodes, n_states), NEG)
    val[source, 0] = 0.0
    shifted = np.empty(n_states)
    for v in topo:
        for k in range(in_ptr[v], in_ptr[v + 1]):
            u = in_src[k]
            np.maximum(val[v], val[u] + wt_nom[k], out=val[v])
            g = group_of[u]
            if g >= 0:
                shifted.fill(NEG)
                shifted[targets[g]] = val[u][can_add[g]] + wt_dev[k]
                np.maximum(val[v], shifted, out=val[v])
    return val


# ---------------------------------------------------------------------------
# simplex phase
# ---------------------------------------------------------------------------
# T is the (m+1) x (N+1) tableau of a minimization: rows 0..m-1 are basic rows
# with the rhs in the last column, row m is the reduced-cost row.  ``allowed``
# flags columns eligible to enter.  Entering uses Dantzig's rule until the
# cumulative count of degenerate pivots exceeds ``bland_after``, then Bland's
# rule (smallest eligible column index; leaving ties broken by smallest basis
# variable index throughout).  Returns (status, pivots) with status 0=optimal,
# 1=unbounded, 2=pivot limit.

_TIE = 1e-12
_DEGEN = 1e-10


def _run_phase_loop(T, basis, allowed, bland_after, max_pivots, ftol, ptol):
    m = T.shape[0] - 1
    ncols = T.shape[1] - 1
    degen = 0
    pivots = 0
    while True:
        e = -1
        if degen > bland_after:
            for j in range(ncols):
                if allowed[j] and T[m, j] < -ptol:
                    e = j
                    break
        else:
            best = -ptol
            for j in range(ncols):
                if allowed[j] and T[m, j] < best:
                    best = T[m, j]
                    e = j
        if e < 0:
            return 0, pivots
        r = -1
        best_ratio = np.inf
        for i in range(m):
            a = T[i, e]
            if a > ptol:
                ratio = T[i, ncols] / a
                if ratio < best_ratio - _TIE:
                    best_ratio = ratio
                    r = i
                elif ratio <= best_ratio + _TIE and r >= 0 and basis[i] < basis[r]:
                    if ratio < best_ratio:
                        best_ratio = ratio
                    r = i
        if r < 0:
            return 1, pivots
        if best_ratio <= _DEGEN:
            degen += 1
        piv = T[r, e]
        inv = 1.0 / piv
        for j in range(ncols + 1):
            T[r, j] *= inv
        T[r, e] = 1.0
        for i in range(m + 1):
            if i != r:
                f = T[i, e]
                if f != 0.0:
                    for j in range(ncols + 1):
                        T[i, j] -= f * T[r, j]
                    T[i, e] = 0.0
        basis[r] = e
        pivots += 1
        if pivots >= max_pivots:
            return 2, pivots


def _run_phase_vec(T, basis, allowed, bland_after, max_pivots, ftol, ptol):
    m = T.shape[0] - 1
    ncols = T.shape[1] - 1
    degen = 0
    pivots = 0
    if ncols == 0:
        return 0, 0
    while True:
        cost = T[m, :ncols]
        if degen > bland_after:
            eligible = np.nonzero(allowed & (cost < -ptol))[0]
            if eligible.size == 0:
                return 0, pivots
            e = int(eligible[0])
        else:
            masked = np.where(allowed, cost, 0.0)
            e = int(np.argmin(masked))
            if masked[e] >= -ptol:
                return 0, pivots
        col = T[:m, e]
        pos = col > ptol
        if not pos.any():
            return 1, pivots
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, ncols][pos] / col[pos]
        best_ratio = ratios.min()
        ties = np.nonzero(ratios <= best_ratio + _TIE)[0]
        r = int(ties[np.argmin(basis[ties])])
        if best_ratio <= _DEGEN:
            degen += 1
        prow = T[r] / T[r, e]
        prow[e] = 1.0
        colv = T[:, e].copy()
        colv[r] = 0.0
        T -= np.outer(colv, prow)
        T[r] = prow
        T[:, e] = 0.0
        T[r, e] = 1.0
        basis[r] = e
        pivots += 1
        if pivots >= max_pivots:
            return 2, pivots


# ---------------------------------------------------------------------------
# anchored-set subset scan (brute force)
# ---------------------------------------------------------------------------
# Jobs are bits 0..n-1 of a mask (bit j-1 <-> job j).  ``topo_rest`` is the
# topological order of all nodes except s.  Original arcs come in the in-CSR
# with weight p[tail]; candidate anchoring arcs (i, j) for comparable pairs
# come in a second in-CSR over jobs j with weight LD[i, j], active when j is in
# the mask and i is s or in the mask.


def _mask_makespans_loop(
    masks, n, n_nodes, topo_rest, in_ptr, in_src, in_wt, an_ptr, an_src, an_wt
):
    out = np.empty(len(masks))
    z = np.empty(n_nodes)
    for q in range(len(masks)):
        mask = masks[q]
        z[0] = 0.0
        for idx in range(len(topo_rest)):
            v = topo_rest[idx]
            best = NEG
            for k in range(in_ptr[v], in_ptr[v + 1]):
                c = z[in_src[k]] + in_wt[k]
                if c > best:
                    best = c
            if v <= n and (mask >> (v - 1)) & 1:
                for k in range(an_ptr[v], an_ptr[v + 1]):
                    u = an_src[k]
                    if u == 0 or (mask >> (u - 1)) & 1:
                        c = z[u] + an_wt[k]
                        if c > best:
                            best = c
            z[v] = best
        out[q] = z[n_nodes - 1]
    return out


def _mask_makespans_vec(
    masks, n, n_nodes, topo_rest, in_ptr, in_src, in_wt, an_ptr, an_src, an_wt
):
    nb = len(masks)
    bits = ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)
    z = np.full((nb, n_nodes), NEG)
    z[:, 0] = 0.0
    for v in topo_rest:
        lo, hi = in_ptr[v], in_ptr[v + 1]
        acc = np.max(z[:, in_src[lo:hi]] + in_wt[lo:hi], axis=1)
        if v <= n:
            jon = bits[:, v - 1]
            for k in range(an_ptr[v], an_ptr[v + 1]):
                u = an_src[k]
                active = jon if u == 0 else (jon & bits[:, u - 1])
                cand = np.where(active, z[:, u] + an_wt[k], NEG)
                np.maximum(acc, cand, out=acc)
        z[:, v] = acc
    return z[:, n_nodes - 1]


def _scan_best_loop(
    masks, wsub, n, n_nodes, topo_rest, in_ptr, in_src, in_wt, an_ptr, an_src, an_wt,
    limit, eps,
):
    best = NEG
    z = np.empty(n_nodes)
    for q in range(len(masks)):
        mask = masks[q]
        w = wsub[mask]
        if w <= best + 1e-12:
            continue
        z[0] = 0.0
        for idx in range(len(topo_rest)):
            v = topo_rest[idx]
            bestv = NEG
            for k in range(in_ptr[v], in_ptr[v + 1]):
                c = z[in_src[k]] + in_wt[k]
                if c > bestv:
                    bestv = c
            if v <= n and (mask >> (v - 1)) & 1:
                for k in range(an_ptr[v], an_ptr[v + 1]):
                    u = an_src[k]
                    if u == 0 or (mask >> (u - 1)) & 1:
                        c = z[u] + an_wt[k]
                        if c > bestv:
                            bestv = c
            z[v] = bestv
        if z[n_nodes - 1] <= limit + eps:
            best = w
    return best


if USE_NUMBA:
    longest_from = jit(_longest_from_loop)
    budgeted_from = jit(_budgeted_from_loop)
    partition_from = jit(_partition_from_loop)
    run_phase = jit(_run_phase_loop)
    mask_makespans = jit(_mask_makespans_loop)
    scan_best = jit(_scan_best_loop)
else:
    longest_from = _longest_from_vec
    budgeted_from = _budgeted_from_vec
    partition_from = _partition_from_vec
    run_phase = _run_phase_vec
    mask_makespans = _mask_makespans_vec
    scan_best = None  # brute force derives the best from mask_makespans blocks


def warm_up():
    """Trigger compilation of every kernel on tiny inputs (no-op on numpy)."""
    if not USE_NUMBA:
        return
    topo = np.array([0, 1, 2], dtype=np.int64)
    in_ptr = np.array([0, 0, 1, 2], dtype=np.int64)
    in_src = np.array([0, 1], dtype=np.int64)
    wt = np.array([0.0, 1.0])
    longest_from(3, topo, in_ptr, in_src, wt, 0)
    budgeted_from(3, topo, in_ptr, in_src, wt, wt, 0, 1)
    partition_from(
        3, topo, in_ptr, in_src, wt, wt,
        np.array([-1, 0, -1], dtype=np.int64),
        np.array([1], dtype=np.int64),
        np.array([2], dtype=np.int64),
        2, 0,
    )
    T = np.array([[1.0, 1.0, 1.0], [-1.0, 0.0, 0.0]])
    run_phase(T, np.array([1], dtype=np.int64), np.array([True, True]), 1000, 10, 1e-7, 1e-9)
    masks = np.array([0, 1], dtype=np.int64)
    mask_makespans(
        masks, 1, 3, topo[1:], in_ptr, in_src, wt,
        np.array([0, 0, 0, 0], dtype=np.int64),
        np.zeros(0, dtype=np.int64), np.zeros(0),
    )
    scan_best(
        masks, np.array([0.0, 1.0]), 1, 3, topo[1:], in_ptr, in_src, wt,
        np.array([0, 0, 0, 0], dtype=np.int64),
        np.zeros(0, dtype=np.int64), np.zeros(0),
        10.0, 1e-6,
    )
