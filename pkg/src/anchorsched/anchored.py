"""Anchored sets: feasibility characterization and exhaustive optimization.

A baseline schedule x anchors a job set H when, for every deviation δ in the
uncertainty set, some schedule of the inflated graph G(p+δ) agrees with x on
H.  Because a worst case exists pairwise, this reduces to the precedence
tests x_j - x_i >= LD(i, j) over comparable pairs i, j in H ∪ {s}, where LD
is the worst-case longest-path matrix.

Consequently H admits *some* feasible baseline within deadline M iff the
earliest schedule of the augmented graph — G plus an arc (i, j) of length
LD(i, j) for every comparable pair with i in H ∪ {s}, j in H — finishes by
M.  That earliest schedule is the dominant baseline for H: it additionally
satisfies z_j - z_i >= LD(i, j) for *every* predecessor i of an anchored j,
not only anchored ones, which is what the strengthened formulation exploits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from ._backend import USE_NUMBA
from .errors import DeadlineInfeasible, InfeasibleAnchoredSet, InstanceTooLarge
from .graph import (
    EPS,
    S,
    LongestPathMatrix,
    PrecedenceGraph,
    Schedule,
    all_pairs_longest,
    require_schedule,
)
from .uncertainty import UncertaintySet, n_jobs_of, normalize, worst_case_longest_paths

#: exhaustive search guard
BRUTE_FORCE_MAX_JOBS = 20


@dataclass(frozen=True)
class Instance:
    """A scheduling instance: graph, uncertainty set, deadline and weights."""

    graph: PrecedenceGraph
    delta: UncertaintySet
    deadline: float
    weights: np.ndarray
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.graph.n,):
            raise ValueError(f"weights must have length n={self.graph.n}")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "delta", normalize(self.delta, self.graph.n))
        object.__setattr__(self, "deadline", float(self.deadline))
        if n_jobs_of(self.delta) not in (None, self.graph.n):
            raise ValueError("uncertainty set does not match the graph size")

    @property
    def n(self) -> int:
        return self.graph.n

    def weight_of(self, anchored: Iterable[int]) -> float:
        return float(sum(self.weights[j - 1] for j in anchored))


@dataclass(frozen=True)
class AnchoredSolution:
    """A baseline schedule with its anchored set and total anchored weight."""

    schedule: Schedule
    anchored: frozenset[int]
    objective: float


def _check_anchor_set(g: PrecedenceGraph, anchored: Iterable[int]) -> list[int]:
    jobs = sorted(set(int(j) for j in anchored))
    for j in jobs:
        if not 1 <= j <= g.n:
            raise ValueError(f"anchored job {j} outside 1..{g.n}")
    return jobs


def anchored_graph(
    g: PrecedenceGraph, ld: LongestPathMatrix, anchored: Iterable[int]
) -> tuple[tuple[int, int, float], ...]:
    """Anchoring arcs (i, j, LD(i, j)) added to G for the candidate set.

    One arc per comparable pair with tail in H ∪ {s} and head in H.  The
    earliest schedule of G plus these arcs decides feasibility of H and, when
    feasible, is its dominant baseline.
    """
    jobs = _check_anchor_set(g, anchored)
    tails = [S] + jobs
    arcs = []
    for j in jobs:
        for i in tails:
            if ld.reach[i, j]:
                arcs.append((i, j, float(ld.values[i, j])))
    return tuple(arcs)


def _earliest_augmented(
    g: PrecedenceGraph, extra: Iterable[tuple[int, int, float]]
) -> Schedule:
    """Earliest schedule of G with extra minimum-lag arcs added."""
    incoming: list[list[tuple[int, float]]] = [[] for _ in range(g.n + 2)]
    for i, j in g.arcs:
        incoming[j].append((i, g.p[i]))
    for i, j, w in extra:
        incoming[j].append((i, w))
    start = np.zeros(g.n + 2)
    for v in g._topo:
        best = 0.0 if v == S else max(
            (start[i] + w for i, w in incoming[v]), default=0.0
        )
        start[v] = max(best, 0.0)
    return Schedule(start=start)


def dominant_schedule(
    g: PrecedenceGraph,
    ld: LongestPathMatrix,
    anchored: Iterable[int],
    deadline: float | None = None,
) -> Schedule:
    """Earliest baseline anchoring the given set.

    This schedule satisfies z_j - z_i >= LD(i, j) for every comparable pair
    with j anchored — anchored or not i — so it is feasible for the
    strengthened pair constraints whenever any baseline is.  With a deadline,
    raises InfeasibleAnchoredSet if even this schedule overruns it.
    """
    z = _earliest_augmented(g, anchored_graph(g, ld, anchored))
    if deadline is not None and z.makespan > float(deadline) + EPS:
        raise InfeasibleAnchoredSet(
            f"anchored set needs makespan {z.makespan:g} > deadline {float(deadline):g}"
        )
    return z


def is_anchored_set(
    g: PrecedenceGraph,
    ld: LongestPathMatrix,
    anchored: Iterable[int],
    deadline: float,
    tol: float = EPS,
) -> bool:
    """Can some baseline within the deadline anchor the given set?"""
    z = _earliest_augmented(g, anchored_graph(g, ld, anchored))
    return bool(z.makespan <= float(deadline) + tol)


def is_x_anchored(
    g: PrecedenceGraph,
    ld: LongestPathMatrix,
    x: Schedule | np.ndarray,
    anchored: Iterable[int],
    tol: float = EPS,
) -> bool:
    """Does the baseline x anchor the given set against the worst case?

    Checks x_j - x_i >= LD(i, j) over comparable pairs inside H ∪ {s}; x must
    be a schedule of G.
    """
    x = require_schedule(g, x, tol=tol)
    jobs = _check_anchor_set(g, anchored)
    tails = [S] + jobs
    for j in jobs:
        for i in tails:
            if ld.reach[i, j] and x[j] - x[i] < ld.values[i, j] - tol:
                return False
    return True


def recourse_feasible(
    g: PrecedenceGraph,
    dev: np.ndarray,
    x: Schedule | np.ndarray,
    anchored: Iterable[int],
    tol: float = EPS,
) -> bool:
    """Does a schedule of G(p+δ) exist that agrees with x on the anchored set?

    Equivalent to x_j - x_i >= L_{G(p+δ)}(i, j) on comparable pairs inside
    H ∪ {s}; the earliest such completion exists iff these pairwise tests all
    pass for the single deviation δ.
    """
    x = require_schedule(g, x, tol=tol)
    jobs = _check_anchor_set(g, anchored)
    dv = np.zeros(g.n + 2)
    dv[1 : g.n + 1] = np.asarray(dev, dtype=float)
    ld = all_pairs_longest(g, g.p + dv)
    tails = [S] + jobs
    for j in jobs:
        for i in tails:
            if ld.reach[i, j] and x[j] - x[i] < ld.values[i, j] - tol:
                return False
    return True


# ---------------------------------------------------------------------------
# exhaustive optimum
# ---------------------------------------------------------------------------


def _mask_arrays(inst: Instance, ld: LongestPathMatrix):
    """CSR views of G and of all candidate anchoring arcs, for mask kernels."""
    g = inst.graph
    ptr, src = g._incoming_csr()
    wt = g.p[src]
    topo_rest = np.asarray([v for v in g._topo if v != S], dtype=np.int64)
    an_ptr = np.zeros(g.n + 2, dtype=np.int64)
    an_src: list[int] = []
    an_wt: list[float] = []
    for j in range(1, g.n + 1):
        for i in range(0, g.n + 1):
            if ld.reach[i, j]:
                an_ptr[j + 1] += 1
                an_src.append(i)
                an_wt.append(float(ld.values[i, j]))
    np.cumsum(an_ptr, out=an_ptr)
    return (
        topo_rest,
        ptr,
        src,
        wt,
        an_ptr,
        np.asarray(an_src, dtype=np.int64),
        np.asarray(an_wt, dtype=float),
    )


def _subset_weights(n: int, weights: np.ndarray) -> np.ndarray:
    """Total weight of every job subset, indexed by bitmask (bit j-1 = job j)."""
    out = np.zeros(1 << n)
    for j in range(n):
        size = 1 << j
        out[size : 2 * size] = out[:size] + weights[j]
    return out


def brute_force_optimum(inst: Instance, tol: float = EPS) -> AnchoredSolution:
    """Exhaustive maximum-weight anchored set (guarded to n <= 20 jobs).

    Enumerates candidate sets by decreasing cardinality with a weight-bound
    prune, then reports the dominant baseline of the best set.  Ties in total
    weight (within 1e-9) resolve to the lexicographically smallest job set so
    results are reproducible across backends.
    """
    g = inst.graph
    if g.n > BRUTE_FORCE_MAX_JOBS:
        raise InstanceTooLarge(
            f"exhaustive search guarded to n <= {BRUTE_FORCE_MAX_JOBS}, got {g.n}"
        )
    ld = worst_case_longest_paths(g, inst.delta)
    nominal = all_pairs_longest(g, g.p)
    if inst.deadline < nominal.values[S, g.t] - tol:
        raise DeadlineInfeasible(
            f"deadline {inst.deadline:g} below nominal makespan {nominal.values[S, g.t]:g}"
        )
    topo_rest, ptr, src, wt, an_ptr, an_src, an_wt = _mask_arrays(inst, ld)
    n = g.n
    masks = np.arange(1 << n, dtype=np.int64)
    wsub = _subset_weights(n, inst.weights)
    pop = _subset_weights(n, np.ones(n))
    order = np.lexsort((masks, -pop))
    ordered = masks[order]
    deadline = float(inst.deadline)

    if USE_NUMBA:
        best = float(
            _kernels.scan_best(
                ordered, wsub, n, g.n + 2, topo_rest, ptr, src, wt,
                an_ptr, an_src, an_wt, deadline, EPS,
            )
        )
    else:
        best = 0.0
        chunk = 1 << 14
        for lo in range(0, len(ordered), chunk):
            block = ordered[lo : lo + chunk]
            mk = _kernels.mask_makespans(
                block, n, g.n + 2, topo_rest, ptr, src, wt, an_ptr, an_src, an_wt
            )
            ok = mk <= deadline + EPS
            if np.any(ok):
                best = max(best, float(wsub[block[ok]].max()))

    # tie-break pass: among feasible sets within 1e-9 of the best weight,
    # choose the lexicographically smallest job tuple
    cand = masks[wsub >= best - 1e-9]
    mk = _kernels.mask_makespans(
        cand, n, g.n + 2, topo_rest, ptr, src, wt, an_ptr, an_src, an_wt
    )
    feas = cand[mk <= deadline + EPS]
    best_jobs: tuple[int, ...] | None = None
    best_w = -np.inf
    for mask in feas.tolist():
        jobs = tuple(j + 1 for j in range(n) if mask >> j & 1)
        w = inst.weight_of(jobs)
        if w > best_w + 1e-9 or (abs(w - best_w) <= 1e-9 and (best_jobs is None or jobs < best_jobs)):
            best_w = w
            best_jobs = jobs
    assert best_jobs is not None  # the empty set is always feasible here
    schedule = dominant_schedule(g, ld, best_jobs, inst.deadline)
    return AnchoredSolution(
        schedule=schedule, anchored=frozenset(best_jobs), objective=float(best_w)
    )
