"""MIP formulations of the anchoring problem and chain-inequality machinery.

Three equivalent mixed-integer models over binary anchoring indicators h:

* ``std`` — baseline variables x plus the pairwise big-M-free linearization
  x_j - x_i >= LD(i, j)(h_i + h_j - 1) over all comparable pairs, with h_s = 1
  and h_t = 0 substituted as constants.
* ``dom`` — schedule variables z of the dominant baseline with the tightened
  rows z_j - z_i >= L0(i, j) + (LD(i, j) - L0(i, j)) h_j; arc rows are implied
  and omitted.
* ``lay`` — budgeted sets only: one schedule copy per remaining budget level
  gamma = 0..Γ, horizontal arcs p_i inside a layer, transversal arcs
  p_i + dhat_i consuming one budget unit, and vertical arcs -D_j(1 - h_j)
  letting non-anchored jobs move between layers, where D_j is the
  full-deviation slack L_{G(p+dhat)}(s, j) - L0(s, j).  The baseline is the
  top layer Γ.

The h-projections of the ``dom`` and ``lay`` relaxations are described by
chain inequalities: for every s-t chain in the comparability order, the sum of
hop weights must not exceed the deadline.  ``separate_chain`` finds the most
violated chain by a longest-path sweep, which powers both a cutting-plane
solver in the h-space (``solve_dom_cuts``) and projection membership tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .anchored import (
    AnchoredSolution,
    Instance,
    dominant_schedule,
    is_anchored_set,
)
from .errors import (
    DeadlineInfeasible,
    InfeasibleAnchoredSet,
    NumericalFailure,
    UnsupportedUncertainty,
)
from .graph import (
    S,
    LongestPathMatrix,
    Schedule,
    all_pairs_longest,
    single_source_longest,
    topological_order,
)
from .milp import MipModel, SolveParams, SolveResult, solve_lp, solve_mip
from .uncertainty import Budgeted, normalize, worst_case_longest_paths

#: violation tolerance for chain separation
SEP_TOL = 1e-6


def _node_label(g, v: int) -> str:
    if v == S:
        return "s"
    if v == g.t:
        return "t"
    return str(v)


def _matrices(inst: Instance, l0, ld):
    g = inst.graph
    if l0 is None:
        l0 = all_pairs_longest(g, g.p)
    if ld is None:
        ld = worst_case_longest_paths(g, inst.delta)
    return l0, ld


def _objective(model: MipModel, inst: Instance) -> None:
    model.set_objective(
        {f"h_{j}": float(inst.weights[j - 1]) for j in inst.graph.jobs}, maximize=True
    )


def build_std(
    inst: Instance, ld: LongestPathMatrix | None = None
) -> MipModel:
    """Baseline-variable model with pairwise anchoring linearizations.

    Variables: x_v >= 0 for every node (x_s fixed to 0), binary h_j.  Rows:
    the arc rows of G, the deadline x_t <= M, and for every comparable pair
    (i, j) the row x_j - x_i >= LD(i, j)(h_i + h_j - 1) with h_s = 1 and
    h_t = 0 substituted.  The upper bound M on x is implied by the arc rows
    and the deadline, so declaring it cuts nothing.
    """
    _, ld = _matrices(inst, None, ld)
    g = inst.graph
    M = float(inst.deadline)
    ubx = max(M, 0.0)
    model = MipModel(name="std")
    model.add_var("x_s", 0.0, 0.0)
    for j in g.jobs:
        model.add_var(f"x_{j}", 0.0, ubx)
    model.add_var("x_t", 0.0, ubx)
    for j in g.jobs:
        model.add_binary(f"h_{j}")
    for i, j in g.arcs:
        model.add_row(
            {f"x_{_node_label(g, j)}": 1.0, f"x_{_node_label(g, i)}": -1.0},
            ">=",
            float(g.p[i]),
            name=f"arc_{_node_label(g, i)}_{_node_label(g, j)}",
        )
    model.add_row({"x_t": 1.0}, "<=", M, name="deadline")
    for i, j in ld.pairs():
        L = float(ld.values[i, j])
        coefs = {f"x_{_node_label(g, j)}": 1.0, f"x_{_node_label(g, i)}": -1.0}
        rhs = -L
        if i == S:
            rhs += L
        else:
            coefs[f"h_{i}"] = coefs.get(f"h_{i}", 0.0) - L
        if j != g.t:
            coefs[f"h_{j}"] = coefs.get(f"h_{j}", 0.0) - L
        model.add_row(
            coefs, ">=", rhs, name=f"pair_{_node_label(g, i)}_{_node_label(g, j)}"
        )
    _objective(model, inst)
    return model


def _pair_row_implied(l0, ld, sink, i: int, j: int) -> bool:
    """Is the pair row for (i, j) implied by the rows through some job k?

    Adding the rows for (i, k) and (k, j) gives, using h_k >= 0,
    z_j - z_i >= L0(i, k) + L0(k, j) + gain(k, j) h_j; this dominates the
    (i, j) row whenever k lies on a longest nominal i-j path and the head
    tightening does not shrink, i.e. gain(k, j) >= gain(i, j) (heads at the
    sink carry no tightening).  Such rows can be skipped: the polytope — and
    hence the LP bound — is unchanged, only the model gets smaller.
    """
    ks = np.flatnonzero(l0.reach[i] & l0.reach[:, j])
    if ks.size == 0:
        return False
    tight = l0.values[i, ks] + l0.values[ks, j] >= l0.values[i, j] - 1e-9
    if j == sink:
        return bool(np.any(tight))
    gain_ij = ld.values[i, j] - l0.values[i, j]
    gain_kj = ld.values[ks, j] - l0.values[ks, j]
    return bool(np.any(tight & (gain_kj >= gain_ij - 1e-9)))


def build_dom(
    inst: Instance,
    l0: LongestPathMatrix | None = None,
    ld: LongestPathMatrix | None = None,
) -> MipModel:
    """Dominant-schedule model with per-head tightened pair rows.

    Variables: z_v >= 0 (z_s fixed to 0), binary h_j.  Rows: z_t <= M and,
    for every comparable pair with tail in J ∪ {s} and head in J ∪ {t},
    z_j - z_i >= L0(i, j) + (LD(i, j) - L0(i, j)) h_j (h_t = 0).  Arc rows
    are implied because L0(i, j) >= p_i on arcs.  The head-to-t rows bound
    every z by M, so the declared upper bounds cut nothing.  Pair rows that
    are already implied through an intermediate job are omitted; the
    feasible region is identical (see ``_pair_row_implied``).
    """
    l0, ld = _matrices(inst, l0, ld)
    g = inst.graph
    M = float(inst.deadline)
    ubz = max(M, 0.0)
    model = MipModel(name="dom")
    model.add_var("z_s", 0.0, 0.0)
    for j in g.jobs:
        model.add_var(f"z_{j}", 0.0, ubz)
    model.add_var("z_t", 0.0, ubz)
    for j in g.jobs:
        model.add_binary(f"h_{j}")
    model.add_row({"z_t": 1.0}, "<=", M, name="deadline")
    for i, j in l0.pairs():
        if i == g.t or j == S:
            continue
        if _pair_row_implied(l0, ld, g.t, i, j):
            continue
        li, lj = _node_label(g, i), _node_label(g, j)
        base = float(l0.values[i, j])
        coefs = {f"z_{lj}": 1.0, f"z_{li}": -1.0}
        if j != g.t:
            gain = float(ld.values[i, j]) - base
            if gain != 0.0:
                coefs[f"h_{j}"] = -gain
        model.add_row(coefs, ">=", base, name=f"pair_{li}_{lj}")
    _objective(model, inst)
    return model


def _layer_data(inst: Instance, dhat, gamma):
    d = normalize(inst.delta, inst.graph.n)
    if dhat is None or gamma is None:
        if not isinstance(d, Budgeted):
            raise UnsupportedUncertainty(
                "layered model requires a budgeted uncertainty set"
            )
        dhat = np.asarray(d.dhat, dtype=float)
        gamma = int(d.gamma)
    else:
        dhat = np.asarray(dhat, dtype=float)
        gamma = int(gamma)
    return dhat, gamma


def build_lay(inst: Instance, dhat=None, gamma: int | None = None) -> MipModel:
    """Layered model for budgeted sets, one schedule copy per budget level.

    Layer Γ is the baseline (deadline row x{Γ}_t <= M); moving along a
    transversal arc to the layer below spends one unit of budget and uses the
    deviated length p_i + dhat_i.  A vertical row per job and layer lets a
    non-anchored job start earlier in lower layers by at most its
    full-deviation slack D_j.  Declared upper bounds are a retraction bound
    (any feasible point can lower its copies below it), so they cut nothing.
    """
    dhat, gamma = _layer_data(inst, dhat, gamma)
    g = inst.graph
    M = float(inst.deadline)
    dev = np.zeros(g.n + 2)
    dev[1 : g.n + 1] = dhat
    dist_nom = single_source_longest(g, S, g.p)
    dist_dev = single_source_longest(g, S, g.p + dev)
    D = dist_dev - dist_nom
    maxD = float(max(D[1 : g.n + 1].max(), 0.0)) if g.n else 0.0
    ub_all = max(M, 0.0) + gamma * maxD + max(float(dist_dev[g.t]), 0.0)

    model = MipModel(name="lay")
    for gam in range(gamma + 1):
        model.add_var(f"x{gam}_s", 0.0, 0.0)
        for j in g.jobs:
            model.add_var(f"x{gam}_{j}", 0.0, ub_all)
        model.add_var(f"x{gam}_t", 0.0, ub_all)
    for j in g.jobs:
        model.add_binary(f"h_{j}")

    for gam in range(gamma + 1):
        for i, j in g.arcs:
            li, lj = _node_label(g, i), _node_label(g, j)
            model.add_row(
                {f"x{gam}_{lj}": 1.0, f"x{gam}_{li}": -1.0},
                ">=",
                float(g.p[i]),
                name=f"lay{gam}_arc_{li}_{lj}",
            )
    for gam in range(gamma):
        for i, j in g.arcs:
            li, lj = _node_label(g, i), _node_label(g, j)
            model.add_row(
                {f"x{gam}_{lj}": 1.0, f"x{gam + 1}_{li}": -1.0},
                ">=",
                float(g.p[i] + dev[i]),
                name=f"lay{gam}_dev_{li}_{lj}",
            )
    for j in g.jobs:
        dj = float(D[j])
        for gam in range(gamma):
            coefs = {f"x{gam + 1}_{j}": 1.0, f"x{gam}_{j}": -1.0}
            if dj != 0.0:
                coefs[f"h_{j}"] = -dj
            model.add_row(coefs, ">=", -dj, name=f"vert{gam}_{j}")
    model.add_row({f"x{gamma}_t": 1.0}, "<=", M, name="deadline")
    _objective(model, inst)
    return model


_BUILDERS = {"std": build_std, "dom": build_dom, "lay": build_lay}


def build(inst: Instance, which: str) -> MipModel:
    """Build one of the three formulations by name (std, dom, lay)."""
    which = which.lower()
    if which == "std":
        return build_std(inst)
    if which == "dom":
        return build_dom(inst)
    if which == "lay":
        return build_lay(inst)
    raise ValueError(f"unknown formulation {which!r}")


# ---------------------------------------------------------------------------
# valid inequalities on single jobs
# ---------------------------------------------------------------------------


def chvatal_bound(
    inst: Instance,
    l0: LongestPathMatrix,
    ld: LongestPathMatrix,
    j: int,
) -> int | None:
    """Rounded single-job upper bound on h_j, clipped to {0, 1}.

    A job anchored at its earliest start delays completion by at least
    LD(s,j) - L0(s,j) beyond the nominal critical path through j, which the
    slack M - (L0(s,j) + L0(j,t)) must absorb; rounding the ratio gives an
    integer bound.  Returns None when LD(s,j) = L0(s,j) (no tightening, the
    inequality is vacuous).
    """
    num = float(inst.deadline) - (float(l0.values[S, j]) + float(l0.values[j, inst.graph.t]))
    den = float(ld.values[S, j]) - float(l0.values[S, j])
    if den <= 1e-12:
        return None
    val = int(np.floor(num / den + 1e-9))
    return max(0, min(1, val))


def add_chvatal_rows(
    model: MipModel,
    inst: Instance,
    l0: LongestPathMatrix,
    ld: LongestPathMatrix,
) -> int:
    """Add the restrictive rounded bounds (h_j <= 0) to a model; returns count."""
    added = 0
    for j in inst.graph.jobs:
        b = chvatal_bound(inst, l0, ld, j)
        if b == 0:
            model.add_row({f"h_{j}": 1.0}, "<=", 0.0, name=f"round_h_{j}")
            added += 1
    return added


# ---------------------------------------------------------------------------
# chain separation
# ---------------------------------------------------------------------------


def separate_chain(
    inst: Instance,
    l0: LongestPathMatrix,
    ld: LongestPathMatrix,
    h: Mapping[int, float],
    which: str = "dom",
    tol: float = SEP_TOL,
):
    """Most violated chain inequality at a (fractional) h, or None.

    A chain is an s-t path in the comparability order.  Its weight sums, per
    hop (i, j) with j a job, L0(i,j) + (LD(i,j) - L0(i,j)) h_j for the pair
    model or LD(i,j) - D_j(1 - h_j) for the layered model, plus the nominal
    L0(i,t) on the final hop; h is in the projection iff every chain weighs
    at most M.  Returns (chain, violation) with the chain as a node tuple
    including s and t.
    """
    g = inst.graph
    which = which.lower()
    if which not in ("dom", "lay"):
        raise ValueError(f"unknown projection {which!r}")
    hv = np.zeros(g.n + 2)
    for j in g.jobs:
        hv[j] = float(h[j])
    if which == "lay":
        dhat, _ = _layer_data(inst, None, None)
        dev = np.zeros(g.n + 2)
        dev[1 : g.n + 1] = dhat
        D = single_source_longest(g, S, g.p + dev) - single_source_longest(g, S, g.p)

    reach = ld.reach
    best = np.full(g.n + 2, -np.inf)
    best[S] = 0.0
    parent = np.full(g.n + 2, -1, dtype=np.int64)
    for v in topological_order(g):
        if v == S:
            continue
        for u in range(g.n + 1):
            if not reach[u, v]:
                continue
            if v == g.t:
                w = float(l0.values[u, v])
            elif which == "dom":
                base = float(l0.values[u, v])
                w = base + (float(ld.values[u, v]) - base) * hv[v]
            else:
                w = float(ld.values[u, v]) - float(D[v]) * (1.0 - hv[v])
            cand = best[u] + w
            if cand > best[v] + 1e-15:
                best[v] = cand
                parent[v] = u
    violation = float(best[g.t]) - float(inst.deadline)
    if violation <= tol:
        return None
    chain = []
    v = g.t
    while v >= 0:
        chain.append(int(v))
        v = parent[v]
    chain.reverse()
    return tuple(chain), violation


def chain_weight(
    inst: Instance,
    l0: LongestPathMatrix,
    ld: LongestPathMatrix,
    chain,
    h: Mapping[int, float],
    which: str = "dom",
) -> float:
    """Weight of one specific chain at h (same hop convention as separation)."""
    g = inst.graph
    which = which.lower()
    if which == "lay":
        dhat, _ = _layer_data(inst, None, None)
        dev = np.zeros(g.n + 2)
        dev[1 : g.n + 1] = dhat
        D = single_source_longest(g, S, g.p + dev) - single_source_longest(g, S, g.p)
    total = 0.0
    for u, v in zip(chain[:-1], chain[1:]):
        if v == g.t:
            total += float(l0.values[u, v])
        elif which == "dom":
            base = float(l0.values[u, v])
            total += base + (float(ld.values[u, v]) - base) * float(h[v])
        else:
            total += float(ld.values[u, v]) - float(D[v]) * (1.0 - float(h[v]))
    return total


def chain_cut_row(
    inst: Instance,
    l0: LongestPathMatrix,
    ld: LongestPathMatrix,
    chain,
):
    """The pair-model chain inequality as an h-space row (coefs, sense, rhs)."""
    g = inst.graph
    coefs: dict[str, float] = {}
    const = 0.0
    for u, v in zip(chain[:-1], chain[1:]):
        base = float(l0.values[u, v])
        const += base
        if v != g.t:
            gain = float(ld.values[u, v]) - base
            if gain != 0.0:
                name = f"h_{v}"
                coefs[name] = coefs.get(name, 0.0) + gain
    return coefs, "<=", float(inst.deadline) - const


# ---------------------------------------------------------------------------
# solving and bounds
# ---------------------------------------------------------------------------


def _extract_solution(
    inst: Instance, model: MipModel, res: SolveResult, which: str
) -> AnchoredSolution | None:
    if res.x is None:
        return None
    g = inst.graph
    anchored = frozenset(j for j in g.jobs if res.x[f"h_{j}"] >= 0.5)
    which = which.lower()
    start = np.zeros(g.n + 2)
    if which == "std":
        prefix = "x_"
    elif which == "dom":
        prefix = "z_"
    else:
        gamma = max(
            int(name.split("_")[0][1:])
            for name in res.x
            if name.startswith("x") and "_" in name and not name.startswith("h_")
        )
        prefix = f"x{gamma}_"
    for v in range(g.n + 2):
        start[v] = res.x[f"{prefix}{_node_label(g, v)}"]
    objective = float(sum(inst.weights[j - 1] for j in anchored))
    return AnchoredSolution(
        schedule=Schedule(start=start), anchored=anchored, objective=objective
    )


def _greedy_anchored_heuristic(inst: Instance, ld, which: str):
    """LP-guided incumbent finder: grow a feasible anchored set greedily.

    Jobs are tried in decreasing LP indicator value (weight breaks ties);
    each one is kept if the enlarged set still fits the deadline.  The
    dominant baseline of the final set satisfies every model row, so the
    branch-and-bound always holds a primal solution to prune against.
    """
    g = inst.graph
    deadline = float(inst.deadline)
    prefix = "z" if which == "dom" else "x"

    def heur(xlp: dict[str, float]) -> dict[str, float] | None:
        order = sorted(
            g.jobs,
            key=lambda j: (-xlp.get(f"h_{j}", 0.0), -inst.weights[j - 1], j),
        )
        chosen: list[int] = []
        for j in order:
            if is_anchored_set(g, ld, chosen + [j], deadline):
                chosen.append(j)
        try:
            z = dominant_schedule(g, ld, chosen, deadline)
        except InfeasibleAnchoredSet:
            return None
        picked = set(chosen)
        cand = {f"h_{j}": float(j in picked) for j in g.jobs}
        for v in range(g.n + 2):
            cand[f"{prefix}_{_node_label(g, v)}"] = float(z.start[v])
        return cand

    return heur


def solve_formulation(
    inst: Instance,
    which: str = "dom",
    params: SolveParams | None = None,
    chvatal: bool = False,
) -> tuple[SolveResult, AnchoredSolution | None]:
    """Build one formulation, solve it as a MIP, and decode the solution."""
    l0, ld = _matrices(inst, None, None)
    which = which.lower()
    if which == "std":
        model = build_std(inst, ld)
    elif which == "dom":
        model = build_dom(inst, l0, ld)
    elif which == "lay":
        model = build_lay(inst)
    else:
        raise ValueError(f"unknown formulation {which!r}")
    if chvatal:
        add_chvatal_rows(model, inst, l0, ld)
    heuristic = (
        _greedy_anchored_heuristic(inst, ld, which) if which in ("std", "dom") else None
    )
    res = solve_mip(model, params, heuristic=heuristic)
    return res, _extract_solution(inst, model, res, which)


@dataclass
class CutLoopStats:
    """Root cutting-plane diagnostics of the h-space solve."""

    root_bound: float
    root_cuts: int
    root_rounds: int

    def root_gap(self, opt: float) -> float:
        return (self.root_bound - opt) / max(abs(opt), 1e-9)


def solve_dom_cuts(
    inst: Instance,
    params: SolveParams | None = None,
    chvatal: bool = False,
    max_rounds: int = 5000,
) -> tuple[SolveResult, AnchoredSolution | None, CutLoopStats]:
    """Solve via chain cuts on an h-only master instead of enumerated pairs.

    The master model carries only the binary h variables; chain inequalities
    are generated by separation — in a root cutting loop first, then lazily
    inside branch and bound on integral candidates.  Schedules are recovered
    from the final anchored set afterwards.
    """
    params = params or SolveParams()
    l0, ld = _matrices(inst, None, None)
    g = inst.graph
    master = MipModel(name="dom_cuts")
    for j in g.jobs:
        master.add_binary(f"h_{j}")
    _objective(master, inst)
    if chvatal:
        add_chvatal_rows(master, inst, l0, ld)

    rounds = 0
    cuts = 0
    root_bound = np.nan
    while True:
        lp = solve_lp(master, params)
        if lp.status != "Optimal":
            root_bound = np.nan
            break
        root_bound = lp.value
        h = {j: lp.x[f"h_{j}"] for j in g.jobs}
        found = separate_chain(inst, l0, ld, h, "dom")
        if found is None:
            break
        chain, _ = found
        master.add_row(*chain_cut_row(inst, l0, ld, chain), name=f"chain{cuts}")
        cuts += 1
        rounds += 1
        if rounds > max_rounds:
            raise NumericalFailure("chain separation did not converge at the root")

    def callback(x: dict[str, float]):
        h = {j: x[f"h_{j}"] for j in g.jobs}
        found = separate_chain(inst, l0, ld, h, "dom")
        if found is None:
            return []
        chain, _ = found
        return [chain_cut_row(inst, l0, ld, chain)]

    res = solve_mip(
        master,
        params,
        cut_callback=callback,
        heuristic=_greedy_anchored_heuristic(inst, ld, "dom"),
    )
    stats = CutLoopStats(root_bound=root_bound, root_cuts=cuts, root_rounds=rounds)
    if res.x is None:
        return res, None, stats
    anchored = frozenset(j for j in g.jobs if res.x[f"h_{j}"] >= 0.5)
    schedule = dominant_schedule(g, ld, sorted(anchored), inst.deadline)
    objective = float(sum(inst.weights[j - 1] for j in anchored))
    sol = AnchoredSolution(schedule=schedule, anchored=anchored, objective=objective)
    return res, sol, stats


def lp_bound(inst: Instance, which: str = "dom", chvatal: bool = False) -> float:
    """Optimal value of the LP relaxation of one formulation."""
    l0, ld = _matrices(inst, None, None)
    which = which.lower()
    if which == "std":
        model = build_std(inst, ld)
    elif which == "dom":
        model = build_dom(inst, l0, ld)
    elif which == "lay":
        model = build_lay(inst)
    else:
        raise ValueError(f"unknown formulation {which!r}")
    if chvatal:
        add_chvatal_rows(model, inst, l0, ld)
    res = solve_lp(model)
    if res.status != "Optimal":
        raise DeadlineInfeasible(f"LP relaxation of {which} is {res.status}")
    return float(res.value)


def dom_lay_premise(inst: Instance) -> bool:
    """Does the full-deviation slack cover every pairwise tightening?

    When D_j = L_{G(p+dhat)}(s,j) - L0(s,j) >= LD(i,j) - L0(i,j) for every
    comparable pair with head job j, the pair-model relaxation provably
    dominates the layered one.  Holds on critical graphs and for uniform
    one-disruption sets.
    """
    dhat, _ = _layer_data(inst, None, None)
    g = inst.graph
    l0, ld = _matrices(inst, None, None)
    dev = np.zeros(g.n + 2)
    dev[1 : g.n + 1] = dhat
    D = single_source_longest(g, S, g.p + dev) - single_source_longest(g, S, g.p)
    for i, j in l0.pairs():
        if j == g.t or i == g.t:
            continue
        if float(D[j]) < float(ld.values[i, j]) - float(l0.values[i, j]) - 1e-9:
            return False
    return True
