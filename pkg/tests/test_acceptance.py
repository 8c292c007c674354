"""End-to-end acceptance checks.

Each test covers one numbered criterion and records a
"[acceptance] criterion k: PASS/FAIL" line (echoed in the terminal summary).
The checks only use independent constructions — explicit deviation-point
enumeration, textbook longest-path sweeps, and full subset enumeration — on
one side of every comparison.
"""

from __future__ import annotations

import functools
import time

import numpy as np
import pytest

import anchorsched as asd
from anchorsched.exact import preprocess_deadline
from anchorsched.formulations import _matrices
from anchorsched.milp import SolveParams, solve_lp

from .conftest import ACCEPTANCE_LINES, FIVE_DHAT, chain3_graph, five_job_graph
from .oracles import deviation_points, random_dag


def criterion(k: int):
    """Record the PASS/FAIL line for criterion k around the wrapped test."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper():
            try:
                fn()
            except BaseException:
                line = f"[acceptance] criterion {k}: FAIL"
                print(line)
                ACCEPTANCE_LINES.append(line)
                raise
            line = f"[acceptance] criterion {k}: PASS"
            print(line)
            ACCEPTANCE_LINES.append(line)

        return wrapper

    return deco


# ---------------------------------------------------------------------------
# shared random-instance builder
# ---------------------------------------------------------------------------

KINDS = ("box", "budgeted", "one_disruption", "partition", "mixed", "scenarios")


def _random_delta(rng, n: int, kind: str, max_gamma: int | None = None):
    def gam(hi):
        hi = min(hi, max_gamma) if max_gamma else hi
        return int(rng.integers(1, max(hi, 1) + 1))

    dhat = tuple(rng.integers(0, 4, n).astype(float))
    if kind == "box":
        return asd.Box(dhat)
    if kind == "budgeted":
        return asd.Budgeted(dhat, gam(n))
    if kind == "one_disruption":
        return asd.OneDisruption(float(rng.integers(1, 4)))
    if kind == "partition":
        cut = int(rng.integers(1, n)) if n > 1 else 1
        parts = (tuple(range(1, cut + 1)), tuple(range(cut + 1, n + 1)))
        parts = tuple(p for p in parts if p)
        gammas = tuple(gam(len(p)) for p in parts)
        return asd.PartitionBudgeted(dhat, parts, gammas)
    if kind == "mixed":
        comps = tuple(
            asd.Budgeted(tuple(rng.integers(0, 4, n).astype(float)), gam(n))
            for _ in range(2)
        )
        return asd.MixedBudgeted(comps)
    if kind == "scenarios":
        return asd.Scenarios(
            tuple(
                tuple(rng.integers(0, 4, n).astype(float))
                for _ in range(int(rng.integers(1, 4)))
            )
        )
    raise ValueError(kind)


def _random_instance(rng, n: int, kind: str, max_gamma: int | None = None):
    g = asd.PrecedenceGraph(n, random_dag(rng, n), rng.integers(1, 5, n).astype(float))
    delta = _random_delta(rng, n, kind, max_gamma)
    base = asd.single_source_longest(g, 0, g.p)[g.t]
    worst = float(asd.worst_case_longest_paths(g, delta).values[0, g.t])
    deadline = float(base + rng.uniform(0.0, worst - base + 2.0))
    return asd.Instance(
        graph=g,
        delta=delta,
        deadline=deadline,
        weights=rng.integers(1, 6, n).astype(float),
        meta={},
    )


# ---------------------------------------------------------------------------
# criterion 1 — worked-example goldens
# ---------------------------------------------------------------------------


@criterion(1)
def test_criterion_01_worked_examples():
    t0 = time.perf_counter()
    tol = 1e-9
    g = five_job_graph()
    x = np.array([0.0, 0.0, 1.0, 1.0, 3.0, 2.5, 4.5])

    ld_box = asd.worst_case_longest_paths(g, asd.Box(FIVE_DHAT))
    assert asd.is_x_anchored(g, ld_box, x, [1, 2, 4], tol=tol)

    ld_bud = asd.worst_case_longest_paths(g, asd.Budgeted(FIVE_DHAT, 1))
    assert asd.is_x_anchored(g, ld_bud, x, [1, 2, 4, 5], tol=tol)

    chain = asd.Instance(
        graph=chain3_graph(),
        delta=asd.Budgeted((1.0, 1.0, 1.0), 1),
        deadline=3.0,
        weights=np.ones(3),
        meta={},
    )
    l0, ld = _matrices(chain, None, None)
    cg = chain.graph
    assert abs(l0.values[0, 3] - 2.0) <= tol
    assert abs(ld.values[0, 3] - 3.0) <= tol
    assert abs(l0.values[3, cg.t] - 1.0) <= tol
    full = np.zeros(cg.n + 2)
    full[1 : cg.n + 1] = (1.0, 1.0, 1.0)
    dist_dev = asd.single_source_longest(cg, 0, cg.p + full)
    nom = asd.single_source_longest(cg, 0, cg.p)
    d_vec = [dist_dev[j] - nom[j] for j in cg.jobs]
    assert np.allclose(d_vec, [0.0, 1.0, 2.0], atol=tol)

    h_star = {1: 1.0, 2: 0.0, 3: 0.5}
    # h* is a projection point of the layered relaxation ...
    lay = asd.build_lay(chain)
    for j, val in h_star.items():
        lay.add_row({f"h_{j}": 1.0}, "=", val)
    assert solve_lp(lay).status == "Optimal"
    assert asd.separate_chain(chain, l0, ld, h_star, "lay") is None
    # ... but the source-job 3-sink chain cuts it off by exactly one half
    found = asd.separate_chain(chain, l0, ld, h_star, "dom")
    assert found is not None
    chain_nodes, violation = found
    assert chain_nodes == (0, 3, cg.t)
    assert abs(violation - 0.5) <= tol

    assert time.perf_counter() - t0 < 1.0


# ---------------------------------------------------------------------------
# criterion 2 — formulations equal exhaustive search, all variants
# ---------------------------------------------------------------------------


@criterion(2)
def test_criterion_02_formulations_match_brute_force():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20_02)
    for kind in KINDS:
        for _ in range(50):
            n = int(rng.integers(6, 13))
            inst = _random_instance(rng, n, kind)
            ref = asd.brute_force_optimum(inst).objective
            ref_int = round(ref)
            assert abs(ref - ref_int) < 1e-9
            methods = ["std", "dom"]
            if isinstance(inst.delta, asd.Budgeted):
                methods.append("lay")
            for which in methods:
                res, _ = asd.solve_formulation(inst, which)
                assert res.status == "Optimal", (kind, which, res.status)
                assert round(res.value) == ref_int and abs(
                    res.value - ref_int
                ) < 1e-6, (kind, which, res.value, ref)
    assert time.perf_counter() - t0 < 120.0


# ---------------------------------------------------------------------------
# criterion 3 — worst-case path lengths vs deviation-point enumeration
# ---------------------------------------------------------------------------


def _bulk_worst(g, points):
    """Longest paths under every deviation point, by plain DAG sweeps."""
    P = len(points)
    dev = np.zeros((P, g.n + 2))
    if g.n:
        dev[:, 1 : g.n + 1] = np.asarray(points)
    topo = asd.topological_order(g)
    neg = -np.inf
    best = {}
    for i in range(g.n + 2):
        dist = np.full((P, g.n + 2), neg)
        dist[:, i] = 0.0
        for v in topo:
            if np.all(dist[:, v] == neg):
                continue
            for a, b in g.arcs:
                if a == v:
                    w = g.p[a] + dev[:, a]
                    np.maximum(dist[:, b], dist[:, v] + w, out=dist[:, b])
        for j in range(g.n + 2):
            if i != j and np.any(dist[:, j] > neg):
                best[(i, j)] = float(np.max(dist[:, j]))
    return best


@criterion(3)
def test_criterion_03_worst_case_lengths():
    rng = np.random.default_rng(20_03)
    for k in range(200):
        n = int(rng.integers(2, 9))
        kind = KINDS[k % len(KINDS)]
        inst = _random_instance(rng, n, kind, max_gamma=3)
        g = inst.graph
        delta = asd.normalize(inst.delta, n)
        oracle = _bulk_worst(g, deviation_points(delta, n))
        ld = asd.worst_case_longest_paths(g, delta)
        for i in range(g.n + 2):
            for j in range(g.n + 2):
                if ld.reach[i, j]:
                    assert (i, j) in oracle
                    assert abs(float(ld.values[i, j]) - oracle[(i, j)]) <= 1e-9
                else:
                    assert (i, j) not in oracle


# ---------------------------------------------------------------------------
# criterion 4 — the dominant baseline separates every anchored head
# ---------------------------------------------------------------------------


@criterion(4)
def test_criterion_04_dominant_schedule_property():
    rng = np.random.default_rng(20_04)
    for k in range(500):
        n = int(rng.integers(2, 11))
        inst = _random_instance(rng, n, KINDS[k % len(KINDS)])
        g = inst.graph
        ld = asd.worst_case_longest_paths(g, inst.delta)
        anchored = [j for j in g.jobs if rng.random() < 0.5]
        z = asd.dominant_schedule(g, ld, anchored).start
        for j in anchored:
            for i in [0] + list(g.jobs):
                if i != j and ld.reach[i, j]:
                    assert z[j] - z[i] >= float(ld.values[i, j]) - 1e-9


# ---------------------------------------------------------------------------
# criterion 5 — greatest-point algorithm vs exhaustive search
# ---------------------------------------------------------------------------


@criterion(5)
def test_criterion_05_box_algorithm():
    rng = np.random.default_rng(20_05)
    for _ in range(100):
        n = int(rng.integers(2, 13))
        inst = _random_instance(rng, n, "box")
        sol = asd.solve_box(inst)
        assert sol.objective == pytest.approx(
            asd.brute_force_optimum(inst).objective
        )
    worked = asd.Instance(
        graph=five_job_graph(),
        delta=asd.Box(FIVE_DHAT),
        deadline=4.5,
        weights=np.ones(5),
        meta={},
    )
    assert asd.solve_box(worked).objective == pytest.approx(4.0)


# ---------------------------------------------------------------------------
# criterion 6 — integral vertices of the zero-processing-time relaxation
# ---------------------------------------------------------------------------


@criterion(6)
def test_criterion_06_unitary_lp_integrality():
    rng = np.random.default_rng(20_06)
    for _ in range(30):
        n = int(rng.integers(5, 31))
        g = asd.PrecedenceGraph(n, random_dag(rng, n), np.zeros(n))
        inst = asd.Instance(
            graph=g,
            delta=asd.OneDisruption(1.0),
            deadline=float(rng.integers(0, n + 1)),
            weights=np.ones(n),
            meta={},
        )
        res = solve_lp(asd.build_dom(inst))
        assert res.status == "Optimal"
        for name, val in res.x.items():
            assert abs(val - round(val)) <= 1e-6, (name, val)
        asd.solve_u_anchrob(inst)  # NonIntegralVertex must never fire


# ---------------------------------------------------------------------------
# criterion 7 — affine reduction on critical series-parallel instances
# ---------------------------------------------------------------------------


@criterion(7)
def test_criterion_07_critical_reduction():
    rng = np.random.default_rng(20_07)
    for seed in range(30):
        n = int(rng.integers(4, 13))
        skeleton = asd.gen_sp(n, seed)
        p = asd.gen_processing("pQCri", skeleton, seed)
        g = asd.PrecedenceGraph(n, skeleton.arcs, p)
        assert asd.is_critical(g)
        d0 = float(rng.integers(1, 4))
        base = asd.single_source_longest(g, 0, g.p)[g.t]
        inst = asd.Instance(
            graph=g,
            delta=asd.OneDisruption(d0),
            deadline=float(base + rng.uniform(0.0, 4.0 * d0)),
            weights=np.ones(n),
            meta={},
        )
        sol = asd.solve_critical_one_disruption(inst)
        res, _ = asd.solve_formulation(inst, "dom")
        assert res.status == "Optimal"
        assert sol.objective == pytest.approx(res.value, abs=1e-9)


# ---------------------------------------------------------------------------
# criterion 8 — the quasi-critical generator is critical on SP graphs
# ---------------------------------------------------------------------------


@criterion(8)
def test_criterion_08_sp_quasicritical_is_critical():
    for seed in range(100):
        n = 4 + (seed % 17)
        skeleton = asd.gen_sp(n, seed)
        p = asd.gen_processing("pQCri", skeleton, seed)
        assert asd.is_critical(asd.PrecedenceGraph(n, skeleton.arcs, p)), seed


# ---------------------------------------------------------------------------
# criterion 9 — relaxation-strength ordering
# ---------------------------------------------------------------------------


@criterion(9)
def test_criterion_09_relaxation_ordering():
    rng = np.random.default_rng(20_09)
    pool = []
    for k in range(60):
        n = int(rng.integers(3, 11))
        pool.append(_random_instance(rng, n, KINDS[k % len(KINDS)]))
    # generated single-disruption classes (uniform deviations, budget one)
    # guarantee the layered comparison applies to a healthy share of the pool
    for seed in range(5):
        for label in ("SP_pQCri_dUnif_G1", "ER_pZero_dUnif_G1"):
            pool.append(asd.make_instance(label, 14, seed))
    pool.append(asd.make_instance("SP_pQCri_dUnif_G1", 25, 5))
    pool.append(asd.make_instance("ER_pZero_dUnif_G1", 25, 5))
    pool.append(
        asd.Instance(
            graph=five_job_graph(),
            delta=asd.Budgeted(FIVE_DHAT, 1),
            deadline=4.5,
            weights=np.ones(5),
            meta={},
        )
    )
    lay_checked = 0
    for inst in pool:
        dom = asd.lp_bound(inst, "dom")
        std = asd.lp_bound(inst, "std")
        assert dom <= std + 1e-6, (dom, std, inst.meta)
        if isinstance(inst.delta, asd.Budgeted) and asd.dom_lay_premise(inst):
            lay = asd.lp_bound(inst, "lay")
            assert dom <= lay + 1e-6, (dom, lay, inst.meta)
            lay_checked += 1
    assert lay_checked >= 10  # the layered comparison was really exercised


# ---------------------------------------------------------------------------
# criterion 10 — benchmark-scale trend check at n = 40
# ---------------------------------------------------------------------------


@criterion(10)
def test_criterion_10_benchmark_trends():
    classes = (
        "ER_pZero_dUnif_G1",
        "ER_pQCri_dUnif_G1",
        "SP_pZero_dUnif_G1",
        "SP_pQCri_dUnif_G1",
    )
    zero_gap_classes = {
        "ER_pZero_dUnif_G1",
        "SP_pZero_dUnif_G1",
        "SP_pQCri_dUnif_G1",
    }
    for label in classes:
        dom_gaps, lay_gaps = [], []
        for seed in range(10):
            inst = asd.make_instance(label, 40, seed)
            work = preprocess_deadline(inst)
            t0 = time.perf_counter()
            res, _ = asd.solve_formulation(work, "dom", SolveParams(time_limit=60.0))
            assert time.perf_counter() - t0 <= 60.0
            assert res.status == "Optimal", (label, seed, res.status)  # 10/10
            opt = res.value
            dom_gaps.append((asd.lp_bound(work, "dom") - opt) / opt)
            lay_gaps.append((asd.lp_bound(work, "lay") - opt) / opt)
        mean_dom = float(np.mean(dom_gaps))
        mean_lay = float(np.mean(lay_gaps))
        if label in zero_gap_classes:
            assert abs(mean_dom) <= 1e-6, (label, mean_dom)
        assert mean_lay >= mean_dom - 1e-9, (label, mean_lay, mean_dom)
