"""Compare the numba and pure-numpy kernel backends.

The backend is chosen at import time from ``ANCHORSCHED_BACKEND``, so each
measurement runs in a fresh subprocess with the flag set.  Workloads cover
every accelerated kernel family through public entry points:

* nominal longest paths (box worst case) — DAG sweeps,
* budgeted worst case — the per-source budget recursion,
* partitioned worst case — the mixed-radix budget recursion,
* relaxation bound — the dense simplex phases,
* exhaustive optimum — the subset makespan scan.

Run ``python3 benchmarks/bench_kernels.py`` from the repository root.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

WORKLOADS = (
    ("box worst case n=240", "box"),
    ("budgeted worst case n=240", "budgeted"),
    ("partition worst case n=240", "partition"),
    ("relaxation bound n=40", "lp"),
    ("exhaustive optimum n=17", "brute"),
)


def _build(tag: str):
    import anchorsched as asd

    if tag == "box":
        inst = asd.make_instance("ER_pRand_dRand_G2", 240, 0)
        delta = asd.Box(inst.delta.dhat)
        return lambda: asd.worst_case_longest_paths(inst.graph, delta)
    if tag == "budgeted":
        inst = asd.make_instance("ER_pRand_dRand_G2", 240, 0)
        return lambda: asd.worst_case_longest_paths(inst.graph, inst.delta)
    if tag == "partition":
        inst = asd.make_instance("ER_pRand_dRand_Partition", 240, 0)
        return lambda: asd.worst_case_longest_paths(inst.graph, inst.delta)
    if tag == "lp":
        inst = asd.make_instance("ER_pQCri_dUnif_G1", 40, 0)
        return lambda: asd.lp_bound(inst, "dom")
    if tag == "brute":
        inst = asd.make_instance("ER_pRand_dRand_G2", 17, 0)
        return lambda: asd.brute_force_optimum(inst)
    raise ValueError(tag)


def run_worker(repeat: int) -> dict:
    import anchorsched as asd

    out = {"backend": asd.BACKEND, "times": {}}
    for label, tag in WORKLOADS:
        fn = _build(tag)
        fn()  # warm pass: JIT compilation and caches stay out of the timing
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out["times"][label] = best
    return out


def _measure(backend: str, repeat: int) -> dict | None:
    env = dict(os.environ, ANCHORSCHED_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker", "--repeat", str(repeat)],
        env=env,
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        sys.stderr.write(f"[{backend}] worker failed:\n{proc.stderr}\n")
        return None
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3, help="best-of-N timing")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)

    if args.worker:
        json.dump(run_worker(args.repeat), sys.stdout)
        return 0

    results = {b: _measure(b, args.repeat) for b in ("numba", "numpy")}
    cols = [b for b in ("numba", "numpy") if results[b] is not None]
    if not cols:
        return 1
    for b in cols:
        got = results[b]["backend"]
        if got != b:
            sys.stderr.write(f"warning: requested {b} but backend reports {got}\n")

    width = max(len(lbl) for lbl, _ in WORKLOADS)
    print(f"kernel backends, best of {args.repeat} (seconds, lower is better)")
    header = "workload".ljust(width) + "".join(f"  {b:>10}" for b in cols)
    if len(cols) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    for label, _ in WORKLOADS:
        row = label.ljust(width)
        for b in cols:
            row += f"  {results[b]['times'][label]:>10.4f}"
        if len(cols) == 2:
            ratio = results["numpy"]["times"][label] / results["numba"]["times"][label]
            row += f"  {ratio:>7.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
