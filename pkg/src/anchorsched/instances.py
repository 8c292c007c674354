"""Instance generators, class labels, and the JSON file format.

Instance classes are labelled ``F1_F2_F3_F4``:

* F1 — graph family: ``ER`` (random order with arc probability 10/n) or
  ``SP`` (random two-terminal series-parallel composition).
* F2 — processing times: ``pZero`` (all zero), ``pRand`` (integers in
  [5, 20]), ``pQCri`` (pRand lifted until the graph is quasi-critical).
* F3 — deviations: ``dRand`` (integers in [1, p_i/2]), ``dUnif`` (one dRand
  value broadcast to all jobs).
* F4 — uncertainty set: ``G1``/``G2``/``G3`` (budgeted with that budget),
  ``Partition`` (two groups, small deviations with budget 10 and full
  deviations with budget 1), ``Mixed`` (union of budget 1 at full size and
  budget 10 at one-fifth size).

Because pZero has no room for deviations of its own, its dRand values are
copied from the companion pQCri instance of the same seed; the generators
share their base draws stream-wise so companions line up.  All randomness
comes from counter-based Philox streams keyed by (seed, purpose), so files
regenerate byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .anchored import Instance
from .errors import MissingCompanionDeviation, ParseError
from .graph import S, PrecedenceGraph, single_source_longest, _longest_to_sink
from .uncertainty import (
    Box,
    Budgeted,
    MixedBudgeted,
    OneDisruption,
    PartitionBudgeted,
    Scenarios,
    UncertaintySet,
)

GRAPH_FAMILIES = ("ER", "SP")
PROCESSING_CLASSES = ("pZero", "pRand", "pQCri")
DEVIATION_CLASSES = ("dRand", "dUnif")
UNCERTAINTY_FIELDS = ("G1", "G2", "G3", "Partition", "Mixed")

#: stream purposes for the counter-based generator
_PURPOSE_GRAPH = 0
_PURPOSE_PROCESSING = 1
_PURPOSE_DEVIATION = 2
_PURPOSE_UNCERTAINTY = 3

_PRNG_NAME = "philox"


def _rng(seed: int, purpose: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(purpose,))
    return np.random.Generator(np.random.Philox(ss))


# ---------------------------------------------------------------------------
# class labels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InstanceClassLabel:
    """Parsed four-field class label, e.g. ``SP_pQCri_dUnif_G1``."""

    graph: str
    processing: str
    deviation: str
    uncertainty: str

    def __str__(self) -> str:
        return f"{self.graph}_{self.processing}_{self.deviation}_{self.uncertainty}"


def parse_label(text: str) -> InstanceClassLabel:
    """Split and validate a four-field class label; raises ParseError."""
    parts = str(text).split("_")
    if len(parts) != 4:
        raise ParseError(
            f"label {text!r} must have four underscore-separated fields"
        )
    f1, f2, f3, f4 = parts
    if f1 not in GRAPH_FAMILIES:
        raise ParseError(f"unknown graph family {f1!r} (expected ER or SP)")
    if f2 not in PROCESSING_CLASSES:
        raise ParseError(
            f"unknown processing class {f2!r} (expected pZero, pRand or pQCri)"
        )
    if f3 not in DEVIATION_CLASSES:
        raise ParseError(
            f"unknown deviation class {f3!r} (expected dRand or dUnif)"
        )
    if f4 not in UNCERTAINTY_FIELDS:
        raise ParseError(
            f"unknown uncertainty field {f4!r} "
            "(expected G1, G2, G3, Partition or Mixed)"
        )
    return InstanceClassLabel(f1, f2, f3, f4)


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


def gen_er(n: int, seed: int) -> PrecedenceGraph:
    """Random-order graph: arc (i, j) with probability 10/n along a shuffle.

    A random permutation of the jobs fixes a linear order; each forward pair
    becomes an arc independently with probability min(1, 10/n).  Jobs without
    a job predecessor hang off the source, jobs without a job successor feed
    the sink.  Processing times are zeros, to be filled in separately.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed, _PURPOSE_GRAPH)
    perm = rng.permutation(np.arange(1, n + 1))
    pr = min(1.0, 10.0 / n)
    u = rng.random((n, n))
    arcs: list[tuple[int, int]] = []
    has_pred = np.zeros(n + 2, dtype=bool)
    has_succ = np.zeros(n + 2, dtype=bool)
    for a in range(n):
        for b in range(a + 1, n):
            if u[a, b] < pr:
                i, j = int(perm[a]), int(perm[b])
                arcs.append((i, j))
                has_pred[j] = True
                has_succ[i] = True
    for j in range(1, n + 1):
        if not has_pred[j]:
            arcs.append((S, j))
        if not has_succ[j]:
            arcs.append((j, n + 1))
    return PrecedenceGraph(n, arcs, np.zeros(n))


def gen_sp(n: int, seed: int) -> PrecedenceGraph:
    """Random series-parallel graph with exactly n jobs.

    Recursive two-terminal composition: a zero-job piece is the bare
    terminal-to-terminal arc; a series step merges two pieces at a fresh
    junction job (consuming one job of the budget); a parallel step glues two
    pieces terminal-to-terminal and requires at least two jobs on each side,
    so it is available only from four jobs up (two jobs always give a chain).
    Series or parallel is chosen with probability one half when both apply.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed, _PURPOSE_GRAPH)
    arcs: list[tuple[int, int]] = []
    counter = iter(range(1, n + 1))

    def build(b: int, src: int, snk: int) -> None:
        if b == 0:
            arcs.append((src, snk))
            return
        if b >= 4 and rng.random() < 0.5:
            k = int(rng.integers(2, b - 1))
            build(k, src, snk)
            build(b - k, src, snk)
        else:
            k = int(rng.integers(0, b))
            mid = next(counter)
            build(k, src, mid)
            build(b - 1 - k, mid, snk)

    build(n, S, n + 1)
    return PrecedenceGraph(n, arcs, np.zeros(n))


def gen_graph(family: str, n: int, seed: int) -> PrecedenceGraph:
    if family == "ER":
        return gen_er(n, seed)
    if family == "SP":
        return gen_sp(n, seed)
    raise ParseError(f"unknown graph family {family!r}")


# ---------------------------------------------------------------------------
# processing times and deviations
# ---------------------------------------------------------------------------


def gen_processing(klass: str, g: PrecedenceGraph, seed: int) -> np.ndarray:
    """Processing-time vector (length n) for one of pZero, pRand, pQCri.

    pQCri draws the pRand vector from the same stream and then repeatedly
    raises a uniformly chosen positive-slack job by exactly its slack; each
    step makes that job tight without disturbing jobs already tight, so at
    most n steps reach quasi-criticality with the longest path unchanged.
    """
    n = g.n
    if klass == "pZero":
        return np.zeros(n)
    if klass not in ("pRand", "pQCri"):
        raise ParseError(f"unknown processing class {klass!r}")
    rng = _rng(seed, _PURPOSE_PROCESSING)
    p = rng.integers(5, 21, size=n).astype(float)
    if klass == "pRand":
        return p
    full = np.zeros(n + 2)
    while True:
        full[1 : n + 1] = p
        from_s = single_source_longest(g, S, full)
        to_t = _longest_to_sink(g, full)
        slack = from_s[g.t] - (from_s[1 : n + 1] + to_t[1 : n + 1])
        loose = np.flatnonzero(slack > 1e-9)
        if loose.size == 0:
            return p
        pick = int(loose[rng.integers(loose.size)])
        p[pick] += slack[pick]


def gen_deviation(
    klass: str,
    p: np.ndarray,
    seed: int,
    pqcri_dev: np.ndarray | None = None,
) -> np.ndarray:
    """Deviation vector for dRand or dUnif given the processing times.

    With all-zero processing times there is no range to draw from, so the
    values are taken from the companion quasi-critical instance via
    ``pqcri_dev`` (MissingCompanionDeviation if absent).  dUnif draws the
    dRand vector first and broadcasts one uniformly chosen entry.
    """
    p = np.asarray(p, dtype=float)
    n = p.size
    if klass not in DEVIATION_CLASSES:
        raise ParseError(f"unknown deviation class {klass!r}")
    rng = _rng(seed, _PURPOSE_DEVIATION)
    if np.all(p <= 0):
        if pqcri_dev is None:
            raise MissingCompanionDeviation(
                "zero processing times need the companion's deviation values"
            )
        base = np.asarray(pqcri_dev, dtype=float).copy()
        if base.shape != (n,):
            raise ValueError("companion deviation has the wrong length")
    else:
        if np.any((p > 0) & (p < 2)):
            raise ValueError("deviation range [1, p/2] needs p_i >= 2")
        half = np.floor(p / 2).astype(int)
        base = np.array(
            [float(rng.integers(1, h + 1)) if h >= 1 else 0.0 for h in half]
        )
    if klass == "dRand":
        return base
    pick = int(rng.integers(n))
    return np.full(n, base[pick])


# ---------------------------------------------------------------------------
# uncertainty sets and deadlines
# ---------------------------------------------------------------------------


def build_uncertainty(field: str, dhat: np.ndarray, seed: int) -> UncertaintySet:
    """Uncertainty set for field G1/G2/G3/Partition/Mixed over deviations dhat."""
    dhat = np.asarray(dhat, dtype=float)
    n = dhat.size
    if field in ("G1", "G2", "G3"):
        gamma = int(field[1])
        return Budgeted(tuple(dhat), min(gamma, n))
    if field == "Mixed":
        return MixedBudgeted(
            (
                Budgeted(tuple(dhat), 1),
                Budgeted(tuple(np.floor(0.2 * dhat)), min(10, n)),
            )
        )
    if field == "Partition":
        rng = _rng(seed, _PURPOSE_UNCERTAINTY)
        small = rng.random(n) < 0.75
        dev = np.where(small, np.floor(0.1 * dhat), dhat)
        parts: list[tuple[int, ...]] = []
        gammas: list[int] = []
        group_small = tuple(int(j) for j in range(1, n + 1) if small[j - 1])
        group_full = tuple(int(j) for j in range(1, n + 1) if not small[j - 1])
        if group_small:
            parts.append(group_small)
            gammas.append(min(10, len(group_small)))
        if group_full:
            parts.append(group_full)
            gammas.append(1)
        if len(parts) == 1:
            return Budgeted(tuple(dev), gammas[0])
        return PartitionBudgeted(tuple(dev), tuple(parts), tuple(gammas))
    raise ParseError(f"unknown uncertainty field {field!r}")


def halfway_deadline(g: PrecedenceGraph, dhat: np.ndarray) -> float:
    """Deadline halfway between the nominal and fully deviated makespans."""
    dev = np.zeros(g.n + 2)
    dev[1 : g.n + 1] = np.asarray(dhat, dtype=float)
    nominal = float(single_source_longest(g, S, g.p)[g.t])
    deviated = float(single_source_longest(g, S, g.p + dev)[g.t])
    return 0.5 * (nominal + deviated)


# ---------------------------------------------------------------------------
# full instances
# ---------------------------------------------------------------------------


def make_instance(label: str | InstanceClassLabel, n: int, seed: int) -> Instance:
    """Generate the instance of one class label at a given size and seed."""
    lab = parse_label(label) if isinstance(label, str) else label
    skeleton = gen_graph(lab.graph, n, seed)
    if lab.processing == "pZero":
        p = np.zeros(n)
        companion = gen_processing("pQCri", skeleton, seed)
        base_dev = gen_deviation("dRand", companion, seed)
        dhat = gen_deviation(lab.deviation, p, seed, pqcri_dev=base_dev)
    else:
        p = gen_processing(lab.processing, skeleton, seed)
        dhat = gen_deviation(lab.deviation, p, seed)
    g = PrecedenceGraph(n, skeleton.arcs, p)
    delta = build_uncertainty(lab.uncertainty, dhat, seed)
    deadline = halfway_deadline(g, dhat)
    meta = {"label": str(lab), "seed": int(seed), "prng": _PRNG_NAME}
    if lab.graph == "ER":
        meta["notes"] = "arc pairs sampled over a uniformly random relabeling of the jobs"
    return Instance(
        graph=g,
        delta=delta,
        deadline=deadline,
        weights=np.ones(n),
        meta=meta,
    )


def instance_filename(label: str | InstanceClassLabel, n: int, seed: int) -> str:
    return f"{label}_n{n}_s{seed}.json"


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _uncertainty_to_dict(delta: UncertaintySet) -> dict:
    if isinstance(delta, Box):
        return {"type": "box", "dhat": [float(v) for v in delta.dhat]}
    if isinstance(delta, Budgeted):
        return {
            "type": "budgeted",
            "dhat": [float(v) for v in delta.dhat],
            "gamma": int(delta.gamma),
        }
    if isinstance(delta, OneDisruption):
        return {"type": "one_disruption", "dhat0": float(delta.dhat0)}
    if isinstance(delta, PartitionBudgeted):
        return {
            "type": "partition",
            "dhat": [float(v) for v in delta.dhat],
            "parts": [[int(j) for j in part] for part in delta.parts],
            "gammas": [int(gv) for gv in delta.gammas],
        }
    if isinstance(delta, MixedBudgeted):
        return {
            "type": "mixed",
            "components": [
                {"dhat": [float(v) for v in c.dhat], "gamma": int(c.gamma)}
                for c in delta.components
            ],
        }
    if isinstance(delta, Scenarios):
        return {
            "type": "scenarios",
            "deltas": [[float(v) for v in row] for row in delta.deltas],
        }
    raise TypeError(f"unhandled uncertainty type {type(delta).__name__}")


def instance_to_dict(inst: Instance) -> dict:
    g = inst.graph
    return {
        "n": int(g.n),
        "arcs": [[int(i), int(j)] for i, j in g.arcs],
        "p": [float(v) for v in g.p[1 : g.n + 1]],
        "weights": [float(v) for v in inst.weights],
        "deadline": float(inst.deadline),
        "uncertainty": _uncertainty_to_dict(inst.delta),
        "meta": dict(inst.meta),
    }


def write_instance(inst: Instance, path: str | Path) -> Path:
    """Serialize an instance to JSON (stable key order, trailing newline)."""
    path = Path(path)
    path.write_text(
        json.dumps(instance_to_dict(inst), indent=2, sort_keys=True) + "\n"
    )
    return path


def _require_keys(obj: dict, required: set[str], optional: set[str], where: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{where} must be a JSON object")
    keys = set(obj)
    missing = required - keys
    if missing:
        raise ParseError(f"{where} is missing fields: {sorted(missing)}")
    unknown = keys - required - optional
    if unknown:
        raise ParseError(f"{where} has unknown fields: {sorted(unknown)}")


def _number_list(obj, length: int | None, where: str) -> list[float]:
    if not isinstance(obj, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj
    ):
        raise ParseError(f"{where} must be a list of numbers")
    if length is not None and len(obj) != length:
        raise ParseError(f"{where} must have length {length}, got {len(obj)}")
    return [float(v) for v in obj]


def _parse_uncertainty(obj: dict, n: int) -> UncertaintySet:
    _require_keys(obj, {"type"}, {"dhat", "gamma", "dhat0", "parts", "gammas",
                                  "components", "deltas"}, "uncertainty")
    kind = obj["type"]
    try:
        if kind == "box":
            _require_keys(obj, {"type", "dhat"}, set(), "uncertainty")
            return Box(tuple(_number_list(obj["dhat"], n, "uncertainty.dhat")))
        if kind == "budgeted":
            _require_keys(obj, {"type", "dhat", "gamma"}, set(), "uncertainty")
            if not isinstance(obj["gamma"], int) or isinstance(obj["gamma"], bool):
                raise ParseError("uncertainty.gamma must be an integer")
            return Budgeted(
                tuple(_number_list(obj["dhat"], n, "uncertainty.dhat")),
                obj["gamma"],
            )
        if kind == "one_disruption":
            _require_keys(obj, {"type", "dhat0"}, set(), "uncertainty")
            if not isinstance(obj["dhat0"], (int, float)) or isinstance(
                obj["dhat0"], bool
            ):
                raise ParseError("uncertainty.dhat0 must be a number")
            return OneDisruption(float(obj["dhat0"]))
        if kind == "partition":
            _require_keys(
                obj, {"type", "dhat", "parts", "gammas"}, set(), "uncertainty"
            )
            if not isinstance(obj["parts"], list) or not isinstance(
                obj["gammas"], list
            ):
                raise ParseError("uncertainty.parts and .gammas must be lists")
            parts = tuple(
                tuple(int(j) for j in _number_list(part, None, "uncertainty.parts"))
                for part in obj["parts"]
            )
            gammas = tuple(
                int(v) for v in _number_list(obj["gammas"], None, "uncertainty.gammas")
            )
            return PartitionBudgeted(
                tuple(_number_list(obj["dhat"], n, "uncertainty.dhat")),
                parts,
                gammas,
            )
        if kind == "mixed":
            _require_keys(obj, {"type", "components"}, set(), "uncertainty")
            if not isinstance(obj["components"], list) or not obj["components"]:
                raise ParseError("uncertainty.components must be a nonempty list")
            comps = []
            for k, comp in enumerate(obj["components"]):
                _require_keys(
                    comp, {"dhat", "gamma"}, set(), f"uncertainty.components[{k}]"
                )
                if not isinstance(comp["gamma"], int) or isinstance(
                    comp["gamma"], bool
                ):
                    raise ParseError(
                        f"uncertainty.components[{k}].gamma must be an integer"
                    )
                comps.append(
                    Budgeted(
                        tuple(
                            _number_list(
                                comp["dhat"], n, f"uncertainty.components[{k}].dhat"
                            )
                        ),
                        comp["gamma"],
                    )
                )
            return MixedBudgeted(tuple(comps))
        if kind == "scenarios":
            _require_keys(obj, {"type", "deltas"}, set(), "uncertainty")
            if not isinstance(obj["deltas"], list) or not obj["deltas"]:
                raise ParseError("uncertainty.deltas must be a nonempty list")
            rows = tuple(
                tuple(_number_list(row, n, f"uncertainty.deltas[{k}]"))
                for k, row in enumerate(obj["deltas"])
            )
            return Scenarios(rows)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"invalid uncertainty set: {exc}") from exc
    raise ParseError(f"unknown uncertainty type {kind!r}")


def instance_from_dict(data: dict) -> Instance:
    _require_keys(
        data,
        {"n", "arcs", "p", "weights", "deadline", "uncertainty", "meta"},
        set(),
        "instance",
    )
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ParseError("n must be a nonnegative integer")
    if not isinstance(data["arcs"], list):
        raise ParseError("arcs must be a list of [tail, head] pairs")
    arcs = []
    for k, arc in enumerate(data["arcs"]):
        if (
            not isinstance(arc, list)
            or len(arc) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in arc)
        ):
            raise ParseError(f"arcs[{k}] must be a pair of integers")
        arcs.append((arc[0], arc[1]))
    p = _number_list(data["p"], n, "p")
    weights = _number_list(data["weights"], n, "weights")
    if not isinstance(data["deadline"], (int, float)) or isinstance(
        data["deadline"], bool
    ):
        raise ParseError("deadline must be a number")
    meta = data["meta"]
    _require_keys(meta, {"label", "seed", "prng"}, {"notes"}, "meta")
    delta = _parse_uncertainty(data["uncertainty"], n)
    try:
        graph = PrecedenceGraph(n, arcs, p)
        return Instance(
            graph=graph,
            delta=delta,
            deadline=float(data["deadline"]),
            weights=np.asarray(weights),
            meta=dict(meta),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def read_instance(path: str | Path) -> Instance:
    """Parse an instance file, rejecting unknown fields and bad values."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        return instance_from_dict(data)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc
