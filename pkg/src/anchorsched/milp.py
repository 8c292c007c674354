"""Linear-model container, dense-simplex LP solver, and binary branch and bound.

The model is a plain container: variables with finite bounds (optionally
binary), rows ``coefs {<=,>=,=} rhs``, and one linear objective.  The LP
solver is a two-phase dense-tableau simplex: variable lower bounds are shifted
to zero, finite upper bounds are materialized as rows, fixed variables are
substituted out, and phase 1 minimizes artificial variables of >= and = rows.
Pivoting uses Dantzig's rule, switching to Bland's rule once the count of
degenerate pivots passes a threshold; a hard pivot limit raises
NumericalFailure.  The MIP solver is best-bound branch and bound on binary
variables with most-fractional branching, an LP-rounding initial incumbent,
and an optional cut callback that may reject integral candidates by adding
globally valid rows.

Models can be written to and re-read from the textual LP format (sections
Maximize/Subject To/Bounds/Binary/End).
"""

from __future__ import annotations

import heapq
import re
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import NumericalFailure, ParseError

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

#: absolute guard used when normalizing gaps
GAP_FLOOR = 1e-9


@dataclass(frozen=True)
class Variable:
    name: str
    lb: float
    ub: float
    binary: bool


@dataclass(frozen=True)
class Row:
    name: str
    coefs: dict[str, float]
    sense: str
    rhs: float


@dataclass
class SolveParams:
    """Solver knobs; defaults match the package-wide testing setup."""

    time_limit: float = 300.0
    gap_tol: float = 1e-6
    feas_tol: float = 1e-7
    pivot_tol: float = 1e-9
    bland_after: int = 1000
    max_pivots: int = 200_000
    int_tol: float = 1e-6


@dataclass
class SolveResult:
    """Outcome of an LP or MIP solve.

    ``x`` is the incumbent (present iff a feasible point was found), ``value``
    its objective, ``bound`` the dual bound, and
    ``gap = |bound - value| / max(|value|, 1e-9)``.
    """

    status: str
    x: dict[str, float] | None
    value: float
    bound: float
    gap: float
    nodes: int
    runtime: float
    iterations: int = 0

    @property
    def incumbent(self) -> dict[str, float] | None:
        return self.x


class MipModel:
    """Mutable linear model with finite-bound variables and binary flags."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[Variable] = []
        self.rows: list[Row] = []
        self.objective: dict[str, float] = {}
        self.maximize: bool = True
        self._index: dict[str, int] = {}
        self._dense_cache = None

    # -- construction -------------------------------------------------------

    def add_var(
        self, name: str, lb: float = 0.0, ub: float = 1.0, binary: bool = False
    ) -> str:
        if not _NAME_RE.match(name):
            raise ValueError(f"variable name {name!r} must match [A-Za-z0-9_]")
        if name in self._index:
            raise ValueError(f"duplicate variable {name!r}")
        lb, ub = float(lb), float(ub)
        if not (np.isfinite(lb) and np.isfinite(ub)):
            raise ValueError(f"variable {name!r} needs finite bounds")
        if lb > ub:
            raise ValueError(f"variable {name!r} has lb {lb} > ub {ub}")
        if binary and (lb < 0 or ub > 1):
            raise ValueError(f"binary variable {name!r} must have bounds within [0,1]")
        self._index[name] = len(self.variables)
        self.variables.append(Variable(name, lb, ub, binary))
        self._dense_cache = None
        return name

    def add_binary(self, name: str) -> str:
        return self.add_var(name, 0.0, 1.0, binary=True)

    def add_row(
        self,
        coefs: Mapping[str, float],
        sense: str,
        rhs: float,
        name: str | None = None,
    ) -> int:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"row sense must be <=, >= or =, got {sense!r}")
        clean: dict[str, float] = {}
        for var, c in coefs.items():
            if var not in self._index:
                raise ValueError(f"row references unknown variable {var!r}")
            c = float(c)
            if not np.isfinite(c):
                raise ValueError(f"non-finite coefficient on {var!r}")
            if c != 0.0:
                clean[var] = c
        rhs = float(rhs)
        if not np.isfinite(rhs):
            raise ValueError("non-finite rhs")
        if name is None:
            name = f"c{len(self.rows)}"
        self.rows.append(Row(name, clean, sense, rhs))
        self._dense_cache = None
        return len(self.rows) - 1

    def set_objective(self, coefs: Mapping[str, float], maximize: bool = True):
        for var, c in coefs.items():
            if var not in self._index:
                raise ValueError(f"objective references unknown variable {var!r}")
            if not np.isfinite(float(c)):
                raise ValueError(f"non-finite objective coefficient on {var!r}")
        self.objective = {v: float(c) for v, c in coefs.items() if float(c) != 0.0}
        self.maximize = bool(maximize)

    # -- views ---------------------------------------------------------------

    def var_index(self, name: str) -> int:
        return self._index[name]

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def binaries(self) -> list[int]:
        return [i for i, v in enumerate(self.variables) if v.binary]

    def _dense(self):
        """Cached dense row matrix (rows x vars), senses and rhs."""
        if self._dense_cache is None:
            m, n = len(self.rows), len(self.variables)
            A = np.zeros((m, n))
            senses = []
            rhs = np.zeros(m)
            for k, row in enumerate(self.rows):
                for var, c in row.coefs.items():
                    A[k, self._index[var]] = c
                senses.append(row.sense)
                rhs[k] = row.rhs
            self._dense_cache = (A, senses, rhs)
        return self._dense_cache

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(len(self.variables))
        for var, coef in self.objective.items():
            c[self._index[var]] = coef
        return c

    def objective_value(self, x: Mapping[str, float]) -> float:
        return float(sum(c * x[v] for v, c in self.objective.items()))

    def max_violation(self, x: Mapping[str, float]) -> float:
        """Largest constraint violation of the point (0 when feasible)."""
        worst = 0.0
        for row in self.rows:
            lhs = sum(c * x[v] for v, c in row.coefs.items())
            if row.sense == "<=":
                worst = max(worst, lhs - row.rhs)
            elif row.sense == ">=":
                worst = max(worst, row.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - row.rhs))
        for v in self.variables:
            worst = max(worst, v.lb - x[v.name], x[v.name] - v.ub)
        return float(worst)


# ---------------------------------------------------------------------------
# two-phase simplex
# ---------------------------------------------------------------------------


def _simplex(model: MipModel, params: SolveParams, fixes: dict[int, float] | None):
    """Solve the LP relaxation (integrality ignored) with bound overrides.

    Returns (status, x_full, iterations) where status is one of "Optimal",
    "Infeasible", "Unbounded"; x_full is a full variable-value vector for
    Optimal.  Raises NumericalFailure when the pivot limit is exhausted.
    """
    nv = model.n_vars
    lb = np.array([v.lb for v in model.variables])
    ub = np.array([v.ub for v in model.variables])
    if fixes:
        for idx, val in fixes.items():
            if val < lb[idx] - params.feas_tol or val > ub[idx] + params.feas_tol:
                return "Infeasible", None, 0
            lb[idx] = ub[idx] = val
    active = np.nonzero(ub - lb > 0)[0]
    fixed_vals = lb.copy()  # value of every fixed variable (lb == ub there)

    A, senses, rhs = model._dense()
    # substitute fixed variables and shift active ones to lower bound zero
    rhs_adj = rhs - A @ lb
    A_act = A[:, active]
    n_act = len(active)

    c_full = model.objective_vector()
    sign = -1.0 if model.maximize else 1.0
    c_act = sign * c_full[active]

    # upper-bound rows for the shifted actives
    ub_rows = ub[active] - lb[active]
    m_rows = len(model.rows)
    m = m_rows + n_act

    # column layout: actives | slacks (<= rows incl. bound rows) | artificials
    n_slack = 0
    needs_art = []
    row_sense = []
    row_rhs = np.empty(m)
    for k in range(m_rows):
        b = rhs_adj[k]
        s = senses[k]
        if b < 0:
            s = {"<=": ">=", ">=": "<=", "=": "="}[s]
        row_sense.append(s)
        row_rhs[k] = abs(b) if b < 0 else b
    for k in range(n_act):
        row_sense.append("<=")
        row_rhs[m_rows + k] = ub_rows[k]
    n_slack = sum(1 for s in row_sense if s in ("<=", ">="))
    n_art = sum(1 for s in row_sense if s in (">=", "="))
    N = n_act + n_slack + n_art

    T = np.zeros((m + 1, N + 1))
    T[:m_rows, :n_act] = A_act
    flip = rhs_adj < 0
    T[:m_rows, :n_act][flip] *= -1.0
    for k in range(n_act):
        T[m_rows + k, k] = 1.0
    T[:m, N] = row_rhs

    basis = np.empty(m, dtype=np.int64)
    s_col = n_act
    a_col = n_act + n_slack
    art_start = a_col
    art_rows = []
    for k in range(m):
        s = row_sense[k]
        if s == "<=":
            T[k, s_col] = 1.0
            basis[k] = s_col
            s_col += 1
        elif s == ">=":
            T[k, s_col] = -1.0
            s_col += 1
            T[k, a_col] = 1.0
            basis[k] = a_col
            art_rows.append(k)
            a_col += 1
        else:
            T[k, a_col] = 1.0
            basis[k] = a_col
            art_rows.append(k)
            a_col += 1

    allowed = np.ones(N, dtype=bool)
    iterations = 0

    # phase 1: minimize the artificial sum
    if art_rows:
        T[m, :] = 0.0
        T[m, art_start:N] = 1.0
        for r in art_rows:
            T[m, :] -= T[r, :]
        status, piv = _kernels.run_phase(
            T, basis, allowed, params.bland_after, params.max_pivots,
            params.feas_tol, params.pivot_tol,
        )
        iterations += piv
        if status == 2:
            raise NumericalFailure(f"pivot limit {params.max_pivots} hit in phase 1")
        if -T[m, N] > params.feas_tol:
            return "Infeasible", None, iterations
        # drive leftover artificials out of the basis (degenerate pivots)
        drop = []
        for r in range(m):
            if basis[r] >= art_start:
                e = -1
                for j in range(art_start):
                    if allowed[j] and abs(T[r, j]) > params.pivot_tol:
                        e = j
                        break
                if e < 0:
                    drop.append(r)
                    continue
                prow = T[r] / T[r, e]
                colv = T[:, e].copy()
                colv[r] = 0.0
                T -= np.outer(colv, prow)
                T[r] = prow
                T[:, e] = 0.0
                T[r, e] = 1.0
                basis[r] = e
                iterations += 1
        if drop:
            keep = np.setdiff1d(np.arange(m), np.asarray(drop))
            T = np.vstack([T[keep], T[m : m + 1]])
            basis = basis[keep]
            m = len(basis)

    # phase 2
    allowed[art_start:] = False
    T[m, :] = 0.0
    T[m, :n_act] = c_act
    for r in range(m):
        cb = c_act[basis[r]] if basis[r] < n_act else 0.0
        if cb != 0.0:
            T[m, :] -= cb * T[r, :]
    status, piv = _kernels.run_phase(
        T, basis, allowed, params.bland_after, params.max_pivots,
        params.feas_tol, params.pivot_tol,
    )
    iterations += piv
    if status == 2:
        raise NumericalFailure(f"pivot limit {params.max_pivots} hit in phase 2")
    if status == 1:
        return "Unbounded", None, iterations

    y = np.zeros(N)
    y[basis] = T[:m, N]
    x_full = fixed_vals
    x_full[active] = np.clip(y[:n_act], 0.0, ub_rows) + lb[active]
    return "Optimal", x_full, iterations


def _lp(model: MipModel, params: SolveParams, fixes=None) -> SolveResult:
    t0 = time.perf_counter()
    status, x_full, iters = _simplex(model, params, fixes)
    rt = time.perf_counter() - t0
    if status != "Optimal":
        return SolveResult(status, None, np.nan, np.nan, np.nan, 0, rt, iters)
    x = {v.name: float(x_full[i]) for i, v in enumerate(model.variables)}
    val = model.objective_value(x)
    return SolveResult("Optimal", x, val, val, 0.0, 0, rt, iters)


def solve_lp(model: MipModel, params: SolveParams | None = None) -> SolveResult:
    """Optimal basic (vertex) solution of the LP relaxation.

    Binary flags are ignored; bounds are honored.  The reported point is a
    vertex of the feasible region (basic solution of the simplex).
    """
    return _lp(model, params or SolveParams())


# ---------------------------------------------------------------------------
# branch and bound
# ---------------------------------------------------------------------------


CutCallback = Callable[[dict[str, float]], Iterable[tuple[Mapping[str, float], str, float]]]
Heuristic = Callable[[dict[str, float]], Mapping[str, float] | None]


def _gap(bound: float, value: float) -> float:
    return abs(bound - value) / max(abs(value), GAP_FLOOR)


def _objective_is_integral(model: MipModel) -> bool:
    """True when every feasible point has an integer objective value.

    Holds when all objective coefficients are integers and every variable
    with a nonzero coefficient is binary; node bounds can then be rounded
    toward the incumbent, which tightens pruning at no cost.
    """
    for name, coef in model.objective.items():
        if abs(coef) <= 1e-12:
            continue
        if abs(coef - round(coef)) > 1e-9:
            return False
        if not model.variables[model._index[name]].binary:
            return False
    return True


def solve_mip(
    model: MipModel,
    params: SolveParams | None = None,
    cut_callback: CutCallback | None = None,
    heuristic: Heuristic | None = None,
) -> SolveResult:
    """Best-bound branch and bound over the binary variables.

    Branches on the most fractional binary (ties to the smallest index); the
    initial incumbent comes from rounding the root LP and re-solving with the
    binaries fixed.  ``cut_callback(x)`` is invoked on integral LP solutions;
    when it returns rows they are added to the model (globally valid cuts)
    and the node is re-solved, otherwise the candidate becomes the incumbent.
    ``heuristic(x)`` may turn any LP solution into a complete integral
    assignment to try as an incumbent (it must cover every variable and is
    still vetted against the rows and the lazy cuts).
    """
    params = params or SolveParams()
    t0 = time.perf_counter()
    binaries = model.binaries()
    nodes = 0
    iterations = 0
    obj_integral = _objective_is_integral(model)

    def cap(bound: float) -> float:
        if not obj_integral or not np.isfinite(bound):
            return bound
        return float(
            np.floor(bound + 1e-6) if model.maximize else np.ceil(bound - 1e-6)
        )

    def elapsed():
        return time.perf_counter() - t0

    root = _lp(model, params)
    iterations += root.iterations
    nodes += 1
    if root.status == "Infeasible":
        return SolveResult("Infeasible", None, np.nan, np.nan, np.nan, nodes, elapsed(), iterations)
    if root.status == "Unbounded":
        return SolveResult("Unbounded", None, np.nan, np.nan, np.nan, nodes, elapsed(), iterations)

    inc_x: dict[str, float] | None = None
    inc_val = -np.inf if model.maximize else np.inf

    def better(a, b):
        return a > b if model.maximize else a < b

    def try_incumbent(x: dict[str, float], val: float) -> bool:
        nonlocal inc_x, inc_val
        if inc_x is not None and not better(val, inc_val):
            return False
        if model.max_violation(x) > 5e-6:
            return False
        inc_x, inc_val = dict(x), val
        return True

    def integral(x: dict[str, float]) -> bool:
        return all(
            abs(x[model.variables[i].name] - round(x[model.variables[i].name]))
            <= params.int_tol
            for i in binaries
        )

    def vet_cuts(x: dict[str, float]) -> bool:
        """Offer x to the lazy callback; True when it added (violated) rows."""
        if cut_callback is None:
            return False
        cuts = list(cut_callback(x))
        for coefs, cut_sense, cut_rhs in cuts:
            model.add_row(coefs, cut_sense, cut_rhs)
        return bool(cuts)

    def try_heuristic(xlp: dict[str, float] | None) -> None:
        if heuristic is None or xlp is None:
            return
        cand = heuristic(xlp)
        if cand is None:
            return
        cand = {v.name: float(cand[v.name]) for v in model.variables}
        if not vet_cuts(cand):
            try_incumbent(cand, model.objective_value(cand))

    # primal incumbents at the root: the caller's heuristic, then LP rounding
    try_heuristic(root.x)
    if binaries and root.x is not None:
        fixes = {
            i: (1.0 if root.x[model.variables[i].name] >= 0.5 else 0.0)
            for i in binaries
        }
        heur = _lp(model, params, fixes)
        iterations += heur.iterations
        if heur.status == "Optimal" and not vet_cuts(heur.x):
            try_incumbent(heur.x, heur.value)

    seq = 0
    heap: list[tuple[float, int, dict[int, float]]] = []
    sense = -1.0 if model.maximize else 1.0
    combine = max if model.maximize else min

    def push(bound: float, fixes: dict[int, float]):
        nonlocal seq
        heapq.heappush(heap, (sense * bound, seq, fixes))
        seq += 1

    push(cap(root.value), {})

    status = "Optimal"
    bound_final: float | None = None
    while heap:
        if elapsed() > params.time_limit:
            status = "TimeLimit"
            break
        neg_bound, _, fixes = heapq.heappop(heap)
        node_bound = sense * neg_bound
        if inc_x is not None and _gap(node_bound, inc_val) <= params.gap_tol:
            # every open node is bounded by this one (best-bound order)
            bound_final = combine(node_bound, inc_val)
            break
        res = _lp(model, params, fixes)
        iterations += res.iterations
        nodes += 1
        if res.status != "Optimal":
            continue
        x, val = res.x, res.value
        if inc_x is not None and (
            not better(cap(val), inc_val) or _gap(cap(val), inc_val) <= params.gap_tol
        ):
            continue
        while integral(x):
            if not vet_cuts(x):
                try_incumbent(x, val)
                x = None
                break
            res = _lp(model, params, fixes)
            iterations += res.iterations
            if res.status != "Optimal":
                x = None
                break
            x, val = res.x, res.value
            if inc_x is not None and not better(val, inc_val):
                x = None
                break
        if x is None:
            continue
        try_heuristic(x)
        if inc_x is not None and not better(cap(val), inc_val):
            continue
        # branch on the most fractional binary, ties to the smallest index
        cand = -1
        best_dist = 2.0
        for i in binaries:
            if i in fixes:
                continue
            xi = x[model.variables[i].name]
            dist = abs(xi - np.floor(xi) - 0.5)
            if dist < best_dist - 1e-12:
                best_dist = dist
                cand = i
        if cand < 0:
            try_incumbent(x, val)
            continue
        for v in (0.0, 1.0):
            child = dict(fixes)
            child[cand] = v
            push(cap(val), child)

    if inc_x is None:
        final_status = "TimeLimit" if status == "TimeLimit" else "Infeasible"
        return SolveResult(
            final_status, None, np.nan, np.nan, np.nan, nodes, elapsed(), iterations
        )
    if bound_final is None:
        if heap:  # stopped early; heap[0] holds the best open bound
            bound_final = combine(sense * heap[0][0], inc_val)
        else:
            bound_final = inc_val
    gap = _gap(bound_final, inc_val)
    final = "Optimal" if status == "Optimal" else status
    return SolveResult(final, inc_x, inc_val, bound_final, gap, nodes, elapsed(), iterations)


# ---------------------------------------------------------------------------
# LP-file export / parse
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return "%.12g" % x


def _expr(coefs: Mapping[str, float], order: Sequence[str]) -> str:
    parts = []
    for name in order:
        if name not in coefs:
            continue
        c = coefs[name]
        if not parts:
            parts.append(f"{_fmt(c)} {name}")
        elif c >= 0:
            parts.append(f"+ {_fmt(c)} {name}")
        else:
            parts.append(f"- {_fmt(-c)} {name}")
    return " ".join(parts)


def export_lp_file(model: MipModel, destination) -> None:
    """Write the model in textual LP format (round-trip stable)."""
    order = [v.name for v in model.variables]
    lines = [f"\\ Problem: {model.name}"]
    lines.append("Maximize" if model.maximize else "Minimize")
    lines.append(f" obj: {_expr(model.objective, order)}".rstrip())
    lines.append("Subject To")
    for row in model.rows:
        lines.append(f" {row.name}: {_expr(row.coefs, order)} {row.sense} {_fmt(row.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if not v.binary:
            lines.append(f" {_fmt(v.lb)} <= {v.name} <= {_fmt(v.ub)}")
    bin_names = [v.name for v in model.variables if v.binary]
    if bin_names:
        lines.append("Binary")
        for name in bin_names:
            lines.append(f" {name}")
    lines.append("End")
    text = "\n".join(lines) + "\n"
    with open(destination, "w") as fh:
        fh.write(text)


def _parse_expr(tokens: list[str], lineno: int) -> dict[str, float]:
    coefs: dict[str, float] = {}
    sign = 1.0
    pending: float | None = None
    for tok in tokens:
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        if _NAME_RE.match(tok):
            c = sign * (1.0 if pending is None else pending)
            coefs[tok] = coefs.get(tok, 0.0) + c
            sign, pending = 1.0, None
            continue
        try:
            num = float(tok)
        except ValueError:
            raise ParseError(f"line {lineno}: unexpected token {tok!r}")
        if pending is not None:
            raise ParseError(f"line {lineno}: dangling coefficient before {tok!r}")
        pending = num
    if pending is not None:
        raise ParseError(f"line {lineno}: dangling trailing number")
    return coefs


def parse_lp_file(source) -> MipModel:
    """Parse a file produced by export_lp_file back into a MipModel."""
    with open(source) as fh:
        raw = fh.readlines()
    model = MipModel()
    section = None
    bounds: dict[str, tuple[float, float]] = {}
    binaries: list[str] = []
    obj: dict[str, float] = {}
    rows: list[tuple[str, dict[str, float], str, float, int]] = []
    var_order: list[str] = []
    seen: set[str] = set()
    maximize = True

    def note_vars(coefs):
        for name in coefs:
            if name not in seen:
                seen.add(name)
                var_order.append(name)

    for lineno, line in enumerate(raw, start=1):
        text = line.split("\\")[0].strip()
        if not text:
            continue
        low = text.lower()
        if low in ("maximize", "minimize"):
            section = "objective"
            maximize = low == "maximize"
            continue
        if low in ("subject to", "st", "s.t."):
            section = "rows"
            continue
        if low == "bounds":
            section = "bounds"
            continue
        if low in ("binary", "binaries", "bin"):
            section = "binary"
            continue
        if low == "end":
            section = "end"
            continue
        if section == "objective":
            body = text.split(":", 1)[1] if ":" in text else text
            obj.update(_parse_expr(body.split(), lineno))
            note_vars(obj)
        elif section == "rows":
            name, body = (text.split(":", 1) + [""])[:2] if ":" in text else (None, text)
            mrel = re.search(r"(<=|>=|=)", body)
            if not mrel:
                raise ParseError(f"line {lineno}: constraint without relation")
            rel = mrel.group(1)
            lhs, rhs_txt = body.rsplit(rel, 1)
            try:
                rhs = float(rhs_txt.strip())
            except ValueError:
                raise ParseError(f"line {lineno}: bad rhs {rhs_txt.strip()!r}")
            coefs = _parse_expr(lhs.split(), lineno)
            note_vars(coefs)
            rows.append((name.strip() if name else f"c{len(rows)}", coefs, rel, rhs, lineno))
        elif section == "bounds":
            mb = re.match(
                r"^([0-9.eE+-]+)\s*<=\s*([A-Za-z_][A-Za-z0-9_]*)\s*<=\s*([0-9.eE+-]+)$",
                text,
            )
            if not mb:
                raise ParseError(f"line {lineno}: unsupported bound syntax {text!r}")
            lo, name, hi = float(mb.group(1)), mb.group(2), float(mb.group(3))
            bounds[name] = (lo, hi)
            if name not in seen:
                seen.add(name)
                var_order.append(name)
        elif section == "binary":
            for name in text.split():
                if not _NAME_RE.match(name):
                    raise ParseError(f"line {lineno}: bad binary name {name!r}")
                binaries.append(name)
                if name not in seen:
                    seen.add(name)
                    var_order.append(name)
        elif section == "end":
            raise ParseError(f"line {lineno}: content after End")
        else:
            raise ParseError(f"line {lineno}: content before Maximize/Minimize")

    bin_set = set(binaries)
    for name in var_order:
        if name in bin_set:
            model.add_binary(name)
        elif name in bounds:
            lo, hi = bounds[name]
            model.add_var(name, lo, hi)
        else:
            raise ParseError(f"variable {name!r} has no finite bounds and is not binary")
    for name, coefs, rel, rhs, lineno in rows:
        try:
            model.add_row(coefs, rel, rhs, name=name)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}")
    model.set_objective(obj, maximize=maximize)
    model.name = "model"
    return model
