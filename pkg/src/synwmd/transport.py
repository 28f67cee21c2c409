"""Exact and entropic solvers for the balanced transportation problem.

The exact path is a transportation-specialized network simplex: north-west
corner start, Bland's entering rule (lowest row index, then lowest column
index, first negative reduced cost), and lowest-index leaving ties, which
rules out cycling. Token masses below MASS_FLOOR are dropped before the
solve and both marginals are renormalized to unit total; the returned plan
is scaled back to the original mass.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergenceWarning, NumericalFailure, Unbalanced

BALANCE_TOL = 1e-9
MASS_FLOOR = 1e-15
_REDUCED_COST_TOL = 1e-12


@dataclass
class TransportProblem:
    """Supplies, demands, and the cost of moving one unit between them."""

    supply: np.ndarray
    demand: np.ndarray
    cost: np.ndarray

    def __post_init__(self):
        self.supply = np.asarray(self.supply, dtype=np.float64)
        self.demand = np.asarray(self.demand, dtype=np.float64)
        self.cost = np.asarray(self.cost, dtype=np.float64)
        if self.supply.ndim != 1 or self.demand.ndim != 1:
            raise ValueError("supply and demand must be 1-d")
        if self.cost.shape != (len(self.supply), len(self.demand)):
            raise ValueError(
                f"cost shape {self.cost.shape} does not match "
                f"({len(self.supply)}, {len(self.demand)})"
            )
        if (self.supply < 0).any() or (self.demand < 0).any():
            raise ValueError("masses must be nonnegative")
        if not np.isfinite(self.cost).all():
            raise ValueError("costs must be finite")
        gap = abs(float(self.supply.sum()) - float(self.demand.sum()))
        if gap > BALANCE_TOL:
            raise Unbalanced(f"supply and demand totals differ by {gap:.3e}")


@dataclass
class TransportPlan:
    """An optimal coupling with its objective and dual certificate."""

    plan: np.ndarray
    objective: float
    row_duals: np.ndarray
    col_duals: np.ndarray
    iterations: int


def _northwest_corner(supply, demand):
    m, n = len(supply), len(demand)
    alloc = np.zeros((m, n))
    basic = np.zeros((m, n), dtype=bool)
    rs = supply.copy()
    rd = demand.copy()
    i = j = 0
    for _ in range(m + n - 1):
        basic[i, j] = True
        q = min(rs[i], rd[j])
        alloc[i, j] = q
        rs[i] -= q
        rd[j] -= q
        if i == m - 1 and j == n - 1:
            break
        # exactly one of row/column advances per step, so the basis is a tree
        if rs[i] == 0.0 and i < m - 1:
            i += 1
        elif j < n - 1:
            j += 1
        else:
            i += 1
    return alloc, basic


def _compute_duals(basic, cost):
    m, n = basic.shape
    u = np.zeros(m)
    v = np.zeros(n)
    seen_r = np.zeros(m, dtype=bool)
    seen_c = np.zeros(n, dtype=bool)
    rows_cells = [[] for _ in range(m)]
    cols_cells = [[] for _ in range(n)]
    for i, j in np.argwhere(basic):
        rows_cells[i].append(j)
        cols_cells[j].append(i)
    seen_r[0] = True
    queue = deque([("r", 0)])
    while queue:
        kind, k = queue.popleft()
        if kind == "r":
            for j in rows_cells[k]:
                if not seen_c[j]:
                    v[j] = cost[k, j] - u[k]
                    seen_c[j] = True
                    queue.append(("c", j))
        else:
            for i in cols_cells[k]:
                if not seen_r[i]:
                    u[i] = cost[i, k] - v[k]
                    seen_r[i] = True
                    queue.append(("r", i))
    if not (seen_r.all() and seen_c.all()):
        raise NumericalFailure("basis does not span the bipartite graph")
    return u, v


def _find_cycle(basic, enter_i, enter_j):
    """Cells of the unique cycle closed by the entering cell, alternating
    signs starting with + at the entering cell."""
    m, n = basic.shape
    rows_cells = [[] for _ in range(m)]
    cols_cells = [[] for _ in range(n)]
    for i, j in np.argwhere(basic):
        rows_cells[i].append(j)
        cols_cells[j].append(i)
    # BFS from row node enter_i to column node enter_j along basic cells
    parent = {("r", enter_i): None}
    queue = deque([("r", enter_i)])
    target = ("c", enter_j)
    while queue and target not in parent:
        node = queue.popleft()
        kind, k = node
        if kind == "r":
            for j in rows_cells[k]:
                nxt = ("c", j)
                if nxt not in parent:
                    parent[nxt] = node
                    queue.append(nxt)
        else:
            for i in cols_cells[k]:
                nxt = ("r", i)
                if nxt not in parent:
                    parent[nxt] = node
                    queue.append(nxt)
    if target not in parent:
        raise NumericalFailure("entering cell closes no cycle")
    path_nodes = [target]
    while parent[path_nodes[-1]] is not None:
        path_nodes.append(parent[path_nodes[-1]])
    # nodes run c_enter_j ... r_enter_i; consecutive nodes share a basic cell
    cells = [(enter_i, enter_j)]
    for a, b in zip(path_nodes, path_nodes[1:]):
        (ka, va), (kb, vb) = a, b
        cells.append((va, vb) if ka == "r" else (vb, va))
    return cells


def _rebuild_allocations(basic, supply, demand):
    """Recompute basic allocations from the marginals by peeling tree leaves.

    The basis fixes the vertex uniquely, so this only removes float drift
    accumulated by the pivots.
    """
    m, n = basic.shape
    alloc = np.zeros((m, n))
    rows_cells = [set() for _ in range(m)]
    cols_cells = [set() for _ in range(n)]
    for i, j in np.argwhere(basic):
        rows_cells[i].add(j)
        cols_cells[j].add(i)
    rs = supply.copy()
    rd = demand.copy()
    queue = deque()
    for i in range(m):
        if len(rows_cells[i]) == 1:
            queue.append(("r", i))
    for j in range(n):
        if len(cols_cells[j]) == 1:
            queue.append(("c", j))
    placed = 0
    total = int(basic.sum())
    while queue:
        kind, k = queue.popleft()
        if kind == "r":
            if not rows_cells[k]:
                continue
            j = next(iter(rows_cells[k]))
            q = rs[k]
            i = k
        else:
            if not cols_cells[k]:
                continue
            i = next(iter(cols_cells[k]))
            q = rd[k]
            j = k
        alloc[i, j] = q
        rs[i] -= q
        rd[j] -= q
        rows_cells[i].discard(j)
        cols_cells[j].discard(i)
        placed += 1
        if len(rows_cells[i]) == 1:
            queue.append(("r", i))
        if len(cols_cells[j]) == 1:
            queue.append(("c", j))
    if placed != total:
        raise NumericalFailure("basis tree did not peel cleanly")
    return alloc


def _network_simplex(supply, demand, cost):
    m, n = cost.shape
    alloc, basic = _northwest_corner(supply, demand)
    max_pivots = 200 * (m + n) * max(m, n) + 1000
    pivots = 0
    while True:
        u, v = _compute_duals(basic, cost)
        reduced = cost - u[:, None] - v[None, :]
        reduced[basic] = 0.0
        negative = np.argwhere(reduced < -_REDUCED_COST_TOL)
        if negative.size == 0:
            break
        enter_i, enter_j = map(int, negative[0])  # row-major scan: Bland's rule
        cycle = _find_cycle(basic, enter_i, enter_j)
        giving = cycle[1::2]
        theta = min(alloc[c] for c in giving)
        leaving = min(c for c in giving if alloc[c] == theta)
        for k, cell in enumerate(cycle):
            alloc[cell] += theta if k % 2 == 0 else -theta
        alloc[leaving] = 0.0
        basic[leaving] = False
        basic[enter_i, enter_j] = True
        pivots += 1
        if pivots > max_pivots:
            raise NumericalFailure(f"pivot budget exhausted after {pivots} pivots")
    alloc = _rebuild_allocations(basic, supply, demand)
    return alloc, u, v, pivots


def _active_marginals(problem):
    keep_r = problem.supply >= MASS_FLOOR
    keep_c = problem.demand >= MASS_FLOOR
    if not keep_r.any() or not keep_c.any():
        raise Unbalanced("no mass left after dropping degenerate entries")
    return keep_r, keep_c


def solve_exact(problem: TransportProblem) -> TransportPlan:
    """Minimize sum T_ij c_ij subject to the given marginals, exactly.

    Returns the optimal plan in the original shape together with dual
    potentials certifying optimality (u_i + v_j <= c_ij with equality on
    the basis).
    """
    keep_r, keep_c = _active_marginals(problem)
    sub_s = problem.supply[keep_r]
    sub_d = problem.demand[keep_c]
    total_s = float(sub_s.sum())
    total_d = float(sub_d.sum())
    alloc, u, v, pivots = _network_simplex(
        sub_s / total_s, sub_d / total_d, problem.cost[np.ix_(keep_r, keep_c)]
    )
    plan = np.zeros_like(problem.cost)
    plan[np.ix_(keep_r, keep_c)] = alloc * total_s
    plan[plan < MASS_FLOOR] = 0.0
    row_duals = np.full(len(problem.supply), np.inf)
    col_duals = np.full(len(problem.demand), -np.inf)
    row_duals[keep_r] = u
    col_duals[keep_c] = v
    # dropped rows/columns still need feasible duals for the certificate
    if not keep_c.all():
        col_duals[~keep_c] = (
            problem.cost[np.ix_(keep_r, ~keep_c)] - u[:, None]
        ).min(axis=0)
    if not keep_r.all():
        row_duals[~keep_r] = (problem.cost[~keep_r] - col_duals[None, :]).min(axis=1)
    objective = float((plan * problem.cost).sum())
    return TransportPlan(plan, objective, row_duals, col_duals, pivots)


def _round_to_marginals(plan, supply, demand):
    # Altschuler-style rounding: cap rows, cap columns, then spread the
    # leftover deficit as a rank-one correction
    row_sums = plan.sum(axis=1)
    scale_r = np.minimum(
        1.0, np.divide(supply, row_sums, out=np.ones_like(supply), where=row_sums > 0)
    )
    plan = plan * scale_r[:, None]
    col_sums = plan.sum(axis=0)
    scale_c = np.minimum(
        1.0, np.divide(demand, col_sums, out=np.ones_like(demand), where=col_sums > 0)
    )
    plan = plan * scale_c[None, :]
    err_r = supply - plan.sum(axis=1)
    err_c = demand - plan.sum(axis=0)
    total_err = err_r.sum()
    if total_err > 0.0:
        plan = plan + np.outer(err_r, err_c) / total_err
    return plan


def solve_entropic(
    problem: TransportProblem,
    epsilon: float = 1e-2,
    max_iter: int = 20000,
    tol: float = 1e-10,
) -> TransportPlan:
    """Sinkhorn iteration in the log domain, rounded to exact marginals.

    The objective of the returned feasible plan upper-bounds the exact
    optimum and approaches it as ``epsilon`` shrinks. Hitting ``max_iter``
    with marginal error above ``tol`` emits a NonConvergenceWarning.
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    keep_r, keep_c = _active_marginals(problem)
    a = problem.supply[keep_r]
    b = problem.demand[keep_c]
    total_s = float(a.sum())
    total_d = float(b.sum())
    a = a / total_s
    b = b / total_d
    cost = problem.cost[np.ix_(keep_r, keep_c)]

    log_a = np.log(a)
    log_b = np.log(b)
    f = np.zeros(len(a))
    g = np.zeros(len(b))
    scaled = -cost / epsilon

    def log_plan():
        return scaled + f[:, None] / epsilon + g[None, :] / epsilon

    def logsumexp(mat, axis):
        peak = mat.max(axis=axis, keepdims=True)
        return (peak + np.log(np.exp(mat - peak).sum(axis=axis, keepdims=True))).squeeze(axis)

    residual = np.inf
    iterations = 0
    for it in range(1, max_iter + 1):
        f = f + epsilon * (log_a - logsumexp(log_plan(), axis=1))
        g = g + epsilon * (log_b - logsumexp(log_plan(), axis=0))
        iterations = it
        if it % 10 == 0 or it == max_iter:
            plan = np.exp(log_plan())
            residual = float(
                np.abs(plan.sum(axis=1) - a).sum() + np.abs(plan.sum(axis=0) - b).sum()
            )
            if residual < tol:
                break
    if residual >= tol:
        warnings.warn(
            NonConvergenceWarning(
                f"sinkhorn stopped after {iterations} iterations, marginal error {residual:.3e}"
            )
        )
    plan = _round_to_marginals(np.exp(log_plan()), a, b)
    full = np.zeros_like(problem.cost)
    full[np.ix_(keep_r, keep_c)] = plan * total_s
    objective = float((full * problem.cost).sum())
    return TransportPlan(full, objective, np.zeros(len(problem.supply)), np.zeros(len(problem.demand)), iterations)
