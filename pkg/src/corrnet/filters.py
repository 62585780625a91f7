"""PMFG and proportional-degree (PD) network construction.

Both filters scan the complete edge list in descending similarity; ties are
broken lexicographically on the descending-stock-weight relabeling of the
endpoints, which makes both builds fully deterministic.  PMFG keeps an edge
whenever the graph stays planar; PD keeps it while both endpoints are below
their integer degree budgets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import Network
from .infotheory import SimilarityMatrix
from .planarity import _lr_fast, is_planar_edges


@dataclass(frozen=True)
class StockWeights:
    """Per-stock total similarity: SW_i = sum of row i of the NMI matrix."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1:
            raise ValidationError("stock weights must be a vector")
        if np.any(w < 0):
            raise ValidationError("stock weights must be non-negative")
        w = np.ascontiguousarray(w)
        w.flags.writeable = False
        object.__setattr__(self, "w", w)

    def __len__(self) -> int:
        return int(self.w.size)


@dataclass(frozen=True)
class DegreeBudget:
    """Real and integer per-vertex degree budgets plus the processing order.

    ``order`` lists vertex indices from largest stock weight to smallest
    (ties by index); the integer budgets are cascade-rounded in that order so
    their sum equals the rounded sum of the real budgets (2M).
    """

    real_budgets: np.ndarray
    int_budgets: np.ndarray
    order: tuple[int, ...]

    def __post_init__(self):
        real = np.asarray(self.real_budgets, dtype=float)
        ints = np.asarray(self.int_budgets, dtype=np.int64)
        if real.shape != ints.shape or real.ndim != 1:
            raise ValidationError("budget vectors must be vectors of equal length")
        if sorted(self.order) != list(range(real.size)):
            raise ValidationError("order must be a permutation of the vertices")
        if np.any(ints < 0):
            raise ValidationError("integer budgets must be non-negative")
        if int(ints.sum()) != round_half_up(float(real.sum())):
            raise ValidationError("integer budgets do not preserve the rounded total")
        real = np.ascontiguousarray(real)
        real.flags.writeable = False
        ints = np.ascontiguousarray(ints)
        ints.flags.writeable = False
        object.__setattr__(self, "real_budgets", real)
        object.__setattr__(self, "int_budgets", ints)
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))


def round_half_up(x: float) -> int:
    """Nearest integer with .5 rounding up (the cascade tie rule)."""
    return math.floor(x + 0.5)


def stock_weights(sim: SimilarityMatrix) -> StockWeights:
    return StockWeights(sim.s.sum(axis=1))


def proportional_degrees(weights: StockWeights, m_edges: int) -> np.ndarray:
    """Real degree budgets d'_i = SW_i / sum(SW) * 2M."""
    if m_edges < 1:
        raise ValidationError("edge count must be at least 1")
    total = float(weights.w.sum())
    if total <= 0:
        raise ValidationError("degenerate similarity matrix: all stock weights are zero")
    return weights.w / total * (2.0 * m_edges)


def descending_weight_order(weights: StockWeights) -> tuple[int, ...]:
    w = weights.w
    return tuple(sorted(range(len(w)), key=lambda i: (-w[i], i)))


def cascade_round(budgets, order=None) -> np.ndarray:
    """Round budgets to integers while preserving the rounded grand total.

    Budgets are consumed in the given order (identity when omitted): each
    value becomes the rounded cumulative sum minus the integers already
    handed out, so cumulative rounding error never exceeds one half.
    """
    b = np.asarray(budgets, dtype=float)
    if b.ndim != 1:
        raise ValidationError("budgets must be a vector")
    if np.any(b < 0):
        raise ValidationError("budgets must be non-negative")
    if order is None:
        idx = list(range(b.size))
    else:
        idx = [int(i) for i in order]
        if sorted(idx) != list(range(b.size)):
            raise ValidationError("order must be a permutation of the budget indices")
    out = np.zeros(b.size, dtype=np.int64)
    csum = 0.0
    handed = 0
    for i in idx:
        csum += float(b[i])
        r = math.floor(csum + 0.5)
        d = r - handed
        if d < 0:  # cannot occur for non-negative budgets; guarded anyway
            raise ValidationError("cascade rounding produced a negative degree")
        out[i] = d
        handed = r
    return out


def degree_budgets(sim: SimilarityMatrix, m_edges: int | None = None) -> DegreeBudget:
    """Integer degree budgets for the PD filter, with degree-cap redistribution.

    A simple-graph degree cannot exceed n-1: any budget rounding past the cap
    is clipped there and the surplus is redistributed proportionally over the
    remaining vertices by re-running the cascade, until every budget fits.
    """
    n = sim.n
    if m_edges is None:
        m_edges = 3 * n - 6
    if m_edges > n * (n - 1) // 2:
        raise ValidationError(f"{m_edges} edges exceed the complete graph on {n} vertices")
    sw = stock_weights(sim)
    real = proportional_degrees(sw, m_edges)
    order = descending_weight_order(sw)
    cap = n - 1
    total = round_half_up(float(real.sum()))  # 2M
    ints = np.zeros(n, dtype=np.int64)
    active = list(order)
    current = real.astype(float).copy()
    pool = total
    while active:
        rounded = cascade_round(np.array([current[i] for i in active]))
        over = [pos for pos in range(len(active)) if rounded[pos] > cap]
        if not over:
            for pos, i in enumerate(active):
                ints[i] = rounded[pos]
            break
        for pos in over:
            ints[active[pos]] = cap
            pool -= cap
        over_set = set(over)
        active = [i for pos, i in enumerate(active) if pos not in over_set]
        if not active:
            break
        remaining = np.array([current[i] for i in active])
        s = float(remaining.sum())
        if s <= 0:
            for i in active:
                current[i] = pool / len(active)
        else:
            scale = pool / s
            for i in active:
                current[i] *= scale
    return DegreeBudget(real, ints, order)


def _ranked_edges(sim: SimilarityMatrix, order) -> list[tuple[int, int, float]]:
    """All pairs sorted by descending similarity, ties by relabeled (i, j)."""
    n = sim.n
    rank = [0] * n
    for pos, v in enumerate(order):
        rank[v] = pos
    s = sim.s
    keyed = []
    for i in range(n):
        for j in range(i + 1, n):
            ri, rj = rank[i], rank[j]
            if ri > rj:
                ri, rj = rj, ri
            keyed.append((-s[i, j], ri, rj, i, j))
    keyed.sort()
    return [(i, j, -negs) for negs, _, _, i, j in keyed]


def build_pd(sim: SimilarityMatrix, m_edges: int | None = None) -> Network:
    """Greedy proportional-degree network: strongest edges first, both
    endpoints must be below their integer budgets."""
    n = sim.n
    if n < 3:
        raise ValidationError("need at least 3 stocks")
    if m_edges is None:
        m_edges = 3 * n - 6
    budget = degree_budgets(sim, m_edges)
    d = budget.int_budgets
    deg = [0] * n
    edges: list[tuple[int, int, float]] = []
    for i, j, s in _ranked_edges(sim, budget.order):
        if deg[i] < d[i] and deg[j] < d[j]:
            edges.append((i, j, s))
            deg[i] += 1
            deg[j] += 1
            if len(edges) == m_edges:
                break
    return Network(sim.stocks, tuple(edges))


def pd_build_report(
    sim: SimilarityMatrix, m_edges: int | None = None, network: Network | None = None
) -> dict:
    """Machine-readable PD build summary: realized edges and budget shortfall.

    Degree caps can make the target M unreachable; the filter then emits
    fewer edges and this report carries the gap and the unused budgets.
    """
    n = sim.n
    if m_edges is None:
        m_edges = 3 * n - 6
    if network is None:
        network = build_pd(sim, m_edges)
    budget = degree_budgets(sim, m_edges)
    degs = network.degrees()
    unused = {
        sim.stocks[i]: int(budget.int_budgets[i] - degs[i])
        for i in range(n)
        if degs[i] < budget.int_budgets[i]
    }
    return {
        "target_edges": int(m_edges),
        "realized_edges": network.n_edges,
        "shortfall": int(m_edges - network.n_edges),
        "int_budget_total": int(budget.int_budgets.sum()),
        "unused_budget": unused,
    }


def build_pmfg(sim: SimilarityMatrix) -> Network:
    """Greedy planar filter: keep each edge unless it breaks planarity.

    The whole graph is re-tested after every insertion; the scan stops once
    the maximal planar size 3n-6 is reached.  With the numba path available
    the kept edges live in reusable int32 buffers so each test skips list
    conversion.
    """
    n = sim.n
    if n < 3:
        raise ValidationError("need at least 3 stocks")
    target = 3 * n - 6
    order = descending_weight_order(stock_weights(sim))

    if _lr_fast is not None:
        eu = np.empty(target + 1, dtype=np.int32)
        ev = np.empty(target + 1, dtype=np.int32)

        def keeps_planar(i: int, j: int, kept: int) -> bool:
            eu[kept] = i
            ev[kept] = j
            if n < 5 or kept + 1 < 9:
                return True
            return bool(_lr_fast(n, eu[: kept + 1], ev[: kept + 1]))

    else:
        kept_pairs: list[tuple[int, int]] = []

        def keeps_planar(i: int, j: int, kept: int) -> bool:
            kept_pairs.append((i, j))
            if is_planar_edges(n, kept_pairs):
                return True
            kept_pairs.pop()
            return False

    edges: list[tuple[int, int, float]] = []
    for i, j, s in _ranked_edges(sim, order):
        if keeps_planar(i, j, len(edges)):
            edges.append((i, j, s))
            if len(edges) == target:
                break
    return Network(sim.stocks, tuple(edges))
