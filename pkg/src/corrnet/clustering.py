"""Louvain modularity optimization and normalized spectral clustering (NSC).

Louvain follows the classic two-phase scheme: greedy single-vertex moves to
the best-gain neighbor community, then aggregation into a weighted graph with
self-loops, repeated until a full pass makes no move.  A final fine-grained
sweep on the original graph guarantees the returned partition is stable
against any single-vertex move (the tests re-check this against the direct
modularity formula).

NSC solves the generalized eigenproblem L v = lambda D v through the
symmetrically normalized Laplacian and runs a deterministic seeded k-means
on the spectral row vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Partition:
    """Assignment of every vertex to exactly one cluster, ids 0..k-1 with no
    gaps, canonicalized by first appearance."""

    assignment: tuple[int, ...]
    k: int

    def __post_init__(self):
        labels = tuple(int(c) for c in self.assignment)
        seen: dict[int, int] = {}
        for c in labels:
            if c not in seen:
                if c != len(seen):
                    raise ValidationError("cluster ids must be canonical (first-appearance order)")
                seen[c] = len(seen)
        if len(seen) != self.k:
            raise ValidationError(f"partition declares k={self.k} but has {len(seen)} clusters")
        object.__setattr__(self, "assignment", labels)

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        mapping: dict = {}
        out = []
        for lab in labels:
            if lab not in mapping:
                mapping[lab] = len(mapping)
            out.append(mapping[lab])
        return cls(tuple(out), len(mapping))

    def __len__(self) -> int:
        return len(self.assignment)

    def clusters(self) -> list[tuple[int, ...]]:
        groups: list[list[int]] = [[] for _ in range(self.k)]
        for v, c in enumerate(self.assignment):
            groups[c].append(v)
        return [tuple(g) for g in groups]


@dataclass(frozen=True)
class EigenSpectrum:
    """Ascending generalized eigenvalues of L v = lambda D v with their vectors."""

    values: np.ndarray
    vectors: np.ndarray  # column i pairs with values[i]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        vectors = np.asarray(self.vectors, dtype=float)
        if values.ndim != 1 or vectors.shape != (values.size, values.size):
            raise ValidationError("spectrum shape mismatch")
        if np.any(np.diff(values) < 0):
            raise ValidationError("eigenvalues must be ascending")
        values = np.ascontiguousarray(values)
        values.flags.writeable = False
        vectors = np.ascontiguousarray(vectors)
        vectors.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "vectors", vectors)

    @property
    def n(self) -> int:
        return int(self.values.size)


def _check_weights(weights, zero_diagonal: bool) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValidationError("weight matrix must be square")
    if not np.array_equal(w, w.T):
        raise ValidationError("weight matrix must be symmetric")
    if np.any(w < 0):
        raise ValidationError("weights must be non-negative")
    if zero_diagonal and np.any(np.diag(w) != 0):
        raise ValidationError("weight matrix must have a zero diagonal")
    return w


# ---------------------------------------------------------------------------
# modularity and Louvain


def modularity(weights, partition: Partition) -> float:
    """Q = (1/2S) sum_ij [w_ij - SW_i SW_j / 2S] delta(c_i, c_j)."""
    w = _check_weights(weights, zero_diagonal=True)
    n = w.shape[0]
    if len(partition) != n:
        raise ValidationError("partition does not match the weight matrix")
    two_s = float(w.sum())
    if two_s <= 0:
        raise ValidationError("total similarity must be positive")
    sw = w.sum(axis=1)
    q = 0.0
    for members in partition.clusters():
        idx = list(members)
        q += float(w[np.ix_(idx, idx)].sum()) - float(sw[idx].sum()) ** 2 / two_s
    return q / two_s


def _compact(labels: np.ndarray) -> tuple[np.ndarray, int]:
    mapping: dict[int, int] = {}
    out = np.empty(labels.size, dtype=np.int64)
    for i, lab in enumerate(labels):
        lab = int(lab)
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[i] = mapping[lab]
    return out, len(mapping)


def _local_moves(w: np.ndarray, init: np.ndarray, scan, two_s: float) -> tuple[np.ndarray, bool]:
    """Greedy single-vertex moves until a full pass changes nothing.

    Ties: a vertex keeps its community on zero or negative best gain; among
    equal positive gains the lowest community id wins.
    """
    labels, k = _compact(init)
    n = w.shape[0]
    k_v = w.sum(axis=1)
    neighbor_idx = [np.nonzero(w[v])[0] for v in range(n)]
    moved_any = False
    for _ in range(10_000):
        comm_tot = np.zeros(k)
        np.add.at(comm_tot, labels, k_v)
        moved_pass = False
        for v in scan:
            c0 = int(labels[v])
            kv = float(k_v[v])
            comm_tot[c0] -= kv
            link: dict[int, float] = {}
            row = w[v]
            for j in neighbor_idx[v]:
                if j == v:
                    continue
                c = int(labels[j])
                link[c] = link.get(c, 0.0) + float(row[j])
            base = link.get(c0, 0.0) - kv * comm_tot[c0] / two_s
            best_c, best_gain = c0, 0.0
            for c in sorted(link):
                if c == c0:
                    continue
                gain = (link[c] - kv * comm_tot[c] / two_s) - base
                if gain > best_gain:
                    best_gain, best_c = gain, c
            labels[v] = best_c
            comm_tot[best_c] += kv
            if best_c != c0:
                moved_pass = moved_any = True
        if not moved_pass:
            return labels, moved_any
    raise RuntimeError("local move phase failed to converge")


def _aggregate(w: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    onehot = np.zeros((w.shape[0], k))
    onehot[np.arange(w.shape[0]), labels] = 1.0
    return onehot.T @ w @ onehot


def louvain(weights, vertex_order=None, seed=None) -> Partition:
    """Two-phase Louvain with deterministic tie rules.

    The scan order over original vertices is ``vertex_order`` when given,
    else a permutation drawn from ``seed``, else natural order.  Aggregated
    levels scan supervertices in index order.  After the level iteration
    stops, one more fine-grained move phase runs on the original graph so
    that no single-vertex move can improve Q.
    """
    w = _check_weights(weights, zero_diagonal=True)
    n = w.shape[0]
    two_s = float(w.sum())
    if two_s <= 0:
        raise ValidationError("total similarity must be positive")
    if vertex_order is None:
        if seed is None:
            order = list(range(n))
        else:
            order = np.random.default_rng(seed).permutation(n).tolist()
    else:
        order = [int(v) for v in vertex_order]
        if sorted(order) != list(range(n)):
            raise ValidationError("vertex_order must be a permutation of all vertices")

    level_w = w
    scan = order
    node_to_comm = np.arange(n)
    while True:
        labels, moved = _local_moves(level_w, np.arange(level_w.shape[0]), scan, two_s)
        if not moved:
            break
        labels, k = _compact(labels)
        node_to_comm = labels[node_to_comm]
        level_w = _aggregate(level_w, labels, k)
        scan = list(range(level_w.shape[0]))
    final_labels, _ = _local_moves(w, node_to_comm, order, two_s)
    return Partition.from_labels(final_labels.tolist())


# ---------------------------------------------------------------------------
# spectral clustering


def spectrum(weights) -> EigenSpectrum:
    """Full generalized spectrum of L v = lambda D v (requires no zero-degree rows)."""
    w = _check_weights(weights, zero_diagonal=False)
    d = w.sum(axis=1)
    if np.any(d <= 0):
        raise ValidationError("zero-degree vertices make D singular; remove them first")
    dm12 = 1.0 / np.sqrt(d)
    sym = np.eye(w.shape[0]) - dm12[:, None] * w * dm12[None, :]
    vals, vecs = np.linalg.eigh(sym)
    return EigenSpectrum(vals, dm12[:, None] * vecs)


def eigengap_k(spec: EigenSpectrum, k_min: int = 2, k_max: int | None = None) -> int:
    """k in [k_min, k_max] maximizing lambda_{k+1} - lambda_k; ties pick the smallest k."""
    vals = spec.values
    n = vals.size
    if k_max is None:
        k_max = n - 1
    if k_min < 2:
        raise ValidationError("k_min must be at least 2")
    if k_max > n - 1 or k_min > k_max:
        raise ValidationError(f"empty eigengap scan range [{k_min}, {k_max}] for n={n}")
    best_k, best_gap = k_min, -np.inf
    for k in range(k_min, k_max + 1):
        gap = float(vals[k] - vals[k - 1])
        if gap > best_gap:
            best_gap, best_k = gap, k
    return best_k


def _kmeans(points: np.ndarray, k: int, seed, restarts: int = 10, max_iter: int = 300,
            tol: float = 1e-8) -> np.ndarray:
    """Seeded deterministic k-means: the first center is drawn from the RNG,
    the rest by farthest-point, then Lloyd iterations; best of 10 restarts."""
    x = np.asarray(points, dtype=float)
    n = x.shape[0]
    if k <= 1 or n == 0:
        return np.zeros(n, dtype=np.int64)
    rng = np.random.default_rng(0 if seed is None else seed)
    best_labels: np.ndarray | None = None
    best_inertia = np.inf
    for _ in range(restarts):
        first = int(rng.integers(n))
        center_rows = [first]
        d2 = ((x - x[first]) ** 2).sum(axis=1)
        while len(center_rows) < k:
            nxt = int(np.argmax(d2))  # argmax takes the first max: deterministic
            center_rows.append(nxt)
            d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
        centers = x[center_rows].copy()
        labels = np.zeros(n, dtype=np.int64)
        for _ in range(max_iter):
            dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            labels = dist.argmin(axis=1)
            assigned = dist[np.arange(n), labels]
            for j in range(k):
                if not np.any(labels == j):  # re-seed an emptied cluster
                    far = int(np.argmax(assigned))
                    labels[far] = j
                    assigned[far] = -np.inf
            new_centers = np.empty_like(centers)
            for j in range(k):
                mask = labels == j
                new_centers[j] = x[mask].mean(axis=0) if mask.any() else centers[j]
            shift = float(((new_centers - centers) ** 2).sum())
            centers = new_centers
            if shift <= tol:
                break
        inertia = float(((x - centers[labels]) ** 2).sum())
        if inertia < best_inertia:
            best_inertia = inertia
            best_labels = labels.copy()
    assert best_labels is not None
    return best_labels


def _split_isolated(w: np.ndarray):
    d = w.sum(axis=1)
    core = np.nonzero(d > 0)[0]
    isolated = np.nonzero(d == 0)[0]
    return core, isolated


def nsc(weights, k: int, seed=None) -> Partition:
    """Normalized spectral clustering into (at most) k clusters.

    Zero-degree vertices are removed before the eigensolve (D would be
    singular) and each comes back as its own singleton cluster.
    """
    w = _check_weights(weights, zero_diagonal=False)
    n = w.shape[0]
    if k < 2:
        raise ValidationError("k must be at least 2")
    if k > n:
        raise ValidationError(f"k={k} exceeds the vertex count {n}")
    core, isolated = _split_isolated(w)
    labels = np.zeros(n, dtype=np.int64)
    k_eff = 0
    if core.size:
        spec = spectrum(w[np.ix_(core, core)])
        k_eff = min(k, int(core.size))
        labels[core] = _kmeans(spec.vectors[:, :k_eff], k_eff, seed)
    for pos, v in enumerate(isolated):
        labels[v] = k_eff + pos
    return Partition.from_labels(labels.tolist())


def nsc_sweep(weights, ks, seed_for_k) -> dict[int, Partition]:
    """NSC for several k on one matrix, decomposing once.

    ``seed_for_k`` maps k to the k-means seed; results equal per-k ``nsc``
    calls exactly.
    """
    w = _check_weights(weights, zero_diagonal=False)
    n = w.shape[0]
    core, isolated = _split_isolated(w)
    spec = spectrum(w[np.ix_(core, core)]) if core.size else None
    out: dict[int, Partition] = {}
    for k in ks:
        if k < 2 or k > n:
            raise ValidationError(f"k={k} outside valid range [2, {n}]")
        labels = np.zeros(n, dtype=np.int64)
        k_eff = 0
        if spec is not None:
            k_eff = min(k, int(core.size))
            labels[core] = _kmeans(spec.vectors[:, :k_eff], k_eff, seed_for_k(k))
        for pos, v in enumerate(isolated):
            labels[v] = k_eff + pos
        out[k] = Partition.from_labels(labels.tolist())
    return out
