"""Undirected stock networks, planarity, and clique enumeration."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .planarity import is_planar_edges


@dataclass(frozen=True)
class Network:
    """Undirected weighted graph over labeled stocks.

    Edges are canonicalized to (u, v, weight) with u < v and sorted, so two
    networks with the same edge set compare equal.
    """

    stocks: tuple[str, ...]
    edges: tuple[tuple[int, int, float], ...]
    sectors: tuple[str, ...] | None = None

    def __post_init__(self):
        n = len(self.stocks)
        if n < 1:
            raise ValidationError("network needs at least one vertex")
        if self.sectors is not None and len(self.sectors) != n:
            raise ValidationError("sector labels do not match vertex count")
        canon = []
        seen = set()
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if not (0 <= u and v < n):
                raise ValidationError(f"edge ({u}, {v}) outside vertex range")
            if (u, v) in seen:
                raise ValidationError(f"duplicate edge ({u}, {v})")
            if not (0.0 <= w <= 1.0 + 1e-9):
                raise ValidationError(f"edge weight {w} outside [0, 1]")
            seen.add((u, v))
            canon.append((u, v, w))
        canon.sort()
        adj = [set() for _ in range(n)]
        for u, v, _ in canon:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "stocks", tuple(self.stocks))
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))
        if self.sectors is not None:
            object.__setattr__(self, "sectors", tuple(self.sectors))

    @property
    def n(self) -> int:
        return len(self.stocks)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def index_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v, _ in self.edges]

    def adjacency_matrix(self, weighted: bool = False) -> np.ndarray:
        """Dense symmetric adjacency; 0/1 entries unless weighted."""
        a = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            a[u, v] = a[v, u] = w if weighted else 1.0
        return a

    def drop_edges(self, positions) -> "Network":
        """Copy without the edges at the given positions in ``self.edges``."""
        skip = set(int(p) for p in positions)
        kept = tuple(e for i, e in enumerate(self.edges) if i not in skip)
        return Network(self.stocks, kept, self.sectors)


@dataclass(frozen=True)
class Clique:
    """A complete vertex subset; `maximal` marks cliques not contained in larger ones."""

    members: tuple[int, ...]
    maximal: bool

    def __post_init__(self):
        members = tuple(sorted(int(v) for v in self.members))
        if len(set(members)) != len(members):
            raise ValidationError("clique members must be distinct")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)


def is_clique(network: Network, members) -> bool:
    """Direct all-pairs adjacency check."""
    ms = list(members)
    return all(network.has_edge(ms[i], ms[j]) for i in range(len(ms)) for j in range(i + 1, len(ms)))


def is_planar(network: Network) -> bool:
    """Left-right planarity criterion with the Euler-bound quick reject."""
    return is_planar_edges(network.n, network.index_edges())


def maximal_cliques(network: Network, min_size: int = 1) -> list[Clique]:
    """All maximal cliques via Bron-Kerbosch with pivoting, lexicographic order.

    Isolated vertices and isolated edges count as maximal cliques of size 1-2;
    filter them with ``min_size`` (clique analyses here use 3).
    """
    adj = network._adj
    found: list[tuple[int, ...]] = []

    def expand(r: list[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            found.append(tuple(sorted(r)))
            return
        pivot = min(p | x, key=lambda u: (-len(p & adj[u]), u))
        for v in sorted(p - adj[pivot]):
            r.append(v)
            expand(r, p & adj[v], x & adj[v])
            r.pop()
            p.remove(v)
            x.add(v)

    expand([], set(range(network.n)), set())
    found.sort()
    return [Clique(c, True) for c in found if len(c) >= min_size]


def enumerate_m_cliques(network: Network, m: int) -> list[Clique]:
    """All complete vertex subsets of size m (not necessarily maximal)."""
    if m < 2:
        raise ValidationError("clique size must be at least 2")
    adj = network._adj
    n = network.n
    adj_gt = [frozenset(w for w in adj[v] if w > v) for v in range(n)]
    found: list[tuple[int, ...]] = []

    def extend(prefix: list[int], cands, need: int) -> None:
        if need == 0:
            found.append(tuple(prefix))
            return
        for v in sorted(cands):
            prefix.append(v)
            extend(prefix, cands & adj_gt[v], need - 1)
            prefix.pop()

    extend([], frozenset(range(n)), m)

    cliques = []
    for members in found:
        common = frozenset.intersection(*(adj[v] for v in members))
        cliques.append(Clique(members, len(common) == 0))
    return cliques


# ---------------------------------------------------------------------------
# serialization: edge-list CSV plus vertex table


def write_network_csv(network: Network, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("u,v,weight\n")
        for u, v, w in network.edges:
            fh.write("%d,%d,%.17g\n" % (u, v, w))


def write_vertex_table(network: Network, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,stock,sector\n")
        for i, stock in enumerate(network.stocks):
            sector = network.sectors[i] if network.sectors is not None else ""
            fh.write(f"{i},{stock},{sector}\n")


def read_network_csv(edge_path: str | Path, vertex_path: str | Path) -> Network:
    vertex_path = Path(vertex_path)
    edge_path = Path(edge_path)
    for p in (edge_path, vertex_path):
        if not p.exists():
            raise ValidationError(f"network file not found: {p}")
    stocks: list[str] = []
    sectors: list[str] = []
    with open(vertex_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header] != ["index", "stock", "sector"]:
            raise ParseError("vertex table must have header index,stock,sector", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3 or int(row[0]) != len(stocks):
                raise ParseError("bad vertex row", line=lineno)
            stocks.append(row[1])
            sectors.append(row[2])
    edges: list[tuple[int, int, float]] = []
    with open(edge_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header] != ["u", "v", "weight"]:
            raise ParseError("edge list must have header u,v,weight", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                edges.append((int(row[0]), int(row[1]), float(row[2])))
            except (ValueError, IndexError):
                raise ParseError("bad edge row", line=lineno) from None
    sector_tuple = tuple(sectors) if any(sectors) else None
    return Network(tuple(stocks), tuple(edges), sector_tuple)
