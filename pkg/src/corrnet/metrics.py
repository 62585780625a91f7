"""Partition agreement (adjusted Rand index) and sector-homogeneity scoring."""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from math import comb

import numpy as np

from .clustering import Partition
from .errors import ValidationError
from .graph import Clique


@dataclass(frozen=True)
class ContingencyTable:
    """Cross-tabulation n_ij of two partitions with row/column sums."""

    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    n: int

    @classmethod
    def from_partitions(cls, a: Partition, b: Partition) -> "ContingencyTable":
        if len(a) != len(b):
            raise ValidationError("partitions cover different element sets")
        counts = np.zeros((a.k, b.k), dtype=np.int64)
        for ca, cb in zip(a.assignment, b.assignment):
            counts[ca, cb] += 1
        return cls(counts, counts.sum(axis=1), counts.sum(axis=0), len(a))


def ari(a: Partition, b: Partition) -> float:
    """Hubert-Arabie adjusted Rand index in [-1, 1]; 1 iff identical up to relabeling.

    Computed from the contingency table in exact integer arithmetic with a
    single float division at the end.  When the correction denominator is
    zero (both partitions trivial) the value is 1 for identical partitions
    and 0 otherwise.
    """
    if len(a) != len(b):
        raise ValidationError("partitions cover different element sets")
    n = len(a)
    if n == 0:
        raise ValidationError("empty partitions")
    table = ContingencyTable.from_partitions(a, b)
    sum_nij = sum(comb(int(x), 2) for x in table.counts.ravel())
    sum_a = sum(comb(int(x), 2) for x in table.row_sums)
    sum_b = sum(comb(int(x), 2) for x in table.col_sums)
    pairs = comb(n, 2)
    num = 2 * pairs * sum_nij - 2 * sum_a * sum_b
    den = pairs * (sum_a + sum_b) - 2 * sum_a * sum_b
    if den == 0:
        if a.assignment == b.assignment:  # canonical ids: equality = relabel-identity
            return 1.0
        warnings.warn("ARI undefined for trivial partition pair; returning 0", stacklevel=2)
        return 0.0
    return num / den


@dataclass(frozen=True)
class HomogeneityResult:
    """Share of cliques whose members all belong to one sector."""

    ratio: float
    homogeneous: int
    total: int

    def report(self, metric: str, **params) -> dict:
        return {
            "metric": metric,
            "value": self.ratio,
            "numerator": self.homogeneous,
            "denominator": self.total,
            "params": params,
        }


def clique_homogeneity(cliques, vertex_sectors) -> HomogeneityResult:
    """Fraction of cliques with a single sector among their members."""
    cliques = list(cliques)
    if not cliques:
        raise ValidationError("no cliques")
    sectors = list(vertex_sectors)
    homogeneous = 0
    for clique in cliques:
        members = clique.members if isinstance(clique, Clique) else tuple(clique)
        if any(v >= len(sectors) for v in members):
            raise ValidationError("clique member without a sector")
        if len({sectors[v] for v in members}) == 1:
            homogeneous += 1
    return HomogeneityResult(homogeneous / len(cliques), homogeneous, len(cliques))


def dominant_sector(cluster, vertex_sectors) -> tuple[str, float]:
    """Modal sector of a cluster and its share; name ties go alphabetically."""
    members = list(cluster)
    if not members:
        raise ValidationError("empty cluster")
    tally = Counter(vertex_sectors[v] for v in members)
    top = max(tally.values())
    sector = min(s for s, c in tally.items() if c == top)
    return sector, top / len(members)


def sector_partition(vertex_sectors) -> Partition:
    """Benchmark partition grouping vertices by sector label."""
    return Partition.from_labels(list(vertex_sectors))
