"""Entropies, mutual information, and the NMI similarity matrix.

All entropies are in bits.  Sums of entropy terms use ``math.fsum`` so the
result is the correctly rounded sum of the term multiset: pairwise NMI values
are therefore bit-identical regardless of the order stocks are presented in
or of any parallel schedule over pairs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .ingest import (
    BinAssignment,
    Distribution,
    JointDistribution,
    ReturnMatrix,
    bin_series,
    joint_histogram,
    marginal_distribution,
)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric n x n grid of pairwise NMI values with a zero diagonal."""

    stocks: tuple[str, ...]
    s: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        n = len(self.stocks)
        if s.shape != (n, n):
            raise ValidationError("similarity grid shape does not match stock labels")
        if not np.array_equal(s, s.T):
            raise ValidationError("similarity matrix must be exactly symmetric")
        if np.any(np.diag(s) != 0):
            raise ValidationError("similarity diagonal must be zero")
        if np.any(s < 0) or np.any(s > 1 + 1e-9):
            raise ValidationError("similarity values must lie in [0, 1]")
        object.__setattr__(self, "stocks", tuple(self.stocks))
        s = np.ascontiguousarray(s)
        s.flags.writeable = False
        object.__setattr__(self, "s", s)

    @property
    def n(self) -> int:
        return len(self.stocks)

    def restrict(self, indices) -> "SimilarityMatrix":
        """Sub-matrix over the given vertex indices (order preserved)."""
        idx = list(indices)
        stocks = tuple(self.stocks[i] for i in idx)
        return SimilarityMatrix(stocks, self.s[np.ix_(idx, idx)])


def _entropy_terms(p: np.ndarray) -> float:
    nz = p[p > 0]
    return -math.fsum((nz * np.log2(nz)).tolist())


def entropy(dist: Distribution) -> float:
    """Shannon entropy -sum p log2 p, with 0 log 0 = 0."""
    return _entropy_terms(dist.p)


def joint_entropy(joint: JointDistribution) -> float:
    """Joint Shannon entropy over the q x q grid."""
    return _entropy_terms(joint.p.ravel())


def mutual_information(hx: float, hy: float, hxy: float) -> float:
    """I = H(X) + H(Y) - H(X,Y), clamped to zero against float round-off.

    Negative values beyond -1e-9 cannot arise from matching distributions and
    are rejected.
    """
    i = hx + hy - hxy
    if i < -1e-9:
        raise ValidationError(f"inconsistent entropies: mutual information {i} < 0")
    return max(i, 0.0)


def nmi(i_xy: float, hx: float, hy: float) -> float:
    """Normalized mutual information 2I / (H(X) + H(Y)) in [0, 1].

    Two constant (single-bin) series carry no measurable shared information;
    that degenerate case is defined as 0.
    """
    denom = hx + hy
    if denom == 0:
        warnings.warn("NMI of two constant series defined as 0", stacklevel=2)
        return 0.0
    return 2.0 * i_xy / denom


def nmi_from_bins(a: BinAssignment, b: BinAssignment) -> float:
    """Pairwise NMI straight from two bin assignments."""
    ha = entropy(marginal_distribution(a))
    hb = entropy(marginal_distribution(b))
    hab = joint_entropy(joint_histogram(a, b))
    return nmi(mutual_information(ha, hb, hab), ha, hb)


def similarity_matrix(returns: ReturnMatrix, q: int) -> SimilarityMatrix:
    """Pairwise NMI of binned log-return series, one shared q for all stocks.

    Each unordered pair is computed once, so the result is exactly symmetric;
    the diagonal is forced to zero.
    """
    n = len(returns.stocks)
    assignments = [bin_series(returns.returns[i], q) for i in range(n)]
    h = [entropy(marginal_distribution(a)) for a in assignments]
    s = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            hij = joint_entropy(joint_histogram(assignments[i], assignments[j]))
            v = nmi(mutual_information(h[i], h[j], hij), h[i], h[j])
            s[i, j] = s[j, i] = v
    return SimilarityMatrix(returns.stocks, s)


# ---------------------------------------------------------------------------
# CSV cache


def write_similarity_csv(sim: SimilarityMatrix, path: str | Path) -> None:
    """Dump as CSV with 17 significant digits so reload is value-exact."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(sim.stocks) + "\n")
        for row in sim.s:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def read_similarity_csv(path: str | Path) -> SimilarityMatrix:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"similarity file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ParseError("empty similarity file", line=1)
    stocks = tuple(c.strip() for c in lines[0].split(","))
    if len(lines) != len(stocks) + 1:
        raise ParseError(f"expected {len(stocks)} data rows, found {len(lines) - 1}")
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != len(stocks):
            raise ParseError(f"expected {len(stocks)} columns, found {len(cells)}", line=lineno)
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ParseError("cannot parse similarity value", line=lineno) from None
    return SimilarityMatrix(stocks, np.array(rows))
