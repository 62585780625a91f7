"""Price/sector loading, log-returns, and binned probability estimation.

The estimation pipeline is: closing prices -> log-returns -> per-stock
equal-frequency bin assignments -> marginal and joint histograms, which the
information-theory layer turns into entropies.  Everything here is a pure
function of its inputs; the returned containers hold read-only arrays.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PriceMatrix:
    """Closing prices for n stocks over m trading days.

    Prices are strictly positive with no missing cells: stocks that were not
    traded over the whole period must be dropped before construction (the
    loaders do this and warn).
    """

    stocks: tuple[str, ...]
    days: tuple[str, ...]
    prices: np.ndarray  # shape (n, m)

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        if prices.ndim != 2:
            raise ValidationError("prices must be a 2-d grid")
        n, m = prices.shape
        if n != len(self.stocks) or m != len(self.days):
            raise ValidationError("price grid shape does not match stock/day labels")
        if len(set(self.stocks)) != n:
            raise ValidationError("duplicate stock identifiers")
        if n < 2:
            raise ValidationError("insufficient data: need at least 2 stocks")
        if m < 3:
            raise ValidationError("insufficient data: need at least 3 trading days")
        if not np.all(np.isfinite(prices)):
            i, t = map(int, np.argwhere(~np.isfinite(prices))[0])
            raise ValidationError(
                f"missing or non-finite price for stock {self.stocks[i]!r} on day {self.days[t]!r}"
            )
        if np.any(prices <= 0):
            i, t = map(int, np.argwhere(prices <= 0)[0])
            raise ValidationError(
                f"non-positive price for stock {self.stocks[i]!r} on day {self.days[t]!r}"
            )
        object.__setattr__(self, "stocks", tuple(self.stocks))
        object.__setattr__(self, "days", tuple(self.days))
        object.__setattr__(self, "prices", _readonly(prices))

    @property
    def n_stocks(self) -> int:
        return len(self.stocks)

    @property
    def n_days(self) -> int:
        return len(self.days)


@dataclass(frozen=True)
class ReturnMatrix:
    """Daily log-returns, one row per stock, exactly m-1 columns."""

    stocks: tuple[str, ...]
    returns: np.ndarray  # shape (n, m-1)

    def __post_init__(self):
        r = np.asarray(self.returns, dtype=float)
        if r.ndim != 2 or r.shape[0] != len(self.stocks):
            raise ValidationError("return grid shape does not match stock labels")
        if not np.all(np.isfinite(r)):
            raise ValidationError("returns contain non-finite values")
        object.__setattr__(self, "stocks", tuple(self.stocks))
        object.__setattr__(self, "returns", _readonly(r))

    @property
    def n_returns(self) -> int:
        return self.returns.shape[1]


@dataclass(frozen=True)
class BinAssignment:
    """Discretization of one series into q bins: a label per observation plus counts."""

    q: int
    labels: np.ndarray  # int labels in [0, q)
    counts: np.ndarray  # length q, sums to len(labels)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if self.q < 2:
            raise ValidationError("q must be at least 2")
        if labels.ndim != 1 or counts.shape != (self.q,):
            raise ValidationError("bad bin assignment shape")
        if labels.size and (labels.min() < 0 or labels.max() >= self.q):
            raise ValidationError("bin label out of range")
        if not np.array_equal(np.bincount(labels, minlength=self.q), counts):
            raise ValidationError("bin counts do not match labels")
        object.__setattr__(self, "labels", _readonly(labels))
        object.__setattr__(self, "counts", _readonly(counts))

    def __len__(self) -> int:
        return int(self.labels.size)


@dataclass(frozen=True)
class Distribution:
    """Probability vector over q bins."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1:
            raise ValidationError("distribution must be a vector")
        if np.any(p < 0):
            raise ValidationError("negative probability")
        import math

        if abs(math.fsum(p.tolist()) - 1.0) > 1e-12:
            raise ValidationError("probabilities do not sum to 1")
        object.__setattr__(self, "p", _readonly(p))


@dataclass(frozen=True)
class JointDistribution:
    """Joint probability grid over q x q bins; `counts` holds the raw cell counts."""

    p: np.ndarray
    counts: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValidationError("joint distribution must be a square grid")
        if np.any(p < 0):
            raise ValidationError("negative probability")
        import math

        if abs(math.fsum(p.ravel().tolist()) - 1.0) > 1e-12:
            raise ValidationError("joint probabilities do not sum to 1")
        object.__setattr__(self, "p", _readonly(p))
        if self.counts is not None:
            counts = np.asarray(self.counts, dtype=np.int64)
            if counts.shape != p.shape:
                raise ValidationError("joint counts shape mismatch")
            object.__setattr__(self, "counts", _readonly(counts))

    @property
    def q(self) -> int:
        return self.p.shape[0]


@dataclass(frozen=True)
class SectorTable:
    """Benchmark mapping from stock identifier to economic sector name."""

    sectors: dict[str, str]

    def sector_of(self, stock: str) -> str:
        try:
            return self.sectors[stock]
        except KeyError:
            raise ValidationError(f"no sector recorded for stock {stock!r}") from None

    def for_stocks(self, stocks: tuple[str, ...] | list[str]) -> tuple[str, ...]:
        """Per-vertex sector labels for an ordered stock list; raises on gaps."""
        return tuple(self.sector_of(s) for s in stocks)


# ---------------------------------------------------------------------------
# loading


def load_price_table(path: str | Path, format: str = "wide") -> PriceMatrix:
    """Load a closing-price CSV and return a validated :class:`PriceMatrix`.

    ``wide`` files have header ``day,STOCK1,STOCK2,...`` with one row per
    trading day.  ``long`` files have header ``day,stock,close``.  Stocks with
    any missing observation are dropped with a warning, mirroring the
    traded-over-the-whole-period selection rule.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"price file not found: {path}")
    if format == "wide":
        stocks, days, grid = _read_wide(path)
    elif format == "long":
        stocks, days, grid = _read_long(path)
    else:
        raise ValidationError(f"unknown price table format {format!r}")

    grid = np.asarray(grid, dtype=float)
    complete = ~np.any(np.isnan(grid), axis=1)
    dropped = [s for s, ok in zip(stocks, complete) if not ok]
    if dropped:
        warnings.warn(
            f"dropping {len(dropped)} stock(s) with missing days: {', '.join(dropped)}",
            stacklevel=2,
        )
    kept = [s for s, ok in zip(stocks, complete) if ok]
    if len(kept) < 2:
        raise ValidationError("insufficient data: fewer than 2 stocks with complete histories")
    return PriceMatrix(tuple(kept), tuple(days), grid[complete])


def _parse_cell(cell: str, lineno: int) -> float:
    cell = cell.strip()
    if cell == "":
        return np.nan
    try:
        return float(cell)
    except ValueError:
        raise ParseError(f"cannot parse price value {cell!r}", line=lineno) from None


def _read_wide(path: Path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty price file", line=1) from None
        if len(header) < 3:
            raise ParseError("wide price file needs a day column and at least 2 stocks", line=1)
        stocks = [c.strip() for c in header[1:]]
        days: list[str] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} columns, found {len(row)}", line=lineno
                )
            days.append(row[0].strip())
            rows.append([_parse_cell(c, lineno) for c in row[1:]])
    if not rows:
        raise ParseError("price file contains no data rows", line=2)
    grid = np.array(rows, dtype=float).T  # stocks x days
    return stocks, days, grid


def _read_long(path: Path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty price file", line=1) from None
        if [c.strip().lower() for c in header] != ["day", "stock", "close"]:
            raise ParseError("long price file must have header day,stock,close", line=1)
        stocks: list[str] = []
        days: list[str] = []
        cells: dict[tuple[str, str], float] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 columns, found {len(row)}", line=lineno)
            day, stock = row[0].strip(), row[1].strip()
            if (day, stock) in cells:
                raise ParseError(f"duplicate entry for stock {stock!r} on day {day!r}", line=lineno)
            if stock not in stocks:
                stocks.append(stock)
            if day not in days:
                days.append(day)
            cells[(day, stock)] = _parse_cell(row[2], lineno)
    if not cells:
        raise ParseError("price file contains no data rows", line=2)
    grid = np.full((len(stocks), len(days)), np.nan)
    for (day, stock), value in cells.items():
        grid[stocks.index(stock), days.index(day)] = value
    return stocks, days, grid


def load_sector_table(path: str | Path) -> SectorTable:
    """Load a ``stock,sector`` CSV."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"sector file not found: {path}")
    sectors: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty sector file", line=1) from None
        if [c.strip().lower() for c in header] != ["stock", "sector"]:
            raise ParseError("sector file must have header stock,sector", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 columns, found {len(row)}", line=lineno)
            stock, sector = row[0].strip(), row[1].strip()
            if stock in sectors:
                raise ParseError(f"duplicate sector entry for stock {stock!r}", line=lineno)
            sectors[stock] = sector
    return SectorTable(sectors)


# ---------------------------------------------------------------------------
# transforms


def log_returns(prices: PriceMatrix) -> ReturnMatrix:
    """R_it = ln(P_it / P_i(t-1)) for t = 2..m."""
    p = prices.prices
    return ReturnMatrix(prices.stocks, np.log(p[:, 1:] / p[:, :-1]))


def bin_series(series, q: int, scheme: str = "quantile") -> BinAssignment:
    """Assign each observation of a series to one of q bins.

    The default ``quantile`` scheme sorts the values ascending (stable, so
    ties keep time order) and cuts them into q contiguous groups whose sizes
    differ by at most one; the first ``len % q`` groups take the extra value.
    The ``width`` alternative cuts [min, max] into q equal-width intervals.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValidationError("series must be one-dimensional")
    if q < 2:
        raise ValidationError("q must be at least 2")
    n = x.size
    if n < q:
        raise ValidationError(f"too few observations for {q} bins (series length {n})")
    if scheme == "quantile":
        order = np.argsort(x, kind="stable")
        base, extra = divmod(n, q)
        labels = np.empty(n, dtype=np.int64)
        pos = 0
        for b in range(q):
            size = base + 1 if b < extra else base
            labels[order[pos : pos + size]] = b
            pos += size
    elif scheme == "width":
        lo, hi = float(x.min()), float(x.max())
        if hi == lo:
            labels = np.zeros(n, dtype=np.int64)
        else:
            labels = np.minimum((((x - lo) / (hi - lo)) * q).astype(np.int64), q - 1)
    else:
        raise ValidationError(f"unknown binning scheme {scheme!r}")
    return BinAssignment(q, labels, np.bincount(labels, minlength=q))


def marginal_distribution(bins: BinAssignment) -> Distribution:
    """p_a = f_a / sum(f); normalized by the observation count."""
    total = int(bins.counts.sum())
    return Distribution(bins.counts / total)


def joint_histogram(a: BinAssignment, b: BinAssignment) -> JointDistribution:
    """Joint cell probabilities for two bin assignments of equal length and q."""
    if a.q != b.q:
        raise ValidationError(f"bin counts differ: {a.q} vs {b.q}")
    if len(a) != len(b):
        raise ValidationError(f"series lengths differ: {len(a)} vs {len(b)}")
    q = a.q
    counts = np.bincount(a.labels * q + b.labels, minlength=q * q).reshape(q, q)
    return JointDistribution(counts / len(a), counts)
