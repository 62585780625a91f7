"""Seeded experiment protocols: clique homogeneity, clustering agreement,
and edge-removal robustness for PD vs PMFG networks.

Every experiment is a deterministic function of (inputs, master seed).
Per-sample seeds are derived by hashing (master seed, experiment name,
parameter, sample index), so adding samples never perturbs existing ones.
Reports keep per-record values at full precision; aggregates are recomputed
from the records by fixed-order summation.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .clustering import Partition, eigengap_k, louvain, modularity, nsc_sweep, spectrum
from .errors import ValidationError
from .filters import build_pd, build_pmfg, degree_budgets, pd_build_report, round_half_up
from .graph import (
    Network,
    enumerate_m_cliques,
    maximal_cliques,
    write_network_csv,
    write_vertex_table,
)
from .infotheory import SimilarityMatrix, similarity_matrix, write_similarity_csv
from .ingest import PriceMatrix, SectorTable, load_price_table, load_sector_table, log_returns
from .metrics import ari, clique_homogeneity, dominant_sector, sector_partition

#: Reference values measured on a proprietary ASX 200 dataset (125 stocks
#: traded throughout 2013-2016, 1013 trading days, q = 20).  They cannot be
#: reproduced without that data and are carried in reports as annotations
#: only, never asserted.
ASX_REFERENCE = {
    "dataset": "ASX 200 2013-2016, 125 stocks traded throughout the period (proprietary)",
    "q": 20,
    "maximal_clique_homogeneity": {
        "pd": {"numerator": 47, "denominator": 87, "value": 0.54},
        "pmfg": {"numerator": 43, "denominator": 122, "value": 0.35},
    },
    "clique3_homogeneity": {
        "pd": {"numerator": 178, "denominator": 236, "value": 0.75},
        "pmfg": {"numerator": 152, "denominator": 367, "value": 0.41},
    },
    "clique4_homogeneity": {
        "pd": {"numerator": 91, "denominator": 101, "value": 0.90},
        "pmfg": {"numerator": 43, "denominator": 122, "value": 0.35},
    },
    "pd_maximal_clique_census": {"size3": 52, "size4": 23, "size5": 9, "size6": 3},
    "pd_degree_range": [1, 9],
    "pmfg_degree_range": [3, 29],
    "louvain_mean_ari_vs_sectors": {"pd": 0.31, "pmfg": 0.26},
    "louvain_cluster_counts": {"pd": 7, "pmfg": 6, "complete": 4},
    "louvain_ari_vs_complete_benchmark": {"pd": 0.40, "pmfg": 0.36},
    "nsc_ari_vs_sectors_by_k": {
        "5": {"pd": 0.195, "pmfg": 0.0585, "complete": 0.121},
        "6": {"pd": 0.197, "pmfg": 0.0921, "complete": 0.124},
        "7": {"pd": 0.195, "pmfg": 0.069, "complete": 0.229},
        "8": {"pd": 0.236, "pmfg": 0.1665, "complete": 0.27},
        "9": {"pd": 0.339, "pmfg": 0.1557, "complete": 0.352},
        "10": {"pd": 0.242, "pmfg": 0.1015, "complete": 0.376},
        "11": {"pd": 0.274, "pmfg": 0.0833, "complete": 0.29},
        "12": {"pd": 0.279, "pmfg": 0.0799, "complete": 0.33},
    },
    "similarity_eigengaps": {"4-5": 0.74, "10-11": 0.35, "11-12": 0.16},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs for the comparison suite; defaults follow the reference protocol."""

    q: int = 20
    m_edges: int | None = None  # None: M = 3n - 6
    proportions: tuple[float, ...] = (4 / 5, 3 / 4, 2 / 3, 1 / 2)
    samples_per_r: int = 10
    louvain_orders: int = 100
    removal_fractions: tuple[float, ...] = (0.2, 0.3, 0.4)
    removal_samples: int = 100
    k_min: int = 4
    k_max: int = 12
    master_seed: int = 0

    def __post_init__(self):
        if self.q < 2:
            raise ValidationError("q must be at least 2")
        for name in ("samples_per_r", "louvain_orders", "removal_samples"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be at least 1")
        if not all(0 < r <= 1 for r in self.proportions):
            raise ValidationError("proportions must lie in (0, 1]")
        if not all(0 < f < 1 for f in self.removal_fractions):
            raise ValidationError("removal fractions must lie in (0, 1)")
        if self.k_min < 2 or self.k_max < self.k_min:
            raise ValidationError("need 2 <= k_min <= k_max")
        object.__setattr__(self, "proportions", tuple(float(r) for r in self.proportions))
        object.__setattr__(self, "removal_fractions", tuple(float(f) for f in self.removal_fractions))

    def ks(self, n: int) -> list[int]:
        """NSC sweep range clipped to the valid [2, n-1] window."""
        return [k for k in range(self.k_min, self.k_max + 1) if 2 <= k <= n - 1]


@dataclass
class ExperimentReport:
    """Per-run records plus aggregates recomputable from them."""

    name: str
    params: dict
    records: list[dict]
    aggregates: dict
    reference: dict | None = None

    def as_dict(self) -> dict:
        out = {
            "experiment": self.name,
            "params": self.params,
            "records": self.records,
            "aggregates": self.aggregates,
        }
        if self.reference is not None:
            out["reference"] = self.reference
        return out

    def write_json(self, path: str | Path) -> None:
        write_json(self.as_dict(), path)


def write_json(obj, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def derive_seed(master_seed: int, experiment: str, param, index: int) -> int:
    """Stable per-sample seed from (master seed, experiment, parameter, index)."""
    key = f"{master_seed}|{experiment}|{param!r}|{index}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def _mean(values) -> float:
    vals = list(values)
    return sum(vals) / len(vals)


def _variance(values) -> float:
    vals = list(values)
    m = _mean(vals)
    return sum((v - m) ** 2 for v in vals) / len(vals)


def _round_sig(value, digits: int = 6):
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    return value


# ---------------------------------------------------------------------------
# clique homogeneity on random stock subsets (scatter data for the clique figures)


def _homogeneity_record(network: Network, vertex_sectors) -> dict:
    maximal = [c for c in maximal_cliques(network, min_size=3)]
    c3 = enumerate_m_cliques(network, 3)
    c4 = enumerate_m_cliques(network, 4)
    rec = {}
    for label, cliques in (("maximal", maximal), ("clique3", c3), ("clique4", c4)):
        if cliques:
            h = clique_homogeneity(cliques, vertex_sectors)
            rec[f"{label}_homogeneity"] = h.ratio
            rec[f"{label}_homogeneous"] = h.homogeneous
            rec[f"{label}_total"] = h.total
        else:
            rec[f"{label}_homogeneity"] = None
            rec[f"{label}_homogeneous"] = 0
            rec[f"{label}_total"] = 0
    return rec


def subset_homogeneity(sim: SimilarityMatrix, sectors: SectorTable,
                       cfg: ExperimentConfig) -> ExperimentReport:
    """Clique homogeneity of PD and PMFG rebuilt on random stock subsets.

    For each proportion r, draws ``samples_per_r`` subsets of round(r*n)
    stocks, rebuilds both filters on the restricted similarity matrix, and
    scores maximal (size >= 3), 3-clique, and 4-clique homogeneity.
    """
    n = sim.n
    records: list[dict] = []
    for r in cfg.proportions:
        size = round_half_up(r * n)
        if size < 3:
            raise ValidationError(f"subset proportion {r} keeps fewer than 3 stocks")
        for sample in range(cfg.samples_per_r):
            seed = derive_seed(cfg.master_seed, "subset_homogeneity", r, sample)
            if size >= n:
                chosen = list(range(n))
            else:
                rng = np.random.default_rng(seed)
                chosen = sorted(int(i) for i in rng.choice(n, size=size, replace=False))
            sub = sim.restrict(chosen)
            sub_sectors = sectors.for_stocks(sub.stocks)
            m = cfg.m_edges if cfg.m_edges is not None else 3 * sub.n - 6
            for filter_name, builder in (("pd", lambda s: build_pd(s, m)), ("pmfg", build_pmfg)):
                net = builder(sub)
                rec = {
                    "r": r,
                    "sample": sample,
                    "seed": seed,
                    "n": sub.n,
                    "filter": filter_name,
                }
                rec.update(_homogeneity_record(net, sub_sectors))
                records.append(rec)
    aggregates = subset_homogeneity_aggregates(records)
    params = {
        "proportions": list(cfg.proportions),
        "samples_per_r": cfg.samples_per_r,
        "q": cfg.q,
        "master_seed": cfg.master_seed,
    }
    reference = {
        "dataset": ASX_REFERENCE["dataset"],
        "maximal_clique_homogeneity": ASX_REFERENCE["maximal_clique_homogeneity"],
        "clique3_homogeneity": ASX_REFERENCE["clique3_homogeneity"],
        "clique4_homogeneity": ASX_REFERENCE["clique4_homogeneity"],
    }
    return ExperimentReport("subset_homogeneity", params, records, aggregates, reference)


def subset_homogeneity_aggregates(records: list[dict]) -> dict:
    out: dict[str, dict] = {}
    pairs = sorted({(rec["r"], rec["filter"]) for rec in records})
    for r, filter_name in pairs:
        sub = [rec for rec in records if rec["r"] == r and rec["filter"] == filter_name]
        entry: dict = {"samples": len(sub)}
        for label in ("maximal", "clique3", "clique4"):
            vals = [rec[f"{label}_homogeneity"] for rec in sub
                    if rec[f"{label}_homogeneity"] is not None]
            entry[f"mean_{label}_homogeneity"] = _mean(vals) if vals else None
            entry[f"defined_{label}"] = len(vals)
        out[f"r={r!r}|filter={filter_name}"] = entry
    return out


# ---------------------------------------------------------------------------
# Louvain agreement study


def louvain_ari_study(pd_net: Network, pmfg_net: Network, sim: SimilarityMatrix,
                      sectors: SectorTable, cfg: ExperimentConfig) -> ExperimentReport:
    """Louvain over many random vertex orders on both filtered networks.

    Each run is scored against the sector partition and against the Louvain
    partition of the complete NMI graph (the order-independent benchmark run).
    """
    vertex_sectors = sectors.for_stocks(sim.stocks)
    sector_part = sector_partition(vertex_sectors)
    bench_seed = derive_seed(cfg.master_seed, "louvain_benchmark", 0, 0)
    benchmark = louvain(sim.s, seed=bench_seed)
    records: list[dict] = []
    networks = {"pd": pd_net, "pmfg": pmfg_net}
    for name, net in networks.items():
        weights = net.adjacency_matrix(weighted=True)
        for idx in range(cfg.louvain_orders):
            seed = derive_seed(cfg.master_seed, "louvain_orders", name, idx)
            part = louvain(weights, seed=seed)
            records.append(
                {
                    "network": name,
                    "order_index": idx,
                    "seed": seed,
                    "clusters": part.k,
                    "modularity": modularity(weights, part),
                    "ari_vs_sectors": ari(part, sector_part),
                    "ari_vs_benchmark": ari(part, benchmark),
                }
            )
    aggregates = louvain_ari_aggregates(records)
    aggregates["benchmark_clusters"] = benchmark.k
    params = {
        "louvain_orders": cfg.louvain_orders,
        "master_seed": cfg.master_seed,
        "benchmark_seed": bench_seed,
    }
    reference = {
        "dataset": ASX_REFERENCE["dataset"],
        "mean_ari_vs_sectors": ASX_REFERENCE["louvain_mean_ari_vs_sectors"],
        "cluster_counts": ASX_REFERENCE["louvain_cluster_counts"],
        "ari_vs_complete_benchmark": ASX_REFERENCE["louvain_ari_vs_complete_benchmark"],
    }
    return ExperimentReport("louvain_ari_study", params, records, aggregates, reference)


def louvain_ari_aggregates(records: list[dict]) -> dict:
    out: dict = {}
    for name in sorted({rec["network"] for rec in records}):
        sub = [rec for rec in records if rec["network"] == name]
        out[name] = {
            "runs": len(sub),
            "mean_ari_vs_sectors": _mean(rec["ari_vs_sectors"] for rec in sub),
            "mean_ari_vs_benchmark": _mean(rec["ari_vs_benchmark"] for rec in sub),
            "mean_modularity": _mean(rec["modularity"] for rec in sub),
        }
    return out


# ---------------------------------------------------------------------------
# NSC agreement sweep over k


def _nsc_partitions(matrix: np.ndarray, ks: list[int], master_seed: int,
                    tag: str) -> dict[int, Partition]:
    return nsc_sweep(matrix, ks, lambda k: derive_seed(master_seed, "nsc", tag, k))


def nsc_ari_sweep(sim: SimilarityMatrix, pd_net: Network, pmfg_net: Network,
                  sectors: SectorTable, cfg: ExperimentConfig) -> ExperimentReport:
    """ARI of NSC partitions: complete NMI graph vs each filtered network per k.

    The filtered networks enter NSC through their 0/1 adjacency matrices; the
    complete graph through the NMI weights.  The eigengap-selected k of the
    similarity matrix is flagged in the records.
    """
    n = sim.n
    ks = cfg.ks(n)
    if not ks:
        raise ValidationError("empty k range after clipping to [2, n-1]")
    vertex_sectors = sectors.for_stocks(sim.stocks)
    sector_part = sector_partition(vertex_sectors)
    c_k = _nsc_partitions(sim.s, ks, cfg.master_seed, "complete")
    c_pd = _nsc_partitions(pd_net.adjacency_matrix(), ks, cfg.master_seed, "pd")
    c_pmfg = _nsc_partitions(pmfg_net.adjacency_matrix(), ks, cfg.master_seed, "pmfg")
    gap_k, gaps = similarity_eigengaps(sim, cfg)
    records = []
    for k in ks:
        records.append(
            {
                "k": k,
                "ari_complete_pd": ari(c_k[k], c_pd[k]),
                "ari_complete_pmfg": ari(c_k[k], c_pmfg[k]),
                "ari_sectors_pd": ari(c_pd[k], sector_part),
                "ari_sectors_pmfg": ari(c_pmfg[k], sector_part),
                "ari_sectors_complete": ari(c_k[k], sector_part),
                "eigengap_selected": k == gap_k,
            }
        )
    aggregates = {
        "eigengap_k": gap_k,
        "top_gaps": gaps[:3],
        "mean_ari_complete_pd": _mean(rec["ari_complete_pd"] for rec in records),
        "mean_ari_complete_pmfg": _mean(rec["ari_complete_pmfg"] for rec in records),
    }
    params = {"k_range": ks, "master_seed": cfg.master_seed}
    reference = {
        "dataset": ASX_REFERENCE["dataset"],
        "nsc_ari_vs_sectors_by_k": ASX_REFERENCE["nsc_ari_vs_sectors_by_k"],
        "similarity_eigengaps": ASX_REFERENCE["similarity_eigengaps"],
    }
    return ExperimentReport("nsc_ari_sweep", params, records, aggregates, reference)


def similarity_eigengaps(sim: SimilarityMatrix, cfg: ExperimentConfig):
    """Eigengap-selected k plus all gaps (descending) for the NMI matrix."""
    spec = spectrum(sim.s)
    k_max = min(cfg.k_max, sim.n - 1)
    gap_k = eigengap_k(spec, k_min=min(cfg.k_min, k_max), k_max=k_max)
    gaps = sorted(
        ([int(k), float(spec.values[k] - spec.values[k - 1])]
         for k in range(min(cfg.k_min, k_max), k_max + 1)),
        key=lambda kv: (-kv[1], kv[0]),
    )
    return gap_k, gaps


# ---------------------------------------------------------------------------
# NSC agreement on random stock subsets


def subset_ari_study(sim: SimilarityMatrix, sectors: SectorTable,
                     cfg: ExperimentConfig) -> ExperimentReport:
    """Average NSC agreement (complete vs PD / PMFG) on random stock subsets."""
    n = sim.n
    records: list[dict] = []
    for r in cfg.proportions:
        size = round_half_up(r * n)
        if size < 3:
            raise ValidationError(f"subset proportion {r} keeps fewer than 3 stocks")
        for sample in range(cfg.samples_per_r):
            seed = derive_seed(cfg.master_seed, "subset_ari", r, sample)
            if size >= n:
                chosen = list(range(n))
            else:
                rng = np.random.default_rng(seed)
                chosen = sorted(int(i) for i in rng.choice(n, size=size, replace=False))
            sub = sim.restrict(chosen)
            m = cfg.m_edges if cfg.m_edges is not None else 3 * sub.n - 6
            pd_net = build_pd(sub, m)
            pmfg_net = build_pmfg(sub)
            ks = cfg.ks(sub.n)
            c_k = _nsc_partitions(sub.s, ks, seed, "complete")
            c_pd = _nsc_partitions(pd_net.adjacency_matrix(), ks, seed, "pd")
            c_pmfg = _nsc_partitions(pmfg_net.adjacency_matrix(), ks, seed, "pmfg")
            for k in ks:
                records.append(
                    {
                        "r": r,
                        "sample": sample,
                        "seed": seed,
                        "n": sub.n,
                        "k": k,
                        "ari_complete_pd": ari(c_k[k], c_pd[k]),
                        "ari_complete_pmfg": ari(c_k[k], c_pmfg[k]),
                    }
                )
    aggregates = subset_ari_aggregates(records)
    params = {
        "proportions": list(cfg.proportions),
        "samples_per_r": cfg.samples_per_r,
        "k_range": [cfg.k_min, cfg.k_max],
        "master_seed": cfg.master_seed,
    }
    return ExperimentReport("subset_ari_study", params, records, aggregates)


def subset_ari_aggregates(records: list[dict]) -> dict:
    out: dict[str, dict] = {}
    keys = sorted({(rec["r"], rec["k"]) for rec in records})
    for r, k in keys:
        sub = [rec for rec in records if rec["r"] == r and rec["k"] == k]
        out[f"r={r!r}|k={k}"] = {
            "samples": len(sub),
            "mean_ari_complete_pd": _mean(rec["ari_complete_pd"] for rec in sub),
            "mean_ari_complete_pmfg": _mean(rec["ari_complete_pmfg"] for rec in sub),
        }
    return out


# ---------------------------------------------------------------------------
# robustness under random edge removal


def edge_removal_robustness(pd_net: Network, pmfg_net: Network, sim: SimilarityMatrix,
                            cfg: ExperimentConfig) -> ExperimentReport:
    """NSC agreement with the complete graph after random edge deletion.

    For each fraction f, ``removal_samples`` random edge subsets of size
    round(f*|E|) are deleted (uniform, without replacement) and the damaged
    network is re-clustered per k.  The variance across the mean ARIs of the
    four states {0, f1, f2, f3} measures cluster stability.
    """
    n = sim.n
    ks = cfg.ks(n)
    if not ks:
        raise ValidationError("empty k range after clipping to [2, n-1]")
    c_k = _nsc_partitions(sim.s, ks, cfg.master_seed, "complete")
    records: list[dict] = []
    networks = {"pd": pd_net, "pmfg": pmfg_net}
    for name, net in networks.items():
        baseline = _nsc_partitions(net.adjacency_matrix(), ks, cfg.master_seed, name)
        for k in ks:
            records.append(
                {
                    "network": name,
                    "fraction": 0.0,
                    "sample": 0,
                    "seed": cfg.master_seed,
                    "k": k,
                    "ari_vs_complete": ari(c_k[k], baseline[k]),
                }
            )
        for f in cfg.removal_fractions:
            n_remove = round_half_up(f * net.n_edges)
            if n_remove >= net.n_edges:
                raise ValidationError(f"removal fraction {f} leaves no edges")
            for sample in range(cfg.removal_samples):
                seed = derive_seed(cfg.master_seed, "edge_removal", (name, f), sample)
                rng = np.random.default_rng(seed)
                drop = rng.choice(net.n_edges, size=n_remove, replace=False)
                damaged = net.drop_edges(drop)
                parts = _nsc_partitions(damaged.adjacency_matrix(), ks, seed, name)
                for k in ks:
                    records.append(
                        {
                            "network": name,
                            "fraction": f,
                            "sample": sample,
                            "seed": seed,
                            "k": k,
                            "ari_vs_complete": ari(c_k[k], parts[k]),
                        }
                    )
    aggregates = edge_removal_aggregates(records)
    params = {
        "removal_fractions": list(cfg.removal_fractions),
        "removal_samples": cfg.removal_samples,
        "k_range": ks,
        "master_seed": cfg.master_seed,
    }
    return ExperimentReport("edge_removal_robustness", params, records, aggregates)


def edge_removal_aggregates(records: list[dict]) -> dict:
    means: dict[str, dict] = {}
    keys = sorted({(rec["network"], rec["fraction"], rec["k"]) for rec in records})
    for name, f, k in keys:
        sub = [rec for rec in records
               if rec["network"] == name and rec["fraction"] == f and rec["k"] == k]
        means[f"network={name}|f={f!r}|k={k}"] = {
            "samples": len(sub),
            "mean_ari_vs_complete": _mean(rec["ari_vs_complete"] for rec in sub),
        }
    variances: dict[str, dict] = {}
    fractions = sorted({rec["fraction"] for rec in records})
    for name in sorted({rec["network"] for rec in records}):
        for k in sorted({rec["k"] for rec in records}):
            state_means = [
                means[f"network={name}|f={f!r}|k={k}"]["mean_ari_vs_complete"]
                for f in fractions
            ]
            variances[f"network={name}|k={k}"] = {
                "variance_of_state_means": _variance(state_means),
                "states": len(state_means),
            }
    return {"means": means, "variances": variances}


# ---------------------------------------------------------------------------
# synthetic market generator


def synth_market(n: int, sectors: int, days: int, intra: float, inter: float,
                 seed: int) -> tuple[PriceMatrix, SectorTable]:
    """Factor-model price paths with a planted sector structure.

    Each sector has a latent daily return factor; stock returns are
    intra * sector factor + inter * market factor + unit idiosyncratic noise,
    scaled to daily-return magnitudes, and prices exponentiate the cumulative
    returns from a base of 100.
    """
    if sectors < 2 or n < sectors:
        raise ValidationError("need n >= sectors >= 2")
    if days < 3:
        raise ValidationError("need at least 3 days")
    if intra < 0 or inter < 0:
        raise ValidationError("factor couplings must be non-negative")
    rng = np.random.default_rng(seed)
    steps = days - 1
    sector_factors = rng.standard_normal((sectors, steps))
    market_factor = rng.standard_normal(steps)
    idio = rng.standard_normal((n, steps))
    base, extra = divmod(n, sectors)
    sector_of = []
    for s in range(sectors):
        sector_of.extend([s] * (base + 1 if s < extra else base))
    returns = 0.02 * (
        intra * sector_factors[np.array(sector_of)] + inter * market_factor[None, :] + idio
    )
    log_prices = np.concatenate([np.zeros((n, 1)), np.cumsum(returns, axis=1)], axis=1)
    prices = 100.0 * np.exp(log_prices)
    width = len(str(n))
    stocks = tuple(f"S{i + 1:0{width}d}" for i in range(n))
    day_labels = tuple(f"D{t + 1:04d}" for t in range(days))
    table = SectorTable({stocks[i]: f"SEC{sector_of[i] + 1}" for i in range(n)})
    return PriceMatrix(stocks, day_labels, prices), table


def write_price_csv(prices: PriceMatrix, path: str | Path) -> None:
    """Wide-format price CSV (day label column plus one column per stock)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("day," + ",".join(prices.stocks) + "\n")
        for t, day in enumerate(prices.days):
            fh.write(day + "," + ",".join("%.17g" % v for v in prices.prices[:, t]) + "\n")


def write_sector_csv(table: SectorTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("stock,sector\n")
        for stock, sector in table.sectors.items():
            fh.write(f"{stock},{sector}\n")


def write_partition_csv(stocks, partition: Partition, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("stock,cluster\n")
        for stock, cluster in zip(stocks, partition.assignment):
            fh.write(f"{stock},{cluster}\n")


# ---------------------------------------------------------------------------
# end-to-end pipeline


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if v is None else repr(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def run_pipeline(cfg: ExperimentConfig, price_path: str | Path,
                 sector_path: str | Path | None, out_dir: str | Path,
                 price_format: str = "wide") -> dict:
    """Ingest prices, build the NMI similarity matrix and both filtered
    networks, run every study, and write the full output tree.

    Returns the reports keyed by study name.  Reruns with the same config and
    inputs produce byte-identical output trees.
    """
    out = Path(out_dir)
    (out / "partitions").mkdir(parents=True, exist_ok=True)
    (out / "reports").mkdir(exist_ok=True)
    (out / "figures").mkdir(exist_ok=True)

    prices = load_price_table(price_path, format=price_format)
    if sector_path is None:
        raise ValidationError("sector file required: all comparison studies are sector-dependent")
    sectors = load_sector_table(sector_path)
    vertex_sectors = sectors.for_stocks(prices.stocks)  # fails fast on gaps

    returns = log_returns(prices)
    sim = similarity_matrix(returns, cfg.q)
    write_similarity_csv(sim, out / "similarity.csv")

    n = sim.n
    m = cfg.m_edges if cfg.m_edges is not None else 3 * n - 6
    pd_net = Network(sim.stocks, build_pd(sim, m).edges, vertex_sectors)
    pmfg_net = Network(sim.stocks, build_pmfg(sim).edges, vertex_sectors)
    write_network_csv(pd_net, out / "network_pd.csv")
    write_network_csv(pmfg_net, out / "network_pmfg.csv")
    write_vertex_table(pd_net, out / "vertices.csv")
    write_json(pd_build_report(sim, m, network=pd_net), out / "reports" / "pd_build.json")

    # full-data clique homogeneity (the headline comparison)
    clique_reports = []
    for name, net in (("pd", pd_net), ("pmfg", pmfg_net)):
        rec = _homogeneity_record(net, vertex_sectors)
        for label in ("maximal", "clique3", "clique4"):
            clique_reports.append(
                {
                    "metric": f"{label}_clique_homogeneity",
                    "value": rec[f"{label}_homogeneity"],
                    "numerator": rec[f"{label}_homogeneous"],
                    "denominator": rec[f"{label}_total"],
                    "params": {"network": name, "min_size": 3 if label == "maximal" else None},
                }
            )
    write_json(
        {"records": clique_reports, "reference": {
            "dataset": ASX_REFERENCE["dataset"],
            "maximal_clique_homogeneity": ASX_REFERENCE["maximal_clique_homogeneity"],
            "clique3_homogeneity": ASX_REFERENCE["clique3_homogeneity"],
            "clique4_homogeneity": ASX_REFERENCE["clique4_homogeneity"],
        }},
        out / "reports" / "cliques_full.json",
    )

    reports: dict[str, ExperimentReport] = {}
    reports["subset_homogeneity"] = subset_homogeneity(sim, sectors, cfg)
    reports["louvain_ari_study"] = louvain_ari_study(pd_net, pmfg_net, sim, sectors, cfg)
    reports["nsc_ari_sweep"] = nsc_ari_sweep(sim, pd_net, pmfg_net, sectors, cfg)
    reports["subset_ari_study"] = subset_ari_study(sim, sectors, cfg)
    reports["edge_removal_robustness"] = edge_removal_robustness(pd_net, pmfg_net, sim, cfg)
    for name, report in reports.items():
        report.write_json(out / "reports" / f"{name}.json")

    _write_figures(out / "figures", reports, cfg)
    _write_partitions(out / "partitions", sim, pd_net, pmfg_net, cfg)

    summary = {
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in asdict(cfg).items()},
        "n_stocks": n,
        "n_days": prices.n_days,
        "m_edges": m,
        "pd_edges": pd_net.n_edges,
        "pmfg_edges": pmfg_net.n_edges,
        "pd_degree_range": [min(pd_net.degrees()), max(pd_net.degrees())],
        "pmfg_degree_range": [min(pmfg_net.degrees()), max(pmfg_net.degrees())],
        "clique_homogeneity": [
            {k: (_round_sig(v) if k == "value" else v) for k, v in rec.items()}
            for rec in clique_reports
        ],
        "louvain_mean_ari_vs_sectors": {
            name: _round_sig(agg["mean_ari_vs_sectors"])
            for name, agg in reports["louvain_ari_study"].aggregates.items()
            if isinstance(agg, dict)
        },
        "eigengap_k": reports["nsc_ari_sweep"].aggregates["eigengap_k"],
        "reference": ASX_REFERENCE,
    }
    write_json(summary, out / "reports" / "summary.json")
    return reports


def _write_figures(fig_dir: Path, reports: dict, cfg: ExperimentConfig) -> None:
    # clique homogeneity scatters: one row per (r, sample), columns pd/pmfg
    hom = reports["subset_homogeneity"].records
    for label, fname in (("maximal", "homogeneity_maximal.csv"),
                         ("clique3", "homogeneity_3cliques.csv"),
                         ("clique4", "homogeneity_4cliques.csv")):
        rows = []
        keys = sorted({(rec["r"], rec["sample"]) for rec in hom})
        for r, sample in keys:
            by_filter = {rec["filter"]: rec for rec in hom
                         if rec["r"] == r and rec["sample"] == sample}
            rows.append([r, sample,
                         by_filter["pd"][f"{label}_homogeneity"],
                         by_filter["pmfg"][f"{label}_homogeneity"]])
        _write_csv(fig_dir / fname, ["r", "sample", "pd", "pmfg"], rows)

    sweep = reports["nsc_ari_sweep"].records
    _write_csv(
        fig_dir / "nsc_ari_vs_k.csv",
        ["k", "ari_complete_pd", "ari_complete_pmfg", "eigengap_selected"],
        [[rec["k"], rec["ari_complete_pd"], rec["ari_complete_pmfg"],
          int(rec["eigengap_selected"])] for rec in sweep],
    )

    agg = reports["subset_ari_study"].aggregates
    rows = []
    for key in sorted(agg):
        entry = agg[key]
        r = float(key.split("|")[0].split("=")[1])
        k = int(key.split("|")[1].split("=")[1])
        rows.append([r, k, entry["mean_ari_complete_pd"], entry["mean_ari_complete_pmfg"]])
    _write_csv(fig_dir / "subset_ari.csv", ["r", "k", "mean_pd", "mean_pmfg"], rows)

    rob = reports["edge_removal_robustness"].aggregates
    fractions = [0.0] + list(cfg.removal_fractions)
    for name in ("pd", "pmfg"):
        rows = []
        ks = sorted({int(key.split("|")[2].split("=")[1])
                     for key in rob["means"] if key.startswith(f"network={name}|")})
        for k in ks:
            row = [k]
            for f in fractions:
                row.append(rob["means"][f"network={name}|f={f!r}|k={k}"]["mean_ari_vs_complete"])
            rows.append(row)
        _write_csv(fig_dir / f"robustness_{name}.csv",
                   ["k"] + [f"mean_ari_f{f!r}" for f in fractions], rows)
    rows = []
    ks = sorted({int(key.split("|")[1].split("=")[1]) for key in rob["variances"]})
    for k in ks:
        rows.append([k,
                     rob["variances"][f"network=pd|k={k}"]["variance_of_state_means"],
                     rob["variances"][f"network=pmfg|k={k}"]["variance_of_state_means"]])
    _write_csv(fig_dir / "robustness_variance.csv", ["k", "var_pd", "var_pmfg"], rows)


def _write_partitions(part_dir: Path, sim: SimilarityMatrix, pd_net: Network,
                      pmfg_net: Network, cfg: ExperimentConfig) -> None:
    bench_seed = derive_seed(cfg.master_seed, "louvain_benchmark", 0, 0)
    benchmark = louvain(sim.s, seed=bench_seed)
    write_partition_csv(sim.stocks, benchmark, part_dir / "louvain_complete.csv")
    for name, net in (("pd", pd_net), ("pmfg", pmfg_net)):
        seed = derive_seed(cfg.master_seed, "louvain_orders", name, 0)
        part = louvain(net.adjacency_matrix(weighted=True), seed=seed)
        write_partition_csv(net.stocks, part, part_dir / f"louvain_{name}.csv")
    gap_k, _ = similarity_eigengaps(sim, cfg)
    ks = [gap_k]
    for tag, matrix, stocks in (
        ("complete", sim.s, sim.stocks),
        ("pd", pd_net.adjacency_matrix(), pd_net.stocks),
        ("pmfg", pmfg_net.adjacency_matrix(), pmfg_net.stocks),
    ):
        parts = _nsc_partitions(matrix, ks, cfg.master_seed, tag)
        write_partition_csv(stocks, parts[gap_k], part_dir / f"nsc_k{gap_k}_{tag}.csv")


def dominant_sector_table(partition: Partition, vertex_sectors) -> list[dict]:
    """Cluster size, dominant sector, and share, one row per cluster."""
    rows = []
    for cid, members in enumerate(partition.clusters()):
        sector, share = dominant_sector(members, vertex_sectors)
        rows.append(
            {"cluster": cid, "size": len(members), "dominant": sector, "share": share}
        )
    return rows
