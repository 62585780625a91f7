"""Command-line interface: build networks, run analyses, generate synthetic data.

Exit codes: 0 on success, 2 on validation/configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import CorrnetError, ValidationError
from .experiments import (
    ExperimentConfig,
    edge_removal_robustness,
    louvain_ari_study,
    nsc_ari_sweep,
    run_pipeline,
    subset_ari_study,
    subset_homogeneity,
    synth_market,
    write_price_csv,
    write_sector_csv,
)
from .filters import build_pd, build_pmfg, pd_build_report
from .graph import Network, write_network_csv, write_vertex_table
from .infotheory import similarity_matrix, write_similarity_csv
from .ingest import load_price_table, load_sector_table, log_returns


def _parse_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` config file (# starts a comment)."""
    values: dict[str, object] = {}
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"config file not found: {path}")
    for lineno, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip()] = _parse_value(value.strip())
    return values


def _parse_value(text: str):
    if "," in text:
        return tuple(_parse_value(part.strip()) for part in text.split(",") if part.strip())
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text.strip("\"'")


_CONFIG_FIELDS = {
    "q", "m_edges", "proportions", "samples_per_r", "louvain_orders",
    "removal_fractions", "removal_samples", "k_min", "k_max", "master_seed",
}


def _config_from_file(path: str | None, seed: int | None) -> tuple[ExperimentConfig, dict]:
    raw = _parse_config_file(path) if path else {}
    extras = {k: v for k, v in raw.items() if k not in _CONFIG_FIELDS}
    fields = {k: v for k, v in raw.items() if k in _CONFIG_FIELDS}
    for tuple_key in ("proportions", "removal_fractions"):
        if tuple_key in fields and not isinstance(fields[tuple_key], tuple):
            fields[tuple_key] = (fields[tuple_key],)
    if seed is not None:
        fields["master_seed"] = seed
    return ExperimentConfig(**fields), extras


def _cmd_build(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    prices = load_price_table(args.input, format=args.format)
    sectors = load_sector_table(args.sectors) if args.sectors else None
    vertex_sectors = sectors.for_stocks(prices.stocks) if sectors else None
    sim = similarity_matrix(log_returns(prices), args.q)
    write_similarity_csv(sim, out / "similarity.csv")
    if args.filter == "pd":
        net = build_pd(sim)
        report = pd_build_report(sim, network=net)
        print(f"pd: {report['realized_edges']} edges (target {report['target_edges']}, "
              f"shortfall {report['shortfall']})")
    else:
        net = build_pmfg(sim)
        print(f"pmfg: {net.n_edges} edges")
    net = Network(net.stocks, net.edges, vertex_sectors)
    write_network_csv(net, out / f"network_{args.filter}.csv")
    write_vertex_table(net, out / "vertices.csv")
    print(f"wrote {out}/similarity.csv, {out}/network_{args.filter}.csv, {out}/vertices.csv")
    return 0


def _cmd_analyze(args) -> int:
    cfg, extras = _config_from_file(args.config, args.seed)
    price_path = extras.get("prices")
    sector_path = extras.get("sectors")
    out_dir = Path(str(extras.get("out", "corrnet_out")))
    if price_path is None:
        raise ValidationError("config must set `prices = <csv path>`")
    if sector_path is None:
        raise ValidationError("config must set `sectors = <csv path>` (all studies are sector-dependent)")
    if args.study == "all":
        run_pipeline(cfg, str(price_path), str(sector_path), out_dir,
                     price_format=str(extras.get("format", "wide")))
        print(f"wrote full pipeline output under {out_dir}/")
        return 0

    prices = load_price_table(str(price_path), format=str(extras.get("format", "wide")))
    sectors = load_sector_table(str(sector_path))
    sectors.for_stocks(prices.stocks)
    sim = similarity_matrix(log_returns(prices), cfg.q)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "reports").mkdir(exist_ok=True)
    if args.study == "cliques":
        report = subset_homogeneity(sim, sectors, cfg)
    else:
        m = cfg.m_edges if cfg.m_edges is not None else 3 * sim.n - 6
        pd_net = build_pd(sim, m)
        pmfg_net = build_pmfg(sim)
        if args.study == "louvain":
            report = louvain_ari_study(pd_net, pmfg_net, sim, sectors, cfg)
        elif args.study == "nsc":
            report = nsc_ari_sweep(sim, pd_net, pmfg_net, sectors, cfg)
            subset = subset_ari_study(sim, sectors, cfg)
            subset.write_json(out_dir / "reports" / "subset_ari_study.json")
        else:  # robustness
            report = edge_removal_robustness(pd_net, pmfg_net, sim, cfg)
    report.write_json(out_dir / "reports" / f"{report.name}.json")
    print(f"wrote {out_dir}/reports/{report.name}.json")
    return 0


def _cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    prices, sectors = synth_market(args.n, args.sectors, args.days,
                                   args.intra, args.inter, args.seed)
    write_price_csv(prices, out / "prices.csv")
    write_sector_csv(sectors, out / "sectors.csv")
    print(f"wrote {out}/prices.csv and {out}/sectors.csv "
          f"({args.n} stocks, {args.sectors} sectors, {args.days} days)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrnet",
        description="NMI stock-correlation networks: PD and PMFG filters with a comparison suite",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build the similarity matrix and one filtered network")
    p_build.add_argument("--input", required=True, help="price CSV")
    p_build.add_argument("--sectors", default=None, help="sector CSV (stock,sector)")
    p_build.add_argument("--filter", choices=("pd", "pmfg"), required=True)
    p_build.add_argument("--q", type=int, default=20, help="bin count (default 20)")
    p_build.add_argument("--format", choices=("wide", "long"), default="wide")
    p_build.add_argument("--out", required=True, help="output directory")
    p_build.set_defaults(func=_cmd_build)

    p_analyze = sub.add_parser("analyze", help="run one study (or `all`) from a config file")
    p_analyze.add_argument("study", choices=("cliques", "louvain", "nsc", "robustness", "all"))
    p_analyze.add_argument("--config", required=True,
                           help="key=value config (prices, sectors, out, q, master_seed, ...)")
    p_analyze.add_argument("--seed", type=int, default=None, help="override master_seed")
    p_analyze.set_defaults(func=_cmd_analyze)

    p_synth = sub.add_parser("synth", help="generate a synthetic sector-structured market")
    p_synth.add_argument("--n", type=int, default=60, help="stocks (default 60)")
    p_synth.add_argument("--sectors", type=int, default=6, help="sectors (default 6)")
    p_synth.add_argument("--days", type=int, default=1000, help="trading days (default 1000)")
    p_synth.add_argument("--intra", type=float, default=1.0, help="sector-factor coupling")
    p_synth.add_argument("--inter", type=float, default=0.2, help="market-factor coupling")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", default=".", help="output directory (default .)")
    p_synth.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CorrnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
