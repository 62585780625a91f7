"""Stock-correlation networks from normalized mutual information.

Builds the pairwise NMI similarity matrix of log-return series, filters it
with the proportional-degree (PD) algorithm and the planar maximally filtered
graph (PMFG) baseline, and compares the two networks through clique/sector
homogeneity, Louvain and normalized spectral clustering agreement (ARI), and
robustness under random edge removal.
"""

from .clustering import EigenSpectrum, Partition, eigengap_k, louvain, modularity, nsc, spectrum
from .errors import CorrnetError, ParseError, ValidationError
from .experiments import (
    ASX_REFERENCE,
    ExperimentConfig,
    ExperimentReport,
    derive_seed,
    edge_removal_robustness,
    louvain_ari_study,
    nsc_ari_sweep,
    run_pipeline,
    subset_ari_study,
    subset_homogeneity,
    synth_market,
)
from .filters import (
    DegreeBudget,
    StockWeights,
    build_pd,
    build_pmfg,
    cascade_round,
    degree_budgets,
    pd_build_report,
    proportional_degrees,
    stock_weights,
)
from .graph import Clique, Network, enumerate_m_cliques, is_clique, is_planar, maximal_cliques
from .infotheory import (
    SimilarityMatrix,
    entropy,
    joint_entropy,
    mutual_information,
    nmi,
    similarity_matrix,
)
from .ingest import (
    BinAssignment,
    Distribution,
    JointDistribution,
    PriceMatrix,
    ReturnMatrix,
    SectorTable,
    bin_series,
    joint_histogram,
    load_price_table,
    load_sector_table,
    log_returns,
    marginal_distribution,
)
from .metrics import ContingencyTable, ari, clique_homogeneity, dominant_sector, sector_partition

__version__ = "0.1.0"

__all__ = [
    "ASX_REFERENCE",
    "BinAssignment",
    "Clique",
    "ContingencyTable",
    "CorrnetError",
    "DegreeBudget",
    "Distribution",
    "EigenSpectrum",
    "ExperimentConfig",
    "ExperimentReport",
    "JointDistribution",
    "Network",
    "ParseError",
    "Partition",
    "PriceMatrix",
    "ReturnMatrix",
    "SectorTable",
    "SimilarityMatrix",
    "StockWeights",
    "ValidationError",
    "ari",
    "bin_series",
    "build_pd",
    "build_pmfg",
    "cascade_round",
    "clique_homogeneity",
    "degree_budgets",
    "derive_seed",
    "dominant_sector",
    "edge_removal_robustness",
    "eigengap_k",
    "entropy",
    "enumerate_m_cliques",
    "is_clique",
    "is_planar",
    "joint_entropy",
    "joint_histogram",
    "load_price_table",
    "load_sector_table",
    "log_returns",
    "louvain",
    "louvain_ari_study",
    "marginal_distribution",
    "maximal_cliques",
    "modularity",
    "mutual_information",
    "nmi",
    "nsc",
    "nsc_ari_sweep",
    "pd_build_report",
    "proportional_degrees",
    "run_pipeline",
    "sector_partition",
    "similarity_matrix",
    "spectrum",
    "stock_weights",
    "subset_ari_study",
    "subset_homogeneity",
    "synth_market",
]
