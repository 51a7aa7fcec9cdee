"""Director-company interlock networks: crawl, project, and mine them."""

from .cliques import (
    CliqueStats,
    EgoNetwork,
    MaximalClique,
    clique_stats,
    cliques_containing,
    ego_network,
    maximal_cliques,
)
from .crawler import (
    CompanyPage,
    CrawlConfig,
    CrawlResult,
    DirectorPage,
    PageProvider,
    bfs_crawl,
    fixture_provider,
)
from .graph import (
    COMPANY,
    DIRECTOR,
    CorporateGraph,
    DegreeHistogram,
    articulation_report,
    build_graph,
    degree_histogram,
    star_nodes,
)
from .itemsets import (
    FrequentItemsetRecord,
    TransactionDB,
    build_transactions,
    itemset_distribution,
    itemset_report,
    mine_maximal_itemsets,
    support_threshold,
)
from .model import (
    AffiliationRecord,
    BipartiteDataset,
    CompanyRecord,
    DirectorRecord,
    anonymize,
    load_dataset,
    save_dataset,
)
from .projection import (
    IndirectConnection,
    ProjectionGraph,
    connection_strength_order,
    indirect_connections,
    project,
)

__version__ = "0.1.0"

__all__ = [
    "AffiliationRecord",
    "anonymize",
    "articulation_report",
    "bfs_crawl",
    "BipartiteDataset",
    "build_graph",
    "build_transactions",
    "clique_stats",
    "cliques_containing",
    "CliqueStats",
    "COMPANY",
    "CompanyPage",
    "CompanyRecord",
    "connection_strength_order",
    "CorporateGraph",
    "CrawlConfig",
    "CrawlResult",
    "degree_histogram",
    "DegreeHistogram",
    "DIRECTOR",
    "DirectorPage",
    "DirectorRecord",
    "ego_network",
    "EgoNetwork",
    "fixture_provider",
    "FrequentItemsetRecord",
    "indirect_connections",
    "IndirectConnection",
    "itemset_distribution",
    "itemset_report",
    "load_dataset",
    "maximal_cliques",
    "MaximalClique",
    "mine_maximal_itemsets",
    "PageProvider",
    "project",
    "ProjectionGraph",
    "save_dataset",
    "star_nodes",
    "support_threshold",
    "TransactionDB",
]
