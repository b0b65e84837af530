"""Analytics engine for phylogenetic trees with multivariate, uncertain
node attributes: trait- and clade-defined subtree summaries over time bins,
and all-pairs ranking of leaf pairs against evolutionary patterns."""

from .dataset import (
    Dataset,
    TraitDef,
    TraitMatrix,
    TraitRow,
    load_traits,
    read_dataset,
    read_traits_csv,
    traits_to_rows,
    validate_dataset,
    write_dataset,
    write_traits_csv,
)
from .newick import parse_newick, serialize_newick
from .patterns import (
    PatternQuery,
    RankedPair,
    Trajectory,
    metric_closeness,
    metric_delta,
    pair_trajectories,
    preset_query,
    presets,
    score_all_pairs,
    sort_by_rank_frequency,
    trajectory,
)
from .summaries import (
    BinSummary,
    SubtreeSelection,
    TimeBins,
    bin_by_time,
    find_outliers,
    jitter_offset,
    kde,
    select_by_trait,
    select_clade,
    select_leaves,
    summarize_bin,
)
from .synth import InjectSpec, SimConfig, inject_convergence, make_dataset, random_tree, simulate_traits
from .tree import PhyloTree, Node, metric_distance, mrca, path_from, present_time, topo_edges

__version__ = "0.1.0"
