"""SIR spreading on temporal graphs: graph discovery and source detection games."""

from .core import (
    HIGHEST, LOWEST, MULTIEDGE, MULTILABEL, SIMPLE, DeltaComponents, Edge, Infection, SirParams,
    TemporalGraph, check_consistency, delta_edge_components, find_ideal_patient_zero,
    is_temporal_path, project_timetable, simulate, validate,
)
from .discovery import (
    DiscoveryConfig, adjudicate_unique, brute_force_discoverer, discovery_follow,
    follow_discoverer, honest_adversary, hub_path_adversary, multilabel_adversary,
    run_discovery_game, unknown_graph_adversary, witness_verify,
)
from .formats import parse_temporal_edge_list, snap_ingest, write_temporal_edge_list
from .generators import (
    ErtParams, build_hamiltonian_lb, build_hub_family, build_source_path_lb,
    build_witness_hard_family, gen_complete, gen_ert, gen_path, gen_random_tree, gen_star,
)
from .knowledge import FULL_LOG, TIMES_ONLY, LabelKnowledge
from .source import (
    SourceGameConfig, balanced_separator, centroid_two_watch_discoverer, consistent_adversary,
    dynamic_adversary, random_watch, run_source_game, separator_discoverer, sqrt_discoverer,
    watch_all_discoverer, wrap_k_to_one, wrap_known_to_unknown,
)

__version__ = "0.1.0"
