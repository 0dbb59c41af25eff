"""Desk-scale laboratory for spanning structures in random graphs.

Builds edge-overlapping clique cycles and chained four-cycle structures,
enumerates their copy hypergraphs exactly, measures spread properties,
verifies counting and density claims by brute force, runs fragmentation and
sprinkling experiments, and estimates containment thresholds by Monte Carlo
with an exact spanning-subgraph search.
"""

from .structures import (
    KIND_C4,
    KIND_KRS,
    LabeledGraph,
    ParameterError,
    StructureSpec,
    UnsupportedRegimeError,
    build_structure,
    c4_spec,
    edge_count_formula,
    degree_tally_formula,
    graph_from_json,
    graph_to_json,
    krs_spec,
    measured_degree_tally,
    ordering_stabilizer_size,
    structure_from_ordering,
    structure_position_edges,
)
from .copyfamily import (
    BudgetError,
    CopyFamily,
    copies_containing,
    count_copies_formula,
    dump_family,
    enumerate_copies,
    load_family,
    pair_count,
    pair_index,
    index_pair,
)
from .spreadness import (
    SpreadReport,
    components,
    minimal_superspread_constant,
    spread_ratio,
    verify_superspread,
)
from .density import (
    DensityVerdict,
    check_component_inequality,
    count_subgraphs_by_shape,
    densest_subset,
    easy_bound,
    gamma_riordan,
    induced_edge_count,
    segment_edge_formula,
    shape_count_bound,
    verify_density_lemma,
)
from .fragmentation import (
    BadPairEstimate,
    FragmentationConfig,
    FragmentationState,
    PipelineResult,
    check_claim_bound,
    classify_pair,
    estimate_bad_pair_expectation,
    fragment_step,
    fragments_of,
    initial_state,
    intersection_profile,
    run_pipeline,
)
from .threshold import (
    SearchBudgetExceeded,
    ThresholdEstimate,
    contains_spanning,
    estimate_threshold,
    family_scan_contains,
    first_moment_lower_bound,
    sample_gnm,
    sample_gnp,
)

__version__ = "0.1.0"
