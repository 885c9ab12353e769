"""Hypergraphs omitting an intersection size: constructions, processes,
exact oracles, and the spectral side of the polynomial bipartite graphs.

The package splits into layers: `core` (hypergraph type and invariants),
`field`/`spectral` (bipartite graphs over prime fields and their
eigenvalues), `constructions` (sunflowers, fans, omitting systems, and
the regularized random builders), `processes` (the random greedy and
its decomposition/deletion companions), `oracles` (exact searches with
explicit budgets), and `cli`/`experiments`/`records` (reproducible
runs).
"""

__version__ = "0.1.0"

from .constructions import (
    FittingFamily,
    OmittingBuild,
    SubsampleResult,
    fan,
    fitting_family_star,
    incidence_hypergraph,
    l_construction,
    omitting_system,
    p_tau,
    random_omitting_system,
    realize,
    regular_linear,
    smallest_feasible_q,
    subsample_vertices,
    sunflower,
    tau_default,
)
from .core import (
    CycleCensus,
    DegreeReport,
    Hypergraph,
    LinkResult,
    RegularityReport,
    cartesian_product,
    cycle_census,
    degree_profile,
    induced,
    link,
    regularity_audit,
    shadow,
)
from .errors import (
    BudgetExceededError,
    ConstructionError,
    InputError,
    OmitlabError,
    OracleTimeoutError,
    ParseError,
    SamplingError,
    SolverError,
    UnsupportedModulusError,
    VerificationError,
)
from .experiments import EXPERIMENT_KINDS, ExperimentResult, run_experiment
from .field import (
    BipartiteGraph,
    FieldPoly,
    K2LWitness,
    MixingReport,
    build_polynomial_graph,
    is_prime,
    k2l_free_check,
    left_poly,
    mixing_discrepancy,
    poly_eval,
)
from .formats import (
    edge_list_to_string,
    parse_bipartite,
    parse_edge_list,
    read_bipartite,
    read_edge_list,
    spectrum_to_csv,
    write_bipartite,
    write_edge_list,
    write_json,
)
from .oracles import (
    AuditReport,
    IndecompResult,
    Witness,
    contains_fan,
    contains_sunflower,
    dlr_audit,
    indecomposability_check,
    matching_number_exact,
    max_independent_set_exact,
    omitting_check,
)
from .processes import (
    DecompositionResult,
    DeletionResult,
    GreedyTrace,
    MatchingResult,
    PipelineResult,
    ProbeEstimate,
    SplitResult,
    containment_probe,
    decompose,
    degree_split,
    deletion_lower_bound,
    greedy_independent_set,
    greedy_matching,
    product_pipeline,
)
from .records import BoundTable, RunRecord
from .seeds import spawn_seed, substream
from .spectral import (
    SpectrumReport,
    jacobi_eigh,
    polynomial_graph_reference_spectrum,
    spectrum,
)

__all__ = [name for name in dir() if not name.startswith("_")]
