"""Verification toolkit for a 4/9 Turán-density witness family.

The library certifies, at desk scale, the two facts the construction
rests on: a cone over the union of two edge-disjoint Steiner triple
systems has normalized Lagrangian exceeding 4/9, while every small
subgraph stays at or below 4/9. Modules: `core` (3-graphs, sparsity,
.3g files), `lagrangian` (exact evaluation, restarted ascent, integer
grid oracle), `cone` (the apex-weight analysis and its algebra),
`designs` (Steiner systems and pair search), `witness` (certificates),
`cli` (the `hyperjump` command).
"""

from .cone import (
    ConeGraph,
    apex_optimum,
    algebra_identities,
    build_cone,
    certify_cone_bound,
    check_one_over_27,
    check_tau_threshold,
    falsify_q_tau,
    inequality_sweep,
    necessary_counterexample_inequality,
    phi,
    q_of,
    stationarity_report,
    tau,
)
from .core import (
    CodegreeProfile,
    LabelledTripleSystem,
    SparsityVerdict,
    ThreeGraph,
    canonicalize,
    check_sparse,
    codegree_profile,
    find_dense_configuration,
    graph_hash,
    induced_subgraph,
    load_3g,
    save_3g,
)
from .designs import (
    SteinerTripleSystem,
    StsPair,
    build_internal_system,
    build_sts,
    cogirth_of,
    load_pair,
    relabel,
    save_pair,
    search_pair,
)
from .errors import HyperjumpError
from .lagrangian import (
    LagrangianEstimate,
    WeightVector,
    blowup_density,
    evaluate_p,
    grid_oracle,
    maximize_lagrangian,
    witness_record,
)
from .witness import (
    WitnessCertificate,
    assemble_witness,
    build_witness,
    certify_lower_bound,
    certify_small_subgraphs,
    emit_certificate,
    load_certificate,
    reverify_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "CodegreeProfile",
    "ConeGraph",
    "HyperjumpError",
    "LabelledTripleSystem",
    "LagrangianEstimate",
    "SparsityVerdict",
    "SteinerTripleSystem",
    "StsPair",
    "ThreeGraph",
    "WeightVector",
    "WitnessCertificate",
    "algebra_identities",
    "apex_optimum",
    "assemble_witness",
    "blowup_density",
    "build_cone",
    "build_internal_system",
    "build_sts",
    "build_witness",
    "canonicalize",
    "certify_cone_bound",
    "certify_lower_bound",
    "certify_small_subgraphs",
    "check_one_over_27",
    "check_sparse",
    "check_tau_threshold",
    "codegree_profile",
    "cogirth_of",
    "emit_certificate",
    "evaluate_p",
    "falsify_q_tau",
    "find_dense_configuration",
    "graph_hash",
    "grid_oracle",
    "induced_subgraph",
    "inequality_sweep",
    "load_3g",
    "load_certificate",
    "load_pair",
    "maximize_lagrangian",
    "necessary_counterexample_inequality",
    "phi",
    "q_of",
    "relabel",
    "reverify_certificate",
    "save_3g",
    "save_pair",
    "search_pair",
    "stationarity_report",
    "tau",
    "witness_record",
]
