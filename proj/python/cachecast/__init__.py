"""Coded multicast caching simulator.

C++ core exposed through pybind11: random popularity-based placement,
conflict-graph construction, greedy local-coloring delivery (GCLC / HgLC),
MDS index coding over GF(2^q) and closed-form rate bounds.
"""

from ._core import (
    CacheRealization,
    Coloring,
    ColoringOutcome,
    ConfigError,
    ConflictGraph,
    DecodeError,
    DemandRealization,
    M_bar,
    NetworkConfig,
    VertexMeta,
    brute_force_oracle,
    build_conflict_graph,
    compute_vertex_meta,
    gclc,
    gclc1,
    gclc2,
    gclc_bound,
    hglc,
    hglc1,
    lfu_place,
    lfu_rate,
    local_number,
    local_search,
    m_bar,
    mds_generator,
    optimize_caching_distribution,
    psi_homogeneous,
    rap_place,
    run_experiment,
    sample_demands,
    verify_delivery,
    zipf_distribution,
)

__all__ = [
    "CacheRealization",
    "Coloring",
    "ColoringOutcome",
    "ConfigError",
    "ConflictGraph",
    "DecodeError",
    "DemandRealization",
    "M_bar",
    "NetworkConfig",
    "VertexMeta",
    "brute_force_oracle",
    "build_conflict_graph",
    "compute_vertex_meta",
    "gclc",
    "gclc1",
    "gclc2",
    "gclc_bound",
    "hglc",
    "hglc1",
    "lfu_place",
    "lfu_rate",
    "local_number",
    "local_search",
    "m_bar",
    "mds_generator",
    "optimize_caching_distribution",
    "psi_homogeneous",
    "rap_place",
    "run_experiment",
    "sample_demands",
    "verify_delivery",
    "zipf_distribution",
]

__version__ = "0.1.0"
