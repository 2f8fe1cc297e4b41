"""Rank-maximal matchings under vertex arrivals."""

from .decomp import DecompRebuild, propagate_vertex_types, rebuild_decompositions, settle_types
from .dynamic import (
    PathKind,
    UpdatePath,
    UpdateState,
    apply_arrival,
    batch_add_even_edges,
    check_after_arrival,
    classify_edge_addition,
    collect_update_paths,
)
from .instance import (
    ArrivalEvent,
    Instance,
    InstanceError,
    Matching,
    Ordering,
    RankedEdge,
    Side,
    Signature,
    VertexId,
    compare_signatures,
    parse_events,
    parse_instance,
    serialize_events,
    serialize_instance,
    signature_of,
)
from .matching import EgLabels, GraphView, Label, augment_to_maximum, build_alternating_forest, eg_decompose
from .popular import NO_POPULAR, PreferenceInstance, popular_solve, popular_update, reduce_to_rmm
from .static import RmmState, phase_view, rmm_solve

__all__ = [
    "ArrivalEvent", "DecompRebuild", "EgLabels", "GraphView", "Instance", "InstanceError", "Label",
    "Matching", "NO_POPULAR", "Ordering", "PathKind", "PreferenceInstance", "RankedEdge", "RmmState",
    "Side", "Signature", "UpdatePath", "UpdateState", "VertexId", "apply_arrival", "augment_to_maximum",
    "batch_add_even_edges", "build_alternating_forest", "check_after_arrival", "classify_edge_addition",
    "collect_update_paths", "compare_signatures", "eg_decompose", "parse_events", "parse_instance",
    "phase_view", "popular_solve", "popular_update", "propagate_vertex_types", "rebuild_decompositions",
    "reduce_to_rmm", "rmm_solve", "serialize_events", "serialize_instance", "settle_types", "signature_of",
]
