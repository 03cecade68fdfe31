"""Polytopal mesh agglomeration by recursive graph bisection."""

from ._core import (
    Graph,
    Mesh,
    MeshError,
    agglomerate,
    classic_bisect,
    dual_graph,
    generate_mesh,
    merge,
    normalized_cut,
    quality,
    read_mesh,
    train_gnn,
    train_rl,
    write_mesh,
)

__all__ = [
    "Graph",
    "Mesh",
    "MeshError",
    "agglomerate",
    "classic_bisect",
    "dual_graph",
    "generate_mesh",
    "merge",
    "normalized_cut",
    "quality",
    "read_mesh",
    "train_gnn",
    "train_rl",
    "write_mesh",
]
