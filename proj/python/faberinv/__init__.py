"""Polarization tensors and shape reconstruction for 2D conductivity inclusions."""

from ._core import (
    BoundaryMesh,
    ConformalMap,
    Contrast,
    EquivalentEllipse,
    FaberinvError,
    FptMatrices,
    GptTable,
    ReconResult,
    RecoveredMap,
    compute_fpt_grunsky,
    compute_fpt_quadrature,
    compute_gpt_table,
    config_hash,
    cost,
    default_shape_params,
    equivalent_ellipse,
    exact_recover,
    fit_exterior_map,
    mesh_from_map,
    mesh_from_shape,
    perturb_table,
    reconstruct,
    reference_shape,
)

__all__ = [name for name in dir() if not name.startswith("_")]
