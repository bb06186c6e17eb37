"""Morse index bounds for minimal hypersurfaces from harmonic one-forms."""

from ._minidx import (
    Ambient,
    Hypersurface,
    OneForm,
    ambient,
    catalog_forms,
    certificate,
    cross_margin,
    geodesic_sphere_minimal_radius,
    harmonic_forms,
    hypersurface,
    index_bound,
    product_q,
    product_q_margin,
    q_identity,
    run_config,
    spectrum,
    theorem_constant,
)

__all__ = [
    "Ambient",
    "Hypersurface",
    "OneForm",
    "ambient",
    "catalog_forms",
    "certificate",
    "cross_margin",
    "geodesic_sphere_minimal_radius",
    "harmonic_forms",
    "hypersurface",
    "index_bound",
    "product_q",
    "product_q_margin",
    "q_identity",
    "run_config",
    "spectrum",
    "theorem_constant",
]
