"""Bridge trisections of knotted surfaces in S^4: diagrams and invariants."""

from .diagram import (
    Arc,
    Cap,
    CertifiedUnlink,
    Crossing,
    Over,
    ProvedNonUnlink,
    StructureError,
    SurfaceOrientation,
    TangleDiagram,
    TriPlaneDiagram,
    UncrossingCertificate,
    Unverified,
    component_partition,
    euler_characteristic,
    orient,
    surface_components,
    tangle_from_word,
)
from .pairing import NonUnlinkError, PairedDiagram, link_components, pair

__all__ = [
    "Arc",
    "Cap",
    "CertifiedUnlink",
    "Crossing",
    "NonUnlinkError",
    "Over",
    "PairedDiagram",
    "ProvedNonUnlink",
    "StructureError",
    "SurfaceOrientation",
    "TangleDiagram",
    "TriPlaneDiagram",
    "UncrossingCertificate",
    "Unverified",
    "component_partition",
    "euler_characteristic",
    "link_components",
    "orient",
    "pair",
    "surface_components",
    "tangle_from_word",
]
