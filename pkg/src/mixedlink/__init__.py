"""Mixed polynomials, their Newton boundaries, cyclic coverings, and sampled
contact-geometric certification of their links."""
from .covering import CoveringSpec, covering_degree, pullback, transform_weights
from .grammar import ParseError, parse, serialize
from .homogeneity import detect_weights, euler_residuals
from .link_certifier import (
    CertificationReport,
    SampleConfig,
    certify_holomorphic_like,
    certify_open_book,
    sample_link,
    transversality_check,
)
from .mixed_poly import (
    DegenerateInputError,
    GaussianRational,
    MixedPolynomial,
    MixedTerm,
    evaluate,
    wirtinger_dz,
    wirtinger_dzbar,
)
from .newton_boundary import classify_face_type, is_convenient, nondegeneracy_probe, top_faces

__all__ = [
    "CertificationReport",
    "CoveringSpec",
    "DegenerateInputError",
    "GaussianRational",
    "MixedPolynomial",
    "MixedTerm",
    "ParseError",
    "SampleConfig",
    "certify_holomorphic_like",
    "certify_open_book",
    "classify_face_type",
    "covering_degree",
    "detect_weights",
    "euler_residuals",
    "evaluate",
    "is_convenient",
    "nondegeneracy_probe",
    "parse",
    "pullback",
    "sample_link",
    "serialize",
    "top_faces",
    "transform_weights",
    "transversality_check",
    "wirtinger_dz",
    "wirtinger_dzbar",
]
__version__ = "0.1.0"
