"""Spectral toolkit for Hopf hypersurfaces of CP^n, CH^n and HH^n."""

from .ambient import AmbientSpace, SpaceKind
from .classify import (
    ClassificationReport,
    FoliationType,
    build_report,
    classify_commuting_structure,
    classify_foliation,
    classify_pseudo_einstein,
    focal_leaf_shape_trace,
)
from .errors import FocalPointEncountered, HSLabError
from .models import FocalKind, ModelFamily, catalog, spectrum_at
from .riccati import flow_closed_form, flow_numeric, focal_time
from .spectral import HopfClass, HypersurfacePoint, SpectralData, extract_spectral_data, lambda_star, to_point

__version__ = "0.1.0"

__all__ = [
    "AmbientSpace",
    "ClassificationReport",
    "FocalKind",
    "FocalPointEncountered",
    "FoliationType",
    "HSLabError",
    "HopfClass",
    "HypersurfacePoint",
    "ModelFamily",
    "SpaceKind",
    "SpectralData",
    "build_report",
    "catalog",
    "classify_commuting_structure",
    "classify_foliation",
    "classify_pseudo_einstein",
    "extract_spectral_data",
    "flow_closed_form",
    "flow_numeric",
    "focal_leaf_shape_trace",
    "focal_time",
    "lambda_star",
    "spectrum_at",
    "to_point",
]
