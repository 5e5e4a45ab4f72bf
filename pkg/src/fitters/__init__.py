# Fitters package
from src.fitters.direct import fit_halir, fit_halir_conic, fit_kasa_circle, fit_taubin
from src.fitters.lm import (
    FitResult,
    FitStatus,
    LMConfig,
    closed_form_result,
    data_extent,
    fit_circle_lm,
    fit_confocal_lm,
    levenberg_marquardt,
)
from src.fitters.registry import ALL_FITTERS, CIRCLE_FITTER, ELLIPSE_FITTERS, Fitter, get_fitter

__all__ = [
    "ALL_FITTERS",
    "CIRCLE_FITTER",
    "ELLIPSE_FITTERS",
    "FitResult",
    "FitStatus",
    "Fitter",
    "LMConfig",
    "closed_form_result",
    "data_extent",
    "fit_circle_lm",
    "fit_confocal_lm",
    "fit_halir",
    "fit_halir_conic",
    "fit_kasa_circle",
    "fit_taubin",
    "get_fitter",
    "levenberg_marquardt",
]
