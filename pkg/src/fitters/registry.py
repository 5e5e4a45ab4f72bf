"""
Fitter registry - named ellipse estimators shared by the CLI and benchmarks
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.conic.algebraic import algebraic_to_geometric
from src.conic.geometry import GeometricEllipse
from src.errors import ConfigError
from src.fitters.direct import fit_halir, fit_taubin
from src.fitters.lm import FitResult, LMConfig, closed_form_result, fit_circle_lm, fit_confocal_lm

FitFunction = Callable[[np.ndarray, LMConfig, Optional[GeometricEllipse]], FitResult]


@dataclass(frozen=True)
class Fitter:
    """
    A named estimator returning a FitResult for an (N, 2) point array.

    Iterative fitters start from init when given; closed-form ones ignore it.
    """
    name: str
    label: str
    iterative: bool
    run: FitFunction

    def __call__(
        self,
        xy: np.ndarray,
        config: LMConfig,
        init: Optional[GeometricEllipse] = None,
    ) -> FitResult:
        return self.run(xy, config, init)


def _halir(xy: np.ndarray, config: LMConfig, init: Optional[GeometricEllipse]) -> FitResult:
    return closed_form_result(fit_halir(xy), xy)


def _taubin(xy: np.ndarray, config: LMConfig, init: Optional[GeometricEllipse]) -> FitResult:
    # NotAnEllipse propagates: Taubin does not guarantee an ellipse
    return closed_form_result(algebraic_to_geometric(fit_taubin(xy)), xy)


def _confocal(xy: np.ndarray, config: LMConfig, init: Optional[GeometricEllipse]) -> FitResult:
    return fit_confocal_lm(xy, config, init)


def _circle(xy: np.ndarray, config: LMConfig, init: Optional[GeometricEllipse]) -> FitResult:
    return fit_circle_lm(xy, config)


# ============================================================================
# FITTER DEFINITIONS
# ============================================================================

ELLIPSE_FITTERS = {
    "halir": Fitter(name="halir", label="Halir", iterative=False, run=_halir),
    "taubin": Fitter(name="taubin", label="Taubin", iterative=False, run=_taubin),
    "confocal": Fitter(name="confocal", label="Confocal-LM", iterative=True, run=_confocal),
}

CIRCLE_FITTER = Fitter(name="circle", label="Circle-LM", iterative=True, run=_circle)

ALL_FITTERS = {**ELLIPSE_FITTERS, CIRCLE_FITTER.name: CIRCLE_FITTER}


def get_fitter(name: str) -> Fitter:
    """Look up a fitter by name."""
    if name not in ALL_FITTERS:
        raise ConfigError(f"unknown fitter '{name}' (choose from {', '.join(ALL_FITTERS)})")
    return ALL_FITTERS[name]
