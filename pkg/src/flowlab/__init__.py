"""Explicit Lagrangian flows built from harmonic labelling maps.

The package constructs time-dependent harmonic maps ``F + conj(G)`` whose
coefficients follow closed-form solution families, evaluates particle
kinematics, and certifies each flow with residual checks.
"""

from __future__ import annotations

from .errors import (
    DegenerateBasis,
    DegenerateDilatation,
    DepthExceeded,
    FlowlabError,
    ManifestError,
    MismatchedInitialPair,
    NonFinite,
    NotClosedForm,
    OutsideValidity,
    PoleHit,
    SensePreservationViolated,
    UnknownPreset,
    ZeroDenominator,
)
from .expr import (
    AnalyticExpr,
    Constant,
    ExpLinear,
    Identity,
    Mobius,
    Power,
    Product,
    Scale,
    Sum,
    antiderivative,
    cauchy_riemann_residual,
    derivative,
    evaluate,
)
from .families import CoefficientPath, FamilySpec, coefficients_at, fg_at
from .harmonic import HarmonicMap, dilatation, jacobian, pre_schwarzian, schwarzian
from .kinematics import FlowSample, LabeledFlow, LabelGrid, kinematics_at, position, trajectory, velocity
from .presets import preset, preset_names
from .quadrature import QuadratureConfig, integrate
from .verification import CheckReport, ToleranceConfig, run_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_") and name != "annotations"]
