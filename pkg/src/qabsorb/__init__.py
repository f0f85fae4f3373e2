"""Absorbing-boundary quantum mechanics: survival probabilities, discounted
wave functions and absorption currents computed from reflecting-wall
evolution and the flux through the walls."""

from .absorption import (
    BandSplit,
    FluxSeries,
    ModeSpectrum,
    SurvivalSeries,
    WallFlux,
    absorption_current,
    apportion_lambdas,
    band_window_split,
    conditional_survival,
    discount,
    joint_survival,
    pointwise_boundary_current,
    survival_from_flux,
    two_particle_rate,
)
from .box_modes import BoxExpansion
from .core import (
    RATE_CONVENTIONS,
    ComplexField,
    ConvergenceError,
    DegenerateSpectrumError,
    DomainError,
    InvalidFieldError,
    PhysicalParams,
    QAbsorbError,
    ResolutionError,
    SpaceGrid,
    TimeGrid,
    l2_norm_squared,
)
from .oracles import DirichletProblem, SliceKernel
from .packet import GaussianPacketParams
from .slit import PatternGrid, SlitConfig

__version__ = "0.1.0"
