"""Particle in a box [0, a] with absorbing walls, in the sine eigenbasis.

psi(x, t) = sum_n A_n exp(-i E_n t / hbar) sin(n pi x / a),  E_n = hbar^2 n^2 pi^2 / (2 m a^2)

The sine functions carry norm^2 = a/2, so a normalized state has
sum |A_n|^2 a/2 = 1 and normalized spectral weights a_n = A_n sqrt(a/2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .absorption import FluxSeries, ModeSpectrum, SurvivalSeries, WallFlux, survival_from_flux
from .core import ComplexField, DomainError, PhysicalParams, SpaceGrid, TimeGrid

WALLS = ("left", "right")


def mode_energy(n, width_a: float, params: PhysicalParams):
    n_arr = np.asarray(n)
    if np.any(n_arr < 1) or not width_a > 0:
        raise DomainError("mode index must be >= 1 and the box width positive")
    e = params.hbar**2 * n_arr.astype(float) ** 2 * np.pi**2 / (2.0 * params.mass * width_a**2)
    return float(e) if e.ndim == 0 else e


def beat_frequency(k: int, n: int, width_a: float, params: PhysicalParams) -> float:
    """Bohr frequency |E_n - E_k| / hbar of a two-level superposition."""
    return abs(mode_energy(n, width_a, params) - mode_energy(k, width_a, params)) / params.hbar


@dataclass(frozen=True, eq=False)
class BoxExpansion:
    width_a: float
    modes: np.ndarray
    amplitudes: np.ndarray = field(repr=False)
    params: PhysicalParams = PhysicalParams()

    def __post_init__(self):
        n = np.atleast_1d(np.array(self.modes, dtype=int))
        c = np.atleast_1d(np.array(self.amplitudes, dtype=complex))
        if n.shape != c.shape or n.ndim != 1:
            raise DomainError("modes and amplitudes must be 1-D and of equal length")
        if np.any(n < 1) or len(set(n.tolist())) != n.size:
            raise DomainError("mode indices must be distinct and >= 1")
        if not self.width_a > 0:
            raise DomainError("box width must be positive")
        object.__setattr__(self, "modes", n)
        object.__setattr__(self, "amplitudes", c)

    @classmethod
    def from_pairs(cls, width_a: float, pairs: Iterable[tuple[int, complex]], params=PhysicalParams()):
        pairs = list(pairs)
        return cls(width_a, [p[0] for p in pairs], [p[1] for p in pairs], params)

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.width_a / 2.0)

    @property
    def normalized(self) -> bool:
        return abs(self.norm_squared - 1.0) <= 1e-12

    @property
    def energies(self) -> np.ndarray:
        return mode_energy(self.modes, self.width_a, self.params)

    def spectrum(self) -> ModeSpectrum:
        return ModeSpectrum(
            self.amplitudes * np.sqrt(self.width_a / 2.0), self.energies, labels=self.modes
        )

    def default_grid(self, n_points: int = 1001) -> SpaceGrid:
        return SpaceGrid(0.0, self.width_a, n_points)

    def _phases(self, t) -> np.ndarray:
        return np.exp(-1j * np.multiply.outer(np.asarray(t, dtype=float), self.energies) / self.params.hbar)


def _check_grid(grid: SpaceGrid, width_a: float):
    if abs(grid.x_min) > 1e-12 * width_a or abs(grid.x_max - width_a) > 1e-12 * width_a:
        raise DomainError("grid must span [0, a]")


def _series(expansion: BoxExpansion, coeffs: np.ndarray, grid: SpaceGrid) -> ComplexField:
    _check_grid(grid, expansion.width_a)
    x = grid.x
    basis = np.sin(np.pi * np.outer(expansion.modes, x) / expansion.width_a)
    values = coeffs @ basis
    values[0] = values[-1] = 0.0
    return ComplexField(grid, values)


def evolve(expansion: BoxExpansion, t: float, grid: SpaceGrid | None = None) -> ComplexField:
    """Reflecting-wall evolution of the truncated series, sampled on ``grid``."""
    grid = grid or expansion.default_grid()
    return _series(expansion, expansion.amplitudes * expansion._phases(t), grid)


def wall_derivative(expansion: BoxExpansion, t, wall: str = "left"):
    """d psi / dx at x = 0 (left) or x = a (right); vectorized over t."""
    if wall not in WALLS:
        raise DomainError(f"wall must be one of {WALLS}")
    k = expansion.modes * np.pi / expansion.width_a
    sign = 1.0 if wall == "left" else (-1.0) ** expansion.modes
    return expansion._phases(t) @ (expansion.amplitudes * k * sign)


def boundary_flux(expansion: BoxExpansion, t, wall: str = "left"):
    """|d psi/dx|^2 at the chosen wall."""
    out = np.abs(wall_derivative(expansion, t, wall)) ** 2
    return float(out) if np.ndim(out) == 0 else out


def flux_series(expansion: BoxExpansion, grid: TimeGrid) -> FluxSeries:
    """Both wall fluxes on ``grid``, weighted by the lambdas in ``expansion.params``."""
    p = expansion.params
    t = grid.times
    return FluxSeries(
        grid,
        (
            WallFlux("left", p.lambda_left, boundary_flux(expansion, t, "left")),
            WallFlux("right", p.lambda_right, boundary_flux(expansion, t, "right")),
        ),
    )


def total_absorption_survival(
    expansion: BoxExpansion, grid: TimeGrid, convention: str = "pi-m"
) -> SurvivalSeries:
    return survival_from_flux(flux_series(expansion, grid), expansion.params, convention)


def two_level_survival(k: int, n: int, a_k: float, a_n: float, t, params: PhysicalParams, width_a: float):
    """Closed-form two-level survival with beats, real amplitudes A_k, A_n.

    Uses lambda_left as the wall length.  For k + n odd this coincides with
    absorption at the x = 0 wall alone under the pi-m rate convention.
    """
    if k == n:
        raise DomainError("degenerate pair k == n; use the single-mode exponential")
    if np.iscomplexobj(a_k) or np.iscomplexobj(a_n):
        raise DomainError("amplitudes must be real")
    hb, m, a = params.hbar, params.mass, width_a
    t = np.asarray(t, dtype=float)
    d = n * n - k * k
    bracket = (np.pi**2 / a**2) * (a_k**2 * k**2 + a_n**2 * n**2) * t - (
        4.0 * m * (-1) ** (k + n) * k * n * a_k * a_n / (hb * d)
    ) * np.sin(hb * d * np.pi**2 * t / (2.0 * m * a**2))
    out = np.exp(-params.lambda_left * hb / (m * np.pi) * bracket)
    return float(out) if out.ndim == 0 else out


def reduced_beats_survival(tau, lambda_a: float):
    """exp(-(lambda_a / 3 pi) (5 tau - 2 sin tau)) in the dimensionless time tau."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be non-negative")
    out = np.exp(-(lambda_a / (3.0 * np.pi)) * (5.0 * tau - 2.0 * np.sin(tau)))
    return float(out) if out.ndim == 0 else out


def _window_rates(labels, weights, params: PhysicalParams, width_a: float) -> np.ndarray:
    n = np.asarray(labels, dtype=float)
    return weights * params.hbar * n**2 * np.pi**2 / (params.mass * width_a**2)


def energy_window_survival(spectrum: ModeSpectrum, t, params: PhysicalParams, width_a: float):
    """sum_n |a_n|^2 exp(-|a_n|^2 hbar n^2 pi^2 t / (m a^2)); spectrum labels are mode indices."""
    if spectrum.labels is None:
        raise DomainError("spectrum needs mode-index labels")
    w = spectrum.weights
    rates = _window_rates(spectrum.labels, w, params, width_a)
    out = np.exp(-np.multiply.outer(np.asarray(t, dtype=float), rates)) @ w
    return float(out) if np.ndim(out) == 0 else out


def energy_window_discounted(
    expansion: BoxExpansion, t: float, grid: SpaceGrid | None = None
) -> ComplexField:
    """Mode-wise damped series whose squared norm equals :func:`energy_window_survival`."""
    grid = grid or expansion.default_grid()
    spec = expansion.spectrum()
    rates = _window_rates(expansion.modes, spec.weights, expansion.params, expansion.width_a)
    damp = np.exp(-0.5 * rates * t)
    return _series(expansion, expansion.amplitudes * expansion._phases(t) * damp, grid)


def matching_lambda(expansion: BoxExpansion, walls: tuple[str, ...] = ("left",), convention: str = "pi-m") -> float:
    """Absorption length at which total absorption and energy-window decay agree.

    Only defined for a single-mode state, where both laws are pure exponentials.
    The total-absorption rate is measured from the wall flux at unit lambda.
    """
    if expansion.modes.size != 1:
        raise DomainError("matching lambda is defined for single-mode states only")
    unit = sum(expansion.params.rate_constant(1.0, convention) * boundary_flux(expansion, 0.0, w) for w in walls)
    spec = expansion.spectrum()
    target = _window_rates(expansion.modes, spec.weights, expansion.params, expansion.width_a)[0]
    return float(target / unit)
