"""Discounting machinery: boundary flux -> survival, currents and discounted fields.

The survival probability of a particle confined by absorbing walls is

    S(t) = exp(-sum_w kappa_w * int_0^t |d psi/dn (wall w, t')|^2 dt'),
    kappa_w = lambda_w * hbar / (pi * m)

where psi is the reflecting-wall (Dirichlet) solution.  Exponents are kept
cumulatively so conditional survivals compose exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .core import (
    ComplexField,
    DegenerateSpectrumError,
    DomainError,
    PhysicalParams,
    TimeGrid,
)


@dataclass(frozen=True, eq=False)
class WallFlux:
    name: str
    lam: float
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class FluxSeries:
    """|d psi/dn|^2 sampled on a shared TimeGrid, one entry per absorbing wall."""

    grid: TimeGrid
    walls: tuple[WallFlux, ...]

    def __post_init__(self):
        n = self.grid.n_steps + 1
        walls = []
        for w in self.walls:
            v = np.array(w.values, dtype=float)
            if v.shape != (n,):
                raise DomainError(f"wall {w.name!r}: expected {n} samples, got {v.shape}")
            if not np.all(np.isfinite(v)):
                raise DomainError(f"wall {w.name!r}: non-finite flux")
            if np.any(v < 0):
                raise DomainError(f"wall {w.name!r}: negative flux")
            if w.lam < 0:
                raise DomainError(f"wall {w.name!r}: negative lambda")
            v.flags.writeable = False
            walls.append(WallFlux(w.name, float(w.lam), v))
        object.__setattr__(self, "walls", tuple(walls))

    @classmethod
    def single(cls, grid: TimeGrid, values, lam: float, name: str = "wall") -> "FluxSeries":
        return cls(grid, (WallFlux(name, lam, values),))

    def total_rate(self, params: PhysicalParams, convention: str = "pi-m") -> np.ndarray:
        """Instantaneous absorption rate sum_w kappa_w |d psi/dn|^2 at each sample."""
        rate = np.zeros(self.grid.n_steps + 1)
        for w in self.walls:
            rate += params.rate_constant(w.lam, convention) * w.values
        return rate


@dataclass(frozen=True, eq=False)
class SurvivalSeries:
    """S(t_j) = exp(-E(t_j)) with E the cumulative absorption exponent."""

    grid: TimeGrid
    exponent: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.array(self.exponent, dtype=float)
        if e.shape != (self.grid.n_steps + 1,):
            raise DomainError("exponent length does not match the time grid")
        if e[0] != 0.0:
            raise DomainError("exponent must start at zero")
        e.flags.writeable = False
        object.__setattr__(self, "exponent", e)

    @property
    def values(self) -> np.ndarray:
        return np.exp(-self.exponent)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def at(self, t: float) -> float:
        return float(np.exp(-self.exponent[self.grid.index_of(t)]))


def survival_from_flux(
    flux: FluxSeries, params: PhysicalParams, convention: str = "pi-m"
) -> SurvivalSeries:
    """Trapezoidal cumulative integral of the weighted wall flux, exponentiated."""
    rate = flux.total_rate(params, convention)
    return SurvivalSeries(flux.grid, cumulative_trapezoid(rate, dx=flux.grid.dt, initial=0.0))


def conditional_survival(s: SurvivalSeries, t1: float, t2: float) -> float:
    """Probability of surviving to t2 given survival to t1."""
    if t1 > t2:
        raise DomainError(f"t1={t1} exceeds t2={t2}")
    e = s.exponent
    return float(np.exp(-(e[s.grid.index_of(t2)] - e[s.grid.index_of(t1)])))


def discount(f: ComplexField, s: SurvivalSeries, t: float) -> ComplexField:
    """Discounted wave function sqrt(S(t)) * psi."""
    return f.scaled(np.exp(-0.5 * s.exponent[s.grid.index_of(t)]))


def absorption_current(
    flux: FluxSeries, s: SurvivalSeries, params: PhysicalParams, convention: str = "pi-m"
) -> np.ndarray:
    """J(t) = d(1 - S)/dt = (total rate) * S(t), one value per sample."""
    if flux.grid != s.grid:
        raise DomainError("flux and survival series must share a time grid")
    return flux.total_rate(params, convention) * s.values


def pointwise_boundary_current(
    point_flux,
    lam: float,
    s: SurvivalSeries,
    params: PhysicalParams,
    convention: str = "pi-m",
) -> tuple[np.ndarray, np.ndarray]:
    """Normal current density at sampled boundary points and its time integral.

    ``point_flux`` has shape (n_points, n_times) and holds |d psi/dn|^2 at each
    boundary point; S is the global survival of the whole boundary.  Returns the
    instantaneous density (same shape) and the cumulative pattern (n_points,).
    """
    pf = np.asarray(point_flux, dtype=float)
    if pf.ndim != 2 or pf.shape[1] != s.grid.n_steps + 1:
        raise DomainError("point_flux must have shape (n_points, n_times)")
    density = params.rate_constant(lam, convention) * pf * s.values[None, :]
    return density, np.trapezoid(density, dx=s.grid.dt, axis=1)


def joint_survival(*series: SurvivalSeries) -> SurvivalSeries:
    """Survival of independent particles: exponents add, so S = prod S_i."""
    grid = series[0].grid
    if any(s.grid != grid for s in series):
        raise DomainError("all survival series must share a time grid")
    return SurvivalSeries(grid, np.sum([s.exponent for s in series], axis=0))


def two_particle_rate(rate1, rate2):
    """Joint instantaneous absorption rate of two non-interacting particles."""
    r1, r2 = np.asarray(rate1, dtype=float), np.asarray(rate2, dtype=float)
    if np.any(r1 < 0) or np.any(r2 < 0):
        raise DomainError("rates must be non-negative")
    out = r1 + r2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """Normalized mode amplitudes a_k with energies E_k.

    Derived quantities: the energy share of a mode |a_k|^2 E_k, the mean share
    sum |a_k|^4 E_k, and (after :func:`apportion_lambdas`) per-mode absorption
    lengths.
    """

    amplitudes: np.ndarray
    energies: np.ndarray
    labels: np.ndarray | None = None
    lambdas: np.ndarray | None = None
    tol: float = 1e-12

    def __post_init__(self):
        a = np.atleast_1d(np.array(self.amplitudes, dtype=complex))
        e = np.atleast_1d(np.array(self.energies, dtype=float))
        if a.shape != e.shape or a.ndim != 1:
            raise DomainError("amplitudes and energies must be 1-D arrays of equal length")
        total = float(np.sum(np.abs(a) ** 2))
        if abs(total - 1.0) > self.tol:
            raise DomainError(f"spectrum not normalized: sum |a_k|^2 = {total!r}")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "energies", e)
        if self.labels is not None:
            object.__setattr__(self, "labels", np.asarray(self.labels))
        if self.lambdas is not None:
            object.__setattr__(self, "lambdas", np.asarray(self.lambdas, dtype=float))

    @classmethod
    def normalized(cls, amplitudes, energies, labels=None) -> "ModeSpectrum":
        a = np.asarray(amplitudes, dtype=complex)
        return cls(a / np.sqrt(np.sum(np.abs(a) ** 2)), energies, labels)

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def mode_energy_share(self) -> np.ndarray:
        return self.weights * self.energies

    @property
    def mean_share(self) -> float:
        return float(np.sum(self.weights * self.mode_energy_share))

    def band_mask(self, e_low: float, e_high: float) -> np.ndarray:
        if not e_low < e_high:
            raise DomainError("band requires E_low < E_high")
        return (self.energies > e_low) & (self.energies < e_high)

    def survival(self, t, hbar: float = 1.0, mask=None):
        """sum_k |a_k|^2 exp(-share_k t / hbar), restricted to ``mask`` modes if given.

        Modes outside the mask evolve unitarily and keep their full weight.
        """
        t = np.asarray(t, dtype=float)
        w = self.weights
        rates = self.mode_energy_share / hbar
        if mask is not None:
            rates = np.where(mask, rates, 0.0)
        out = np.exp(-np.multiply.outer(t, rates)) @ w
        return float(out) if out.ndim == 0 else out


def apportion_lambdas(
    spectrum: ModeSpectrum, lambda_total: float, band: tuple[float, float] | None = None
) -> ModeSpectrum:
    """Assign lambda_k = lambda * share_k / <share>, so that sum |a_k|^2 lambda_k = lambda.

    With ``band=(E_low, E_high)`` only modes strictly inside the band absorb:
    lambda_k = 0 outside and the mean share is the band-restricted sum
    sum_{band} |a_k^4 E_k|.
    """
    share = spectrum.mode_energy_share
    if band is None:
        mask = np.ones(share.shape, dtype=bool)
        mean = spectrum.mean_share
    else:
        mask = spectrum.band_mask(*band)
        mean = float(np.sum(np.abs(spectrum.weights[mask] ** 2 * spectrum.energies[mask])))
    if not mean > 0:
        raise DegenerateSpectrumError("mean energy share is zero; lambdas are undefined")
    lambdas = np.where(mask, lambda_total * share / mean, 0.0)
    return ModeSpectrum(spectrum.amplitudes, spectrum.energies, spectrum.labels, lambdas, spectrum.tol)


@dataclass(frozen=True)
class BandSplit:
    """Split of a spectrum into an absorbed band and a unitarily evolving complement."""

    spectrum: ModeSpectrum
    band: np.ndarray
    empty: bool

    @property
    def complement(self) -> np.ndarray:
        return ~self.band

    def survival(self, t, hbar: float = 1.0):
        return self.spectrum.survival(t, hbar, mask=self.band)


def band_window_split(spectrum: ModeSpectrum, e_low: float, e_high: float) -> BandSplit:
    mask = spectrum.band_mask(e_low, e_high)
    return BandSplit(spectrum, mask, not bool(mask.any()))

