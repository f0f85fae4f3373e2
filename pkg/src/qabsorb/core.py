"""Physical parameters, sampling grids and field containers shared by every module."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class QAbsorbError(Exception):
    """Base class for all library errors."""


class InvalidFieldError(QAbsorbError, ValueError):
    pass


class DomainError(QAbsorbError, ValueError):
    pass


class DegenerateSpectrumError(QAbsorbError, ValueError):
    pass


class ConvergenceError(QAbsorbError, RuntimeError):
    pass


class ResolutionError(ConvergenceError):
    pass


#: Multiplier of lambda * hbar / m in the absorption rate, per convention.
RATE_CONVENTIONS = {
    "pi-m": 1.0 / np.pi,
    "two-pi-m": 1.0 / (2.0 * np.pi),
}


@dataclass(frozen=True)
class PhysicalParams:
    """hbar, particle mass and the absorption length of each wall.

    Setting both lambdas to zero gives plain reflecting-wall quantum mechanics.
    """

    hbar: float = 1.0
    mass: float = 1.0
    lambda_left: float = 0.0
    lambda_right: float = 0.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise DomainError(f"hbar and mass must be positive, got {self.hbar}, {self.mass}")
        if not (self.lambda_left >= 0 and self.lambda_right >= 0):
            raise DomainError("absorption lengths must be non-negative")

    def rate_constant(self, lam: float, convention: str = "pi-m") -> float:
        """Factor turning |d psi/dn|^2 at a wall into an absorption rate."""
        return lam * self.hbar / self.mass * _convention_factor(convention)

    def with_lambdas(self, left: float, right: float | None = None) -> "PhysicalParams":
        return PhysicalParams(self.hbar, self.mass, left, left if right is None else right)


def _convention_factor(convention: str) -> float:
    try:
        return RATE_CONVENTIONS[convention]
    except KeyError:
        raise DomainError(
            f"unknown rate convention {convention!r}; expected one of {sorted(RATE_CONVENTIONS)}"
        ) from None


@dataclass(frozen=True)
class TimeGrid:
    """Uniform samples t_j = t0 + j*dt, j = 0..n_steps."""

    t0: float
    dt: float
    n_steps: int

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError("n_steps must be an integer >= 1")

    @classmethod
    def spanning(cls, t_max: float, dt: float, t0: float = 0.0) -> "TimeGrid":
        n = int(round((t_max - t0) / dt))
        return cls(t0, (t_max - t0) / n, n)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * self.n_steps

    def index_of(self, t: float, rtol: float = 1e-9) -> int:
        """Index of the sample at time t; raises DomainError when t is off the grid."""
        j = int(round((t - self.t0) / self.dt))
        if j < 0 or j > self.n_steps or abs(self.t0 + j * self.dt - t) > rtol * max(self.dt, abs(t)):
            raise DomainError(f"t={t} is not a sample of {self}")
        return j


@dataclass(frozen=True)
class SpaceGrid:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise DomainError("x_min must be below x_max")
        if int(self.n_points) != self.n_points or self.n_points < 3:
            raise DomainError("n_points must be an integer >= 3")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex amplitude sampled on every node of a SpaceGrid (read-only)."""

    grid: SpaceGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise InvalidFieldError(f"expected {self.grid.n_points} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidFieldError("field contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def scaled(self, factor: complex) -> "ComplexField":
        return ComplexField(self.grid, self.values * factor)


def l2_norm_squared(f: ComplexField) -> float:
    """Trapezoidal integral of |psi|^2 over the grid."""
    v = np.asarray(f.values)
    if not np.all(np.isfinite(v)):
        raise InvalidFieldError("field contains non-finite values")
    return float(np.trapezoid(np.abs(v) ** 2, dx=f.grid.spacing))
