"""Independent numerical oracles.

* Crank-Nicolson (Cayley form) for i hbar psi_t = -hbar^2/2m psi_xx + V psi
  with psi = 0 at both ends of the grid.
* A time-sliced restricted propagator: repeated quadrature of the short-time
  free kernel over [a, b] only, with the epsilon-regularized Gaussian.
* Normalized Fresnel moments of that kernel, whose limits produce the
  Dirichlet condition at the edges of the interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import fft, ifft, next_fast_len
from scipy.linalg import lapack
from scipy.special import erf

from .core import (
    ComplexField,
    DomainError,
    InvalidFieldError,
    PhysicalParams,
    QAbsorbError,
    ResolutionError,
    SpaceGrid,
    TimeGrid,
)


@dataclass(frozen=True, eq=False)
class DirichletProblem:
    """Initial data and potential on a grid whose end nodes are walls."""

    initial: ComplexField
    potential: np.ndarray | None = field(default=None, repr=False)
    params: PhysicalParams = PhysicalParams()

    def __post_init__(self):
        n = self.initial.grid.n_points
        v = np.zeros(n) if self.potential is None else np.array(self.potential, dtype=float)
        if v.shape != (n,) or not np.all(np.isfinite(v)):
            raise DomainError("potential must be finite with one value per node")
        if self.initial.values[0] != 0 or self.initial.values[-1] != 0:
            raise InvalidFieldError("initial data must vanish exactly at both walls")
        v.flags.writeable = False
        object.__setattr__(self, "potential", v)

    @property
    def grid(self) -> SpaceGrid:
        return self.initial.grid


class _CayleyStepper:
    """(1 + i H dt / 2 hbar) psi_new = (1 - i H dt / 2 hbar) psi_old on interior nodes."""

    def __init__(self, problem: DirichletProblem, dt: float):
        p, h = problem.params, problem.grid.spacing
        v = problem.potential[1:-1]
        kin = p.hbar**2 / (2 * p.mass * h**2)
        r = 0.5j * dt / p.hbar
        diag = 2 * kin + v
        self.n = v.size
        self.d_lhs = 1 + r * diag
        self.off_lhs = np.full(self.n - 1, -r * kin, dtype=complex)
        self.d_rhs = 1 - r * diag
        self.off_rhs = r * kin
        dl, d, du, du2, ipiv, info = lapack.zgttrf(self.off_lhs, self.d_lhs, self.off_lhs)
        if info != 0:
            raise QAbsorbError(f"Cayley matrix factorization failed (info={info})")
        self._lu = (dl, d, du, du2, ipiv)

    def __call__(self, interior: np.ndarray) -> np.ndarray:
        rhs = self.d_rhs * interior
        rhs[1:] += self.off_rhs * interior[:-1]
        rhs[:-1] += self.off_rhs * interior[1:]
        out, info = lapack.zgttrs(*self._lu, rhs)
        if info != 0:
            raise QAbsorbError(f"tridiagonal solve failed (info={info})")
        return out


def crank_nicolson_evolve(problem: DirichletProblem, tgrid: TimeGrid, save_every: int = 1) -> list[ComplexField]:
    """Fields at t0, t0 + save_every dt, ...; the final step is always included."""
    step = _CayleyStepper(problem, tgrid.dt)
    grid = problem.grid
    psi = np.array(problem.initial.values[1:-1])
    out = [problem.initial]
    for j in range(1, tgrid.n_steps + 1):
        psi = step(psi)
        if j % save_every == 0 or j == tgrid.n_steps:
            full = np.zeros(grid.n_points, dtype=complex)
            full[1:-1] = psi
            out.append(ComplexField(grid, full))
    return out


def wall_derivative(values, spacing: float, wall: str = "left") -> complex:
    """Fourth-order one-sided derivative at the first or last node."""
    f = np.asarray(values)
    if wall == "left":
        return (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * spacing)
    if wall == "right":
        return (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * spacing)
    raise DomainError("wall must be 'left' or 'right'")


def crank_nicolson_wall_flux(problem: DirichletProblem, tgrid: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
    """|d psi/dx|^2 at the left and right walls at every time sample, without storing fields."""
    step = _CayleyStepper(problem, tgrid.dt)
    h = problem.grid.spacing
    left = np.empty(tgrid.n_steps + 1)
    right = np.empty(tgrid.n_steps + 1)
    psi = np.array(problem.initial.values[1:-1])
    for j in range(tgrid.n_steps + 1):
        if j:
            psi = step(psi)
        left[j] = abs((48 * psi[0] - 36 * psi[1] + 16 * psi[2] - 3 * psi[3]) / (12 * h)) ** 2
        right[j] = abs((-48 * psi[-1] + 36 * psi[-2] - 16 * psi[-3] + 3 * psi[-4]) / (12 * h)) ** 2
    return left, right


@dataclass(frozen=True)
class SliceKernel:
    """Short-time kernel sqrt(beta/pi) exp(-beta s^2), beta = (eps - i) m / (2 hbar dt).

    The prefactor makes the kernel integrate to one over the whole line for
    every eps, and reduces to sqrt(m / 2 pi i hbar dt) as eps -> 0.
    """

    dt: float
    grid: SpaceGrid
    eps: float = 1e-3
    params: PhysicalParams = PhysicalParams()

    def __post_init__(self):
        if not (self.dt > 0 and self.eps > 0):
            raise DomainError("dt and eps must be positive")

    @property
    def beta(self) -> complex:
        return (self.eps - 1j) * self.params.mass / (2 * self.params.hbar * self.dt)

    def hat_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Exact kernel integrals against the two halves of a hat function.

        Entry d + N - 1 holds the coupling from node j to node i = j + d; the
        first array covers the half of the hat on the side of node j - 1 as
        seen from x_i, the second the other half.
        """
        n, h, beta = self.grid.n_points, self.grid.spacing, self.beta
        sb = np.sqrt(beta)
        norm = np.sqrt(beta / np.pi)
        d = np.arange(-(n - 1), n)

        def i0(p, q):
            return np.sqrt(np.pi) / (2 * sb) * (erf(sb * q) - erf(sb * p))

        def i1(p, q):
            return (np.exp(-beta * p * p) - np.exp(-beta * q * q)) / (2 * beta)

        lo, mid, hi = (d - 1) * h, d * h, (d + 1) * h
        first = (i1(lo, mid) - lo * i0(lo, mid)) / h
        second = (hi * i0(mid, hi) - i1(mid, hi)) / h
        return norm * first, norm * second


class _SliceOperator:
    def __init__(self, kernel: SliceKernel, potential: np.ndarray | None):
        self.n = kernel.grid.n_points
        first, second = kernel.hat_weights()
        self.first, self.second = first, second
        self.size = next_fast_len(2 * self.n)
        padded = np.zeros(self.size, dtype=complex)
        padded[: 2 * self.n - 1] = first + second
        self.spectrum = fft(padded)
        p = kernel.params
        self.phase = None if potential is None else np.exp(-1j * np.asarray(potential) * kernel.dt / p.hbar)

    def __call__(self, f: np.ndarray) -> np.ndarray:
        n = self.n
        out = ifft(fft(f, self.size) * self.spectrum)[n - 1 : 2 * n - 1]
        # the end nodes carry half hats only
        idx = np.arange(n)
        out -= f[0] * self.second[idx + n - 1] + f[-1] * self.first[idx]
        return out if self.phase is None else out * self.phase


def feynman_slice_propagate(
    kernel: SliceKernel,
    initial: ComplexField,
    n_slices: int,
    potential=None,
    extrapolate: bool = False,
    growth_tol: float = 1e-2,
) -> ComplexField:
    """Apply n_slices restricted short-time propagations over the grid interval.

    Between nodes the field is taken piecewise linear, so each slice is an
    exact integral of the regularized kernel against that interpolant.  With
    ``extrapolate`` the result is Richardson-extrapolated to eps -> 0 from
    eps and eps/2.  A norm increase beyond ``growth_tol`` means the grid
    cannot represent the propagated field and raises ResolutionError.
    """
    if initial.grid != kernel.grid:
        raise DomainError("initial field and kernel must share a grid")
    if n_slices < 1:
        raise DomainError("n_slices must be >= 1")
    if extrapolate:
        coarse = feynman_slice_propagate(kernel, initial, n_slices, potential, False, growth_tol)
        half = SliceKernel(kernel.dt, kernel.grid, kernel.eps / 2, kernel.params)
        fine = feynman_slice_propagate(half, initial, n_slices, potential, False, growth_tol)
        return ComplexField(kernel.grid, 2 * fine.values - coarse.values)
    op = _SliceOperator(kernel, potential)
    f = np.array(initial.values)
    n0 = np.sum(np.abs(f) ** 2)
    for _ in range(n_slices):
        f = op(f)
    n1 = np.sum(np.abs(f) ** 2)
    if not np.all(np.isfinite(f)) or n1 > n0 * (1 + growth_tol):
        raise ResolutionError(
            f"slice propagation grew the discrete norm from {n0:.6g} to {n1:.6g} "
            f"(spacing {kernel.grid.spacing:.3g}, dt {kernel.dt:.3g}, eps {kernel.eps:.3g}); refine the grid"
        )
    return ComplexField(kernel.grid, f)


_MOMENT_SCALE = {0: 1.0, 1: 1.0, 2: -2j}


def fresnel_moment(n: int, alpha: float, a: float, b: float, y: float, eps: float) -> complex:
    """Normalized moment C_n (1/(i pi))^(1/2) int u^n exp((i - eps) u^2) du, u = sqrt(alpha)(x - y), x in [a, b].

    C_0 = C_1 = 1 and C_2 = -2i, so that for y inside (a, b) the limits as
    alpha -> infinity, eps -> 0 are 1, 0, 1; at y = a or y = b the zeroth
    moment tends to 1/2.
    """
    if n not in _MOMENT_SCALE:
        raise DomainError("moment order must be 0, 1 or 2")
    if not (eps > 0 and alpha > 0 and a < b):
        raise DomainError("require eps > 0, alpha > 0 and a < b")
    g = eps - 1j
    sg = np.sqrt(g)
    p, q = np.sqrt(alpha) * (a - y), np.sqrt(alpha) * (b - y)
    i0 = np.sqrt(np.pi) / (2 * sg) * (erf(sg * q) - erf(sg * p))
    ep, eq = np.exp(-g * p * p), np.exp(-g * q * q)
    if n == 0:
        val = i0
    elif n == 1:
        val = (ep - eq) / (2 * g)
    else:
        val = (i0 + p * ep - q * eq) / (2 * g)
    return complex(_MOMENT_SCALE[n] * np.sqrt(1 / (1j * np.pi)) * val)
