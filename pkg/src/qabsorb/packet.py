"""Gaussian packet on the half line x < 0 moving toward an absorbing wall at x = 0.

The reflecting-wall solution is the free Gaussian minus its mirror image, so
psi(0, t) = 0 for all t and every observable below has a closed form.  The
global phase of the packet is fixed to zero; nothing downstream depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .absorption import FluxSeries, SurvivalSeries, survival_from_flux
from .core import ConvergenceError, DomainError, PhysicalParams, TimeGrid


@dataclass(frozen=True)
class GaussianPacketParams:
    """Packet of width ``width_a`` launched at x = -x0 with mean wavenumber k0 > 0 (toward the wall).

    The absorption length of the wall is ``params.lambda_left``.
    """

    width_a: float
    x0: float
    k0: float
    params: PhysicalParams = PhysicalParams(lambda_left=1.0)

    def __post_init__(self):
        if not (self.width_a > 0 and self.x0 > 0):
            raise DomainError("packet width and launch distance must be positive")
        # A < 1 analytically, but rounds to 1.0 once the image overlap is below machine epsilon
        if not 0.0 < self.norm_constant <= 1.0:
            raise DomainError(f"normalization constant {self.norm_constant} outside (0, 1]")

    @property
    def norm_constant(self) -> float:
        """A = 1 - exp(-2 x0^2 / a^2) exp(-a^2 k0^2 / 2)."""
        a = self.width_a
        return float(-np.expm1(-2.0 * self.x0**2 / a**2 - 0.5 * a**2 * self.k0**2))

    @property
    def lam(self) -> float:
        return self.params.lambda_left

    @property
    def velocity(self) -> float:
        return self.params.hbar * self.k0 / self.params.mass

    @property
    def arrival_time(self) -> float:
        """Classical arrival time x0 m / (hbar k0); infinite when k0 <= 0."""
        return self.x0 / self.velocity if self.k0 > 0 else np.inf

    def with_lambda(self, lam: float) -> "GaussianPacketParams":
        return GaussianPacketParams(self.width_a, self.x0, self.k0, self.params.with_lambdas(lam, self.params.lambda_right))


def _terms(x, t, p: GaussianPacketParams):
    hb, m, a, x0, k0 = p.params.hbar, p.params.mass, p.width_a, p.x0, p.k0
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be non-negative")
    q = a**2 + 2j * hb * t / m
    pref = (2 * a**2 / np.pi) ** 0.25 / np.sqrt(p.norm_constant) / (a**4 + 4 * hb**2 * t**2 / m**2) ** 0.25
    u1 = x + x0 - hb * k0 * t / m
    u2 = x - x0 + hb * k0 * t / m
    g1 = np.exp(-(u1**2) / q + 1j * k0 * (x + x0))
    g2 = np.exp(-(u2**2) / q - 1j * k0 * (x - x0))
    return pref, q, u1, u2, g1, g2


def packet_value(x, t, p: GaussianPacketParams):
    """Image-method wave function psi(x, t) for x <= 0; broadcasts over x and t."""
    pref, _, _, _, g1, g2 = _terms(x, t, p)
    out = pref * (g1 - g2)
    return complex(out) if np.ndim(out) == 0 else out


def packet_gradient(x, t, p: GaussianPacketParams):
    """Analytic d psi / dx of :func:`packet_value`."""
    pref, q, u1, u2, g1, g2 = _terms(x, t, p)
    out = pref * ((-2 * u1 / q + 1j * p.k0) * g1 - (-2 * u2 / q - 1j * p.k0) * g2)
    return complex(out) if np.ndim(out) == 0 else out


def _flux_prefactor(p: GaussianPacketParams) -> float:
    hb, m, a, x0, k0 = p.params.hbar, p.params.mass, p.width_a, p.x0, p.k0
    return 4.0 * np.sqrt(2.0) * a * m**3 * (4 * x0**2 + a**4 * k0**2) / (np.sqrt(np.pi) * p.norm_constant)


def boundary_flux(t, p: GaussianPacketParams):
    """|d psi/dx (0, t)|^2 in closed form."""
    hb, m, a, x0, k0 = p.params.hbar, p.params.mass, p.width_a, p.x0, p.k0
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be non-negative")
    d = a**4 * m**2 + 4 * t**2 * hb**2
    out = _flux_prefactor(p) / d**1.5 * np.exp(-2 * a**2 * (x0 * m - hb * k0 * t) ** 2 / d)
    return float(out) if out.ndim == 0 else out


def boundary_flux_rate(t, p: GaussianPacketParams, convention: str = "pi-m"):
    """Instantaneous absorption rate kappa |d psi/dx (0, t)|^2."""
    return p.params.rate_constant(p.lam, convention) * boundary_flux(t, p)


def tail_constant(p: GaussianPacketParams, convention: str = "pi-m") -> float:
    """C such that the absorption rate is bounded by C t^-3 for every t > 0."""
    hb = p.params.hbar
    return p.params.rate_constant(p.lam, convention) * _flux_prefactor(p) / (2 * hb) ** 3


def _panel_edges(p: GaussianPacketParams, t_max: float) -> np.ndarray:
    """Breakpoints concentrated around the arrival time, then geometric out to t_max."""
    hb, m, a = p.params.hbar, p.params.mass, p.width_a
    t_star = p.arrival_time if np.isfinite(p.arrival_time) else a**2 * m / hb
    width = max(a * m / (hb * max(abs(p.k0), 1e-12)), a**2 * m / hb) if p.k0 > 0 else a**2 * m / hb
    core = np.clip(t_star + width * np.arange(-6, 7), 0.0, None)
    far = np.geomspace(max(core[-1], 1e-12), max(t_max, core[-1] * 2), 40)
    edges = np.unique(np.concatenate([[0.0], core, far]))
    return edges[edges <= t_max] if t_max > edges[0] else np.array([0.0, t_max])


@dataclass(frozen=True)
class ReflectionResult:
    reflection: float
    exponent: float
    t_max: float
    tail_bound: float
    quad_error: float


def reflection_coefficient(
    p: GaussianPacketParams,
    convention: str = "pi-m",
    tol: float = 1e-10,
    t_max: float | None = None,
    full_output: bool = False,
):
    """R = S(infinity) = exp(-int_0^inf rate dt).

    The integral is split into panels around the arrival time and integrated
    adaptively up to t_max; the remainder is bounded by C / (2 t_max^2) from
    the t^-3 envelope.  With ``t_max=None`` it is chosen so this bound is
    below ``tol``; an explicit t_max whose bound exceeds tol raises
    ConvergenceError.
    """
    c = tail_constant(p, convention)
    if c == 0.0:
        res = ReflectionResult(1.0, 0.0, 0.0, 0.0, 0.0)
        return res if full_output else res.reflection
    if t_max is None:
        t_max = max(1.01 * np.sqrt(c / (2 * tol)), 10 * p.arrival_time if np.isfinite(p.arrival_time) else 0.0)
    bound = c / (2 * t_max**2)
    if bound > tol:
        raise ConvergenceError(f"tail bound {bound:.3e} at t_max={t_max} exceeds tolerance {tol:.1e}")
    edges = _panel_edges(p, t_max)
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(boundary_flux_rate, lo, hi, args=(p, convention), epsabs=tol / len(edges), epsrel=1e-13, limit=200)
        total += v
        err += e
    if err > tol:
        raise ConvergenceError(f"panel quadrature error estimate {err:.3e} exceeds tolerance {tol:.1e}")
    res = ReflectionResult(float(np.exp(-total)), total, float(t_max), bound, err)
    return res if full_output else res.reflection


def absorbed_exponent(t, p: GaussianPacketParams, convention: str = "pi-m"):
    """int_0^t rate dt' at each requested time, by adaptive quadrature between sorted samples."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be non-negative")
    flat = t.ravel()
    order = np.argsort(flat)
    out = np.empty_like(flat)
    acc, prev = 0.0, 0.0
    for i in order:
        hi = flat[i]
        if hi > prev:
            edges = [e for e in _panel_edges(p, hi) if prev < e < hi]
            for lo2, hi2 in zip([prev, *edges], [*edges, hi]):
                acc += integrate.quad(boundary_flux_rate, lo2, hi2, args=(p, convention), epsabs=1e-14, epsrel=1e-12, limit=200)[0]
            prev = hi
        out[i] = acc
    out = out.reshape(t.shape)
    return float(out) if out.ndim == 0 else out


def survival(t, p: GaussianPacketParams, convention: str = "pi-m"):
    """Total-absorption survival S(t) evaluated pointwise."""
    return np.exp(-absorbed_exponent(t, p, convention))


def flux_series(p: GaussianPacketParams, grid: TimeGrid) -> FluxSeries:
    return FluxSeries.single(grid, boundary_flux(grid.times, p), p.lam, name="wall")


def survival_series(p: GaussianPacketParams, grid: TimeGrid, convention: str = "pi-m") -> SurvivalSeries:
    return survival_from_flux(flux_series(p, grid), p.params, convention)


def sine_coefficient(k, p: GaussianPacketParams):
    """Amplitude of the t = 0 packet on the normalized mode sqrt(2/pi) sin(k x), k > 0.

    Computed as sqrt(2/pi) int_0^inf sin(k s) psi(-s, 0) ds, which fixes the overall sign.
    """
    a, x0, k0 = p.width_a, p.x0, p.k0
    k = np.asarray(k, dtype=float)
    pref = 1j * (2 * np.pi) ** -0.25 * np.sqrt(a / p.norm_constant)
    out = pref * (
        np.exp(-1j * k * x0 - (k + k0) ** 2 * a**2 / 4) - np.exp(1j * k * x0 - (k - k0) ** 2 * a**2 / 4)
    )
    return complex(out) if out.ndim == 0 else out


def mode_decay_rate(k, p: GaussianPacketParams):
    """E_k / hbar = |a_k|^2 hbar k^2 / 2m in expanded form.

    The product exp(-(k^2 + k0^2) a^2 / 2) cosh(k k0 a^2) is evaluated as a
    sum of two Gaussians so large k cannot overflow.
    """
    hb, m, a, x0, k0 = p.params.hbar, p.params.mass, p.width_a, p.x0, p.k0
    k = np.asarray(k, dtype=float)
    gauss = 0.5 * (np.exp(-((k - k0) ** 2) * a**2 / 2) + np.exp(-((k + k0) ** 2) * a**2 / 2))
    cos_part = np.exp(-(k0**2 + k**2) * a**2 / 2) * np.cos(2 * x0 * k)
    out = a * hb * k**2 / (np.sqrt(2 * np.pi) * m * p.norm_constant) * (gauss - cos_part)
    return float(out) if out.ndim == 0 else out


def energy_window_survival(t, p: GaussianPacketParams, k_max: float | None = None, n_k: int = 20001, mass_tol: float = 1e-6):
    """int_0^K |a_k|^2 exp(-E_k t / hbar) dk on a uniform k grid.

    Raises ConvergenceError when the grid captures less than 1 - mass_tol of
    the spectral weight.
    """
    if k_max is None:
        k_max = abs(p.k0) + 12.0 / p.width_a
    k = np.linspace(0.0, k_max, n_k)
    w = np.abs(sine_coefficient(k, p)) ** 2
    mass = np.trapezoid(w, k)
    if mass < 1.0 - mass_tol:
        raise ConvergenceError(f"k grid captures spectral weight {mass:.8f}; raise k_max")
    rates = mode_decay_rate(k, p)
    t = np.asarray(t, dtype=float)
    out = np.trapezoid(w * np.exp(-np.multiply.outer(t, rates)), k, axis=-1)
    return float(out) if out.ndim == 0 else out


def energy_window_audit(t, p: GaussianPacketParams, convention: str = "pi-m", **kw):
    """Energy-window minus total-absorption survival at the requested times."""
    return energy_window_survival(t, p, **kw) - survival(t, p, convention)
