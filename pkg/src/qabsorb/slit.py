"""Separable two-dimensional slit geometry with an absorbing screen at x = 0.

The x-motion is the Gaussian packet of :mod:`qabsorb.packet` (mirrored so the
slit sits at x = +x0), the y-motion is either a freely spreading Gaussian slit
or a flat slit on (-pi/2, pi/2) confined between absorbing walls at y = +-y0.
Because psi = psi1(x, t) psi2(y, t), every pattern factors into an x-part and
a y-part.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .core import ConvergenceError, DomainError, PhysicalParams
from .packet import (
    GaussianPacketParams,
    boundary_flux,
    boundary_flux_rate,
    packet_gradient,
    packet_value,
    survival,
    tail_constant,
)

SLIT_HALF_WIDTH = np.pi / 2


@dataclass(frozen=True)
class SlitConfig:
    """Slit geometry; the screen absorbs with params.lambda_left, the lateral walls with params.lambda_right."""

    sigma_x: float = 0.5
    sigma_y: float = 1.0
    x0: float = 10.0
    v0: float = 10.0
    y0: float = 2.0
    params: PhysicalParams = PhysicalParams(lambda_left=1.0, lambda_right=1.0)

    def __post_init__(self):
        if not (self.sigma_x > 0 and self.sigma_y > 0 and self.x0 > 0 and self.v0 > 0 and self.y0 > 0):
            raise DomainError("widths, distance, velocity and y0 must be positive")
        if not self.sigma_x < self.x0 / 5:
            raise DomainError("the packet must be narrow compared with the slit-screen distance (sigma_x < x0/5)")

    @property
    def t_bar(self) -> float:
        return self.x0 / self.v0

    def x_packet(self) -> GaussianPacketParams:
        """x-packet with |psi|^2 of standard deviation sigma_x/2 and mean velocity v0."""
        p = self.params
        return GaussianPacketParams(
            np.sqrt(2.0) * self.sigma_x, self.x0, p.mass * self.v0 / p.hbar, PhysicalParams(p.hbar, p.mass, p.lambda_left)
        )

    def require_lateral(self):
        if not self.y0 > SLIT_HALF_WIDTH:
            raise DomainError("lateral walls must lie outside the slit (y0 > pi/2)")


@dataclass(frozen=True, eq=False)
class PatternGrid:
    coordinate: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    kind: str = "cumulative"
    t: float | None = None

    def __post_init__(self):
        c = np.array(self.coordinate, dtype=float)
        d = np.array(self.density, dtype=float)
        if c.shape != d.shape or c.ndim != 1:
            raise DomainError("coordinate and density must be 1-D arrays of equal length")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise DomainError("pattern density must be finite and non-negative")
        if self.kind not in ("instantaneous", "cumulative"):
            raise DomainError("kind must be 'instantaneous' or 'cumulative'")
        for arr in (c, d):
            arr.flags.writeable = False
        object.__setattr__(self, "coordinate", c)
        object.__setattr__(self, "density", d)

    def mass(self) -> float:
        return float(np.trapezoid(self.density, self.coordinate))


def _spread(sigma: float, t, params: PhysicalParams):
    return params.hbar**2 * np.asarray(t, dtype=float) ** 2 / (sigma**2 * params.mass**2) + sigma**2


def gaussian_slit_density(y, t, cfg: SlitConfig):
    """|psi2(y, t)|^2 of the freely spreading Gaussian slit; its y-integral is 1/(2 sqrt(pi) sigma_y)."""
    w = _spread(cfg.sigma_y, t, cfg.params)
    y = np.asarray(y, dtype=float)
    out = np.exp(-(y**2) / w) / (2 * np.pi * cfg.sigma_y * np.sqrt(w))
    return float(out) if np.ndim(out) == 0 else out


def slit_density_mass(cfg: SlitConfig) -> float:
    return 1.0 / (2.0 * np.sqrt(np.pi) * cfg.sigma_y)


def screen_current(y, t, cfg: SlitConfig, packet: GaussianPacketParams | None = None, normalized: bool = True, convention: str = "pi-m"):
    """Absorption current density kappa |d psi1/dx (0, t)|^2 S(t) |psi2(y, t)|^2 on the screen.

    With ``normalized`` the y-density is divided by its (constant) mass so the
    current integrates to the x-packet's absorption current.  Broadcasts over y and t.
    """
    packet = packet or cfg.x_packet()
    y, t = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(t, dtype=float))
    x_part = boundary_flux_rate(t, packet, convention) * survival(t, packet, convention)
    dens = gaussian_slit_density(y, t, cfg)
    if normalized:
        dens = dens / slit_density_mass(cfg)
    out = x_part * dens
    return float(out) if out.ndim == 0 else out


def _time_nodes(packet: GaussianPacketParams, t_max: float, n: int) -> np.ndarray:
    """Uniform nodes through the arrival pulse, geometric nodes out to t_max."""
    t_core = 4.0 * packet.arrival_time if np.isfinite(packet.arrival_time) else packet.width_a**2
    t_core = min(t_core, t_max)
    core = np.linspace(0.0, t_core, 2 * n + 1)
    if t_max <= t_core:
        return core
    far = np.geomspace(t_core, t_max, n // 2 + 1)
    return np.concatenate([core, far[1:]])


def cumulative_pattern(
    y,
    cfg: SlitConfig,
    packet: GaussianPacketParams | None = None,
    tol: float = 1e-8,
    convention: str = "pi-m",
    n_start: int = 256,
    max_halvings: int = 8,
) -> PatternGrid:
    """Time-integrated screen current at each y (the pattern left after all arrivals).

    Simpson quadrature on refining time grids until the pattern changes by
    less than ``tol`` relative to its peak; the part beyond t_max is bounded
    through the t^-3 envelope of the flux.
    """
    packet = packet or cfg.x_packet()
    y = np.atleast_1d(np.asarray(y, dtype=float))
    c = tail_constant(packet, convention)
    if c == 0.0:
        return PatternGrid(y, np.zeros_like(y))
    dens_max = 1.0 / (np.sqrt(np.pi) * cfg.sigma_y) / slit_density_mass(cfg)
    t_max = np.sqrt(c * dens_max / (2 * tol))
    prev = None
    n = n_start
    for _ in range(max_halvings + 1):
        t = _time_nodes(packet, t_max, n)
        rate = boundary_flux_rate(t, packet, convention)
        s = np.exp(-cumulative_simpson(rate, x=t, initial=0.0))
        dens = gaussian_slit_density(y[:, None], t[None, :], cfg) / slit_density_mass(cfg)
        cur = simpson(rate * s * dens, x=t, axis=1)
        if prev is not None and np.max(np.abs(cur - prev)) <= tol * max(np.max(np.abs(cur)), 1e-300):
            return PatternGrid(y, np.maximum(cur, 0.0))
        prev, n = cur, 2 * n
    raise ConvergenceError(f"screen pattern did not settle to {tol:.1e} after {max_halvings} halvings")


def concentrated_velocity_pattern(y, cfg: SlitConfig, packet: GaussianPacketParams | None = None, convention: str = "pi-m") -> PatternGrid:
    """Screen current frozen at the classical arrival time t_bar = x0 / v0."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return PatternGrid(y, screen_current(y, cfg.t_bar, cfg, packet, convention=convention), "instantaneous", cfg.t_bar)


def feynman_density(y, t, cfg: SlitConfig):
    """|psi(0, y, t)|^2 of the unabsorbed two-dimensional Gaussian at the screen plane."""
    w = _spread(cfg.sigma_x, t, cfg.params)
    x_part = np.exp(-(cfg.x0**2) / w) / (2 * np.pi * cfg.sigma_x * np.sqrt(w))
    out = x_part * gaussian_slit_density(y, t, cfg)
    return float(out) if np.ndim(out) == 0 else out


def relative_brightness(t, cfg: SlitConfig, packet: GaussianPacketParams | None = None, y=0.0, convention: str = "pi-m"):
    """lambda |d Psi/dx (0, y, t)|^2 / |psi_F(0, y, t)|^2 for the discounted (absorbed) wave function.

    Both numerator and denominator carry the same y-density, so the ratio depends on t only.
    """
    packet = packet or cfg.x_packet()
    num = packet.lam * boundary_flux(t, packet) * survival(t, packet, convention) * gaussian_slit_density(y, t, cfg)
    out = num / feynman_density(y, t, cfg)
    return float(out) if np.ndim(out) == 0 else out


def slit_velocity_density(k):
    """|sin(pi k / 2) / (pi k / 2)|^2, the transverse velocity profile of the flat slit."""
    out = np.sinc(np.asarray(k, dtype=float) / 2) ** 2
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class LateralSeries:
    """Modes of the y-motion between the lateral walls.

    basis="dirichlet": sin(n pi (y + y0) / 2 y0), the eigenfunctions of the
    channel, with the exact expansion of the normalized flat slit and energies
    hbar^2 k_n^2 / 2m.  A Gaussian edge smoothing exp(-k_n^2 w^2 / 2) keeps the
    wall flux finite; edge_width=0 gives the sharp slit.

    basis="verbatim": sin(n pi y / y0) with coefficients 2 cos(n pi^2 / 4 y0) / (n pi^(3/2))
    and phases exp(-i n^2 pi^2 t / (hbar y0^2)); ``consistent_energies`` swaps
    in E_n = hbar^2 n^2 pi^2 / (2 m y0^2) and ``window_decay`` adds the
    damping exp(-lambda n^2 pi^2 t / y0^2) with lambda = params.lambda_right.
    """

    y0: float
    n_max: int = 200
    params: PhysicalParams = PhysicalParams()
    basis: str = "dirichlet"
    edge_width: float = 0.1
    consistent_energies: bool = False
    window_decay: bool = False

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError("n_max must be >= 1")
        if self.basis not in ("dirichlet", "verbatim"):
            raise DomainError("basis must be 'dirichlet' or 'verbatim'")
        if self.window_decay and self.basis != "verbatim":
            raise DomainError("window decay is only defined for the verbatim series")
        if self.edge_width < 0:
            raise DomainError("edge_width must be non-negative")

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, self.n_max + 1)

    @property
    def wavenumbers(self) -> np.ndarray:
        scale = 2 * self.y0 if self.basis == "dirichlet" else self.y0
        return self.n * np.pi / scale

    @property
    def coefficients(self) -> np.ndarray:
        n, y0 = self.n, self.y0
        if self.basis == "verbatim":
            return 2 * np.cos(n * np.pi**2 / (4 * y0)) / (n * np.pi**1.5)
        c = 4 * np.sin(n * np.pi / 2) * np.sin(n * np.pi**2 / (4 * y0)) / (n * np.pi**1.5)
        if self.edge_width > 0:
            c = c * np.exp(-0.5 * (self.wavenumbers * self.edge_width) ** 2)
            c = c / np.sqrt(np.sum(c**2) * y0)
        return c

    @property
    def rates(self) -> np.ndarray:
        """Complex exponent per mode: psi2 carries exp(-rates * t)."""
        p, n, y0 = self.params, self.n, self.y0
        if self.basis == "dirichlet" or self.consistent_energies:
            k = self.n * np.pi / (2 * y0 if self.basis == "dirichlet" else y0)
            r = 1j * p.hbar * k**2 / (2 * p.mass)
        else:
            r = 1j * n**2 * np.pi**2 / (p.hbar * y0**2)
        if self.window_decay:
            r = r + p.lambda_right * n**2 * np.pi**2 / y0**2
        return r

    def _basis(self, y) -> np.ndarray:
        shift = self.y0 if self.basis == "dirichlet" else 0.0
        return np.sin(np.multiply.outer(np.asarray(y, dtype=float) + shift, self.wavenumbers))

    def value(self, y, t):
        """psi2(y, t), shape broadcast(y) x broadcast(t) flattened as (len(y), len(t))."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(np.abs(y) > self.y0 * (1 + 1e-12)):
            raise DomainError("|y| must not exceed y0")
        t = np.atleast_1d(np.asarray(t, dtype=float))
        phase = np.exp(-np.multiply.outer(t, self.rates))
        out = (self._basis(y) * self.coefficients) @ phase.T
        out[np.isclose(np.abs(y), self.y0, rtol=1e-14, atol=0.0)] = 0.0
        return out

    def wall_derivative(self, t, side: int = 1) -> np.ndarray:
        """d psi2/dy at y = side * y0."""
        k = self.wavenumbers
        shift = self.y0 if self.basis == "dirichlet" else 0.0
        slope = self.coefficients * k * np.cos(k * (side * self.y0 + shift))
        return np.exp(-np.multiply.outer(np.atleast_1d(np.asarray(t, dtype=float)), self.rates)) @ slope


def lateral_series(cfg: SlitConfig, n_max: int = 200, **kw) -> LateralSeries:
    cfg.require_lateral()
    return LateralSeries(cfg.y0, n_max, cfg.params, **kw)


def lateral_psi2(y, t, cfg: SlitConfig, n_max: int = 200, **kw):
    """Truncated y-series for the flat slit between the lateral walls; shape (len(y), len(t))."""
    return lateral_series(cfg, n_max, **kw).value(y, t)


def _lateral_rate(t, series: LateralSeries, packet: GaussianPacketParams, convention: str):
    """Total absorption rate: screen flux plus flux into both lateral walls.

    The factor norms are conserved (int |psi1|^2 dx = 1, int |psi2|^2 dy = 1),
    so the two-dimensional boundary integrals reduce to one-dimensional fluxes.
    """
    p = series.params
    wall_flux = np.abs(series.wall_derivative(t, 1)) ** 2 + np.abs(series.wall_derivative(t, -1)) ** 2
    return boundary_flux_rate(t, packet, convention) + p.rate_constant(p.lambda_right, convention) * wall_flux


def _lateral_quadrature(integrand, series, packet, convention, tol, dt0, max_halvings, t_cap):
    """Trapezoid in time on refining uniform grids, stopping when S(T) bounds the tail."""
    a = packet.width_a
    psi1_bound = 4 * np.sqrt(2 / np.pi) / (a * packet.norm_constant)
    t_end = max(4 * packet.arrival_time if np.isfinite(packet.arrival_time) else 1.0, 1.0)
    while True:
        t = np.linspace(0.0, t_end, int(np.ceil(t_end / dt0)) + 1)
        rate = _lateral_rate(t, series, packet, convention)
        expo = np.concatenate([[0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(t))])
        if psi1_bound * np.exp(-expo[-1]) <= tol or t_end >= t_cap:
            break
        t_end *= 2
    if psi1_bound * np.exp(-expo[-1]) > tol:
        raise ConvergenceError(f"lateral survival at t={t_end} still bounds the tail above {tol:.1e}")
    prev = None
    n = t.size - 1
    for _ in range(max_halvings + 1):
        t = np.linspace(0.0, t_end, n + 1)
        rate = _lateral_rate(t, series, packet, convention)
        s = np.exp(-np.concatenate([[0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(t))]))
        cur = np.trapezoid(integrand(t) * s, t, axis=-1)
        if prev is not None and np.max(np.abs(cur - prev)) <= tol * max(np.max(np.abs(cur)), 1e-300):
            return cur
        prev, n = cur, 2 * n
    raise ConvergenceError(f"lateral pattern did not settle to {tol:.1e} after {max_halvings} halvings")


def lateral_wall_pattern(
    x,
    cfg: SlitConfig,
    packet: GaussianPacketParams | None = None,
    n_max: int = 200,
    reading: str = "flux",
    side: int = 1,
    tol: float = 1e-6,
    convention: str = "pi-m",
    dt0: float = 2e-3,
    max_halvings: int = 8,
    t_cap: float = 1e3,
    **series_kw,
) -> PatternGrid:
    """Time-integrated trace density on the wall y = side * y0, as a function of distance x from the screen.

    reading="flux": kappa_wall |psi1(x, t)|^2 |d psi2/dy (side y0, t)|^2 S(t), the
    normal current into the wall.  reading="verbatim": |d psi1/dx (x, t)|^2
    |psi2(side y0, t)|^2, which vanishes identically for a series obeying the
    wall condition.
    """
    if reading not in ("flux", "verbatim"):
        raise DomainError("reading must be 'flux' or 'verbatim'")
    if side not in (1, -1):
        raise DomainError("side must be +1 or -1")
    packet = packet or cfg.x_packet()
    series = lateral_series(cfg, n_max, **series_kw)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise DomainError("x must be non-negative (distance from the screen)")
    p = cfg.params
    kappa = p.rate_constant(p.lambda_right, convention)
    if reading == "verbatim":
        def integrand(t):
            edge = np.abs(series.value([side * cfg.y0], t)[0]) ** 2
            return np.abs(packet_gradient(-x[:, None], t[None, :], packet)) ** 2 * edge
    else:
        def integrand(t):
            wall = np.abs(series.wall_derivative(t, side)) ** 2
            return kappa * np.abs(packet_value(-x[:, None], t[None, :], packet)) ** 2 * wall
    if reading == "flux" and kappa == 0.0:
        return PatternGrid(x, np.zeros_like(x))
    dens = _lateral_quadrature(integrand, series, packet, convention, tol, dt0, max_halvings, t_cap)
    return PatternGrid(x, np.maximum(dens, 0.0))


def lateral_screen_pattern(
    y,
    cfg: SlitConfig,
    packet: GaussianPacketParams | None = None,
    n_max: int = 200,
    tol: float = 1e-6,
    convention: str = "pi-m",
    dt0: float = 2e-3,
    max_halvings: int = 8,
    t_cap: float = 1e3,
    **series_kw,
) -> PatternGrid:
    """Time-integrated screen current inside the channel, kappa |d psi1/dx (0, t)|^2 |psi2(y, t)|^2 S(t)."""
    packet = packet or cfg.x_packet()
    series = lateral_series(cfg, n_max, **series_kw)
    y = np.atleast_1d(np.asarray(y, dtype=float))

    def integrand(t):
        return boundary_flux_rate(t, packet, convention)[None, :] * np.abs(series.value(y, t)) ** 2

    return PatternGrid(y, np.maximum(_lateral_quadrature(integrand, series, packet, convention, tol, dt0, max_halvings, t_cap), 0.0))


def lateral_concentrated_pattern(y, cfg: SlitConfig, packet: GaussianPacketParams | None = None, n_max: int = 200, convention: str = "pi-m", **series_kw) -> PatternGrid:
    """Screen histogram approximated by its value at the arrival time, without absorption attenuation."""
    packet = packet or cfg.x_packet()
    series = lateral_series(cfg, n_max, **series_kw)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    t = packet.arrival_time
    dens = boundary_flux(t, packet) * np.abs(series.value(y, t)[:, 0]) ** 2
    return PatternGrid(y, dens, "instantaneous", t)
