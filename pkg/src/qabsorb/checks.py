"""Cross-checks between the independent solvers, reported as pass/fail rows."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import box_modes, oracles, packet
from .absorption import FluxSeries, survival_from_flux
from .core import ComplexField, PhysicalParams, SpaceGrid, TimeGrid, l2_norm_squared


@dataclass(frozen=True)
class CheckResult:
    check: str
    value: float
    tolerance: float
    passed: bool


def _row(name: str, value: float, tol: float) -> CheckResult:
    return CheckResult(name, float(value), float(tol), bool(value <= tol))


def two_mode_box(width_a: float = 1.0, lam: float = 0.2) -> box_modes.BoxExpansion:
    amp = 1.0 / np.sqrt(width_a)
    return box_modes.BoxExpansion(width_a, [1, 2], [amp, amp], PhysicalParams(lambda_left=lam))


def cn_survival_deviation(n_points: int = 4001, dt: float = 2e-5) -> float:
    """Max relative gap between CN-flux survival and the closed two-level law over five beat periods."""
    ex = two_mode_box()
    grid = SpaceGrid(0.0, ex.width_a, n_points)
    t_end = 5.0 / box_modes.beat_frequency(1, 2, ex.width_a, ex.params)
    tg = TimeGrid.spanning(t_end, dt)
    left, _ = oracles.crank_nicolson_wall_flux(oracles.DirichletProblem(box_modes.evolve(ex, 0.0, grid), params=ex.params), tg)
    s = survival_from_flux(FluxSeries.single(tg, left, ex.params.lambda_left), ex.params)
    amp = float(ex.amplitudes[0].real)
    ref = box_modes.two_level_survival(1, 2, amp, amp, tg.times, ex.params, ex.width_a)
    return float(np.max(np.abs(s.values / ref - 1.0)))


def slice_study(n_points: int, dts, t_end: float = 0.1, eps: float = 1e-3):
    """L2 error against the exact two-mode evolution and |psi| at the right wall, per dt."""
    ex = two_mode_box()
    grid = SpaceGrid(0.0, ex.width_a, n_points)
    init = box_modes.evolve(ex, 0.0, grid)
    ref = box_modes.evolve(ex, t_end, grid)
    errors, walls = [], []
    for dt in dts:
        n = int(round(t_end / dt))
        out = oracles.feynman_slice_propagate(oracles.SliceKernel(t_end / n, grid, eps), init, n)
        errors.append(np.sqrt(l2_norm_squared(ComplexField(grid, out.values - ref.values))))
        walls.append(abs(out.values[-1]))
    return np.array(errors), np.array(walls)


def run_oracle_checks(quick: bool = False) -> list[CheckResult]:
    rows = []
    rows.append(_row("cn-vs-spectral-survival", cn_survival_deviation(1001 if quick else 4001, 8e-5 if quick else 2e-5), 1e-4))

    alpha, eps = 1e6, 1e-4
    rows.append(_row("fresnel-m0-interior", abs(oracles.fresnel_moment(0, alpha, 0, 1, 0.5, eps) - 1), 1e-3))
    rows.append(_row("fresnel-m1-interior", abs(oracles.fresnel_moment(1, alpha, 0, 1, 0.5, eps)), 1e-3))
    rows.append(_row("fresnel-m2-interior", abs(oracles.fresnel_moment(2, alpha, 0, 1, 0.5, eps) - 1), 1e-3))
    rows.append(_row("fresnel-m0-boundary", abs(oracles.fresnel_moment(0, alpha, 0, 1, 1.0, eps) - 0.5), 1e-3))

    p = packet.GaussianPacketParams(1.0, 5.0, 5.0)
    t = np.linspace(0.2, 2.0, 20)
    h = 1e-4
    xs = -h * np.arange(5)
    f = packet.packet_value(xs[:, None], t[None, :], p)
    fd = oracles.wall_derivative(f, -h, "left")
    rows.append(_row("packet-flux-closed-form", np.max(np.abs(np.abs(fd) ** 2 / packet.boundary_flux(t, p) - 1)), 1e-6))

    if quick:
        errors, walls = slice_study(4001, [1.6e-4, 8e-5])
    else:
        errors, walls = slice_study(16001, [4e-5, 2e-5, 1e-5])
    rows.append(_row("slice-vs-exact-l2", errors[-1], 1e-3))
    rows.append(CheckResult("slice-wall-monotone", float(np.max(np.diff(walls))), 0.0, bool(np.all(np.diff(walls) < 0))))
    return rows
