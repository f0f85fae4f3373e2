import numpy as np
import pytest
from scipy import integrate

from qabsorb import packet as pk
from qabsorb.absorption import absorption_current
from qabsorb.core import ConvergenceError, DomainError, PhysicalParams, TimeGrid

P = pk.GaussianPacketParams(1.0, 5.0, 5.0, PhysicalParams(lambda_left=1.0))

# exp(-int rate dt) for hbar = m = a = 1, x0 = k0 = 5, lambda = 1; pinned by
# 30-digit mpmath quadrature and by step-halved Simpson after t = s/(1-s).
GOLDEN_R = 0.0017186815698056


def test_params_validation():
    with pytest.raises(DomainError):
        pk.GaussianPacketParams(1.0, -1.0, 5.0)
    with pytest.raises(DomainError):
        pk.GaussianPacketParams(0.0, 1.0, 5.0)
    soft = pk.GaussianPacketParams(1.0, 0.5, 0.5)
    assert 0 < soft.norm_constant < 1
    assert P.arrival_time == pytest.approx(1.0)


def test_packet_vanishes_at_wall():
    t = np.linspace(0, 5, 51)
    lead = np.abs(pk._terms(0.0, t, P)[4] * pk._terms(0.0, t, P)[0])
    assert np.all(np.abs(pk.packet_value(0.0, t, P)) <= 1e-14 * np.maximum(lead, 1e-300))


def test_packet_initial_shape_and_norm():
    p = pk.GaussianPacketParams(1.0, 8.0, 2.0)
    x = np.linspace(-9, -7, 11)
    env = (2 / (np.pi * p.width_a**2)) ** 0.25 / np.sqrt(p.norm_constant) * np.exp(-((x + 8) ** 2) / p.width_a**2)
    np.testing.assert_allclose(np.abs(pk.packet_value(x, 0.0, p)), env, rtol=1e-12)
    norm, _ = integrate.quad(lambda x: abs(pk.packet_value(x, 0.0, P)) ** 2, -np.inf, 0)
    assert norm == pytest.approx(1.0, abs=1e-8)
    # Dirichlet evolution on the half line is unitary
    norm_t, _ = integrate.quad(lambda x: abs(pk.packet_value(x, 0.7, P)) ** 2, -60, 0, limit=400)
    assert norm_t == pytest.approx(1.0, abs=1e-8)


def test_gradient_matches_finite_difference():
    x, t, h = -4.3, 0.6, 1e-6
    fd = (pk.packet_value(x + h, t, P) - pk.packet_value(x - h, t, P)) / (2 * h)
    assert abs(pk.packet_gradient(x, t, P) - fd) < 1e-7 * abs(fd)


def test_flux_rate_examples():
    assert pk.boundary_flux_rate(1.0, P.with_lambda(0.0)) == 0.0
    h = 1e-4
    xs = -h * np.arange(3)
    f = pk.packet_value(xs, 1.0, P)
    # second-order centred derivative at 0, using psi(h) = -psi(-h) (odd image extension)
    d = (f[1] - (-f[1])) / (2 * -h)
    fd_rate = P.lam / np.pi * abs(d) ** 2
    assert pk.boundary_flux_rate(1.0, P) == pytest.approx(fd_rate, rel=1e-6)


def test_flux_tail_and_peak():
    t = np.array([1e4, 1e5, 1e6])
    r = pk.boundary_flux_rate(t, P)
    np.testing.assert_allclose(r[1:] / r[:-1], 1e-3, rtol=5e-3)
    assert np.all(pk.boundary_flux_rate(t, P) <= pk.tail_constant(P) / t**3)
    p = pk.GaussianPacketParams(1.0, 10.0, 10.0)
    grid = np.linspace(0.01, 3, 30001)
    t_peak = grid[np.argmax(pk.boundary_flux_rate(grid, p))]
    assert abs(t_peak - p.arrival_time) <= 0.2 * p.arrival_time


def test_reflection_coefficient_golden():
    res = pk.reflection_coefficient(P, full_output=True)
    assert res.reflection == pytest.approx(GOLDEN_R, rel=1e-8)
    assert res.tail_bound <= 1e-10


def test_reflection_limits_and_errors():
    assert pk.reflection_coefficient(P.with_lambda(0.0)) == 1.0
    rs = [pk.reflection_coefficient(P.with_lambda(l)) for l in (0.01, 0.1, 1.0)]
    assert all(0 < r < 1 for r in rs) and rs[0] > rs[1] > rs[2]
    with pytest.raises(ConvergenceError):
        pk.reflection_coefficient(P, t_max=10.0)


def test_exponent_and_survival_consistency():
    t = np.array([3.0, 0.5, 1.0, 1.0, 0.0])
    e = pk.absorbed_exponent(t, P)
    assert e[-1] == 0.0 and e[2] == e[3]
    assert e[1] < e[2] < e[0]
    direct, _ = integrate.quad(pk.boundary_flux_rate, 0, 1.0, args=(P,), points=[1.0])
    assert e[2] == pytest.approx(direct, rel=1e-10)


def test_current_integrates_to_absorbed_fraction():
    grid = TimeGrid.spanning(200.0, 1e-3)
    flux = pk.flux_series(P, grid)
    s = pk.survival_series(P, grid)
    j = absorption_current(flux, s, P.params)
    absorbed = np.trapezoid(j, dx=grid.dt)
    tail = pk.tail_constant(P) / (2 * grid.t_end**2)
    assert absorbed == pytest.approx(1 - GOLDEN_R, abs=1e-6 + tail)


def test_sine_coefficient():
    assert pk.sine_coefficient(0.0, P) == 0
    k = np.linspace(0.1, 9, 7)
    # odd extension: the closed form at -k is minus the value at k
    np.testing.assert_allclose(pk.sine_coefficient(-k, P), -pk.sine_coefficient(k, P), rtol=1e-13)
    for kk in (3.0, 5.0):
        def part(fn):
            return integrate.quad(lambda s: np.sqrt(2 / np.pi) * np.sin(kk * s) * fn(pk.packet_value(-s, 0.0, P)), 0, 20, limit=400)[0]
        oracle = part(np.real) + 1j * part(np.imag)
        assert abs(pk.sine_coefficient(kk, P) - oracle) < 1e-6
    mass, _ = integrate.quad(lambda k: abs(pk.sine_coefficient(k, P)) ** 2, 0, np.inf)
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_mode_decay_rate():
    assert pk.mode_decay_rate(0.0, P) == 0.0
    k = np.linspace(0, 40, 4001)
    assert np.all(pk.mode_decay_rate(k, P) >= 0)
    direct = abs(pk.sine_coefficient(3.0, P)) ** 2 * 3.0**2 / 2
    assert pk.mode_decay_rate(3.0, P) == pytest.approx(direct, rel=1e-10)
    assert np.isfinite(pk.mode_decay_rate(1e4, P))


def test_energy_window_survival_and_audit():
    s = pk.energy_window_survival([0.0, 0.5, 2.0], P)
    assert s[0] == pytest.approx(1.0, abs=1e-6)
    assert s[0] > s[1] > s[2] > 0
    with pytest.raises(ConvergenceError):
        pk.energy_window_survival(1.0, P, k_max=4.0)
    gap = pk.energy_window_audit(np.array([0.5, 1.0, 5.0]), P)
    # the two absorption modes do not give the same survival curve for this packet
    assert np.max(np.abs(gap)) > 0.1
