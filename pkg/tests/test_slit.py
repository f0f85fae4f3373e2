import numpy as np
import pytest
from scipy import integrate

from qabsorb import packet as pk
from qabsorb import slit
from qabsorb.core import DomainError, PhysicalParams

CFG = slit.SlitConfig()

# Wall trace for sigma_x = 1/sqrt(2), x0 = v0 = 5, y0 = 2, unit lambdas, 200
# smoothed modes, from an independent ODE integration of the survival exponent
# and trace density (DOP853, rtol 1e-11).
LATERAL_CFG = slit.SlitConfig(sigma_x=1 / np.sqrt(2), x0=5.0, v0=5.0, y0=2.0)
LATERAL_X = np.array([1.0, 2.5, 5.0, 7.5])
LATERAL_GOLDEN = np.array([0.015614162509330481, 0.04293195456754528, 0.04050042539584809, 2.686672571040497e-05])


def test_config_validation():
    with pytest.raises(DomainError):
        slit.SlitConfig(sigma_x=3.0, x0=10.0)
    with pytest.raises(DomainError):
        slit.SlitConfig(sigma_y=-1.0)
    with pytest.raises(DomainError):
        slit.SlitConfig(y0=1.5).require_lateral()
    p = CFG.x_packet()
    assert p.width_a == pytest.approx(np.sqrt(2) * 0.5)
    assert p.arrival_time == pytest.approx(CFG.t_bar)


def test_gaussian_slit_density():
    assert slit.gaussian_slit_density(0.0, 0.0, CFG) == pytest.approx(1 / (2 * np.pi))
    y = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(slit.gaussian_slit_density(y, 0.7, CFG), slit.gaussian_slit_density(-y, 0.7, CFG))
    for t in (0.0, 1.0, 5.0):
        m, _ = integrate.quad(slit.gaussian_slit_density, -np.inf, np.inf, args=(t, CFG))
        assert m == pytest.approx(slit.slit_density_mass(CFG), rel=1e-10)


def test_screen_current_separable():
    y = np.linspace(-4, 4, 9)[:, None]
    t = np.linspace(0.5, 2.0, 7)[None, :]
    j = slit.screen_current(y, t, CFG)
    outer = np.outer(slit.screen_current(0.0, t[0], CFG), np.ones(9)).T
    shape = slit.gaussian_slit_density(y, t, CFG) / slit.gaussian_slit_density(0.0, t, CFG)
    np.testing.assert_allclose(j, outer * shape, rtol=1e-12)
    off = slit.SlitConfig(params=PhysicalParams(lambda_left=0.0, lambda_right=1.0))
    assert np.all(slit.screen_current(y, t, off) == 0)


def test_cumulative_pattern_mass():
    y = np.linspace(-40, 40, 4001)
    pat = slit.cumulative_pattern(y, CFG)
    r = pk.reflection_coefficient(CFG.x_packet())
    assert pat.kind == "cumulative"
    assert pat.mass() == pytest.approx(1 - r, abs=1e-6)
    np.testing.assert_allclose(pat.density, pat.density[::-1], rtol=1e-12)


def test_concentrated_pattern_close_when_spread_is_slow():
    cfg = slit.SlitConfig(sigma_x=0.5, sigma_y=2.0, x0=10.0, v0=10.0)
    y = np.linspace(-10, 10, 201)
    cum = slit.cumulative_pattern(y, cfg).density
    con = slit.concentrated_velocity_pattern(y, cfg)
    assert con.t == cfg.t_bar
    # the concentrated pattern is a density in time; scale it by the absorbed mass
    scale = np.trapezoid(cum, y) / con.mass()
    assert np.max(np.abs(con.density * scale - cum)) <= 0.05 * np.max(cum)


def test_feynman_density():
    y, t = np.linspace(-2, 2, 5), 1.3
    x_part = slit.feynman_density(0.0, t, CFG) / slit.gaussian_slit_density(0.0, t, CFG)
    np.testing.assert_allclose(slit.feynman_density(y, t, CFG), x_part * slit.gaussian_slit_density(y, t, CFG), rtol=1e-13)
    expect = np.exp(-(CFG.x0**2) / CFG.sigma_x**2) / (2 * np.pi * CFG.sigma_x**2) / (2 * np.pi * CFG.sigma_y**2)
    assert slit.feynman_density(0.0, 0.0, CFG) == pytest.approx(expect, rel=1e-12)
    late = slit.feynman_density(0.0, np.array([1e4, 2e4]), CFG)
    assert late[1] / late[0] == pytest.approx(0.25, rel=1e-3)


def test_relative_brightness():
    t = np.linspace(CFG.t_bar, 3 * CFG.t_bar, 41)
    b = slit.relative_brightness(t, CFG)
    assert np.all(b > 0) and np.all(np.diff(b) < 0)
    np.testing.assert_allclose(slit.relative_brightness(t, CFG, y=1.7), b, rtol=1e-14)


def test_slit_velocity_density():
    assert slit.slit_velocity_density(0.0) == 1.0
    assert slit.slit_velocity_density(2.0) == pytest.approx(0.0, abs=1e-30)
    assert slit.slit_velocity_density(1.0) == pytest.approx((2 / np.pi) ** 2)


def test_lateral_series_walls_and_norm():
    y = np.linspace(-2, 2, 4001)
    psi = slit.lateral_psi2(y, [0.0, 0.3], LATERAL_CFG)
    assert np.all(psi[[0, -1]] == 0)
    assert np.trapezoid(np.abs(psi[:, 0]) ** 2, y) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        slit.lateral_psi2([2.5], 0.0, LATERAL_CFG)


def test_lateral_sharp_slit_converges():
    y = np.linspace(-2, 2, 20001)
    target = np.where(np.abs(y) < np.pi / 2, 1 / np.sqrt(np.pi), 0.0)
    res = []
    for n in (11, 41, 161):
        psi = slit.LateralSeries(2.0, n, edge_width=0.0).value(y, 0.0)[:, 0]
        res.append(np.sqrt(np.trapezoid(np.abs(psi - target) ** 2, y)))
    assert res[0] > res[1] > res[2]
    # the odd sine family cannot represent the even slit
    odd = slit.LateralSeries(2.0, 161, basis="verbatim").value(y, 0.0)[:, 0]
    assert np.sqrt(np.trapezoid(np.abs(odd - target) ** 2, y)) > 0.5


def test_lateral_wall_golden():
    pat = slit.lateral_wall_pattern(LATERAL_X, LATERAL_CFG, n_max=200)
    np.testing.assert_allclose(pat.density, LATERAL_GOLDEN, rtol=1e-5)


def test_lateral_wall_symmetry_and_readings():
    x = np.array([1.0, 5.0])
    up = slit.lateral_wall_pattern(x, LATERAL_CFG, n_max=100, side=1).density
    down = slit.lateral_wall_pattern(x, LATERAL_CFG, n_max=100, side=-1).density
    np.testing.assert_allclose(up, down, rtol=1e-10)
    verbatim = slit.lateral_wall_pattern(x, LATERAL_CFG, n_max=100, reading="verbatim")
    assert np.all(verbatim.density == 0)
    with pytest.raises(DomainError):
        slit.lateral_wall_pattern([-1.0], LATERAL_CFG)


def test_lateral_wall_truncation():
    coarse = slit.lateral_wall_pattern(LATERAL_X, LATERAL_CFG, n_max=200).density
    fine = slit.lateral_wall_pattern(LATERAL_X, LATERAL_CFG, n_max=400).density
    assert np.max(np.abs(fine - coarse)) < 1e-6


def test_lateral_screen_and_concentrated():
    y = np.linspace(-2, 2, 81)
    scr = slit.lateral_screen_pattern(y, LATERAL_CFG, n_max=100)
    assert 0 < scr.mass() < 1
    np.testing.assert_allclose(scr.density, scr.density[::-1], rtol=1e-8, atol=1e-14)
    con = slit.lateral_concentrated_pattern(y, LATERAL_CFG, n_max=100)
    assert con.kind == "instantaneous" and con.density[0] == 0
