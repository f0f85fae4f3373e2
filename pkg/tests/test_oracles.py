import numpy as np
import pytest

from qabsorb import box_modes as bm
from qabsorb import oracles
from qabsorb.core import (
    ComplexField,
    DomainError,
    InvalidFieldError,
    PhysicalParams,
    ResolutionError,
    SpaceGrid,
    TimeGrid,
    l2_norm_squared,
)
from qabsorb.oracles import (
    DirichletProblem,
    SliceKernel,
    crank_nicolson_evolve,
    crank_nicolson_wall_flux,
    feynman_slice_propagate,
    fresnel_moment,
    wall_derivative,
)


def box_problem(n_points=801, modes=(1,), amps=(np.sqrt(2.0),)):
    ex = bm.BoxExpansion(1.0, list(modes), list(amps))
    g = SpaceGrid(0.0, 1.0, n_points)
    return ex, DirichletProblem(bm.evolve(ex, 0.0, g))


def test_problem_validation():
    g = SpaceGrid(0.0, 1.0, 11)
    with pytest.raises(InvalidFieldError):
        DirichletProblem(ComplexField(g, np.ones(11)))
    vals = np.zeros(11)
    with pytest.raises(DomainError):
        DirichletProblem(ComplexField(g, vals), potential=np.full(11, np.inf))


def test_cn_eigenmode_modulus_static():
    ex, prob = box_problem(2001)
    tg = TimeGrid(0.0, 1e-4, 1000)
    out = crank_nicolson_evolve(prob, tg, save_every=250)
    assert len(out) == 5
    for f in out:
        np.testing.assert_allclose(np.abs(f.values), np.abs(prob.initial.values), atol=1e-8)


def test_cn_norm_conservation():
    ex, prob = box_problem(401, (1, 2, 5), (0.8, 0.9, 0.4))
    tg = TimeGrid(0.0, 1e-3, 10000)
    out = crank_nicolson_evolve(prob, tg, save_every=10000)
    n0 = l2_norm_squared(out[0])
    assert l2_norm_squared(out[-1]) == pytest.approx(n0, abs=1e-10)


def test_cn_matches_series_two_modes():
    a = 1.0
    ex = bm.BoxExpansion(a, [1, 2], [1.0, 1.0])
    g = SpaceGrid(0.0, a, 4001)
    t_end = 2 * a**2 / np.pi**2 * (2 * np.pi / 3)
    tg = TimeGrid.spanning(t_end, 2e-5)
    out = crank_nicolson_evolve(DirichletProblem(bm.evolve(ex, 0.0, g)), tg, save_every=tg.n_steps)[-1]
    ref = bm.evolve(ex, tg.t_end, g)
    # second order in both dx and dt
    assert np.sqrt(np.mean(np.abs(out.values - ref.values) ** 2)) < 5e-6


def test_cn_wall_flux_matches_series():
    ex = bm.BoxExpansion(1.0, [1, 2], [1.0, 1.0])
    g = SpaceGrid(0.0, 1.0, 4001)
    tg = TimeGrid.spanning(0.2, 1e-5)
    left, right = crank_nicolson_wall_flux(DirichletProblem(bm.evolve(ex, 0.0, g)), tg)
    np.testing.assert_allclose(left, bm.boundary_flux(ex, tg.times, "left"), rtol=1e-5)
    np.testing.assert_allclose(right, bm.boundary_flux(ex, tg.times, "right"), rtol=1e-5)


def test_wall_derivative_order():
    errs = []
    for n in (101, 201):
        x = np.linspace(0, 1, n)
        f = np.sin(3 * x) + 0.5 * x**2
        errs.append(abs(wall_derivative(f, x[1], "left") - 3.0))
        errs.append(abs(wall_derivative(f, x[1], "right") - (3 * np.cos(3) + 1.0)))
    assert errs[0] / errs[2] > 14 and errs[1] / errs[3] > 14
    with pytest.raises(DomainError):
        wall_derivative(f, 0.1, "top")


def test_slice_kernel_validation():
    g = SpaceGrid(0.0, 1.0, 11)
    with pytest.raises(DomainError):
        SliceKernel(0.0, g)
    with pytest.raises(DomainError):
        SliceKernel(1e-3, g, eps=0.0)


def test_slice_hat_weights_sum_to_one_in_the_bulk():
    g = SpaceGrid(-10.0, 10.0, 2001)
    first, second = SliceKernel(0.01, g, 1e-2).hat_weights()
    # a constant sampled on all nodes is propagated to (almost) the same constant far from the ends
    assert abs(np.sum(first + second) - 1) < 1e-6


def test_slice_free_gaussian_one_step():
    g = SpaceGrid(-20.0, 20.0, 8001)
    x, dt = g.x, 0.05
    f0 = np.exp(-(x**2) / 2)
    f0[[0, -1]] = 0.0
    q = 1 + 1j * dt
    exact = np.exp(-(x**2) / (2 * q)) / np.sqrt(q)
    out = feynman_slice_propagate(SliceKernel(dt, g, 1e-4), ComplexField(g, f0), 1)
    assert np.linalg.norm(out.values - exact) / np.linalg.norm(exact) < 1e-4
    ext = feynman_slice_propagate(SliceKernel(dt, g, 1e-3), ComplexField(g, f0), 1, extrapolate=True)
    assert np.linalg.norm(ext.values - exact) / np.linalg.norm(exact) < 1e-5


def test_slice_potential_phase():
    g = SpaceGrid(-20.0, 20.0, 4001)
    f0 = np.exp(-(g.x**2) / 2)
    f0[[0, -1]] = 0.0
    k = SliceKernel(0.05, g, 1e-4)
    free = feynman_slice_propagate(k, ComplexField(g, f0), 1).values
    shifted = feynman_slice_propagate(k, ComplexField(g, f0), 1, potential=np.full(g.n_points, 2.0)).values
    np.testing.assert_allclose(shifted, free * np.exp(-2j * 0.05), atol=1e-14)


def test_slice_wall_values_shrink_under_dt_halving():
    ex = bm.BoxExpansion(1.0, [1, 2], [1.0, 1.0])
    g = SpaceGrid(0.0, 1.0, 4001)
    walls = []
    for dt in (4e-4, 2e-4, 1e-4):
        n = int(round(0.02 / dt))
        walls.append(abs(feynman_slice_propagate(SliceKernel(dt, g), bm.evolve(ex, 0.0, g), n).values[-1]))
    assert walls[0] > walls[1] > walls[2]


def test_slice_resolution_error(monkeypatch):
    # exact hat weights make the operator contractive in practice, so force growth
    g = SpaceGrid(0.0, 1.0, 21)
    f = np.sin(np.pi * g.x)
    f[[0, -1]] = 0.0
    real_call = oracles._SliceOperator.__call__
    monkeypatch.setattr(oracles._SliceOperator, "__call__", lambda self, v: 1.01 * real_call(self, v))
    with pytest.raises(ResolutionError, match="refine the grid"):
        feynman_slice_propagate(SliceKernel(1e-5, g, 1e-3), ComplexField(g, f), 5)
    monkeypatch.undo()
    assert feynman_slice_propagate(SliceKernel(1e-5, g, 1e-3), ComplexField(g, f), 1).grid == g


def test_fresnel_moments():
    alpha, eps = 1e6, 1e-4
    assert abs(fresnel_moment(0, alpha, 0, 1, 0.4, eps) - 1) < 1e-3
    assert abs(fresnel_moment(1, alpha, 0, 1, 0.4, eps)) < 1e-3
    assert abs(fresnel_moment(2, alpha, 0, 1, 0.4, eps) - 1) < 1e-2
    assert abs(fresnel_moment(0, alpha, 0, 1, 1.0, eps) - 0.5) < 1e-3
    assert abs(fresnel_moment(0, alpha, 0, 1, 0.0, eps) - 0.5) < 1e-3
    m1 = [abs(fresnel_moment(1, al, 0, 1, 0.3, 1e-2)) for al in (1e3, 2e3, 4e3)]
    assert m1[0] > m1[1] > m1[2]
    with pytest.raises(DomainError):
        fresnel_moment(3, alpha, 0, 1, 0.5, eps)
    with pytest.raises(DomainError):
        fresnel_moment(0, alpha, 0, 1, 0.5, 0.0)
