import numpy as np
import pytest

from ksurf.endsolver import boundary_samples, make_nonlinearity, newton_solve
from ksurf.errors import SmallnessError, TailTruncationWarning
from ksurf.greens import (
    GreenConfig,
    fourier_project,
    green1d_dirichlet,
    green1d_kernel,
    green2d_dirichlet,
    picard_solve,
)


def test_kernel_is_the_decaying_fundamental_solution():
    y = np.linspace(-3.0, 3.0, 13)
    g = green1d_kernel(2.0, y)
    assert np.allclose(g, -np.exp(-2.0 * np.abs(y)) / 4.0)
    with pytest.raises(ValueError):
        green1d_kernel(0.0, 1.0)


@pytest.mark.parametrize("a,omega", [(1.0, 2.0), (0.5, 1.5)])
def test_halfline_operator_matches_two_exponential_closed_form(a, omega):
    y = np.linspace(0.0, 20.0, 1281)
    u = green1d_dirichlet(a, np.exp(-omega * y), y[1] - y[0])
    exact = (np.exp(-omega * y) - np.exp(-a * y)) / (omega**2 - a**2)
    assert np.max(np.abs(u - exact)) < 1e-8


def test_halfline_operator_inverts_the_modified_laplacian():
    a = 1.3
    y = np.linspace(0.0, 18.0, 1153)
    h = y[1] - y[0]
    f = (0.7 + 0.2 * np.sin(3.0 * y)) * np.exp(-0.9 * y)
    u = green1d_dirichlet(a, f, h)
    upp = np.gradient(np.gradient(u, h, edge_order=2), h, edge_order=2)
    resid = (upp - a * a * u - f)[4:-4]
    assert np.max(np.abs(resid)) < 1e-4


def test_nondecaying_tail_raises_truncation_warning():
    y = np.linspace(0.0, 10.0, 641)
    with pytest.warns(TailTruncationWarning):
        green1d_dirichlet(1.0, np.cos(y) + 2.0, y[1] - y[0])


def test_cylinder_operator_solves_each_mode_with_its_own_mass():
    cfg = GreenConfig(a=1.0, m=1, Y=16.0, Nx=32, Ny=2049, kx=0.5)
    xg = cfg.grid.x[:, None]
    yg = cfg.grid.y[None, :]
    omega = 2.0
    f = np.cos(3.0 * xg) * np.exp(-omega * yg)
    u = green2d_dirichlet(cfg, f)
    a3 = np.sqrt(cfg.kx * 9.0 + cfg.a**2)
    exact = np.cos(3.0 * xg) * (np.exp(-omega * yg) - np.exp(-a3 * yg)) / (
        omega**2 - a3**2
    )
    assert np.max(np.abs(u - exact)) < 1e-8


def test_fourier_project_picks_single_coefficients():
    x = 2.0 * np.pi * np.arange(64) / 64
    samples = 0.3 + 0.4 * np.cos(2.0 * x) + 0.1 * np.sin(5.0 * x)
    assert fourier_project(samples, 0) == pytest.approx(0.3, abs=1e-14)
    assert fourier_project(samples, 2) == pytest.approx(0.2, abs=1e-14)
    assert fourier_project(samples, 5) == pytest.approx(-0.05j, abs=1e-14)


def test_picard_iteration_contracts_and_matches_newton():
    k = 0.5
    v = boundary_samples(1, 64, cos=(0.01, 0.004))
    end, _ = newton_solve(k, v, Nx=64, Y=8.0, Ny=513)
    cfg = GreenConfig(a=np.sqrt(1.0 - k), m=1, Y=8.0, Nx=64, Ny=513, kx=k)
    u, rep = picard_solve(cfg, v, make_nonlinearity(k))
    assert rep.converged
    updates = np.array(rep.update_history, dtype=float)
    assert np.all(updates[1:] < updates[:-1])
    assert np.max(np.abs(u - end.u)) < 1e-7


def test_picard_rejects_data_beyond_the_contraction_regime():
    cfg = GreenConfig(a=np.sqrt(0.5), m=1, Y=8.0, Nx=64, Ny=513, kx=0.5)
    v = boundary_samples(1, 64, cos=(0.40,))
    with pytest.raises(SmallnessError):
        picard_solve(cfg, v, make_nonlinearity(0.5))
