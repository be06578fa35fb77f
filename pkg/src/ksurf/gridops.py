"""Differentiation helpers on the periodic half-cylinder grid.

Fields live on a tensor grid: x_i = 2*pi*m*i/Nx (periodic, no endpoint),
y_j = Y*j/(Ny-1) (both endpoints included).  Arrays are indexed u[i, j].
x-derivatives are spectral, y-derivatives use banded finite differences of
4th order with lopsided stencils near the two boundary rows.
"""

import math

import numpy as np
from scipy import sparse


def fd_weights(offsets, order):
    """Finite difference weights on integer offsets for the given derivative order.

    Returns w such that sum_q w[q] * f(x + offsets[q]*h) ~ h**order * f^(order)(x),
    exact on polynomials of degree < len(offsets).
    """
    offsets = np.asarray(offsets, dtype=float)
    n = offsets.size
    if order >= n:
        raise ValueError("need more points than the derivative order")
    A = np.vander(offsets, n, increasing=True).T  # A[p, q] = offsets[q]**p
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(A, rhs)


def _banded_derivative(n, h, order):
    """Sparse (n, n) matrix for d^order/dy^order, 4th-order accurate."""
    if n < 8:
        raise ValueError("grid too short for 4th-order stencils")
    rows, cols, vals = [], [], []

    def put(j, offsets):
        w = fd_weights(offsets, order) / h**order
        for o, wq in zip(offsets, w):
            rows.append(j)
            cols.append(j + o)
            vals.append(wq)

    # Interior: central stencils; edges: one-sided/lopsided of the same order.
    if order == 1:
        central = [-2, -1, 0, 1, 2]
        edge = {0: [0, 1, 2, 3, 4], 1: [-1, 0, 1, 2, 3]}
    elif order == 2:
        central = [-2, -1, 0, 1, 2]
        edge = {0: [0, 1, 2, 3, 4, 5], 1: [-1, 0, 1, 2, 3, 4]}
    else:
        raise ValueError("order must be 1 or 2")

    for j in range(n):
        if j in edge:
            put(j, edge[j])
        elif (n - 1 - j) in edge:
            put(j, [-o for o in reversed(edge[n - 1 - j])])
        else:
            put(j, central)
    mat = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return mat


class Grid:
    """Half-cylinder grid with cached differentiation operators."""

    def __init__(self, m, Y, Nx, Ny):
        if m < 1 or Nx < 4 or Ny < 8 or Y <= 0:
            raise ValueError("bad grid parameters")
        self.m = int(m)
        self.Y = float(Y)
        self.Nx = int(Nx)
        self.Ny = int(Ny)
        self.hy = self.Y / (self.Ny - 1)
        self.x = 2.0 * np.pi * self.m * np.arange(self.Nx) / self.Nx
        self.y = np.linspace(0.0, self.Y, self.Ny)
        # rfft wavenumbers: frequency of mode index n is n/m.
        self.lam = np.arange(self.Nx // 2 + 1) / self.m
        self._d1y = _banded_derivative(self.Ny, self.hy, 1)
        self._d2y = _banded_derivative(self.Ny, self.hy, 2)

    # x direction (spectral) ------------------------------------------------

    def dx(self, u):
        uh = np.fft.rfft(u, axis=0)
        uh *= 1j * self.lam[:, None]
        if self.Nx % 2 == 0:
            uh[-1] = 0.0  # drop the Nyquist mode for odd derivatives
        return np.fft.irfft(uh, n=self.Nx, axis=0)

    def dxx(self, u):
        uh = np.fft.rfft(u, axis=0)
        uh *= -(self.lam[:, None] ** 2)
        return np.fft.irfft(uh, n=self.Nx, axis=0)

    # y direction (banded FD) -----------------------------------------------

    def dy(self, u):
        return (self._d1y @ u.T).T

    def dyy(self, u):
        return (self._d2y @ u.T).T

    def jet(self, u):
        """All derivatives through second order as a dict of grids."""
        ux = self.dx(u)
        return {
            "u": u,
            "ux": ux,
            "uy": self.dy(u),
            "uxx": self.dxx(u),
            "uxy": self.dy(ux),
            "uyy": self.dyy(u),
        }

    def integrate_x(self, f):
        """Integral over the periodic x circle (trapezoid = spectral here)."""
        return f.sum(axis=0) * (2.0 * np.pi * self.m / self.Nx)

    def modes(self, u):
        """Complex amplitude profiles: coefficient of e^{i(n/m)x} per row index n."""
        return np.fft.rfft(u, axis=0) / self.Nx

    def from_modes(self, coef):
        return np.fft.irfft(coef * self.Nx, n=self.Nx, axis=0)
