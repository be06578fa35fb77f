"""The discretized end profile shared by the solvers and the diagnostics."""

from dataclasses import dataclass, field

import numpy as np

from . import gridops
from .darboux import JetState


def mode_masses(k, lam):
    """Decay mass of each transverse frequency: sqrt(k lam^2 + (1 - k))."""
    return np.sqrt(k * lam * lam + (1.0 - k))


@dataclass
class EndFunction:
    """A profile u on the half-cylinder [0, 2*pi*m) x [0, Y], row-major u[i, j].

    k is the target extrinsic curvature (0 < k < 1) and m the winding of the
    end.  The grid is uniform: x_i = 2*pi*m*i/Nx, y_j = Y*j/(Ny-1).
    """

    k: float
    m: int
    Y: float
    u: np.ndarray
    _grid: gridops.Grid = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        if self.u.ndim != 2:
            raise ValueError("u must be a 2-D grid u[i, j]")
        if not 0.0 < self.k < 1.0:
            raise ValueError("k must lie in (0, 1)")
        if self._grid is None:
            self._grid = gridops.Grid(self.m, self.Y, *self.u.shape)

    @property
    def Nx(self):
        return self.u.shape[0]

    @property
    def Ny(self):
        return self.u.shape[1]

    @property
    def grid(self):
        return self._grid

    @property
    def x(self):
        return self._grid.x

    @property
    def y(self):
        return self._grid.y

    def jet(self, u=None):
        """JetState of grids for this field (or for a replacement grid u)."""
        return jet_state(self._grid, self.u if u is None else u)

    def with_field(self, u):
        return EndFunction(self.k, self.m, self.Y, u, _grid=self._grid)

    def mode_profiles(self):
        """Complex amplitude of e^{i(n/m)x} per mode row n, shape (Nx//2+1, Ny)."""
        return self._grid.modes(self.u)

    def immersion_margin(self):
        """min of u + u_xx over the grid (positive for an immersed graph)."""
        return float((self.u + self._grid.dxx(self.u)).min())

    # --- resampling helpers used by the equivariance checks -----------------

    def rotated(self, xi):
        """The profile x -> u(x + xi, y), via the spectral shift."""
        uh = np.fft.rfft(self.u, axis=0)
        uh *= np.exp(1j * self._grid.lam * xi)[:, None]
        return self.with_field(np.fft.irfft(uh, n=self.Nx, axis=0))

    def raised(self, steps):
        """Restrict to y >= steps*hy and shift the origin up (grid subsampling)."""
        if not 0 <= steps < self.Ny - 8:
            raise ValueError("shift out of range")
        return EndFunction(self.k, self.m, self.Y - steps * self._grid.hy,
                           self.u[:, steps:].copy())

    def translated(self, a, b):
        """Add the horizontal-translation profile a e^{-y} cos x + b e^{-y} sin x."""
        X, Yg = np.meshgrid(self.x, self.y, indexing="ij")
        sigma = np.exp(-Yg) * (a * np.cos(X) + b * np.sin(X))
        return self.with_field(self.u + sigma)

    def x_reversed(self):
        """The profile x -> u(-x, y) (orientation-reversing reparametrization)."""
        return self.with_field(np.roll(self.u[::-1], 1, axis=0))


def jet_state(grid, u):
    """JetState of grids (all six derivative slots) for a field on the grid."""
    j = grid.jet(u)
    X, Yg = np.meshgrid(grid.x, grid.y, indexing="ij")
    return JetState(x=X, y=Yg, **j)


def decaying_extension(k, m, grid, v):
    """Mode-wise decaying harmonic extension of boundary samples v into y > 0."""
    vh = np.fft.rfft(np.asarray(v, dtype=float)) / grid.Nx
    a = mode_masses(k, grid.lam)
    prof = vh[:, None] * np.exp(-a[:, None] * grid.y[None, :])
    return np.fft.irfft(prof * grid.Nx, n=grid.Nx, axis=0)
