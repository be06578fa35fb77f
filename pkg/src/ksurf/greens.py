"""Half-line and half-cylinder Green operators, and the Picard solver.

The 1-D operator inverts u'' - a^2 u on [0, infinity) with Dirichlet data at
0 and decay at infinity, by convolution with the kernel -e^{-a|y|}/(2a) and
its odd reflection.  The convolution is evaluated with an exponential
recurrence: cumulative integrals J1(y) = int_0^y e^{-a(y-z)} f dz and
J2(y) = int_y^inf e^{-a(z-y)} f dz advance one grid cell at a time with the
local integral done exactly against a cubic interpolant of f, so nothing
ever exponentiates a large positive argument and the global error is O(h^4).

The 2-D operator applies the 1-D one mode by mode with mass
sqrt(kx (n/m)^2 + a^2); kx = 1 gives the isotropic Laplacian d_xx + d_yy - a^2,
while kx < 1 gives the anisotropic principal part kx d_xx + d_yy - a^2 used
by the curvature end equation (with a^2 = 1 - kx).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import gridops
from .endfield import jet_state
from .errors import ConvergenceError, SmallnessError, TailTruncationWarning


def green1d_kernel(a, y):
    """Fundamental solution of d^2/dy^2 - a^2 on the line: -e^{-a|y|}/(2a)."""
    if a <= 0:
        raise ValueError("mass a must be positive")
    return -np.exp(-a * np.abs(np.asarray(y, dtype=float))) / (2.0 * a)


# ---------------------------------------------------------------------------
# exponential moments and product-integration weights


def _gfun(x, pmax=3):
    """g_p(x) = int_0^1 e^{-x t} t^p dt for p = 0..pmax, stable for x >= 0."""
    out = np.empty(pmax + 1)
    if x > 0.5:
        ex = np.exp(-x)
        g = (1.0 - ex) / x
        out[0] = g
        for p in range(1, pmax + 1):
            g = (p * g - ex) / x
            out[p] = g
    else:
        # g_p(x) = sum_j (-x)^j / (j! (p+j+1)), rapidly convergent for small x
        for p in range(pmax + 1):
            total = 1.0 / (p + 1)
            term = 1.0
            j = 1
            while True:
                term *= -x / j
                piece = term / (p + j + 1)
                total += piece
                if abs(piece) < 1e-18:
                    break
                j += 1
            out[p] = total
    return out


def _moments(a, h):
    """(M1, M2): M1_p = int_0^h e^{-a(h-s)} s^p ds, M2_p = int_0^h e^{-a s} s^p ds."""
    x = a * h
    g = _gfun(x)
    hp = h ** np.arange(1, 5)
    m2 = hp * g
    # hat g_p = int_0^1 e^{-x(1-t)} t^p dt via binomial combination of g_r
    binom = [[1], [1, 1], [1, 2, 1], [1, 3, 3, 1]]
    ghat = np.empty(4)
    for p in range(4):
        s = 0.0
        for r, brp in enumerate(binom[p]):
            s += brp * (-1.0) ** r * g[r]
        ghat[p] = s
    m1 = hp * ghat
    return m1, m2


_STENCILS = {"left": (0, 1, 2, 3), "mid": (-1, 0, 1, 2), "right": (-2, -1, 0, 1)}


def _interval_weights(a, h):
    """Product-integration weights per stencil pattern.

    For an interval [y_j, y_j + h], weights w such that
    int_0^h e^{-a(h-s)} f(y_j + s) ds ~ sum_q w1[q] f[j + offsets[q]]  and the
    same with e^{-a s} for w2, exact when f is the cubic through the stencil.
    """
    m1, m2 = _moments(a, h)
    out = {}
    for name, offs in _STENCILS.items():
        V = np.vander(np.array(offs, dtype=float) * h, 4, increasing=True)
        Vinv = np.linalg.inv(V)
        out[name] = (Vinv.T @ m1, Vinv.T @ m2)
    return out


def _fit_tail_rate(y, f):
    """Log-linear decay rate of |f| on the last few samples; None if unusable."""
    tail = np.abs(f[-6:])
    if np.any(tail <= 0):
        return None
    logs = np.log(tail)
    slope = np.polyfit(y[-6:], logs, 1)[0]
    if not np.isfinite(slope) or slope >= 0:
        return None
    return -slope


def green1d_dirichlet(a, f, h, tail="auto", floor=None):
    """Apply the Dirichlet half-line Green operator to samples f on a grid.

    f is sampled at y_j = j*h, j = 0..N-1 and is assumed to keep decaying
    beyond the last node.  tail: 'auto' fits a decay rate to the last samples
    and adds the analytic tail integral; a number is used as the rate; 'zero'
    truncates.  A TailTruncationWarning is raised when a tail larger than
    `floor` (default 1e-12 of the local input scale) had to be dropped.
    Returns samples of the solution of u'' - a^2 u = f, u(0) = 0, u decaying.
    """
    f = np.asarray(f)
    if f.ndim != 1:
        raise ValueError("f must be a 1-D sample array")
    n = f.size
    if n < 8:
        raise ValueError("need at least 8 samples")
    if a <= 0 or h <= 0:
        raise ValueError("a and h must be positive")
    y = h * np.arange(n)

    w = _interval_weights(a, h)
    eah = np.exp(-a * h)

    def pattern(j):
        if j == 0:
            return "left"
        if j == n - 2:
            return "right"
        return "mid"

    # forward recurrence for J1; stencil offsets are relative to y_j
    j1 = np.zeros(n, dtype=f.dtype)
    for j in range(n - 1):
        name = pattern(j)
        w1, _ = w[name]
        idx = [j + o for o in _STENCILS[name]]
        loc = sum(w1[q] * f[idx[q]] for q in range(4))
        j1[j + 1] = eah * j1[j] + loc

    # tail estimate for J2 at the last node
    tail_val = 0.0
    if floor is None:
        floor = 1e-12 * (float(np.max(np.abs(f))) or 1.0)
    if tail == "zero":
        rate = None
    elif tail == "auto":
        rate = _fit_tail_rate(y, f)
    else:
        rate = float(tail)
    if rate is not None:
        tail_val = f[-1] / (a + rate)
    elif abs(f[-1]) > floor:
        warnings.warn(
            "input does not decay at the truncation height; tail dropped",
            TailTruncationWarning,
        )

    j2 = np.zeros(n, dtype=f.dtype)
    j2[-1] = tail_val
    for j in range(n - 2, -1, -1):
        name = pattern(j)
        _, w2 = w[name]
        idx = [j + o for o in _STENCILS[name]]
        loc = sum(w2[q] * f[idx[q]] for q in range(4))
        j2[j] = eah * j2[j + 1] + loc

    return -(j1 + j2 - np.exp(-a * y) * j2[0]) / (2.0 * a)


def fourier_project(samples, n, m=1):
    """Coefficient of e^{i (n/m) x} of samples on the uniform 2*pi*m grid."""
    samples = np.asarray(samples)
    N = samples.size
    x = 2.0 * np.pi * m * np.arange(N) / N
    return complex(np.sum(samples * np.exp(-1j * (n / m) * x)) / N)


@dataclass
class GreenConfig:
    """Grid and operator parameters for the half-cylinder Green operator."""

    a: float
    m: int = 1
    Y: float = 12.0
    Nx: int = 128
    Ny: int = 769
    kx: float = 1.0
    grid: gridops.Grid = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("mass a must be positive")
        if self.Nx & (self.Nx - 1):
            raise ValueError("Nx must be a power of two")
        if self.Ny < 16:
            raise ValueError("Ny must be at least 16")
        if self.Y <= 0:
            raise ValueError("Y must be positive")
        if self.grid is None:
            self.grid = gridops.Grid(self.m, self.Y, self.Nx, self.Ny)

    def masses(self):
        lam = self.grid.lam
        return np.sqrt(self.kx * lam * lam + self.a * self.a)


def green2d_dirichlet(cfg, f, tail="auto"):
    """Mode-wise Dirichlet Green operator on the half-cylinder.

    Solves kx u_xx + u_yy - a^2 u = f with u(., 0) = 0 and decay upward, by
    applying the 1-D operator to each Fourier mode with its own mass.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (cfg.Nx, cfg.Ny):
        raise ValueError("f has the wrong shape for the configured grid")
    modes = np.fft.rfft(f, axis=0)
    out = np.empty_like(modes)
    h = cfg.grid.hy
    floor = 1e-12 * (float(np.max(np.abs(modes))) or 1.0)
    for i, mass in enumerate(cfg.masses()):
        out[i] = green1d_dirichlet(mass, modes[i], h, tail=tail, floor=floor)
    return np.fft.irfft(out, n=cfg.Nx, axis=0)


@dataclass
class PicardReport:
    converged: bool
    iterations: int
    update_history: list
    final_update: float
    message: str = ""


def picard_solve(cfg, v, G, tol=1e-12, max_iter=80, smallness=None):
    """Fixed-point solve of kx u_xx + u_yy - a^2 u = G(jet of u) on the grid.

    v: boundary samples on the x circle; G: callable taking a JetState of
    grids and returning the right-hand side grid (None means the linear
    problem).  Iterates u <- E[v] + Green[G(u)] from the decaying extension
    E[v]; diverging iterations raise SmallnessError after five consecutive
    growth steps.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (cfg.Nx,):
        raise ValueError("boundary samples have the wrong length")
    bound = 0.05 * cfg.a * cfg.a if smallness is None else smallness
    if np.max(np.abs(v)) > bound:
        raise SmallnessError(
            f"boundary sup {np.max(np.abs(v)):.3g} exceeds the contraction bound {bound:.3g}"
        )

    # decaying extension built with the same masses as the operator
    vh = np.fft.rfft(v) / cfg.Nx
    prof = vh[:, None] * np.exp(-cfg.masses()[:, None] * cfg.grid.y[None, :])
    base = np.fft.irfft(prof * cfg.Nx, n=cfg.Nx, axis=0)

    u = base.copy()
    history = []
    grow = 0
    for it in range(1, max_iter + 1):
        if G is None:
            rhs = np.zeros_like(u)
        else:
            rhs = G(jet_state(cfg.grid, u))
        unew = base + green2d_dirichlet(cfg, rhs)
        step = float(np.max(np.abs(unew - u)))
        history.append(step)
        if len(history) > 1 and step > history[-2]:
            grow += 1
            if grow >= 5:
                raise SmallnessError(
                    "fixed-point iteration diverging; data too large for contraction"
                )
        else:
            grow = 0
        u = unew
        if step < tol:
            return u, PicardReport(True, it, history, step)
    raise ConvergenceError(
        f"no fixed point after {max_iter} iterations (last update {history[-1]:.3g})",
        report=PicardReport(False, max_iter, history, history[-1]),
    )
