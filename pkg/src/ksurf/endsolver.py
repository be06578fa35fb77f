"""Solvers for the constant extrinsic curvature end equation.

The unknown is a graph field u(x, y) on the half cylinder; the interior
equation is K(jet of u) = k, with Dirichlet data at y = 0 and a mode-wise
Robin condition u_n'(Y) = -a_n u_n(Y), a_n = sqrt(k (n/m)^2 + (1 - k)),
standing in for decay at infinity.  newton_solve attacks the full nonlinear
system with a matrix-free Newton-Krylov iteration whose Jacobian is the
exact jet-gradient of K; ode_radial_solve integrates the rotationally
invariant reduction as an independent oracle.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import gridops
from .darboux import curvature_cleared, curvature_jet_gradient, curvature_pack
from .endfield import EndFunction, decaying_extension, jet_state, mode_masses
from .errors import (
    ConvergenceError,
    DegenerateEndError,
    DegenerateImmersionError,
    SmallnessError,
)


def boundary_samples(m, Nx, cos=(), sin=()):
    """Samples of sum cos[n] cos(n x / m) + sin[n] sin(n x / m) on the x grid."""
    x = 2.0 * np.pi * m * np.arange(Nx) / Nx
    v = np.zeros(Nx)
    for n, c in enumerate(cos):
        v += c * np.cos(n * x / m)
    for n, s in enumerate(sin):
        v += s * np.sin(n * x / m)
    return v


def default_height(k):
    """Truncation height with about twelve e-foldings of the slowest mode."""
    return 12.0 / np.sqrt(1.0 - k)


def _robin_row(end_or_grid, k, u):
    """Top-row residual: per-mode u_n'(Y) + a_n u_n(Y), in sample space."""
    grid = end_or_grid
    du_top = grid.dy(u)[:, -1]
    masses = mode_masses(k, grid.lam)
    top_modes = np.fft.rfft(u[:, -1])
    return du_top + np.fft.irfft(masses * top_modes, n=grid.Nx)


def _system_residual(grid, k, u, v):
    jet = jet_state(grid, u)
    pack = curvature_pack(jet, strict=True)
    res = np.empty_like(u)
    res[:, 1:-1] = pack.extrinsic[:, 1:-1] - k
    res[:, 0] = u[:, 0] - v
    res[:, -1] = _robin_row(grid, k, u)
    return res


def residual_field(end):
    """Pointwise K - k on the full grid, same stencils as the solver."""
    pack = curvature_pack(end.jet(), strict=True)
    return pack.extrinsic - end.k


def curvature_linearization(end_or_grid, u_or_v, v=None):
    """Directional derivative of K at a field, applied to a perturbation.

    Either curvature_linearization(end, v) or (grid, u, v).  Returns the
    grid of dK . v computed from the exact jet gradient.
    """
    if v is None:
        end, pert = end_or_grid, u_or_v
        grid, jet = end.grid, end.jet()
    else:
        grid, pert = end_or_grid, v
        jet = jet_state(grid, u_or_v)
    grads = curvature_jet_gradient(jet)
    pj = grid.jet(pert)
    out = np.zeros_like(pert)
    for slot in ("u", "ux", "uy", "uxx", "uxy", "uyy"):
        out += grads[slot] * pj[slot]
    return out


def make_nonlinearity(k):
    """Right-hand side G with L_k u + (K - k) W = G(u) == quadratic remainder.

    Returns a callable on jet states suitable for the fixed-point solver:
    iterating u <- Green[G(u)] + extension converges to the end equation
    because (K - k) W = -L_k u + G by construction.
    """

    def G(jet):
        lin = k * jet.uxx + jet.uyy - (1.0 - k) * jet.u
        return lin + curvature_cleared(jet, k)

    return G


# ---------------------------------------------------------------------------
# Newton-Krylov solver


@dataclass
class SolveReport:
    k: float
    m: int
    Y: float
    Nx: int
    Ny: int
    tol: float
    converged: bool = False
    iterations: int = 0
    residual_history: list = field(default_factory=list)
    gmres_iterations: list = field(default_factory=list)
    final_residual: float = np.inf
    interior_residual: float = np.inf
    boundary_sup: float = 0.0
    message: str = ""

    def to_dict(self):
        d = dict(self.__dict__)
        d["residual_history"] = [float(r) for r in self.residual_history]
        return d


def _mode_preconditioner(grid, k):
    """Factorized block-diagonal approximation of the scaled Jacobian.

    Per Fourier mode: interior rows of k d_xx + d_yy - (1 - k) (the x part
    a multiplier), identity row at the bottom, Robin row at the top.
    """
    Ny, h = grid.Ny, grid.hy
    d2 = gridops._banded_derivative(Ny, h, 2).tolil()
    d1_top = gridops._banded_derivative(Ny, h, 1).tolil()[Ny - 1]
    masses = mode_masses(k, grid.lam)
    blocks = []
    for lam, a in zip(grid.lam, masses):
        A = d2.copy()
        shift = -(k * lam * lam + (1.0 - k))
        for j in range(1, Ny - 1):
            A[j, j] += shift
        A[0] = 0.0
        A[0, 0] = 1.0
        A[Ny - 1] = d1_top
        A[Ny - 1, Ny - 1] += a
        blocks.append(A)
    lu = spla.splu(sp.block_diag(blocks, format="csc"))
    return lu


def _gmres(A, b, M, rtol, maxiter=300):
    try:
        x, info = spla.gmres(A, b, M=M, rtol=rtol, atol=0.0, maxiter=maxiter)
    except TypeError:  # older scipy spells the keyword tol
        x, info = spla.gmres(A, b, M=M, tol=rtol, atol=0.0, maxiter=maxiter)
    return x, info


def newton_solve(
    k,
    boundary,
    m=1,
    Y=None,
    Nx=None,
    Ny=None,
    tol=1e-11,
    max_iter=12,
    smallness=None,
    gmres_maxiter=300,
):
    """Solve the end equation for Dirichlet data `boundary` (samples on x).

    Returns (EndFunction, SolveReport).  Raises SmallnessError when the data
    exceeds the default bound 0.2 * min(1, sqrt(1-k)) (pass smallness=np.inf
    to insist), DegenerateEndError for identically zero data, and
    ConvergenceError when the iteration stalls.
    """
    if not 0.0 < k < 1.0:
        raise ValueError("k must lie strictly between 0 and 1")
    if Y is None:
        Y = default_height(k)
    if Nx is None:
        Nx = 128 * m
    if Ny is None:
        Ny = int(round(64 * Y)) + 1
    grid = gridops.Grid(m, Y, Nx, Ny)

    v = np.asarray(boundary, dtype=float)
    if v.shape != (Nx,):
        raise ValueError(f"boundary must provide {Nx} samples")
    vsup = float(np.max(np.abs(v)))
    report = SolveReport(k=k, m=m, Y=Y, Nx=Nx, Ny=Ny, tol=tol, boundary_sup=vsup)
    if vsup == 0.0:
        raise DegenerateEndError("zero boundary data describes no end (radius 0)")
    bound = 0.2 * min(1.0, np.sqrt(1.0 - k)) if smallness is None else smallness
    if vsup > bound:
        raise SmallnessError(
            f"boundary sup {vsup:.3g} exceeds smallness bound {bound:.3g}; "
            "pass smallness=... to override"
        )

    u = decaying_extension(k, m, grid, v)
    shape = (Nx, Ny)
    nn = Nx * Ny
    lu = _mode_preconditioner(grid, k)

    # Equilibration: the solution and the Jacobian columns shrink like
    # e^{-mu0 y}, so the Krylov solve runs in the rescaled unknown
    # delta = sfac * delta~ and with the Robin row divided by sfac(Y).
    # Without this, GMRES ignores the top rows and K - k stalls there.
    sfac = np.exp(-np.sqrt(1.0 - k) * grid.y)
    stop = sfac[-1]

    def residual(uu):
        r = _system_residual(grid, k, uu, v)
        r[:, -1] /= stop
        return r

    matvec_count = [0]

    def jacobian_operator(uu):
        grads = curvature_jet_gradient(jet_state(grid, uu))

        def matvec(dflat):
            matvec_count[0] += 1
            d = np.asarray(dflat, dtype=float).reshape(shape) * sfac
            pj = grid.jet(d)
            out = np.empty(shape)
            acc = np.zeros(shape)
            for slot in ("u", "ux", "uy", "uxx", "uxy", "uyy"):
                acc += grads[slot] * pj[slot]
            out[:, 1:-1] = acc[:, 1:-1]
            out[:, 0] = d[:, 0]
            out[:, -1] = _robin_row(grid, k, d) / stop
            return out.ravel()

        return spla.LinearOperator((nn, nn), matvec=matvec, dtype=np.float64)

    def preconditioner(uu):
        w = uu + grid.dxx(uu)

        def psolve(rflat):
            r = np.asarray(rflat, dtype=float).reshape(shape).copy()
            r[:, -1] *= stop
            r[:, 1:-1] *= -w[:, 1:-1]
            rh = np.fft.rfft(r, axis=0).reshape(-1)
            sol = lu.solve(np.column_stack([rh.real, rh.imag]))
            dh = (sol[:, 0] + 1j * sol[:, 1]).reshape(-1, Ny)
            return (np.fft.irfft(dh, n=Nx, axis=0) / sfac).ravel()

        return spla.LinearOperator((nn, nn), matvec=psolve, dtype=np.float64)

    res = residual(u)
    res_sup = float(np.max(np.abs(res)))
    report.residual_history.append(res_sup)

    for it in range(1, max_iter + 1):
        if res_sup <= tol:
            report.converged = True
            report.message = "converged"
            break
        J = jacobian_operator(u)
        M = preconditioner(u)
        forcing = min(1e-2, max(1e-8, np.sqrt(res_sup) * 1e-3))
        matvec_count[0] = 0
        delta, info = _gmres(J, -res.ravel(), M, forcing, maxiter=gmres_maxiter)
        report.gmres_iterations.append(matvec_count[0])
        delta = delta.reshape(shape) * sfac

        lam_step = 1.0
        accepted = False
        for _ in range(10):
            u_try = u + lam_step * delta
            try:
                res_try = residual(u_try)
            except DegenerateImmersionError:
                lam_step *= 0.5
                continue
            sup_try = float(np.max(np.abs(res_try)))
            if sup_try <= (1.0 - 1e-4 * lam_step) * res_sup:
                u, res, res_sup = u_try, res_try, sup_try
                accepted = True
                break
            lam_step *= 0.5
        if not accepted:
            report.iterations = it
            report.final_residual = res_sup
            report.message = "line search failed"
            raise ConvergenceError(
                f"line search failed at iteration {it} (residual {res_sup:.3g})",
                report=report,
            )
        report.iterations = it
        report.residual_history.append(res_sup)
    else:
        if res_sup > tol:
            report.final_residual = res_sup
            report.message = f"no convergence in {max_iter} iterations"
            raise ConvergenceError(report.message, report=report)
        report.converged = True
        report.message = "converged"

    report.final_residual = res_sup
    pack = curvature_pack(jet_state(grid, u))
    report.interior_residual = float(np.max(np.abs(pack.extrinsic[:, 1:-1] - k)))
    end = EndFunction(k=k, m=m, Y=Y, u=u)
    return end, report


# ---------------------------------------------------------------------------
# Jacobi operator and stability metric


def _metric_derivatives(grid, g):
    E, F, G = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    d = {}
    for name, comp in (("E", E), ("F", F), ("G", G)):
        d[name + "x"] = grid.dx(comp)
        d[name + "y"] = grid.dy(comp)
    return d


def _christoffels(grid, g):
    """Gamma[a][(b, c)] grids of the Levi-Civita connection of g."""
    dg = _metric_derivatives(grid, g)
    E, F, G = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    det = E * G - F * F
    ginv = np.empty_like(g)
    ginv[..., 0, 0] = G / det
    ginv[..., 0, 1] = -F / det
    ginv[..., 1, 0] = -F / det
    ginv[..., 1, 1] = E / det

    # partials of the metric as a (2, 2, 2) table: dmet[l][b][c] = d_l g_{bc}
    dmet = [
        [[dg["Ex"], dg["Fx"]], [dg["Fx"], dg["Gx"]]],
        [[dg["Ey"], dg["Fy"]], [dg["Fy"], dg["Gy"]]],
    ]
    gamma = [[[None, None], [None, None]], [[None, None], [None, None]]]
    for a in range(2):
        for b in range(2):
            for c in range(2):
                acc = 0.0
                for l in range(2):
                    acc = acc + ginv[..., a, l] * (
                        dmet[b][c][l] + dmet[c][b][l] - dmet[l][b][c]
                    )
                gamma[a][b][c] = 0.5 * acc
    return gamma, ginv


def _hessian_sharp(end, w):
    grid = end.grid
    pack = curvature_pack(end.jet())
    gamma, ginv = _christoffels(grid, pack.first_form)
    wx, wy = grid.dx(w), grid.dy(w)
    hess = np.empty(w.shape + (2, 2))
    hess[..., 0, 0] = grid.dxx(w) - gamma[0][0][0] * wx - gamma[1][0][0] * wy
    hxy = grid.dy(wx)
    hess[..., 0, 1] = hxy - gamma[0][0][1] * wx - gamma[1][0][1] * wy
    hess[..., 1, 0] = hess[..., 0, 1]
    hess[..., 1, 1] = grid.dyy(w) - gamma[0][1][1] * wx - gamma[1][1][1] * wy
    sharp = np.einsum("...ab,...bc->...ac", ginv, hess)
    return sharp, pack


def jacobi_operator(end, w):
    """Stability operator J w = (1/k) H (1-k) w - tr(A^{-1} Hess^sharp w)."""
    sharp, pack = _hessian_sharp(end, w)
    A = pack.shape_operator
    detA = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    ainv = np.empty_like(A)
    ainv[..., 0, 0] = A[..., 1, 1] / detA
    ainv[..., 0, 1] = -A[..., 0, 1] / detA
    ainv[..., 1, 0] = -A[..., 1, 0] / detA
    ainv[..., 1, 1] = A[..., 0, 0] / detA
    trace = np.einsum("...ab,...ba->...", ainv, sharp)
    k = end.k
    return (1.0 / k) * pack.mean * (1.0 - k) * w - trace


def hat_metric(end):
    """The conformal comparison metric g(Id + A^2/k) of the slice."""
    pack = curvature_pack(end.jet())
    A = pack.shape_operator
    A2 = np.einsum("...ab,...bc->...ac", A, A)
    mod = np.einsum("...ab,...bc->...ac", pack.first_form, np.eye(2) + A2 / end.k)
    return 0.5 * (mod + np.swapaxes(mod, -1, -2))


def hat_laplacian(end, w):
    """Laplace-Beltrami operator of the hat metric, in divergence form."""
    grid = end.grid
    gh = hat_metric(end)
    E, F, G = gh[..., 0, 0], gh[..., 0, 1], gh[..., 1, 1]
    det = E * G - F * F
    root = np.sqrt(det)
    wx, wy = grid.dx(w), grid.dy(w)
    fx = root * (G * wx - F * wy) / det
    fy = root * (-F * wx + E * wy) / det
    return (grid.dx(fx) + grid.dy(fy)) / root


def linearization_jacobi_residual(end, w, margin=8):
    """Sup of dK.w - k J(Cw) on the interior window, relative to sup |dK.w|.

    The curvature linearization factors through the stability operator with
    the chart normal factor C and one power of k.
    """
    dk = curvature_linearization(end, w)
    jcw = jacobi_operator(end, end.jet().C * w)
    sl = np.s_[:, margin:-margin]
    scale = float(np.max(np.abs(dk[sl]))) or 1.0
    return float(np.max(np.abs(dk[sl] - end.k * jcw[sl]))) / scale


def jacobi_identity_residual(end, w, margin=4):
    """Sup of (k/H) J w - ((1-k) w - hat-Laplacian w) on the interior window."""
    jw = jacobi_operator(end, w)
    pack = curvature_pack(end.jet())
    lhs = end.k / pack.mean * jw
    rhs = (1.0 - end.k) * w - hat_laplacian(end, w)
    sl = np.s_[:, margin:-margin]
    return float(np.max(np.abs(lhs[sl] - rhs[sl])))


# ---------------------------------------------------------------------------
# radial (rotationally invariant) oracle


@dataclass
class RadialProfile:
    k: float
    u0: float
    slope0: float
    y: np.ndarray
    u: np.ndarray
    uy: np.ndarray
    uyy: np.ndarray
    shots: int = 0
    refined: bool = False


def _radial_rhs(k):
    # K = k for x-independent u clears to (u' + u'') C^4 (1 + T u) = SC + (S^2 - k) u
    def rhs(_, s):
        u, p = s
        t = u + p
        c2 = 1.0 / (1.0 + t * t)
        c = np.sqrt(c2)
        ssl = t * c
        denom = c2 * c2 * (1.0 + t * u)
        upp = (ssl * c + (ssl * ssl - k) * u) / denom - p
        return [p, upp]

    return rhs


def ode_radial_solve(k, u0, Y=None, y_eval=None, rtol=1e-12, atol=1e-14):
    """Integrate the radial end equation (u'' + u') C^4 (1 + T u) = S C + (S^2 - k) u.

    Shooting from u(0) = u0 > 0: bisection pins the initial slope so the
    trajectory neither blows up nor crosses zero before Y + 2, then a secant
    step retargets the endpoint to a two-term tail fit.  Returns a
    RadialProfile sampled at y_eval (default: the uniform solver grid).
    """
    if not 0.0 < k < 1.0:
        raise ValueError("k must lie strictly between 0 and 1")
    if u0 <= 0:
        raise DegenerateEndError("radial data must be positive")
    mu0 = np.sqrt(1.0 - k)
    if Y is None:
        Y = default_height(k)
    yt = Y + 2.0
    rhs = _radial_rhs(k)
    big = 8.0 * u0

    def blow(_, s):
        return abs(s[0]) - big

    blow.terminal = True
    shots = 0

    def shoot(slope, dense=False, t_eval=None):
        nonlocal shots
        shots += 1
        sol = solve_ivp(
            rhs,
            (0.0, yt),
            [u0, slope],
            method="DOP853",
            rtol=rtol,
            atol=atol,
            events=blow,
            dense_output=dense,
            t_eval=t_eval,
        )
        return sol

    def endpoint(slope):
        sol = shoot(slope)
        if sol.status == 1:  # terminated on the blow-up event
            return float(np.sign(sol.y[0, -1]) * big)
        return float(sol.y[0, -1])

    lo, hi = -3.0 * mu0 * u0, -1e-3 * mu0 * u0
    flo, fhi = endpoint(lo), endpoint(hi)
    widen = 0
    while flo * fhi > 0 and widen < 8:
        if flo > 0:
            lo *= 2.0
            flo = endpoint(lo)
        else:
            hi *= 0.5
            fhi = endpoint(hi)
        widen += 1
    if flo * fhi > 0:
        raise ConvergenceError("radial shooting could not bracket the decaying branch")
    slope = brentq(endpoint, lo, hi, xtol=1e-16, rtol=8.9e-16)

    # refine: retarget the endpoint to a two-term tail extrapolation
    refined = False
    ys = np.linspace(0.45 * Y, 0.75 * Y, 60)
    sol = shoot(slope, t_eval=ys)
    uu = sol.y[0]
    if sol.status == 0 and np.all(uu > 0):
        cols = np.column_stack([np.exp(-mu0 * ys), np.exp(-2.0 * mu0 * ys)])
        coef, *_ = np.linalg.lstsq(cols, uu, rcond=None)
        target = coef[0] * np.exp(-mu0 * yt) + coef[1] * np.exp(-2.0 * mu0 * yt)
        f0 = endpoint(slope)
        ds = 1e-7 * max(abs(slope), 1e-6)
        f1 = endpoint(slope + ds)
        dfds = (f1 - f0) / ds
        if dfds != 0 and np.isfinite(dfds):
            slope = slope + (target - f0) / dfds
            refined = True

    if y_eval is None:
        y_eval = np.linspace(0.0, Y, int(round(64 * Y)) + 1)
    y_eval = np.asarray(y_eval, dtype=float)
    sol = shoot(slope, t_eval=y_eval)
    if sol.status != 0:
        raise ConvergenceError("radial integration failed after refinement")
    u, p = sol.y
    upp = np.array([_radial_rhs(k)(0.0, (ui, pi))[1] for ui, pi in zip(u, p)])
    return RadialProfile(
        k=k, u0=u0, slope0=slope, y=y_eval, u=u, uy=p, uyy=upp, shots=shots, refined=refined
    )


def radial_end(k, m, profile, Nx=None):
    """Broadcast a radial profile to an EndFunction on the matching grid."""
    if Nx is None:
        Nx = 128 * m
    y = profile.y
    Y = float(y[-1])
    u = np.broadcast_to(profile.u, (Nx, y.size)).copy()
    return EndFunction(k=k, m=m, Y=Y, u=u)
