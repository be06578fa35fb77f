"""Darboux coordinates around a vertical geodesic and graph geometry.

The unit tangent bundle of hyperbolic 3-space is charted near the upward
vertical geodesic by five coordinates (x, y, u, v, t).  A Legendrian graph is
the 2-jet lift (x, y, u_x, u_y, u) of a profile u on the half-cylinder; this
module evaluates its immersion data: position, frames, fundamental forms,
shape operator, mean and extrinsic curvature, all as closed-form pointwise
expressions in the 2-jet.  Everything broadcasts over numpy arrays, so the
same functions serve single-point checks and full solver grids.

Conventions: C = 1/sqrt(1 + (t+v)^2), S = (t+v)*C, and for graphs t+v is the
slope T = u + u_y.  The immersion requires u + u_xx > 0.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateImmersionError


# ---------------------------------------------------------------------------
# chart and contact structure


def slope_functions(tv):
    """C and S as functions of the slope combination t + v."""
    c = 1.0 / np.sqrt(1.0 + tv * tv)
    return c, tv * c


def darboux_chart(q):
    """Map chart coordinates (x, y, u, v, t) to a unit tangent vector.

    Returns a 6-vector: base point in the upper half-space followed by the
    fiber (tangent) components.  Broadcasts over leading axes of q.
    """
    q = np.asarray(q, dtype=float)
    x, y, u, v, t = np.moveaxis(q, -1, 0)
    ey = np.exp(y)
    c, s = slope_functions(t + v)
    cx, sx = np.cos(x), np.sin(x)
    out = np.stack(
        [
            ey * (t * cx - u * sx),
            ey * (t * sx + u * cx),
            ey,
            -c * ey * cx,
            -c * ey * sx,
            s * ey,
        ],
        axis=-1,
    )
    return out


def liouville_form(point6, xi6):
    """The canonical contact form at a unit tangent vector, paired with xi.

    At (p, w) the form is (1/z^2) <w, dp>_euclidean evaluated on the base
    component of xi.
    """
    point6 = np.asarray(point6, dtype=float)
    xi6 = np.asarray(xi6, dtype=float)
    z = point6[..., 2]
    w = point6[..., 3:6]
    dp = xi6[..., 0:3]
    return (w * dp).sum(axis=-1) / (z * z)


def contact_pullback(q, step=1e-3):
    """Pullback of the contact form through the chart at q, by differencing.

    Uses 4th-order central differences in each of the five coordinates and
    returns the 5 covector components in the (dx, dy, du, dv, dt) basis.
    """
    q = np.asarray(q, dtype=float)
    base = darboux_chart(q)
    comps = np.empty(5)
    for i in range(5):
        e = np.zeros(5)
        e[i] = step
        fp2 = darboux_chart(q + 2 * e)
        fp1 = darboux_chart(q + e)
        fm1 = darboux_chart(q - e)
        fm2 = darboux_chart(q - 2 * e)
        dphi = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * step)
        comps[i] = liouville_form(base, dphi)
    return comps


def contact_pullback_exact(q):
    """Closed form of the same pullback: -C (dt - u dx - v dy)."""
    q = np.asarray(q, dtype=float)
    x, y, u, v, t = np.moveaxis(q, -1, 0)
    c, _ = slope_functions(t + v)
    return np.stack([c * u, c * v, np.zeros_like(c), np.zeros_like(c), -c], axis=-1)


def contact_pullback_check(q, step=1e-3):
    """Max abs difference between the differenced and closed-form pullback."""
    return float(np.max(np.abs(contact_pullback(q, step) - contact_pullback_exact(q))))


# ---------------------------------------------------------------------------
# jets and frames


@dataclass
class JetState:
    """A 2-jet of a half-cylinder profile at (x, y); fields may be arrays."""

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    ux: np.ndarray
    uy: np.ndarray
    uxx: np.ndarray
    uxy: np.ndarray
    uyy: np.ndarray

    @property
    def T(self):
        """Slope u + u_y (tangent of the frame tilt angle)."""
        return self.u + self.uy

    @property
    def theta(self):
        return np.arctan(self.T)

    @property
    def C(self):
        return 1.0 / np.sqrt(1.0 + self.T * self.T)

    @property
    def S(self):
        return self.T * self.C

    @property
    def W(self):
        """Immersion density u + u_xx."""
        return self.u + self.uxx

    @property
    def P(self):
        return self.ux + self.uxy

    @property
    def Q(self):
        return self.uy + self.uyy


@dataclass
class FramePack:
    """Position and adapted orthonormal frame of the immersion."""

    position: np.ndarray
    normal: np.ndarray
    conormal: np.ndarray
    tangent: np.ndarray


def immerse(jet):
    """Position and frame of the Legendrian graph at the given 2-jet.

    The frame (normal N, conormal nu, slice tangent TT) is orthonormal for the
    hyperbolic metric; vectors are returned in ambient euclidean components.
    """
    ey = np.exp(jet.y)
    cx, sx = np.cos(jet.x), np.sin(jet.x)
    c, s = jet.C, jet.S
    pos = np.stack(
        [ey * (jet.u * cx - jet.ux * sx), ey * (jet.u * sx + jet.ux * cx), ey],
        axis=-1,
    )
    normal = np.stack([ey * c * cx, ey * c * sx, -ey * s], axis=-1)
    conormal = np.stack([ey * s * cx, ey * s * sx, ey * c], axis=-1)
    tangent = np.stack([ey * sx, -ey * cx, np.zeros_like(ey)], axis=-1)
    return FramePack(pos, normal, conormal, tangent)


def pushforwards(jet):
    """Ambient images of the coordinate fields d/dx and d/dy along the graph."""
    ey = np.exp(jet.y)
    cx, sx = np.cos(jet.x), np.sin(jet.x)
    w = jet.W
    p = jet.P
    tt = jet.T
    ex = np.stack([-ey * w * sx, ey * w * cx, np.zeros_like(ey)], axis=-1)
    eyv = np.stack(
        [ey * (tt * cx - p * sx), ey * (tt * sx + p * cx), ey], axis=-1
    )
    return ex, eyv


# ---------------------------------------------------------------------------
# curvature


@dataclass
class CurvaturePack:
    """First/second order invariants of the graph immersion."""

    first_form: np.ndarray      # (..., 2, 2)
    shape_operator: np.ndarray  # (..., 2, 2)
    area_density: np.ndarray    # dArea = area_density dx dy
    length_density: np.ndarray  # slice dl = length_density dx
    mean: np.ndarray            # H = trace of the shape operator
    extrinsic: np.ndarray       # K = det of the shape operator
    kappa_slice: np.ndarray     # geodesic curvature of the slice in its horosphere


def _check_immersed(w, strict):
    if strict and np.any(w <= 0):
        bad = np.argwhere(np.asarray(w) <= 0)
        raise DegenerateImmersionError(
            f"u + u_xx <= 0 at {bad[0].tolist()} (min {np.min(w):.3e})"
        )


def curvature_pack(jet, strict=True):
    """All curvature data of the graph at the jet.

    The shape operator in the coordinate basis (d/dx, d/dy), defined by
    nabla_i N = A^j_i e_j, works out to

        A = [[ S + (C + C^3 P^2)/W,  C^3 P Q / W ],
             [ -C^3 P,               S - C^3 Q   ]]

    with T = u+u_y, W = u+u_xx, P = u_x+u_xy, Q = u_y+u_yy and
    C = 1/sqrt(1+T^2), S = TC.  It is self-adjoint for the first form
    (both pairings of gA on mixed arguments equal W P S); its trace is the
    mean curvature H and its determinant the extrinsic curvature K:

        H = 2S + (C + C^3 P^2)/W - C^3 Q
        K = S^2 - S C^3 Q + (S C + S C^3 P^2 - C^4 Q) / W
    """
    c, s, t = jet.C, jet.S, jet.T
    w, p, q = jet.W, jet.P, jet.Q
    _check_immersed(w, strict)

    first = np.stack(
        [
            np.stack([w * w, w * p], axis=-1),
            np.stack([w * p, p * p + 1.0 / (c * c)], axis=-1),
        ],
        axis=-2,
    )

    c3 = c * c * c
    a11 = s + (c + c3 * p * p) / w
    a12 = c3 * p * q / w
    a21 = -c3 * p
    a22 = s - c3 * q
    shape = np.stack(
        [np.stack([a11, a12], axis=-1), np.stack([a21, a22], axis=-1)], axis=-2
    )

    mean = a11 + a22
    extrinsic = a11 * a22 - a12 * a21
    kappa = c * (jet.uy - jet.uxx) / w

    return CurvaturePack(
        first_form=first,
        shape_operator=shape,
        area_density=w / c,
        length_density=w,
        mean=mean,
        extrinsic=extrinsic,
        kappa_slice=kappa,
    )


def curvature_cleared(jet, k):
    """(K - k) * (u + u_xx): the residual with the W denominator cleared.

    Vanishes exactly where the graph has extrinsic curvature k, and equals
    -(k u_xx + u_yy - (1-k) u) plus terms quadratic in the jet.
    """
    c, s = jet.C, jet.S
    w, p, q = jet.W, jet.P, jet.Q
    c3 = c * c * c
    return (s * s - k) * w - s * c3 * q * w + s * c + s * c3 * p * p - c3 * c * q


def curvature_jet_gradient(jet):
    """Partial derivatives of K with respect to the six jet slots.

    Returns a dict with keys u, ux, uy, uxx, uxy, uyy.  Used to assemble the
    exact linearization of the curvature residual.  Uses dC/dT = -S C^2 and
    dS/dT = C^3 for C = 1/sqrt(1+T^2), S = TC.
    """
    c, s = jet.C, jet.S
    w, p, q = jet.W, jet.P, jet.Q
    c2 = c * c
    c3 = c2 * c
    c4 = c2 * c2
    c5 = c4 * c
    k_t = (
        2.0 * s * c3
        - q * c4 * (c2 - 3.0 * s * s)
        + (c2 * (c2 - s * s) + p * p * c4 * (c2 - 3.0 * s * s) + 4.0 * s * c5 * q) / w
    )
    k_w = -(s * c + s * c3 * p * p - c4 * q) / (w * w)
    k_p = 2.0 * s * c3 * p / w
    k_q = -s * c3 - c4 / w
    return {
        "u": k_t + k_w,
        "ux": k_p,
        "uy": k_t + k_q,
        "uxx": k_w,
        "uxy": k_p,
        "uyy": k_q,
    }


def frame_identities(jet):
    """Closed-form pairings of the position field with the frame.

    Returns (|Phi|_g^2, <Phi,N>_g, <Phi,nu>_g, <Phi,TT>_g) which should equal
    (1 + u^2 + u_x^2, -C u_y, C + S u, -u_x).
    """
    fp = immerse(jet)
    z = fp.position[..., 2]

    def pair(a, b):
        return (a * b).sum(axis=-1) / (z * z)

    return (
        pair(fp.position, fp.position),
        pair(fp.position, fp.normal),
        pair(fp.position, fp.conormal),
        pair(fp.position, fp.tangent),
    )


# ---------------------------------------------------------------------------
# independent checks


def christoffel(p, a, b):
    """Gamma_p(a, b) for the hyperbolic metric, ambient euclidean components."""
    p = np.asarray(p, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    z = p[..., 2]
    dot = (a * b).sum(axis=-1)
    out = -(a[..., 2:3] * b + b[..., 2:3] * a) / z[..., None]
    out = out.copy()
    out[..., 2] += dot / z
    return out


def shape_operator_fd_check(jet_of, x, y, step=1e-4):
    """Compare the shape operator against differenced covariant derivatives.

    jet_of(x, y) must return a JetState; the check forms the covariant
    derivative of the unit normal along both coordinate directions by 2nd
    order differencing and pairs it against I(A ., .).  Returns the max
    residual over the four pairings.
    """
    jet0 = jet_of(x, y)
    pack = curvature_pack(jet0)
    fp0 = immerse(jet0)
    ex, ey = pushforwards(jet0)
    z0 = fp0.position[2]

    def normal_at(xx, yy):
        return immerse(jet_of(xx, yy)).normal

    dn_dx = (normal_at(x + step, y) - normal_at(x - step, y)) / (2 * step)
    dn_dy = (normal_at(x, y + step) - normal_at(x, y - step)) / (2 * step)
    cov_x = dn_dx + christoffel(fp0.position, ex, fp0.normal)
    cov_y = dn_dy + christoffel(fp0.position, ey, fp0.normal)

    def g(a, b):
        return (a * b).sum(-1) / (z0 * z0)

    push = {0: ex, 1: ey}
    resid = 0.0
    for i, cov in ((0, cov_x), (1, cov_y)):
        for j in range(2):
            lhs = g(cov, push[j])
            a_ei = pack.shape_operator[:, i]  # column i of A
            rhs = (
                a_ei[0] * pack.first_form[0, j] + a_ei[1] * pack.first_form[1, j]
            )
            resid = max(resid, abs(float(lhs - rhs)))
    return resid


def _det3(a11, a12, a13, a21, a22, a23, a31, a32, a33):
    return (
        a11 * (a22 * a33 - a23 * a32)
        - a12 * (a21 * a33 - a23 * a31)
        + a13 * (a21 * a32 - a22 * a31)
    )


def brioschi_curvature(E, F, G, d_x, d_y):
    """Intrinsic (Gauss) curvature of a metric E dx^2 + 2F dx dy + G dy^2.

    d_x and d_y are callables returning grid derivatives; accuracy follows
    from the supplied operators.  Uses the Brioschi determinant formula.
    """
    Ex, Ey = d_x(E), d_y(E)
    Fx, Fy = d_x(F), d_y(F)
    Gx, Gy = d_x(G), d_y(G)
    Eyy = d_y(Ey)
    Gxx = d_x(Gx)
    Fxy = d_y(Fx)

    det1 = _det3(
        -0.5 * Eyy + Fxy - 0.5 * Gxx, 0.5 * Ex, Fx - 0.5 * Ey,
        Fy - 0.5 * Gx, E, F,
        0.5 * Gy, F, G,
    )
    det2 = _det3(
        np.zeros_like(E), 0.5 * Ey, 0.5 * Gx,
        0.5 * Ey, E, F,
        0.5 * Gx, F, G,
    )
    return (det1 - det2) / (E * G - F * F) ** 2
