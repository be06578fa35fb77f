"""Upper half-space model of hyperbolic 3-space.

Points are euclidean triples (x, y, z) with z > 0, passed around as plain
numpy arrays of shape (..., 3).  The metric is (dx^2 + dy^2 + dz^2)/z^2.
The ideal boundary is the extended complex plane; finite boundary points are
complex numbers and the point at infinity is the singleton INFINITY.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


class _Infinity:
    """The point at infinity on the ideal boundary."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


def _as_points(p):
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise DomainError("points are euclidean triples (x, y, z)")
    if np.any(p[..., 2] <= 0):
        raise DomainError("height must be positive")
    return p


def hyp_distance(p, q):
    """Hyperbolic distance, via acosh(1 + |p-q|^2 / (2 z_p z_q))."""
    p = _as_points(p)
    q = _as_points(q)
    d2 = ((p - q) ** 2).sum(axis=-1)
    arg = 1.0 + d2 / (2.0 * p[..., 2] * q[..., 2])
    return np.arccosh(np.maximum(arg, 1.0))


# ---------------------------------------------------------------------------
# isometries


@dataclass(frozen=True)
class Isometry:
    """A named isometry of the upper half-space.

    kinds: 'rotation' (about the vertical axis through 0, angle xi),
    'dilation' (by eta > 0 from the origin), 'translation' (horizontal by
    (a, b)), 'inversion' (unit sphere inversion x -> x/|x|^2, swapping 0 and
    infinity), 'end_map' (inversion followed by translation to the complex
    center: x -> x/|x|^2 + center, sending infinity to center).
    """

    kind: str
    params: tuple = field(default=())

    def __call__(self, p):
        return apply_isometry(self, p)


def rotation(xi):
    return Isometry("rotation", (float(xi),))


def dilation(eta):
    if eta <= 0:
        raise DomainError("dilation factor must be positive")
    return Isometry("dilation", (float(eta),))


def translation(a, b):
    return Isometry("translation", (float(a), float(b)))


def inversion():
    return Isometry("inversion")


def end_map(center):
    """The isometry x -> x/|x|^2 + center taking infinity to the end center."""
    center = complex(center)
    return Isometry("end_map", (center.real, center.imag))


def _invert(p):
    n2 = (p * p).sum(axis=-1, keepdims=True)
    return p / n2


def apply_isometry(iso, p):
    """Apply an isometry to points of shape (..., 3)."""
    p = _as_points(p)
    if iso.kind == "rotation":
        (xi,) = iso.params
        cs, sn = np.cos(xi), np.sin(xi)
        q = np.empty_like(p)
        q[..., 0] = cs * p[..., 0] - sn * p[..., 1]
        q[..., 1] = sn * p[..., 0] + cs * p[..., 1]
        q[..., 2] = p[..., 2]
        return q
    if iso.kind == "dilation":
        (eta,) = iso.params
        return eta * p
    if iso.kind == "translation":
        a, b = iso.params
        return p + np.array([a, b, 0.0])
    if iso.kind == "inversion":
        return _invert(p)
    if iso.kind == "end_map":
        a, b = iso.params
        return _invert(p) + np.array([a, b, 0.0])
    raise DomainError(f"unknown isometry kind {iso.kind!r}")


def differential(iso, p):
    """Jacobian matrix of the isometry at p, shape (..., 3, 3)."""
    p = _as_points(p)
    eye = np.eye(3)
    if iso.kind == "rotation":
        (xi,) = iso.params
        cs, sn = np.cos(xi), np.sin(xi)
        mat = np.array([[cs, -sn, 0.0], [sn, cs, 0.0], [0.0, 0.0, 1.0]])
        return np.broadcast_to(mat, p.shape[:-1] + (3, 3)).copy()
    if iso.kind == "dilation":
        (eta,) = iso.params
        return np.broadcast_to(eta * eye, p.shape[:-1] + (3, 3)).copy()
    if iso.kind == "translation":
        return np.broadcast_to(eye, p.shape[:-1] + (3, 3)).copy()
    if iso.kind in ("inversion", "end_map"):
        n2 = (p * p).sum(axis=-1)[..., None, None]
        outer = p[..., :, None] * p[..., None, :]
        return (eye - 2.0 * outer / n2) / n2
    raise DomainError(f"unknown isometry kind {iso.kind!r}")


def push_tangent(iso, p, v):
    """Image of a tangent vector v at p under the isometry differential."""
    J = differential(iso, p)
    return (J @ np.asarray(v, dtype=float)[..., None])[..., 0]


def push_unit_tangent(iso, point6):
    """Image of a unit tangent vector (6-vector: base then fiber)."""
    point6 = np.asarray(point6, dtype=float)
    base = point6[..., 0:3]
    fiber = point6[..., 3:6]
    return np.concatenate(
        [apply_isometry(iso, base), push_tangent(iso, base, fiber)], axis=-1
    )


def boundary_action(iso, w):
    """Action of the isometry on the ideal boundary (complex plane + INFINITY)."""
    if w is INFINITY:
        if iso.kind in ("rotation", "dilation", "translation"):
            return INFINITY
        if iso.kind == "inversion":
            return 0j
        if iso.kind == "end_map":
            a, b = iso.params
            return complex(a, b)
        raise DomainError(f"unknown isometry kind {iso.kind!r}")
    w = complex(w)
    if iso.kind == "rotation":
        (xi,) = iso.params
        return w * complex(np.cos(xi), np.sin(xi))
    if iso.kind == "dilation":
        (eta,) = iso.params
        return eta * w
    if iso.kind == "translation":
        a, b = iso.params
        return w + complex(a, b)
    if iso.kind == "inversion":
        if w == 0:
            return INFINITY
        return 1.0 / w.conjugate()
    if iso.kind == "end_map":
        a, b = iso.params
        if w == 0:
            return INFINITY
        return 1.0 / w.conjugate() + complex(a, b)
    raise DomainError(f"unknown isometry kind {iso.kind!r}")


# ---------------------------------------------------------------------------
# horofunctions and horospherical primitives


def horofunction(center, p):
    """Busemann function of the boundary point, normalized as follows.

    Center INFINITY gives -log z (vanishing on the unit-height horosphere).
    A finite center w gives log(|p - (w,0)|^2 / z), which vanishes at the
    point (w, 1) directly above the center.
    """
    p = _as_points(p)
    if center is INFINITY:
        return -np.log(p[..., 2])
    w = complex(center)
    d = p - np.array([w.real, w.imag, 0.0])
    return np.log(((d * d).sum(axis=-1)) / p[..., 2])


def primitive_matrix(center, p):
    """Matrix of the horospherical area primitive at p.

    Returns the antisymmetric 3x3 matrix a with alpha(v1, v2) = v1 . a v2.
    For center INFINITY, alpha = -dx^dy / (2 z^2); for a finite center the
    form is pulled back through an orientation-preserving isometry sending
    the center to INFINITY, so d(alpha) is the volume form for every center.
    """
    p = _as_points(p)
    if center is INFINITY:
        z = p[..., 2]
        a = np.zeros(p.shape[:-1] + (3, 3))
        a[..., 0, 1] = -1.0 / (2.0 * z * z)
        a[..., 1, 0] = 1.0 / (2.0 * z * z)
        return a
    w = complex(center)
    shift = np.array([w.real, w.imag, 0.0])
    iso = inversion()
    q = p - shift
    qi = _invert(q)
    J = differential(iso, q)
    a_inf = primitive_matrix(INFINITY, qi)
    # pullback: alpha(v1, v2) = alpha_inf(J v1, J v2) = v1 . (J^T a J) v2.
    # The bare inversion reverses orientation (det J < 0); composing with the
    # reflection y -> -y restores it and only flips the sign of the xy form,
    # so the orientation-preserving pullback is the negated matrix.
    return -np.swapaxes(J, -1, -2) @ a_inf @ J


def horospherical_primitive(center, p, v1, v2):
    """The area primitive alpha_center at p evaluated on a pair of vectors."""
    a = primitive_matrix(center, p)
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    return (v1[..., :, None] * a * v2[..., None, :]).sum(axis=(-1, -2))


def primitive_norm(center, p):
    """Pointwise hyperbolic norm of the primitive 2-form (should be 1/2)."""
    a = primitive_matrix(center, p)
    p = _as_points(p)
    z = p[..., 2]
    axial = np.stack([a[..., 2, 1], a[..., 0, 2], a[..., 1, 0]], axis=-1)
    return z * z * np.sqrt((axial * axial).sum(axis=-1))


def exterior_derivative_2form(matrix_of, p, step=1e-4):
    """FD exterior derivative of a 2-form given by matrix_of(p) -> (3,3)."""
    p = np.asarray(p, dtype=float)

    def comp(i, j, q):
        return matrix_of(q)[i, j]

    total = 0.0
    # d(alpha)(e0,e1,e2) = d_0 a_12 + d_1 a_20 + d_2 a_01 (cyclic)
    for i, (j, l) in ((0, (1, 2)), (1, (2, 0)), (2, (0, 1))):
        e = np.zeros(3)
        e[i] = step
        total += (comp(j, l, p + e) - comp(j, l, p - e)) / (2 * step)
    return total


def volume_form_check(p, step=1e-4):
    """Residual of d(alpha_infinity) = hyperbolic volume form at p."""
    p = _as_points(np.asarray(p, dtype=float))
    z = p[2]
    d = exterior_derivative_2form(lambda q: primitive_matrix(INFINITY, q), p, step)
    return float(abs(d - 1.0 / z**3))


def primitive_difference_check(p, step=1e-4):
    """Residual of alpha_inf - alpha_0 = d(-log cosh(r) dtheta) at p.

    r is the distance to the vertical axis (cosh r = |p|/z) and theta the
    angle around it.  The difference of the primitives of the two axis
    endpoints is closed and rotation/dilation invariant, and integrates to
    the connecting form -log cosh(r) dtheta; returns the largest
    componentwise mismatch against its FD exterior derivative.  Points on
    the axis are rejected.
    """
    p = _as_points(np.asarray(p, dtype=float))
    if p[0] ** 2 + p[1] ** 2 < 1e-12:
        raise DomainError("connecting form is singular on the vertical axis")

    def beta(q):
        rho = np.sqrt((q * q).sum())
        f = -np.log(rho / q[2])  # -log cosh r
        r2 = q[0] ** 2 + q[1] ** 2
        return f * np.array([-q[1] / r2, q[0] / r2, 0.0])

    dbeta = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            if i >= j:
                continue
            ei = np.zeros(3)
            ej = np.zeros(3)
            ei[i] = step
            ej[j] = step
            val = (beta(p + ei)[j] - beta(p - ei)[j]) / (2 * step) - (
                beta(p + ej)[i] - beta(p - ej)[i]
            ) / (2 * step)
            dbeta[i, j] = val
            dbeta[j, i] = -val

    diff = primitive_matrix(INFINITY, p) - primitive_matrix(0j, p)
    return float(np.max(np.abs(diff - dbeta)))
