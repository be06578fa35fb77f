"""Steiner centroids of slices, the Steiner geodesic and point of an end,
and the algebra of Steiner vectors: balance relations, symmetric families,
and the symplectic pullback of the vector-to-point map."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .asymptotics import extract_series, radius_centroid
from .errors import (ConstraintError, DegenerateImmersionError, DomainError)
from .halfspace import INFINITY
from .ratefit import fit_decay_rate


# ---------------------------------------------------------------------------
# slice centroids and the Steiner geodesic


def steiner_centroid_slice(end, y=None):
    """Steiner curvature centroid of the slice curves.

    s(y) = (1/(m pi)) int e^y u(x, y) (cos x + i sin x) dx, the first
    Fourier mode of the support function in the euclidean structure of the
    height-e^y horosphere; equivalently 2 e^y conj(u_m(y)).  Converges to
    the end centroid c.  Returns the full profile, or the value nearest a
    given height.
    """
    w = end.u + end.grid.dxx(end.u)
    if np.any(w <= 0.0):
        raise DegenerateImmersionError("slice support u + u_xx <= 0")
    s = 2.0 * np.exp(end.y) * np.conj(end.mode_profiles()[end.m])
    if y is None:
        return s
    j = int(np.argmin(np.abs(end.y - y)))
    return complex(s[j])


def steiner_geodesic(end, series=None, window=None):
    """Foot point of the Steiner geodesic and the centroid approach rate.

    The geodesic is the vertical line through the end centroid c; the
    returned rate is the fitted decay exponent of the hyperbolic distance
    between gamma(y) and the slice centroid at height e^y (+inf when the
    centroids sit on the geodesic to roundoff).
    """
    if series is None:
        series = extract_series(end)
    _, c = radius_centroid(series)
    s = steiner_centroid_slice(end)
    y, yy = end.y, end.Y
    if window is None:
        window = (max(1.0, 0.15 * yy), 1.0)
    iw = (y >= window[0]) & (y <= yy - window[1])
    # the equal-height chord distance is 2 asinh(|s - c| / 2e^y), so the
    # distance exponent is the centroid exponent plus one; fitting |s - c|
    # keeps the noise floor constant across heights
    gap = np.abs(s - c)[iw]
    scale = max(abs(c), float(np.max(np.abs(s[iw]))), 1e-300)
    rho = fit_decay_rate(y[iw], gap, floor=1e-7 * scale)
    return c, float(rho + 1.0)


def steiner_point(z, c):
    """Second ideal endpoint of the Steiner geodesic: z + 1/conj(c).

    A vanishing Steiner vector sends the point to INFINITY; otherwise the
    round trip 1/conj(zeta - z) recovers c.
    """
    c = complex(c)
    if c == 0:
        return INFINITY
    return complex(z) + 1.0 / np.conj(c)


# ---------------------------------------------------------------------------
# Steiner data and the balance relations


@dataclass(frozen=True)
class EndRecord:
    m: int
    z: complex
    c: complex
    zeta: object  # complex, or INFINITY when c = 0


def make_end(m, z, c):
    """EndRecord with the Steiner point filled in from (z, c)."""
    z, c = complex(z), complex(c)
    return EndRecord(m=int(m), z=z, c=c, zeta=steiner_point(z, c))


@dataclass(frozen=True)
class SteinerData:
    """Extremities, Steiner vectors and Steiner points of a surface's ends."""

    ends: tuple

    def __post_init__(self):
        for e in self.ends:
            if e.zeta is INFINITY:
                if e.c != 0:
                    raise DomainError("infinite Steiner point with c != 0")
            elif e.c == 0 or abs(e.zeta - e.z - 1.0 / np.conj(e.c)) > 1e-9:
                raise DomainError(f"inconsistent Steiner point for z={e.z}")

    @property
    def n(self):
        return len(self.ends)


def rho_reflect(z, c):
    """Reflection of c through the line orthogonal to the direction z.

    Concretely -z^2 conj(c)/|z|^2; by convention 0 when z = 0.
    """
    z, c = complex(z), complex(c)
    if z == 0:
        return 0j
    return -z * z * np.conj(c) / abs(z) ** 2


@dataclass
class RelationReport:
    """Residual magnitudes of the three Steiner balance sums."""

    balance: float      # |sum m_i c_i|
    pairing: float      # |sum m_i c_i conj(z_i) + (1/2) sum m_i|
    reflection: float   # |sum m_i |z_i|^2 rho_i(c_i) - sum m_i z_i|
    tol: float
    passed: bool


def check_relations(data, tol=1e-12):
    """Residuals of the three balance relations satisfied by Steiner data.

    All extremities must be finite; configurations with an extremity at
    INFINITY are not supported.
    """
    for e in data.ends:
        if e.z is INFINITY:
            raise DomainError("extremity at infinity is not supported")
    ms = np.array([e.m for e in data.ends], dtype=float)
    zs = np.array([e.z for e in data.ends], dtype=complex)
    cs = np.array([e.c for e in data.ends], dtype=complex)
    r1 = abs(np.sum(ms * cs))
    r2 = abs(np.sum(ms * cs * np.conj(zs)) + 0.5 * np.sum(ms))
    refl = np.array([rho_reflect(z, c) for z, c in zip(zs, cs)])
    r3 = abs(np.sum(ms * np.abs(zs) ** 2 * refl) - np.sum(ms * zs))
    residuals = (float(r1), float(r2), float(r3))
    return RelationReport(*residuals, tol=float(tol),
                          passed=all(r <= tol for r in residuals))


def symmetric_examples(kind, n, m0=1, m1=1, require_admissible=True):
    """Steiner data of the three symmetric families of ends.

    I:   n extremities at the n-th roots of unity, c_i = -z_i/2.
    II:  the same ring plus an extremity at the origin; the ring vectors
         steepen to c_i = -((n+1)/(2n)) z_i and the origin gets c = 0.
    III: ramified variant with winding m0 at the origin and m1 on the ring,
         c_i = -((m0 + n m1)/(2 n m1)) z_i; admissible when 1/m0 + n/m1 is
         an integer (otherwise the covering does not close up and a
         ConstraintError is raised unless require_admissible=False).
    """
    if n < 2:
        raise DomainError("need at least two ring extremities")
    ring = np.exp(2j * np.pi * np.arange(n) / n)
    if kind == "I":
        return SteinerData(tuple(make_end(1, z, -0.5 * z) for z in ring))
    if kind == "II":
        ends = [make_end(1, 0.0, 0.0)]
        ends += [make_end(1, z, -(n + 1) / (2.0 * n) * z) for z in ring]
        return SteinerData(tuple(ends))
    if kind == "III":
        if require_admissible and (Fraction(1, int(m0))
                                   + Fraction(int(n), int(m1))).denominator != 1:
            raise ConstraintError(
                f"1/{m0} + {n}/{m1} is not an integer; covering does not close"
            )
        lam = (m0 + n * m1) / (2.0 * n * m1)
        ends = [make_end(m0, 0.0, 0.0)]
        ends += [make_end(m1, z, -lam * z) for z in ring]
        return SteinerData(tuple(ends))
    raise DomainError(f"unknown family {kind!r}")


# ---------------------------------------------------------------------------
# the symplectic pullback of the vector-to-point map


def steiner_transform(z, w):
    """(extremity, Steiner vector) -> (extremity, Steiner point)."""
    return z, z + 1.0 / np.conj(w)


def _omega(zw, v1, v2):
    z, w = zw
    return (v1[0] * v2[1] - v2[0] * v1[1]) / (z - w) ** 2


def symplectic_check(z, w, step=1e-5):
    """Residual of the pullback identity for the vector-to-point map.

    Pulls omega = dz ^ dw / (z - w)^2 back through the non-holomorphic map
    (z, w) -> (z, z + 1/conj(w)) by finite differences on the real tangent
    basis and compares against -dz ^ d(conj(w)); returns the largest entry
    of the difference.
    """
    z, w = complex(z), complex(w)
    if w == 0:
        raise DomainError("Steiner vector must be nonzero")
    if z == steiner_transform(z, w)[1]:
        raise DomainError("coincident extremity and Steiner point")
    basis = [(1.0, 0.0), (1j, 0.0), (0.0, 1.0), (0.0, 1j)]

    def push(v):
        zp, wp = z + step * v[0], w + step * v[1]
        zm, wm = z - step * v[0], w - step * v[1]
        fp = steiner_transform(zp, wp)
        fm = steiner_transform(zm, wm)
        return ((fp[0] - fm[0]) / (2 * step), (fp[1] - fm[1]) / (2 * step))

    image = steiner_transform(z, w)
    pushed = [push(v) for v in basis]
    resid = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            got = _omega(image, pushed[i], pushed[j])
            want = -(basis[i][0] * np.conj(basis[j][1])
                     - basis[j][0] * np.conj(basis[i][1]))
            resid = max(resid, abs(got - want))
    return float(resid)
