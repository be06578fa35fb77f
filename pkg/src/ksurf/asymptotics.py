"""Asymptotic expansion of end fields in decaying Fourier-exponential terms.

A solved end field expands as

    u(x, y) ~ sum a_{n,mu} e^{i(n/m)x} e^{-mu y}

where the admissible pairs (n, mu) form the additive semigroup generated by
the linear decay rates mu_n = sqrt(k (n/m)^2 + (1-k)): the quadratic
nonlinearity only ever produces sums of generator rates.  extract_series
recovers the amplitudes below a cutoff by least squares on a mid-window of
the mode profiles; the leading data (radius and centroid of the end) sit in
the (0, mu_0) and (+-m, 1) slots.
"""

import bisect
import warnings
from dataclasses import dataclass, field

import numpy as np

from .endfield import mode_masses
from .errors import CutoffError, DegenerateEndError, RateCollisionWarning
from .ratefit import fit_decay_rate, fit_fixed_rates

_MERGE_TOL = 1e-9
_COLLISION_TOL = 1e-6


def _mukey(mu):
    return round(float(mu), 9)


@dataclass(frozen=True)
class IndexSemigroup:
    """Additive closure of the generator rates below a cutoff."""

    k: float
    m: int
    cutoff: float
    elements: tuple  # sorted tuple of (n, mu)

    def rates_for(self, n):
        return tuple(mu for nn, mu in self.elements if nn == n)

    def __contains__(self, pair):
        n, mu = pair
        return any(nn == n and abs(m2 - mu) < _COLLISION_TOL for nn, m2 in self.elements)


def build_semigroup(k, m, cutoff, max_elements=20000):
    """All (n, mu) with mu a sum of generator masses, mu < cutoff strictly."""
    if not 0.0 < k < 1.0:
        raise ValueError("k must lie strictly between 0 and 1")
    mu0 = np.sqrt(1.0 - k)
    eps = 1e-12
    if cutoff <= mu0 + eps:
        raise CutoffError(
            f"cutoff {cutoff:.6g} excludes the slowest rate {mu0:.6g}; nothing to expand"
        )
    nmax = int(np.floor(m * np.sqrt(max((cutoff**2 - (1.0 - k)) / k, 0.0)))) + 1
    gens = []
    for n in range(-nmax, nmax + 1):
        mu = float(mode_masses(k, abs(n) / m))
        if mu < cutoff - eps:
            gens.append((n, mu))

    store = {}  # n -> sorted list of mu

    def add(n, mu):
        lst = store.setdefault(n, [])
        i = bisect.bisect_left(lst, mu)
        for j in (i - 1, i):
            if 0 <= j < len(lst) and abs(lst[j] - mu) < _MERGE_TOL:
                return False
        lst.insert(i, mu)
        return True

    queue = []
    for n, mu in gens:
        if add(n, mu):
            queue.append((n, mu))
    count = len(queue)
    while queue:
        n1, mu1 = queue.pop()
        for n2, mu2 in gens:
            n, mu = n1 + n2, mu1 + mu2
            if mu < cutoff - eps and add(n, mu):
                count += 1
                if count > max_elements:
                    raise CutoffError(
                        f"semigroup exceeds {max_elements} elements below cutoff {cutoff}"
                    )
                queue.append((n, mu))

    elements = tuple(
        sorted(((n, mu) for n, lst in store.items() for mu in lst), key=lambda e: (e[1], e[0]))
    )
    return IndexSemigroup(k=k, m=m, cutoff=float(cutoff), elements=elements)


@dataclass
class ExtractionInfo:
    window: tuple = (0.0, 0.0)
    remainder_rates: dict = field(default_factory=dict)
    remainder_sups: dict = field(default_factory=dict)
    remainder_sup: float = 0.0
    residual_sup: float = 0.0


@dataclass
class AsymptoticSeries:
    """Finite sum of e^{i(n/m)x} e^{-mu y} terms with a remainder cutoff."""

    k: float
    m: int
    cutoff: float
    terms: dict  # (n, mukey) -> complex amplitude
    mu_min: float = None
    info: ExtractionInfo = None

    def __post_init__(self):
        if self.mu_min is None:
            self.mu_min = min((mu for _, mu in self.terms), default=np.sqrt(1.0 - self.k))

    def amplitude(self, n, mu):
        """Amplitude at (n, mu), tolerant lookup; 0 when absent."""
        key = (n, _mukey(mu))
        if key in self.terms:
            return self.terms[key]
        for (nn, m2), a in self.terms.items():
            if nn == n and abs(m2 - mu) < _COLLISION_TOL:
                return a
        return 0j

    def rows(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))

    def evaluate(self, x, y):
        """Real part of the term sum at points (x, y) (arrays broadcast)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for (n, mu), a in self.terms.items():
            out += a * np.exp(1j * (n / self.m) * x - mu * y)
        return np.real(out)

    def rotated(self, xi):
        """Series of the field x -> u(x + xi, y)."""
        terms = {
            (n, mu): a * np.exp(1j * (n / self.m) * xi)
            for (n, mu), a in self.terms.items()
        }
        return AsymptoticSeries(self.k, self.m, self.cutoff, terms, self.mu_min)

    def dilated(self, eta):
        """Series of the field y -> u(x, y + eta) (dilation by e^{-eta})."""
        terms = {
            (n, mu): a * np.exp(-mu * eta) for (n, mu), a in self.terms.items()
        }
        return AsymptoticSeries(self.k, self.m, self.cutoff, terms, self.mu_min)

    def translated(self, a, b):
        """Series after adding the horizontal translation profile."""
        terms = dict(self.terms)
        for n, inc in ((self.m, (a - 1j * b) / 2.0), (-self.m, (a + 1j * b) / 2.0)):
            key = (n, _mukey(1.0))
            terms[key] = terms.get(key, 0j) + inc
        return AsymptoticSeries(self.k, self.m, self.cutoff, terms, min(self.mu_min, 1.0))

    def d_dx(self):
        terms = {(n, mu): a * 1j * (n / self.m) for (n, mu), a in self.terms.items()}
        return AsymptoticSeries(self.k, self.m, self.cutoff, terms, self.mu_min)

    def d_dy(self):
        terms = {(n, mu): -mu * a for (n, mu), a in self.terms.items()}
        return AsymptoticSeries(self.k, self.m, self.cutoff, terms, self.mu_min)

    def __add__(self, other):
        if not isinstance(other, AsymptoticSeries):
            return NotImplemented
        if (self.k, self.m) != (other.k, other.m):
            raise ValueError("series live on different ends")
        terms = dict(self.terms)
        for key, a in other.terms.items():
            terms[key] = terms.get(key, 0j) + a
        return AsymptoticSeries(
            self.k, self.m, min(self.cutoff, other.cutoff), terms,
            min(self.mu_min, other.mu_min),
        )


def series_product(s1, s2, cutoff=None):
    """Term-by-term product with the correct reduced remainder cutoff.

    The product of two expansions with cutoffs w1, w2 and slowest terms
    mu1, mu2 is an expansion with cutoff min(w1+w2, w1+mu2, w2+mu1): cross
    terms of a series with the other remainder decay no better than that.
    """
    if (s1.k, s1.m) != (s2.k, s2.m):
        raise ValueError("series live on different ends")
    natural = min(s1.cutoff + s2.cutoff, s1.cutoff + s2.mu_min, s2.cutoff + s1.mu_min)
    if cutoff is None:
        cutoff = natural
    elif cutoff > natural + 1e-12:
        raise CutoffError(
            f"requested product cutoff {cutoff:.6g} exceeds the attainable {natural:.6g}"
        )
    terms = {}
    for (n1, mu1), a1 in s1.terms.items():
        for (n2, mu2), a2 in s2.terms.items():
            mu = mu1 + mu2
            if mu < cutoff - 1e-12:
                key = (n1 + n2, _mukey(mu))
                terms[key] = terms.get(key, 0j) + a1 * a2
    return AsymptoticSeries(s1.k, s1.m, float(cutoff), terms,
                            min(s1.mu_min + s2.mu_min, s1.mu_min, s2.mu_min))


def extract_series(end, cutoff=None, window=(0.5, 1.0), semigroup=None):
    """Fit the semigroup expansion of a solved end below the cutoff.

    window = (lo_frac, top_margin): the fit runs on lo_frac*Y <= y <= Y -
    top_margin.  Rates closer than 1e-6 merge into one column with a
    RateCollisionWarning.  Returns an AsymptoticSeries whose info field
    carries per-mode remainder decay rates measured after subtraction
    (+inf when the remainder sits at the roundoff floor).
    """
    k, m, Y = end.k, end.m, end.Y
    if cutoff is None:
        cutoff = np.sqrt(4.0 - 3.0 * k)
    if semigroup is None:
        semigroup = build_semigroup(k, m, cutoff)
    y = end.y
    lo = window[0] * Y if window[0] < Y else window[0]
    hi = Y - window[1]
    iw = (y >= lo - 1e-12) & (y <= hi + 1e-12)
    if int(iw.sum()) < 12:
        raise ValueError("fit window too small; widen it or raise Y")

    modes = end.mode_profiles()
    gscale = float(np.max(np.abs(modes))) or 1.0
    # Remainders below ~1e-9 of the field sit at the solver noise floor
    # (absolute tolerances near 1e-11 on fields of order 1e-2); rate fits
    # through that plateau would report meaningless slopes.
    floor = 1e-9 * gscale

    terms = {}
    info = ExtractionInfo(window=(float(lo), float(hi)))
    resid_sup = 0.0
    for n in range(modes.shape[0]):
        rates = sorted(semigroup.rates_for(n))
        merged = []
        for mu in rates:
            if merged and mu - merged[-1] < _COLLISION_TOL:
                warnings.warn(
                    f"rates {merged[-1]:.9f} and {mu:.9f} merged in mode {n}",
                    RateCollisionWarning,
                )
                continue
            merged.append(mu)
        rem = modes[n].copy()
        if merged:
            amps, _ = fit_fixed_rates(y[iw], modes[n][iw], merged)
            for mu, a in zip(merged, amps):
                terms[(n, _mukey(mu))] = complex(a)
                if n > 0:
                    terms[(-n, _mukey(mu))] = complex(np.conj(a))
                rem -= a * np.exp(-mu * y)
            resid_sup = max(resid_sup, float(np.max(np.abs(rem[iw]))))
        # post-subtraction decay rate on an adaptive window clear of both ends
        mask = (y >= min(1.0, 0.25 * Y)) & (y <= Y - 0.5)
        rate = fit_decay_rate(y[mask], rem[mask], floor=floor)
        info.remainder_rates[n] = rate
        sup_n = float(np.max(np.abs(rem[mask])))
        info.remainder_sups[n] = sup_n
        info.remainder_sup = max(info.remainder_sup, sup_n)
    info.residual_sup = resid_sup

    return AsymptoticSeries(k=k, m=m, cutoff=float(cutoff), terms=terms, info=info)


def radius_centroid(series):
    """(r, c): asymptotic radius (0, mu_0) amplitude and centroid from (m, 1).

    r must be a positive real number for a genuine end; c = 2 conj(a_{m,1})
    is the horizontal displacement of the end's center as a complex number.
    """
    mu0 = np.sqrt(1.0 - series.k)
    a0 = series.amplitude(0, mu0)
    if abs(a0.imag) > 1e-10 * max(abs(a0), 1e-300):
        raise DegenerateEndError(f"leading amplitude {a0} is not real")
    r = float(a0.real)
    if r <= 0.0:
        raise DegenerateEndError(f"asymptotic radius {r:.3e} is not positive")
    c = 2.0 * np.conj(series.amplitude(series.m, 1.0))
    return r, complex(c)


def centroid_free_check(series):
    """Coefficients of u + u_xx and u + u_y at the translation slots (+-m, 1).

    Both vanish identically (the multipliers 1 - lambda^2 and 1 - mu are
    exactly zero there), so the centroid never feeds back into W or T; the
    return value is the pair of absolute values, asserted exact by tests.
    """
    m = series.m
    vals = []
    for n in (m, -m):
        a = series.amplitude(n, 1.0)
        lam = n / m
        vals.append(abs(a * (1.0 - lam * lam)))
        vals.append(abs(a * (1.0 - 1.0)))
    return max(vals)


def centroid_integral(end, a=1.0, b=0.0, window=(0.25, 1.0)):
    """Weighted slice integrals recovering the centroid pairing <(a,b), c>.

    Returns (profile g(y) = e^y Int (a cos x + b sin x) u dx / (m pi),
    fitted limit).  g converges to a c_1 + b c_2 like e^{(1-sqrt(4-3k))y}.
    """
    m, Y = end.m, end.Y
    modes = end.mode_profiles()
    am = modes[m]
    g = np.exp(end.y) * 2.0 * (a * am.real - b * am.imag)
    y = end.y
    iw = (y >= window[0] * Y) & (y <= Y - window[1])
    from .ratefit import fit_exponential_limit

    limit, _, rate = fit_exponential_limit(y[iw], g[iw])
    return g, float(limit), float(rate)
