"""Quantitative acceptance gates for the whole library.

Every numbered criterion is a self-contained check with explicit numeric
bars, runnable through run_criteria() (the CLI selftest) or one by one from
the test suite.  Fixtures (solved ends, Green configurations, series fits)
are built lazily and shared through a FixtureCache so a full run stays
within a desk-scale time budget.

Criterion 11 carries expected_fail: the renormalised-energy integrand
H dArea - dx dy = (2TW + C^2 P^2 - C^2 Q W) dx dy is exactly quadratic in
the 2-jet, so the truncation ladder contracts at e^{-2 sqrt(1-k)} per unit
height.  The gate's target ratio e^{-sqrt(1-k)} is kept for the record; the
check reports the measured contraction next to both candidates instead of
silently moving the bar.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import functionals, steiner
from .asymptotics import extract_series, radius_centroid
from .darboux import (
    JetState,
    brioschi_curvature,
    contact_pullback_check,
    curvature_pack,
    darboux_chart,
    frame_identities,
    immerse,
    pushforwards,
)
from .endfield import jet_state
from .endsolver import (
    boundary_samples,
    default_height,
    jacobi_identity_residual,
    jacobi_operator,
    make_nonlinearity,
    newton_solve,
    ode_radial_solve,
    residual_field,
)
from .errors import ConstraintError
from .greens import GreenConfig, green1d_dirichlet, picard_solve
from .gridops import _banded_derivative
from .halfspace import dilation, push_unit_tangent, rotation
from .ratefit import fit_decay_rate


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: list = field(default_factory=list)
    expected_fail: bool = False

    def __post_init__(self):
        # comparisons against array scalars leave numpy bools behind; keep
        # the record plain so it serializes anywhere
        self.passed = bool(self.passed)

    def line(self):
        if self.passed:
            mark = "PASS"
        elif self.expected_fail:
            mark = "FAIL (documented)"
        else:
            mark = "FAIL"
        return f"criterion {self.number:2d} [{mark}] {self.title}"

    def report(self):
        return "\n".join([self.line()] + ["    " + d for d in self.details])


def _fmt(x):
    return f"{x:.6g}" if np.isfinite(x) else "inf"


# ---------------------------------------------------------------------------
# fixtures

MAIN_BOUNDARY = {"cos": (0.05, 0.02), "sin": ()}

# small-amplitude fixtures shared by the Newton/Picard comparison and the
# decay-rate checks; sups sit inside the Picard contraction bound 0.05(1-k)
SMALL_BOUNDARY = {
    0.3: {"cos": (0.02, 0.008), "sin": ()},
    0.5: {"cos": (0.015, 0.006), "sin": (0.0, 0.004)},
    0.75: {"cos": (0.008, 0.003), "sin": ()},
}


class FixtureCache:
    """Lazily solved ends and fits shared across criteria.

    fault="constant-bias" perturbs the constant jets of criterion 1 by 1e-6,
    a deliberate wrong answer used to demonstrate that the gate can go red.
    """

    def __init__(self, fault=None):
        if fault not in (None, "constant-bias"):
            raise ValueError(f"unknown fault {fault!r}")
        self.fault = fault
        self._store = {}

    def _get(self, key, build):
        if key not in self._store:
            self._store[key] = build()
        return self._store[key]

    def main(self):
        def build():
            v = boundary_samples(1, 128, **MAIN_BOUNDARY)
            return newton_solve(0.5, v)

        return self._get("main", build)

    def main_series(self):
        return self._get("main-series", lambda: extract_series(self.main()[0]))

    def fine(self):
        def build():
            end, _ = self.main()
            v = boundary_samples(1, 128, **MAIN_BOUNDARY)
            # the doubled grid hits its curvature-evaluation roundoff floor
            # near 2e-11, so the tolerance stays a factor above it
            return newton_solve(0.5, v, Ny=2 * (end.Ny - 1) + 1, tol=1e-10)

        return self._get("fine", build)

    def radial_newton(self):
        def build():
            return newton_solve(0.5, boundary_samples(1, 128, cos=(0.05,)))

        return self._get("radial-newton", build)

    def radial_profile(self):
        def build():
            end, _ = self.radial_newton()
            return ode_radial_solve(0.5, 0.05, Y=end.Y, y_eval=end.y)

        return self._get("radial-profile", build)

    def newton_small(self, k):
        def build():
            v = boundary_samples(1, 128, **SMALL_BOUNDARY[k])
            return newton_solve(k, v)

        return self._get(("newton", k), build)

    def picard_small(self, k):
        def build():
            end, _ = self.newton_small(k)
            cfg = GreenConfig(
                a=math.sqrt(1.0 - k), m=1, Y=end.Y, Nx=end.Nx, Ny=end.Ny, kx=k
            )
            v = boundary_samples(1, 128, **SMALL_BOUNDARY[k])
            return picard_solve(cfg, v, make_nonlinearity(k))

        return self._get(("picard", k), build)

    def small_series(self, k):
        return self._get(
            ("series", k), lambda: extract_series(self.newton_small(k)[0])
        )


# ---------------------------------------------------------------------------
# criteria


def _criterion_1(cache):
    bias = 1e-6 if cache.fault == "constant-bias" else 0.0
    worst = 0.0
    for c in (0.25, 0.5, 1.0, 2.0, 4.0):
        zero = np.zeros(())
        jet = JetState(
            x=zero, y=zero, u=np.asarray(c + bias),
            ux=zero, uy=zero, uxx=zero, uxy=zero, uyy=zero,
        )
        pack = curvature_pack(jet)
        target = (1.0 + 2.0 * c * c) / (c * math.sqrt(1.0 + c * c))
        r = math.asinh(c)
        th, cth = math.tanh(r), 1.0 / math.tanh(r)
        worst = max(
            worst,
            abs(float(pack.extrinsic) - 1.0),
            abs(float(pack.mean) - target),
            abs(th * cth - 1.0),
            abs(th + cth - target),
        )
    details = [f"sup deviation over c in {{0.25,0.5,1,2,4}}: {_fmt(worst)} (bound 1e-12)"]
    if bias:
        details.append(f"fault injection active: constant jets biased by {bias:g}")
    return CriterionResult(1, "constant ends: K = 1 and the closed-form mean curvature",
                           worst < 1e-12, details)


def _criterion_2(cache):
    y = np.linspace(0.0, 20.0, 2561)
    h = y[1] - y[0]
    worst = 0.0
    details = []
    for a, om in ((1.0, 2.0), (1.0, 3.0), (0.5, 1.5)):
        g = green1d_dirichlet(a, np.exp(-om * y), h)
        closed = (np.exp(-om * y) - np.exp(-a * y)) / (om * om - a * a)
        err = float(np.max(np.abs(g - closed)))
        worst = max(worst, err)
        details.append(f"(a, omega) = ({a:g}, {om:g}): sup error {_fmt(err)}")
    details.append("bound 1e-9")
    return CriterionResult(2, "half-line Green operator matches the two-exponential closed form",
                           worst < 1e-9, details)


def _criterion_3(cache):
    import warnings

    from .errors import TailTruncationWarning

    rng = np.random.default_rng(43)
    n = 2049
    y = np.linspace(0.0, 16.0, n)
    h = y[1] - y[0]
    d2 = _banded_derivative(n, h, 2)
    worst = 0.0
    with warnings.catch_warnings():
        # oscillatory inputs defeat the tail-rate fit at the top; the dropped
        # tail is part of the measured error and stays under the bar
        warnings.simplefilter("ignore", TailTruncationWarning)
        for _ in range(20):
            a = rng.uniform(0.5, 2.0)
            f = np.zeros(n)
            for _ in range(3):
                amp = rng.uniform(0.2, 1.0) * rng.choice([-1.0, 1.0])
                rate = rng.uniform(0.3, 2.2)
                osc = rng.uniform(0.0, 2.0)
                phase = rng.uniform(0.0, 2.0 * np.pi)
                f += amp * np.exp(-rate * y) * np.cos(osc * y + phase)
            g = green1d_dirichlet(a, f, h)
            lg = d2 @ g - a * a * g
            rel = float(np.max(np.abs(lg - f)[2:-2])) / float(np.max(np.abs(f)))
            worst = max(worst, rel)
    details = [f"sup relative error over 20 random inputs: {_fmt(worst)} (bound 1e-7)"]
    return CriterionResult(3, "the vertical operator inverts its Green operator",
                           worst < 1e-7, details)


def _criterion_4(cache):
    end, rep = cache.main()
    interior = float(np.max(np.abs(residual_field(end)[:, 1:-1])))
    prof = cache.radial_profile()
    rend, _ = cache.radial_newton()
    diff = float(np.max(np.abs(rend.u - prof.u[None, :])))
    ok = rep.converged and rep.iterations <= 8 and interior < 1e-10 and diff < 1e-8
    details = [
        f"Newton iterations: {rep.iterations} (bound 8)",
        f"interior |K - k| sup: {_fmt(interior)} (bound 1e-10)",
        f"radial solve vs shooting oracle: {_fmt(diff)} (bound 1e-8)",
    ]
    return CriterionResult(4, "Newton budget on the reference boundary data; radial oracle",
                           ok, details)


def _criterion_5(cache):
    worst = 0.0
    details = []
    for k in (0.3, 0.5, 0.75):
        nend, _ = cache.newton_small(k)
        up, prep = cache.picard_small(k)
        diff = float(np.max(np.abs(nend.u - up)))
        worst = max(worst, diff)
        details.append(
            f"k = {k:g}: sup difference {_fmt(diff)} (Picard iterations {prep.iterations})"
        )
    details.append("bound 1e-7")
    return CriterionResult(5, "Newton and Green-Picard solutions agree",
                           worst < 1e-7, details)


def _criterion_6(cache):
    ok = True
    details = []
    cases = [(0.5, cache.main()[0], cache.main_series())]
    cases += [(k, cache.newton_small(k)[0], cache.small_series(k)) for k in (0.3, 0.75)]
    for k, end, series in cases:
        mu0 = math.sqrt(1.0 - k)
        bar = math.sqrt(4.0 - 3.0 * k) - 0.05
        y, Y = end.y, end.Y
        win = (y >= 0.3 * Y) & (y <= Y - 1.0)
        modes = np.abs(end.mode_profiles())
        floor = max(1e-11, 1e-9 * float(np.max(modes)))
        r0 = fit_decay_rate(y[win], modes[0][win], floor=floor)
        r1 = fit_decay_rate(y[win], modes[1][win], floor=floor)
        rates = [r for r in series.info.remainder_rates.values() if np.isfinite(r)]
        rem = min(rates) if rates else float("inf")
        case_ok = (
            abs(r0 / mu0 - 1.0) < 0.01 and abs(r1 - 1.0) < 0.01 and rem >= bar
        )
        ok = ok and case_ok
        details.append(
            f"k = {k:g}: mode-0 rate {r0:.6f} (target {mu0:.6f}), "
            f"mode-1 rate {r1:.6f} (target 1), remainder exponent {_fmt(rem)} "
            f"(bar {bar:.4f})"
        )
    return CriterionResult(6, "mode decay rates and post-subtraction remainder exponent",
                           ok, details)


def _criterion_7(cache):
    end, _ = cache.main()
    series = cache.main_series()
    _, c = radius_centroid(series)
    bar = math.sqrt(4.0 - 3.0 * end.k) - 1.0 - 0.05
    rng = np.random.default_rng(7)
    ok = True
    details = []
    for _ in range(5):
        a, b = rng.uniform(-1.0, 1.0, 2)
        prof = functionals.flux_conormal(end, a, b)
        target = -4.0 * np.pi * end.m * (a * c.real + b * c.imag)
        err = abs(prof.limit - target)
        ok = ok and err < 1e-4 and prof.rate >= bar
        details.append(
            f"(a, b) = ({a:+.3f}, {b:+.3f}): limit error {_fmt(err)}, "
            f"rate {_fmt(prof.rate)}"
        )
    for name, fn in (
        ("normal-derivative flux", functionals.flux_dnu),
        ("area-form flux", functionals.flux_alpha),
        ("cumulative normal flux", functionals.flux_normal_cumulative),
    ):
        sub = []
        for a, b in ((1.0, 0.0), (0.0, 1.0)):
            prof = fn(end, a, b)
            ok = ok and prof.rate >= bar
            sub.append(f"rate {_fmt(prof.rate)}")
        details.append(f"{name}: " + ", ".join(sub))
    details.append(f"limit bound 1e-4, exponent bar {bar:.4f}")
    return CriterionResult(7, "conormal flux recovers the centroid pairing; companion decays",
                           ok, details)


def _criterion_8(cache):
    end, _ = cache.main()
    series = cache.main_series()
    r, _ = radius_centroid(series)
    mu0 = math.sqrt(1.0 - end.k)
    yq = end.Y - 2.0
    _, kmean = functionals.kappa_profile(end, yq)
    kerr = abs(float(kmean) + mu0)
    L = float(functionals.length_profile(end, yq))
    lerr = abs(L / (2.0 * np.pi * end.m * r * math.exp(-mu0 * yq)) - 1.0)
    details = [
        f"slice curvature mean + sqrt(1-k): {_fmt(kerr)} (bound 1e-3)",
        f"length over 2 pi m r e^(-sqrt(1-k) y), minus 1: {_fmt(lerr)} (bound 1e-3)",
    ]
    return CriterionResult(8, "slice curvature and slice length match the asymptotic radius",
                           kerr < 1e-3 and lerr < 1e-3, details)


def _brioschi_error(end):
    grid = end.grid
    pack = curvature_pack(end.jet())
    g = pack.first_form
    kin = brioschi_curvature(g[..., 0, 0], g[..., 0, 1], g[..., 1, 1],
                             grid.dx, grid.dy)
    return float(np.max(np.abs(kin - (end.k - 1.0))))


def _criterion_9(cache):
    end, _ = cache.main()
    fend, _ = cache.fine()
    e1 = _brioschi_error(end)
    e2 = _brioschi_error(fend)
    order = math.log2(e1 / e2) if e2 > 0 else float("inf")
    ok = e1 < 1e-5 and order >= 1.9
    details = [
        f"sup |Brioschi - (k-1)|: {_fmt(e1)} at base grid (bound 1e-5)",
        f"{_fmt(e2)} at doubled vertical resolution: observed order {order:.2f} "
        f"(at least 2 required)",
    ]
    return CriterionResult(9, "Brioschi curvature of the first form equals k - 1",
                           ok, details)


def _criterion_10(cache):
    worst_rel = 0.0
    worst_pt = 0.0
    ok = True
    details = []

    def closed_points(data, kind, n, m0=1, m1=1):
        # family closed forms for the ring extremities; origin ends map to the
        # point at infinity and are checked by type
        out = []
        for e in data.ends:
            if e.z == 0:
                out.append(None)
            elif kind == "I":
                out.append(-e.z)
            elif kind == "II":
                out.append((1.0 - n) / (1.0 + n) * e.z)
            else:
                out.append((m0 - n * m1) / (m0 + n * m1) * e.z)
        return out

    def run_case(label, data, kind, n, m0=1, m1=1):
        nonlocal worst_rel, worst_pt, ok
        rep = steiner.check_relations(data, tol=1e-14)
        worst_rel = max(worst_rel, rep.balance, rep.pairing, rep.reflection)
        ok = ok and rep.passed
        for e, target in zip(data.ends, closed_points(data, kind, n, m0, m1)):
            if target is None:
                ok = ok and e.zeta is steiner.INFINITY
                continue
            pt = steiner.steiner_point(e.z, e.c)
            gap = max(abs(e.zeta - target), abs(pt - target))
            worst_pt = max(worst_pt, gap)
            ok = ok and gap < 5e-16 * (1.0 + abs(target))

    for n in range(3, 9):
        run_case(f"I n={n}", steiner.symmetric_examples("I", n), "I", n)
        run_case(f"II n={n}", steiner.symmetric_examples("II", n), "II", n)
    for n, m0, m1 in ((2, 2, 4), (3, 2, 2)):
        data = steiner.symmetric_examples("III", n, m0, m1)
        run_case(f"III ({n},{m0},{m1})", data, "III", n, m0, m1)
    # (5,5,5) fails the closing constraint 1/m0 + n/m1 in Z; the relations are
    # algebraic in the data and hold anyway once the constructor is forced
    try:
        steiner.symmetric_examples("III", 5, 5, 5)
        ok = False
        details.append("(5,5,5) unexpectedly admissible")
    except ConstraintError:
        pass
    data = steiner.symmetric_examples("III", 5, 5, 5, require_admissible=False)
    run_case("III (5,5,5) forced", data, "III", 5, 5, 5)

    details += [
        f"sup relation residual over all families: {_fmt(worst_rel)} (bound 1e-14)",
        f"sup distance to the closed-form Steiner points: {_fmt(worst_pt)}",
        "(5,5,5) rejected by the closing constraint, relations hold when forced",
    ]
    return CriterionResult(10, "Steiner relations and closed-form Steiner points",
                           ok, details)


def _criterion_11(cache):
    end, _ = cache.main()
    mu0 = math.sqrt(1.0 - end.k)
    led = functionals.energy_renormalized(end)
    target = math.exp(-mu0)
    ratio_err = float(np.max(np.abs(np.array(led.ratios) / target - 1.0)))
    energy_ok = ratio_err <= 0.10
    med = float(np.median(led.ratios))
    en_rate = -math.log(med)
    vol = functionals.volume_truncated(end)
    vol_ok = abs(vol.rate - en_rate) / en_rate <= 0.15
    details = [
        f"measured ladder ratio {med:.6f}; gate target e^-sqrt(1-k) = {target:.6f} "
        f"(max deviation {ratio_err:.1%}, allowed 10%)",
        f"the measured ratio matches e^-2sqrt(1-k) = {math.exp(-2 * mu0):.6f}: the "
        "energy integrand 2TW + C^2P^2 - C^2QW is quadratic in the jet, so the "
        "single-rate target is not attainable",
        f"volume clause: truncation rate {vol.rate:.4f} vs energy rate {en_rate:.4f} "
        f"(same class within 15%: {'yes' if vol_ok else 'no'})",
    ]
    return CriterionResult(11, "renormalised energy ladder ratio; volume rate class",
                           energy_ok and vol_ok, details, expected_fail=True)


def _criterion_12(cache):
    end, _ = cache.main()
    grid = end.grid
    xg = end.x[:, None]
    yg = end.y[None, :]
    w = (
        np.cos(xg) * np.exp(-1.1 * yg)
        + 0.3 * np.sin(2.0 * xg) * np.exp(-1.6 * yg)
        + 0.4 * np.exp(-0.8 * yg)
    )

    def kgrid(u):
        return curvature_pack(jet_state(grid, u), strict=False).extrinsic

    def diff(eps):
        return (kgrid(end.u + eps * w) - kgrid(end.u - eps * w)) / (2.0 * eps)

    eps = 1e-3
    rich = (4.0 * diff(eps / 2.0) - diff(eps)) / 3.0
    jcw = end.k * jacobi_operator(end, end.jet().C * w)
    sl = np.s_[:, 8:-8]
    rel = float(np.max(np.abs(rich - jcw)[sl])) / float(np.max(np.abs(rich[sl])))
    ident = jacobi_identity_residual(end, w / float(np.max(np.abs(w))))
    details = [
        f"k J(C w) vs Richardson-differenced K: relative sup {_fmt(rel)} (bound 1e-6)",
        f"conformal identity residual: {_fmt(ident)} (bound 1e-5)",
    ]
    return CriterionResult(12, "Jacobi operator matches differenced curvature; conformal identity",
                           rel < 1e-6 and ident < 1e-5, details)


def _criterion_13(cache):
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(100):
        z = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
        while True:
            rr = rng.uniform(0.3, 2.0)
            th = rng.uniform(0.0, 2.0 * np.pi)
            w = rr * np.exp(1j * th)
            if abs(z - w) > 0.1:
                break
        worst = max(worst, steiner.symplectic_check(z, w))
    details = [f"sup pullback residual over 100 points: {_fmt(worst)} (bound 1e-8)"]
    return CriterionResult(13, "Steiner transform symplectic pullback",
                           worst < 1e-8, details)


def _criterion_14(cache):
    rng = np.random.default_rng(14)
    nsamp = 1000

    worst_contact = 0.0
    worst_equiv = 0.0
    for _ in range(nsamp):
        q = np.array([
            rng.uniform(0.0, 2.0 * np.pi),
            rng.uniform(-1.5, 1.5),
            rng.uniform(-0.8, 0.8),
            rng.uniform(-0.8, 0.8),
            rng.uniform(-0.8, 0.8),
        ])
        worst_contact = max(worst_contact, contact_pullback_check(q))
        xi = rng.uniform(0.0, 2.0 * np.pi)
        eta = rng.uniform(-1.0, 1.0)
        lhs = darboux_chart(q + np.array([xi, eta, 0.0, 0.0, 0.0]))
        rhs = push_unit_tangent(dilation(math.exp(eta)),
                                push_unit_tangent(rotation(xi), darboux_chart(q)))
        worst_equiv = max(worst_equiv, float(np.max(np.abs(lhs - rhs))))

    # frame and position identities on vectorized random jets
    jet = JetState(
        x=rng.uniform(0.0, 2.0 * np.pi, nsamp),
        y=rng.uniform(-1.0, 1.0, nsamp),
        u=rng.uniform(0.2, 1.0, nsamp),
        ux=rng.uniform(-0.5, 0.5, nsamp),
        uy=rng.uniform(-0.5, 0.5, nsamp),
        uxx=rng.uniform(-0.5, 0.5, nsamp),
        uxy=rng.uniform(-0.5, 0.5, nsamp),
        uyy=rng.uniform(-0.5, 0.5, nsamp),
    )
    fp = immerse(jet)
    z = fp.position[..., 2]

    def g(a, b):
        return (a * b).sum(axis=-1) / (z * z)

    frames = (fp.normal, fp.conormal, fp.tangent)
    worst_frame = 0.0
    for i, a in enumerate(frames):
        for j, b in enumerate(frames):
            worst_frame = max(worst_frame,
                              float(np.max(np.abs(g(a, b) - (1.0 if i == j else 0.0)))))

    ex, ey = pushforwards(jet)
    pack = curvature_pack(jet, strict=False)
    ff = pack.first_form
    worst_inner = max(
        float(np.max(np.abs(g(ex, ex) - ff[..., 0, 0]))),
        float(np.max(np.abs(g(ex, ey) - ff[..., 0, 1]))),
        float(np.max(np.abs(g(ey, ey) - ff[..., 1, 1]))),
        float(np.max(np.abs(g(ex, fp.normal)))),
        float(np.max(np.abs(g(ey, fp.normal)))),
    )
    nums = frame_identities(jet)
    closed = (
        1.0 + jet.u ** 2 + jet.ux ** 2,
        -jet.C * jet.uy,
        jet.C + jet.S * jet.u,
        -jet.ux,
    )
    worst_pos = max(
        float(np.max(np.abs(nu - cl))) for nu, cl in zip(nums, closed)
    )

    worst = max(worst_contact, worst_equiv, worst_frame, worst_inner, worst_pos)
    details = [
        f"contact pullback vs closed form: {_fmt(worst_contact)}",
        f"chart equivariance under rotation/dilation: {_fmt(worst_equiv)}",
        f"frame orthonormality: {_fmt(worst_frame)}",
        f"first-form and normal pairings: {_fmt(worst_inner)}",
        f"position-field pairings: {_fmt(worst_pos)}",
        "bound 1e-10 at 1000 samples each",
    ]
    return CriterionResult(14, "contact form, chart equivariance, frame and position identities",
                           worst < 1e-10, details)


CRITERIA = {
    1: _criterion_1,
    2: _criterion_2,
    3: _criterion_3,
    4: _criterion_4,
    5: _criterion_5,
    6: _criterion_6,
    7: _criterion_7,
    8: _criterion_8,
    9: _criterion_9,
    10: _criterion_10,
    11: _criterion_11,
    12: _criterion_12,
    13: _criterion_13,
    14: _criterion_14,
}


def run_criterion(number, cache=None):
    if number not in CRITERIA:
        raise KeyError(f"no criterion {number}")
    return CRITERIA[number](cache or FixtureCache())


def run_criteria(numbers=None, cache=None, fault=None):
    """Run the requested criteria (all by default) and return their results."""
    if cache is None:
        cache = FixtureCache(fault=fault)
    results = []
    for n in sorted(numbers or CRITERIA):
        results.append(CRITERIA[n](cache))
    return results


def summarize(results):
    """Overall verdict: (exit_ok, lines).  Documented failures do not flip
    the verdict, but a documented failure that unexpectedly passes does."""
    lines = [r.line() for r in results]
    unexpected = [
        r for r in results
        if (not r.passed and not r.expected_fail) or (r.passed and r.expected_fail)
    ]
    npass = sum(r.passed for r in results)
    nknown = sum((not r.passed) and r.expected_fail for r in results)
    lines.append(
        f"{npass}/{len(results)} passed, {nknown} documented failure(s), "
        f"{len(unexpected)} unexpected"
    )
    return (not unexpected), lines
