import numpy as np
import pytest

from ksurf import darboux
from ksurf.darboux import (
    JetState,
    brioschi_curvature,
    curvature_cleared,
    curvature_jet_gradient,
    curvature_pack,
    frame_identities,
    immerse,
    shape_operator_fd_check,
)
from ksurf.errors import DegenerateImmersionError


def _random_jet(rng, n):
    return JetState(
        x=rng.uniform(0.0, 2.0 * np.pi, n),
        y=rng.uniform(-1.0, 1.0, n),
        u=rng.uniform(0.2, 1.0, n),
        ux=rng.uniform(-0.4, 0.4, n),
        uy=rng.uniform(-0.4, 0.4, n),
        uxx=rng.uniform(-0.15, 0.15, n),
        uxy=rng.uniform(-0.4, 0.4, n),
        uyy=rng.uniform(-0.4, 0.4, n),
    )


def _constant_jet(c):
    zero = np.zeros(1)
    return JetState(x=zero, y=zero, u=np.full(1, c), ux=zero, uy=zero,
                    uxx=zero, uxy=zero, uyy=zero)


@pytest.mark.parametrize("c", [0.25, 0.5, 1.0, 2.0, 4.0])
def test_constant_jets_have_unit_extrinsic_curvature(c):
    pack = curvature_pack(_constant_jet(c))
    assert pack.extrinsic[0] == pytest.approx(1.0, abs=1e-13)
    h_exact = (1.0 + 2.0 * c * c) / (c * np.sqrt(1.0 + c * c))
    assert pack.mean[0] == pytest.approx(h_exact, abs=1e-13)
    assert pack.area_density[0] == pytest.approx(c * np.sqrt(1.0 + c * c), abs=1e-13)


def test_vanishing_immersion_density_is_rejected():
    jet = _constant_jet(0.5)
    jet.uxx = np.full(1, -0.5)
    with pytest.raises(DegenerateImmersionError):
        curvature_pack(jet)


def test_contact_pullback_matches_closed_form():
    rng = np.random.default_rng(2)
    for _ in range(50):
        q = np.array([
            rng.uniform(0.0, 2.0 * np.pi),
            rng.uniform(-1.5, 1.5),
            rng.uniform(-0.8, 0.8),
            rng.uniform(-0.8, 0.8),
            rng.uniform(-0.8, 0.8),
        ])
        assert darboux.contact_pullback_check(q) < 1e-10


def test_frame_is_orthonormal_and_identities_hold():
    rng = np.random.default_rng(8)
    jet = _random_jet(rng, 200)
    fp = immerse(jet)
    z = fp.position[..., 2]

    def g(a, b):
        return (a * b).sum(axis=-1) / (z * z)

    for i, a in enumerate((fp.normal, fp.conormal, fp.tangent)):
        for j, b in enumerate((fp.normal, fp.conormal, fp.tangent)):
            want = 1.0 if i == j else 0.0
            assert np.max(np.abs(g(a, b) - want)) < 1e-12

    pos2, pos_n, pos_nu, pos_t = frame_identities(jet)
    assert np.max(np.abs(pos2 - (1.0 + jet.u**2 + jet.ux**2))) < 1e-12
    assert np.max(np.abs(pos_n - (-jet.C * jet.uy))) < 1e-12
    assert np.max(np.abs(pos_nu - (jet.C + jet.S * jet.u))) < 1e-12
    assert np.max(np.abs(pos_t - (-jet.ux))) < 1e-12


def test_shape_operator_matches_frame_derivatives():
    def jet_of(x, y):
        u = 0.6 + 0.1 * np.cos(x) * np.exp(-0.3 * y)
        return JetState(
            x=np.asarray(x), y=np.asarray(y), u=u,
            ux=-0.1 * np.sin(x) * np.exp(-0.3 * y),
            uy=-0.3 * (u - 0.6),
            uxx=-0.1 * np.cos(x) * np.exp(-0.3 * y),
            uxy=0.03 * np.sin(x) * np.exp(-0.3 * y),
            uyy=0.09 * (u - 0.6),
        )

    for x, y in ((0.4, 0.2), (2.1, 1.0), (5.0, 0.5)):
        assert shape_operator_fd_check(jet_of, x, y) < 1e-6


def test_curvature_jet_gradient_matches_finite_differences():
    rng = np.random.default_rng(17)
    jet = _random_jet(rng, 30)
    grads = curvature_jet_gradient(jet)
    slots = ("u", "ux", "uy", "uxx", "uxy", "uyy")
    h = 1e-6
    for name in slots:
        bumped = {s: getattr(jet, s).copy() for s in slots}
        bumped[name] = bumped[name] + h
        plus = curvature_pack(JetState(x=jet.x, y=jet.y, **bumped)).extrinsic
        bumped[name] = bumped[name] - 2.0 * h
        minus = curvature_pack(JetState(x=jet.x, y=jet.y, **bumped)).extrinsic
        fd = (plus - minus) / (2.0 * h)
        assert np.max(np.abs(grads[name] - fd)) < 1e-7


def test_cleared_residual_is_odd_in_the_jet():
    rng = np.random.default_rng(4)
    jet = _random_jet(rng, 100)
    k = 0.35
    flipped = JetState(x=jet.x, y=jet.y, u=-jet.u, ux=-jet.ux, uy=-jet.uy,
                       uxx=-jet.uxx, uxy=-jet.uxy, uyy=-jet.uyy)
    r = curvature_cleared(jet, k)
    r_flip = curvature_cleared(flipped, k)
    assert np.max(np.abs(r_flip + r)) < 1e-12


def test_brioschi_curvature_reports_gauss_equation_on_a_solved_end(quick_end):
    jet = quick_end.jet()
    pack = curvature_pack(jet)
    grid = quick_end.grid
    kint = brioschi_curvature(
        pack.first_form[..., 0, 0],
        pack.first_form[..., 0, 1],
        pack.first_form[..., 1, 1],
        grid.dx,
        grid.dy,
    )
    sl = np.s_[:, 8:-8]
    gap = np.max(np.abs(kint[sl] - (quick_end.k - 1.0)))
    assert gap < 2e-4
