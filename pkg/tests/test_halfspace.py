import numpy as np
import pytest

from ksurf import halfspace as hs
from ksurf.errors import DomainError
from ksurf.steiner import INFINITY


def _random_points(rng, n):
    p = rng.uniform(-2.0, 2.0, size=(n, 3))
    p[:, 2] = rng.uniform(0.2, 3.0, size=n)
    return p


def test_distance_vertical_line_is_log_ratio():
    d = hs.hyp_distance([0.0, 0.0, 1.0], [0.0, 0.0, np.e])
    assert d == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "iso",
    [
        hs.rotation(0.7),
        hs.dilation(2.5),
        hs.translation(0.3, -1.2),
        hs.inversion(),
        hs.end_map(0.4 + 0.2j),
    ],
    ids=lambda iso: iso.kind,
)
def test_isometries_preserve_hyperbolic_distance(iso):
    rng = np.random.default_rng(11)
    p, q = _random_points(rng, 40), _random_points(rng, 40)
    before = hs.hyp_distance(p, q)
    after = hs.hyp_distance(iso(p), iso(q))
    assert np.max(np.abs(after - before)) < 1e-10


def test_differential_matches_finite_differences():
    rng = np.random.default_rng(3)
    p = _random_points(rng, 10)
    h = 1e-6
    for iso in (hs.rotation(0.3), hs.inversion(), hs.end_map(1.0 - 0.5j)):
        J = hs.differential(iso, p)
        for axis in range(3):
            e = np.zeros(3)
            e[axis] = h
            fd = (iso(p + e) - iso(p - e)) / (2.0 * h)
            assert np.max(np.abs(J[..., axis] - fd)) < 1e-7


def test_push_unit_tangent_preserves_the_metric_norm():
    rng = np.random.default_rng(12)
    p = _random_points(rng, 25)
    v = rng.standard_normal((25, 3))
    norm = np.linalg.norm(v, axis=-1) / p[:, 2]
    for iso in (hs.dilation(0.7), hs.inversion(), hs.end_map(0.2 + 0.9j)):
        out = hs.push_unit_tangent(iso, np.concatenate([p, v], axis=-1))
        qb, qv = out[:, :3], out[:, 3:]
        norm2 = np.linalg.norm(qv, axis=-1) / qb[:, 2]
        assert np.max(np.abs(norm2 - norm)) < 1e-10


def test_boundary_action_moebius_values():
    assert hs.boundary_action(hs.inversion(), INFINITY) == 0j
    assert hs.boundary_action(hs.translation(1.0, 2.0), INFINITY) is INFINITY
    z = hs.boundary_action(hs.end_map(0.5 + 0.5j), INFINITY)
    assert z == pytest.approx(0.5 + 0.5j)
    w = hs.boundary_action(hs.inversion(), 2.0 + 0.0j)
    assert w == pytest.approx(0.5 + 0.0j)


def test_dilation_rejects_nonpositive_factor():
    with pytest.raises(DomainError):
        hs.dilation(0.0)


def test_horofunction_level_sets_through_reference_point():
    # centered at infinity the horofunction is -log(height), zero at height 1
    p = np.array([0.3, -0.7, 1.0])
    assert hs.horofunction(INFINITY, p) == pytest.approx(0.0, abs=1e-12)
    q = np.array([0.3, -0.7, np.exp(2.0)])
    assert hs.horofunction(INFINITY, q) == pytest.approx(-2.0, abs=1e-12)


def test_primitive_exterior_derivative_is_the_volume_form():
    rng = np.random.default_rng(21)
    p = _random_points(rng, 5)
    for row in p:
        assert hs.volume_form_check(row) < 1e-6
        assert hs.primitive_difference_check(row) < 1e-6
