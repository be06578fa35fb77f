import numpy as np
import pytest

from ksurf.asymptotics import (
    AsymptoticSeries,
    build_semigroup,
    centroid_free_check,
    extract_series,
    radius_centroid,
    series_product,
)
from ksurf.endfield import EndFunction
from ksurf.errors import CutoffError, DegenerateEndError

MU0 = np.sqrt(0.5)


def _planted_series(k=0.5, m=1):
    cutoff = np.sqrt(4.0 - 3.0 * k)
    mu0 = np.sqrt(1.0 - k)
    terms = {
        (0, mu0): 0.3 + 0j,
        (1, 1.0): 0.1 + 0.05j,
        (-1, 1.0): 0.1 - 0.05j,
        (0, 2.0 * mu0): 0.02 + 0j,
    }
    return AsymptoticSeries(k=k, m=m, cutoff=float(cutoff), terms=terms)


def _field_of(series, Nx=64, Ny=769, Y=12.0):
    end = EndFunction(series.k, series.m, Y, np.zeros((Nx, Ny)))
    xg = end.x[:, None]
    yg = end.y[None, :]
    return end.with_field(series.evaluate(xg, yg))


def test_semigroup_slots_below_the_default_cutoff():
    sg = build_semigroup(0.5, 1, np.sqrt(2.5))
    els = sorted(sg.elements, key=lambda e: (e[1], e[0]))
    assert [n for n, _ in els] == [0, -1, 1, 0]
    assert np.allclose([mu for _, mu in els], [MU0, 1.0, 1.0, 2.0 * MU0])


def test_planted_amplitudes_are_recovered_exactly():
    planted = _planted_series()
    end = _field_of(planted)
    series = extract_series(end)
    for (n, mu), a in planted.terms.items():
        assert abs(series.amplitude(n, mu) - a) < 1e-10
    assert series.info.remainder_sup < 1e-10


def test_radius_and_centroid_read_off_the_leading_slots():
    series = _planted_series()
    r, c = radius_centroid(series)
    assert r == pytest.approx(0.3, abs=1e-14)
    assert c == pytest.approx(2.0 * np.conj(0.1 + 0.05j), abs=1e-14)


def test_radius_centroid_rejects_degenerate_leading_amplitude():
    series = _planted_series()
    series.terms[(0, MU0)] = 0.0 + 0j
    with pytest.raises(DegenerateEndError):
        radius_centroid(series)


def test_series_transformations_act_on_the_evaluated_field():
    series = _planted_series()
    x = np.linspace(0.0, 2.0 * np.pi, 9)[:-1]
    y = np.linspace(2.0, 5.0, 7)
    xg, yg = np.meshgrid(x, y, indexing="ij")
    assert np.allclose(
        series.rotated(0.7).evaluate(xg, yg), series.evaluate(xg + 0.7, yg),
        atol=1e-14,
    )
    assert np.allclose(
        series.dilated(0.4).evaluate(xg, yg), series.evaluate(xg, yg + 0.4),
        atol=1e-14,
    )
    h = 1e-6
    assert np.allclose(
        series.d_dx().evaluate(xg, yg),
        (series.evaluate(xg + h, yg) - series.evaluate(xg - h, yg)) / (2 * h),
        atol=1e-8,
    )
    assert np.allclose(
        series.d_dy().evaluate(xg, yg),
        (series.evaluate(xg, yg + h) - series.evaluate(xg, yg - h)) / (2 * h),
        atol=1e-8,
    )


def test_translation_moves_the_centroid_by_the_displacement():
    series = _planted_series()
    _, c = radius_centroid(series)
    _, c2 = radius_centroid(series.translated(0.3, -0.2))
    assert c2 - c == pytest.approx(0.3 - 0.2j, abs=1e-14)


def test_product_convolves_terms_and_reduces_the_cutoff():
    k, m = 0.5, 1
    s1 = AsymptoticSeries(k, m, 2.0, {(0, 0.6): 2.0 + 0j})
    s2 = AsymptoticSeries(k, m, 2.0, {(1, 0.7): 1.0 + 1.0j})
    prod = series_product(s1, s2)
    assert prod.cutoff == pytest.approx(2.6)  # min(4.0, 2.0+0.7, 2.0+0.6)
    assert prod.amplitude(1, 1.3) == pytest.approx(2.0 + 2.0j)
    with pytest.raises(CutoffError):
        series_product(s1, s2, cutoff=3.5)


def test_solved_end_has_no_even_length_content(main_end):
    # the curvature residual is odd in the jet, so the semigroup slot at
    # twice the leading rate carries no amplitude (a genuine quadratic term
    # would sit near 1e-3 of the radius; the fit noise floor is ~1e-7 of it)
    # and the translation slots drop out of the immersion density and slope
    series = extract_series(main_end)
    r, _ = radius_centroid(series)
    assert abs(series.amplitude(0, 2.0 * MU0)) < 1e-6 * r
    assert centroid_free_check(series) < 1e-20


def test_mode_zero_remainder_decays_at_the_cubic_rate(main_end):
    series = extract_series(main_end)
    rate = series.info.remainder_rates[0]
    assert rate == pytest.approx(3.0 * MU0, rel=0.05)
