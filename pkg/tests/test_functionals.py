import numpy as np
import pytest

from ksurf.asymptotics import extract_series, radius_centroid
from ksurf.functionals import (
    energy_renormalized,
    flux_alpha,
    flux_conormal,
    flux_dnu,
    flux_normal_cumulative,
    kappa_profile,
    length_profile,
    volume_truncated,
)

MU0 = np.sqrt(0.5)


def test_conormal_flux_recovers_the_centroid_pairing(main_end):
    series = extract_series(main_end)
    _, c = radius_centroid(series)
    for a, b in ((1.0, 0.0), (0.6, -0.8)):
        prof = flux_conormal(main_end, a, b)
        want = -4.0 * np.pi * main_end.m * (a * c.real + b * c.imag)
        assert prof.limit == pytest.approx(want, abs=1e-4)
        assert np.isfinite(prof.rate) and prof.rate > 0.5


def test_conormal_flux_on_a_higher_winding_end(winding2_end):
    series = extract_series(winding2_end)
    _, c = radius_centroid(series)
    prof = flux_conormal(winding2_end, 1.0, 0.0)
    want = -4.0 * np.pi * winding2_end.m * c.real
    assert prof.limit == pytest.approx(want, abs=2e-4)


def test_orthogonal_killing_direction_reports_a_clean_zero(quick_end):
    # the boundary is pure cosine, so the b-direction integrand cancels to
    # quadrature roundoff; the guard reports limit 0 instead of fitting a
    # pseudo-rate through the noise envelope
    prof = flux_conormal(quick_end, 0.0, 1.0)
    assert prof.limit == 0.0
    assert np.isinf(prof.rate)
    assert prof.fit_residual < 1e-10


def test_companion_fluxes_decay(main_end):
    # the per-slice companions vanish in the limit; the cumulative normal
    # flux converges to a finite total, so only its approach rate is gated
    bar = np.sqrt(4.0 - 3.0 * main_end.k) - 1.0 - 0.05
    for flux in (flux_dnu, flux_alpha, flux_normal_cumulative):
        prof = flux(main_end, 1.0, 0.0)
        assert prof.rate >= bar
    assert abs(flux_dnu(main_end, 1.0, 0.0).limit) < 1e-6
    assert abs(flux_alpha(main_end, 1.0, 0.0).limit) < 1e-4


def test_energy_ladder_contracts_at_twice_the_leading_rate(main_end):
    ledger = energy_renormalized(main_end)
    assert np.isfinite(ledger.limit)
    assert ledger.tail_bound < 1e-4
    ratio = float(np.median(ledger.ratios))
    assert ratio == pytest.approx(np.exp(-2.0 * MU0), rel=1e-3)


def test_energy_origin_shift_moves_every_entry_by_the_slab_area(main_end):
    base = energy_renormalized(main_end)
    moved = energy_renormalized(main_end, origin=1.5)
    slab = 2.0 * np.pi * main_end.m * 1.5
    assert np.allclose(moved.energies - base.energies, slab, atol=1e-12)
    assert moved.limit - base.limit == pytest.approx(slab, abs=1e-12)


def test_truncated_volume_converges_in_the_same_rate_class(main_end):
    prof = volume_truncated(main_end)
    assert np.isfinite(prof.limit)
    assert prof.rate == pytest.approx(2.0 * MU0, rel=0.1)


def test_slice_curvature_and_length_match_the_leading_geometry(main_end):
    series = extract_series(main_end)
    r, _ = radius_centroid(series)
    j = int(np.argmin(np.abs(main_end.y - (main_end.Y - 2.0))))
    _, mean_kappa = kappa_profile(main_end, y=main_end.Y - 2.0)
    assert mean_kappa == pytest.approx(-MU0, abs=1e-3)
    length = length_profile(main_end)
    want = 2.0 * np.pi * main_end.m * r * np.exp(-MU0 * main_end.y[j])
    assert length[j] / want == pytest.approx(1.0, abs=1e-3)
