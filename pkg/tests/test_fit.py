import io
import json
import math

import numpy as np
import pytest

from sagnac_parity import (
    FitConvergenceError,
    FitResult,
    FringeModel,
    ImperfectionProfile,
    InterferometerSpec,
    error_bars,
    fit_fringe,
    load_fringe_data,
    min_sensitivity_from_fit,
    sensitivity,
    sensitivity_from_fit,
)

REFERENCE = FringeModel(amplitude=0.9507, decay=4.594, offset=0.7022, ell=1)


def _period_grid(model, points, endpoint=False):
    start = model.offset - model.period / 2.0
    return start + np.linspace(0.0, model.period, points, endpoint=endpoint)


def _noiseless_data(model, points):
    phi = _period_grid(model, points)
    return np.column_stack([phi, model(phi)])


def test_exact_recovery_from_noiseless_samples():
    truth = FringeModel(amplitude=0.8, decay=6.0, offset=0.3, ell=2)
    result = fit_fringe(_noiseless_data(truth, 40), ell=2)
    assert result.model.amplitude == pytest.approx(0.8, rel=1e-8)
    assert result.model.decay == pytest.approx(6.0, rel=1e-8)
    assert result.model.offset == pytest.approx(0.3, rel=1e-8)
    assert result.residual_rms < 1e-10


def test_reference_fringe_recovery_and_derived_quantities():
    result = fit_fringe(_noiseless_data(REFERENCE, 60), ell=1)
    assert result.model.amplitude == pytest.approx(0.9507, rel=1e-6)
    assert result.model.decay == pytest.approx(4.594, rel=1e-6)
    assert result.model.offset == pytest.approx(0.7022, rel=1e-6)
    assert result.derived["n_bar"] == pytest.approx(2.297, rel=1e-6)
    assert result.derived["r"] == pytest.approx(-math.log(0.9507) / 2.0, rel=1e-6)
    assert abs(result.derived["r"] - 0.0253) < 1e-4
    assert result.derived["visibility"] == pytest.approx(0.9799778147960428, rel=1e-6)
    assert result.derived["fwhm"] == pytest.approx(0.39893153436729634, abs=1e-6)
    assert result.derived["super_resolution_factor"] == pytest.approx(7.875017096786658, rel=1e-5)
    assert set(result.param_stderr) == {"amplitude", "decay", "offset"}


def test_round_trip_over_random_models():
    rng = np.random.default_rng(123)
    for i in range(20):
        ell = int(i % 4 + 1)
        period = math.pi / (2 * ell)
        truth = FringeModel(
            amplitude=float(rng.uniform(0.5, 1.0)),
            decay=float(rng.uniform(0.5, 40.0)),
            offset=float(rng.uniform(0.0, period)),
            ell=ell,
        )
        result = fit_fringe(_noiseless_data(truth, 48), ell=ell)
        assert result.model.amplitude == pytest.approx(truth.amplitude, rel=1e-6)
        assert result.model.decay == pytest.approx(truth.decay, rel=1e-6)
        gap = abs(result.model.offset - truth.offset)
        assert min(gap, period - gap) < 1e-6 * period


def test_shallow_fringe_fits_but_has_no_width():
    truth = FringeModel(amplitude=0.9, decay=0.55, offset=0.4, ell=1)
    result = fit_fringe(_noiseless_data(truth, 40), ell=1)
    assert result.model.decay == pytest.approx(0.55, rel=1e-6)
    assert math.isnan(result.derived["fwhm"])
    assert math.isnan(result.derived["super_resolution_factor"])
    assert result.derived["visibility"] > 0.0


def test_shifting_the_data_shifts_only_the_offset():
    truth = FringeModel(amplitude=0.9, decay=8.0, offset=0.4, ell=1)
    phi = _period_grid(truth, 50)
    y = truth(phi)
    base = fit_fringe(np.column_stack([phi, y]), ell=1)
    shifted = fit_fringe(np.column_stack([phi + 0.2, y]), ell=1)
    assert shifted.model.amplitude == pytest.approx(base.model.amplitude, rel=1e-8)
    assert shifted.model.decay == pytest.approx(base.model.decay, rel=1e-8)
    expected = math.fmod(0.4 + 0.2, truth.period)
    assert shifted.model.offset == pytest.approx(expected, abs=1e-8)


def test_reported_offset_lands_in_the_principal_period():
    truth = FringeModel(amplitude=0.9, decay=5.0, offset=0.3, ell=1)
    phi = 3.0 + np.linspace(0.0, truth.period, 50, endpoint=False)
    result = fit_fringe(np.column_stack([phi, truth(phi)]), ell=1)
    assert 0.0 <= result.model.offset < truth.period
    assert result.model.offset == pytest.approx(0.3, abs=1e-8)


def test_floor_fit_recovers_an_offset_fringe():
    truth = FringeModel(amplitude=0.6, decay=5.0, offset=0.2, ell=1, floor=0.2)
    result = fit_fringe(_noiseless_data(truth, 50), ell=1, fit_floor=True)
    assert result.model.amplitude == pytest.approx(0.6, rel=1e-6)
    assert result.model.decay == pytest.approx(5.0, rel=1e-6)
    assert result.model.offset == pytest.approx(0.2, abs=1e-6)
    assert result.model.floor == pytest.approx(0.2, abs=1e-6)
    assert "floor" in result.param_stderr


def test_error_bars_values():
    dim = FringeModel(amplitude=1.0, decay=50.0, offset=0.0, ell=1)
    assert error_bars(math.pi / 4, 100, dim) == pytest.approx(0.1, rel=1e-12)
    at_peak = error_bars(REFERENCE.offset, 10_000, REFERENCE)
    assert at_peak == pytest.approx(0.00310112092637485, rel=1e-12)
    bright = FringeModel(amplitude=1.0, decay=4.0, offset=0.3, ell=1)
    assert error_bars(0.3, 100, bright) == 0.0


def test_error_bars_rejects_bad_trials():
    for trials in (0, -1, 2.5):
        with pytest.raises(ValueError):
            error_bars(0.1, trials, REFERENCE)


def test_fitted_sensitivity_matches_closed_form_for_ideal_shape():
    spec = InterferometerSpec(ell=2, mean_photons=3.5)
    model = FringeModel(amplitude=1.0, decay=2 * 3.5, offset=0.0, ell=2)
    ideal = ImperfectionProfile.ideal()
    phis = np.linspace(0.05, 0.35, 7)
    got = sensitivity_from_fit(model, phis)
    want = sensitivity(spec, ideal, phis)
    np.testing.assert_allclose(got, want, rtol=1e-8)


def test_fitted_sensitivity_diverges_at_the_fringe_peak():
    assert sensitivity_from_fit(REFERENCE, REFERENCE.offset) == math.inf
    vals = sensitivity_from_fit(REFERENCE, np.array([REFERENCE.offset, 0.3]))
    assert math.isinf(vals[0]) and math.isfinite(vals[1])


def test_minimum_fitted_sensitivity_of_the_reference_fringe():
    result = fit_fringe(_noiseless_data(REFERENCE, 60), ell=1)
    phi_star, best = min_sensitivity_from_fit(result)
    assert best == pytest.approx(0.21464248040649966, rel=1e-6)
    assert sensitivity_from_fit(result, phi_star) == pytest.approx(best, rel=1e-9)
    # 30% above the shot-noise limit 1/(4 sqrt(n_bar)) for this amplitude/decay
    assert best * 4.0 * math.sqrt(2.297) == pytest.approx(1.3012362916884255, rel=1e-6)


def test_iteration_cap_raises_with_best_iterate_attached():
    with pytest.raises(FitConvergenceError) as exc:
        fit_fringe(_noiseless_data(REFERENCE, 60), ell=1, max_iter=1)
    assert isinstance(exc.value.best, FitResult)


def test_rejects_contrastless_data():
    phi = np.linspace(0.0, 1.0, 20)
    with pytest.raises(ValueError, match="contrast"):
        fit_fringe(np.column_stack([phi, np.full(20, 0.5)]), ell=1)


def test_rejects_too_few_rows():
    with pytest.raises(ValueError):
        fit_fringe([[0.0, 1.0], [0.1, 0.9], [0.2, 0.5]], ell=1)


def test_rejects_short_angular_span():
    truth = FringeModel(amplitude=0.9, decay=4.0, offset=0.25, ell=1)
    phi = np.linspace(0.0, 0.5, 30)  # half a period would be ~0.785
    with pytest.raises(ValueError, match="half a fringe period"):
        fit_fringe(np.column_stack([phi, truth(phi)]), ell=1)


def test_rejects_non_finite_entries_and_bad_sigmas():
    data = _noiseless_data(REFERENCE, 20)
    bad = data.copy()
    bad[3, 1] = math.nan
    with pytest.raises(ValueError):
        fit_fringe(bad, ell=1)
    with_sig = np.column_stack([data, np.ones(len(data))])
    with_sig[5, 2] = 0.0
    with pytest.raises(ValueError, match="sigma"):
        fit_fringe(with_sig, ell=1)


@pytest.mark.parametrize("ell", [0, -2, 1.5, True])
def test_rejects_bad_charge(ell):
    with pytest.raises(ValueError):
        fit_fringe(_noiseless_data(REFERENCE, 20), ell=ell)


def test_decay_error_bar_covers_the_truth():
    phi = _period_grid(REFERENCE, 60)
    truth = REFERENCE(phi)
    sig = error_bars(phi, 100_000, REFERENCE)
    hits = 0
    for i in range(50):
        rng = np.random.default_rng(np.random.SeedSequence([7, i]))
        y = truth + rng.normal(0.0, sig)
        result = fit_fringe(np.column_stack([phi, y, sig]), ell=1)
        if abs(result.model.decay - 4.594) <= 3.0 * result.param_stderr["decay"]:
            hits += 1
    assert hits >= 47


def test_load_csv_round_trip(tmp_path):
    path = tmp_path / "scan.csv"
    path.write_text(
        "phi_rad,parity_mean,parity_stderr\n"
        "0.1,0.85,0.01\n"
        "0.2,0.6,0.02\n",
        encoding="utf-8",
    )
    data = load_fringe_data(path)
    np.testing.assert_allclose(data, [[0.1, 0.85, 0.01], [0.2, 0.6, 0.02]])


def test_load_converts_degrees_to_radians(tmp_path):
    path = tmp_path / "scan_deg.csv"
    path.write_text("phi_deg,parity_mean\n90.0,0.5\n45.0,0.9\n", encoding="utf-8")
    data = load_fringe_data(path)
    assert data.shape == (2, 2)
    assert data[0, 0] == pytest.approx(math.pi / 2)
    assert data[1, 0] == pytest.approx(math.pi / 4)


def test_load_json_table(tmp_path):
    doc = {
        "schema_version": 1,
        "table": "curve",
        "columns": ["phi_rad", "expectation"],
        "rows": [[0.2, 0.8], [0.4, 0.3], [0.6, 0.1]],
    }
    path = tmp_path / "curve.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    data = load_fringe_data(path)
    np.testing.assert_allclose(data, [[0.2, 0.8], [0.4, 0.3], [0.6, 0.1]])


def test_load_accepts_open_streams():
    stream = io.StringIO("phi,value,sigma\n0.0,1.0,0.1\n0.3,0.4,0.1\n")
    data = load_fringe_data(stream)
    np.testing.assert_allclose(data, [[0.0, 1.0, 0.1], [0.3, 0.4, 0.1]])


def test_load_rejects_unrecognized_columns():
    with pytest.raises(ValueError, match="columns"):
        load_fringe_data(io.StringIO("x,y\n1,2\n"))


def test_load_rejects_empty_input():
    with pytest.raises(ValueError):
        load_fringe_data(io.StringIO(""))


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_fringe_data(str(tmp_path / "absent.csv"))


def test_loaded_scan_refits_to_the_generating_model(tmp_path):
    phi = _period_grid(REFERENCE, 40)
    path = tmp_path / "ref.csv"
    lines = ["phi_rad,parity_mean"]
    lines += [f"{float(p)!r},{float(v)!r}" for p, v in zip(phi, REFERENCE(phi))]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    result = fit_fringe(load_fringe_data(path), ell=1)
    assert result.model.decay == pytest.approx(4.594, rel=1e-8)
