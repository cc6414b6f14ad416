import math

import pytest

from sagnac_parity import (
    FockTruncation,
    QfiProtocol,
    QfiReport,
    crb_sensitivity,
    qfi_mzi,
    qfi_mzi_phase_averaged,
    qfi_report,
    qfi_si,
)


@pytest.mark.parametrize(
    "ell,n,expected_si,expected_mzi",
    [(1, 1.0, 16.0, 8.0), (2, 5.0, 320.0, 160.0), (5, 20.0, 8000.0, 4000.0)],
)
def test_closed_form_fisher_information(ell, n, expected_si, expected_mzi):
    assert qfi_si(ell, n) == expected_si
    assert qfi_mzi(ell, n) == expected_mzi
    assert qfi_si(ell, n) == 2.0 * qfi_mzi(ell, n)


def test_phase_averaged_fisher_information_frozen_values():
    assert qfi_mzi_phase_averaged(1, 1.0) == pytest.approx(3.9999999999819207, rel=1e-12)
    assert qfi_mzi_phase_averaged(1, 2.297) == pytest.approx(9.187999999937587, rel=1e-12)


def test_phase_averaged_sum_converges_to_closed_form():
    for n in (1.0, 5.0, 10.0, 20.0):
        assert qfi_mzi_phase_averaged(1, n) == pytest.approx(4.0 * n, abs=1e-9)


def test_phase_averaged_scales_with_charge_squared():
    base = qfi_mzi_phase_averaged(1, 7.0)
    for ell in (2, 3, 5):
        assert qfi_mzi_phase_averaged(ell, 7.0) == pytest.approx(ell * ell * base, rel=1e-14)


def test_phase_averaged_sum_is_monotone_in_cutoff():
    coarse = qfi_mzi_phase_averaged(1, 3.0, trunc=FockTruncation(n_max=5, tail_bound=0.5))
    finer = qfi_mzi_phase_averaged(1, 3.0, trunc=FockTruncation(n_max=10, tail_bound=0.5))
    assert coarse < finer < 12.0


def test_phase_averaging_costs_a_factor_of_two():
    n = 5.0
    averaged = qfi_mzi_phase_averaged(1, n)
    assert averaged <= qfi_mzi(1, n) / 2.0
    assert averaged == pytest.approx(qfi_mzi(1, n) / 2.0, abs=1e-8)


def test_zero_photons_carry_no_information():
    assert qfi_si(1, 0.0) == 0.0
    assert qfi_mzi_phase_averaged(1, 0.0) == 0.0
    assert crb_sensitivity(0.0) == math.inf


@pytest.mark.parametrize("bad_ell", [0, -2, 1.5])
def test_validation_rejects_bad_charge(bad_ell):
    with pytest.raises(ValueError):
        qfi_si(bad_ell, 1.0)


def test_validation_rejects_negative_photons():
    with pytest.raises(ValueError):
        qfi_mzi(1, -1.0)


def test_crb_sensitivity_values():
    assert crb_sensitivity(16.0) == 0.25
    assert crb_sensitivity(16.0, trials=4) == 0.125
    assert crb_sensitivity(8.0) == pytest.approx(0.35355339059327373, rel=1e-15)


@pytest.mark.parametrize("bad_trials", [0, -1, 2.5])
def test_crb_sensitivity_rejects_bad_trials(bad_trials):
    with pytest.raises(ValueError):
        crb_sensitivity(4.0, trials=bad_trials)


def test_crb_sensitivity_rejects_negative_information():
    with pytest.raises(ValueError):
        crb_sensitivity(-1.0)


def test_report_builder_covers_all_protocols():
    si = qfi_report(QfiProtocol.SI, ell=2, mean_photons=5.0, trials=100)
    assert isinstance(si, QfiReport)
    assert si.fisher_information == 320.0
    assert si.bound == pytest.approx(1.0 / math.sqrt(100 * 320.0), rel=1e-15)

    mzi = qfi_report(QfiProtocol.MZI, ell=2, mean_photons=5.0)
    assert mzi.fisher_information == 160.0

    avg = qfi_report(QfiProtocol.MZI_PHASE_AVERAGED, ell=2, mean_photons=5.0)
    assert avg.fisher_information == pytest.approx(4.0 * 4 * 5.0, abs=1e-8)
    assert avg.bound == pytest.approx(1.0 / math.sqrt(avg.fisher_information), rel=1e-12)
