import pytest

from src.gate.cnot import CnotConfig
from src.utils.config import Settings
from src.utils.exceptions import ConfigurationError
from src.validator.validator import AgreementValidator, SUITE_NAMES, ValidationResult


def perturbed_gate() -> CnotConfig:
    cfg                 = CnotConfig.default()
    reflectivities      = cfg.gate_reflectivities
    reflectivities[4]   = 0.6
    return cfg.with_reflectivities(reflectivities)


def test_compare_records_spread():
    """Test agreement checks track the largest disagreement"""
    result = ValidationResult("demo")
    result.compare("close", {'a': 0.5, 'b': 0.5 + 1e-14}, 1e-12)
    assert result.is_valid

    result.compare("far", {'a': 0.5, 'b': 0.6}, 1e-12)
    assert not result.is_valid
    assert result.checks == 2
    assert result.max_abs_diff == pytest.approx(0.1)
    assert result.errors[0].startswith("far:")


def test_agreement_suites_pass():
    """Test closed forms, oracle and simulation agree"""
    results = AgreementValidator().validate(
        ['cascade', 'cascade-limit', 'chain-m1', 'chain-mk', 'tdm-cascade', 'oracle']
    )

    for result in results:
        assert result.is_valid, result.errors
        assert result.checks > 0
        assert result.max_abs_diff < 1e-12


def test_calibration_suite_default():
    """Test the shipped gate passes the calibration suite"""
    (result,) = AgreementValidator().validate(['calibration'])

    assert result.is_valid
    assert result.details['herald_probability'] == pytest.approx(0.05132, abs=1e-5)


def test_calibration_suite_rejects_perturbed_gate():
    """Test a detuned gate fails calibration"""
    (result,) = AgreementValidator(perturbed_gate()).validate(['calibration'])

    assert not result.is_valid
    assert result.to_dict()['passed'] is False


def test_unknown_suite():
    """Test unknown suite names are rejected"""
    with pytest.raises(ConfigurationError):
        AgreementValidator().validate(['cascade', 'nonsense'])


def test_suite_names_and_tolerance():
    """Test the suite table and the default agreement tolerance"""
    validator = AgreementValidator()

    assert tuple(validator.suites) == SUITE_NAMES
    assert validator.tolerance == Settings().tolerance
    assert AgreementValidator(tolerance=1e-9).tolerance == 1e-9
