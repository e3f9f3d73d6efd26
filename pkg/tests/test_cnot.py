import math

import numpy as np
import pytest

from src.core.fock import Branch, Ensemble, SparseState
from src.gate.calibration import CALIBRATION_INPUTS, calibrate, truth_table
from src.gate.cnot import (
    CnotConfig, DetectorKind, DetectorModel, apply_gate, build_cnot, cnot_matrix,
    encode_input, fidelity_and_probability, gate_fidelity, ideal_output
)
from src.gate.response import HeraldedResponse
from src.utils.exceptions import CalibrationError, ConfigurationError, UndefinedFidelityError


NS_SUCCESS = (3 - math.sqrt(2)) / 7

BELL_INPUT = (1 / math.sqrt(2), 0.0, 1 / math.sqrt(2), 0.0)


def test_default_config():
    """Test the shipped gate wiring"""
    cfg = CnotConfig.default()

    assert cfg.mode_count == 8
    assert cfg.rails == (0, 1, 2, 3)
    assert cfg.ancilla_modes == (4, 5)
    assert len(cfg.elements) == 8
    assert cfg.detector_model.kind is DetectorKind.IDEAL


def test_build_cnot_detector_models():
    """Test chain heralds add one mode and one detector per ancilla"""
    ideal = build_cnot(CnotConfig.default())
    chain = build_cnot(CnotConfig.default(DetectorModel.chain(0.011, 0.99)))
    plain = build_cnot(CnotConfig.default(DetectorModel.nondiscriminating(0.99)))

    assert (ideal.mode_count, len(ideal.detectors)) == (8, 4)
    assert (chain.mode_count, len(chain.detectors)) == (10, 6)
    assert (plain.mode_count, len(plain.detectors)) == (8, 4)
    assert [bs.label for bs in chain.beamsplitters[-2:]] == ["chain-4", "chain-5"]


def test_cnot_matrix_is_permutation():
    """Test the ideal gate flips the target when the control is set"""
    matrix = cnot_matrix()

    assert np.allclose(matrix @ matrix, np.eye(4))
    assert matrix[3, 2] == 1 and matrix[2, 3] == 1


def test_encode_input_dual_rail():
    """Test logical one puts the photon on the H rail"""
    cfg     = CnotConfig.default()
    state   = encode_input(cfg, [0, 0, 1, 0], cfg.mode_count)

    assert state.amplitude((1, 0, 0, 1, 1, 1, 0, 0)) == pytest.approx(1.0)


def test_encode_input_validation():
    """Test malformed two-qubit inputs"""
    cfg = CnotConfig.default()

    with pytest.raises(ConfigurationError):
        encode_input(cfg, [1, 0, 0], cfg.mode_count)
    with pytest.raises(ConfigurationError):
        encode_input(cfg, [0, 0, 0, 0], cfg.mode_count)


def test_truth_table_with_ideal_detectors():
    """Test the gate maps |10> to |11> and leaves |00> alone"""
    cfg = CnotConfig.default()

    ensemble, probability = apply_gate(cfg, [0, 0, 1, 0])
    assert ensemble.modes == (0, 1, 2, 3)
    assert probability == pytest.approx(NS_SUCCESS ** 2, abs=1e-9)

    flipped = ideal_output(cfg, [0, 0, 1, 0], ensemble.modes)
    assert flipped.amplitude((1, 0, 1, 0)) == pytest.approx(1.0)

    for fidelity in truth_table(cfg).values():
        assert fidelity == pytest.approx(1.0, abs=1e-9)


def test_bell_state_output():
    """Test a control superposition becomes an entangled output"""
    fidelity, probability = gate_fidelity(CnotConfig.default(), BELL_INPUT)

    assert fidelity == pytest.approx(1.0, abs=1e-9)
    assert probability == pytest.approx(NS_SUCCESS ** 2, abs=1e-9)


def test_fidelity_and_probability():
    """Test fidelity of a mixed ensemble against a target state"""
    target  = SparseState.basis([1, 0])
    other   = SparseState.basis([0, 1])
    mixed   = Ensemble((Branch(0.3, target), Branch(0.1, other)), (0, 1))

    fidelity, probability = fidelity_and_probability(mixed, target)

    assert fidelity == pytest.approx(0.75)
    assert probability == pytest.approx(0.4)


def test_fidelity_undefined_without_herald():
    """Test an empty ensemble has no fidelity"""
    with pytest.raises(UndefinedFidelityError):
        fidelity_and_probability(Ensemble.empty((0, 1)), SparseState.basis([1, 0]))


def test_response_matches_full_simulation():
    """Test the linear response reproduces ensemble fidelities"""
    cfg         = CnotConfig.default(DetectorModel.chain(0.05, 0.95))
    response    = HeraldedResponse.from_config(cfg)
    rng         = np.random.default_rng(7)

    for _ in range(3):
        alpha = rng.normal(size=4) + 1j * rng.normal(size=4)
        alpha /= np.linalg.norm(alpha)

        fidelity, probability   = gate_fidelity(cfg, alpha)
        f, p                    = response.evaluate(alpha)

        assert f[0] == pytest.approx(fidelity, abs=1e-10)
        assert p[0] == pytest.approx(probability, rel=1e-9)


def test_ideal_response_herald_is_input_independent():
    """Test the ideal gate heralds every input equally"""
    response = HeraldedResponse.from_config(CnotConfig.default())

    assert response.herald_spread() < 1e-10
    assert np.allclose(np.diag(response.gram).real, NS_SUCCESS ** 2, atol=1e-9)


def test_full_reflectivity_chain_equals_nondiscriminating():
    """Test a chain with eta_ref = 1 behaves as a plain click detector"""
    chain = HeraldedResponse.from_config(CnotConfig.default(DetectorModel.chain(1.0, 0.9)))
    plain = HeraldedResponse.from_config(CnotConfig.default(DetectorModel.nondiscriminating(0.9)))

    assert np.allclose(chain.factors, plain.factors, rtol=0, atol=1e-15)
    assert np.allclose(chain.projections, plain.projections, rtol=0, atol=1e-15)
    assert np.allclose(chain.gram, plain.gram, rtol=0, atol=1e-15)


def test_weak_chain_basis_fidelity():
    """Test a weak chain with perfect efficiency keeps basis fidelity high"""
    table = truth_table(CnotConfig.default(DetectorModel.chain(1e-4, 1.0)))

    for fidelity in table.values():
        assert fidelity > 0.99


def test_malformed_config():
    """Test gate config validation"""
    document = CnotConfig.default().to_dict()

    missing = dict(document)
    del missing['heralds']
    with pytest.raises(ConfigurationError):
        CnotConfig.from_dict(missing)

    overlap = dict(document, heralds=[{'mode': 0, 'count': 1}])
    with pytest.raises(ConfigurationError):
        CnotConfig.from_dict(overlap)

    outside = dict(document, mode_count=6)
    with pytest.raises(ConfigurationError):
        CnotConfig.from_dict(outside)

    with pytest.raises(ConfigurationError):
        DetectorModel.from_dict({'kind': 'bolometer'})


def test_config_round_trip_keeps_detector_model():
    """Test the detector model survives serialization"""
    cfg     = CnotConfig.default(DetectorModel.chain(0.011, 0.99))
    again   = CnotConfig.from_dict(cfg.to_dict())

    assert again == cfg


def test_calibration_passes_for_default():
    """Test the shipped config calibrates"""
    report = calibrate(CnotConfig.default(DetectorModel.chain(0.011, 0.99)))

    assert report.passed
    assert set(report.fidelities) == set(CALIBRATION_INPUTS)
    assert report.herald_probability == pytest.approx(NS_SUCCESS ** 2, abs=1e-9)
    assert report.herald_spread < 1e-9


def test_calibration_rejects_perturbed_reflectivity():
    """Test a detuned nonlinear-sign section fails calibration"""
    cfg             = CnotConfig.default()
    reflectivities  = cfg.gate_reflectivities
    reflectivities[2] = 0.7

    report = calibrate(cfg.with_reflectivities(reflectivities))

    assert not report.passed
    assert report.errors


def test_calibration_rejects_identity():
    """Test a config without elements does not implement CNOT"""
    cfg     = CnotConfig.default()
    bare    = CnotConfig(
        cfg.mode_count, cfg.control, cfg.target, cfg.ancilla_modes, (), cfg.heralds, name="bare"
    )

    report = calibrate(bare)

    assert not report.passed
    assert report.fidelities["|00>"] == pytest.approx(1.0)
    assert report.fidelities["|10>"] == pytest.approx(0.0, abs=1e-12)


def test_strict_calibration_raises():
    """Test strict calibration raises with the report attached"""
    cfg             = CnotConfig.default()
    reflectivities  = cfg.gate_reflectivities
    reflectivities[3] = 0.5

    with pytest.raises(CalibrationError) as excinfo:
        calibrate(cfg.with_reflectivities(reflectivities), strict=True)

    assert excinfo.value.report is not None
    assert not excinfo.value.report.passed


def test_fidelity_of_equal_mixture():
    """Test an equal mixture with an orthogonal state halves the fidelity"""
    ideal       = SparseState.basis([1, 0])
    orthogonal  = SparseState.basis([0, 1])

    fidelity, probability = fidelity_and_probability(
        Ensemble((Branch(0.05, ideal),), (0, 1)), ideal
    )
    assert (fidelity, probability) == (pytest.approx(1.0), pytest.approx(0.05))

    fidelity, probability = fidelity_and_probability(
        Ensemble((Branch(0.02, ideal), Branch(0.02, orthogonal)), (0, 1)), ideal
    )
    assert fidelity == pytest.approx(0.5)
    assert probability == pytest.approx(0.04)


def test_calibration_rejects_small_detuning():
    """Test a 0.05 shift on one beamsplitter is detected"""
    cfg             = CnotConfig.default()
    reflectivities  = cfg.gate_reflectivities
    reflectivities[1] += 0.05

    report = calibrate(cfg.with_reflectivities(reflectivities))

    assert not report.passed
    assert min(report.fidelities.values()) < 1.0 - 1e-9
