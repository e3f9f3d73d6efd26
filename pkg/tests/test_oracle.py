import pytest

from src.optics.detection import DetectorSpec
from src.optics.elements import BeamSplitter, Circuit
from src.oracle.enumerator import (
    ArrivalModel, arrival_model_for, enumerate_click_patterns, is_recombining, oracle_vs_quantum
)
from src.schemes.builders import ChainConfig, build_chain_detector, build_tree_nport
from src.utils.exceptions import ConfigurationError, EnumerationLimitError


def mach_zehnder() -> Circuit:
    return Circuit(
        2,
        (BeamSplitter(0, 1, 0.5), BeamSplitter(0, 1, 0.5)),
        (DetectorSpec.click(0), DetectorSpec.click(1)),
        name="mach-zehnder"
    )


def test_single_photon_on_two_detectors():
    """Test one photon clicks either detector with equal probability"""
    patterns = enumerate_click_patterns(1, ArrivalModel((0.5, 0.5))).click_patterns()

    assert patterns == {(0, 1): pytest.approx(0.5), (1, 0): pytest.approx(0.5)}


def test_two_photons_on_eight_detectors():
    """Test two photons hit distinct detectors with probability 7/8"""
    distribution = enumerate_click_patterns(2, ArrivalModel((1 / 8,) * 8))

    assert distribution.perceived()[2] == pytest.approx(0.875, abs=1e-12)
    assert distribution.perceived()[1] == pytest.approx(0.125, abs=1e-12)


def test_single_stage_chain_acceptance():
    """Test one click with a silent transmitted detector"""
    distribution = enumerate_click_patterns(2, ArrivalModel((0.1, 0.9), 0.9))

    assert distribution.pattern_probability([1, 0]) == pytest.approx(0.0261, abs=1e-12)
    assert distribution.pattern_probability([1, None]) == pytest.approx(1 - 0.91 ** 2, abs=1e-12)


def test_distribution_sums_to_one():
    """Test every enumeration is normalized"""
    for n in range(7):
        model = ArrivalModel((0.2, 0.3, 0.1), 0.85)
        assert enumerate_click_patterns(n, model).total() == pytest.approx(1.0, abs=1e-12)


def test_permutation_symmetry():
    """Test swapping detectors with equal arrival permutes the distribution"""
    first   = enumerate_click_patterns(3, ArrivalModel((0.2, 0.3, 0.2), 0.9)).counts
    second  = enumerate_click_patterns(3, ArrivalModel((0.2, 0.2, 0.3), 0.9)).counts

    for (a, b, c), p in first.items():
        assert second[(a, c, b)] == pytest.approx(p, abs=1e-15)


def test_enumeration_bound():
    """Test the oracle refuses more than twelve photons"""
    with pytest.raises(EnumerationLimitError):
        enumerate_click_patterns(13, ArrivalModel((0.5,)))


def test_arrival_model_validation():
    """Test arrival probabilities must fit in the unit interval"""
    with pytest.raises(ConfigurationError):
        ArrivalModel((0.6, 0.6))
    with pytest.raises(ConfigurationError):
        ArrivalModel((0.5,), (0.9, 0.9))


def test_arrival_model_of_chain():
    """Test a chain circuit delivers eta_ref to each stage"""
    model = arrival_model_for(build_chain_detector(ChainConfig(2, 0.2, 0.9)))

    assert list(model.arrival_probs) == pytest.approx([0.2, 0.2, 0.6], abs=1e-12)
    assert model.efficiency == (0.9, 0.9, 0.9)


def test_recombining_circuit_refused():
    """Test interferometers fall outside the independent-photon model"""
    assert is_recombining(mach_zehnder())
    assert not is_recombining(build_tree_nport(8))
    with pytest.raises(EnumerationLimitError):
        oracle_vs_quantum(mach_zehnder(), 1)


def test_oracle_matches_quantum():
    """Test enumeration agrees with the Fock simulation"""
    circuits = [
        (build_chain_detector(ChainConfig(1, 0.1, 0.9)), 2),
        (build_tree_nport(4, 0.9), 2),
        (build_chain_detector(ChainConfig(3, 0.2, 0.95)), 4),
    ]
    for circuit, n in circuits:
        report = oracle_vs_quantum(circuit, n)
        assert report.max_abs_diff < 1e-12
        assert report.pattern_count > 0
        assert report.to_dict()['n'] == n
