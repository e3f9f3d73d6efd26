import math

import numpy as np
import pytest

from src.core.fock import Ensemble, SparseState
from src.optics.detection import DetectorSpec
from src.optics.elements import (
    BeamSplitter, Circuit, LossChannel, apply_beamsplitter, apply_element, apply_loss,
    chain_reflectivities, propagate, run_circuit, transfer_matrix
)
from src.utils.exceptions import (
    ConfigurationError, DimensionError, InfeasibleUniformityError, UsageError
)


def test_hong_ou_mandel():
    """Test two photons on a 50/50 beamsplitter bunch"""
    output = apply_beamsplitter(SparseState.basis([1, 1]), BeamSplitter(0, 1, 0.5))

    assert output.amplitude((2, 0)) == pytest.approx(1 / math.sqrt(2))
    assert output.amplitude((0, 2)) == pytest.approx(-1 / math.sqrt(2))
    assert output.amplitude((1, 1)) == 0


def test_single_photon_split():
    """Test a single photon keeps its mode with probability eta"""
    output = apply_beamsplitter(SparseState.basis([1, 0]), BeamSplitter(0, 1, 0.3))

    assert abs(output.amplitude((1, 0))) ** 2 == pytest.approx(0.3)
    assert abs(output.amplitude((0, 1))) ** 2 == pytest.approx(0.7)


def test_beamsplitter_preserves_norm():
    """Test beamsplitters are unitary on multi-photon inputs"""
    state = SparseState.superposition({(2, 1, 0): 1.0, (0, 1, 2): 1j})

    output = apply_beamsplitter(state, BeamSplitter(0, 2, 0.37))

    assert output.norm() == pytest.approx(1.0, abs=1e-12)


def test_beamsplitter_is_self_inverse():
    """Test applying the same beamsplitter twice restores the input"""
    bs      = BeamSplitter(0, 1, 0.2)
    state   = SparseState.basis([2, 1])

    output = apply_beamsplitter(apply_beamsplitter(state, bs), bs)

    assert output.amplitude((2, 1)) == pytest.approx(1.0)
    assert len(output) == 1


def test_beamsplitter_mode_outside_state():
    """Test beamsplitters on missing modes fail"""
    with pytest.raises(DimensionError):
        apply_beamsplitter(SparseState.basis([1, 0]), BeamSplitter(0, 3, 0.5))


def test_beamsplitter_validation():
    """Test beamsplitter parameter checks"""
    with pytest.raises(DimensionError):
        BeamSplitter(1, 1, 0.5)
    with pytest.raises(ConfigurationError):
        BeamSplitter(0, 1, 1.2)


def test_loss_branches():
    """Test loss splits a two-photon state into binomial branches"""
    ensemble = Ensemble.pure(SparseState.basis([2]))

    lossy = apply_loss(ensemble, LossChannel(0, 0.5))

    weights = {next(iter(b.state.amplitudes))[0]: b.weight for b in lossy.branches}
    assert weights[2] == pytest.approx(0.25)
    assert weights[1] == pytest.approx(0.5)
    assert weights[0] == pytest.approx(0.25)
    assert lossy.total_weight() == pytest.approx(1.0)


def test_loss_keeps_coherence_inside_branch():
    """Test the no-loss branch keeps the superposition"""
    state       = SparseState.superposition({(1, 0): 1.0, (0, 1): 1.0})
    lossy       = apply_loss(Ensemble.pure(state), LossChannel(1, 0.5))
    no_loss     = lossy.branches[0]

    assert no_loss.weight == pytest.approx(0.75)
    assert abs(no_loss.state.amplitude((1, 0))) ** 2 == pytest.approx(2 / 3)
    assert lossy.total_weight() == pytest.approx(1.0)


def test_lossless_channel_is_identity():
    """Test full transmission leaves the ensemble untouched"""
    ensemble = Ensemble.pure(SparseState.basis([3, 1]))

    assert apply_loss(ensemble, LossChannel(0, 1.0)) is ensemble


def test_apply_element_uses_mode_labels():
    """Test elements address circuit labels, not positions"""
    ensemble = Ensemble.pure(SparseState.basis([1, 0]), modes=[3, 5])

    output = apply_element(ensemble, BeamSplitter(3, 5, 0.0))

    assert output.branches[0].state.amplitude((0, 1)) == pytest.approx(1.0)


def test_chain_reflectivities():
    """Test the uniform-arrival recursion"""
    assert chain_reflectivities(0.1, 2) == pytest.approx([0.1, 0.1 / 0.9])
    assert chain_reflectivities(1 / 3, 3) == pytest.approx([1 / 3, 0.5, 1.0])


def test_chain_reflectivities_infeasible():
    """Test k * eta above one is infeasible"""
    with pytest.raises(InfeasibleUniformityError):
        chain_reflectivities(0.5, 3)
    with pytest.raises(ConfigurationError):
        chain_reflectivities(0.1, 0)


def test_transfer_matrix_of_chain():
    """Test uniform single-photon arrival along a chain"""
    etas        = chain_reflectivities(0.2, 3)
    elements    = [BeamSplitter(i, i + 1, eta) for i, eta in enumerate(etas)]

    column = transfer_matrix(4, elements)[:, 0]

    np.testing.assert_allclose(np.abs(column[:3]) ** 2, [0.2, 0.2, 0.2], atol=1e-12)
    assert abs(column[3]) ** 2 == pytest.approx(0.4)


def test_circuit_validation():
    """Test circuits reject out-of-range modes and duplicate detectors"""
    with pytest.raises(DimensionError):
        Circuit(2, (BeamSplitter(0, 2, 0.5),))
    with pytest.raises(DimensionError):
        Circuit(2, (), (DetectorSpec.click(0), DetectorSpec.no_click(0)))


def test_propagate_dimension_mismatch():
    """Test inputs must match the circuit size"""
    circuit = Circuit(3, (BeamSplitter(0, 1, 0.5),))

    with pytest.raises(DimensionError):
        propagate(circuit, SparseState.basis([1, 0]))


def test_run_circuit_requires_normalized_input():
    """Test run_circuit rejects unnormalized inputs"""
    circuit = Circuit(2, (BeamSplitter(0, 1, 0.5),))

    with pytest.raises(UsageError):
        run_circuit(circuit, SparseState(2, {(1, 0): 2.0}))


def test_run_circuit_heralds():
    """Test conditioning on a click after a lossy split"""
    circuit = Circuit(
        2,
        (BeamSplitter(0, 1, 0.5), LossChannel(1, 0.8)),
        (DetectorSpec.click(1, 0.5),)
    )

    ensemble = run_circuit(circuit, circuit.input_state({0: 1}))

    assert ensemble.modes == (0,)
    assert ensemble.total_weight() == pytest.approx(0.5 * 0.8 * 0.5)


def test_beamsplitters_compose_as_matrix_product():
    """Test two beamsplitters on the same pair act as their 2x2 product"""
    first   = BeamSplitter(0, 1, 0.3)
    second  = BeamSplitter(0, 1, 0.8)
    product = second.matrix() @ first.matrix()

    assert np.allclose(transfer_matrix(2, [first, second]), product)

    for column, counts in enumerate(([1, 0], [0, 1])):
        state   = apply_beamsplitter(SparseState.basis(counts), first)
        state   = apply_beamsplitter(state, second)
        assert state.amplitude((1, 0)) == pytest.approx(product[0, column], abs=1e-14)
        assert state.amplitude((0, 1)) == pytest.approx(product[1, column], abs=1e-14)
