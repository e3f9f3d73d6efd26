"""
Linear heralded response
The gate circuit is passive and the heralds only decohere by photon count, so the
conditional output for any two-qubit input follows from the four basis runs.
"""
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from src.core.fock import OccupationVector
from src.gate.cnot import CnotConfig, build_cnot, cnot_matrix, encode_input
from src.optics.elements import BeamSplitter, propagate
from src.utils.exceptions import ConfigurationError, UndefinedFidelityError


@dataclass(frozen=True)
class HeraldedResponse:
    """
    Per detector-count outcome k: herald factor f_k and output map A_k

    For an input alpha over the logical basis the conditional state is
    sum_k f_k A_k alpha alpha^+ A_k^+, hence

        P      = alpha^+ G alpha,            G   = sum_k f_k A_k^+ A_k
        F * P  = sum_k f_k |alpha^+ B_k alpha|^2,  B_k = C^+ E^+ A_k

    with C the ideal CNOT and E the dual-rail embedding of the logical basis
    into the output modes.
    """
    factors: np.ndarray         # (K,)
    projections: np.ndarray     # (K, 4, 4)
    gram: np.ndarray            # (4, 4)
    outcomes: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_config(cls, cfg: CnotConfig) -> "HeraldedResponse":
        """
        Run the four logical basis inputs through the gate circuit

        Raises:
            ConfigurationError: If the circuit contains loss channels
        """
        circuit = build_cnot(cfg)
        if any(not isinstance(e, BeamSplitter) for e in circuit.elements):
            raise ConfigurationError("The linear gate response needs a lossless circuit")

        detector_modes  = [d.mode for d in circuit.detectors]
        output_modes    = [m for m in range(circuit.mode_count) if m not in detector_modes]
        output_index: Dict[OccupationVector, int]                   = {}
        columns: Dict[Tuple[int, ...], Dict[Tuple[int, int], complex]] = {}

        for logical in range(4):
            amplitudes          = np.zeros(4, dtype=complex)
            amplitudes[logical] = 1.0
            state               = encode_input(cfg, amplitudes, circuit.mode_count)
            output              = propagate(circuit, state).branches[0].state

            for occupation, amplitude in output.amplitudes.items():
                counts  = tuple(occupation[m] for m in detector_modes)
                rest    = tuple(occupation[m] for m in output_modes)
                row     = output_index.setdefault(rest, len(output_index))
                columns.setdefault(counts, {})[(row, logical)] = amplitude

        embedding = np.zeros((len(output_index) or 1, 4), dtype=complex)
        for logical in range(4):
            occupation = [0] * len(output_modes)
            occupation[output_modes.index(cfg.control.rail_for(logical >> 1))]  = 1
            occupation[output_modes.index(cfg.target.rail_for(logical & 1))]    = 1
            row = output_index.get(tuple(occupation))
            if row is not None:
                embedding[row, logical] = 1.0

        outcomes    = []
        factors     = []
        blocks      = []
        for counts, entries in sorted(columns.items()):
            factor = float(np.prod([d.factor(c) for d, c in zip(circuit.detectors, counts)]))
            if factor == 0.0:
                continue
            block = np.zeros((embedding.shape[0], 4), dtype=complex)
            for (row, logical), amplitude in entries.items():
                block[row, logical] = amplitude
            outcomes.append(counts)
            factors.append(factor)
            blocks.append(block)

        if not blocks:
            blocks  = [np.zeros((embedding.shape[0], 4), dtype=complex)]
            factors = [0.0]

        stack       = np.array(blocks)
        weights     = np.array(factors)
        ideal       = embedding @ cnot_matrix()
        projections = np.einsum("ri,krj->kij", ideal.conj(), stack)
        gram        = np.einsum("k,kri,krj->ij", weights, stack.conj(), stack)

        return cls(weights, projections, gram, tuple(outcomes))

    def probability(self, states: np.ndarray) -> np.ndarray:
        """Heralding probability for one input (shape (4,)) or a batch (shape (S, 4))"""
        states = np.atleast_2d(states)
        return np.einsum("si,ij,sj->s", states.conj(), self.gram, states).real

    def evaluate(self, states: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Fidelity and heralding probability for a batch of normalized inputs

        Args:
            states: Array of shape (S, 4) or (4,)

        Returns:
            (F, P) arrays of shape (S,)

        Raises:
            UndefinedFidelityError: If any input is never heralded
        """
        states      = np.atleast_2d(np.asarray(states, dtype=complex))
        probability = self.probability(states)
        overlaps    = np.einsum("si,kij,sj->sk", states.conj(), self.projections, states)
        weighted    = np.abs(overlaps) ** 2 @ self.factors

        if np.any(probability <= 0.0):
            raise UndefinedFidelityError("Fidelity is undefined: an input is never heralded")
        return weighted / probability, probability

    def herald_spread(self) -> float:
        """Largest deviation of the herald probability over inputs (eigenvalue spread of G)"""
        eigenvalues = np.linalg.eigvalsh(self.gram)
        return float(eigenvalues[-1] - eigenvalues[0])

