"""
Heralded linear-optics CNOT
Gate configuration, circuit construction with pluggable detector models, and the fidelity
and success probability of the conditional output
"""
import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.core.fock import Ensemble, SparseState, inner_product
from src.optics.detection import DetectorSpec, heralding_probability
from src.optics.elements import BeamSplitter, Circuit, run_circuit
from src.utils.exceptions import ConfigurationError, DimensionError, UndefinedFidelityError


LOGICAL_LABELS  = ("00", "01", "10", "11")
DEFAULT_CONFIG  = Path(__file__).parent / "data" / "cnot_default.json"


@dataclass(frozen=True)
class DualRailQubit:
    """One photon across two modes: |0>_L = |0>_H|1>_V, |1>_L = |1>_H|0>_V"""
    mode_h: int
    mode_v: int

    def __post_init__(self):
        if self.mode_h == self.mode_v:
            raise ConfigurationError(f"Dual-rail qubit needs two modes, got {self.mode_h} twice")

    def rail_for(self, bit: int) -> int:
        """Mode holding the photon for logical value `bit`"""
        return self.mode_h if bit else self.mode_v


class DetectorKind(Enum):
    IDEAL               = "ideal"
    NON_DISCRIMINATING  = "nondiscriminating"
    CHAIN               = "chain"


@dataclass(frozen=True)
class DetectorModel:
    """How the herald detectors are realised"""
    kind: DetectorKind      = DetectorKind.IDEAL
    eta_ref: float          = 1.0
    efficiency: float       = 1.0

    def __post_init__(self):
        if not isinstance(self.kind, DetectorKind):
            try:
                object.__setattr__(self, "kind", DetectorKind(self.kind))
            except ValueError:
                raise ConfigurationError(f"Unknown detector model '{self.kind}'")
        for name, value in (("eta_ref", self.eta_ref), ("efficiency", self.efficiency)):
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")

    @classmethod
    def ideal(cls) -> "DetectorModel":
        return cls(DetectorKind.IDEAL)

    @classmethod
    def nondiscriminating(cls, efficiency: float) -> "DetectorModel":
        return cls(DetectorKind.NON_DISCRIMINATING, 1.0, efficiency)

    @classmethod
    def chain(cls, eta_ref: float, efficiency: float) -> "DetectorModel":
        return cls(DetectorKind.CHAIN, eta_ref, efficiency)

    @classmethod
    def from_dict(cls, data: Dict) -> "DetectorModel":
        try:
            return cls(
                data.get('kind', DetectorKind.IDEAL.value),
                float(data.get('eta_ref', 1.0)),
                float(data.get('efficiency', 1.0)),
            )
        except (AttributeError, TypeError, ValueError) as e:
            raise ConfigurationError(f"Malformed detector model: {e}")

    def to_dict(self) -> Dict:
        return {'kind': self.kind.value, 'eta_ref': self.eta_ref, 'efficiency': self.efficiency}

    def describe(self) -> str:
        if self.kind is DetectorKind.IDEAL:
            return "ideal number-resolving"
        if self.kind is DetectorKind.NON_DISCRIMINATING:
            return f"non-discriminating (eta_eff={self.efficiency:g})"
        return f"chain (eta_ref={self.eta_ref:g}, eta_eff={self.efficiency:g})"


class Herald(NamedTuple):
    """Conditioned output: `count` photons expected in `mode`"""
    mode: int
    count: int


@dataclass(frozen=True)
class CnotConfig:
    """Mode wiring, beamsplitter list, herald conditions and detector model"""
    mode_count: int
    control: DualRailQubit
    target: DualRailQubit
    ancilla_modes: Tuple[int, ...]
    elements: Tuple[BeamSplitter, ...]
    heralds: Tuple[Herald, ...]
    detector_model: DetectorModel   = field(default_factory=DetectorModel.ideal)
    name: str                       = "cnot"

    def __post_init__(self):
        object.__setattr__(self, "ancilla_modes", tuple(self.ancilla_modes))
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "heralds", tuple(Herald(*h) for h in self.heralds))

        rails = self.rails
        if len(set(rails)) != 4:
            raise ConfigurationError(
                f"Control and target rails must be four distinct modes: {rails}"
            )

        used = set(rails) | set(self.ancilla_modes) | {h.mode for h in self.heralds}
        for element in self.elements:
            used.update(element.modes)
        if any(m < 0 or m >= self.mode_count for m in used):
            raise ConfigurationError(
                f"Gate config references a mode outside 0..{self.mode_count - 1}"
            )

        herald_modes = [h.mode for h in self.heralds]
        if len(set(herald_modes)) != len(herald_modes):
            raise ConfigurationError("Each herald mode may be conditioned only once")
        if set(herald_modes) & set(rails):
            raise ConfigurationError("Herald modes must not overlap the qubit rails")
        if any(h.count not in (0, 1) for h in self.heralds):
            raise ConfigurationError("Heralds condition on 0 or 1 photons")
        if set(self.ancilla_modes) & set(rails):
            raise ConfigurationError("Ancilla photons cannot enter a qubit rail")

    @property
    def rails(self) -> Tuple[int, int, int, int]:
        return (self.control.mode_h, self.control.mode_v, self.target.mode_h, self.target.mode_v)

    @property
    def gate_reflectivities(self) -> List[float]:
        return [e.reflectivity for e in self.elements]

    def with_detector_model(self, model: DetectorModel) -> "CnotConfig":
        return replace(self, detector_model=model)

    def with_reflectivities(self, reflectivities: Sequence[float]) -> "CnotConfig":
        if len(reflectivities) != len(self.elements):
            raise ConfigurationError(
                f"{len(reflectivities)} reflectivities for {len(self.elements)} beamsplitters"
            )
        elements = tuple(
            BeamSplitter(e.mode_a, e.mode_b, r, e.label)
            for e, r in zip(self.elements, reflectivities)
        )
        return replace(self, elements=elements)

    @classmethod
    def from_dict(cls, data: Dict, detector_model: Optional[DetectorModel] = None) -> "CnotConfig":
        """
        Build a config from its JSON document

        An explicit `detector_model` wins over the document's optional
        `detector_model` entry; without either the detectors are ideal.

        Raises:
            ConfigurationError: If keys are missing or values are malformed
        """
        try:
            elements = tuple(
                BeamSplitter(
                    int(e['mode_a']), int(e['mode_b']),
                    float(e['reflectivity']), str(e.get('label', ''))
                )
                for e in data['elements']
            )
            return cls(
                mode_count=int(data['mode_count']),
                control=DualRailQubit(int(data['control']['h']), int(data['control']['v'])),
                target=DualRailQubit(int(data['target']['h']), int(data['target']['v'])),
                ancilla_modes=tuple(int(m) for m in data['ancilla_modes']),
                elements=elements,
                heralds=tuple(Herald(int(h['mode']), int(h['count'])) for h in data['heralds']),
                detector_model=detector_model or DetectorModel.from_dict(
                    data.get('detector_model') or {}
                ),
                name=str(data.get('name', 'cnot')),
            )
        except (KeyError, TypeError, ValueError, DimensionError) as e:
            raise ConfigurationError(f"Malformed gate config: {e}")

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'mode_count': self.mode_count,
            'control': {'h': self.control.mode_h, 'v': self.control.mode_v},
            'target': {'h': self.target.mode_h, 'v': self.target.mode_v},
            'ancilla_modes': list(self.ancilla_modes),
            'elements': [
                {
                    'label': e.label,
                    'mode_a': e.mode_a,
                    'mode_b': e.mode_b,
                    'reflectivity': e.reflectivity,
                }
                for e in self.elements
            ],
            'heralds': [{'mode': h.mode, 'count': h.count} for h in self.heralds],
            'detector_model': self.detector_model.to_dict(),
        }

    @classmethod
    def default(cls, detector_model: Optional[DetectorModel] = None) -> "CnotConfig":
        """Shipped configuration: two nonlinear-sign sections between 50/50 beamsplitters"""
        text = DEFAULT_CONFIG.read_text(encoding="utf-8")
        return cls.from_dict(json.loads(text), detector_model)


def _herald_detectors(cfg: CnotConfig) -> Tuple[List[BeamSplitter], List[DetectorSpec], int]:
    """Detector specs for the heralds, plus any chain sub-circuit elements and modes"""
    model       = cfg.detector_model
    elements    = []
    detectors   = []
    mode_count  = cfg.mode_count

    for herald in cfg.heralds:
        if model.kind is DetectorKind.IDEAL:
            detectors.append(DetectorSpec.exact(herald.mode, herald.count, 1.0))
        elif herald.count == 0:
            detectors.append(DetectorSpec.no_click(herald.mode, model.efficiency))
        elif model.kind is DetectorKind.NON_DISCRIMINATING:
            detectors.append(DetectorSpec.click(herald.mode, model.efficiency))
        else:
            transmitted = mode_count
            mode_count  += 1
            elements.append(
                BeamSplitter(herald.mode, transmitted, model.eta_ref, label=f"chain-{herald.mode}")
            )
            detectors.append(DetectorSpec.click(herald.mode, model.efficiency))
            detectors.append(DetectorSpec.no_click(transmitted, model.efficiency))

    return elements, detectors, mode_count


def build_cnot(cfg: CnotConfig) -> Circuit:
    """
    Gate circuit with the configured herald detectors

    With a chain model every "1" herald becomes a one-stage chain: an extra
    beamsplitter onto a fresh vacuum mode, Click on the reflected mode and
    NoClick on the transmitted one. Chain elements follow the gate elements.

    Returns:
        Circuit over cfg.mode_count modes plus one per chain sub-circuit
    """
    extra, detectors, mode_count = _herald_detectors(cfg)
    return Circuit(
        mode_count,
        cfg.elements + tuple(extra),
        tuple(detectors),
        name=f"{cfg.name}[{cfg.detector_model.kind.value}]"
    )


def _as_amplitudes(amplitudes: Sequence[complex]) -> np.ndarray:
    vector = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if vector.shape != (4,):
        raise ConfigurationError(f"Two-qubit input needs 4 amplitudes, got {vector.shape[0]}")
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise ConfigurationError("Two-qubit input cannot be the zero vector")
    return vector / norm


def logical_occupation(
    cfg: CnotConfig, control: int, target: int, mode_count: int
) -> Tuple[int, ...]:
    """Occupation vector of |control target>_L with the ancilla photons in place"""
    occupation = [0] * mode_count
    occupation[cfg.control.rail_for(control)]   = 1
    occupation[cfg.target.rail_for(target)]     = 1
    for mode in cfg.ancilla_modes:
        occupation[mode] = 1
    return tuple(occupation)


def encode_input(cfg: CnotConfig, amplitudes: Sequence[complex], mode_count: int) -> SparseState:
    """Dual-rail encoding of a two-qubit state (|00>, |01>, |10>, |11>, control first)"""
    vector = _as_amplitudes(amplitudes)
    return SparseState(mode_count, {
        logical_occupation(cfg, index >> 1, index & 1, mode_count): vector[index]
        for index in range(4)
    })


def cnot_matrix() -> np.ndarray:
    return np.array([
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ], dtype=complex)


def ideal_output(
    cfg: CnotConfig, amplitudes: Sequence[complex], modes: Sequence[int]
) -> SparseState:
    """
    Ideal CNOT output on the unmeasured modes

    Args:
        cfg: Gate configuration (for the rail wiring)
        amplitudes: Two-qubit input
        modes: Circuit mode labels of the output ensemble, in order

    Returns:
        Normalized state over len(modes) modes
    """
    vector      = cnot_matrix() @ _as_amplitudes(amplitudes)
    position    = {mode: i for i, mode in enumerate(modes)}
    missing     = [m for m in cfg.rails if m not in position]
    if missing:
        raise ConfigurationError(f"Output modes {list(modes)} do not contain rails {missing}")

    amplitudes_out = {}
    for index in range(4):
        occupation = [0] * len(modes)
        occupation[position[cfg.control.rail_for(index >> 1)]]  = 1
        occupation[position[cfg.target.rail_for(index & 1)]]    = 1
        amplitudes_out[tuple(occupation)] = vector[index]
    return SparseState(len(modes), amplitudes_out)


def apply_gate(cfg: CnotConfig, amplitudes: Sequence[complex]) -> Tuple[Ensemble, float]:
    """
    Run the heralded gate on a two-qubit pure input

    Args:
        cfg: Gate configuration including detector model
        amplitudes: Input amplitudes over |00>, |01>, |10>, |11>

    Returns:
        (conditional ensemble on the unmeasured modes, heralding probability)
    """
    circuit     = build_cnot(cfg)
    state       = encode_input(cfg, amplitudes, circuit.mode_count)
    ensemble    = run_circuit(circuit, state)
    return ensemble, heralding_probability(ensemble)


def fidelity_and_probability(e: Ensemble, ideal: SparseState) -> Tuple[float, float]:
    """
    F = sum_b w_b |<ideal|phi_b>|^2 / P and P = sum_b w_b

    Raises:
        UndefinedFidelityError: If the ensemble carries no weight
    """
    probability = e.total_weight()
    if probability <= 0.0:
        raise UndefinedFidelityError("Fidelity is undefined: the herald never fires for this input")

    overlap = math.fsum(w * abs(inner_product(ideal, s)) ** 2 for w, s in e.branches)
    return overlap / probability, probability


def gate_fidelity(cfg: CnotConfig, amplitudes: Sequence[complex]) -> Tuple[float, float]:
    """Fidelity and heralding probability for one input, via the full ensemble"""
    ensemble, _ = apply_gate(cfg, amplitudes)
    ideal       = ideal_output(cfg, amplitudes, ensemble.modes)
    return fidelity_and_probability(ensemble, ideal)
