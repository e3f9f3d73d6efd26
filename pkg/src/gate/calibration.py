"""
Gate calibration
Checks that a gate configuration implements CNOT exactly with ideal detectors
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from src.gate.cnot import LOGICAL_LABELS, CnotConfig, DetectorModel, gate_fidelity
from src.utils.exceptions import CalibrationError, UndefinedFidelityError
from src.utils.logger import Logger, NullLogger


CALIBRATION_TOLERANCE = 1e-9

# Basis inputs plus a control superposition that the gate must entangle
CALIBRATION_INPUTS = {
    "|00>": (1.0, 0.0, 0.0, 0.0),
    "|01>": (0.0, 1.0, 0.0, 0.0),
    "|10>": (0.0, 0.0, 1.0, 0.0),
    "|11>": (0.0, 0.0, 0.0, 1.0),
    "(|00>+|10>)/sqrt2": (1 / math.sqrt(2), 0.0, 1 / math.sqrt(2), 0.0),
}


@dataclass
class CalibrationReport:
    """Per-input fidelity and heralding probability of the ideal-detector gate"""
    config_name: str
    fidelities: Dict[str, float]        = field(default_factory=dict)
    probabilities: Dict[str, float]     = field(default_factory=dict)
    errors: List[str]                   = field(default_factory=list)
    tolerance: float                    = CALIBRATION_TOLERANCE

    @property
    def herald_probability(self) -> float:
        if not self.probabilities:
            return 0.0
        return sum(self.probabilities.values()) / len(self.probabilities)

    @property
    def herald_spread(self) -> float:
        if not self.probabilities:
            return 0.0
        return max(self.probabilities.values()) - min(self.probabilities.values())

    @property
    def passed(self) -> bool:
        return not self.errors

    def to_dict(self) -> Dict:
        return {
            'config': self.config_name,
            'passed': self.passed,
            'herald_probability': self.herald_probability,
            'herald_spread': self.herald_spread,
            'fidelities': dict(self.fidelities),
            'probabilities': dict(self.probabilities),
            'errors': list(self.errors),
        }


def calibrate(
    cfg: CnotConfig,
    strict: bool                = False,
    tolerance: float            = CALIBRATION_TOLERANCE,
    logger: Optional[Logger]    = None
) -> CalibrationReport:
    """
    Run the gate with ideal detectors on the calibration inputs

    Every input must reach fidelity 1 and the heralding probability must not
    depend on the input, both to `tolerance`.

    Args:
        cfg: Gate configuration; its detector model is replaced by the ideal one
        strict: Raise instead of returning a failed report
        tolerance: Allowed deviation
        logger: Optional logger for per-input debug lines

    Returns:
        CalibrationReport

    Raises:
        CalibrationError: If strict and calibration fails
    """
    logger  = logger or NullLogger()
    ideal   = cfg.with_detector_model(DetectorModel.ideal())
    report  = CalibrationReport(cfg.name, tolerance=tolerance)

    for label, amplitudes in CALIBRATION_INPUTS.items():
        try:
            fidelity, probability = gate_fidelity(ideal, amplitudes)
        except UndefinedFidelityError:
            report.fidelities[label]    = 0.0
            report.probabilities[label] = 0.0
            report.errors.append(f"{label}: never heralded")
            continue

        report.fidelities[label]    = fidelity
        report.probabilities[label] = probability
        logger.debug(f"  {label}: F={fidelity:.12f} P={probability:.12f}")

        if abs(fidelity - 1.0) > tolerance:
            report.errors.append(f"{label}: fidelity {fidelity:.12f} != 1")

    if report.probabilities and report.herald_spread > tolerance:
        report.errors.append(
            f"heralding probability depends on the input (spread {report.herald_spread:.3e})"
        )

    if strict and not report.passed:
        raise CalibrationError(
            f"Gate config '{cfg.name}' failed calibration: " + "; ".join(report.errors),
            report
        )
    return report


def truth_table(cfg: CnotConfig) -> Dict[str, float]:
    """Basis-input fidelities of the configured detector model"""
    table = {}
    for index, label in enumerate(LOGICAL_LABELS):
        amplitudes      = [0.0] * 4
        amplitudes[index] = 1.0
        table[label], _ = gate_fidelity(cfg, amplitudes)
    return table
