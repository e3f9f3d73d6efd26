"""
Classical photon-arrival oracle
Brute-force enumeration of independent photon outcomes for non-recombining networks

Only depends on the optics layer for reading circuits; never on the closed
forms or the scheme simulators it is used to check.
"""
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.fock import SparseState
from src.optics.detection import click_pattern_distribution
from src.optics.elements import BeamSplitter, Circuit, propagate, transfer_matrix
from src.utils.exceptions import ConfigurationError, EnumerationLimitError


MAX_PHOTONS     = 12
SUM_SLACK       = 1e-12


@dataclass(frozen=True)
class ArrivalModel:
    """
    Per-detector arrival probabilities of a single photon

    Whatever is left of the unit probability never reaches a detector.
    `efficiency` is either shared or given per detector.
    """
    arrival_probs: Tuple[float, ...]
    efficiency: Union[float, Tuple[float, ...]] = 1.0

    def __post_init__(self):
        object.__setattr__(self, "arrival_probs", tuple(float(p) for p in self.arrival_probs))
        if isinstance(self.efficiency, (list, tuple)):
            object.__setattr__(self, "efficiency", tuple(float(e) for e in self.efficiency))
            if len(self.efficiency) != len(self.arrival_probs):
                raise ConfigurationError("One efficiency per detector is required")
            efficiencies = self.efficiency
        else:
            efficiencies = (float(self.efficiency),)

        for p in self.arrival_probs + efficiencies:
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"Probability {p} outside [0, 1]")
        if sum(self.arrival_probs) > 1.0 + SUM_SLACK:
            raise ConfigurationError(
                f"Arrival probabilities sum to {sum(self.arrival_probs)} > 1"
            )

    @property
    def detector_count(self) -> int:
        return len(self.arrival_probs)

    def detection_probs(self) -> List[float]:
        """Probability a single photon is registered by each detector"""
        if isinstance(self.efficiency, tuple):
            return [p * e for p, e in zip(self.arrival_probs, self.efficiency)]
        return [p * self.efficiency for p in self.arrival_probs]


@dataclass
class ClickDistribution:
    """Exact distribution of detected photon counts per detector"""
    n: int
    counts: Dict[Tuple[int, ...], float] = field(default_factory=dict)

    def total(self) -> float:
        return math.fsum(self.counts.values())

    def click_patterns(self) -> Dict[Tuple[int, ...], float]:
        """Pattern (1 = click) -> probability"""
        patterns: Dict[Tuple[int, ...], float] = {}
        for detected, p in self.counts.items():
            pattern             = tuple(1 if c > 0 else 0 for c in detected)
            patterns[pattern]   = patterns.get(pattern, 0.0) + p
        return dict(sorted(patterns.items()))

    def perceived(self) -> List[float]:
        """P(m clicks) for m = 0 .. detector count"""
        width   = len(next(iter(self.counts))) if self.counts else 0
        result  = [0.0] * (width + 1)
        for pattern, p in self.click_patterns().items():
            result[sum(pattern)] += p
        return result

    def pattern_probability(self, pattern: Sequence[Optional[int]]) -> float:
        """
        Probability of a partial pattern

        Args:
            pattern: 1 = must click, 0 = must stay silent, None = either
        """
        total = 0.0
        for observed, p in self.click_patterns().items():
            if all(want is None or want == got for want, got in zip(pattern, observed)):
                total += p
        return total


def enumerate_click_patterns(
    n: int,
    model: ArrivalModel,
    max_photons: int = MAX_PHOTONS
) -> ClickDistribution:
    """
    Enumerate all outcomes of n independent photons

    Each photon is either registered by one detector or not registered at all.
    Outcome multisets are weighted by their multinomial coefficient.

    Args:
        n: Incident photons
        model: Arrival and detection probabilities
        max_photons: Refusal bound

    Returns:
        ClickDistribution keyed by registered counts per detector

    Raises:
        EnumerationLimitError: If n exceeds the bound
    """
    if n < 0:
        raise ConfigurationError(f"Photon number must be non-negative, got {n}")
    if n > max_photons:
        raise EnumerationLimitError(
            f"Enumeration refused for n={n}; the oracle handles at most {max_photons} photons"
        )

    detected    = model.detection_probs()
    missed      = max(0.0, 1.0 - sum(detected))
    outcomes    = list(range(model.detector_count + 1))
    probs       = detected + [missed]
    result: Dict[Tuple[int, ...], float] = {}

    for multiset in itertools.combinations_with_replacement(outcomes, n):
        occupancy = [0] * len(outcomes)
        for outcome in multiset:
            occupancy[outcome] += 1

        weight = math.factorial(n)
        for c in occupancy:
            weight //= math.factorial(c)

        p = float(weight)
        for c, q in zip(occupancy, probs):
            if c:
                p *= q ** c
        if p == 0.0:
            continue

        key         = tuple(occupancy[:-1])
        result[key] = result.get(key, 0.0) + p

    return ClickDistribution(n, dict(sorted(result.items())))


def is_recombining(circuit: Circuit, input_mode: int = 0) -> bool:
    """
    True when two signal-carrying modes meet on a beamsplitter

    Trees and chains only ever split a signal mode against a fresh vacuum mode.
    """
    lit = {input_mode}
    for element in circuit.elements:
        if not isinstance(element, BeamSplitter):
            continue
        a_lit = element.mode_a in lit
        b_lit = element.mode_b in lit
        if a_lit and b_lit:
            return True
        if (a_lit or b_lit) and element.reflectivity not in (0.0, 1.0):
            lit.update(element.modes)
        elif b_lit and element.reflectivity == 0.0:
            lit.discard(element.mode_b)
            lit.add(element.mode_a)
        elif a_lit and element.reflectivity == 0.0:
            lit.discard(element.mode_a)
            lit.add(element.mode_b)
    return False


def arrival_model_for(circuit: Circuit, input_mode: int = 0) -> ArrivalModel:
    """
    Classical arrival model of a non-recombining circuit

    Raises:
        EnumerationLimitError: If the circuit recombines signal paths
    """
    if is_recombining(circuit, input_mode):
        raise EnumerationLimitError(
            f"Circuit '{circuit.name or 'unnamed'}' recombines photon paths; "
            "the independent-photon model does not apply"
        )

    column  = transfer_matrix(circuit.mode_count, circuit.elements)[:, input_mode]
    arrival = tuple(float(abs(column[d.mode]) ** 2) for d in circuit.detectors)
    return ArrivalModel(arrival, tuple(d.efficiency for d in circuit.detectors))


@dataclass
class DiscrepancyReport:
    """Oracle versus Fock simulation on one circuit"""
    circuit: str
    n: int
    max_abs_diff: float
    pattern_count: int
    parameters: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'circuit': self.circuit,
            'n': self.n,
            'max_abs_diff': self.max_abs_diff,
            'pattern_count': self.pattern_count,
            'parameters': self.parameters,
        }


def oracle_vs_quantum(circuit: Circuit, n: int, input_mode: int = 0) -> DiscrepancyReport:
    """
    Compare oracle click patterns with the Fock simulation of the same circuit

    Args:
        circuit: Non-recombining circuit with click-type detectors
        n: Photons injected in `input_mode`
        input_mode: Input mode

    Returns:
        DiscrepancyReport with the largest pattern-probability difference

    Raises:
        EnumerationLimitError: For recombining circuits or too many photons
    """
    model           = arrival_model_for(circuit, input_mode)
    classical       = enumerate_click_patterns(n, model).click_patterns()

    occupation              = [0] * circuit.mode_count
    occupation[input_mode]  = n
    ensemble                = propagate(circuit, SparseState.basis(occupation))
    quantum                 = click_pattern_distribution(ensemble, circuit.detectors)

    patterns    = set(classical) | set(quantum)
    max_diff    = max(
        (abs(classical.get(p, 0.0) - quantum.get(p, 0.0)) for p in patterns),
        default=0.0
    )

    return DiscrepancyReport(
        circuit=circuit.name or "unnamed",
        n=n,
        max_abs_diff=max_diff,
        pattern_count=len(patterns),
        parameters={
            'mode_count': circuit.mode_count,
            'input_mode': input_mode,
            'arrival_probs': list(model.arrival_probs),
            'efficiencies': [d.efficiency for d in circuit.detectors],
        },
    )
