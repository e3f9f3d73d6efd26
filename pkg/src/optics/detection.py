"""
Detector models
Inefficient click / no-click and number-resolving detection with conditioning
"""
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.fock import Branch, Ensemble
from src.utils.exceptions import ConfigurationError, UsageError


BRANCH_THRESHOLD = 1e-15


class Condition(Enum):
    """Outcome a detector is conditioned on"""
    NO_CLICK    = "no_click"
    CLICK       = "click"
    EXACT       = "exact"


@dataclass(frozen=True)
class DetectorSpec:
    """Terminal detector on one mode"""
    mode: int
    efficiency: float           = 1.0
    condition: Condition        = Condition.CLICK
    count: Optional[int]        = None

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ConfigurationError(f"Detector efficiency {self.efficiency} outside [0, 1]")
        if self.mode < 0:
            raise ConfigurationError(f"Negative detector mode {self.mode}")
        if not isinstance(self.condition, Condition):
            object.__setattr__(self, "condition", Condition(self.condition))
        if self.condition is Condition.EXACT:
            if self.count is None or self.count < 0:
                raise ConfigurationError(
                    f"Exact-count detector on mode {self.mode} needs a count >= 0"
                )
        elif self.count is not None:
            raise ConfigurationError(f"Only exact-count detectors take a count (mode {self.mode})")

    @classmethod
    def click(cls, mode: int, efficiency: float = 1.0) -> "DetectorSpec":
        return cls(mode, efficiency, Condition.CLICK)

    @classmethod
    def no_click(cls, mode: int, efficiency: float = 1.0) -> "DetectorSpec":
        return cls(mode, efficiency, Condition.NO_CLICK)

    @classmethod
    def exact(cls, mode: int, count: int, efficiency: float = 1.0) -> "DetectorSpec":
        return cls(mode, efficiency, Condition.EXACT, count)

    def with_condition(self, condition: Condition, count: Optional[int] = None) -> "DetectorSpec":
        return DetectorSpec(self.mode, self.efficiency, condition, count)

    def factor(self, photons: int) -> float:
        return outcome_factor(self.condition, self.efficiency, photons, self.count)

    def describe(self) -> str:
        if self.condition is Condition.EXACT:
            return f"mode {self.mode}: exactly {self.count} (eff {self.efficiency:g})"
        return f"mode {self.mode}: {self.condition.value} (eff {self.efficiency:g})"


def outcome_factor(
    condition: Condition,
    efficiency: float,
    photons: int,
    count: Optional[int] = None
) -> float:
    """
    Probability that `photons` incident photons produce the conditioned outcome

    Args:
        condition: Conditioned outcome
        efficiency: Per-photon detection probability
        photons: Photons reaching the detector
        count: Required detected count for Condition.EXACT

    Returns:
        Weight factor in [0, 1]
    """
    missed = (1.0 - efficiency) ** photons

    if condition is Condition.NO_CLICK:
        return missed
    if condition is Condition.CLICK:
        return 1.0 - missed
    if count is None or count > photons:
        return 0.0
    return math.comb(photons, count) * efficiency ** count * (1.0 - efficiency) ** (photons - count)


def measure(e: Ensemble, d: DetectorSpec, threshold: float = BRANCH_THRESHOLD) -> Ensemble:
    """
    Condition an ensemble on a detector outcome and remove the measured mode

    Each branch is expanded in the Fock basis of the measured mode; every photon
    number n becomes its own branch with weight w * p(n) * factor(n). Coherences
    between different n are dropped.

    Args:
        e: Input ensemble
        d: Detector specification
        threshold: Branches lighter than this are discarded

    Returns:
        Sub-normalized ensemble over the remaining modes

    Raises:
        UsageError: If the detector mode is not present in the ensemble
    """
    position    = e.position_of(d.mode)
    remaining   = e.modes[:position] + e.modes[position + 1:]
    branches    = []

    for weight, state in e.branches:
        for photons, part in state.partition_by_mode(position).items():
            factor = d.factor(photons)
            if factor == 0.0:
                continue

            probability = part.norm() ** 2
            new_weight  = weight * probability * factor
            if new_weight < threshold:
                continue

            branches.append(Branch(new_weight, part.normalized()))

    return Ensemble(tuple(branches), remaining)


def measure_all(e: Ensemble, detectors: Sequence[DetectorSpec]) -> Ensemble:
    """Apply several detectors in order"""
    for detector in detectors:
        e = measure(e, detector)
    return e


def heralding_probability(e: Ensemble) -> float:
    """Joint probability of every condition applied so far, i.e. tr(rho)"""
    return e.total_weight()


def count_distribution(e: Ensemble, modes: Sequence[int]) -> Dict[Tuple[int, ...], float]:
    """
    Born-rule photon-number distribution over a set of modes

    Args:
        e: Ensemble (modes outside `modes` are traced out)
        modes: Circuit mode labels to read

    Returns:
        Photon-count tuple (in `modes` order) -> probability
    """
    positions   = [e.position_of(m) for m in modes]
    result: Dict[Tuple[int, ...], float] = {}

    for weight, state in e.branches:
        for counts, amplitude in state.amplitudes.items():
            key         = tuple(counts[p] for p in positions)
            result[key] = result.get(key, 0.0) + weight * abs(amplitude) ** 2

    return dict(sorted(result.items()))


def click_pattern_distribution(
    e: Ensemble,
    detectors: Sequence[DetectorSpec]
) -> Dict[Tuple[int, ...], float]:
    """
    Distribution over click patterns of non-discriminating detectors

    Equivalent to measuring every detector with Click / NoClick in turn and
    summing branch weights per pattern, computed from the photon-number
    distribution so no intermediate branches are stored.

    Returns:
        Pattern (1 = click, 0 = silent, in `detectors` order) -> probability
    """
    counts      = count_distribution(e, [d.mode for d in detectors])
    patterns: Dict[Tuple[int, ...], float] = {}

    for photon_counts, probability in counts.items():
        options = []
        for detector, photons in zip(detectors, photon_counts):
            silent = outcome_factor(Condition.NO_CLICK, detector.efficiency, photons)
            choice = [(0, silent)]
            if photons > 0:
                choice.append((1, 1.0 - silent))
            options.append(choice)

        for combination in itertools.product(*options):
            weight = probability
            for _, factor in combination:
                weight *= factor
            if weight == 0.0:
                continue
            pattern             = tuple(bit for bit, _ in combination)
            patterns[pattern]   = patterns.get(pattern, 0.0) + weight

    return dict(sorted(patterns.items()))


def clicks_histogram(patterns: Dict[Tuple[int, ...], float]) -> List[float]:
    """Probability of m clicks, m = 0 .. number of detectors"""
    width   = len(next(iter(patterns))) if patterns else 0
    result  = [0.0] * (width + 1)
    for pattern, probability in patterns.items():
        result[sum(pattern)] += probability
    return result
