"""
Linear-optical circuit elements
Beamsplitters and loss channels acting on Fock states, and circuits built from them
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.fock import Branch, Ensemble, OccupationVector, SparseState
from src.optics.detection import DetectorSpec, measure
from src.utils.exceptions import (
    ConfigurationError, DimensionError, InfeasibleUniformityError, UsageError
)


UNIFORMITY_SLACK = 1e-12


@dataclass(frozen=True)
class BeamSplitter:
    """
    Real beamsplitter between two modes

    a+ -> sqrt(eta) a+ + sqrt(1-eta) b+
    b+ -> sqrt(1-eta) a+ - sqrt(eta) b+

    A photon keeps its mode label with probability eta (the reflected port).
    """
    mode_a: int
    mode_b: int
    reflectivity: float
    label: str = ""

    def __post_init__(self):
        if not 0.0 <= self.reflectivity <= 1.0:
            raise ConfigurationError(f"Reflectivity {self.reflectivity} outside [0, 1]")
        if self.mode_a == self.mode_b:
            raise DimensionError(f"Beamsplitter needs two distinct modes, got {self.mode_a} twice")
        if self.mode_a < 0 or self.mode_b < 0:
            raise DimensionError(f"Negative mode index in ({self.mode_a}, {self.mode_b})")

    @property
    def modes(self) -> Tuple[int, int]:
        return (self.mode_a, self.mode_b)

    def matrix(self) -> np.ndarray:
        """2x2 mode transformation, columns are the images of (a+, b+)"""
        r = math.sqrt(self.reflectivity)
        t = math.sqrt(1.0 - self.reflectivity)
        return np.array([[r, t], [t, -r]])


@dataclass(frozen=True)
class LossChannel:
    """Photon loss on one mode; each photon survives with probability `transmission`"""
    mode: int
    transmission: float

    def __post_init__(self):
        if not 0.0 <= self.transmission <= 1.0:
            raise ConfigurationError(f"Transmission {self.transmission} outside [0, 1]")
        if self.mode < 0:
            raise DimensionError(f"Negative mode index {self.mode}")

    @property
    def modes(self) -> Tuple[int]:
        return (self.mode,)


Element = Union[BeamSplitter, LossChannel]


@dataclass(frozen=True)
class Circuit:
    """Ordered elements followed by terminal detectors"""
    mode_count: int
    elements: Tuple[Element, ...]           = ()
    detectors: Tuple[DetectorSpec, ...]     = ()
    name: str                               = ""

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "detectors", tuple(self.detectors))

        if self.mode_count < 1:
            raise DimensionError(f"mode_count must be positive, got {self.mode_count}")

        for element in self.elements:
            for mode in element.modes:
                if mode >= self.mode_count:
                    raise DimensionError(
                        f"{type(element).__name__} references mode {mode} in a "
                        f"{self.mode_count}-mode circuit"
                    )

        seen = set()
        for detector in self.detectors:
            if detector.mode >= self.mode_count:
                raise DimensionError(
                    f"Detector on mode {detector.mode} in a {self.mode_count}-mode circuit"
                )
            if detector.mode in seen:
                raise DimensionError(f"Two detectors on mode {detector.mode}")
            seen.add(detector.mode)

    @property
    def beamsplitters(self) -> List[BeamSplitter]:
        return [e for e in self.elements if isinstance(e, BeamSplitter)]

    @property
    def detector_modes(self) -> List[int]:
        return [d.mode for d in self.detectors]

    def with_detectors(self, detectors: Sequence[DetectorSpec]) -> "Circuit":
        return Circuit(self.mode_count, self.elements, tuple(detectors), self.name)

    def input_state(self, counts: Dict[int, int]) -> SparseState:
        """Fock input with `counts[mode]` photons per mode, vacuum elsewhere"""
        occupation = [0] * self.mode_count
        for mode, n in counts.items():
            if not 0 <= mode < self.mode_count:
                raise DimensionError(
                    f"Input mode {mode} outside the {self.mode_count}-mode circuit"
                )
            occupation[mode] = n
        return SparseState.basis(occupation)


def _expand_pair(
    n_a: int,
    n_b: int,
    bs: BeamSplitter
) -> Dict[Tuple[int, int], float]:
    """
    Fock-basis image of |n_a, n_b> under the beamsplitter

    Expands (r a+ + t b+)^n_a (t a+ - r b+)^n_b / sqrt(n_a! n_b!) and
    applies (a+)^p (b+)^q |0,0> = sqrt(p! q!) |p, q>.
    """
    r       = math.sqrt(bs.reflectivity)
    t       = math.sqrt(1.0 - bs.reflectivity)
    total   = n_a + n_b
    coeffs  = [0.0] * (total + 1)

    for i in range(n_a + 1):
        left = math.comb(n_a, i) * r ** i * t ** (n_a - i)
        if left == 0.0:
            continue
        for j in range(n_b + 1):
            right = math.comb(n_b, j) * t ** j * (-r) ** (n_b - j)
            if right == 0.0:
                continue
            coeffs[i + j] += left * right

    prefactor   = 1.0 / math.sqrt(math.factorial(n_a) * math.factorial(n_b))
    image       = {}
    for p, c in enumerate(coeffs):
        if c != 0.0:
            q               = total - p
            image[(p, q)]   = prefactor * c * math.sqrt(math.factorial(p) * math.factorial(q))
    return image


def apply_beamsplitter(s: SparseState, bs: BeamSplitter) -> SparseState:
    """
    Apply a beamsplitter to a pure state

    Args:
        s: Input state
        bs: Beamsplitter

    Returns:
        Output state; photon number is conserved component by component

    Raises:
        DimensionError: If a beamsplitter mode is outside the state
    """
    if bs.mode_a >= s.mode_count or bs.mode_b >= s.mode_count:
        raise DimensionError(
            f"Beamsplitter on modes ({bs.mode_a}, {bs.mode_b}) for a {s.mode_count}-mode state"
        )

    cache: Dict[Tuple[int, int], Dict[Tuple[int, int], float]] = {}
    result: Dict[OccupationVector, complex] = {}

    for counts, amplitude in s.amplitudes.items():
        pair = (counts[bs.mode_a], counts[bs.mode_b])
        if pair not in cache:
            cache[pair] = _expand_pair(pair[0], pair[1], bs)

        for (p, q), coefficient in cache[pair].items():
            target              = list(counts)
            target[bs.mode_a]   = p
            target[bs.mode_b]   = q
            key                 = tuple(target)
            result[key]         = result.get(key, 0j) + amplitude * coefficient

    return SparseState(s.mode_count, result)


def apply_loss(e: Ensemble, ch: LossChannel) -> Ensemble:
    """
    Apply photon loss to one mode of every branch

    Branch j holds the Kraus image for j lost photons,
    sum_k sqrt(C(k,j) (1-t)^j t^(k-j)) |k-j><k|, so coherences inside a
    branch survive and total weight is preserved.

    Args:
        e: Input ensemble
        ch: Loss channel

    Returns:
        Ensemble with one branch per (input branch, lost photon count)
    """
    position    = e.position_of(ch.mode)
    t           = ch.transmission
    branches    = []

    if t == 1.0:
        return e

    for weight, state in e.branches:
        max_photons = max(counts[position] for counts in state.amplitudes)
        for lost in range(max_photons + 1):
            amplitudes: Dict[OccupationVector, complex] = {}
            for counts, amplitude in state.amplitudes.items():
                k = counts[position]
                if k < lost:
                    continue
                kraus = math.sqrt(math.comb(k, lost) * (1.0 - t) ** lost * t ** (k - lost))
                if kraus == 0.0:
                    continue
                target              = list(counts)
                target[position]    = k - lost
                amplitudes[tuple(target)] = amplitude * kraus

            image = SparseState(state.mode_count, amplitudes)
            if image.is_zero():
                continue
            probability = image.norm() ** 2
            branches.append(Branch(weight * probability, image.normalized()))

    return Ensemble(tuple(branches), e.modes)


def apply_element(e: Ensemble, element: Element) -> Ensemble:
    """Apply a beamsplitter or loss channel to every branch of an ensemble"""
    if isinstance(element, LossChannel):
        return apply_loss(e, element)

    positions = BeamSplitter(
        e.position_of(element.mode_a),
        e.position_of(element.mode_b),
        element.reflectivity
    )
    return Ensemble(
        tuple(Branch(w, apply_beamsplitter(s, positions)) for w, s in e.branches),
        e.modes
    )


def chain_reflectivities(eta_first: float, k: int) -> List[float]:
    """
    Reflectivities giving uniform single-photon arrival along a k-stage chain

    eta_i = eta_(i-1) / (1 - eta_(i-1)); each of the k reflected modes then
    receives a photon with probability eta_first.

    Args:
        eta_first: Reflectivity of the first beamsplitter, in (0, 1]
        k: Number of stages

    Returns:
        [eta_1, ..., eta_k]

    Raises:
        InfeasibleUniformityError: If eta_first > 1/k
    """
    if k < 1:
        raise ConfigurationError(f"Chain length must be positive, got {k}")
    if not 0.0 < eta_first <= 1.0:
        raise ConfigurationError(f"First reflectivity {eta_first} outside (0, 1]")
    if eta_first * k > 1.0 + UNIFORMITY_SLACK:
        raise InfeasibleUniformityError(
            f"Uniform arrival over {k} stages needs eta_first <= 1/{k}, got {eta_first}"
        )

    reflectivities = [eta_first]
    for _ in range(k - 1):
        previous = reflectivities[-1]
        reflectivities.append(min(1.0, previous / (1.0 - previous)))
    return reflectivities


def transfer_matrix(mode_count: int, elements: Sequence[Element]) -> np.ndarray:
    """
    Single-photon transfer matrix M[out, in] of the element sequence

    Loss channels scale their mode by sqrt(transmission), so the matrix is
    sub-unitary when losses are present.
    """
    matrix = np.eye(mode_count)
    for element in elements:
        step = np.eye(mode_count)
        if isinstance(element, BeamSplitter):
            a, b = element.mode_a, element.mode_b
            step[np.ix_([a, b], [a, b])] = element.matrix()
        else:
            step[element.mode, element.mode] = math.sqrt(element.transmission)
        matrix = step @ matrix
    return matrix


def propagate(circuit: Circuit, state: SparseState) -> Ensemble:
    """
    Run the circuit elements on a pure input, without detection

    Beamsplitters act on the pure state until the first loss channel; from
    there on the evolution is carried as an ensemble.
    """
    if state.mode_count != circuit.mode_count:
        raise DimensionError(
            f"{state.mode_count}-mode input for a {circuit.mode_count}-mode circuit"
        )

    elements    = list(circuit.elements)
    index       = 0
    while index < len(elements) and isinstance(elements[index], BeamSplitter):
        state = apply_beamsplitter(state, elements[index])
        index += 1

    ensemble = Ensemble.pure(state)
    for element in elements[index:]:
        ensemble = apply_element(ensemble, element)
    return ensemble


def run_circuit(circuit: Circuit, state: SparseState) -> Ensemble:
    """
    Run elements then condition on every detector

    Args:
        circuit: Circuit to run
        state: Normalized input over circuit.mode_count modes

    Returns:
        Conditional ensemble over the unmeasured modes; its weight is the
        joint heralding probability
    """
    if not state.is_normalized():
        raise UsageError("Circuit input must be normalized")

    ensemble = propagate(circuit, state)
    for detector in circuit.detectors:
        ensemble = measure(ensemble, detector)
    return ensemble
