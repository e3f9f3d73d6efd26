"""
Detection scheme builders
Cascade N-port trees, unrolled TDM loops and non-deterministic chains
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from src.optics.detection import DetectorSpec
from src.optics.elements import BeamSplitter, Circuit, LossChannel, chain_reflectivities
from src.utils.exceptions import ConfigurationError, ConstructionError


INPUT_MODE = 0


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class CascadeConfig:
    """Tree N-port followed by N click detectors"""
    ports: int
    efficiency: float = 1.0

    def __post_init__(self):
        if self.ports < 2 or self.ports & (self.ports - 1):
            raise ConstructionError(
                f"Tree N-port needs a power of two >= 2 ports, got {self.ports}"
            )
        _check_probability("efficiency", self.efficiency)


@dataclass(frozen=True)
class TdmConfig:
    """
    Fiber loop with a weak out-coupler, unrolled into `round_trips` time-bins

    `couplings` overrides the constant `coupling` with one value per round trip.
    """
    coupling: float
    loop_transmission: float                    = 1.0
    round_trips: int                            = 1
    efficiency: float                           = 1.0
    couplings: Optional[Tuple[float, ...]]      = None

    def __post_init__(self):
        if self.round_trips < 1:
            raise ConfigurationError(f"round_trips must be positive, got {self.round_trips}")
        _check_probability("coupling", self.coupling)
        _check_probability("loop_transmission", self.loop_transmission)
        _check_probability("efficiency", self.efficiency)

        if self.couplings is not None:
            object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))
            if len(self.couplings) != self.round_trips:
                raise ConfigurationError(
                    f"{len(self.couplings)} couplings given for {self.round_trips} round trips"
                )
            for value in self.couplings:
                _check_probability("coupling", value)

    def coupling_schedule(self) -> List[float]:
        if self.couplings is not None:
            return list(self.couplings)
        return [self.coupling] * self.round_trips


@dataclass(frozen=True)
class ChainConfig:
    """k low-reflectivity beamsplitters feeding '>0' detectors, terminal '0' detector"""
    k: int
    eta_ref: float
    efficiency: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError(f"k must be positive, got {self.k}")
        _check_probability("eta_ref", self.eta_ref)
        _check_probability("efficiency", self.efficiency)


def uniform_tdm_couplings(round_trips: int) -> Tuple[float, ...]:
    """Out-coupling 1/R, 1/(R-1), ..., 1 so a lossless loop fills every bin equally"""
    if round_trips < 1:
        raise ConfigurationError(f"round_trips must be positive, got {round_trips}")
    return tuple(1.0 / (round_trips - r) for r in range(round_trips))


def build_tree_nport(N: int, efficiency: float = 1.0) -> Circuit:
    """
    Tree of 50/50 beamsplitters splitting mode 0 into N outputs

    Args:
        N: Output ports, a power of two >= 2
        efficiency: Efficiency of the click detector on every output

    Returns:
        N-mode circuit with N-1 beamsplitters and N click detectors

    Raises:
        ConstructionError: If N is not a power of two
    """
    config      = CascadeConfig(N, efficiency)
    elements    = []
    active      = [INPUT_MODE]
    next_mode   = 1

    while len(active) < config.ports:
        level = []
        for mode in active:
            elements.append(BeamSplitter(mode, next_mode, 0.5))
            level.extend([mode, next_mode])
            next_mode += 1
        active = level

    detectors = [DetectorSpec.click(m, efficiency) for m in range(config.ports)]
    return Circuit(config.ports, tuple(elements), tuple(detectors), name=f"tree-{N}")


def build_tdm_chain(cfg: TdmConfig) -> Circuit:
    """
    Unrolled fiber loop

    Round trip r out-couples the loop mode onto time-bin mode r, then the
    remaining loop mode passes the lossy fiber. The last mode is the loop
    remainder and carries no detector.

    Returns:
        Circuit over round_trips + 1 modes; detectors on modes 0..R-1
    """
    elements    = []
    loop_mode   = INPUT_MODE

    for r, coupling in enumerate(cfg.coupling_schedule()):
        fresh = r + 1
        elements.append(BeamSplitter(loop_mode, fresh, coupling, label=f"bin-{r}"))
        loop_mode = fresh
        if cfg.loop_transmission < 1.0:
            elements.append(LossChannel(loop_mode, cfg.loop_transmission))

    detectors = [DetectorSpec.click(r, cfg.efficiency) for r in range(cfg.round_trips)]
    return Circuit(cfg.round_trips + 1, tuple(elements), tuple(detectors), name="tdm")


def build_chain_detector(cfg: ChainConfig) -> Circuit:
    """
    Non-deterministic k-photon detector

    Stage i splits the bus mode with reflectivity eta_i; the reflected part keeps
    its mode label and meets a Click detector, the transmitted part moves to a
    fresh mode that becomes the bus. The final bus meets a NoClick detector.

    Returns:
        (k+1)-mode circuit; modes 0..k-1 click, mode k silent

    Raises:
        InfeasibleUniformityError: If k * eta_ref > 1
    """
    reflectivities  = chain_reflectivities(cfg.eta_ref, cfg.k)
    elements        = [
        BeamSplitter(stage, stage + 1, eta, label=f"stage-{stage + 1}")
        for stage, eta in enumerate(reflectivities)
    ]
    detectors = [DetectorSpec.click(stage, cfg.efficiency) for stage in range(cfg.k)]
    detectors.append(DetectorSpec.no_click(cfg.k, cfg.efficiency))

    return Circuit(cfg.k + 1, tuple(elements), tuple(detectors), name=f"chain-{cfg.k}")
