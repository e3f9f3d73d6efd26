"""
Worst-case gate metrics
Minimum fidelity and heralding probability over two-qubit pure inputs, and sweeps of
both across detector parameters
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from src.gate.cnot import CnotConfig, DetectorKind, DetectorModel, LOGICAL_LABELS
from src.gate.response import HeraldedResponse
from src.utils.config import DEFAULT_SETTINGS, Settings
from src.utils.exceptions import ConfigurationError, UndefinedFidelityError
from src.utils.logger import Logger, NullLogger


ANGLE_COUNT     = 6
HALF_PI         = math.pi / 2
TWO_PI          = 2 * math.pi
BOUNDS          = [(0.0, HALF_PI)] * 3 + [(0.0, TWO_PI)] * 3
SCALAR_XATOL    = 1e-7


@dataclass(frozen=True)
class SearchSettings:
    """Multi-start coordinate refinement parameters"""
    starts: int         = 8
    tolerance: float    = 1e-6
    max_sweeps: int     = 6
    seed: int           = 1234
    probes_only: bool   = False

    @classmethod
    def from_settings(cls, settings: Settings, probes_only: bool = False) -> "SearchSettings":
        return cls(
            settings.search_starts,
            settings.search_tolerance,
            settings.search_max_sweeps,
            settings.seed,
            probes_only,
        )


@dataclass
class GateMetrics:
    """Worst-case fidelity and heralding probability of one gate configuration"""
    fidelity_min: float
    probability_at_fmin: float
    probability_min: float
    argmin_params: List[float]
    argmin_state: List[complex]
    probe_fidelity_min: float
    detector_model: str = ""

    def describe_state(self) -> str:
        terms = []
        for label, amplitude in zip(LOGICAL_LABELS, self.argmin_state):
            if abs(amplitude) > 1e-9:
                terms.append(f"({amplitude.real:+.4f}{amplitude.imag:+.4f}j)|{label}>")
        return " ".join(terms)

    def to_dict(self) -> Dict:
        return {
            'f_min': self.fidelity_min,
            'p_at_fmin': self.probability_at_fmin,
            'p_min': self.probability_min,
            'argmin_params': list(self.argmin_params),
            'argmin_state': self.describe_state(),
            'probe_f_min': self.probe_fidelity_min,
            'detector_model': self.detector_model,
        }


def state_from_angles(params: Sequence[float]) -> np.ndarray:
    """
    Normalized two-qubit state from three polar and three phase angles

    alpha = (cos t1, sin t1 cos t2 e^{i p1}, sin t1 sin t2 cos t3 e^{i p2},
             sin t1 sin t2 sin t3 e^{i p3})
    """
    if len(params) != ANGLE_COUNT:
        raise ConfigurationError(f"Expected {ANGLE_COUNT} angles, got {len(params)}")
    t1, t2, t3, p1, p2, p3 = params
    return np.array([
        math.cos(t1),
        math.sin(t1) * math.cos(t2) * np.exp(1j * p1),
        math.sin(t1) * math.sin(t2) * math.cos(t3) * np.exp(1j * p2),
        math.sin(t1) * math.sin(t2) * math.sin(t3) * np.exp(1j * p3),
    ], dtype=complex)


def angles_from_state(state: Sequence[complex]) -> List[float]:
    """
    Angles reproducing `state` up to a global phase

    Phases of vanishing amplitudes are set to 0.
    """
    alpha = np.asarray(state, dtype=complex)
    alpha = alpha / np.linalg.norm(alpha)
    if abs(alpha[0]) > 0.0:
        alpha = alpha * np.exp(-1j * np.angle(alpha[0]))
    else:
        pivot = int(np.argmax(np.abs(alpha) > 1e-12))
        alpha = alpha * np.exp(-1j * np.angle(alpha[pivot]))

    magnitudes  = np.abs(alpha)
    t1          = math.acos(min(1.0, magnitudes[0]))
    rest        = math.sqrt(max(0.0, 1.0 - magnitudes[0] ** 2))
    t2          = math.acos(min(1.0, magnitudes[1] / rest)) if rest > 1e-12 else 0.0
    rest2       = math.sqrt(max(0.0, magnitudes[2] ** 2 + magnitudes[3] ** 2))
    t3          = math.atan2(magnitudes[3], magnitudes[2]) if rest2 > 1e-12 else 0.0

    phases = [float(np.angle(a)) % TWO_PI if abs(a) > 1e-12 else 0.0 for a in alpha[1:]]
    return [t1, t2, t3] + phases


def probe_states() -> np.ndarray:
    """The four basis inputs and the twelve pairwise superpositions with phase 1 or i"""
    probes = [np.eye(4, dtype=complex)[i] for i in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            for phase in (1.0, 1j):
                probe       = np.zeros(4, dtype=complex)
                probe[i]    = 1.0
                probe[j]    = phase
                probes.append(probe / math.sqrt(2.0))
    return np.array(probes)


def _coordinate_descent(
    objective: Callable[[List[float]], float],
    start: Sequence[float],
    settings: SearchSettings
) -> Tuple[List[float], float]:
    """Bounded 1-D refinement of one angle at a time; only improvements are kept"""
    params  = list(start)
    best    = objective(params)

    for _ in range(settings.max_sweeps):
        sweep_start = best
        for index, (low, high) in enumerate(BOUNDS):
            def along(value, index=index):
                trial           = list(params)
                trial[index]    = value
                return objective(trial)

            result = minimize_scalar(
                along, bounds=(low, high), method="bounded", options={'xatol': SCALAR_XATOL}
            )
            if result.fun < best:
                params[index]   = float(result.x)
                best            = float(result.fun)

        if sweep_start - best < settings.tolerance:
            break

    return params, best


def _random_starts(count: int, rng: np.random.Generator) -> List[List[float]]:
    return [
        [float(rng.uniform(low, high)) for low, high in BOUNDS]
        for _ in range(count)
    ]


def worst_case_search(
    cfg: CnotConfig,
    settings: SearchSettings        = SearchSettings(),
    cell_index: int                 = 0,
    logger: Optional[Logger]        = None,
    response: Optional[HeraldedResponse] = None
) -> GateMetrics:
    """
    Minimize fidelity and heralding probability over two-qubit pure inputs

    The probe states are always evaluated. Unless `probes_only` is set, the
    worst probe and `starts` random points seed coordinate-wise bounded
    refinements; the heralding probability is minimized the same way.

    Args:
        cfg: Gate configuration with its detector model
        settings: Refinement parameters
        cell_index: Mixed into the seed so sweep cells draw independent starts
        logger: Optional logger for debug progress
        response: Precomputed linear response of `cfg`

    Returns:
        GateMetrics; fidelity_min never exceeds probe_fidelity_min
    """
    logger      = logger or NullLogger()
    response    = response or HeraldedResponse.from_config(cfg)
    probes      = probe_states()

    fidelities, probabilities = response.evaluate(probes)
    worst       = int(np.argmin(fidelities))
    lightest    = int(np.argmin(probabilities))
    probe_min   = float(fidelities[worst])

    best_params     = angles_from_state(probes[worst])
    best_fidelity   = probe_min
    best_state      = probes[worst]
    p_min_value     = float(probabilities[lightest])

    logger.debug(
        f"  probes: F_min={probe_min:.9f} at probe {worst}, "
        f"P_min={p_min_value:.6e}"
    )

    if not settings.probes_only:
        def fidelity(params):
            try:
                f, _ = response.evaluate(state_from_angles(params))
            except UndefinedFidelityError:
                return math.inf
            return float(f[0])

        def probability(params):
            return float(response.probability(state_from_angles(params))[0])

        rng     = np.random.default_rng([settings.seed, cell_index])
        starts  = [best_params] + _random_starts(settings.starts, rng)

        for number, start in enumerate(starts):
            params, value = _coordinate_descent(fidelity, start, settings)
            logger.debug(f"  start {number}: F={value:.9f}")
            if value < best_fidelity:
                best_fidelity   = value
                best_params     = params
                best_state      = state_from_angles(params)

        p_starts = [angles_from_state(probes[lightest])] + _random_starts(settings.starts, rng)
        for start in p_starts:
            _, value    = _coordinate_descent(probability, start, settings)
            p_min_value = min(p_min_value, value)

    p_at_fmin = float(response.probability(best_state)[0])
    return GateMetrics(
        fidelity_min=float(best_fidelity),
        probability_at_fmin=p_at_fmin,
        probability_min=float(min(p_min_value, p_at_fmin)),
        argmin_params=[float(a) for a in best_params],
        argmin_state=[complex(a) for a in np.asarray(best_state) / np.linalg.norm(best_state)],
        probe_fidelity_min=probe_min,
        detector_model=cfg.detector_model.describe(),
    )


@dataclass
class SweepRow:
    eta_eff: float
    eta_ref: float
    metrics: GateMetrics

    def to_row(self) -> Dict:
        return {
            'eta_eff': self.eta_eff,
            'eta_ref': self.eta_ref,
            'f_min': self.metrics.fidelity_min,
            'p_at_fmin': self.metrics.probability_at_fmin,
            'p_min': self.metrics.probability_min,
            'argmin_params': " ".join(format(a, ".15g") for a in self.metrics.argmin_params),
        }


@dataclass
class SweepResult:
    rows: List[SweepRow] = field(default_factory=list)

    def cell(self, eta_eff: float, eta_ref: float) -> Optional[GateMetrics]:
        for row in self.rows:
            if row.eta_eff == eta_eff and row.eta_ref == eta_ref:
                return row.metrics
        return None


def sweep_metrics(
    cfg: CnotConfig,
    eta_effs: Sequence[float],
    eta_refs: Sequence[float],
    kind: DetectorKind              = DetectorKind.CHAIN,
    search: SearchSettings          = SearchSettings(),
    settings: Settings              = DEFAULT_SETTINGS,
    logger: Optional[Logger]        = None
) -> SweepResult:
    """
    Worst-case metrics over an (eta_eff, eta_ref) grid

    Cells run on a thread pool and are merged in cell order; each cell seeds
    its random starts with (seed, cell index). For the non-discriminating model
    eta_ref is reported as 1.0 and the eta_ref list is ignored.

    Raises:
        ConfigurationError: If a range is empty or the model is ideal
    """
    logger = logger or NullLogger()
    if not eta_effs:
        raise ConfigurationError("CNOT sweep needs at least one eta_eff value")
    if kind is DetectorKind.IDEAL:
        raise ConfigurationError("Sweeps need a non-ideal detector model")
    if kind is DetectorKind.CHAIN and not eta_refs:
        raise ConfigurationError("Chain-detector sweep needs at least one eta_ref value")

    if kind is DetectorKind.NON_DISCRIMINATING:
        cells = [(e, 1.0) for e in eta_effs]
    else:
        cells = [(e, r) for e in eta_effs for r in eta_refs]

    def evaluate(indexed):
        index, (eta_eff, eta_ref) = indexed
        model = (
            DetectorModel.nondiscriminating(eta_eff)
            if kind is DetectorKind.NON_DISCRIMINATING
            else DetectorModel.chain(eta_ref, eta_eff)
        )
        return worst_case_search(cfg.with_detector_model(model), search, cell_index=index)

    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        results = list(pool.map(evaluate, enumerate(cells)))

    sweep = SweepResult()
    for (eta_eff, eta_ref), metrics in zip(cells, results):
        logger.debug(
            f"  eta_eff={eta_eff:g} eta_ref={eta_ref:g}: "
            f"F_min={metrics.fidelity_min:.6f} P_min={metrics.probability_min:.3e}"
        )
        sweep.rows.append(SweepRow(eta_eff, eta_ref, metrics))
    return sweep
