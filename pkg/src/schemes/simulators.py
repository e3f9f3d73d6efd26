"""
Full-quantum simulation of the detection schemes
Every probability here comes from Fock-state propagation, not from the closed forms
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from src.optics.detection import (
    click_pattern_distribution, clicks_histogram, count_distribution, heralding_probability
)
from src.optics.elements import Circuit, propagate, run_circuit
from src.schemes.analytic import cascade_prob_correct, chain_prob_m1, chain_prob_mk
from src.schemes.builders import (
    INPUT_MODE, CascadeConfig, ChainConfig, TdmConfig,
    build_chain_detector, build_tdm_chain, build_tree_nport
)
from src.utils.config import DEFAULT_SETTINGS, Settings
from src.utils.exceptions import ConfigurationError, DomainError, InfeasibleUniformityError
from src.utils.logger import Logger, NullLogger


@dataclass
class CountDistribution:
    """Distribution of the perceived photon number m"""
    n: int
    probabilities: List[float]
    remainder: float = 0.0

    def p(self, m: int) -> float:
        if 0 <= m < len(self.probabilities):
            return self.probabilities[m]
        return 0.0

    def total(self) -> float:
        return sum(self.probabilities)

    @property
    def correct(self) -> float:
        """Probability that the perceived count equals the incident count"""
        return self.p(self.n)


@dataclass
class ChainRow:
    """Acceptance of a k-chain for one incident photon number"""
    n: int
    accept_simulated: float
    accept_analytic: float
    posterior: float = 0.0


@dataclass
class GridRow:
    eta_eff: float
    eta_ref: float
    k: int
    n: int
    probability: float


@dataclass
class SuppressionGrid:
    """P(m=k | n) over (eta_eff, eta_ref) cells"""
    k: int
    rows: List[GridRow]             = field(default_factory=list)
    skipped: List[Tuple[float, float]] = field(default_factory=list)

    def cell(self, eta_eff: float, eta_ref: float) -> List[float]:
        return [
            r.probability for r in self.rows
            if r.eta_eff == eta_eff and r.eta_ref == eta_ref
        ]


def _perceived_distribution(circuit: Circuit, n: int, remainder_mode: Optional[int] = None):
    """Click-count histogram of the circuit's detectors for n photons in the input mode"""
    state       = circuit.input_state({INPUT_MODE: n})
    ensemble    = propagate(circuit, state)
    patterns    = click_pattern_distribution(ensemble, circuit.detectors)
    histogram   = clicks_histogram(patterns) if patterns else [1.0]

    remainder = 0.0
    if remainder_mode is not None:
        counts      = count_distribution(ensemble, [remainder_mode])
        remainder   = sum(p for (photons,), p in counts.items() if photons > 0)

    width       = min(n, len(circuit.detectors)) + 1
    histogram   = (histogram + [0.0] * width)[:width]
    return histogram, remainder


def simulate_cascade(n: int, cfg: CascadeConfig) -> CountDistribution:
    """
    Perceived photon number of a tree N-port with click detectors

    Args:
        n: Incident photons in the input mode
        cfg: Port count and detector efficiency

    Returns:
        P(m=j) for j = 0 .. min(n, N)
    """
    if n < 0:
        raise DomainError(f"Photon number must be non-negative, got {n}")

    circuit         = build_tree_nport(cfg.ports, cfg.efficiency)
    histogram, _    = _perceived_distribution(circuit, n)
    return CountDistribution(n, histogram)


def simulate_tdm(n: int, cfg: TdmConfig) -> CountDistribution:
    """
    Perceived photon number of the unrolled TDM loop

    Same-bin photons register a single click. Photons still circulating after
    the last round trip are not measured; the probability that any remain is
    reported as `remainder`.
    """
    if n < 0:
        raise DomainError(f"Photon number must be non-negative, got {n}")

    circuit                 = build_tdm_chain(cfg)
    histogram, remainder    = _perceived_distribution(
        circuit, n, remainder_mode=cfg.round_trips
    )
    return CountDistribution(n, histogram, remainder)


def simulate_chain(n: int, cfg: ChainConfig) -> float:
    """
    Acceptance probability of the k-chain detector for an n-photon input

    All k Click conditions and the terminal NoClick condition must hold.
    """
    if n < 0:
        raise DomainError(f"Photon number must be non-negative, got {n}")

    circuit     = build_chain_detector(cfg)
    state       = circuit.input_state({INPUT_MODE: n})
    ensemble    = run_circuit(circuit, state)
    return heralding_probability(ensemble)


def chain_distribution(n_max: int, cfg: ChainConfig) -> List[ChainRow]:
    """
    Acceptance of the chain for n = 0 .. n_max photons

    `posterior` is P(n | accepted) under a uniform prior over 0..n_max.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be non-negative, got {n_max}")

    rows = [
        ChainRow(
            n,
            simulate_chain(n, cfg),
            chain_prob_mk(n, cfg.k, cfg.eta_ref, cfg.efficiency)
        )
        for n in range(n_max + 1)
    ]

    accepted = sum(r.accept_simulated for r in rows)
    for row in rows:
        row.posterior = row.accept_simulated / accepted if accepted > 0 else 0.0
    return rows


def _grid_cell(eta_eff: float, eta_ref: float, k: int, n_max: int) -> List[float]:
    if k == 1:
        return [chain_prob_m1(n, eta_ref, eta_eff) for n in range(n_max + 1)]
    return [chain_prob_mk(n, k, eta_ref, eta_eff) for n in range(n_max + 1)]


def suppression_grid(
    eta_effs: Sequence[float],
    eta_refs: Sequence[float],
    n_max: int,
    k: int                      = 1,
    settings: Settings          = DEFAULT_SETTINGS,
    logger: Optional[Logger]    = None
) -> SuppressionGrid:
    """
    P(m=k | n) for every (eta_eff, eta_ref) cell and n = 0 .. n_max

    Cells are evaluated on a thread pool and merged in cell order. For k >= 2,
    cells with k * eta_ref > 1 are skipped and listed in `skipped`.

    Raises:
        ConfigurationError: If a parameter list is empty
    """
    logger = logger or NullLogger()
    if not eta_effs or not eta_refs:
        raise ConfigurationError("Suppression grid needs non-empty eta_eff and eta_ref lists")
    if n_max < 0:
        raise ConfigurationError(f"n_max must be non-negative, got {n_max}")

    cells   = [(e, r) for e in eta_effs for r in eta_refs]
    grid    = SuppressionGrid(k)

    def evaluate(cell):
        try:
            return _grid_cell(cell[0], cell[1], k, n_max)
        except InfeasibleUniformityError:
            return None

    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        results = list(pool.map(evaluate, cells))

    for (eta_eff, eta_ref), values in zip(cells, results):
        if values is None:
            grid.skipped.append((eta_eff, eta_ref))
            logger.debug(f"  [SKIP] eta_eff={eta_eff} eta_ref={eta_ref} infeasible for k={k}")
            continue
        for n, value in enumerate(values):
            grid.rows.append(GridRow(eta_eff, eta_ref, k, n, value))

    return grid


def cascade_table(
    ports: Sequence[int],
    efficiencies: Sequence[float],
    n_max: int
) -> List[Dict]:
    """Simulated perceived-count distributions next to the closed form for m = n"""
    rows = []
    for N in ports:
        for eta_eff in efficiencies:
            config = CascadeConfig(N, eta_eff)
            for n in range(n_max + 1):
                distribution = simulate_cascade(n, config)
                for m, p in enumerate(distribution.probabilities):
                    analytic = cascade_prob_correct(n, N, eta_eff) if m == n and n <= N else None
                    rows.append({
                        'ports': N,
                        'eta_eff': eta_eff,
                        'n': n,
                        'm': m,
                        'p_simulated': p,
                        'p_analytic': analytic,
                    })
    return rows
