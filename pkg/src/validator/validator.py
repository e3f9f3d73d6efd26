"""
Agreement validator
Cross-checks closed forms, the classical oracle and the Fock simulation, and
calibrates the CNOT gate config
"""
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from src.gate.calibration import calibrate
from src.gate.cnot import CnotConfig
from src.oracle.enumerator import (
    arrival_model_for, enumerate_click_patterns, oracle_vs_quantum
)
from src.optics.elements import BeamSplitter, Circuit, transfer_matrix
from src.optics.detection import DetectorSpec
from src.schemes.analytic import (
    cascade_prob_correct, chain_prob_m1, chain_prob_m1_sum, chain_prob_mk
)
from src.schemes.builders import (
    CascadeConfig, ChainConfig, TdmConfig,
    build_chain_detector, build_tree_nport, uniform_tdm_couplings
)
from src.schemes.simulators import simulate_cascade, simulate_chain, simulate_tdm
from src.utils.config import DEFAULT_SETTINGS
from src.utils.exceptions import ConfigurationError, EnumerationLimitError
from src.utils.logger import Logger, NullLogger


SUITE_NAMES = (
    'cascade', 'cascade-limit', 'chain-m1', 'chain-mk', 'tdm-cascade', 'oracle', 'calibration'
)


@dataclass
class ValidationResult:
    """Outcome of one validation suite"""
    suite: str
    is_valid: bool          = True
    errors: List[str]       = field(default_factory=list)
    warnings: List[str]     = field(default_factory=list)
    max_abs_diff: float     = 0.0
    checks: int             = 0
    duration_s: float       = 0.0
    details: Dict           = field(default_factory=dict)

    def compare(self, label: str, values: Dict[str, float], tolerance: float) -> None:
        """Record one agreement check between several evaluations of the same quantity"""
        self.checks += 1
        spread              = max(values.values()) - min(values.values())
        self.max_abs_diff   = max(self.max_abs_diff, spread)
        if spread > tolerance:
            detail = ", ".join(f"{k}={v:.15g}" for k, v in values.items())
            self.errors.append(f"{label}: {detail}")
            self.is_valid = False

    def require(self, label: str, condition: bool) -> None:
        self.checks += 1
        if not condition:
            self.errors.append(label)
            self.is_valid = False

    def to_dict(self) -> Dict:
        return {
            'suite': self.suite,
            'passed': self.is_valid,
            'checks': self.checks,
            'max_abs_diff': self.max_abs_diff,
            'errors': list(self.errors),
            'warnings': list(self.warnings),
            'duration_s': self.duration_s,
            'details': dict(self.details),
        }


class AgreementValidator:
    """Runs the agreement suites behind `validate`"""

    def __init__(
        self,
        gate_config: Optional[CnotConfig]   = None,
        tolerance: float                    = DEFAULT_SETTINGS.tolerance,
        logger: Optional[Logger]            = None
    ):
        self.gate_config    = gate_config
        self.tolerance      = tolerance
        self.logger         = logger or NullLogger()

    @property
    def suites(self) -> Dict[str, Callable[[ValidationResult], None]]:
        return {
            'cascade': self._cascade,
            'cascade-limit': self._cascade_limit,
            'chain-m1': self._chain_m1,
            'chain-mk': self._chain_mk,
            'tdm-cascade': self._tdm_cascade,
            'oracle': self._oracle,
            'calibration': self._calibration,
        }

    def validate(self, names: Optional[Sequence[str]] = None) -> List[ValidationResult]:
        """
        Run the named suites (all by default)

        Raises:
            ConfigurationError: If a suite name is unknown
        """
        names   = list(names) if names else list(self.suites)
        unknown = [n for n in names if n not in self.suites]
        if unknown:
            raise ConfigurationError(f"Unknown validation suite(s): {', '.join(unknown)}")

        results = []
        for name in names:
            result  = ValidationResult(name)
            started = time.perf_counter()
            self.suites[name](result)
            result.duration_s = time.perf_counter() - started
            self.logger.debug(
                f"  {name}: {result.checks} checks, max diff {result.max_abs_diff:.3e}"
            )
            results.append(result)
        return results

    def _cascade(self, result: ValidationResult) -> None:
        for N in (2, 4, 8, 16):
            for eta in (0.8, 0.9, 1.0):
                model = arrival_model_for(build_tree_nport(N, eta))
                for n in range(min(N, 4) + 1):
                    perceived = enumerate_click_patterns(n, model).perceived()
                    result.compare(
                        f"cascade N={N} eta={eta} n={n}",
                        {
                            'analytic': cascade_prob_correct(n, N, eta),
                            'oracle': perceived[n] if n < len(perceived) else 0.0,
                            'quantum': simulate_cascade(n, CascadeConfig(N, eta)).correct,
                        },
                        self.tolerance
                    )

    def _cascade_limit(self, result: ValidationResult) -> None:
        previous = 0.0
        for N in (2, 4, 8, 16, 10 ** 3, 10 ** 4):
            value = cascade_prob_correct(2, N, 1.0)
            result.compare(
                f"limit N={N}", {'product': value, 'closed': 1.0 - 1.0 / N}, self.tolerance
            )
            result.require(f"limit not increasing at N={N}", value > previous)
            previous = value

    def _chain_m1(self, result: ValidationResult) -> None:
        for eta_ref in (0.011, 0.1, 0.5):
            for eta_eff in (0.9, 0.99, 1.0):
                cfg         = ChainConfig(1, eta_ref, eta_eff)
                model       = arrival_model_for(build_chain_detector(cfg))
                for n in range(7):
                    oracle = enumerate_click_patterns(n, model).pattern_probability([1, 0])
                    result.compare(
                        f"chain k=1 eta_ref={eta_ref} eta_eff={eta_eff} n={n}",
                        {
                            'closed': chain_prob_m1(n, eta_ref, eta_eff),
                            'sum': chain_prob_m1_sum(n, eta_ref, eta_eff),
                            'oracle': oracle,
                            'quantum': simulate_chain(n, cfg),
                        },
                        self.tolerance
                    )

    def _chain_mk(self, result: ValidationResult) -> None:
        for k in (1, 2, 3):
            for eta_ref in (0.1, 0.2, 1.0 / 3):
                if k * eta_ref > 1.0 + self.tolerance:
                    continue
                circuit = build_chain_detector(ChainConfig(k, eta_ref))
                column  = transfer_matrix(circuit.mode_count, circuit.elements)[:, 0]
                arrival = [abs(column[m]) ** 2 for m in range(k)]
                result.compare(
                    f"uniform arrival k={k} eta_ref={eta_ref:.6g}",
                    {f"stage{i}": p for i, p in enumerate(arrival)} | {'eta_ref': eta_ref},
                    self.tolerance
                )

                for eta_eff in (0.9, 1.0):
                    cfg     = ChainConfig(k, eta_ref, eta_eff)
                    model   = arrival_model_for(build_chain_detector(cfg))
                    for n in range(7):
                        oracle = enumerate_click_patterns(n, model).pattern_probability(
                            [1] * k + [0]
                        )
                        result.compare(
                            f"chain k={k} eta_ref={eta_ref:.6g} eta_eff={eta_eff} n={n}",
                            {
                                'analytic': chain_prob_mk(n, k, eta_ref, eta_eff),
                                'oracle': oracle,
                                'quantum': simulate_chain(n, cfg),
                            },
                            self.tolerance
                        )

    def _tdm_cascade(self, result: ValidationResult) -> None:
        for R in (2, 4):
            tdm = TdmConfig(1.0 / R, round_trips=R, couplings=uniform_tdm_couplings(R))
            for n in range(4):
                timed   = simulate_tdm(n, tdm)
                spatial = simulate_cascade(n, CascadeConfig(R))
                for m in range(n + 1):
                    result.compare(
                        f"tdm R={R} vs cascade N={R}, n={n} m={m}",
                        {'tdm': timed.p(m), 'cascade': spatial.p(m)},
                        self.tolerance
                    )

    def _oracle(self, result: ValidationResult) -> None:
        circuits = [
            (build_chain_detector(ChainConfig(1, 0.1, 0.9)), 2),
            (build_tree_nport(4, 0.9), 2),
            (build_chain_detector(ChainConfig(3, 0.2, 0.95)), 4),
        ]
        for circuit, n in circuits:
            report = oracle_vs_quantum(circuit, n)
            result.compare(
                f"oracle vs quantum on {report.circuit}, n={n}",
                {'difference': report.max_abs_diff, 'zero': 0.0},
                self.tolerance
            )

        interferometer = Circuit(
            2,
            (BeamSplitter(0, 1, 0.5), BeamSplitter(0, 1, 0.5)),
            (DetectorSpec.click(0), DetectorSpec.click(1)),
            name="mach-zehnder"
        )
        try:
            oracle_vs_quantum(interferometer, 1)
            refused = False
        except EnumerationLimitError:
            refused = True
        result.require("oracle accepted a recombining circuit", refused)

    def _calibration(self, result: ValidationResult) -> None:
        cfg     = self.gate_config or CnotConfig.default()
        report  = calibrate(cfg)
        result.checks += len(report.fidelities) + 1
        result.max_abs_diff = max(
            [abs(f - 1.0) for f in report.fidelities.values()] + [report.herald_spread]
        )
        result.details["herald_probability"] = report.herald_probability
        if not report.passed:
            result.is_valid = False
            result.errors.extend(report.errors)
