"""
Command-line interface for fockherald
"""
import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from src import __version__
from src.gate.calibration import calibrate
from src.gate.cnot import CnotConfig, DetectorKind
from src.gate.search import SearchSettings, sweep_metrics
from src.generator.artifact_writer import ArtifactWriter, FORMATS, RunManifest
from src.optics.detection import heralding_probability
from src.optics.elements import run_circuit
from src.parser.circuit_parser import CircuitParser, GateConfigParser, circuit_to_document
from src.schemes.analytic import cascade_limit_table
from src.schemes.builders import ChainConfig, TdmConfig, uniform_tdm_couplings
from src.schemes.simulators import (
    cascade_table, chain_distribution, simulate_tdm, suppression_grid
)
from src.utils.config import Settings
from src.utils.exceptions import (
    CalibrationError, FockHeraldError, GenerationError, ValidationError
)
from src.utils.logger import Logger
from src.validator.validator import AgreementValidator, SUITE_NAMES


EXIT_OK         = 0
EXIT_FAILED     = 1
EXIT_USAGE      = 2
EXIT_INTERRUPT  = 130


def parse_values(text: str) -> List[float]:
    """
    Parse a value list: "0.9,0.99" or a linear range "start:stop:count"

    Raises:
        argparse.ArgumentTypeError: If the text is empty or malformed
    """
    text = text.strip()
    if not text:
        raise argparse.ArgumentTypeError("empty value list")

    try:
        if ':' in text:
            start, stop, count = text.split(':')
            if int(count) < 1:
                raise ValueError("count must be positive")
            return [float(v) for v in np.linspace(float(start), float(stop), int(count))]
        values = [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid value list '{text}': {e}")

    if not values:
        raise argparse.ArgumentTypeError("empty value list")
    return values


def parse_ints(text: str) -> List[int]:
    try:
        values = [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer list '{text}'")
    if not values:
        raise argparse.ArgumentTypeError("empty integer list")
    return values


def _load_gate(args: argparse.Namespace) -> CnotConfig:
    if getattr(args, 'gate_config', None):
        return GateConfigParser().parse(Path(args.gate_config))
    return CnotConfig.default()


def cmd_suppression(args, settings: Settings, writer: ArtifactWriter, logger: Logger) -> int:
    manifest = RunManifest('suppression', _parameters(args), settings.seed)
    logger.info(
        f"Suppression grid: {len(args.eta_eff)} x {len(args.eta_ref)} cells, "
        f"k={args.k}, n=0..{args.n_max}"
    )

    grid    = suppression_grid(args.eta_eff, args.eta_ref, args.n_max, args.k, settings, logger)
    column  = 'p_m1' if args.k == 1 else 'p_mk'
    rows    = [
        {'eta_eff': r.eta_eff, 'eta_ref': r.eta_ref, 'k': r.k, 'n': r.n, column: r.probability}
        for r in grid.rows
    ]
    columns = ['eta_eff', 'eta_ref', 'n', column]
    if args.k != 1:
        columns.insert(2, 'k')

    for eta_eff, eta_ref in grid.skipped:
        logger.warning(f"Skipped eta_eff={eta_eff:g} eta_ref={eta_ref:g}: {args.k} x eta_ref > 1")

    writer.write_table('suppression', rows, columns, manifest)
    writer.write_manifest(manifest)
    logger.success(f"Wrote {len(rows)} rows")
    return EXIT_OK


def cmd_cascade(args, settings: Settings, writer: ArtifactWriter, logger: Logger) -> int:
    manifest = RunManifest('cascade', _parameters(args), settings.seed)
    logger.info(f"Cascade N-port: ports {args.ports}, eta_eff {args.eta_eff}, n=0..{args.n_max}")

    rows = cascade_table(args.ports, args.eta_eff, args.n_max)
    writer.write_table(
        'cascade', rows, ['ports', 'eta_eff', 'n', 'm', 'p_simulated', 'p_analytic'], manifest
    )

    limit = [{'ports': N, 'p_m2': p} for N, p in cascade_limit_table(2, args.limit_ports)]
    writer.write_table('cascade_limit', limit, ['ports', 'p_m2'], manifest)
    for row in limit:
        logger.table_row(f"  N={row['ports']:>6}  P(m=2|n=2) = {row['p_m2']:.12f}")

    writer.write_manifest(manifest)
    logger.success(f"Wrote {len(rows)} distribution rows")
    return EXIT_OK


def cmd_tdm(args, settings: Settings, writer: ArtifactWriter, logger: Logger) -> int:
    manifest    = RunManifest('tdm', _parameters(args), settings.seed)
    couplings   = uniform_tdm_couplings(args.round_trips) if args.uniform else None
    cfg         = TdmConfig(
        args.coupling, args.loop_transmission, args.round_trips, args.eta_eff, couplings
    )
    logger.info(f"TDM loop: {args.round_trips} round trips, couplings {cfg.coupling_schedule()}")

    rows = []
    for n in range(args.n_max + 1):
        distribution = simulate_tdm(n, cfg)
        for m, p in enumerate(distribution.probabilities):
            rows.append({'n': n, 'm': m, 'probability': p, 'remainder': distribution.remainder})
        logger.debug(
            f"  n={n}: {distribution.probabilities} remainder={distribution.remainder:.3e}"
        )

    writer.write_table('tdm', rows, ['n', 'm', 'probability', 'remainder'], manifest)
    writer.write_manifest(manifest)
    logger.success(f"Wrote {len(rows)} rows")
    return EXIT_OK


def cmd_chain(args, settings: Settings, writer: ArtifactWriter, logger: Logger) -> int:
    manifest    = RunManifest('chain', _parameters(args), settings.seed)
    cfg         = ChainConfig(args.k, args.eta_ref, args.eta_eff)
    logger.info(f"Chain detector: k={cfg.k}, eta_ref={cfg.eta_ref:g}, eta_eff={cfg.efficiency:g}")

    rows = [
        {
            'n': r.n,
            'accept_simulated': r.accept_simulated,
            'accept_analytic': r.accept_analytic,
            'posterior': r.posterior,
        }
        for r in chain_distribution(args.n_max, cfg)
    ]
    for row in rows:
        logger.table_row(f"  n={row['n']}  P(accept)={row['accept_simulated']:.6e}")

    writer.write_table(
        'chain', rows, ['n', 'accept_simulated', 'accept_analytic', 'posterior'], manifest
    )
    writer.write_manifest(manifest)
    logger.success(f"Wrote {len(rows)} rows")
    return EXIT_OK


def cmd_cnot_sweep(args, settings: Settings, writer: ArtifactWriter, logger: Logger) -> int:
    manifest    = RunManifest('cnot-sweep', _parameters(args), settings.seed)
    cfg         = _load_gate(args)
    kind        = DetectorKind(args.detector_model)

    report = calibrate(cfg, strict=True)
    logger.info(f"Gate '{cfg.name}' calibrated, herald probability {report.herald_probability:.6f}")

    search  = SearchSettings(
        args.starts if args.starts is not None else settings.search_starts,
        settings.search_tolerance,
        settings.search_max_sweeps,
        settings.seed,
        args.probes_only,
    )
    sweep   = sweep_metrics(cfg, args.eta_eff, args.eta_ref, kind, search, settings, logger)
    rows    = [row.to_row() for row in sweep.rows]

    for row in sweep.rows:
        logger.table_row(
            f"  eta_eff={row.eta_eff:g} eta_ref={row.eta_ref:g}  "
            f"F_min={row.metrics.fidelity_min:.6f}  "
            f"P(F_min)={row.metrics.probability_at_fmin:.3e}  "
            f"P_min={row.metrics.probability_min:.3e}"
        )

    writer.write_table(
        'cnot_sweep', rows,
        ['eta_eff', 'eta_ref', 'f_min', 'p_at_fmin', 'p_min', 'argmin_params'],
        manifest
    )
    writer.write_manifest(manifest)
    logger.success(f"Wrote {len(rows)} cells")
    return EXIT_OK


def cmd_circuit(args, settings: Settings, writer: ArtifactWriter, logger: Logger) -> int:
    manifest    = RunManifest('circuit', _parameters(args), settings.seed)
    parser      = CircuitParser()
    circuit     = parser.parse(args.path)
    for warning in parser.get_warnings():
        logger.warning(warning)

    logger.info(
        f"Circuit '{circuit.name or args.path.stem}': {circuit.mode_count} modes, "
        f"{len(circuit.elements)} elements, {len(circuit.detectors)} detectors"
    )

    rows = []
    for n in range(args.n_max + 1):
        ensemble    = run_circuit(circuit, circuit.input_state({args.input_mode: n}))
        probability = heralding_probability(ensemble)
        rows.append({'n': n, 'herald_probability': probability})
        logger.table_row(f"  n={n}  P(herald)={probability:.6e}")

    writer.write_table('circuit', rows, ['n', 'herald_probability'], manifest)
    writer.write_json('circuit_document', circuit_to_document(circuit), manifest)
    writer.write_manifest(manifest)
    logger.success(f"Wrote {len(rows)} rows")
    return EXIT_OK


def cmd_validate(args, settings: Settings, writer: ArtifactWriter, logger: Logger) -> int:
    manifest    = RunManifest('validate', _parameters(args), settings.seed)
    validator   = AgreementValidator(_load_gate(args), settings.tolerance, logger)
    results     = validator.validate(args.suite)

    failed = 0
    for result in results:
        line = f"{result.suite}: {result.checks} checks, max diff {result.max_abs_diff:.3e}"
        if result.is_valid:
            logger.success(line)
        else:
            failed += 1
            logger.error(line)
            for error in result.errors[:5]:
                logger.error(f"  - {error}")
            if len(result.errors) > 5:
                logger.error(f"  ... and {len(result.errors) - 5} more")

    writer.write_json('validate', [r.to_dict() for r in results], manifest)
    writer.write_manifest(manifest)

    if failed:
        raise ValidationError(f"{failed} of {len(results)} suite(s) failed")
    return EXIT_OK


COMMANDS: Dict[str, Callable] = {
    'suppression': cmd_suppression,
    'cascade': cmd_cascade,
    'tdm': cmd_tdm,
    'chain': cmd_chain,
    'cnot-sweep': cmd_cnot_sweep,
    'circuit': cmd_circuit,
    'validate': cmd_validate,
}


def _parameters(args: argparse.Namespace) -> Dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ('command', 'verbose')}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', type=Path, default=Path('results'), help='output directory')
    common.add_argument('--seed', type=int, default=Settings().seed, help='random seed')
    common.add_argument('--format', choices=FORMATS, default='csv', dest='fmt')
    common.add_argument('-v', '--verbose', action='store_true', help='debug output')

    parser = argparse.ArgumentParser(
        prog='fockherald',
        description='Exact simulation of photon-number-resolving detection schemes'
    )
    parser.add_argument('--version', action='version', version=f'fockherald v{__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('suppression', parents=[common], help='P(m=k|n) over (eta_eff, eta_ref)')
    p.add_argument('--eta-eff', type=parse_values, default=[0.8, 0.9, 0.99])
    p.add_argument('--eta-ref', type=parse_values, default=[0.011, 0.1, 0.5])
    p.add_argument('--n-max', type=int, default=6)
    p.add_argument('--k', type=int, default=1)

    p = sub.add_parser('cascade', parents=[common], help='tree N-port distributions')
    p.add_argument('--ports', type=parse_ints, default=[2, 4, 8, 16])
    p.add_argument('--eta-eff', type=parse_values, default=[0.8, 0.9, 1.0])
    p.add_argument('--n-max', type=int, default=4)
    p.add_argument('--limit-ports', type=parse_ints, default=[10, 100, 1000, 10000])

    p = sub.add_parser('tdm', parents=[common], help='time-multiplexed loop distributions')
    p.add_argument('--coupling', type=float, default=0.5)
    p.add_argument('--loop-transmission', type=float, default=1.0)
    p.add_argument('--round-trips', type=int, default=2)
    p.add_argument('--eta-eff', type=float, default=1.0)
    p.add_argument('--uniform', action='store_true', help='couplings 1/R, 1/(R-1), ..., 1')
    p.add_argument('--n-max', type=int, default=4)

    p = sub.add_parser('chain', parents=[common], help='non-deterministic k-photon detector')
    p.add_argument('--k', type=int, default=1)
    p.add_argument('--eta-ref', type=float, default=0.011)
    p.add_argument('--eta-eff', type=float, default=0.99)
    p.add_argument('--n-max', type=int, default=6)

    p = sub.add_parser('cnot-sweep', parents=[common], help='worst-case CNOT metrics')
    p.add_argument('--eta-eff', type=parse_values, default=[0.99])
    p.add_argument('--eta-ref', type=parse_values, default=[0.011])
    p.add_argument(
        '--detector-model',
        choices=[DetectorKind.CHAIN.value, DetectorKind.NON_DISCRIMINATING.value],
        default=DetectorKind.CHAIN.value
    )
    p.add_argument('--probes-only', action='store_true', help='skip refinement')
    p.add_argument('--starts', type=int, default=None, help='random refinement starts')
    p.add_argument('--gate-config', type=Path, default=None)

    p = sub.add_parser('circuit', parents=[common], help='herald probability of a JSON circuit')
    p.add_argument('path', type=Path, help='circuit JSON file')
    p.add_argument('--input-mode', type=int, default=0)
    p.add_argument('--n-max', type=int, default=4)

    p = sub.add_parser('validate', parents=[common], help='agreement and calibration suites')
    p.add_argument(
        '--suite', action='append', choices=SUITE_NAMES, default=None, help='run only this suite'
    )
    p.add_argument('--gate-config', type=Path, default=None)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    logger = Logger(verbose=args.verbose)

    try:
        settings    = Settings.from_env().with_seed(args.seed)
        writer      = ArtifactWriter(args.out, args.fmt, logger)
        code        = COMMANDS[args.command](args, settings, writer, logger)

        if writer.stats['errors']:
            logger.error(f"{len(writer.stats['errors'])} file(s) could not be written")
            return EXIT_FAILED

        logger.info(f"Output: {Path(args.out).resolve()}")
        return code

    except CalibrationError as e:
        logger.error(f"Calibration error: {e}")
        return EXIT_FAILED
    except ValidationError as e:
        logger.error(f"Validation error: {e}")
        return EXIT_FAILED
    except GenerationError as e:
        logger.error(f"Generation error: {e}")
        return EXIT_FAILED
    except FockHeraldError as e:
        logger.error(f"{e}")
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return EXIT_INTERRUPT
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
