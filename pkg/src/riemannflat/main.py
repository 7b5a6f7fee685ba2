#!/usr/bin/env python3
"""
Riemann Flatness Toolkit
Main entry point for flatness, structure-function and Gauss-sum analyses of Riemann's function
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from riemannflat.config.run_config import Command, ConfigError, RunConfig, load_yaml, merge
from riemannflat.core.errors import RiemannFlatError
from riemannflat.core.result_writer import ResultWriter
from riemannflat.engine.run_engine import RunEngine
from riemannflat.utils.scales import parse_dyadic, parse_list, parse_number, parse_range


def setup_logging(verbose: bool = False) -> None:
    """Setup logging configuration"""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stderr)
        ]
    )


def _common_arguments() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)

    parent.add_argument(
        '--series',
        choices=['riemann', 'gauss', 'increment', 'trajectory'],
        help='Series to build (default: riemann)'
    )
    parent.add_argument('--kmax', type=int, help='Truncation K_max, or N for Gauss sums (default: 1048576)')
    parent.add_argument('--shift', type=float, help='Increment scale for --series increment')
    parent.add_argument('--axis', choices=['N', 'l'], help='Sweep axis: filter cutoff N or increment scale l')
    parent.add_argument('--dyadic', type=str, help='Dyadic scale range a:b, e.g. 16:4096 or 2^-16:2^-6')
    parent.add_argument('--scales', type=str, help='Explicit comma-separated scales')
    parent.add_argument('--N', dest='ns', type=str, help='Gauss-sum lengths (comma list or dyadic a:b)')
    parent.add_argument('--p', dest='ps', type=str, help='Exponents p, comma-separated')
    parent.add_argument('--alpha', type=str, help='Hoelder exponents a:b:step or comma list')
    parent.add_argument('--quantity', choices=['l2', 'l4', 'F', 'S2', 'S4', 'G'], help='Quantity to fit')
    parent.add_argument('--window', type=str, help='Fit window scale_min:scale_max')
    parent.add_argument('--exponent', type=float, help='Theoretical exponent for log-correction detection')
    parent.add_argument('--log-margin', type=float, help='r^2 gain that enables the log correction (default: 0.2)')
    parent.add_argument('--grid-size', type=int, help='Grid size M, a power of two (default: 1048576)')
    parent.add_argument('--samples', type=int, help='Sample count for eval and trajectory (default: 4096)')
    parent.add_argument('--base', type=float, help='Littlewood-Paley base A (default: 2)')
    parent.add_argument('--tail-tolerance', type=float, help='Allowed truncation tail ratio (default: 1e-3)')
    parent.add_argument('--threads', type=int, help='Worker threads for sweeps (default: all cores)')
    parent.add_argument('--output', '-o', type=str, help='Output file, "-" for stdout')
    parent.add_argument('--format', choices=['csv', 'json'], help='Output format (default: csv)')
    parent.add_argument('--config', type=str, help='YAML run file; flags override its values')
    parent.add_argument('--verbose', '-v', action='store_true', help='Enable verbose logging')
    return parent


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(
        prog='riemannflat',
        description='Riemann Flatness Toolkit - intermittency diagnostics of Riemann\'s function',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  riemannflat flatness --series riemann --kmax 1048576 --axis N --dyadic 16:4096
  riemannflat structure --dyadic 2^-16:2^-6 --p 2,4 --format json -o structure.json
  riemannflat zalcwasser --p 2 --N 1,2,4,8
  riemannflat fit --quantity S4 --dyadic 2^-16:2^-6 --exponent 3
  riemannflat spectrum --alpha 0.5:0.75:0.01
  riemannflat trajectory --samples 4096 -o phi.csv
        """
    )
    parent = _common_arguments()
    subparsers = parser.add_subparsers(dest='command', required=True, metavar='command')
    helps = {
        Command.EVAL: 'Evaluate the series on a uniform grid',
        Command.FILTER_NORMS: 'L^2 / L^4 norms of high-pass parts',
        Command.STRUCTURE: 'Structure functions S_p(l)',
        Command.FLATNESS: 'Flatness F(N) or G(l)',
        Command.ZALCWASSER: 'Gauss-sum L^p norms against psi_p(N)',
        Command.FIT: 'Power-law fit with log-correction detection',
        Command.SPECTRUM: 'Legendre spectrum of the scaling exponents',
        Command.TRAJECTORY: 'Samples of the corner trajectory phi(t)',
        Command.BLOCKS: 'Littlewood-Paley block norms',
    }
    for command, text in helps.items():
        subparsers.add_parser(command.value, parents=[parent], help=text, description=text)

    return parser.parse_args(argv)


def _scales_from(args: argparse.Namespace) -> Optional[List[float]]:
    if args.dyadic:
        return parse_dyadic(args.dyadic)
    if args.scales:
        return parse_list(args.scales)
    if args.ns:
        return parse_list(args.ns)
    return None


def build_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Translate CLI flags into a config mapping; unset flags are left out"""
    try:
        overrides: Dict[str, Any] = {
            'command': args.command,
            'series': {'kind': args.series, 'truncation': args.kmax, 'shift': args.shift},
            'axis': args.axis,
            'scales': _scales_from(args),
            'ps': parse_list(args.ps) if args.ps else None,
            'alphas': parse_range(args.alpha) if args.alpha else None,
            'quantity': args.quantity,
            'grid_size': args.grid_size,
            'samples': args.samples,
            'lp_base': args.base,
            'tail_tolerance': args.tail_tolerance,
            'threads': args.threads,
            'fit': {
                'window': [parse_number(t) for t in args.window.split(':')] if args.window else None,
                'exponent': args.exponent,
                'log_margin': args.log_margin,
            },
            'output': {'path': args.output, 'format': args.format},
        }
    except ValueError as e:
        raise ConfigError(str(e)) from None

    for key in ('series', 'fit', 'output'):
        overrides[key] = {k: v for k, v in overrides[key].items() if v is not None}
    return overrides


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge dataclass defaults, the YAML run file and CLI flags"""
    data: Dict[str, Any] = {}
    if args.config:
        try:
            data = load_yaml(Path(args.config))
        except OSError as e:
            raise ConfigError(f"Cannot read config file {args.config}: {e}") from None
    return RunConfig.from_dict(merge(data, build_overrides(args)))


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    try:
        args = parse_arguments(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        # Setup logging
        setup_logging(args.verbose)
        logger = logging.getLogger(__name__)

        logger.info("Starting Riemann Flatness Toolkit")
        logger.info(f"Command: {args.command}")

        config = build_config(args)
        engine = RunEngine(ResultWriter())
        engine.run_and_emit(config)
        return 0

    except ConfigError as e:
        logging.getLogger(__name__).error(f"Invalid configuration: {e}")
        return 2
    except (RiemannFlatError, OSError) as e:
        logging.getLogger(__name__).error(f"{type(e).__name__}: {e}")
        return 1
    except KeyboardInterrupt:
        logging.getLogger(__name__).info("Run interrupted by user")
        return 130
    except Exception as e:
        logging.getLogger(__name__).error(f"Unexpected error: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
