import os
import sys

import click
from dotenv import load_dotenv

# Load environment variables at the very beginning
load_dotenv()

from src.cavity import CavityParams, cavity_coeffs
from src.config import load_config
from src.constants import GAMMA_OVER_KAPPA, LOG_LEVEL, LOGS_FOLDER, VERSION
from src.fidelity import average_fidelity, make_ensemble
from src.logger import setup_logger, get_logger
from src.reproduce import TARGETS, reproduce as run_reproduction
from src.sweeps import resolve_ensemble, sweep_for_axes
from src.data_processing import write_csv
from src.user_interface import show_cavity, show_fidelity_report, show_reproduction

EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_ANCHOR = 3


def _start():
    setup_logger(LOGS_FOLDER, os.getenv('CNOTSIM_LOG_LEVEL', LOG_LEVEL))
    return get_logger()


def _fail(logger, e: Exception) -> None:
    if isinstance(e, ValueError):
        logger.error(f"Configuration error: {e}")
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    if isinstance(e, OSError):
        logger.error(f"I/O error: {e}")
        click.echo(f"I/O error: {e}", err=True)
        sys.exit(EXIT_IO)
    logger.exception(f"An error occurred: {str(e)}")
    sys.exit(EXIT_CONFIG)


@click.group()
@click.version_option(VERSION)
def cli():
    """Simulate an imperfect photonic CNOT gate built around a quantum-dot spin in a cavity."""


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(), help='Flat YAML run configuration')
def simulate(config_path: str):
    """Average fidelity of one configuration."""
    logger = _start()
    try:
        cfg = load_config(config_path)
        ensemble = make_ensemble(resolve_ensemble(cfg), cfg.haar_samples, cfg.seed)
        report = average_fidelity(cfg.circuit, cfg.cavity_params(), cfg.device_errors(), ensemble, cfg.branch_convention)
        show_fidelity_report(report)
        logger.info(f"Simulation finished: F_both={report.f_both:.6f}")
    except Exception as e:
        _fail(logger, e)


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(), help='Flat YAML run configuration')
@click.option('--out', 'out_path', default=None, type=click.Path(), help='CSV output (defaults to the configured output)')
@click.option('--workers', default=None, type=int, help='Number of worker processes')
def sweep(config_path: str, out_path: str, workers: int):
    """Two-axis parameter sweep written as CSV."""
    logger = _start()
    try:
        cfg = load_config(config_path)
        table = sweep_for_axes(cfg, workers)
        write_csv(table, out_path or cfg.output)
        click.echo(f"Wrote {len(table)} rows to {out_path or cfg.output}")
    except Exception as e:
        _fail(logger, e)


@cli.command()
@click.argument('target')
@click.option('--out-dir', default='results', type=click.Path(), help='Folder for CSV files and the summary')
@click.option('--workers', default=1, type=int, help='Number of worker processes')
def reproduce(target: str, out_dir: str, workers: int):
    """Reproduce a named target (fig3a, fig3b, fig4a, fig4b, table_anchors)."""
    logger = _start()
    try:
        if target not in TARGETS:
            raise ValueError(f"Unknown target {target!r}; valid targets: {', '.join(TARGETS)}")
        report = run_reproduction(target, out_dir, workers)
        show_reproduction(report)
        if not report.passed:
            logger.warning(f"Reproduction of {target} has failing checks")
            sys.exit(EXIT_ANCHOR)
    except Exception as e:
        _fail(logger, e)


@cli.command()
@click.option('--g', 'g', required=True, type=float, help='Coupling strength g/kappa')
@click.option('--ks', 'kappa_s', required=True, type=float, help='Side leakage kappa_s/kappa')
@click.option('--gamma', 'gamma', default=GAMMA_OVER_KAPPA, show_default=True, type=float, help='Dipole decay gamma/kappa')
def cavity(g: float, kappa_s: float, gamma: float):
    """Print the cavity reflection and transmission coefficients."""
    logger = _start()
    try:
        params = CavityParams(g, kappa_s, gamma)
        show_cavity(params, cavity_coeffs(params))
    except Exception as e:
        _fail(logger, e)


if __name__ == '__main__':
    cli()
