from typing import List

import click

from src.cavity import CavityCoeffs, CavityParams, is_strong_coupling
from src.fidelity import FidelityReport
from src.reproduce import ReproductionReport


def format_fidelity_report(report: FidelityReport) -> List[str]:
    """
    Lines describing a fidelity report.

    Args:
    report (FidelityReport): averaged fidelities of one configuration

    Returns:
    List[str]: console lines
    """
    lines = [f"Circuit: {report.circuit}", f"Ensemble: {report.ensemble} (branch convention: {report.convention})"]
    if report.circuit == "baseline":
        lines.append(f"  F_up:   {100 * report.f_up:.2f}%")
        lines.append(f"  F_down: {100 * report.f_down:.2f}%")
    lines.append(f"  F_both: {100 * report.f_both:.2f}%")
    lines.append(f"  Success probability: up {report.success_up:.4f}, down {report.success_down:.4f}, "
                 f"total {report.success_total:.4f}")
    if report.clone_overlap != 1.0:
        lines.append(f"  Mean clone overlap: {report.clone_overlap:.4f}")
    if not report.bounded:
        lines.append(f"  Warning: {report.over_norm} outputs above norm 1 (max {report.max_norm:.4f}), "
                     f"{report.clamped} fidelities clipped to 1")
    return lines


def show_fidelity_report(report: FidelityReport) -> None:
    for line in format_fidelity_report(report):
        click.echo(line)


def show_cavity(params: CavityParams, coeffs: CavityCoeffs) -> None:
    regime = "strong" if is_strong_coupling(params) else "weak"
    click.echo(f"t1 = {coeffs.t1:.10g}")
    click.echo(f"r1 = {coeffs.r1:.10g}")
    click.echo(f"t0 = {coeffs.t0:.10g}")
    click.echo(f"r0 = {coeffs.r0:.10g}")
    click.echo(f"regime = {regime} (g = {params.g:g}, (kappa_s + kappa)/4 = {(params.kappa_s + params.kappa) / 4:g})")


def show_reproduction(report: ReproductionReport) -> None:
    click.echo(f"Target: {report.target} (ensemble {report.ensemble})")
    if report.surface:
        click.echo(f"Best {report.surface['metric']}: {100 * report.surface['best']:.2f}% over {report.surface['points']} points")
    for check in report.anchors:
        status = "PASS" if check.passed else "FAIL"
        click.echo(f"[{status}] {check.name}: simulated {100 * check.simulated:.2f}% vs quoted "
                   f"{100 * check.quoted_value:.2f}% (residual {100 * check.residual:+.2f} pp, "
                   f"tolerance {100 * check.tolerance:.1f} pp)")
    for claim in report.claims:
        click.echo(f"[{'PASS' if claim.passed else 'FAIL'}] {claim.name}: {claim.description}")
    for path in report.csv_paths + [report.summary_path]:
        click.echo(f"Wrote {path}")
