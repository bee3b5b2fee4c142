import logging
from pathlib import Path

import click
import pyfiglet
from pydantic import ValidationError

from app.sim.base.errors import ConfigError, DomainError, SnapshotFormatError
from app.sim.diagnostics.services.spectrum_service import spectrum_service
from app.sim.forcing.models_forcing import ForcingSpec
from app.sim.forcing.services.forcing_service import forcing_service
from app.sim.run.controllers_run import EXIT_CONFIG, EXIT_OK, RunController
from app.sim.run.models_run import config_error
from app.sim.spectral.models_spectral import make_grid
from app.sim.verify.controllers_verify import SUITES, VerifyController
from app.storage.csv_store import write_spectrum_rows
from app.storage.snapshot_store import read_snapshot, write_force

log = logging.getLogger(__name__)


def log_banner() -> None:
    log.info("\n" + pyfiglet.figlet_format("ROTBURGERS"))


@click.group()
def cli():
    """Rotational Burgers and rotational KSE on the periodic box"""


@cli.command("run")
@click.argument(
    "configs", nargs=-1, required=True, type=click.Path(path_type=Path)
)
@click.pass_context
def run(ctx: click.Context, configs: tuple[Path, ...]):
    """Run one config, or several as a concurrent sweep"""
    log_banner()
    ctx.exit(RunController.cmd_run(list(configs)))


@cli.command("verify")
@click.argument("suite")
@click.pass_context
def verify(ctx: click.Context, suite: str):
    """Run a named verification suite and print its pass/fail table"""
    if suite not in SUITES:
        click.echo(
            f"unknown suite {suite!r}; choose from {', '.join(SUITES)}", err=True
        )
        ctx.exit(EXIT_CONFIG)
    log_banner()
    report = VerifyController.run_suite(suite)
    for line in VerifyController.format_table(report):
        click.echo(line)
    ctx.exit(EXIT_OK if report.passed else 1)


@cli.command("spectrum")
@click.argument("path", type=click.Path(path_type=Path))
@click.pass_context
def spectrum(ctx: click.Context, path: Path):
    """Shell energy spectrum of a snapshot as k,E_k CSV on stdout"""
    try:
        snapshot = read_snapshot(path)
    except SnapshotFormatError as e:
        click.echo(f"error: {e}", err=True)
        ctx.exit(EXIT_CONFIG)
    record = spectrum_service.energy_spectrum(snapshot.values, snapshot.grid)
    write_spectrum_rows(click.get_text_stream("stdout"), record)


@cli.command("forcing-gen")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--kmin", type=float, default=0.5, show_default=True)
@click.option("--kmax", type=float, default=2.5, show_default=True)
@click.option("--grashof", type=float, required=True)
@click.option("--nu", type=float, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--dim", type=click.Choice(["2", "3"]), default="2", show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.pass_context
def forcing_gen(
    ctx: click.Context,
    seed: int,
    kmin: float,
    kmax: float,
    grashof: float,
    nu: float,
    n: int,
    dim: str,
    out: Path,
):
    """Generate a seeded annulus force and store it as a snapshot at t=0"""
    try:
        try:
            spec = ForcingSpec(
                seed=seed, k_min=kmin, k_max=kmax, grashof=grashof, nu=nu
            )
            grid = make_grid(n, int(dim))
        except ValidationError as e:
            raise config_error(e) from e
        force = forcing_service.generate(spec, grid)
        write_force(out, force)
        log.info(f"Wrote force to {out}")
    except (ConfigError, DomainError) as e:
        click.echo(f"error: {e}", err=True)
        ctx.exit(EXIT_CONFIG)
