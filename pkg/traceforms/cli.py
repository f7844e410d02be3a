"""
CLI for traceforms.

One command per experiment. Every command loads the effective
configuration (file, environment, then options), runs its experiment and
prints the report; --out also writes <command>.csv and <command>.json.

Exit codes: 0 when no certification fails, 2 when one does, 1 on usage or
configuration errors.
"""

import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any

import click

from traceforms import __version__
from traceforms.config import Config, deep_merge, load_config
from traceforms.core.models import ExperimentReport
from traceforms.core.runner import create_default_runner
from traceforms.core.taxonomy import CHECK_DESCRIPTIONS, CertificationCheck, format_check_help
from traceforms.numerics.kernels import KernelType
from traceforms.reports import render_csv, render_json, render_markdown

OUTPUT_FORMATS = ["json", "markdown"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2


class TraceformsGroup(click.Group):
    """click group that reports usage and configuration errors with exit code 1."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):  # type: ignore[override]
        try:
            rv = super().main(
                args=args,
                prog_name=prog_name,
                complete_var=complete_var,
                standalone_mode=False,
                **extra,
            )
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        if standalone_mode:
            sys.exit(rv if isinstance(rv, int) else EXIT_OK)
        return rv


def configure_logging(verbosity: int) -> None:
    """WARNING by default, INFO with -v, DEBUG with -vv; always on stderr."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def parse_float_list(value: str | None) -> list[float] | None:
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of numbers, got {value!r}") from None


def parse_int_list(value: str | None) -> list[int] | None:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of integers, got {value!r}") from None


def section(**values: Any) -> dict[str, Any]:
    """Options that were actually given."""
    return {k: v for k, v in values.items() if v is not None}


def output_report(report: ExperimentReport, config: Config) -> None:
    """Print the report and write the report files when --out is set."""
    if config.output.format == "markdown":
        content = render_markdown(report, verbose=config.output.verbose)
    else:
        content = render_json(report, indent=2)
    click.echo(content)

    if config.output.out_dir:
        out = Path(config.output.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{report.command}.csv").write_text(render_csv(report), encoding="utf-8")
        (out / f"{report.command}.json").write_text(
            render_json(report, indent=2, include_table=True), encoding="utf-8"
        )
        logging.getLogger(__name__).info("reports written to %s", out)


def determine_exit_code(report: ExperimentReport) -> int:
    """2 when any certification fails; inconclusive verdicts do not fail a run."""
    return EXIT_OK if report.passed else EXIT_FAILED


def run_command(ctx: click.Context, name: str, overrides: dict[str, Any]) -> None:
    """Load the effective config, run one experiment and exit with its code."""
    merged = deep_merge(ctx.obj["overrides"], overrides)
    config = load_config(config_file=ctx.obj["config_file"], overrides=merged)
    runner = create_default_runner(timeout=config.runner.timeout)
    try:
        report = asyncio.run(runner.run(name, config))
    except ValueError as e:
        raise click.UsageError(str(e)) from e
    output_report(report, config)
    sys.exit(determine_exit_code(report))


@click.group(cls=TraceformsGroup)
@click.version_option(version=__version__, prog_name="traceforms")
@click.option(
    "--config",
    "-c",
    "config_file",
    type=click.Path(exists=True),
    help="Path to configuration file",
)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Directory for <command>.csv/.json")
@click.option("--threads", type=click.IntRange(min=1), help="Worker threads for per-term parallelism")
@click.option("--seed", type=int, help="Seed of the randomized property checks")
@click.option("--timeout", type=click.FloatRange(min=0, min_open=True), help="Seconds before a run is abandoned")
@click.option(
    "--format",
    "-f",
    "output_format",
    type=click.Choice(OUTPUT_FORMATS),
    help="Output format on stdout",
)
@click.option("--verbose", "-v", count=True, help="Log to stderr (-v info, -vv debug)")
@click.pass_context
def cli(
    ctx: click.Context,
    config_file: str | None,
    out_dir: str | None,
    threads: int | None,
    seed: int | None,
    timeout: float | None,
    output_format: str | None,
    verbose: int,
) -> None:
    """
    traceforms - trace Dirichlet forms as weighted Green-kernel matrices.

    Computes spectra, resolvents and potentials of trace forms for finite
    measures and certifies their convergence along monotone families.

    \b
    Example:
        traceforms graph1d-validate --rate 0.5 --n 10
        traceforms --out results converge
    """
    configure_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["config_file"] = config_file
    ctx.obj["overrides"] = {
        "runner": section(threads=threads, seed=seed, timeout=timeout),
        "output": section(out_dir=out_dir, format=output_format, verbose=True if verbose else None),
    }


@cli.command("spectrum")
@click.option("--alpha", type=click.FloatRange(min=0), help="Resolvent parameter of the identity check")
@click.pass_context
def spectrum(ctx: click.Context, alpha: float | None) -> None:
    """
    Spectrum of K^mu and the trace-form energies for the configured measure.

    Example:
        traceforms -c two_atoms.toml spectrum
    """
    run_command(ctx, "spectrum", {"spectrum": section(alpha=alpha)})


@cli.command("converge")
@click.option("--k-max", type=click.IntRange(min=1), help="Number of lowest energies to track")
@click.option("--strict-rank", is_flag=True, default=None, help="Fail when a term has fewer atoms than k-max")
@click.pass_context
def converge(ctx: click.Context, k_max: int | None, strict_rank: bool | None) -> None:
    """
    Convergence of spectra, potentials and resolvents along a measure family.

    Example:
        traceforms converge --k-max 5
    """
    run_command(ctx, "converge", {"converge": section(k_max=k_max, strict_rank=strict_rank)})


@cli.command("graph1d-validate")
@click.option("--rate", type=click.FloatRange(min=0, min_open=True), help="a_k = rate^|k|")
@click.option("--n", type=click.IntRange(min=0), help="Largest cutoff")
@click.option("--tol", type=click.FloatRange(min=0, min_open=True), help="Relative tolerance")
@click.pass_context
def graph1d_validate(ctx: click.Context, rate: float | None, n: int | None, tol: float | None) -> None:
    """
    Explicit lattice trace form against the exponential kernel matrix.

    Example:
        traceforms graph1d-validate --rate 0.5 --n 10 --tol 1e-9
    """
    run_command(ctx, "graph1d-validate", {"graph1d": section(rate=rate, n=n, tol=tol)})


@cli.command("ball-eig")
@click.option("--m", type=click.IntRange(min=0), help="Harmonic degree")
@click.option("--m-max", type=click.IntRange(min=0), help="Tabulate m = 0..m-max")
@click.option("--tol", type=click.FloatRange(min=0, min_open=True), help="Certified accuracy")
@click.pass_context
def ball_eig(ctx: click.Context, m: int | None, m_max: int | None, tol: float | None) -> None:
    """
    Trace-form energies of the unit sphere by harmonic degree.

    Example:
        traceforms ball-eig --m 1 --tol 1e-6
    """
    run_command(ctx, "ball-eig", {"ball": section(m=m, m_max=m_max, tol=tol)})


@cli.command("annulus-gap")
@click.option("--n", "ns", help="Comma-separated shell cutoffs, e.g. 2,4,8,16,32")
@click.pass_context
def annulus_gap(ctx: click.Context, ns: str | None) -> None:
    """
    Decay of the shell potential gap in the cutoff n.

    Example:
        traceforms annulus-gap --n 2,4,8,16,32
    """
    run_command(ctx, "annulus-gap", {"ball": section(ns=parse_int_list(ns))})


@cli.command("stationary")
@click.option("--alpha", type=click.FloatRange(min=0), help="Coupling a in -Delta u + a u mu = u mu")
@click.pass_context
def stationary(ctx: click.Context, alpha: float | None) -> None:
    """
    Stationary solutions on concentric spheres.

    Example:
        traceforms -c shells.toml stationary --alpha 1
    """
    run_command(ctx, "stationary", {"stationary": section(alpha=alpha)})


@cli.command("kato-check")
@click.option("--kernel", "kernel_type", type=click.Choice([k.value for k in KernelType]), help="Kernel family")
@click.option("--d", type=click.IntRange(min=1), help="Ambient dimension")
@click.option("--alpha", type=float, help="Riesz order")
@click.option("--measure", "measure_path", type=click.Path(exists=True, dir_okay=False), help="JSON measure file")
@click.option("--radii", help="Comma-separated decreasing radii")
@click.option("--s", type=click.FloatRange(min=0, min_open=True), help="Volume-growth exponent")
@click.pass_context
def kato_check(
    ctx: click.Context,
    kernel_type: str | None,
    d: int | None,
    alpha: float | None,
    measure_path: str | None,
    radii: str | None,
    s: float | None,
) -> None:
    """
    Kato criterion and volume-growth test for a measure.

    Example:
        traceforms kato-check --kernel riesz --d 1 --alpha 1.5 --measure atom.json
    """
    run_command(
        ctx,
        "kato-check",
        {
            "kernel": section(type=kernel_type, d=d, alpha=alpha),
            "measure": section(path=measure_path),
            "kato": section(radii=parse_float_list(radii), s=s),
        },
    )


@cli.command("list-checks")
@click.option("--format", "-f", "output_format", type=click.Choice(["text", "json"]), default="text")
@click.option("--check", "check_id", type=click.Choice([c.value for c in CertificationCheck]), help="Describe one check")
def list_checks(output_format: str, check_id: str | None) -> None:
    """
    List the properties the experiments certify.
    """
    if check_id is not None:
        click.echo(format_check_help(CertificationCheck(check_id)))
        return
    if output_format == "json":
        checks = [
            {
                "id": check.value,
                "name": CHECK_DESCRIPTIONS[check]["name"],
                "command": CHECK_DESCRIPTIONS[check]["command"],
                "short_description": CHECK_DESCRIPTIONS[check]["short_description"],
            }
            for check in CertificationCheck
        ]
        click.echo(json.dumps(checks, indent=2))
        return

    click.echo("Certification Checks")
    click.echo("=" * 60)
    for check in CertificationCheck:
        desc = CHECK_DESCRIPTIONS[check]
        click.echo(f"\n{desc['name']}")
        click.echo(f"  ID: {check.value}")
        click.echo(f"  Command: {desc['command']}")
        click.echo(f"  {desc['short_description']}")
    click.echo("\n" + "=" * 60)


@cli.command("list-experiments")
def list_experiments() -> None:
    """
    List registered experiments, including plugins, and their status.
    """
    runner = create_default_runner()
    click.echo("Experiments:")
    click.echo("=" * 60)
    for experiment in runner.list_experiments():
        if experiment.is_available():
            status = click.style("AVAILABLE", fg="green")
        else:
            status = click.style("UNAVAILABLE", fg="yellow")
        click.echo(f"\n{experiment.name}")
        click.echo(f"  Status: {status}")
        click.echo(f"  Version: {experiment.version}")
        click.echo(f"  Description: {experiment.description}")
        reason = experiment.get_unavailable_reason()
        if reason:
            click.echo(f"  Reason: {reason}")


@cli.command("init")
@click.option(
    "--format",
    "-f",
    "config_format",
    type=click.Choice(["toml", "yaml", "json"]),
    default="toml",
    help="Configuration file format",
)
def init(config_format: str) -> None:
    """
    Initialize a configuration file with defaults.

    Creates a .traceforms.{format} file in the current directory.
    """
    filename = f".traceforms.{config_format}"
    if Path(filename).exists():
        if not click.confirm(f"{filename} already exists. Overwrite?"):
            return

    config_dict = Config().model_dump(mode="json", exclude_none=True)

    if config_format == "toml":
        try:
            import tomli_w

            content = tomli_w.dumps(config_dict)
        except ImportError:
            content = _dict_to_toml(config_dict)
    elif config_format == "yaml":
        try:
            import yaml

            content = yaml.dump(config_dict, default_flow_style=False)
        except ImportError:
            raise click.UsageError("PyYAML is required for YAML format. Install with: pip install pyyaml") from None
    else:
        content = json.dumps(config_dict, indent=2)

    Path(filename).write_text(content, encoding="utf-8")
    click.echo(f"Created {filename}")


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, list | tuple):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    return repr(value)


def _dict_to_toml(d: dict[str, Any], prefix: str = "") -> str:
    """Small dict to TOML converter for when tomli_w is not installed."""
    lines = []
    for key, value in d.items():
        if not isinstance(value, dict) and value is not None:
            lines.append(f"{key} = {_toml_value(value)}")
    for key, value in d.items():
        if isinstance(value, dict):
            table = f"{prefix}.{key}" if prefix else key
            lines.append(f"\n[{table}]")
            lines.append(_dict_to_toml(value, table))
    return "\n".join(lines)


def main() -> None:
    """Main entry point for the CLI."""
    cli(obj={})


if __name__ == "__main__":
    main()
