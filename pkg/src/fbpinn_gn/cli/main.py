"""FBPINN-GN CLI interface."""

import sys
from pathlib import Path

import click
import yaml

from fbpinn_gn import __version__
from fbpinn_gn.lib.config.run_config import PRESET_NAMES, PRESETS, ConfigError, RunConfig
from fbpinn_gn.lib.logger import get_logger
from fbpinn_gn.lib.utils import ensure_directory
from fbpinn_gn.optim.solvers import SolverError
from fbpinn_gn.optim.trainer import NonFiniteLossError
from fbpinn_gn.services.experiment import ExperimentRunner, build_decomposition
from fbpinn_gn.storage.artifacts import read_pattern

logger = get_logger(__name__)


def _load_config(source: str) -> tuple[RunConfig, str]:
    """Config and its verbatim text from a YAML path or a preset name."""
    path = Path(source)
    if path.exists():
        return RunConfig.from_yaml(path), path.read_text(encoding="utf-8")
    if source in PRESETS:
        config = RunConfig.preset(source)
        return config, config.to_yaml()
    raise ConfigError(f"No config file {source!r} and no preset of that name (presets: {', '.join(PRESET_NAMES)})")


def _print_report(report) -> None:
    click.echo(f"Problem: {report.problem}")
    click.echo(f"Model: {report.model_kind} ({report.n_params} parameters)")
    click.echo(f"Method: {report.method}")
    click.echo(f"Seed: {report.seed}")
    click.echo(f"Iterations: {report.iterations}")
    click.echo(f"Final loss: {report.final_loss:.6e}")
    click.echo(f"Relative L2 error: {report.relative_error:.6e}")
    click.echo(f"Reached tolerance: {'yes' if report.reached_tol else 'no'}")
    click.echo(f"Wall time: {report.wall_time_s:.2f}s")
    if report.unconverged_solves:
        click.echo(f"Unconverged CG solves: {report.unconverged_solves}")


@click.group()
@click.version_option(version=__version__, prog_name="fbpinn-gn")
def cli():
    """FBPINN-GN - domain-decomposed PINNs trained with Adam or Gauss-Newton."""
    pass


@cli.command()
@click.argument("config")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Run directory")
@click.option("--seed", type=int, default=None, help="Override the master seed")
@click.option("--max-iters", type=int, default=None, help="Override stopping.max_iters")
def run(config, out_dir, seed, max_iters):
    """Train the model described by CONFIG (YAML file or preset name)."""
    click.echo("FBPINN Training Run")
    click.echo("===================")

    try:
        run_config, text = _load_config(config)
        overrides = {}
        if seed is not None:
            overrides["init.seed"] = seed
        if max_iters is not None:
            overrides["stopping.max_iters"] = max_iters
        if overrides:
            run_config = run_config.with_overrides(**overrides)
            text = run_config.to_yaml()

        runner = ExperimentRunner(run_config, out_dir, config_text=text)
        click.echo(f"Output: {runner.out_dir}")
        click.echo()

        report = runner.run()

        click.echo()
        click.echo("Results")
        click.echo("=======")
        _print_report(report)
        click.echo()
        click.echo("✓ Run completed successfully!")
        click.echo(f"  Artifacts written to {report.run_dir}")

    except ConfigError as e:
        click.echo(f"✗ Invalid configuration: {e}", err=True)
        sys.exit(1)

    except NonFiniteLossError as e:
        click.echo(f"✗ Training aborted: {e}", err=True)
        sys.exit(1)

    except SolverError as e:
        click.echo(f"✗ Linear solve failed: {e}", err=True)
        sys.exit(1)

    except Exception as e:
        click.echo(f"✗ Run failed: {e}", err=True)
        logger.exception("Run error")
        sys.exit(1)


@cli.command()
@click.argument("config")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Output directory")
def gram(config, out_dir):
    """Export the Gram sparsity pattern of the initial model for CONFIG."""
    click.echo("Gram Sparsity Pattern")
    click.echo("=====================")

    try:
        run_config, text = _load_config(config)
        runner = ExperimentRunner(run_config, out_dir, config_text=text)
        pattern, blocks = runner.export_gram_pattern()

        n, entries = read_pattern(pattern)
        n_blocks, pairs = read_pattern(blocks)
        click.echo(f"Parameters: {n} in {n_blocks} blocks")
        click.echo(f"Stored blocks: {len(pairs)}")
        click.echo(f"Nonzero entries: {len(entries)}")
        click.echo()
        click.echo("✓ Pattern exported!")
        click.echo(f"  {pattern}")
        click.echo(f"  {blocks}")

    except ConfigError as e:
        click.echo(f"✗ Invalid configuration: {e}", err=True)
        sys.exit(1)

    except Exception as e:
        click.echo(f"✗ Export failed: {e}", err=True)
        logger.exception("Gram export error")
        sys.exit(1)


@cli.command()
@click.argument("config")
@click.option("--seeds", type=click.IntRange(min=1), required=True, help="Number of seeds (starting at init.seed)")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Sweep directory")
def sweep(config, seeds, out_dir):
    """Run CONFIG for several seeds and summarize the errors."""
    click.echo("Seed Sweep")
    click.echo("==========")

    try:
        run_config, text = _load_config(config)
        runner = ExperimentRunner(run_config, out_dir, config_text=text)
        click.echo(f"Seeds: {seeds}")
        click.echo(f"Output: {runner.out_dir}")
        click.echo()

        summary = runner.sweep(seeds)
        stats = summary.to_dict()["relative_error"]

        click.echo()
        click.echo("Per-seed results")
        click.echo("================")
        for report in summary.reports:
            marker = "✓" if report.reached_tol else " "
            click.echo(
                f"  {marker} seed {report.seed}: error={report.relative_error:.3e} "
                f"loss={report.final_loss:.3e} iterations={report.iterations}"
            )
        click.echo()
        click.echo(f"Median error: {stats['median']:.3e}")
        click.echo(f"Best error: {stats['best']:.3e}")
        click.echo(f"Worst error: {stats['worst']:.3e}")
        click.echo(f"Reached tolerance: {summary.n_reached_tol}/{len(summary.reports)}")
        click.echo()
        click.echo("✓ Sweep completed successfully!")

    except ConfigError as e:
        click.echo(f"✗ Invalid configuration: {e}", err=True)
        sys.exit(1)

    except NonFiniteLossError as e:
        click.echo(f"✗ Training aborted: {e}", err=True)
        sys.exit(1)

    except Exception as e:
        click.echo(f"✗ Sweep failed: {e}", err=True)
        logger.exception("Sweep error")
        sys.exit(1)


@cli.command()
@click.argument("config")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Write windows.csv and decomposition.csv here")
def decomp(config, out_dir):
    """Print the subdomain bounds of CONFIG."""
    click.echo("Domain Decomposition")
    click.echo("====================")

    try:
        run_config, text = _load_config(config)
        if run_config.model.kind != "fbpinn":
            click.echo("✗ Configuration has no decomposition (model.kind is not fbpinn)", err=True)
            sys.exit(1)

        decomposition = build_decomposition(run_config)
        rows = decomposition.bounds_table()
        click.echo(f"Subdomains: {decomposition.n_subdomains}")
        click.echo()
        for row in rows:
            fields = "  ".join(
                f"{key}={value:+.6f}" if isinstance(value, float) else f"{key}={value}"
                for key, value in row.items()
            )
            click.echo(f"  {fields}")

        if out_dir:
            run_dir = ExperimentRunner(run_config, out_dir, config_text=text).export_decomposition()
            click.echo()
            click.echo(f"✓ Windows written to {run_dir.path}")

    except ConfigError as e:
        click.echo(f"✗ Invalid configuration: {e}", err=True)
        sys.exit(1)

    except Exception as e:
        click.echo(f"✗ Decomposition failed: {e}", err=True)
        logger.exception("Decomposition error")
        sys.exit(1)


@cli.command()
@click.argument("name", required=False)
@click.option("--write", "write_dir", type=click.Path(file_okay=False), default=None, help="Write preset YAML files here")
def presets(name, write_dir):
    """List the published configurations, or show NAME."""
    if name is not None and name not in PRESETS:
        click.echo(f"✗ Unknown preset {name!r} (available: {', '.join(PRESET_NAMES)})", err=True)
        sys.exit(1)

    names = [name] if name else list(PRESET_NAMES)

    if name and not write_dir:
        click.echo(RunConfig.preset(name).to_yaml(), nl=False)
        return

    click.echo("Available Presets")
    click.echo("=================")
    for preset_name in names:
        config = RunConfig.preset(preset_name)
        click.echo(
            f"  {preset_name}: {config.problem.name}, {config.model.kind}, "
            f"{config.optimizer.method}, max_iters={config.stopping.max_iters}"
        )

    if write_dir:
        target = ensure_directory(Path(write_dir))
        for preset_name in names:
            with open(target / f"{preset_name}.yaml", "w", encoding="utf-8") as f:
                yaml.safe_dump(RunConfig.preset(preset_name).to_dict(), f, sort_keys=False)
        click.echo()
        click.echo(f"✓ Wrote {len(names)} preset(s) to {target}")


if __name__ == "__main__":
    cli()
