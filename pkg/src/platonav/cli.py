"""Command-line interface: run, eval, sweep, export-world and summary."""

import functools
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from .env.worlds import build_field
from .errors import ConfigError, NumericalError
from .eval.config import load_config
from .eval.evaluation import evaluate_policy
from .eval.experiment import run_experiment
from .eval.metrics import parse_metrics_csv
from .eval.sparkline import summarize_metrics
from .eval.sweep import lambda_sweep
from .learners.methods import world_seed
from .output.console import ConsoleMetricsChannel
from .policy.snapshot import load_policy

logger = logging.getLogger("PlatoNav")

EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


def exit_codes(command):
    """Map ConfigError to exit 2 and NumericalError to exit 3"""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ConfigError as e:
            click.echo(f"Configuration error: {e}", err=True)
            sys.exit(EXIT_CONFIG_ERROR)
        except NumericalError as e:
            logger.error(f"Numerical failure: {e}")
            click.echo(f"Numerical failure: {e}", err=True)
            sys.exit(EXIT_NUMERICAL_ERROR)
    return wrapper


def _run_seed(args):
    config, out_dir, console = args
    channels = [ConsoleMetricsChannel(label=f"seed {config.seed}")] if console else None
    return run_experiment(config, out_dir, channels).metrics_path


@click.group()
@click.option('--verbose', is_flag=True, help='Enable debug logging')
def main(verbose):
    """Reset-free policy learning with an adaptive MPC teacher"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


@main.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True), help='Experiment config file')
@click.option('--seed', 'seeds', type=int, multiple=True, help='Master seed (repeat for several runs)')
@click.option('--out', 'out_dir', default='runs/latest', type=click.Path(), help='Output directory')
@click.option('--workers', type=int, default=1, help='Parallel processes for several seeds')
@click.option('--console', is_flag=True, help='Print each iteration to the console')
@exit_codes
def run(config_path, seeds, out_dir, workers, console):
    """Train, evaluate each iteration and write metrics.csv plus snapshots"""
    config = load_config(config_path)
    if len(seeds) <= 1:
        if seeds:
            config = replace(config, seed=seeds[0])
        path = _run_seed((config, out_dir, console))
        click.echo(f"Metrics written to {path}")
        return
    jobs = [(replace(config, seed=s), Path(out_dir) / f"seed_{s}", console) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            paths = list(pool.map(_run_seed, jobs))
    else:
        paths = [_run_seed(job) for job in jobs]
    for path in paths:
        click.echo(f"Metrics written to {path}")


@main.command(name="eval")
@click.option('--policy', 'policy_path', required=True, type=click.Path(exists=True), help='Policy snapshot')
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True), help='Experiment config file')
@click.option('--episodes', type=click.IntRange(min=1), default=None,
              help='Evaluation episodes (config value by default)')
@click.option('--max-steps', type=click.IntRange(min=1), default=None,
              help='Step cap per episode (config value by default)')
@click.option('--seed', type=int, default=0, help='Evaluation seed')
@click.option('--generator', type=click.Choice(["empty", "forest", "canyon"]), default=None,
              help='World generator (config value by default)')
@exit_codes
def evaluate(policy_path, config_path, episodes, max_steps, seed, generator):
    """Fly a saved policy alone and report its mean time to failure"""
    config = load_config(config_path)
    policy = load_policy(policy_path)
    result = evaluate_policy(
        policy, config,
        config.evaluation.episodes if episodes is None else episodes,
        config.evaluation.max_steps if max_steps is None else max_steps,
        np.random.default_rng(seed), generator,
    )
    click.echo(f"MTTF: {result.mttf:.3f} s over {len(result.survival_times)} episodes "
               f"({result.crashes} crashes)")
    click.echo("Survival times: " + ", ".join(f"{t:.2f}" for t in result.survival_times))


@main.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True), help='Experiment config file')
@click.option('--lambda', 'lambdas', required=True, help='Comma-separated KL weights, e.g. 0,1,10,100')
@click.option('--out', 'out_dir', default='runs/sweep', type=click.Path(), help='Output directory')
@click.option('--workers', type=int, default=1, help='Parallel processes')
@exit_codes
def sweep(config_path, lambdas, out_dir, workers):
    """Run the experiment once per KL weight and summarize"""
    try:
        weights = [float(v) for v in lambdas.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"cannot parse --lambda '{lambdas}': {e}") from e
    config = load_config(config_path)
    points = lambda_sweep(config, weights, out_dir, workers)
    click.echo(f"{'lambda':>10} {'cost':>12} {'crashes':>8} {'mttf':>8} {'kl':>10}")
    for p in points:
        click.echo(f"{p.kl_weight:>10g} {p.mean_teacher_cost:>12.4g} {p.training_crashes:>8d} "
                   f"{p.final_mttf:>8.2f} {p.mean_kl:>10.4g}")


@main.command(name="export-world")
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True), help='Experiment config file')
@click.option('--iteration', type=int, default=1, help='Iteration whose world to export')
@click.option('--out', 'out_path', default=None, type=click.Path(), help='Listing file (stdout by default)')
@exit_codes
def export_world(config_path, iteration, out_path):
    """Write the training world geometry as a plain-text listing"""
    config = load_config(config_path)
    generator = config.world.generator_for_iteration(iteration)
    seed = world_seed(config.seed, config.world.phase_index(iteration))
    listing = build_field(config.world, generator, seed, config.vehicle.radius).to_listing()
    if out_path:
        Path(out_path).write_text(listing)
        click.echo(f"World written to {out_path}")
    else:
        click.echo(listing, nl=False)


@main.command()
@click.argument('metrics_path', type=click.Path(exists=True))
@exit_codes
def summary(metrics_path):
    """Sparkline summary of a metrics CSV"""
    rows = parse_metrics_csv(Path(metrics_path).read_text())
    if not rows:
        raise ConfigError(f"{metrics_path} has no data rows")
    click.echo(summarize_metrics(rows))


if __name__ == "__main__":
    main()
