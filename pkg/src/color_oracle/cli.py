"""Command-line interface for color-oracle."""

import functools
import logging
import sys
from pathlib import Path

import click
from colorama import init

from color_oracle.config import LOG_LEVELS, VARIANTS, load_config
from color_oracle.core import (
    print_error,
    print_info,
    print_success,
    print_warning,
    run_bench,
    run_gadget_verify,
    run_path_verify,
    run_verify,
)
from color_oracle.exceptions import ConfigurationError, OracleError
from color_oracle.graph import brute_nearest, random_coloring, random_connected_graph
from color_oracle.graph_io import load_graph, load_matrix, load_sequence, load_workload, write_graph
from color_oracle.hst_oracle import HstOracle
from color_oracle.static_oracle import StaticOracle

# Initialize colorama for cross-platform color support
init(autoreset=True)

EXIT_INVARIANT_FAILED = 1
EXIT_ORACLE_ERROR = 2

path_in = click.Path(exists=True, dir_okay=False, path_type=Path)
path_out = click.Path(dir_okay=False, path_type=Path)


def oracle_errors(command):
    """Print OracleError with the red helper and exit with status 2."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except OracleError as e:
            print_error(f"{type(e).__name__}: {e}")
            sys.exit(EXIT_ORACLE_ERROR)

    return wrapper


def _finish(report, out):
    """Write a report and exit 1 when an asserted invariant failed."""
    report.write(out)
    if out is not None:
        print_info(f"Report written to {out}")
    if report.passed:
        print_success("All checked invariants hold")
    else:
        print_warning("Invariant check failed")
        sys.exit(EXIT_INVARIANT_FAILED)


@click.group()
@click.option("--config", type=path_in, help="Path to color-oracle.yaml")
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None)
@click.pass_context
def main(ctx, config, log_level):
    """color-oracle - nearest colored node oracles and their verification suites."""
    ctx.ensure_object(dict)
    try:
        ctx.obj["config"] = load_config(config)
    except ConfigurationError as e:
        print_error(str(e))
        sys.exit(EXIT_ORACLE_ERROR)
    level = (log_level or ctx.obj["config"].get("log_level", "WARNING")).upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s | %(levelname)s | %(message)s",
    )


@main.command()
@click.option("--n", "n", type=int, required=True, help="Vertex count")
@click.option("--sigma", type=int, required=True, help="Palette size")
@click.option("--extra-edges", type=int, default=0, help="Edges beyond the spanning tree")
@click.option("--max-weight", type=int, default=10, help="Largest edge weight")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=path_out, required=True, help="Graph file to write")
@click.pass_context
@oracle_errors
def generate(ctx, n, sigma, extra_edges, max_weight, seed, out):
    """Write a random connected colored graph."""
    if n < 1 or sigma < 1 or max_weight < 1 or extra_edges < 0:
        raise ConfigurationError("n, sigma and max-weight must be positive, extra-edges >= 0")
    seed = ctx.obj["config"].get("seed", 0) if seed is None else seed
    graph = random_connected_graph(n, extra_edges, max_weight, seed)
    write_graph(out, graph, random_coloring(n, sigma, seed))
    print_success(f"Wrote n={n} m={len(graph.edges)} sigma={sigma} to {out}")


@main.command()
@click.argument("graph_file", type=path_in)
@click.option("--vertex", "-v", "vertex", type=int, required=True)
@click.option("--color", "-c", "color", type=int, required=True)
@click.option("--k", "k", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--variant", type=click.Choice(VARIANTS), default=None)
@click.option("--distortion", type=float, default=None)
@click.pass_context
@oracle_errors
def query(ctx, graph_file, vertex, color, k, seed, variant, distortion):
    """Answer one nearest-color query and print it next to the exact distance."""
    cfg = ctx.obj["config"].run_config(
        "query", input_path=graph_file, k=k, seed=seed, variant=variant, distortion=distortion
    )
    graph, coloring = load_graph(graph_file)
    if cfg.variant == "static":
        oracle = StaticOracle.build(
            graph, coloring, cfg.k, cfg.seed, sample_attempts=cfg.sample_attempts
        )
    else:
        oracle = HstOracle(
            graph,
            coloring,
            cfg.k,
            distortion=cfg.distortion,
            variant=cfg.variant,
            seed=cfg.seed,
            attempt_budget=cfg.cover_attempts,
        )
    result = oracle.query(vertex, color)
    exact = brute_nearest(graph, coloring, vertex, color)
    click.echo(f"estimate={result.estimate} witness={result.witness} exact={exact.distance}")


@main.command()
@click.argument("graph_file", type=path_in)
@click.option("--k", "k", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--variant", type=click.Choice(VARIANTS), default=None)
@click.option("--distortion", type=float, default=None)
@click.option("--workload", type=path_in, default=None, help="q/r operations file")
@click.option("--out", type=path_out, default=None, help="CSV report (default: stdout)")
@click.pass_context
@oracle_errors
def verify(ctx, graph_file, k, seed, variant, distortion, workload, out):
    """Check an oracle against exact distances and write a CSV report."""
    cfg = ctx.obj["config"].run_config(
        "verify",
        input_path=graph_file,
        k=k,
        seed=seed,
        variant=variant,
        distortion=distortion,
        workload_path=workload,
        output_path=out,
    )
    graph, coloring = load_graph(graph_file)
    ops = load_workload(workload, graph, coloring) if workload else None
    _finish(run_verify(cfg, graph, coloring, ops), cfg.output_path)


@main.command()
@click.argument("graph_file", type=path_in)
@click.option("--k", "k", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=path_out, default=None, help="CSV report (default: stdout)")
@click.pass_context
@oracle_errors
def bench(ctx, graph_file, k, seed, out):
    """Compare query and query_naive iteration counts and latency."""
    cfg = ctx.obj["config"].run_config(
        "bench", input_path=graph_file, k=k, seed=seed, variant="static", output_path=out
    )
    graph, coloring = load_graph(graph_file)
    _finish(run_bench(cfg, graph, coloring), cfg.output_path)


@main.command("path-verify")
@click.argument("sequence_file", type=path_in)
@click.option("--base", type=int, default=None)
@click.option("--mode", type=click.Choice(["fast", "exact"]), default=None)
@click.option("--window", type=int, default=None)
@click.option("--out", type=path_out, default=None, help="CSV report (default: stdout)")
@click.pass_context
@oracle_errors
def path_verify(ctx, sequence_file, base, mode, window, out):
    """Exactify every (position, color) of a color sequence."""
    cfg = ctx.obj["config"].run_config(
        "path-verify",
        input_path=sequence_file,
        base=base,
        mode=mode,
        window=window,
        output_path=out,
    )
    _finish(run_path_verify(cfg, load_sequence(sequence_file)), cfg.output_path)


@main.command("gadget-verify")
@click.argument("matrix_file", type=path_in)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=path_out, default=None, help="CSV report (default: stdout)")
@click.pass_context
@oracle_errors
def gadget_verify(ctx, matrix_file, seed, out):
    """Compare u^T M v with every gadget variant."""
    cfg = ctx.obj["config"].run_config(
        "gadget-verify", input_path=matrix_file, seed=seed, output_path=out
    )
    _finish(run_gadget_verify(cfg, load_matrix(matrix_file)), cfg.output_path)


if __name__ == "__main__":
    main()
