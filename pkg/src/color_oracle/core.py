"""Verification and benchmark runners behind the CLI.

Every runner builds the structure under test, checks it against brute-force
ground truth from `color_oracle.graph` and returns a `Report`: a CSV header,
one row per checked query and a final summary row. `Report.passed` is False as
soon as one asserted invariant fails; the CLI turns that into exit status 1.
"""

import csv
import itertools
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import click
import numpy as np
from colorama import Fore, Style

from color_oracle.config import RunConfig
from color_oracle.exceptions import ContractViolation, NoSuchColor, VariantError
from color_oracle.gadget import (
    GadgetVariant,
    build_gadget,
    compact_distance_check,
    compact_distances,
    direct_product,
    directed_reachability_check,
    is_gap_distance,
    process_pair,
)
from color_oracle.graph import Coloring, Graph, color_distance_matrix, components, distance_matrix
from color_oracle.graph_io import WorkloadOp
from color_oracle.hst_oracle import HstOracle, Variant
from color_oracle.path_exact import brute_nearest_position, build_instance, exact_query
from color_oracle.static_oracle import (
    StaticOracle,
    iteration_bound,
    refined_stretch_target,
    stretch_bound,
)

logger = logging.getLogger(__name__)

VERIFY_HEADER = ["v", "c", "exact", "estimate", "stretch", "witness", "iterations"]
BENCH_HEADER = ["procedure", "k", "mean_iterations", "p99_time"]
PATH_HEADER = ["i", "c", "estimate", "expected", "found", "distance", "ok"]
GADGET_HEADER = ["u", "v", "expected", "tree", "compact", "directed", "ok"]

# Exhaustive gadget sweeps stay below 2^12 vector pairs.
EXHAUSTIVE_GADGET_BITS = 12
SAMPLED_GADGET_PAIRS = 256


def print_success(message: str):
    """Print success message in green."""
    click.echo(f"{Fore.GREEN}✓ {message}{Style.RESET_ALL}", err=True)


def print_error(message: str):
    """Print error message in red."""
    click.echo(f"{Fore.RED}✗ {message}{Style.RESET_ALL}", err=True)


def print_warning(message: str):
    """Print warning message in yellow."""
    click.echo(f"{Fore.YELLOW}⚠ {message}{Style.RESET_ALL}", err=True)


def print_info(message: str):
    """Print info message."""
    click.echo(f"{Fore.CYAN}ℹ {message}{Style.RESET_ALL}", err=True)


@dataclass
class Report:
    """CSV rows plus a summary; the summary is written as the last row."""

    header: List[str]
    rows: List[List[object]] = field(default_factory=list)
    summary: Dict[str, object] = field(default_factory=dict)
    passed: bool = True

    def fail(self, reason: str) -> None:
        if self.passed:
            logger.warning("verification failed: %s", reason)
        self.passed = False

    def summary_row(self) -> List[str]:
        cells = [f"{key}={_fmt(value)}" for key, value in self.summary.items()]
        return ["summary", *cells, f"result={'pass' if self.passed else 'fail'}"]

    def write(self, path: Optional[Path] = None) -> None:
        """Write the CSV to `path`, or stdout when None."""
        if path is None:
            self._write_to(sys.stdout)
            return
        with open(path, "w", newline="") as f:
            self._write_to(f)

    def _write_to(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.header)
        writer.writerows([_fmt(cell) for cell in row] for row in self.rows)
        writer.writerow(self.summary_row())


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else f"{value:.6f}"
    return str(value)


def _stretch(exact: int, estimate: int) -> float:
    if exact == 0:
        return 1.0 if estimate == 0 else math.inf
    return estimate / exact


def _all_pairs(graph: Graph, coloring: Coloring) -> List[Tuple[int, int]]:
    """Every (v, c) with c present in v's component, in vertex then color order."""
    pairs: List[Tuple[int, int]] = []
    for part in components(graph):
        present = sorted({coloring.color_of[u] for u in part})
        pairs.extend((v, c) for v in part for c in present)
    return sorted(pairs)


def _static_queries(workload: Optional[Sequence[WorkloadOp]], graph, coloring) -> List[Tuple[int, int]]:
    if workload is None:
        return _all_pairs(graph, coloring)
    if any(op.kind == "r" for op in workload):
        raise VariantError("recolor lines need a dynamic variant", operation="verify")
    return [(op.vertex, op.color) for op in workload]


def run_verify(
    cfg: RunConfig,
    graph: Graph,
    coloring: Coloring,
    workload: Optional[Sequence[WorkloadOp]] = None,
) -> Report:
    """
    Check an oracle against exact distances on every queried (v, c).

    Args:
        cfg: Run parameters (variant selects static or dynamic)
        graph: Input graph
        coloring: Initial coloring
        workload: Optional ordered q/r operations; default queries every pair

    Returns:
        Report with VERIFY_HEADER rows
    """
    if cfg.variant == "static":
        return _verify_static(cfg, graph, coloring, workload)
    return _verify_dynamic(cfg, graph, coloring, workload)


def _verify_static(cfg, graph, coloring, workload) -> Report:
    dist = distance_matrix(graph)
    oracle = StaticOracle.build(
        graph, coloring, cfg.k, cfg.seed, sample_attempts=cfg.sample_attempts, distances=dist
    )
    exact = color_distance_matrix(dist, coloring)
    bound = stretch_bound(cfg.k)
    refined = refined_stretch_target(cfg.k)
    max_iterations = iteration_bound(cfg.k)
    report = Report(VERIFY_HEADER)
    max_stretch, above_refined, skipped = 1.0, 0, 0
    for v, c in _static_queries(workload, graph, coloring):
        try:
            result = oracle.query(v, c)
        except NoSuchColor as e:
            logger.warning("skipping query: %s", e)
            skipped += 1
            continue
        d = int(exact[v, c])
        stretch = _stretch(d, result.estimate)
        max_stretch = max(max_stretch, stretch)
        above_refined += result.estimate > refined * d
        report.rows.append([v, c, d, result.estimate, stretch, result.witness, result.iterations])
        if not d <= result.estimate <= bound * d:
            report.fail(f"estimate {result.estimate} for ({v}, {c}) outside [{d}, {bound * d}]")
        if result.iterations > max_iterations:
            report.fail(f"query ({v}, {c}) took {result.iterations} iterations")
        if coloring.color_of[result.witness] != c or dist[v, result.witness] > result.estimate:
            report.fail(f"witness {result.witness} does not realize ({v}, {c})")
    space = oracle.space_report()
    report.summary = {
        "variant": "static",
        "k": cfg.k,
        "max_stretch": max_stretch,
        "bound": bound,
        "above_refined_target": above_refined,
        "bunch_entries": space.bunch_entries,
        "gap_array_words": space.gap_array_words,
        "skipped": skipped,
    }
    return report


def _verify_dynamic(cfg, graph, coloring, workload) -> Report:
    dist = distance_matrix(graph)
    oracle = HstOracle(
        graph,
        coloring,
        cfg.k,
        distortion=cfg.distortion,
        variant=Variant(cfg.variant),
        seed=cfg.seed,
        attempt_budget=cfg.cover_attempts,
        distances=dist,
    )
    ops = workload
    if ops is None:
        ops = [WorkloadOp("q", v, c) for v, c in _all_pairs(graph, coloring)]
    report = Report(VERIFY_HEADER)
    exact: Optional[np.ndarray] = None
    max_stretch, recolors, skipped = 1.0, 0, 0
    for op in ops:
        if op.kind == "r":
            oracle.recolor(op.vertex, op.color)
            exact = None
            recolors += 1
            continue
        v, c = op.vertex, op.color
        if exact is None:
            exact = color_distance_matrix(dist, oracle.coloring)
        try:
            result = oracle.query(v, c)
        except NoSuchColor as e:
            logger.warning("skipping query: %s", e)
            skipped += 1
            continue
        d = int(exact[v, c])
        stretch = _stretch(d, result.estimate)
        max_stretch = max(max_stretch, stretch)
        trees = 1
        if oracle.variant is Variant.FAST_UPDATE:
            trees = len(oracle.covers[oracle.component_of[v]].trees)
        report.rows.append([v, c, d, result.estimate, stretch, result.witness, trees])
        if not d <= result.estimate <= cfg.distortion * d:
            report.fail(f"estimate {result.estimate} for ({v}, {c}) outside [{d}, D * {d}]")
        if oracle.coloring.color_of[result.witness] != c or dist[v, result.witness] > result.estimate:
            report.fail(f"witness {result.witness} does not realize ({v}, {c})")
    report.summary = {
        "variant": oracle.variant.value,
        "k": cfg.k,
        "max_stretch": max_stretch,
        "bound": cfg.distortion,
        "trees": oracle.tree_count,
        "recolors": recolors,
        "skipped": skipped,
    }
    return report


def run_bench(cfg: RunConfig, graph: Graph, coloring: Coloring) -> Report:
    """
    Time query against query_naive over every (v, c) pair.

    Iteration bounds are asserted; timings are only reported.
    """
    dist = distance_matrix(graph)
    oracle = StaticOracle.build(
        graph, coloring, cfg.k, cfg.seed, sample_attempts=cfg.sample_attempts, distances=dist
    )
    pairs = _all_pairs(graph, coloring)
    report = Report(BENCH_HEADER)
    limits = {"query": iteration_bound(cfg.k), "query_naive": cfg.k}
    for name, limit in limits.items():
        procedure = getattr(oracle, name)
        iterations, timings = [], []
        for v, c in pairs:
            start = time.perf_counter()
            result = procedure(v, c)
            timings.append(time.perf_counter() - start)
            iterations.append(result.iterations)
        mean = float(np.mean(iterations)) if iterations else 0.0
        p99 = float(np.percentile(timings, 99)) if timings else 0.0
        report.rows.append([name, cfg.k, mean, p99])
        worst = max(iterations, default=0)
        report.summary[f"max_iterations_{name}"] = worst
        if worst > limit:
            report.fail(f"{name} took {worst} iterations, limit {limit}")
    report.summary["iteration_bound"] = limits["query"]
    report.summary["pairs"] = len(pairs)
    return report


def run_path_verify(cfg: RunConfig, colors: Sequence[int]) -> Report:
    """
    Exactify every (position, color) of a color sequence from the two ends of
    the admissible estimate range, dist and b * dist.
    """
    inst, maps = build_instance(colors, cfg.base)
    report = Report(PATH_HEADER)
    entry_bound = cfg.base * inst.n * inst.levels
    for c in sorted(inst.present):
        for i in range(1, inst.original_length + 1):
            d, expected = brute_nearest_position(inst, i, c)
            for estimate in sorted({d, cfg.base * d}):
                try:
                    found = exact_query(inst, maps, i, c, estimate, cfg.mode, cfg.window)
                except ContractViolation as e:
                    logger.warning("%s", e)
                    found = None
                ok = found == expected
                report.rows.append([i, c, estimate, expected, found or "none", d, ok])
                if not ok:
                    report.fail(f"position {i} color {c} estimate {estimate}: got {found}")
    if maps.entries > entry_bound:
        report.fail(f"{maps.entries} map entries exceed {entry_bound}")
    report.summary = {
        "n": inst.n,
        "b": cfg.base,
        "mode": cfg.mode.value,
        "window": cfg.window,
        "map_entries": maps.entries,
        "entry_bound": entry_bound,
    }
    return report


def _vector_pairs(n1: int, n2: int, seed: int) -> Iterable[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    if n1 + n2 <= EXHAUSTIVE_GADGET_BITS:
        us = itertools.product((0, 1), repeat=n1)
        return [(u, v) for u in us for v in itertools.product((0, 1), repeat=n2)]
    rng = np.random.default_rng(seed)
    return [
        (tuple(int(x) for x in rng.integers(0, 2, n1)), tuple(int(x) for x in rng.integers(0, 2, n2)))
        for _ in range(SAMPLED_GADGET_PAIRS)
    ]


def run_gadget_verify(cfg: RunConfig, matrix: Sequence[Sequence[int]]) -> Report:
    """
    Compare u^T M v against all three gadget variants.

    Small matrices are swept exhaustively, larger ones over seeded random pairs.
    """
    tree = build_gadget(matrix, GadgetVariant.TREE)
    compact = build_gadget(matrix, GadgetVariant.COMPACT)
    directed = build_gadget(matrix, GadgetVariant.COMPACT_DIRECTED)
    initial = (tree.snapshot(), compact.snapshot(), directed.snapshot())
    report = Report(GADGET_HEADER)
    gap_checked = set()
    for u, v in _vector_pairs(tree.n1, tree.n2, cfg.seed):
        expected = direct_product(matrix, u, v)
        answers = (
            process_pair(tree, u, v),
            compact_distance_check(compact, u, v),
            directed_reachability_check(directed, u, v),
        )
        ok = all(answer == expected for answer in answers)
        report.rows.append(["".join(map(str, u)), "".join(map(str, v)), expected, *answers, ok])
        if not ok:
            report.fail(f"u={u} v={v}: expected {expected}, got {answers}")
        if u not in gap_checked:
            gap_checked.add(u)
            if not all(is_gap_distance(d) for d in compact_distances(compact, u)):
                report.fail(f"u={u}: compact distance outside the 3 / >=5 gap")
    if (tree.snapshot(), compact.snapshot(), directed.snapshot()) != initial:
        report.fail("gadget state was not restored")
    report.summary = {
        "n1": tree.n1,
        "n2": tree.n2,
        "pairs": len(report.rows),
        "tree_vertices": tree.vertex_count,
        "compact_vertices": compact.vertex_count,
    }
    return report
