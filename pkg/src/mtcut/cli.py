"""Command-line driver: ``mtcut --graph G.metis --random-terminals 3 --mode solve``."""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .graph import Graph, GraphError, connected_components
from .ilp import build_ilp, evaluate_assignment, kernel_ilp, write_lp
from .instances import ParseError, make_terminals, read_graph, read_terminals
from .kernel import ReductionConfig, ReductionLog, kernelize
from .oracle import DEFAULT_CAP, OracleRefused, brute_force
from .problem import Problem
from .search import EDGE_SELECTIONS, QUEUE_ORDERS, ResourceLimitError, SearchConfig, solve

EXIT_OK = 0
EXIT_TIMEOUT = 3
EXIT_PARSE = 4
EXIT_RESOURCE = 5
EXIT_SOLVER = 6

MODES = ("solve", "kernel", "ilp-export", "kernel-ilp", "oracle")


@dataclass
class RunReport:
    instance: str
    instance_hash: str
    mode: str
    n: int
    m: int
    k: int
    weight: Optional[int] = None
    optimal: bool = False
    status: str = ""
    explored: int = 0
    branches: int = 0
    kernel_n: Optional[int] = None
    kernel_m: Optional[int] = None
    lower_bound: Optional[int] = None
    upper_bound: Optional[int] = None
    reductions: dict = field(default_factory=dict)
    exports: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def text(self) -> str:
        lines = [f"instance      {self.instance} ({self.instance_hash[:12]})",
                 f"mode          {self.mode}",
                 f"graph         n={self.n} m={self.m} k={self.k}"]
        if self.weight is not None:
            lines.append(f"cut weight    {self.weight} ({'optimal' if self.optimal else self.status})")
        if self.lower_bound is not None:
            lines.append(f"bounds        [{self.lower_bound}, {self.upper_bound}]")
        if self.kernel_n is not None:
            lines.append(f"kernel        n={self.kernel_n} m={self.kernel_m}")
        if self.explored:
            lines.append(f"problems      {self.explored} explored, {self.branches} branches")
        for name, count in self.reductions.items():
            if count:
                lines.append(f"  {name:<26}{count}")
        for e in self.exports:
            lines.append(f"exported      {e['lp']} ({e['status']})")
        lines.append(f"wall time     {self.wall_time:.3f}s")
        return "\n".join(lines) + "\n"


def _hash_instance(path: Path, terminals: list[int]) -> str:
    h = hashlib.sha256(path.read_bytes())
    h.update(json.dumps(terminals).encode())
    return h.hexdigest()


def write_assignment(assignment: dict[int, int], path: Path) -> None:
    """One ``vertex block`` line per original vertex, both 1-indexed."""
    path.write_text("".join(f"{v + 1} {b + 1}\n" for v, b in sorted(assignment.items())))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mtcut", description="Exact minimum multiterminal cut.")
    ap.add_argument("--graph", required=True, type=Path, help="METIS graph file")
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--terminals", type=Path, help="file with 1-indexed terminal vertices")
    src.add_argument("--random-terminals", type=int, metavar="K")
    src.add_argument("--grow-terminals", metavar="K,P",
                     help="K random seeds each grown by BFS to P*n/K vertices and contracted")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=MODES, default="solve")
    ap.add_argument("--edge-selection", choices=EDGE_SELECTIONS, default="HeavyVertex")
    ap.add_argument("--queue-order", choices=QUEUE_ORDERS, default="LowerBound")
    ap.add_argument("--reductions", default="all", help="low,high,triangle,highconn | all | none")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    ap.add_argument("--max-queue", type=int, default=None, help="pending problem budget")
    ap.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP)
    ap.add_argument("--report", type=Path, help="machine-readable JSON report")
    ap.add_argument("--assignment", type=Path, help="vertex/block assignment output")
    ap.add_argument("--out-dir", type=Path, default=Path("ilp_out"), help="LP export directory")
    ap.add_argument("--solver-cmd", help="external solver template using {lp} and {sol}")
    ap.add_argument("-q", "--quiet", action="store_true")
    return ap


def load_instance(args) -> tuple[Graph, list[int]]:
    g = read_graph(args.graph)
    rng = random.Random(args.seed)
    if args.terminals is not None:
        ids = read_terminals(args.terminals)
        for t in ids:
            if not 0 <= t < g.n:
                raise ParseError(args.terminals, 0, f"terminal {t + 1} out of range")
        make_terminals(g, explicit=ids)
    elif args.random_terminals is not None:
        make_terminals(g, k=args.random_terminals, rng=rng)
    else:
        try:
            k_text, p_text = args.grow_terminals.split(",")
            k, frac = int(k_text), float(p_text)
        except ValueError:
            raise SystemExit("--grow-terminals expects K,P (e.g. 4,0.2)")
        make_terminals(g, k=k, fraction=frac, rng=rng)
    return g, [g.members[t][0] for t in g.terminals]


def _kernel_only(g: Graph, cfg: ReductionConfig, report: RunReport) -> None:
    rlog = ReductionLog()
    kn = km = lo = up = 0
    for comp in connected_components(g):
        if comp.kind != "multi":
            continue
        p = Problem(g.subgraph(comp.vertices))
        _, clog = kernelize(p, cfg, stop_when_closed=False)
        rlog.merge(clog)
        kn, km = kn + p.graph.n, km + p.graph.m
        lo, up = lo + p.lower, up + p.upper
    report.kernel_n, report.kernel_m = kn, km
    report.lower_bound = lo
    report.upper_bound = None if math.isinf(up) else int(up)
    report.reductions = rlog.as_dict()
    report.status = "kernelized"


def run(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    start = time.monotonic()
    try:
        reductions = ReductionConfig.parse(args.reductions)
    except ValueError as exc:
        print(f"mtcut: {exc}", file=sys.stderr)
        return 2
    try:
        g, term_ids = load_instance(args)
    except (ParseError, GraphError, OSError, ValueError) as exc:
        print(f"mtcut: {exc}", file=sys.stderr)
        return EXIT_PARSE

    cfg = SearchConfig(args.edge_selection, args.queue_order, reductions, args.threads,
                       args.time_limit, args.seed, args.max_queue)
    original = g.copy()
    report = RunReport(str(args.graph), _hash_instance(args.graph, term_ids), args.mode,
                       g.n, g.m, g.k)
    report.config = {"edge_selection": cfg.edge_selection, "queue_order": cfg.queue_order,
                     "reductions": str(reductions), "threads": cfg.threads,
                     "time_limit": cfg.time_limit, "seed": cfg.seed,
                     "terminals": [t + 1 for t in term_ids]}
    code = EXIT_OK
    assignment = None

    if args.mode == "solve":
        try:
            res = solve(g, cfg)
        except ResourceLimitError as exc:
            res = exc.result
            code = EXIT_RESOURCE
        report.weight, report.optimal = res.weight, res.optimal
        report.status = "optimal" if res.optimal else ("resource-limit" if code else "timeout")
        if not res.optimal and code == EXIT_OK:
            code = EXIT_TIMEOUT
        report.explored, report.branches = res.explored, res.branches
        report.kernel_n, report.kernel_m = res.kernel_n, res.kernel_m
        report.lower_bound = res.root_lower
        report.upper_bound = None if math.isinf(res.root_upper) else int(res.root_upper)
        report.reductions = res.reductions.as_dict()
        assignment = res.assignment
    elif args.mode == "kernel":
        _kernel_only(g, reductions, report)
    elif args.mode == "oracle":
        try:
            res = brute_force(g, cap=args.oracle_cap, keep=1)
        except OracleRefused as exc:
            print(f"mtcut: {exc}", file=sys.stderr)
            report.status = "refused"
            code = EXIT_RESOURCE
        else:
            report.weight, report.optimal, report.status = res.weight, True, "optimal"
            assignment = g.lift(res.assignment)
    elif args.mode == "ilp-export":
        args.out_dir.mkdir(parents=True, exist_ok=True)
        lp = write_lp(build_ilp(g), args.out_dir / "instance.lp")
        report.exports = [{"lp": str(lp), "status": "exported"}]
        report.status = "exported"
    else:  # kernel-ilp
        out = kernel_ilp(g, args.out_dir, reductions, args.solver_cmd, args.time_limit)
        report.exports = [{"component": e.component, "lp": str(e.lp), "manifest": str(e.manifest),
                           "kernel_n": e.kernel_n, "kernel_m": e.kernel_m, "deleted": e.deleted,
                           "status": e.status, "objective": e.objective} for e in out.exports]
        report.reductions = out.reductions.as_dict()
        report.kernel_n = sum(e.kernel_n for e in out.exports)
        report.kernel_m = sum(e.kernel_m for e in out.exports)
        report.status = out.status
        if out.result is not None:
            report.weight, report.optimal = out.result.weight, out.result.optimal
            assignment = out.result.assignment
        if args.solver_cmd and out.status != "optimal":
            code = EXIT_SOLVER

    if assignment is not None:
        # the report weight must be realized by the emitted assignment
        report.weight = evaluate_assignment(original, assignment)
        if args.assignment:
            write_assignment(assignment, args.assignment)
    report.wall_time = time.monotonic() - start
    if args.report:
        args.report.write_text(json.dumps(asdict(report), indent=1, sort_keys=True) + "\n")
    if not args.quiet:
        sys.stdout.write(report.text())
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
