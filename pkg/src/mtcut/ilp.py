"""Integer program for multiterminal cut, LP-file export and the Kernel+ILP path.

Variables ``x_<v>_<j>`` put vertex ``v`` in block ``j``; ``e_<u>_<v>``
(``u < v``) marks a cut edge.  The program minimises the weight of marked
edges subject to ``e_uv >= |x_uj - x_vj|`` for every block, one block per
vertex, and the terminals pinned to their own blocks (written as bounds).
"""
from __future__ import annotations

import json
import math
import re
import shlex
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .flow import min_s_T_cut
from .graph import Graph, connected_components
from .kernel import ReductionConfig, ReductionLog, kernelize
from .problem import Problem
from .search import CutResult

PathLike = Union[str, Path]
_WRAP = 8  # terms per line in long expressions


class AssignmentError(ValueError):
    pass


@dataclass
class Constraint:
    name: str
    terms: list[tuple[int, str]]  # (coefficient, variable)
    sense: str  # ">=", "<=" or "="
    rhs: int


@dataclass
class IlpModel:
    objective: list[tuple[int, str]]
    constraints: list[Constraint]
    bounds: dict[str, tuple[int, int]]  # fixed variables: name -> (lo, hi)
    binaries: list[str]
    vertices: list[int] = field(default_factory=list, compare=False)
    k: int = field(default=0, compare=False)

    @property
    def variables(self) -> list[str]:
        return self.binaries


@dataclass
class IlpSolution:
    objective: Optional[int]
    assignment: dict[int, int]  # kernel vertex -> block
    status: str  # optimal / feasible / timeout / infeasible / unavailable
    values: dict[str, float] = field(default_factory=dict, repr=False)


def xname(v: int, j: int) -> str:
    return f"x_{v}_{j}"


def ename(u: int, v: int) -> str:
    return f"e_{min(u, v)}_{max(u, v)}"


def build_ilp(g: Graph) -> IlpModel:
    k = g.k
    if k < 2:
        raise ValueError("the program needs at least two terminals")
    verts = sorted(g.adj)
    edges = sorted(g.edges())
    objective = [(w, ename(u, v)) for u, v, w in edges]
    rows = []
    for u, v, _ in edges:
        e = ename(u, v)
        for j in range(k):
            rows.append(Constraint(f"c_{u}_{v}_{j}_a", [(1, e), (-1, xname(u, j)), (1, xname(v, j))], ">=", 0))
            rows.append(Constraint(f"c_{u}_{v}_{j}_b", [(1, e), (1, xname(u, j)), (-1, xname(v, j))], ">=", 0))
    for v in verts:
        rows.append(Constraint(f"a_{v}", [(1, xname(v, j)) for j in range(k)], "=", 1))
    bounds = {}
    for i, t in enumerate(g.terminals):
        for j in range(k):
            bounds[xname(t, j)] = (int(i == j), int(i == j))
    binaries = [xname(v, j) for v in verts for j in range(k)] + [ename(u, v) for u, v, _ in edges]
    return IlpModel(objective, rows, bounds, binaries, verts, k)


# -- LP text format ------------------------------------------------------

def _expr(terms: list[tuple[int, str]]) -> list[str]:
    parts = []
    for i, (c, var) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = var if mag == 1 else f"{mag} {var}"
        parts.append(f"{'-' if c < 0 else ''}{body}" if i == 0 else f"{sign} {body}")
    lines = [" ".join(parts[i:i + _WRAP]) for i in range(0, len(parts), _WRAP)]
    return lines or ["0"]


def lp_text(m: IlpModel) -> str:
    out = ["\\ minimum multiterminal cut", "Minimize"]
    obj = _expr(m.objective)
    out.append(" obj: " + obj[0])
    out.extend("   " + line for line in obj[1:])
    out.append("Subject To")
    for c in m.constraints:
        body = _expr(c.terms)
        body[-1] += f" {c.sense} {c.rhs}"
        out.append(f" {c.name}: " + body[0])
        out.extend("   " + line for line in body[1:])
    out.append("Bounds")
    for var, (lo, hi) in m.bounds.items():
        out.append(f" {var} = {lo}" if lo == hi else f" {lo} <= {var} <= {hi}")
    out.append("Binary")
    for i in range(0, len(m.binaries), _WRAP):
        out.append(" " + " ".join(m.binaries[i:i + _WRAP]))
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(m: IlpModel, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(lp_text(m))
    return path


_SECTIONS = {"minimize": "obj", "minimise": "obj", "minimum": "obj", "min": "obj",
             "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
             "bounds": "bounds", "bound": "bounds",
             "binary": "bin", "binaries": "bin", "bin": "bin", "end": "end"}
_TERM = re.compile(r"([+-]?)\s*(\d*)\s*([A-Za-z_][\w.]*)")


def _parse_expr(text: str) -> list[tuple[int, str]]:
    terms = []
    for sign, coef, var in _TERM.findall(text):
        c = int(coef) if coef else 1
        terms.append((-c if sign == "-" else c, var))
    return terms


def read_lp(path: PathLike) -> IlpModel:
    """Read the subset of CPLEX-LP produced by :func:`write_lp`."""
    section = None
    chunks: dict[str, list[str]] = {"obj": [], "st": [], "bounds": [], "bin": []}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTIONS:
            section = _SECTIONS[key]
            if section == "end":
                break
            continue
        if section is None:
            raise ValueError(f"{path}: text before the objective section: {raw!r}")
        if raw.startswith("   ") and chunks[section] and section in ("obj", "st"):
            chunks[section][-1] += " " + line
        else:
            chunks[section].append(line)

    objective = []
    for line in chunks["obj"]:
        objective += _parse_expr(line.split(":", 1)[1] if ":" in line else line)
    constraints = []
    for line in chunks["st"]:
        name, body = line.split(":", 1)
        mt = re.match(r"(.*?)(>=|<=|=)\s*(-?\d+)\s*$", body)
        if mt is None:
            raise ValueError(f"{path}: cannot parse constraint {line!r}")
        constraints.append(Constraint(name.strip(), _parse_expr(mt.group(1)), mt.group(2), int(mt.group(3))))
    bounds = {}
    for line in chunks["bounds"]:
        mt = re.match(r"^([A-Za-z_][\w.]*)\s*=\s*(-?\d+)$", line)
        if mt:
            bounds[mt.group(1)] = (int(mt.group(2)), int(mt.group(2)))
            continue
        mt = re.match(r"^(-?\d+)\s*<=\s*([A-Za-z_][\w.]*)\s*<=\s*(-?\d+)$", line)
        if mt is None:
            raise ValueError(f"{path}: cannot parse bound {line!r}")
        bounds[mt.group(2)] = (int(mt.group(1)), int(mt.group(3)))
    binaries = [tok for line in chunks["bin"] for tok in line.split()]
    verts = sorted({int(b.split("_")[1]) for b in binaries if b.startswith("x_")})
    k = len({b.split("_")[2] for b in binaries if b.startswith("x_")})
    return IlpModel(objective, constraints, bounds, binaries, verts, k)


# -- solutions -----------------------------------------------------------

_STATUS_WORDS = (("infeasible", "infeasible"), ("time limit", "timeout"), ("timeout", "timeout"),
                 ("stopped", "timeout"), ("feasible", "feasible"), ("optimal", "optimal"))


def parse_solution(text: str, model: IlpModel) -> IlpSolution:
    """Read ``variable value`` pairs; any line without a known variable
    followed by a number is ignored except for status keywords."""
    known = set(model.binaries)
    values: dict[str, float] = {}
    status = None
    for line in text.splitlines():
        tok = line.replace("=", " ").split()
        hit = False
        for a, b in zip(tok, tok[1:]):
            if a in known:
                try:
                    values[a] = float(b)
                    hit = True
                except ValueError:
                    pass
                break
        if not hit and status is None:
            low = line.lower()
            for word, st in _STATUS_WORDS:
                if word in low:
                    status = st
                    break
    assignment = {}
    for v in model.vertices:
        blocks = [j for j in range(model.k) if values.get(xname(v, j), 0.0) > 0.5]
        if len(blocks) == 1:
            assignment[v] = blocks[0]
    complete = len(assignment) == len(model.vertices)
    if status is None:
        status = "optimal" if complete else "infeasible"
    objective = None
    if complete:
        coef = {var: c for c, var in model.objective}
        objective = sum(c for var, c in coef.items() if values.get(var, 0.0) > 0.5)
    return IlpSolution(objective, assignment, status, values)


def evaluate_assignment(g: Graph, assignment: dict[int, int]) -> int:
    """Weight of the edges of ``g`` whose endpoints get different blocks.

    ``assignment`` is keyed by original vertex id; every terminal must sit
    in its own block.
    """
    block = {}
    for v, mem in g.members.items():
        try:
            block[v] = assignment[mem[0]]
        except KeyError:
            raise AssignmentError(f"vertex {mem[0]} is unassigned") from None
    for i, t in enumerate(g.terminals):
        if block[t] != i:
            raise AssignmentError(f"terminal {i} (vertex {g.members[t][0]}) sits in block {block[t]}")
    return g.cut_weight(block)


# -- Kernel+ILP ----------------------------------------------------------

@dataclass
class Export:
    component: int
    lp: Path
    manifest: Path
    kernel_n: int
    kernel_m: int
    deleted: int
    status: str = "exported"
    objective: Optional[int] = None


@dataclass
class KernelIlpOutcome:
    exports: list[Export]
    result: Optional[CutResult]  # present when every component got solved
    status: str
    reductions: ReductionLog = field(default_factory=ReductionLog)


def run_solver(command: str, lp: Path, sol: Path, timeout: Optional[float] = None) -> Optional[str]:
    """Run an external solver; ``{lp}`` and ``{sol}`` in the template are
    replaced by the file paths.  Returns the solution text, or ``None`` when
    the solver cannot be run or produced nothing."""
    argv = [a.format(lp=str(lp), sol=str(sol)) for a in shlex.split(command)]
    try:
        subprocess.run(argv, check=False, timeout=timeout, capture_output=True)
    except (OSError, subprocess.TimeoutExpired):
        return None
    return sol.read_text() if sol.exists() else None


def kernel_ilp(g: Graph, out_dir: PathLike, reductions: ReductionConfig = ReductionConfig(),
               solver_cmd: Optional[str] = None, timeout: Optional[float] = None) -> KernelIlpOutcome:
    """Kernelize every component with three or more terminals and hand the
    kernel to an integer program.

    Each open kernel is written as ``component_<i>.lp`` with a manifest
    mapping kernel vertices to original ids (1-indexed) and the deleted
    weight.  With ``solver_cmd`` the programs are solved and lifted back.
    With every reduction group switched off the raw component is exported.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    exports: list[Export] = []
    rlog = ReductionLog()
    assignment = {x: 0 for x in g.loose}
    statuses = set()

    for ci, comp in enumerate(connected_components(g)):
        if comp.kind in ("empty", "single"):
            b = comp.terminals[0] if comp.terminals else 0
            for v in comp.vertices:
                for x in g.members[v]:
                    assignment[x] = b
            continue
        sub = g.subgraph(comp.vertices)
        if comp.kind == "pair":
            cut = min_s_T_cut(sub, sub.terminals[0], [sub.terminals[1]])
            for v in comp.vertices:
                b = comp.terminals[0] if v in cut.min_side else comp.terminals[1]
                for x in g.members[v]:
                    assignment[x] = b
            continue
        p = Problem(sub)
        if str(reductions) != "none":
            _, klog = kernelize(p, reductions, stop_when_closed=False)
            rlog.merge(klog)
        if p.closed:
            for x, b in p.witness.items():
                assignment[x] = comp.terminals[b]
            continue
        kg = p.graph
        model = build_ilp(kg)
        lp = write_lp(model, out / f"component_{ci}.lp")
        manifest = out / f"component_{ci}.manifest.json"
        manifest.write_text(json.dumps({
            "component": ci,
            "deleted": p.deleted,
            "terminals": [comp.terminals[i] + 1 for i in range(kg.k)],
            "kernel_terminals": list(kg.terminals),
            "vertices": {str(v): [x + 1 for x in sorted(kg.members[v])] for v in sorted(kg.adj)},
            "loose": [x + 1 for x in sorted(kg.loose)],
            "upper_bound": None if math.isinf(p.upper) else int(p.upper),
            "lower_bound": p.lower,
        }, indent=1, sort_keys=True) + "\n")
        exp = Export(ci, lp, manifest, kg.n, kg.m, p.deleted)
        exports.append(exp)
        if solver_cmd is None:
            statuses.add("exported")
            continue
        text = run_solver(solver_cmd, lp, out / f"component_{ci}.sol", timeout)
        if text is None:
            exp.status = "unavailable"
            statuses.add("unavailable")
            continue
        sol = parse_solution(text, model)
        exp.status = sol.status
        statuses.add(sol.status)
        if sol.objective is None:
            continue
        exp.objective = sol.objective
        lifted = kg.lift(sol.assignment, loose_block=0)
        for x, b in lifted.items():
            assignment[x] = comp.terminals[b]

    result = None
    if all(e.objective is not None for e in exports):
        optimal = all(e.status == "optimal" for e in exports)
        result = CutResult(evaluate_assignment(g, assignment), assignment, optimal,
                           kernel_n=sum(e.kernel_n for e in exports),
                           kernel_m=sum(e.kernel_m for e in exports))
        result.reductions = rlog
    if not exports:
        status = "optimal"
    elif statuses == {"optimal"}:
        status = "optimal"
    else:
        status = sorted(statuses - {"optimal"})[0]
    return KernelIlpOutcome(exports, result, status, rlog)
