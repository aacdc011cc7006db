"""Command-line front end."""
from __future__ import annotations

import argparse
import importlib.resources
import os
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional

from . import syntax as S
from .depgraph import HierarchyError, finest_decomposition, validate_hierarchy
from .ldnf import ALL_FINITE, BUDGET_EXCEEDED, explore, write_trace
from .measure import is_bounded
from .model import ConservativeOracle, DeclaredOracle, check_complete_model
from .parser import ProgramError, parse_program, parse_query
from .prover import Limits, STRATEGIES, analyze, hierarchy_for
from .report import header, records_to_text, render_report
from .wellbehave import MissingDeclaration, check_well_moded, check_well_typed

EX_USAGE, EX_DATAERR, EX_NOINPUT = 64, 65, 66


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    path: str
    query: Optional[str]
    depth: int
    max_nodes: int
    max_depth: int
    strategy: Optional[str]
    fmt: str
    trace: Optional[str]

    def __post_init__(self):
        for name in ("depth", "max_nodes", "max_depth"):
            if getattr(self, name) <= 0:
                raise CliError(EX_USAGE, f"--{name.replace('_', '-')} must be positive")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _default_depth() -> int:
    env = os.environ.get("TERMWEAVER_DEPTH")
    if env is None:
        return 3
    try:
        v = int(env)
    except ValueError:
        raise CliError(EX_USAGE, f"TERMWEAVER_DEPTH is not an integer: {env!r}")
    if v <= 0:
        raise CliError(EX_USAGE, "TERMWEAVER_DEPTH must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgParser(prog="termweaver", description="Termination analysis of general logic programs.")
    sub = ap.add_subparsers(dest="command", parser_class=_ArgParser)
    sub.required = True

    def common(name, help_, query_pos=False):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file")
        if query_pos:
            sp.add_argument("query_text", nargs="?", metavar="query")
        sp.add_argument("--query", dest="query")
        sp.add_argument("--depth", type=_positive, default=None)
        sp.add_argument("--max-nodes", type=_positive, default=100000)
        sp.add_argument("--max-depth", type=_positive, default=400)
        sp.add_argument("--format", dest="fmt", choices=("text", "structured"), default="text")
        return sp

    sp = common("analyze", "prove termination of a query")
    sp.add_argument("--strategy", choices=STRATEGIES, default=None)
    sp = common("run", "explore the LDNF tree of a query", query_pos=True)
    sp.add_argument("--trace", default=None)
    common("callset", "list the call set of a query", query_pos=True)
    common("decompose", "show the declared and the finest module hierarchy")
    common("check-modes", "check well-modedness of the program and query")
    common("check-types", "check well-typedness of the program and query")
    common("check-model", "check the declared model on the depth-bounded universe")
    common("levels", "show level mappings and boundedness of query atoms")
    return ap


def resolve_path(path: str) -> str:
    """Existing paths win; ``corpus/<name>`` falls back to the bundled corpus."""
    if os.path.exists(path):
        return path
    name = os.path.basename(path)
    bundled = importlib.resources.files("termweaver") / "corpus" / name
    if bundled.is_file():
        return str(bundled)
    raise CliError(EX_NOINPUT, f"no such file: {path}")


def load_program(path: str):
    real = resolve_path(path)
    with open(real, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_program(text)
    except ProgramError as e:
        raise CliError(EX_DATAERR, "\n".join(f"{path}:{d}" for d in e.diagnostics))


def _query(cfg: RunConfig, required: bool) -> Optional[S.Query]:
    if cfg.query is None:
        if required:
            raise CliError(EX_USAGE, f"{cfg.command} needs a query")
        return None
    try:
        return parse_query(cfg.query)
    except ProgramError as e:
        raise CliError(EX_DATAERR, "\n".join(f"query:{d}" for d in e.diagnostics))


class Output:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.records: List[Dict] = []
        self.lines: List[str] = []

    def emit(self, text: str, **rec):
        self.lines.append(text)
        if rec:
            rec.setdefault("schema", 1)
            self.records.append(rec)

    def render(self) -> str:
        if self.cfg.fmt == "structured":
            return records_to_text(self.records)
        return "\n".join(self.lines) + "\n"


def cmd_analyze(cfg, p) -> int:
    q = _query(cfg, True)
    po = analyze(p, q, cfg.strategy, Limits(cfg.depth, cfg.max_nodes, cfg.max_depth))
    sys.stdout.write(render_report(po, cfg.fmt, os.path.basename(cfg.path)))
    return {"terminates": 0, "refuted-premise": 1}.get(po.conclusion, 2)


def cmd_run(cfg, p) -> int:
    q = _query(cfg, True)
    v = explore(p, q, cfg.max_nodes, cfg.max_depth, keep_tree=cfg.trace is not None)
    if cfg.trace:
        write_trace(v, cfg.trace)
    out = Output(cfg)
    out.emit(f"status: {v.status}", **header("run", query=S.format_query(q), status=v.status, nodes=v.nodes,
                                             max_depth=v.max_depth, floundered=v.floundered, errors=v.errors))
    out.emit(f"nodes: {v.nodes}  depth: {v.max_depth}  floundered: {v.floundered}  errors: {v.errors}")
    if v.status == BUDGET_EXCEEDED:
        out.emit(f"possible non-termination: budget of {cfg.max_nodes} nodes / depth {cfg.max_depth} exhausted")
    for a in v.format_answers():
        out.emit(f"answer: {a}", record="answer", answer=a)
    sys.stdout.write(out.render())
    return 2 if v.status == BUDGET_EXCEEDED else 0


def cmd_callset(cfg, p) -> int:
    q = _query(cfg, True)
    v = explore(p, q, cfg.max_nodes, cfg.max_depth, keep_tree=False)
    out = Output(cfg)
    out.emit(f"call set of {S.format_query(q)} ({'complete' if v.complete else 'incomplete'}):",
             **header("callset", query=S.format_query(q), complete=v.complete, size=len(v.call_set)))
    for lit in v.call_set:
        out.emit("  " + S.format_literal(lit), record="call", literal=S.format_literal(lit))
    sys.stdout.write(out.render())
    return 0 if v.complete else 2


def _module_lines(out: Output, label: str, h):
    for i, m in enumerate(h.modules):
        preds = [S.format_pred(k) for k in m.preds]
        out.emit(f"  R{i + 1} {m.name}: {', '.join(preds)} [{', '.join(m.clause_ids)}]",
                 record="module", hierarchy=label, index=i + 1, name=m.name, preds=preds, clauses=m.clause_ids)


def cmd_decompose(cfg, p) -> int:
    out = Output(cfg)
    code = 0
    out.emit(f"program: {os.path.basename(cfg.path)}", **header("decompose", source=os.path.basename(cfg.path)))
    if p.modules:
        try:
            h = validate_hierarchy(p)
            out.emit("declared hierarchy (valid):")
            _module_lines(out, "declared", h)
        except HierarchyError as e:
            out.emit(f"declared hierarchy invalid: {e}", record="error", message=str(e))
            code = 1
    f = finest_decomposition(p)
    out.emit(f"finest decomposition ({len(f.modules)} modules):")
    if not p.is_definite():
        out.emit("  note: program uses negation; the decomposition treats negative dependencies like positive ones",
                 record="note", message="negation present")
    _module_lines(out, "finest", f)
    sys.stdout.write(out.render())
    return code


def _verdict_code(v) -> int:
    return 0 if v is True else (1 if v is False else 2)


def cmd_check(cfg, p, kind: str) -> int:
    q = _query(cfg, False)
    out = Output(cfg)
    out.emit(f"{kind} check: {os.path.basename(cfg.path)}", **header(f"check-{kind}", source=os.path.basename(cfg.path)))
    verdicts = []
    targets = [("program", p)] + ([("query", q)] if q is not None else [])
    for label, x in targets:
        try:
            c = check_well_moded(x, p) if kind == "modes" else check_well_typed(x, p)
        except MissingDeclaration as e:
            raise CliError(2, f"missing declaration: {e}")
        word = {True: "holds", False: "fails", None: "undecided"}[c.verdict]
        prop = "well-moded" if kind == "modes" else "well-typed"
        text = f"{label} {prop}: {word}"
        if c.witness:
            text += f" ({c.witness})"
        out.emit(text, record="check", target=label, verdict=c.verdict, witness=c.witness)
        verdicts.append(c.verdict)
    sys.stdout.write(out.render())
    if any(v is False for v in verdicts):
        return 1
    return 0 if all(v is True for v in verdicts) else 2


def cmd_check_model(cfg, p) -> int:
    out = Output(cfg)
    if not p.model:
        out.emit("no model declared", **header("check-model", source=os.path.basename(cfg.path), status="no-model"))
        sys.stdout.write(out.render())
        return 2
    r = check_complete_model(DeclaredOracle(p.model), p, cfg.depth)
    out.emit(f"declared model at depth {cfg.depth}: {r.status}",
             **header("check-model", source=os.path.basename(cfg.path), depth=cfg.depth, status=r.status,
                      witness=r.witness, notes=list(r.notes)))
    if r.witness:
        out.emit(f"  witness: {r.witness}")
    for n in r.notes:
        out.emit(f"  note: {n}")
    sys.stdout.write(out.render())
    return {"passed": 0, "violated": 1}.get(r.status, 2)


def cmd_levels(cfg, p) -> int:
    q = _query(cfg, False)
    out = Output(cfg)
    h, lms = hierarchy_for(p)
    out.emit(f"level mappings: {os.path.basename(cfg.path)}", **header("levels", source=os.path.basename(cfg.path)))
    for m, lm in zip(h.modules, lms):
        lines = lm.describe()
        out.emit(f"  {m.name}:", record="module", name=m.name, levels=lines)
        for line in lines:
            out.emit(f"    {line}")
    code = 0
    if q is not None:
        sig = S.program_signature(p, [q])
        for lit in q.literals:
            m = h.module_of(lit.pred)
            if m is None:
                out.emit(f"  {S.format_literal(lit)}: level 0 (not defined in a module)",
                         record="bound", literal=S.format_literal(lit), status="bounded", max=0)
                continue
            b = is_bounded(lit.atom, lms[h.modules.index(m)], sig)
            text = f"  {S.format_literal(lit)} wrt {m.name}: {b.status}"
            if b.max is not None:
                text += f" (max {b.max})"
            if b.reason:
                text += f": {b.reason}"
            out.emit(text, record="bound", literal=S.format_literal(lit), module=m.name, status=b.status,
                     max=b.max, reason=b.reason)
            if b.status != "bounded":
                code = 2
    sys.stdout.write(out.render())
    return code


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        query = args.query
        if query is None and getattr(args, "query_text", None) is not None:
            query = args.query_text
        cfg = RunConfig(args.command, args.file, query,
                        args.depth if args.depth is not None else _default_depth(),
                        args.max_nodes, args.max_depth, getattr(args, "strategy", None), args.fmt,
                        getattr(args, "trace", None))
        p = load_program(cfg.path)
        if cfg.command == "analyze":
            return cmd_analyze(cfg, p)
        if cfg.command == "run":
            return cmd_run(cfg, p)
        if cfg.command == "callset":
            return cmd_callset(cfg, p)
        if cfg.command == "decompose":
            return cmd_decompose(cfg, p)
        if cfg.command == "check-modes":
            return cmd_check(cfg, p, "modes")
        if cfg.command == "check-types":
            return cmd_check(cfg, p, "types")
        if cfg.command == "check-model":
            return cmd_check_model(cfg, p)
        return cmd_levels(cfg, p)
    except CliError as e:
        sys.stderr.write(f"termweaver: {e}\n")
        return e.code
