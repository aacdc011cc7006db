"""Budgeted LDNF interpreter.

The whole search tree is built with the leftmost selection rule.  A ground
negative literal spawns a subsidiary tree; a nonground one flounders.  Every
node, main or subsidiary, is charged to one global budget.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from . import syntax as S
from .arith import ArithError, compare, eval_arith, is_builtin

INTERNAL, SUCCESS, FAILURE, FLOUNDERED, BUDGET_CUT, ERROR = (
    "internal", "success", "failure", "floundered", "budget-cut", "error")

ALL_FINITE = "all-finite"
BUDGET_EXCEEDED = "budget-exceeded"
WITH_FLOUNDERING = "all-finite-with-floundering"


@dataclass(frozen=True)
class BuiltinResult:
    kind: str  # success, failure, error
    sub: Optional[S.Substitution] = None
    message: str = ""


def resolve_builtin(lit: S.Literal, bindings: Optional[S.Substitution] = None) -> BuiltinResult:
    atom = S.apply(bindings or {}, lit.atom)
    try:
        if atom.functor == "is":
            val = eval_arith(atom.args[1])
            sub = S.unify(atom.args[0], S.Struct(val), {})
            if sub is None:
                return BuiltinResult("failure")
            return BuiltinResult("success", S.resolve(sub))
        ok = compare(atom.functor, eval_arith(atom.args[0]), eval_arith(atom.args[1]))
        return BuiltinResult("success", {}) if ok else BuiltinResult("failure")
    except ArithError as e:
        return BuiltinResult("error", message=str(e))


@dataclass
class Node:
    id: int
    parent: Optional[int]
    query: S.Query
    depth: int
    kind: str = INTERNAL
    clause: Optional[str] = None
    subsidiary: bool = False
    note: str = ""

    def record(self) -> Dict:
        out = {"id": self.id, "parent": self.parent, "query": S.format_query(self.query),
               "kind": self.kind, "clause": self.clause}
        if self.subsidiary:
            out["subsidiary"] = True
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class RunVerdict:
    status: str
    nodes: int
    max_depth: int
    answers: List[S.Substitution]
    call_set: List[S.Literal]
    complete: bool
    floundered: int = 0
    errors: int = 0
    tree: List[Node] = field(default_factory=list, repr=False)

    def format_answers(self) -> List[str]:
        out = []
        for a in self.answers:
            if not a:
                out.append("true")
            else:
                out.append(", ".join(f"{v} = {S.format_term(t)}" for v, t in a.items()))
        return out


class _Budget:
    def __init__(self, max_nodes: int, max_depth: int):
        if max_nodes <= 0 or max_depth <= 0:
            raise ValueError("budget limits must be positive")
        self.max_nodes = max_nodes
        self.max_depth = max_depth
        self.count = 0
        self.cut = False


class _Explorer:
    def __init__(self, p: S.Program, max_nodes: int, max_depth: int, keep_tree: bool):
        self.p = p
        self.budget = _Budget(max_nodes, max_depth)
        self.keep_tree = keep_tree
        self.nodes: List[Node] = []
        self.fresh = 0
        self.calls: Dict[str, S.Literal] = {}
        self.deepest = 0
        self.floundered = 0
        self.errors = 0
        self.index: Dict[S.PredKey, List[S.Clause]] = {}
        for c in p.clauses:
            self.index.setdefault(c.pred, []).append(c)

    def new_node(self, parent, query, depth, subsidiary=False) -> Optional[Node]:
        if self.budget.count >= self.budget.max_nodes or depth > self.budget.max_depth:
            self.budget.cut = True
            return None
        self.budget.count += 1
        n = Node(self.budget.count, parent, query, depth, subsidiary=subsidiary)
        self.deepest = max(self.deepest, depth)
        if self.keep_tree:
            self.nodes.append(n)
        if query.literals:
            lit = query.literals[0]
            key = S.variant_key(lit)
            if key not in self.calls:
                self.calls[key] = lit
        return n

    def run(self, query: S.Query, goal: Tuple, parent=None, depth=0, subsidiary=False):
        """Explore from ``query``; returns (answers, summary) where summary
        records whether a success, cut, flounder or error leaf was reached."""
        answers: List[Tuple] = []
        summary = {"success": False, "cut": False, "floundered": False, "error": False}
        self._expand(query, goal, parent, depth, subsidiary, answers, summary)
        return answers, summary

    def _expand(self, query, goal, parent, depth, subsidiary, answers, summary, clause=None):
        node = self.new_node(parent, query, depth, subsidiary)
        if node is None:
            summary["cut"] = True
            return
        node.clause = clause
        if not query.literals:
            node.kind = SUCCESS
            summary["success"] = True
            answers.append(goal)
            return
        lit, rest = query.literals[0], query.literals[1:]
        if not lit.positive:
            if not S.is_ground(lit.atom):
                node.kind = FLOUNDERED
                self.floundered += 1
                summary["floundered"] = True
                return
            _, sub_summary = self.run(S.Query((S.Literal(True, lit.atom),)), (),
                                      node.id, depth + 1, True)
            if sub_summary["success"]:
                node.kind = FAILURE
                node.note = "negated atom succeeds"
                return
            if sub_summary["cut"]:
                node.kind = BUDGET_CUT
                summary["cut"] = True
                return
            if sub_summary["floundered"]:
                node.kind = FLOUNDERED
                node.note = "subsidiary tree floundered"
                self.floundered += 1
                summary["floundered"] = True
                return
            if sub_summary["error"]:
                node.kind = ERROR
                node.note = "subsidiary tree raised an error"
                self.errors += 1
                summary["error"] = True
                return
            self._expand(S.Query(rest), goal, node.id, depth + 1, subsidiary, answers, summary, "neg")
            return
        if is_builtin(lit.pred):
            r = resolve_builtin(lit)
            if r.kind == "failure":
                node.kind = FAILURE
                return
            if r.kind == "error":
                node.kind = ERROR
                node.note = r.message
                self.errors += 1
                summary["error"] = True
                return
            q2 = S.apply(r.sub, S.Query(rest))
            self._expand(q2, S.apply(r.sub, goal), node.id, depth + 1, subsidiary, answers, summary, "builtin")
            return
        matched = False
        for c in self.index.get(lit.pred, ()):
            self.fresh += 1
            rc = S.rename(c, f"#{self.fresh}")
            sub = S.unify(lit.atom, rc.head, {})
            if sub is None:
                continue
            matched = True
            sub = S.resolve(sub)
            q2 = S.Query(tuple(S.apply(sub, l) for l in rc.body + rest))
            self._expand(q2, S.apply(sub, goal), node.id, depth + 1, subsidiary, answers, summary, c.id)
        if not matched:
            node.kind = FAILURE


def explore(p: S.Program, q: S.Query, max_nodes: int = 100000, max_depth: int = 400,
            keep_tree: bool = True) -> RunVerdict:
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20 * max_depth + 1000))
    try:
        ex = _Explorer(p, max_nodes, max_depth, keep_tree)
        qvars = S.term_vars(q)
        goal = tuple(qvars)
        answers, summary = ex.run(q, goal)
    finally:
        sys.setrecursionlimit(old)
    if ex.budget.cut:
        status = BUDGET_EXCEEDED
    elif ex.floundered:
        status = WITH_FLOUNDERING
    else:
        status = ALL_FINITE
    subs = []
    for a in answers:
        subs.append({v: t for v, t in zip(qvars, a) if t != v})
    if ex.budget.cut:
        # answers of an incomplete exploration are not reported
        subs = []
    return RunVerdict(status, ex.budget.count, ex.deepest, subs, list(ex.calls.values()),
                      not ex.budget.cut, ex.floundered, ex.errors, ex.nodes)


def call_set(p: S.Program, q: S.Query, max_nodes: int = 100000, max_depth: int = 400):
    """First literals of all descendants, up to renaming, and a completeness flag."""
    v = explore(p, q, max_nodes, max_depth, keep_tree=False)
    return v.call_set, v.complete


def descendants(p: S.Program, q: S.Query, max_nodes: int = 100000, max_depth: int = 400) -> Iterator[S.Query]:
    for n in explore(p, q, max_nodes, max_depth).tree:
        yield n.query


def trace_records(v: RunVerdict) -> List[Dict]:
    return [n.record() for n in v.tree]


def write_trace(v: RunVerdict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"schema": 1, "nodes": trace_records(v)}, fh, indent=1, sort_keys=True)
        fh.write("\n")
