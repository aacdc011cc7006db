"""Acceptability, strong boundedness and the termination theorem drivers."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import syntax as S
from .arith import is_builtin
from .depgraph import (ModuleHierarchy, build_depgraph, depends_on, finest_decomposition,
                       mutually_recursive, strictly_above, validate_hierarchy, HierarchyError)
from .ldnf import explore
from .linarith import Lin, comparison, entails, feasible
from .measure import LevelExpr, LevelMapping, is_bounded, is_moded_level_mapping, norm_eval, wt_atoms_bounded
from .model import (ConservativeOracle, DeclaredOracle, Oracle, check_complete_model, _extend, _new_vars)
from .wellbehave import (MissingDeclaration, check_well_moded, check_well_typed, effective_modes,
                         effective_types)

PROVED, CHECKED, REFUTED, UNKNOWN = "proved", "checked", "refuted", "unknown"


@dataclass
class Obligation:
    kind: str
    subject: str
    method: str
    outcome: str
    witness: Optional[str] = None
    detail: str = ""
    children: List["Obligation"] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.outcome in (PROVED, CHECKED)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "subject": self.subject, "method": self.method,
                "outcome": self.outcome, "witness": self.witness, "detail": self.detail,
                "children": [c.to_dict() for c in self.children]}

    @classmethod
    def from_dict(cls, d: Dict) -> "Obligation":
        return cls(d["kind"], d["subject"], d["method"], d["outcome"], d.get("witness"),
                   d.get("detail", ""), [cls.from_dict(c) for c in d.get("children", [])])


@dataclass
class ProofObject:
    conclusion: str  # terminates, refuted-premise, unknown
    theorem: str
    obligations: List[Obligation]
    confidence: str = "evidence"
    query: str = ""
    notes: List[str] = field(default_factory=list)

    def walk(self):
        for o in self.obligations:
            yield from o.walk()

    def to_dict(self) -> Dict:
        return {"conclusion": self.conclusion, "theorem": self.theorem, "confidence": self.confidence,
                "query": self.query, "notes": list(self.notes),
                "obligations": [o.to_dict() for o in self.obligations]}

    @classmethod
    def from_dict(cls, d: Dict) -> "ProofObject":
        return cls(d["conclusion"], d["theorem"], [Obligation.from_dict(o) for o in d["obligations"]],
                   d.get("confidence", "evidence"), d.get("query", ""), list(d.get("notes", [])))


def _combine(outcomes: Iterable[str]) -> str:
    outs = list(outcomes)
    if any(o == REFUTED for o in outs):
        return REFUTED
    if any(o == UNKNOWN for o in outs):
        return UNKNOWN
    if outs and all(o == PROVED for o in outs):
        return PROVED
    return CHECKED


# -- enumeration helpers ------------------------------------------------------


class _Cap:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def tick(self) -> bool:
        self.used += 1
        return self.used <= self.cap


def _prefix_witness(prefix: Sequence[S.Literal], sub: S.Substitution, universe, oracle: Oracle,
                    cap: _Cap) -> Optional[S.Substitution]:
    """An extension of ``sub`` under which no prefix literal is oracle-false."""
    def go(i: int, s: S.Substitution):
        if i == len(prefix):
            return dict(s)
        lit = prefix[i]
        for s2 in _extend(_new_vars(lit.atom, s), universe, s):
            if not cap.tick():
                return None
            v = oracle.holds(S.Literal(lit.positive, S.apply(s2, lit.atom)))
            if v is False:
                continue
            found = go(i + 1, s2)
            if found is not None:
                return found
        return None
    return go(0, dict(sub))


def _ground_fill(x, sub: S.Substitution, universe) -> S.Substitution:
    out = dict(sub)
    for v in S.term_vars(S.apply(sub, x)):
        out[v] = universe[0]
    return out


def _lin_vars(e: Lin) -> List[S.Var]:
    out: List[S.Var] = []
    for _, v in sorted(e.keys(), key=str):
        if v not in out:
            out.append(v)
    return out


def _eval_lin(e: Lin, sub: S.Substitution) -> int:
    env = {k: norm_eval(k[0], S.apply(sub, k[1])) for k in e.keys()}
    return int(e.evaluate(env))


def _obviously_positive(e: Lin, strict: bool) -> bool:
    """All norm coefficients non-negative and constant large enough."""
    if any(c < 0 for c in e.coeffs.values()):
        return False
    return e.const > 0 if strict else e.const >= 0


def _targets(c: S.Clause, lm: LevelMapping, module_preds, relation=None):
    """(index, literal, required difference Lin, strict) per body literal."""
    head = lm.lin(c.head)
    for j, lit in enumerate(c.body):
        if relation is None:
            inside = lit.pred in module_preds
            body = lm.lin(lit.atom) if inside else Lin()
            yield j, lit, head - body, True
        else:
            body = lm.lin(lit.atom) if not is_builtin(lit.pred) else Lin()
            yield j, lit, head - body, relation(c.pred, lit.pred)


def _enum_clause(c: S.Clause, lm, oracle, universe, module_preds, cap: _Cap, relation=None,
                 only: Optional[int] = None):
    """First violating ground instance of ``c`` as (literal index, instance),
    or None.  Raises OverflowError when the cap is exceeded."""
    for j, lit, diff, strict in _targets(c, lm, module_preds, relation):
        if only is not None and j != only:
            continue
        if _obviously_positive(diff, strict):
            continue
        vs = _lin_vars(diff)
        for values in itertools.product(universe, repeat=len(vs)):
            if not cap.tick():
                raise OverflowError
            sub = dict(zip(vs, values))
            d = _eval_lin(diff, sub)
            if (d > 0) if strict else (d >= 0):
                continue
            w = _prefix_witness(c.body[:j], sub, universe, oracle, cap)
            if cap.used > cap.cap:
                raise OverflowError
            if w is not None:
                w = _ground_fill(c, w, universe)
                return j, S.apply(w, c)
    return None


def _module_universe(clauses, p: Optional[S.Program], depth: int, sig: Optional[S.Signature]):
    if sig is None:
        base = p if p is not None else S.Program(clauses=tuple(clauses))
        sig = S.program_signature(base)
    return S.ground_terms(sig, depth)


def check_acceptable_enum(module: Sequence[S.Clause], lm: LevelMapping, oracle: Oracle, depth: int,
                          sig: Optional[S.Signature] = None, cap: int = 10**6,
                          module_preds=None, program: Optional[S.Program] = None) -> Obligation:
    """Check acceptability on all ground instances whose variables take
    values of depth at most ``depth``."""
    module = list(module)
    preds = set(module_preds) if module_preds is not None else {c.pred for c in module}
    universe = _module_universe(module, program, depth, sig)
    subject = lm.module
    counter = _Cap(cap)
    method = f"enumerated(depth={depth})"
    for c in module:
        try:
            found = _enum_clause(c, lm, oracle, universe, preds, counter)
        except OverflowError:
            return Obligation("module-acceptable", subject, method, UNKNOWN,
                              detail=f"instance cap {cap} exceeded at clause {c.id}")
        if found is not None:
            j, inst = found
            return Obligation("module-acceptable", subject, method, REFUTED,
                              witness=f"{c.id}: {S.format_clause(inst)}",
                              detail=f"level of the head does not exceed literal {j + 1}")
    return Obligation("module-acceptable", subject, method, CHECKED)


# -- symbolic -----------------------------------------------------------------


def _norm_facts(keys) -> List[Lin]:
    out = []
    for k in keys:
        out.append(Lin.var(k) - (1 if k[0] == "size" else 0))
    return out


def _cases(prefix: Sequence[S.Literal], oracle: Oracle, limit: int = 4096):
    """Substitution and hypothesis list for every combination of declared
    patterns matching the positive prefix literals."""
    results = [({}, [])]
    for i, lit in enumerate(prefix):
        if not lit.positive:
            continue
        pats = oracle.patterns(lit.pred)
        if pats is None:
            continue
        nxt = []
        for sub, hyps in results:
            atom = S.apply(sub, lit.atom)
            for k, pat in enumerate(pats):
                rp = S.rename(pat.pattern, f"#m{i}_{k}")
                ren = S.match(pat.pattern, rp)
                u = S.unify(rp, atom, dict(sub))
                if u is None:
                    continue
                u = S.resolve(u)
                extra = []
                for con in pat.constraints:
                    if con.op == "ground":
                        continue
                    renamed = _rename_constraint(con, ren)
                    lhs, rhs = renamed.instantiate(u)
                    extra.extend(comparison(con.op, lhs, rhs))
                nxt.append((u, hyps + [("pending", extra)]))
        results = nxt
        if len(results) > limit:
            raise OverflowError
    return results


def _rename_constraint(con, ren):
    from .model import Constraint

    def tr(e: Lin) -> Lin:
        return Lin({(n, ren.get(v, v)): c for (n, v), c in e.coeffs.items()}, e.const)
    return Constraint(con.op, None, tr(con.lhs), tr(con.rhs))


def _resubstitute(hyps, sub) -> List[Lin]:
    """Hypotheses were built under earlier substitutions; re-express them."""
    out = []
    for _, lins in hyps:
        for e in lins:
            acc = Lin({}, e.const)
            from .measure import norm_lin
            for (n, v), c in e.coeffs.items():
                acc = acc + norm_lin(n, S.apply(sub, v)) * c
            out.append(acc)
    return out


def _symbolic_literal(c: S.Clause, j: int, lm: LevelMapping, oracle: Oracle, module_preds,
                      strict: bool, relation_target: bool) -> Tuple[bool, Optional[Dict]]:
    """Whether every case entails the required decrease at literal ``j``."""
    lit = c.body[j]
    for sub, hyps in _cases(c.body[:j], oracle):
        head = lm.lin(S.apply(sub, c.head))
        inside = relation_target or lit.pred in module_preds
        body = lm.lin(S.apply(sub, lit.atom)) if inside and not is_builtin(lit.pred) else Lin()
        goal = head - body - (1 if strict else 0)
        hs = _resubstitute(hyps, sub)
        keys = set(goal.keys())
        for h in hs:
            keys |= set(h.keys())
        hs = hs + _norm_facts(sorted(keys, key=str))
        if not entails(hs, [goal]):
            ok, model = feasible(hs + [-goal - 1])
            return False, model
    return True, None


def check_acceptable_symbolic(module: Sequence[S.Clause], lm: LevelMapping, oracle: Oracle,
                              module_preds=None, depth: int = 3, sig: Optional[S.Signature] = None,
                              program: Optional[S.Program] = None) -> Obligation:
    """Linear-arithmetic proof of acceptability over norm variables.

    Failed entailments are confirmed by enumeration at ``depth``; a concrete
    instance makes the outcome refuted, otherwise it is unknown.
    """
    module = list(module)
    preds = set(module_preds) if module_preds is not None else {c.pred for c in module}
    subject = lm.module
    for c in module:
        for j, lit in enumerate(c.body):
            try:
                ok, model = _symbolic_literal(c, j, lm, oracle, preds, True, False)
            except OverflowError:
                return Obligation("module-acceptable", subject, "symbolic", UNKNOWN,
                                  detail=f"too many model cases at clause {c.id}")
            if ok:
                continue
            universe = _module_universe(module, program, depth, sig)
            try:
                found = _enum_clause(c, lm, oracle, universe, preds, _Cap(10**6), only=j)
            except OverflowError:
                found = None
            if found is not None:
                _, inst = found
                return Obligation("module-acceptable", subject, "symbolic", REFUTED,
                                  witness=f"{c.id}: {S.format_clause(inst)}",
                                  detail=f"level of the head does not exceed literal {j + 1}")
            return Obligation("module-acceptable", subject, "symbolic", UNKNOWN,
                              detail=f"{c.id} literal {j + 1}: decrease not entailed; "
                                     f"norm assignment {_fmt_model(model)} not realised at depth {depth}")
    return Obligation("module-acceptable", subject, "symbolic", PROVED)


def _fmt_model(model) -> str:
    if not model:
        return "{}"
    return "{" + ", ".join(f"{n}({v})={val}" for (n, v), val in sorted(model.items(), key=lambda kv: str(kv[0]))) + "}"


def check_acceptable(module, lm, oracle, depth, module_preds=None, sig=None, program=None) -> Obligation:
    """Symbolic first, enumeration as fallback."""
    sym = check_acceptable_symbolic(module, lm, oracle, module_preds, depth, sig, program)
    if sym.outcome in (PROVED, REFUTED):
        return sym
    enum = check_acceptable_enum(module, lm, oracle, depth, sig, module_preds=module_preds, program=program)
    enum.children.append(sym)
    return enum


# -- semi-acceptability -------------------------------------------------------


def check_semi_acceptable(p: S.Program, lm: LevelMapping, oracle: Oracle, mode: str = "enum",
                          depth: int = 3, sig: Optional[S.Signature] = None) -> Obligation:
    """Strict decrease towards mutually recursive predicates, non-strict
    towards predicates strictly below."""
    subject = lm.module
    method = "symbolic" if mode == "symbolic" else f"enumerated(depth={depth})"
    if not p.is_definite():
        return Obligation("semi-acceptable", subject, method, UNKNOWN,
                          detail="semi-acceptability is defined for definite programs only")
    g = build_depgraph(p)

    def strict(a, b):
        return mutually_recursive(g, a, b)

    if mode == "symbolic":
        for c in p.clauses:
            for j, lit in enumerate(c.body):
                ok, _ = _symbolic_literal(c, j, lm, oracle, set(), strict(c.pred, lit.pred), True)
                if not ok:
                    return Obligation("semi-acceptable", subject, method, UNKNOWN,
                                      detail=f"{c.id} literal {j + 1}: decrease not entailed")
        return Obligation("semi-acceptable", subject, method, PROVED)
    universe = _module_universe(p.clauses, p, depth, sig)
    counter = _Cap(10**6)
    for c in p.clauses:
        try:
            found = _enum_clause(c, lm, oracle, universe, set(), counter, relation=strict)
        except OverflowError:
            return Obligation("semi-acceptable", subject, method, UNKNOWN, detail="instance cap exceeded")
        if found is not None:
            j, inst = found
            return Obligation("semi-acceptable", subject, method, REFUTED,
                              witness=f"{c.id}: {S.format_clause(inst)}",
                              detail=f"level condition fails at literal {j + 1}")
    return Obligation("semi-acceptable", subject, method, CHECKED)


def derive_module_levelmaps(lm: LevelMapping, h: ModuleHierarchy, p: Optional[S.Program] = None):
    """Per-module restrictions of a global level mapping.  Returns the
    mappings and a list of warnings."""
    warnings = []
    if p is not None:
        g = build_depgraph(p)
        for m in h.modules:
            for a in m.preds:
                for b in m.preds:
                    if a != b and strictly_above(g, a, b):
                        warnings.append(f"module {m.name} is not finest: "
                                        f"{S.format_pred(a)} is above {S.format_pred(b)}")
    out = [LevelMapping(m.name, {k: e for k, e in lm.exprs.items() if k in m.preds}) for m in h.modules]
    return out, warnings


# -- strong boundedness -------------------------------------------------------


def strongly_bounded_via_wm(p: S.Program, h: ModuleHierarchy, lms: Sequence[LevelMapping],
                            q: S.Query, modes=None) -> Obligation:
    modes = modes if modes is not None else effective_modes(p)
    subject = S.format_query(q)
    children = []
    try:
        rp = check_well_moded(p, modes)
        children.append(Obligation("program-well-moded", "program", "via-wm",
                                   PROVED if rp else REFUTED, rp.witness))
        rq = check_well_moded(q, modes)
        children.append(Obligation("query-well-moded", subject, "via-wm",
                                   PROVED if rq else REFUTED, rq.witness))
        for lm in lms:
            ok, why = is_moded_level_mapping(lm, modes)
            children.append(Obligation("moded-level-mapping", lm.module, "via-wm",
                                       PROVED if ok else REFUTED, why))
    except MissingDeclaration as e:
        return Obligation("query-strongly-bounded", subject, "via-wm", UNKNOWN, detail=str(e), children=children)
    outcome = _combine(c.outcome for c in children)
    failed = next((c for c in children if not c.ok), None)
    return Obligation("query-strongly-bounded", subject, "via-wm", outcome,
                      failed.witness if failed else None, children=children)


def strongly_bounded_via_wt(p: S.Program, h: ModuleHierarchy, lms: Sequence[LevelMapping],
                            q: S.Query, types=None) -> Obligation:
    types = types if types is not None else effective_types(p)
    subject = S.format_query(q)
    children = []

    def tri(v):
        return PROVED if v is True else (REFUTED if v is False else UNKNOWN)

    try:
        rp = check_well_typed(p, types, p.typedefs)
        children.append(Obligation("program-well-typed", "program", "via-wt", tri(rp.verdict), rp.witness))
        rq = check_well_typed(q, types, p.typedefs)
        children.append(Obligation("query-well-typed", subject, "via-wt", tri(rq.verdict), rq.witness))
        for m, lm in zip(h.modules, lms):
            v, why = wt_atoms_bounded(m.preds, lm, types, p.typedefs)
            children.append(Obligation("wt-atoms-bounded", m.name, "via-wt", tri(v), why))
    except MissingDeclaration as e:
        return Obligation("query-strongly-bounded", subject, "via-wt", UNKNOWN, detail=str(e), children=children)
    outcome = _combine(c.outcome for c in children)
    failed = next((c for c in children if not c.ok), None)
    return Obligation("query-strongly-bounded", subject, "via-wt", outcome,
                      failed.witness if failed else None, children=children)


def strongly_bounded_empirical(p: S.Program, h: ModuleHierarchy, lms: Sequence[LevelMapping],
                               q: S.Query, max_nodes: int = 100000, max_depth: int = 400) -> Obligation:
    """Collect the call set within the budget and check every positive call
    against the level mapping of its defining module."""
    subject = S.format_query(q)
    method = f"empirical(budget={max_nodes})"
    v = explore(p, q, max_nodes, max_depth, keep_tree=False)
    sig = S.program_signature(p, [q])
    by_module = {m.name: lm for m, lm in zip(h.modules, lms)}
    for lit in v.call_set:
        if not lit.positive:
            continue
        m = h.module_of(lit.pred)
        if m is None:
            continue
        b = is_bounded(lit.atom, by_module[m.name], sig)
        if b.status == "unbounded":
            return Obligation("query-strongly-bounded", subject, method, REFUTED,
                              witness=f"{S.format_literal(lit)} is unbounded wrt {m.name}: "
                                      + ", ".join(S.format_term(w) for w in b.witness),
                              detail=b.reason)
        if b.status == "unknown":
            return Obligation("query-strongly-bounded", subject, method, UNKNOWN,
                              detail=f"{S.format_literal(lit)}: {b.reason}")
    if not v.complete:
        return Obligation("query-strongly-bounded", subject, method, UNKNOWN,
                          detail=f"call set incomplete: budget of {max_nodes} nodes / depth {max_depth} exceeded")
    return Obligation("query-strongly-bounded", subject, method, CHECKED,
                      detail=f"{len(v.call_set)} calls, all bounded")


# -- bounded queries in the sense of semi-acceptability ----------------------


def query_level_sets(q: S.Query, lm: LevelMapping, oracle: Oracle, depth: int, sig: S.Signature,
                     cap: int = 10**6) -> List[Optional[int]]:
    """Maximum of each level set at ``depth`` (None for an empty set)."""
    universe = S.ground_terms(sig, depth)
    counter = _Cap(cap)
    maxima: List[Optional[int]] = []
    for i, lit in enumerate(q.literals):
        lin = lm.lin(lit.atom)
        vs = _lin_vars(lin)
        best: Optional[int] = None
        for values in itertools.product(universe, repeat=len(vs)):
            if not counter.tick():
                raise OverflowError
            sub = dict(zip(vs, values))
            val = _eval_lin(lin, sub)
            if best is not None and val <= best:
                continue
            if _prefix_witness(q.literals[:i], sub, universe, oracle, counter) is not None:
                best = val
        maxima.append(best)
    return maxima


def bounded_query_ap94(q: S.Query, lm: LevelMapping, oracle: Oracle, depth: int,
                       p: Optional[S.Program] = None, sig: Optional[S.Signature] = None) -> Obligation:
    subject = S.format_query(q)
    method = f"enumerated(depth={depth})"
    if p is not None and not p.is_definite():
        return Obligation("query-bounded", subject, method, UNKNOWN,
                          detail="bounded queries are defined for definite programs only")
    if sig is None:
        sig = S.program_signature(p, [q]) if p is not None else S.program_signature(S.Program(), [q])
    try:
        hi = query_level_sets(q, lm, oracle, depth, sig)
        lo = query_level_sets(q, lm, oracle, max(depth - 1, 1), sig) if depth > 1 else hi
    except OverflowError:
        return Obligation("query-bounded", subject, method, UNKNOWN, detail="instance cap exceeded")
    detail = "maxima " + ", ".join("-" if m is None else str(m) for m in hi)
    if hi == lo:
        return Obligation("query-bounded", subject, method, CHECKED, detail=detail)
    return Obligation("query-bounded", subject, method, UNKNOWN, detail=detail + f" (depth {depth - 1}: "
                      + ", ".join("-" if m is None else str(m) for m in lo) + ")")


# -- theorem drivers ----------------------------------------------------------


@dataclass
class Limits:
    depth: int = 3
    max_nodes: int = 100000
    max_depth: int = 400


STRATEGIES = ("hierarchy-n", "corollary-wm", "corollary-wt")


def hierarchy_for(p: S.Program) -> Tuple[ModuleHierarchy, List[LevelMapping]]:
    """The declared hierarchy when modules are declared, else the finest one."""
    h = validate_hierarchy(p) if p.modules else finest_decomposition(p)
    lms = [LevelMapping(m.name, dict(p.levelmaps.get(m.name, {}))) for m in h.modules]
    return h, lms


def _model_obligation(p: S.Program, oracle: Oracle, depth: int) -> Obligation:
    if isinstance(oracle, ConservativeOracle):
        return Obligation("model-complete", oracle.describe(), "structural", PROVED,
                          detail="no model assumption: acceptability is checked against every complete model")
    r = check_complete_model(oracle, p, depth)
    outcome = {"passed": CHECKED, "violated": REFUTED}.get(r.status, UNKNOWN)
    return Obligation("model-complete", oracle.describe(), f"enumerated(depth={depth})", outcome,
                      r.witness, "; ".join(r.notes))


def prove_termination(p: S.Program, h: Optional[ModuleHierarchy] = None,
                      lms: Optional[Sequence[LevelMapping]] = None, oracle: Optional[Oracle] = None,
                      q: Optional[S.Query] = None, strategy: str = "hierarchy-n",
                      limits: Optional[Limits] = None) -> ProofObject:
    limits = limits or Limits()
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy}")
    q = q if q is not None else S.Query()
    notes: List[str] = []
    obligations: List[Obligation] = []
    try:
        if h is None:
            h, default_lms = hierarchy_for(p)
            lms = lms if lms is not None else default_lms
        else:
            validate_hierarchy(p, [(m.name, m.preds) for m in h.modules])
        obligations.append(Obligation("hierarchy-valid", " > ".join(m.name for m in reversed(h.modules)),
                                      "structural", PROVED))
    except HierarchyError as e:
        obligations.append(Obligation("hierarchy-valid", "modules", "structural", REFUTED,
                                      witness=str(e)))
        return ProofObject("refuted-premise", strategy, obligations, "evidence", S.format_query(q))
    if lms is None:
        lms = [LevelMapping(m.name, dict(p.levelmaps.get(m.name, {}))) for m in h.modules]
    if oracle is None:
        oracle = DeclaredOracle(p.model) if p.model else ConservativeOracle()
        if not p.model and not p.is_definite():
            notes.append("no model declared: conservative oracle, valid for every complete model")
    if not p.is_definite() and strategy == "hierarchy-n" and p.model:
        notes.append("declared model used for a general program")
    obligations.append(_model_obligation(p, oracle, limits.depth))
    sig = S.program_signature(p)

    declared_upto = -1
    if strategy != "hierarchy-n":
        for i, m in enumerate(h.modules):
            if m.name in p.terminating:
                declared_upto = i
    steps = []
    for i, (m, lm) in enumerate(zip(h.modules, lms)):
        if i <= declared_upto:
            steps.append(Obligation("lower-module-terminates", m.name, "declared-by-user", CHECKED,
                                    detail="termination of this module and those below it is assumed"))
            continue
        acc = check_acceptable(m.clauses, lm, oracle, limits.depth, m.preds, sig, p)
        acc.subject = m.name
        steps.append(acc)
    if strategy == "hierarchy-n":
        obligations.extend(steps)
        sb = strongly_bounded_empirical(p, h, lms, q, limits.max_nodes, limits.max_depth)
    elif strategy == "corollary-wm":
        sb = strongly_bounded_via_wm(p, h, lms, q)
    else:
        sb = strongly_bounded_via_wt(p, h, lms, q)
    if strategy != "hierarchy-n":
        # one application of the corollary per module, bottom-up
        bounded = {c.subject: c for c in sb.children if c.kind in ("wt-atoms-bounded", "moded-level-mapping")}
        for i, (m, st) in enumerate(zip(h.modules, steps)):
            kids = [st]
            if m.name in bounded and st.kind != "lower-module-terminates":
                kids.append(bounded[m.name])
            obligations.append(Obligation("iteration-step", f"step {i + 1}: {m.name}", strategy,
                                          _combine(k.outcome for k in kids), children=kids))
    obligations.append(sb)
    outcome = _combine(o.outcome for o in obligations)
    if outcome in (PROVED, CHECKED):
        conclusion = "terminates"
    elif outcome == REFUTED:
        conclusion = "refuted-premise"
    else:
        conclusion = "unknown"
    structural = (p.is_definite() and isinstance(oracle, ConservativeOracle)
                  and all(x.outcome == PROVED for o in obligations for x in o.walk()))
    confidence = "proved" if conclusion == "terminates" and structural else \
        f"evidence(depth={limits.depth}, budget={limits.max_nodes})"
    if p.terminating and strategy != "hierarchy-n":
        notes.append("relies on user-declared termination of " + ", ".join(p.terminating))
    return ProofObject(conclusion, strategy, obligations, confidence, S.format_query(q), notes)


def analyze(p: S.Program, q: S.Query, strategy: Optional[str] = None,
            limits: Optional[Limits] = None, oracle: Optional[Oracle] = None) -> ProofObject:
    """Try the corollaries first (cheapest sound routes), then the general
    theorem with an empirical strong-boundedness check."""
    if strategy:
        return prove_termination(p, q=q, strategy=strategy, limits=limits, oracle=oracle)
    tried = []
    for s in ("corollary-wt", "corollary-wm"):
        po = prove_termination(p, q=q, strategy=s, limits=limits, oracle=oracle)
        if po.conclusion == "terminates":
            po.notes.extend(tried)
            return po
        tried.append(f"{s}: {po.conclusion}")
    po = prove_termination(p, q=q, strategy="hierarchy-n", limits=limits, oracle=oracle)
    po.notes.extend(tried)
    return po
