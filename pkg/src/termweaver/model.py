"""Three-valued model oracles and depth-bounded model checking.

Truth values are ``True``, ``False`` and ``None`` (maybe).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from . import syntax as S
from .arith import builtin_truth, is_builtin
from .linarith import Lin
from .measure import norm_eval, norm_lin

Tri = Optional[bool]


@dataclass(frozen=True)
class Constraint:
    """``ground(var)`` or ``lhs op rhs`` over norms of pattern variables."""

    op: str
    var: Optional[S.Var] = None
    lhs: Optional[Lin] = None
    rhs: Optional[Lin] = None

    def holds(self, sub: S.Substitution) -> bool:
        if self.op == "ground":
            return S.is_ground(S.apply(sub, self.var))
        env = {}
        for key in set(self.lhs.keys()) | set(self.rhs.keys()):
            norm, v = key
            env[key] = norm_eval(norm, S.apply(sub, v))
        from .arith import compare
        return compare("=:=" if self.op == "=" else self.op, self.lhs.evaluate(env), self.rhs.evaluate(env))

    def instantiate(self, sub: S.Substitution):
        """Constraint as linear facts over the norms of the substituted terms."""
        def tr(e: Lin) -> Lin:
            out = Lin({}, e.const)
            for (norm, v), c in e.coeffs.items():
                out = out + norm_lin(norm, S.apply(sub, v)) * c
            return out
        return tr(self.lhs), tr(self.rhs)

    def format(self) -> str:
        if self.op == "ground":
            return f"ground({self.var})"

        def fmt(e: Lin) -> str:
            parts = []
            for (norm, v), c in sorted(e.coeffs.items(), key=lambda kv: str(kv[0])):
                parts.append(f"{norm}({v})" if c == 1 else f"{c}*{norm}({v})")
            if e.const or not parts:
                parts.append(str(e.const))
            return " + ".join(parts)
        return f"{fmt(self.lhs)} {self.op} {fmt(self.rhs)}"


@dataclass(frozen=True)
class ModelPattern:
    pattern: S.Struct
    constraints: Tuple[Constraint, ...] = ()

    def matches(self, atom: S.Struct) -> bool:
        sub = S.match(self.pattern, atom)
        if sub is None:
            return False
        return all(c.holds(sub) for c in self.constraints)

    def format(self) -> str:
        text = S.format_term(self.pattern)
        if self.constraints:
            text += " when " + ", ".join(c.format() for c in self.constraints)
        return text


def _negate(v: Tri) -> Tri:
    return None if v is None else not v


class Oracle:
    kind = "abstract"

    def atom_truth(self, atom: S.Struct) -> Tri:
        raise NotImplementedError

    def holds(self, lit) -> Tri:
        if isinstance(lit, S.Struct):
            lit = S.Literal(True, lit)
        if not S.is_ground(lit.atom):
            raise ValueError(f"oracle query on nonground literal {S.format_literal(lit)}")
        v = self.atom_truth(lit.atom)
        return v if lit.positive else _negate(v)

    def patterns(self, pred) -> Optional[List[ModelPattern]]:
        """Declared patterns of ``pred`` when its truth is exactly their union."""
        return None

    def true_instances(self, atom: S.Struct, depth: int) -> Optional[List[S.Struct]]:
        """All true instances of ``atom`` in the depth-bounded base when the
        oracle knows them and every other instance there is false."""
        return None

    def describe(self) -> str:
        return self.kind


class ConservativeOracle(Oracle):
    kind = "conservative"

    def atom_truth(self, atom):
        return None


class DeclaredOracle(Oracle):
    kind = "declared"

    def __init__(self, patterns: Sequence[ModelPattern]):
        self._by_pred: Dict[S.PredKey, List[ModelPattern]] = {}
        for p in patterns:
            self._by_pred.setdefault(p.pattern.key, []).append(p)

    def atom_truth(self, atom):
        if is_builtin(atom.key):
            return builtin_truth(atom)
        pats = self._by_pred.get(atom.key)
        if pats is None:
            return None
        return any(p.matches(atom) for p in pats)

    def patterns(self, pred):
        return self._by_pred.get(pred)

    def covered(self) -> List[S.PredKey]:
        return list(self._by_pred)


class OverrideOracle(Oracle):
    """Another oracle with some atoms forced to a given value."""

    def __init__(self, base: Oracle, overrides: Dict[S.Struct, Tri]):
        self.base = base
        self.overrides = dict(overrides)
        self.kind = base.kind + "+overrides"

    def atom_truth(self, atom):
        if atom in self.overrides:
            return self.overrides[atom]
        return self.base.atom_truth(atom)


def in_base(atom: S.Struct, depth: int) -> bool:
    return all(S.term_depth(a) <= depth for a in atom.args)


def _extend(vs: Sequence[S.Var], universe, sub: S.Substitution) -> Iterator[S.Substitution]:
    if not vs:
        yield sub
        return
    v, rest = vs[0], vs[1:]
    for t in universe:
        sub[v] = t
        yield from _extend(rest, universe, sub)
    sub.pop(v, None)


def _new_vars(x, sub) -> List[S.Var]:
    return [v for v in S.term_vars(x) if v not in sub]


class Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0
        self.exhausted = False

    def tick(self) -> bool:
        self.used += 1
        if self.used > self.cap:
            self.exhausted = True
        return not self.exhausted


# -- stratified least model --------------------------------------------------


def _strata(p: S.Program):
    """Predicate SCCs in bottom-up order; flag SCCs with internal negation."""
    from .depgraph import build_depgraph, sccs_bottom_up

    g = build_depgraph(p)
    out = []
    for comp in sccs_bottom_up(g):
        comp_set = set(comp)
        neg_inside = any(
            (a in comp_set and b in comp_set and neg)
            for (a, b), tags in g.edges.items() for neg in [("negative" in tags)]
        )
        out.append((comp, not neg_inside))
    return out


class LeastModelOracle(Oracle):
    """Bottom-up model of a stratified program over the depth-bounded base.

    Atoms outside the base, and atoms of predicates in a strongly connected
    component containing negation, answer maybe.
    """

    kind = "least-model"

    def __init__(self, p: S.Program, depth: int, sig: Optional[S.Signature] = None, cap: int = 10**6):
        self.program = p
        self.depth = depth
        self.sig = sig or S.program_signature(p)
        self.universe = S.ground_terms(self.sig, depth)
        self.facts: Dict[S.PredKey, Set[S.Struct]] = {}
        self.unknown_preds: Set[S.PredKey] = set()
        self.truncated = False
        self._budget = Budget(cap)
        self._compute()

    def describe(self):
        return f"least-model(depth={self.depth})"

    def _compute(self):
        for comp, ok in _strata(self.program):
            if not ok:
                self.unknown_preds.update(comp)
                continue
            comp_set = set(comp)
            clauses = [c for c in self.program.clauses if c.pred in comp_set]
            if any(l.pred in self.unknown_preds for c in clauses for l in c.body):
                self.unknown_preds.update(comp)
                continue
            for k in comp:
                self.facts.setdefault(k, set())
            changed = True
            while changed and not self._budget.exhausted:
                changed = False
                for c in clauses:
                    for head in list(self._derive(c)):
                        if head not in self.facts[head.key]:
                            self.facts[head.key].add(head)
                            changed = True
        if self._budget.exhausted:
            self.truncated = True

    def _derive(self, c: S.Clause) -> Iterator[S.Struct]:
        def body(i: int, sub: S.Substitution):
            if not self._budget.tick():
                return
            if i == len(c.body):
                rest = _new_vars(c.head, sub)
                for s2 in _extend(rest, self.universe, sub):
                    h = S.apply(s2, c.head)
                    if in_base(h, self.depth):
                        yield h
                return
            lit = c.body[i]
            atom = S.apply(sub, lit.atom)
            if lit.positive and not is_builtin(atom.key) and atom.key in self.facts and atom.key not in self.unknown_preds:
                for fact in list(self.facts[atom.key]):
                    s2 = S.match(atom, fact)
                    if s2 is None:
                        continue
                    merged = dict(sub)
                    merged.update(s2)
                    yield from body(i + 1, merged)
                return
            vs = _new_vars(atom, sub)
            for s2 in _extend(vs, self.universe, dict(sub)):
                g = S.apply(s2, atom)
                v = self._truth_now(g)
                if v is None:
                    continue  # cannot derive through unknown atoms
                if v == lit.positive:
                    yield from body(i + 1, dict(s2))
        yield from body(0, {})

    def _truth_now(self, atom: S.Struct) -> Tri:
        if is_builtin(atom.key):
            return builtin_truth(atom)
        if atom.key in self.unknown_preds or not in_base(atom, self.depth):
            return None
        return atom in self.facts.get(atom.key, set())

    def atom_truth(self, atom):
        if is_builtin(atom.key):
            return builtin_truth(atom)
        if atom.key in self.unknown_preds or not in_base(atom, self.depth):
            return None
        if self.truncated:
            return True if atom in self.facts.get(atom.key, set()) else None
        return atom in self.facts.get(atom.key, set())

    def true_instances(self, atom, depth):
        key = atom.key
        if (self.truncated or is_builtin(key) or key in self.unknown_preds or depth > self.depth):
            return None
        return [f for f in self.facts.get(key, ()) if S.match(atom, f) is not None]

    def atoms(self) -> Set[S.Struct]:
        out: Set[S.Struct] = set()
        for v in self.facts.values():
            out |= v
        return out


def least_model_definite(p: S.Program, depth: int, sig: Optional[S.Signature] = None,
                         cap: int = 10**6) -> Set[S.Struct]:
    if not p.is_definite():
        raise ValueError("least_model_definite needs a definite program")
    lm = LeastModelOracle(p, depth, sig, cap)
    if lm.truncated:
        raise OverflowError("least model computation exceeded the cap")
    return lm.atoms()


# -- model checking -----------------------------------------------------------


@dataclass
class ModelCheck:
    status: str  # passed, violated, inconclusive
    depth: int
    witness: Optional[str] = None
    clause: Optional[str] = None
    notes: List[str] = field(default_factory=list)


def _walk_instances(c: S.Clause, oracle: Oracle, universe, depth: int, budget: Budget):
    """Yield (head value, maybe flag, substitution) for the ground instances
    of ``c`` inside the depth-bounded base that are not pruned.

    Instances with a true head are skipped and a false body literal cuts the
    branch.  The head goes first unless the oracle can list the true
    instances of the first body literal, in which case the body leads.
    """
    head = S.Literal(True, c.head)
    body_first = bool(c.body) and c.body[0].positive and \
        oracle.true_instances(c.body[0].atom, depth) is not None
    order = list(c.body) + [head] if body_first else [head] + list(c.body)
    is_head = [lit is head for lit in order]
    by_depth = _by_depth(universe, depth)
    bounds = _var_bounds([l.atom for l in order if not is_builtin(l.pred)], depth)

    def step(i, s2, atom_v, hv, maybe):
        if is_head[i]:
            if atom_v is True:
                return None
            return (s2, atom_v, maybe)
        if atom_v is False:
            return None
        return (s2, hv, maybe or atom_v is None)

    def go(i: int, sub: S.Substitution, hv: Tri, maybe: bool):
        if i == len(order):
            yield hv, maybe, dict(sub)
            return
        lit = order[i]
        if not is_head[i] and lit.positive:
            facts = oracle.true_instances(S.apply(sub, lit.atom), depth)
            if facts is not None:
                for fact in facts:
                    if not budget.tick():
                        return
                    s2 = dict(sub)
                    s2.update(S.match(S.apply(sub, lit.atom), fact))
                    yield from go(i + 1, s2, hv, maybe)
                return
        vs = _new_vars(lit.atom, sub)
        for s2 in _extend_each(vs, [by_depth[bounds.get(v, depth)] for v in vs], sub):
            if not budget.tick():
                return
            atom = S.apply(s2, lit.atom)
            if not is_builtin(atom.key) and not in_base(atom, depth):
                continue
            nxt = step(i, s2, oracle.holds(S.Literal(lit.positive, atom)), hv, maybe)
            if nxt is not None:
                yield from go(i + 1, *nxt)
    yield from go(0, {}, None, False)


def _var_bounds(atoms, depth: int) -> Dict[S.Var, int]:
    """Largest value depth each variable may take so that every atom stays in
    the depth-bounded base."""
    out: Dict[S.Var, int] = {}

    def visit(t, room):
        if isinstance(t, S.Var):
            out[t] = max(0, min(out.get(t, room), room))
            return
        for a in t.args:
            visit(a, room - 1)

    for atom in atoms:
        for a in atom.args:
            visit(a, depth)
    return out


def _by_depth(universe, depth: int) -> Dict[int, List[S.Struct]]:
    return {k: [u for u in universe if S.term_depth(u) <= k] for k in range(depth + 1)}


def _extend_each(vs, domains, sub: S.Substitution) -> Iterator[S.Substitution]:
    if not vs:
        yield sub
        return
    v, rest = vs[0], vs[1:]
    for t in domains[0]:
        sub[v] = t
        yield from _extend_each(rest, domains[1:], sub)
    sub.pop(v, None)


def _universe_for(p: S.Program, depth: int, sig: Optional[S.Signature]):
    sig = sig or S.program_signature(p)
    return S.ground_terms(sig, depth)


def check_is_model(oracle: Oracle, p: S.Program, depth: int, sig: Optional[S.Signature] = None,
                   cap: int = 10**6) -> ModelCheck:
    """Check the oracle against every clause instance whose atoms lie in the
    depth-bounded base."""
    universe = _universe_for(p, depth, sig)
    budget = Budget(cap)
    inconclusive: Optional[str] = None
    for c in p.clauses:
        for hv, maybe, sub in _walk_instances(c, oracle, universe, depth, budget):
            if hv is False and not maybe:
                return ModelCheck("violated", depth, S.format_clause(S.apply(sub, c)), c.id)
            if inconclusive is None:
                inconclusive = f"{c.id}: {S.format_clause(S.apply(sub, c))}"
        if budget.exhausted:
            return ModelCheck("inconclusive", depth, notes=[f"instance cap {cap} exceeded"])
    if inconclusive:
        return ModelCheck("inconclusive", depth, notes=[f"undecided instance {inconclusive}"])
    return ModelCheck("passed", depth)


def _support(atom: S.Struct, clauses, oracle: Oracle, universe, depth: int, budget: Budget) -> Tri:
    """True if some clause instance with head ``atom`` has a true body, False if
    every such instance has a false body literal, None otherwise."""
    result: Tri = False
    for c in clauses:
        rc = S.rename(c, "#sup")
        sub = S.unify(rc.head, atom, {})
        if sub is None:
            continue
        sub = S.resolve(sub)
        body = [S.apply(sub, l) for l in rc.body]

        def go(i: int, s: S.Substitution, maybe: bool):
            if i == len(body):
                yield maybe
                return
            lit = body[i]
            if lit.positive:
                facts = oracle.true_instances(S.apply(s, lit.atom), depth)
                if facts is not None:
                    for fact in facts:
                        if not budget.tick():
                            return
                        s2 = dict(s)
                        s2.update(S.match(S.apply(s, lit.atom), fact))
                        yield from go(i + 1, s2, maybe)
                    return
            for s2 in _extend(_new_vars(lit.atom, s), universe, s):
                if not budget.tick():
                    return
                a = S.apply(s2, lit.atom)
                v = oracle.holds(S.Literal(lit.positive, a))
                if not is_builtin(a.key) and not in_base(a, depth):
                    v = None if v is not False else False
                if v is False:
                    continue
                yield from go(i + 1, s2, maybe or v is None)
        for maybe in go(0, {}, False):
            if not maybe:
                return True
            result = None
    return result


def check_complete_model(oracle: Oracle, p: S.Program, depth: int, sig: Optional[S.Signature] = None,
                         cap: int = 10**6) -> ModelCheck:
    """Model check plus the completion of the clauses defining Neg*_P,
    both on the depth-bounded universe."""
    from .depgraph import neg_sets

    base = check_is_model(oracle, p, depth, sig, cap)
    if base.status == "violated":
        return base
    _, negstar, pminus = neg_sets(p)
    if not negstar:
        return base
    sig = sig or S.program_signature(p)
    universe = S.ground_terms(sig, depth)
    budget = Budget(cap)
    notes = list(base.notes)
    for pred in sorted(negstar, key=str):
        clauses = [c for c in pminus if c.pred == pred]
        f, n = pred
        for args in _tuples(universe, n):
            atom = S.Struct(f, args)
            v = oracle.holds(atom)
            if v is None:
                notes.append(f"undecided atom {S.format_term(atom)}")
                continue
            s = _support(atom, clauses, oracle, universe, depth, budget)
            if budget.exhausted:
                return ModelCheck("inconclusive", depth, notes=notes + [f"instance cap {cap} exceeded"])
            if v is True and s is False:
                return ModelCheck("violated", depth, f"unsupported atom {S.format_term(atom)}")
            if v is False and s is True:
                return ModelCheck("violated", depth, f"false atom {S.format_term(atom)} has a true clause body")
            if s is None:
                notes.append(f"undecided support for {S.format_term(atom)}")
    if base.status == "inconclusive" or notes:
        return ModelCheck("inconclusive", depth, notes=notes[:5])
    return ModelCheck("passed", depth)


def _tuples(universe, n):
    import itertools
    return itertools.product(universe, repeat=n)


def oracle_for(p: S.Program) -> Oracle:
    """Declared oracle when the program has model directives, else conservative."""
    if p.model:
        return DeclaredOracle(p.model)
    return ConservativeOracle()
