"""Predicate dependency graph, extension, hierarchies and decomposition."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from . import syntax as S

PredKey = S.PredKey


@dataclass
class DepGraph:
    nodes: List[PredKey]
    edges: Dict[Tuple[PredKey, PredKey], Set[str]]
    _reach: Dict[PredKey, Set[PredKey]] = field(default_factory=dict, repr=False)

    def succ(self, p: PredKey) -> List[PredKey]:
        return [b for (a, b) in self.edges if a == p]

    def reach(self, p: PredKey) -> Set[PredKey]:
        if p not in self._reach:
            seen = {p}
            stack = [p]
            while stack:
                x = stack.pop()
                for y in self.succ(x):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            self._reach[p] = seen
        return self._reach[p]


def build_depgraph(p: S.Program) -> DepGraph:
    nodes: List[PredKey] = []
    edges: Dict[Tuple[PredKey, PredKey], Set[str]] = {}

    def add(k):
        if k not in nodes:
            nodes.append(k)

    for c in p.clauses:
        add(c.pred)
        for lit in c.body:
            add(lit.pred)
            edges.setdefault((c.pred, lit.pred), set()).add("positive" if lit.positive else "negative")
    return DepGraph(nodes, edges)


def _need(g: DepGraph, *ps):
    for x in ps:
        if x not in g.nodes:
            raise KeyError(f"unknown predicate {S.format_pred(x)}")


def depends_on(g: DepGraph, p: PredKey, q: PredKey) -> bool:
    _need(g, p, q)
    return q in g.reach(p)


def mutually_recursive(g: DepGraph, p: PredKey, q: PredKey) -> bool:
    return depends_on(g, p, q) and depends_on(g, q, p)


def strictly_above(g: DepGraph, p: PredKey, q: PredKey) -> bool:
    return depends_on(g, p, q) and not depends_on(g, q, p)


def sccs(g: DepGraph) -> List[List[PredKey]]:
    """Strongly connected components, each in node order, listed bottom-up
    (a component comes after everything it depends on); ties by first
    occurrence."""
    comps: Dict[PredKey, Tuple[PredKey, ...]] = {}
    for p in g.nodes:
        if p in comps:
            continue
        comp = tuple(q for q in g.nodes if q in g.reach(p) and p in g.reach(q))
        for q in comp:
            comps[q] = comp
    unique: List[Tuple[PredKey, ...]] = []
    for p in g.nodes:
        if comps[p] not in unique:
            unique.append(comps[p])
    done: List[Tuple[PredKey, ...]] = []
    remaining = list(unique)
    while remaining:
        for comp in remaining:
            below = {comps[q] for p in comp for q in g.reach(p)} - {comp}
            if all(b in done for b in below):
                done.append(comp)
                remaining.remove(comp)
                break
    return [list(c) for c in done]


sccs_bottom_up = sccs


def neg_sets(p: S.Program) -> Tuple[Set[PredKey], Set[PredKey], List[S.Clause]]:
    """(Neg_P, Neg*_P, P^-)."""
    neg = {lit.pred for c in p.clauses for lit in c.body if not lit.positive}
    g = build_depgraph(p)
    star: Set[PredKey] = set()
    for q in neg:
        star |= g.reach(q)
    pminus = [c for c in p.clauses if c.pred in star]
    return neg, star, pminus


def _defined(clauses: Iterable[S.Clause]) -> List[PredKey]:
    out: List[PredKey] = []
    for c in clauses:
        if c.pred not in out:
            out.append(c.pred)
    return out


def check_extension(upper: Sequence[S.Clause], lower: Sequence[S.Clause]):
    """``upper`` extends ``lower`` iff no predicate defined in ``upper``
    occurs in ``lower``.  Returns ``(ok, witness)`` with witness
    ``(pred, clause id)``."""
    defined = set(_defined(upper))
    for c in lower:
        for k in [c.pred] + [l.pred for l in c.body]:
            if k in defined:
                return False, (k, c.id)
    return True, None


@dataclass(frozen=True)
class Module:
    name: str
    preds: Tuple[PredKey, ...]
    clauses: Tuple[S.Clause, ...]

    @property
    def clause_ids(self) -> List[str]:
        return [c.id for c in self.clauses]


@dataclass
class ModuleHierarchy:
    """Modules R_1..R_n, bottom first."""

    modules: List[Module]

    def module_of(self, pred: PredKey) -> Optional[Module]:
        for m in self.modules:
            if pred in m.preds:
                return m
        return None

    def index_of(self, pred: PredKey) -> Optional[int]:
        for i, m in enumerate(self.modules):
            if pred in m.preds:
                return i
        return None

    def describe(self) -> List[str]:
        return [f"R{i + 1} {m.name}: {', '.join(S.format_pred(k) for k in m.preds)}"
                f" [{', '.join(m.clause_ids)}]" for i, m in enumerate(self.modules)]


class HierarchyError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def validate_hierarchy(p: S.Program, assignment: Optional[Sequence[Tuple[str, Sequence[PredKey]]]] = None) -> ModuleHierarchy:
    """Build the hierarchy from module assignments (the program's directives
    by default), bottom module first, and verify each layer extends the
    union of the layers below."""
    if assignment is None:
        assignment = p.modules
    defined = p.defined()
    seen: Dict[PredKey, str] = {}
    modules: List[Module] = []
    for name, preds in assignment:
        for k in preds:
            if k not in defined:
                raise HierarchyError(f"module {name} lists undefined predicate {S.format_pred(k)}")
            if k in seen:
                raise HierarchyError(f"{S.format_pred(k)} is in both {seen[k]} and {name}")
            seen[k] = name
        pset = tuple(preds)
        modules.append(Module(name, pset, tuple(c for c in p.clauses if c.pred in pset)))
    missing = [k for k in defined if k not in seen]
    if missing:
        raise HierarchyError("predicates not assigned to a module: "
                             + ", ".join(S.format_pred(k) for k in missing))
    for i in range(1, len(modules)):
        lower = [c for m in modules[:i] for c in m.clauses]
        ok, wit = check_extension(modules[i].clauses, lower)
        if not ok:
            pred, cid = wit
            raise HierarchyError(
                f"module {modules[i].name} does not extend the modules below it: "
                f"{S.format_pred(pred)} occurs in clause {cid}", wit)
    return ModuleHierarchy(modules)


def finest_decomposition(p: S.Program) -> ModuleHierarchy:
    """Maximal hierarchy in which no predicate of a module is strictly above
    another predicate of the same module.

    Components of the dependency graph are layered by their longest distance
    from the top.  A layer is one module, except that a layer made only of
    components with no outgoing dependencies becomes one module per
    component (ordered by first occurrence).
    """
    g = build_depgraph(p)
    defined = p.defined()
    comps = [c for c in sccs(g) if any(k in defined for k in c)]
    comps = [[k for k in c if k in defined] for c in comps]
    index = {k: i for i, c in enumerate(comps) for k in c}
    deps: Dict[int, Set[int]] = {i: set() for i in range(len(comps))}
    for (a, b) in g.edges:
        if a in index and b in index and index[a] != index[b]:
            deps[index[a]].add(index[b])
    # longest distance from a component nobody depends on
    dist: Dict[int, int] = {}
    for i in reversed(range(len(comps))):  # top-down order
        parents = [j for j in deps if i in deps[j]]
        dist[i] = max((dist[j] + 1 for j in parents), default=0)
    layers: Dict[int, List[int]] = {}
    for i in range(len(comps)):
        layers.setdefault(dist[i], []).append(i)
    first = {k: n for n, k in enumerate(defined)}
    modules: List[Tuple[str, List[PredKey]]] = []
    for d in sorted(layers, reverse=True):
        members = sorted(layers[d], key=lambda i: min(first[k] for k in comps[i]))
        groups = [[i] for i in members] if all(not deps[i] for i in members) else [members]
        for grp in groups:
            preds = sorted((k for i in grp for k in comps[i]), key=lambda k: first[k])
            modules.append((f"m{len(modules) + 1}", preds))
    return validate_hierarchy(p, modules)
