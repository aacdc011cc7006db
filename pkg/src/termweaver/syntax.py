"""First-order terms, literals, clauses and programs.

Terms are immutable.  Lists are desugared to ``'.'/2`` and ``'[]'``;
integers are 0-ary functors whose functor is a Python ``int``.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Iterable, Iterator, List, Optional, Tuple, Union

if TYPE_CHECKING:
    from .measure import LevelExpr
    from .model import ModelPattern
    from .wellbehave import TypeExpr


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __post_init__(self):
        object.__setattr__(self, "name", sys.intern(self.name))

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Struct:
    functor: Union[str, int]
    args: Tuple["Term", ...] = ()

    def __post_init__(self):
        if isinstance(self.functor, str):
            object.__setattr__(self, "functor", sys.intern(self.functor))

    @property
    def key(self) -> Tuple[Union[str, int], int]:
        return (self.functor, len(self.args))

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, Struct]
PredKey = Tuple[Union[str, int], int]

NIL = Struct("[]")


def cons(head: Term, tail: Term) -> Struct:
    return Struct(".", (head, tail))


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    result = tail
    for item in reversed(list(items)):
        result = cons(item, result)
    return result


def is_int(t: Term) -> bool:
    return isinstance(t, Struct) and isinstance(t.functor, int)


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_ground(a) for a in t.args)


def term_vars(t, acc: Optional[List[Var]] = None) -> List[Var]:
    """Variables of a term, literal, clause or query in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(t, Var):
        if t not in acc:
            acc.append(t)
    elif isinstance(t, Struct):
        for a in t.args:
            term_vars(a, acc)
    elif isinstance(t, Literal):
        term_vars(t.atom, acc)
    elif isinstance(t, Clause):
        term_vars(t.head, acc)
        for lit in t.body:
            term_vars(lit.atom, acc)
    elif isinstance(t, (Query, tuple, list)):
        for lit in t:
            term_vars(lit, acc)
    return acc


def term_depth(t: Term) -> int:
    """Functor-nesting depth; a constant has depth 1, a variable depth 0."""
    if isinstance(t, Var):
        return 0
    if not t.args:
        return 1
    return 1 + max(term_depth(a) for a in t.args)


def list_items(t: Term) -> Tuple[List[Term], Term]:
    """Split a list spine into its elements and the final tail."""
    items = []
    while isinstance(t, Struct) and t.functor == "." and len(t.args) == 2:
        items.append(t.args[0])
        t = t.args[1]
    return items, t


# -- literals, clauses, queries ----------------------------------------------


@dataclass(frozen=True, slots=True)
class Literal:
    positive: bool
    atom: Struct

    @property
    def pred(self) -> PredKey:
        return self.atom.key

    def negate(self) -> "Literal":
        return Literal(not self.positive, self.atom)

    def __str__(self) -> str:
        return format_literal(self)


def rel(lit: Literal) -> PredKey:
    return lit.pred


@dataclass(frozen=True, slots=True)
class Clause:
    head: Struct
    body: Tuple[Literal, ...] = ()
    id: str = ""

    @property
    def pred(self) -> PredKey:
        return self.head.key

    def is_definite(self) -> bool:
        return all(lit.positive for lit in self.body)

    def __str__(self) -> str:
        return format_clause(self)


@dataclass(frozen=True, slots=True)
class Query:
    literals: Tuple[Literal, ...] = ()

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    def __getitem__(self, i):
        return self.literals[i]

    def first(self) -> Literal:
        return first(self)

    def prefixes(self) -> List["Query"]:
        return [Query(self.literals[:i]) for i in range(1, len(self.literals) + 1)]

    def __str__(self) -> str:
        return format_query(self)


def first(q: Query) -> Literal:
    if not q.literals:
        raise ValueError("first() of an empty query")
    return q.literals[0]


@dataclass(frozen=True)
class Typedef:
    name: str
    alternatives: Tuple["TypeExpr", ...]


@dataclass(frozen=True)
class Program:
    clauses: Tuple[Clause, ...] = ()
    modes: Dict[PredKey, Tuple[str, ...]] = field(default_factory=dict)
    types: Dict[PredKey, Tuple[Tuple[str, "TypeExpr"], ...]] = field(default_factory=dict)
    typedefs: Dict[str, Tuple["TypeExpr", ...]] = field(default_factory=dict)
    modules: Tuple[Tuple[str, Tuple[PredKey, ...]], ...] = ()
    levelmaps: Dict[str, Dict[PredKey, "LevelExpr"]] = field(default_factory=dict)
    model: Tuple["ModelPattern", ...] = ()
    terminating: Tuple[str, ...] = ()
    extra_signature: Tuple[PredKey, ...] = ()

    def defined(self) -> List[PredKey]:
        seen: List[PredKey] = []
        for c in self.clauses:
            if c.pred not in seen:
                seen.append(c.pred)
        return seen

    def clauses_for(self, pred: PredKey) -> List[Clause]:
        return [c for c in self.clauses if c.pred == pred]

    def clause(self, cid: str) -> Clause:
        for c in self.clauses:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def is_definite(self) -> bool:
        return all(c.is_definite() for c in self.clauses)

    def mode_of(self, pred: PredKey) -> Optional[Tuple[str, ...]]:
        if pred in self.modes:
            return self.modes[pred]
        if pred in self.types:
            return tuple(m for m, _ in self.types[pred])
        return None

    def signature(self) -> "Signature":
        return program_signature(self)

    def subprogram(self, clauses: Iterable[Clause]) -> "Program":
        return Program(
            clauses=tuple(clauses),
            modes=self.modes,
            types=self.types,
            typedefs=self.typedefs,
            extra_signature=self.extra_signature,
        )


# -- substitutions and unification --------------------------------------------

Substitution = Dict[Var, Term]


def walk(t: Term, sub: Substitution) -> Term:
    while isinstance(t, Var) and t in sub:
        t = sub[t]
    return t


def apply(sub: Substitution, x):
    """Apply a substitution to a term, literal, clause or query."""
    if not sub:
        return x
    if isinstance(x, Var):
        if x in sub:
            return apply(sub, sub[x]) if _needs_resolve(sub, sub[x]) else sub[x]
        return x
    if isinstance(x, Struct):
        if not x.args:
            return x
        return Struct(x.functor, tuple(apply(sub, a) for a in x.args))
    if isinstance(x, Literal):
        return Literal(x.positive, apply(sub, x.atom))
    if isinstance(x, Clause):
        return Clause(apply(sub, x.head), tuple(apply(sub, l) for l in x.body), x.id)
    if isinstance(x, Query):
        return Query(tuple(apply(sub, l) for l in x.literals))
    if isinstance(x, tuple):
        return tuple(apply(sub, e) for e in x)
    if isinstance(x, list):
        return [apply(sub, e) for e in x]
    raise TypeError(f"cannot apply substitution to {type(x).__name__}")


def _needs_resolve(sub: Substitution, t: Term) -> bool:
    if isinstance(t, Var):
        return t in sub
    return any(_needs_resolve(sub, a) for a in t.args)


def occurs(v: Var, t: Term, sub: Substitution) -> bool:
    t = walk(t, sub)
    if t == v:
        return True
    if isinstance(t, Struct):
        return any(occurs(v, a, sub) for a in t.args)
    return False


def unify(t1: Term, t2: Term, sub: Optional[Substitution] = None) -> Optional[Substitution]:
    """Extend ``sub`` (triangular form) to unify t1 and t2, with occurs-check."""
    sub = dict(sub) if sub else {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = walk(a, sub)
        b = walk(b, sub)
        if a == b:
            continue
        if isinstance(a, Var):
            if occurs(a, b, sub):
                return None
            sub[a] = b
        elif isinstance(b, Var):
            if occurs(b, a, sub):
                return None
            sub[b] = a
        else:
            if a.functor != b.functor or len(a.args) != len(b.args):
                return None
            stack.extend(zip(a.args, b.args))
    return sub


def resolve(sub: Substitution) -> Substitution:
    """Turn a triangular substitution into an idempotent one."""
    out = {}
    for v, t in sub.items():
        r = apply(sub, t)
        if r != v:
            out[v] = r
    return out


def mgu(t1, t2) -> Optional[Substitution]:
    """Most general unifier of two terms (or two literals); None on failure."""
    if isinstance(t1, Literal) and isinstance(t2, Literal):
        if t1.positive != t2.positive:
            return None
        t1, t2 = t1.atom, t2.atom
    sub = unify(t1, t2)
    return None if sub is None else resolve(sub)


def match(pattern: Term, t: Term, sub: Optional[Substitution] = None) -> Optional[Substitution]:
    """One-way matching: bind variables of ``pattern`` only."""
    sub = dict(sub) if sub else {}
    stack = [(pattern, t)]
    while stack:
        p, u = stack.pop()
        if isinstance(p, Var):
            if p in sub:
                if sub[p] != u:
                    return None
            else:
                sub[p] = u
        elif isinstance(u, Var):
            return None
        else:
            if p.functor != u.functor or len(p.args) != len(u.args):
                return None
            stack.extend(zip(p.args, u.args))
    return sub


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    """The substitution s1 followed by s2."""
    out = {v: apply(s2, t) for v, t in s1.items()}
    for v, t in s2.items():
        if v not in out:
            out[v] = t
    return {v: t for v, t in out.items() if t != v}


def rename(x, suffix: str):
    """Rename all variables of x by appending ``suffix``."""
    vs = term_vars(x)
    return apply({v: Var(v.name + suffix) for v in vs}, x)


def variant_key(x) -> str:
    """A string equal for two objects iff they are variants of each other."""
    vs = term_vars(x)
    canon = {v: Var(f"_V{i}") for i, v in enumerate(vs)}
    y = apply(canon, x)
    if isinstance(y, Literal):
        return format_literal(y)
    if isinstance(y, Query):
        return format_query(y)
    return format_term(y)


# -- ground instances ---------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Function symbols available for building ground terms."""

    functors: Tuple[PredKey, ...]

    def constants(self) -> List[Struct]:
        return [Struct(f) for f, n in self.functors if n == 0]

    def with_extra(self, extra: Iterable[PredKey]) -> "Signature":
        fs = list(self.functors)
        for k in extra:
            if k not in fs:
                fs.append(k)
        return Signature(tuple(sorted(fs, key=_sig_order)))


def _sig_order(k: PredKey):
    f, n = k
    return (n, 0 if isinstance(f, int) else 1, f if isinstance(f, int) else 0, str(f))


ARITH_BUILTINS = {("is", 2), ("<", 2), ("=<", 2), ("<=", 2), (">", 2), (">=", 2), ("=:=", 2), ("=\\=", 2)}


def collect_functors(t: Term, acc: List[PredKey]) -> None:
    if isinstance(t, Struct):
        if t.key not in acc:
            acc.append(t.key)
        for a in t.args:
            collect_functors(a, acc)


def program_signature(p: Program, extra_terms: Iterable = ()) -> Signature:
    """Functors occurring in argument positions of non-arithmetic literals.

    Arithmetic expressions inside builtin literals are evaluated, not data,
    so their functors are left out of the term universe.
    """
    acc: List[PredKey] = []
    atoms = []
    for c in p.clauses:
        atoms.append(c.head)
        atoms.extend(l.atom for l in c.body)
    for x in extra_terms:
        if isinstance(x, Literal):
            atoms.append(x.atom)
        elif isinstance(x, Query):
            atoms.extend(l.atom for l in x)
        else:
            atoms.append(Struct("$", (x,)))
    for a in atoms:
        if a.key in ARITH_BUILTINS:
            continue
        for arg in a.args:
            collect_functors(arg, acc)
    return Signature(tuple(sorted(acc, key=_sig_order))).with_extra(p.extra_signature)


_TERM_CACHE: Dict[Tuple[Signature, int], Tuple[Struct, ...]] = {}


def ground_terms(sig: Signature, depth: int) -> Tuple[Struct, ...]:
    """All ground terms of depth <= ``depth``, ordered by depth then structure."""
    key = (sig, depth)
    if key in _TERM_CACHE:
        return _TERM_CACHE[key]
    if depth <= 0:
        result: Tuple[Struct, ...] = ()
    elif depth == 1:
        result = tuple(sig.constants())
    else:
        smaller = ground_terms(sig, depth - 1)
        prev = ground_terms(sig, depth - 2) if depth >= 2 else ()
        prev_set = set(prev)
        new = []
        for f, n in sig.functors:
            if n == 0:
                continue
            for args in itertools.product(smaller, repeat=n):
                if all(a in prev_set for a in args):
                    continue  # depth < depth, already present
                new.append(Struct(f, args))
        result = smaller + tuple(new)
    _TERM_CACHE[key] = result
    return result


class GroundInstances:
    """Finite stream of ground instances of a clause (or any syntactic object).

    After iteration, ``truncated`` tells whether ``cap`` cut the stream.
    """

    def __init__(self, x, sig: Signature, depth: int, cap: int = 10**6):
        self.x = x
        self.sig = sig
        self.depth = depth
        self.cap = cap
        self.truncated = False

    def __iter__(self):
        vs = term_vars(self.x)
        if not vs:
            yield self.x
            return
        universe = ground_terms(self.sig, self.depth)
        count = 0
        for values in itertools.product(universe, repeat=len(vs)):
            if count >= self.cap:
                self.truncated = True
                return
            count += 1
            yield apply(dict(zip(vs, values)), self.x)


def ground_instances(c, sig: Signature, depth: int, cap: int = 10**6) -> GroundInstances:
    return GroundInstances(c, sig, depth, cap)


# -- printing -----------------------------------------------------------------

_INFIX = {"is": 700, "<": 700, ">": 700, "=<": 700, "<=": 700, ">=": 700, "=": 700,
          "=:=": 700, "\\=": 700, "+": 500, "-": 500, "*": 400, "/": 400, "//": 400,
          "mod": 400}


def _atom_text(f) -> str:
    if isinstance(f, int):
        return str(f)
    if f == "[]":
        return "[]"
    if f and (f[0].islower()) and all(ch.isalnum() or ch == "_" for ch in f):
        return f
    if f and all(ch in "+-*/\\^<>=~:.?@#&$" for ch in f):
        return f
    return "'" + f.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_term(t: Term, prec: int = 999) -> str:
    if isinstance(t, Var):
        return "_" if t.name.startswith("_#") else t.name
    if isinstance(t.functor, int):
        s = str(t.functor)
        return f"({s})" if t.functor < 0 and prec < 999 else s
    if t.functor == "." and len(t.args) == 2:
        items, tail = list_items(t)
        inner = ",".join(format_term(i) for i in items)
        if tail == NIL:
            return f"[{inner}]"
        return f"[{inner}|{format_term(tail)}]"
    if len(t.args) == 2 and t.functor in _INFIX:
        p = _INFIX[t.functor]
        left = format_term(t.args[0], p)
        right = format_term(t.args[1], p - 1)
        op = f" {t.functor} " if t.functor.isalpha() else t.functor
        s = f"{left}{op}{right}"
        return f"({s})" if p > prec else s
    name = _atom_text(t.functor)
    if not t.args:
        return name
    return f"{name}({','.join(format_term(a) for a in t.args)})"


def format_literal(l: Literal) -> str:
    return format_term(l.atom) if l.positive else "\\+ " + format_term(l.atom)


def format_clause(c: Clause) -> str:
    head = format_term(c.head)
    if not c.body:
        return head + "."
    return head + " :- " + ", ".join(format_literal(l) for l in c.body) + "."


def format_query(q: Query) -> str:
    return ", ".join(format_literal(l) for l in q) + "."


def format_pred(k: PredKey) -> str:
    return f"{_atom_text(k[0])}/{k[1]}"
