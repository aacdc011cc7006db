"""Modes, types, type judgements, well-modedness and well-typedness."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import syntax as S

# -- type expressions ---------------------------------------------------------


class TypeExpr:
    def names(self) -> List[str]:
        return []


@dataclass(frozen=True)
class TAny(TypeExpr):
    def __str__(self):
        return "any"


@dataclass(frozen=True)
class TGround(TypeExpr):
    def __str__(self):
        return "ground"


@dataclass(frozen=True)
class TNat(TypeExpr):
    """Peano numerals over 0/s and non-negative integer constants."""

    def __str__(self):
        return "nat"


@dataclass(frozen=True)
class TInt(TypeExpr):
    """Integer constants and Peano numerals."""

    def __str__(self):
        return "int"


@dataclass(frozen=True)
class TList(TypeExpr):
    elem: TypeExpr

    def names(self):
        return self.elem.names()

    def __str__(self):
        return f"list({self.elem})"


@dataclass(frozen=True)
class TNamed(TypeExpr):
    name: str

    def names(self):
        return [self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Ctor(TypeExpr):
    """A constructor alternative of a typedef: ``f(T1, ..., Tn)``."""

    functor: Union[str, int]
    args: Tuple[TypeExpr, ...] = ()

    def names(self):
        return [n for a in self.args for n in a.names()]

    def __str__(self):
        if not self.args:
            return S.format_term(S.Struct(self.functor))
        return f"{S.format_term(S.Struct(self.functor))}({', '.join(map(str, self.args))})"


BUILTIN_TYPE_NAMES = {"any", "ground", "nat", "int", "list"}


def builtin_type(name: str) -> Optional[TypeExpr]:
    return {"any": TAny(), "ground": TGround(), "nat": TNat(), "int": TInt(),
            "list": TList(TAny())}.get(name)


Typedefs = Dict[str, Tuple[TypeExpr, ...]]
Tri = Optional[bool]


def _alts(ty: TNamed, tds: Typedefs) -> Tuple[TypeExpr, ...]:
    if ty.name not in tds:
        raise ValueError(f"unknown type {ty.name!r}")
    return tds[ty.name]


def _is_list_cell(t: S.Term) -> bool:
    return isinstance(t, S.Struct) and t.functor == "." and len(t.args) == 2


def _is_nat_const(t: S.Struct) -> bool:
    return isinstance(t.functor, int) and t.functor >= 0


def _tri_and(vals) -> Tri:
    out: Tri = True
    for v in vals:
        if v is False:
            return False
        if v is None:
            out = None
    return out


def _tri_or(vals) -> Tri:
    out: Tri = False
    for v in vals:
        if v is True:
            return True
        if v is None:
            out = None
    return out


def contains_var(ty: TypeExpr, tds: Typedefs, seen=frozenset()) -> bool:
    """Whether a bare variable belongs to ``ty``."""
    if isinstance(ty, TAny):
        return True
    if isinstance(ty, TNamed):
        if ty.name in seen:
            return False
        return any(contains_var(a, tds, seen | {ty.name}) for a in _alts(ty, tds))
    return False


def subtype(a: TypeExpr, b: TypeExpr, tds: Typedefs, assumed=frozenset()) -> bool:
    """Sound structural inclusion ``a ⊆ b``."""
    if a == b or isinstance(b, TAny):
        return True
    if (a, b) in assumed:
        return True
    assumed = assumed | {(a, b)}
    if isinstance(a, TNamed):
        return all(subtype(x, b, tds, assumed) for x in _alts(a, tds))
    if isinstance(b, TNamed):
        return any(subtype(a, x, tds, assumed) for x in _alts(b, tds))
    if isinstance(b, TGround):
        if isinstance(a, (TNat, TInt)):
            return True
        if isinstance(a, TList):
            return subtype(a.elem, b, tds, assumed)
        if isinstance(a, Ctor):
            return all(subtype(x, b, tds, assumed) for x in a.args)
        return False
    if isinstance(b, TInt):
        return isinstance(a, TNat) or (isinstance(a, Ctor) and _ctor_in_nat(a))
    if isinstance(b, TNat):
        return isinstance(a, Ctor) and _ctor_in_nat(a)
    if isinstance(b, TList):
        if isinstance(a, TList):
            return subtype(a.elem, b.elem, tds, assumed)
        if isinstance(a, Ctor):
            return a.functor == "[]" and not a.args
        return False
    if isinstance(b, Ctor):
        return (isinstance(a, Ctor) and a.functor == b.functor and len(a.args) == len(b.args)
                and all(subtype(x, y, tds, assumed) for x, y in zip(a.args, b.args)))
    return False


def _ctor_in_nat(a: Ctor) -> bool:
    if not a.args:
        return a.functor == 0 or (isinstance(a.functor, int) and a.functor >= 0)
    return a.functor == "s" and len(a.args) == 1 and isinstance(a.args[0], TNat)


def no_instance(t: S.Term, ty: TypeExpr, tds: Typedefs, seen=frozenset()) -> bool:
    """True when no instance of ``t`` belongs to ``ty``."""
    if isinstance(t, S.Var) or isinstance(ty, (TAny, TGround)):
        return False
    if isinstance(ty, (TNat, TInt)):
        if isinstance(t.functor, int):
            return isinstance(ty, TNat) and t.functor < 0
        if t.functor == "s" and len(t.args) == 1:
            return no_instance(t.args[0], TNat(), tds)
        return True
    if isinstance(ty, TList):
        if t == S.NIL:
            return False
        if _is_list_cell(t):
            return no_instance(t.args[0], ty.elem, tds) or no_instance(t.args[1], ty, tds)
        return True
    if isinstance(ty, Ctor):
        if t.functor != ty.functor or len(t.args) != len(ty.args):
            return True
        return any(no_instance(a, x, tds) for a, x in zip(t.args, ty.args))
    if isinstance(ty, TNamed):
        if (ty.name, t) in seen:
            return False
        seen = seen | {(ty.name, t)}
        return all(no_instance(t, x, tds, seen) for x in _alts(ty, tds))
    return False


def _all_instances(t: S.Term, ty: TypeExpr, tds: Typedefs, env, seen=frozenset()) -> Tri:
    """Three-valued membership of ``t`` in ``ty`` where variables range over
    ``env`` bindings (unbound variables range over all terms).

    True: every admissible instance is in ``ty``.  False: some admissible
    instance is not (a counterexample exists when the bindings are satisfiable).
    """
    if isinstance(ty, TAny):
        return True
    if isinstance(t, S.Var):
        bound = env.get(t, ())
        if any(subtype(b, ty, tds) for b in bound):
            return True
        if not bound:
            return True if contains_var(ty, tds) else False
        return None
    if isinstance(ty, TGround):
        return _tri_and(_all_instances(v, ty, tds, env) for v in S.term_vars(t))
    if isinstance(ty, (TNat, TInt)):
        if isinstance(t.functor, int):
            return not (isinstance(ty, TNat) and t.functor < 0)
        if t.functor == "s" and len(t.args) == 1:
            return _all_instances(t.args[0], TNat(), tds, env)
        return False
    if isinstance(ty, TList):
        if t == S.NIL:
            return True
        if _is_list_cell(t):
            return _tri_and([_all_instances(t.args[0], ty.elem, tds, env),
                             _all_instances(t.args[1], ty, tds, env)])
        return False
    if isinstance(ty, Ctor):
        if t.functor != ty.functor or len(t.args) != len(ty.args):
            return False
        return _tri_and(_all_instances(a, x, tds, env) for a, x in zip(t.args, ty.args))
    if isinstance(ty, TNamed):
        if (ty.name, t) in seen:
            return None
        seen = seen | {(ty.name, t)}
        return _tri_or(_all_instances(t, x, tds, env, seen) for x in _alts(ty, tds))
    return None


def term_has_type(t: S.Term, ty: TypeExpr, typedefs: Optional[Typedefs] = None) -> Tri:
    """True iff every instance of ``t`` is in ``ty``; False iff none is."""
    tds = typedefs or {}
    if _all_instances(t, ty, tds, {}) is True:
        return True
    if no_instance(t, ty, tds):
        return False
    return None


# -- type judgements ----------------------------------------------------------


class _Contradiction(Exception):
    pass


def _decompose(t: S.Term, ty: TypeExpr, tds: Typedefs, env: Dict, seen=frozenset()) -> bool:
    """Turn ``t : ty`` into variable bindings.  Returns False if some part
    had to be dropped (the bindings are then weaker than the hypothesis)."""
    if isinstance(ty, TAny):
        return True
    if isinstance(t, S.Var):
        env.setdefault(t, [])
        if ty not in env[t]:
            env[t].append(ty)
        return True
    if no_instance(t, ty, tds):
        raise _Contradiction()
    if isinstance(ty, TGround):
        for v in S.term_vars(t):
            _decompose(v, ty, tds, env)
        return True
    if isinstance(ty, (TNat, TInt)):
        if isinstance(t.functor, int):
            return True
        return _decompose(t.args[0], TNat(), tds, env)
    if isinstance(ty, TList):
        if t == S.NIL:
            return True
        a = _decompose(t.args[0], ty.elem, tds, env)
        b = _decompose(t.args[1], ty, tds, env)
        return a and b
    if isinstance(ty, Ctor):
        ok = True
        for a, x in zip(t.args, ty.args):
            ok = _decompose(a, x, tds, env) and ok
        return ok
    if isinstance(ty, TNamed):
        cands = [x for x in _alts(ty, tds) if not no_instance(t, x, tds)]
        if len(cands) == 1 and (ty.name, t) not in seen:
            return _decompose(t, cands[0], tds, env, seen | {(ty.name, t)})
        return False
    return False


def _consistent(env: Dict, tds: Typedefs) -> bool:
    for tys in env.values():
        for i, a in enumerate(tys):
            for b in tys[i + 1:]:
                if not (subtype(a, b, tds) or subtype(b, a, tds)):
                    return False
    return True


Typed = Tuple[S.Term, TypeExpr]


def type_judgement_holds(hyp: Sequence[Typed], concl: Sequence[Typed],
                         typedefs: Optional[Typedefs] = None) -> Tri:
    """Three-valued truth of ``hyp ⇒ concl`` over all substitutions."""
    tds = typedefs or {}
    env: Dict[S.Var, List[TypeExpr]] = {}
    exact = True
    try:
        for t, ty in hyp:
            exact = _decompose(t, ty, tds, env) and exact
    except _Contradiction:
        return True  # hypotheses are unsatisfiable
    res = _tri_and(_all_instances(t, ty, tds, env) for t, ty in concl)
    if res is False and not (exact and _consistent(env, tds)):
        return None
    return res


def forces_rigid(norm: str, ty: TypeExpr, tds: Typedefs) -> Tri:
    """Whether membership in ``ty`` makes ``norm`` instantiation-invariant."""
    if subtype(ty, TGround(), tds):
        return True
    if norm == "len" and isinstance(ty, TList):
        return True
    if norm == "len" and isinstance(ty, TNamed):
        alts = _alts(ty, tds)
        if all(isinstance(a, TList) or (isinstance(a, Ctor) and (a.functor != "." or len(a.args) != 2))
               for a in alts):
            return True
    return None


# -- declarations -------------------------------------------------------------

_CMP = ("<", ">", "=<", "<=", ">=", "=:=", "=\\=")

BUILTIN_MODES: Dict[S.PredKey, Tuple[str, ...]] = {("is", 2): ("-", "+")}
BUILTIN_MODES.update({(op, 2): ("+", "+") for op in _CMP})

BUILTIN_TYPES: Dict[S.PredKey, Tuple[Tuple[str, TypeExpr], ...]] = {
    ("is", 2): (("-", TInt()), ("+", TGround())),
}
BUILTIN_TYPES.update({(op, 2): (("+", TInt()), ("+", TInt())) for op in _CMP})


class MissingDeclaration(ValueError):
    pass


def effective_modes(p: S.Program) -> Dict[S.PredKey, Tuple[str, ...]]:
    out = dict(BUILTIN_MODES)
    for k, v in p.types.items():
        out[k] = tuple(m for m, _ in v)
    out.update(p.modes)
    return out


def effective_types(p: S.Program) -> Dict[S.PredKey, Tuple[Tuple[str, TypeExpr], ...]]:
    out = dict(BUILTIN_TYPES)
    out.update(p.types)
    return out


@dataclass
class Check:
    verdict: Tri
    witness: Optional[str] = None
    where: Dict = field(default_factory=dict)

    def __bool__(self):
        return self.verdict is True


def _split(lit: S.Literal, modes) -> Tuple[List[S.Term], List[S.Term]]:
    pred = lit.pred
    if pred not in modes:
        raise MissingDeclaration(f"missing mode for {S.format_pred(pred)}")
    ins, outs = [], []
    for m, a in zip(modes[pred], lit.atom.args):
        (ins if m == "+" else outs).append(a)
    return ins, outs


def _vars(ts) -> List[S.Var]:
    out: List[S.Var] = []
    for t in ts:
        for v in S.term_vars(t):
            if v not in out:
                out.append(v)
    return out


def _wm_sequence(lits, known: List[S.Var], modes, final: Optional[List[S.Term]], label: str) -> Check:
    known = list(known)
    for j, lit in enumerate(lits):
        ins, outs = _split(lit, modes)
        missing = [v for v in _vars(ins) if v not in known]
        if missing:
            names = ", ".join(str(v) for v in missing)
            return Check(False, f"{label} literal {j + 1} {S.format_literal(lit)}: "
                                f"input variables {names} not produced earlier",
                         {"literal": j + 1, "missing": [str(v) for v in missing]})
        known.extend(v for v in _vars(outs) if v not in known)
    if final is not None:
        missing = [v for v in _vars(final) if v not in known]
        if missing:
            names = ", ".join(str(v) for v in missing)
            return Check(False, f"{label} head outputs: variables {names} not produced",
                         {"literal": 0, "missing": [str(v) for v in missing]})
    return Check(True)


def check_well_moded(x, modes) -> Check:
    """``modes`` is a program (builtins included) or a mode dictionary."""
    if isinstance(modes, S.Program):
        modes = effective_modes(modes)
    if isinstance(x, S.Program):
        for c in x.clauses:
            r = check_well_moded(c, modes)
            if not r:
                return r
        return Check(True)
    if isinstance(x, S.Clause):
        ins, outs = _split(S.Literal(True, x.head), modes)
        r = _wm_sequence(x.body, _vars(ins), modes, outs, f"clause {x.id}")
        if r.verdict is False:
            r.where["clause"] = x.id
        return r
    if isinstance(x, S.Query):
        return _wm_sequence(x.literals, [], modes, None, "query")
    raise TypeError(type(x))


def _typed_split(lit: S.Literal, types) -> Tuple[List[Typed], List[Typed]]:
    pred = lit.pred
    if pred not in types:
        raise MissingDeclaration(f"missing type for {S.format_pred(pred)}")
    ins, outs = [], []
    for (m, ty), a in zip(types[pred], lit.atom.args):
        (ins if m == "+" else outs).append((a, ty))
    return ins, outs


def _fmt_judgement(hyp, concl) -> str:
    def side(xs):
        return ", ".join(f"{S.format_term(t)}:{ty}" for t, ty in xs) or "()"
    return f"{side(hyp)} => {side(concl)}"


def _wt_sequence(lits, hyp: List[Typed], types, tds, final, label: str) -> Check:
    hyp = list(hyp)
    undecided: Optional[Check] = None
    for j, lit in enumerate(lits):
        ins, outs = _typed_split(lit, types)
        v = type_judgement_holds(hyp, ins, tds)
        if v is not True:
            c = Check(v, f"{label} literal {j + 1} {S.format_literal(lit)}: "
                         f"judgement {_fmt_judgement(hyp, ins)} is {'false' if v is False else 'undecided'}",
                      {"literal": j + 1, "judgement": _fmt_judgement(hyp, ins)})
            if v is False:
                return c
            undecided = c if undecided is None else undecided
        if lit.positive:
            hyp.extend(outs)
    if final is not None:
        v = type_judgement_holds(hyp, final, tds)
        if v is not True:
            c = Check(v, f"{label} head outputs: judgement {_fmt_judgement(hyp, final)} is "
                         f"{'false' if v is False else 'undecided'}",
                      {"literal": 0, "judgement": _fmt_judgement(hyp, final)})
            if v is False:
                return c
            undecided = c if undecided is None else undecided
    return Check(True) if undecided is None else undecided


def check_well_typed(x, types, typedefs: Optional[Typedefs] = None) -> Check:
    """``types`` is a program (builtins and typedefs included) or a dictionary
    pred -> ((mode, type), ...).  Outputs of negative literals never serve as
    hypotheses."""
    if isinstance(types, S.Program):
        typedefs = types.typedefs if typedefs is None else typedefs
        types = effective_types(types)
    tds = typedefs or {}
    if isinstance(x, S.Program):
        undecided = None
        for c in x.clauses:
            r = check_well_typed(c, types, tds)
            if r.verdict is False:
                return r
            if r.verdict is None and undecided is None:
                undecided = r
        return Check(True) if undecided is None else undecided
    if isinstance(x, S.Clause):
        ins, outs = _typed_split(S.Literal(True, x.head), types)
        r = _wt_sequence(x.body, ins, types, tds, outs, f"clause {x.id}")
        if r.verdict is not True:
            r.where["clause"] = x.id
        return r
    if isinstance(x, S.Query):
        return _wt_sequence(x.literals, [], types, tds, None, "query")
    raise TypeError(type(x))


def prefix_closure_check(q: S.Query, prop: str, decls, typedefs=None) -> bool:
    """Every non-empty prefix of a query that checks positively also does."""
    check = check_well_moded if prop == "wm" else check_well_typed
    args = (decls,) if prop == "wm" else (decls, typedefs)
    if not check(q, *args):
        raise ValueError("query does not check positively")
    return all(bool(check(pre, *args)) for pre in q.prefixes())
