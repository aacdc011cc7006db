"""Term norms, linear level mappings and boundedness by rigidity."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import syntax as S
from .linarith import Lin

NORMS = ("len", "size")


def norm_eval(norm: str, t: S.Term) -> int:
    """``len`` counts list cells along the spine; ``size`` counts functor
    occurrences, constants included."""
    if not S.is_ground(t):
        raise ValueError(f"norm of nonground term {S.format_term(t)}")
    if norm == "len":
        n = 0
        while isinstance(t, S.Struct) and t.functor == "." and len(t.args) == 2:
            n += 1
            t = t.args[1]
        return n
    if norm == "size":
        return _size(t)
    raise ValueError(f"unknown norm {norm}")


def _size(t: S.Term) -> int:
    return 1 + sum(_size(a) for a in t.args)


def norm_lin(norm: str, t: S.Term) -> Lin:
    """Norm of a possibly nonground term as a linear expression over the
    norms of its variables (keys ``(norm, Var)``)."""
    if norm == "len":
        n = 0
        while isinstance(t, S.Struct) and t.functor == "." and len(t.args) == 2:
            n += 1
            t = t.args[1]
        if isinstance(t, S.Var):
            return Lin.var(("len", t)) + n
        return Lin({}, n)
    if norm == "size":
        if isinstance(t, S.Var):
            return Lin.var(("size", t))
        out = Lin({}, 1)
        for a in t.args:
            out = out + norm_lin("size", a)
        return out
    raise ValueError(f"unknown norm {norm}")


def is_rigid(norm: str, t: S.Term) -> bool:
    return norm_lin(norm, t).is_const()


@dataclass(frozen=True)
class LevelExpr:
    """``const + sum(coef * norm(arg[index]))`` with 0-based indices."""

    const: int = 0
    terms: Tuple[Tuple[int, str, int], ...] = ()

    def positions(self) -> List[int]:
        return sorted({i for c, _, i in self.terms if c > 0})

    def eval(self, atom: S.Struct) -> int:
        return self.const + sum(c * norm_eval(n, atom.args[i]) for c, n, i in self.terms)

    def lin(self, atom: S.Struct) -> Lin:
        out = Lin({}, self.const)
        for c, n, i in self.terms:
            out = out + norm_lin(n, atom.args[i]) * c
        return out

    def format(self, names: Optional[List[str]] = None) -> str:
        parts = []
        for c, n, i in self.terms:
            arg = names[i] if names else f"#{i + 1}"
            parts.append(f"{n}({arg})" if c == 1 else f"{c}*{n}({arg})")
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


ZERO = LevelExpr()


@dataclass(frozen=True)
class LevelMapping:
    module: str
    exprs: Dict[S.PredKey, LevelExpr] = field(default_factory=dict)

    def expr(self, pred: S.PredKey) -> LevelExpr:
        return self.exprs.get(pred, ZERO)

    def level(self, lit) -> int:
        """Level of a ground literal; negation is transparent."""
        atom = lit.atom if isinstance(lit, S.Literal) else lit
        if not S.is_ground(atom):
            raise ValueError(f"level of nonground literal {S.format_term(atom)}")
        return self.expr(atom.key).eval(atom)

    def lin(self, lit) -> Lin:
        atom = lit.atom if isinstance(lit, S.Literal) else lit
        return self.expr(atom.key).lin(atom)

    def restrict(self, preds) -> "LevelMapping":
        preds = set(preds)
        return LevelMapping(self.module, {k: v for k, v in self.exprs.items() if k in preds})

    def describe(self) -> List[str]:
        out = []
        for (f, n), e in sorted(self.exprs.items(), key=lambda kv: str(kv[0])):
            names = [f"X{i + 1}" for i in range(n)]
            head = S.format_term(S.Struct(f, tuple(S.Var(x) for x in names)))
            out.append(f"|{head}| = {e.format(names)}")
        return out


def eval_level(lm: LevelMapping, lit) -> int:
    return lm.level(lit)


def module_levelmaps(p: S.Program) -> Dict[str, LevelMapping]:
    return {name: LevelMapping(name, dict(p.levelmaps.get(name, {}))) for name, _ in p.modules}


# -- boundedness --------------------------------------------------------------


@dataclass(frozen=True)
class Bound:
    status: str  # bounded, unbounded, unknown
    max: Optional[int] = None
    witness: Tuple[S.Struct, ...] = ()  # instances with strictly growing levels
    reason: str = ""

    @property
    def bounded(self) -> bool:
        return self.status == "bounded"


def _growing_instances(var: S.Var, norm: str, sig: S.Signature, k: int = 3) -> Optional[List[S.Term]]:
    consts = sig.constants()
    if not consts:
        return None
    base = consts[0]
    if norm == "len":
        if (".", 2) not in sig.functors:
            return None
        return [S.make_list([base] * (j + 1)) for j in range(k)]
    grow = [(f, n) for f, n in sig.functors if n > 0]
    if not grow:
        return None
    f, n = grow[0]
    out, t = [], base
    for _ in range(k):
        t = S.Struct(f, (t,) + (base,) * (n - 1))
        out.append(t)
    return out


def is_bounded(atom: S.Struct, lm: LevelMapping, sig: Optional[S.Signature] = None) -> Bound:
    """Decide boundedness of ``atom`` wrt ``lm`` by rigidity of its norm terms."""
    expr = lm.expr(atom.key)
    lin = expr.lin(atom)
    if lin.is_const():
        return Bound("bounded", int(lin.const))
    if sig is None:
        return Bound("unknown", reason="no signature to grow instances")
    # coefficients are non-negative, so growing one norm variable grows the level
    for key in sorted(lin.coeffs, key=str):
        norm, var = key
        inst = _growing_instances(var, norm, sig)
        if inst is None:
            continue
        others = {v: _filler(v, sig) for v in S.term_vars(atom) if v != var}
        if any(x is None for x in others.values()):
            continue
        witness = tuple(S.apply({**others, var: t}, atom) for t in inst)
        return Bound("unbounded", witness=witness,
                     reason=f"{norm}({var}) grows under instantiation")
    return Bound("unknown", reason="signature cannot grow the non-rigid norm terms")


def _filler(v: S.Var, sig: S.Signature) -> Optional[S.Term]:
    consts = sig.constants()
    return consts[0] if consts else None


def is_moded_level_mapping(lm: LevelMapping, modes: Dict[S.PredKey, Tuple[str, ...]]) -> Tuple[bool, Optional[str]]:
    """Whether every level expression reads only input positions."""
    for pred, e in sorted(lm.exprs.items(), key=lambda kv: str(kv[0])):
        if pred not in modes:
            raise ValueError(f"missing mode for {S.format_pred(pred)}")
        for i in e.positions():
            if modes[pred][i] != "+":
                return False, f"{S.format_pred(pred)} level reads output position {i + 1}"
    return True, None


def wt_atoms_bounded(preds, lm: LevelMapping, types, typedefs=None):
    """Whether every well-typed atom of ``preds`` is bounded wrt ``lm``.

    Returns ``(verdict, note)`` with verdict in {True, False, None}; None means
    a norm/type pair outside the rigidity table.
    """
    from .wellbehave import forces_rigid

    unknown = None
    for pred in preds:
        e = lm.expr(pred)
        if not e.positions():
            continue
        if pred not in types:
            return None, f"missing type for {S.format_pred(pred)}"
        decl = types[pred]
        for c, norm, i in e.terms:
            if c <= 0:
                continue
            tag, ty = decl[i]
            if tag != "+":
                f, n = pred
                atom = S.Struct(f, tuple(S.Var(f"X{j + 1}") for j in range(n)))
                return False, f"{S.format_term(atom)}: level reads output position {i + 1}"
            r = forces_rigid(norm, ty, typedefs or {})
            if r is None and unknown is None:
                unknown = f"{S.format_pred(pred)}: {norm} on type {ty} is not known to be rigid"
    if unknown:
        return None, unknown
    return True, None
