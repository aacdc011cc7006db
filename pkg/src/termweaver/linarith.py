"""Linear expressions over integer-valued unknowns and a small exact
feasibility test (Fourier-Motzkin elimination over the rationals).

Strict inequalities between integer expressions are tightened to ``>= 1``
before elimination, so an infeasible rational system proves the integer
system infeasible as well.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Tuple


class Lin:
    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs: Optional[Dict[Hashable, Fraction]] = None, const=0):
        self.coeffs = {k: Fraction(v) for k, v in (coeffs or {}).items() if v != 0}
        self.const = Fraction(const)

    @classmethod
    def var(cls, key: Hashable, coeff=1) -> "Lin":
        return cls({key: coeff})

    def __add__(self, other) -> "Lin":
        other = _lift(other)
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0) + v
        return Lin(c, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "Lin":
        return Lin({k: -v for k, v in self.coeffs.items()}, -self.const)

    def __sub__(self, other) -> "Lin":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "Lin":
        return _lift(other) - self

    def __mul__(self, k) -> "Lin":
        k = Fraction(k)
        return Lin({key: v * k for key, v in self.coeffs.items()}, self.const * k)

    __rmul__ = __mul__

    def is_const(self) -> bool:
        return not self.coeffs

    def keys(self):
        return self.coeffs.keys()

    def substitute(self, key: Hashable, value: "Lin") -> "Lin":
        if key not in self.coeffs:
            return self
        c = dict(self.coeffs)
        k = c.pop(key)
        return Lin(c, self.const) + value * k

    def evaluate(self, env: Dict[Hashable, Fraction]) -> Fraction:
        return self.const + sum(v * env[k] for k, v in self.coeffs.items())

    def __eq__(self, other) -> bool:
        other = _lift(other)
        return self.coeffs == other.coeffs and self.const == other.const

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.const))

    def __repr__(self) -> str:
        parts = [f"{v}*{k}" for k, v in sorted(self.coeffs.items(), key=lambda kv: str(kv[0]))]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


def _lift(x) -> Lin:
    return x if isinstance(x, Lin) else Lin({}, x)


# A constraint ``e >= 0``.
Geq = Lin


def comparison(op: str, lhs: Lin, rhs: Lin) -> List[Geq]:
    """Constraints (each meaning ``e >= 0``) for ``lhs op rhs`` over the integers."""
    d = lhs - rhs
    if op == ">":
        return [d - 1]
    if op == ">=":
        return [d]
    if op == "<":
        return [-d - 1]
    if op in ("=<", "<="):
        return [-d]
    if op in ("=", "=:="):
        return [d, -d]
    raise ValueError(f"unsupported comparison {op}")


def feasible(constraints: Iterable[Geq]) -> Tuple[bool, Optional[Dict[Hashable, Fraction]]]:
    """Rational feasibility of a conjunction of ``e >= 0`` constraints.

    Returns ``(True, model)`` or ``(False, None)``.
    """
    cons = [c for c in constraints]
    order: List[Hashable] = []
    for c in cons:
        for k in c.keys():
            if k not in order:
                order.append(k)
    order.sort(key=str)
    eliminated: List[Tuple[Hashable, List[Geq]]] = []
    current = cons
    for key in order:
        lower, upper, rest = [], [], []
        for c in current:
            a = c.coeffs.get(key, 0)
            if a > 0:
                lower.append(c)
            elif a < 0:
                upper.append(c)
            else:
                rest.append(c)
        # keep the bounds for back-substitution
        eliminated.append((key, lower + upper))
        combined = []
        for lo in lower:
            for up in upper:
                a, b = lo.coeffs[key], -up.coeffs[key]
                combined.append(lo * b + up * a)
        current = _dedupe(rest + combined)
        if any(c.is_const() and c.const < 0 for c in current):
            return False, None
    if any(c.const < 0 for c in current):
        return False, None
    model: Dict[Hashable, Fraction] = {}
    for key, bounds in reversed(eliminated):
        lo_val: Optional[Fraction] = None
        hi_val: Optional[Fraction] = None
        for c in bounds:
            a = c.coeffs[key]
            rest = Lin({k: v for k, v in c.coeffs.items() if k != key}, c.const)
            val = -rest.evaluate(model) / a
            if a > 0:
                lo_val = val if lo_val is None else max(lo_val, val)
            else:
                hi_val = val if hi_val is None else min(hi_val, val)
        if lo_val is not None:
            model[key] = lo_val
        elif hi_val is not None:
            model[key] = min(hi_val, Fraction(0)) if hi_val >= 0 else hi_val
        else:
            model[key] = Fraction(0)
    return True, model


def _dedupe(cons: List[Geq]) -> List[Geq]:
    seen = set()
    out = []
    for c in cons:
        if c.is_const() and c.const >= 0:
            continue
        c = _normalize(c)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def _normalize(c: Geq) -> Geq:
    m = max((abs(v) for v in c.coeffs.values()), default=Fraction(1))
    return c * (1 / m) if m else c


def entails(hyps: Iterable[Geq], goal: List[Geq]) -> bool:
    """Whether the hypotheses entail every goal constraint (each ``e >= 0``).

    Sound over the integers: each goal is refuted by adding its integer
    negation ``-e - 1 >= 0`` and testing rational feasibility.
    """
    hyps = list(hyps)
    for g in goal:
        ok, _ = feasible(hyps + [-g - 1])
        if ok:
            return False
    return True
