"""Integer arithmetic for the builtin predicates.

Peano numerals ``s(...(0))`` evaluate to their value, so programs that count
with ``s/1`` can compare against integer constants.
"""
from __future__ import annotations

from typing import Optional

from . import syntax as S

BUILTINS = {("is", 2), ("<", 2), (">", 2), ("=<", 2), ("<=", 2), (">=", 2), ("=:=", 2), ("=\\=", 2)}


class ArithError(Exception):
    pass


def is_builtin(pred) -> bool:
    return pred in BUILTINS


def eval_arith(t: S.Term) -> int:
    if isinstance(t, S.Var):
        raise ArithError(f"instantiation error: {t} is unbound")
    if isinstance(t.functor, int):
        return t.functor
    f, args = t.functor, t.args
    if f == "s" and len(args) == 1:
        return eval_arith(args[0]) + 1
    if len(args) == 2 and f in ("+", "-", "*", "//", "mod", "/"):
        a, b = eval_arith(args[0]), eval_arith(args[1])
        if f == "+":
            return a + b
        if f == "-":
            return a - b
        if f == "*":
            return a * b
        if b == 0:
            raise ArithError("division by zero")
        if f == "mod":
            return a % b
        return a // b
    if len(args) == 1 and f == "-":
        return -eval_arith(args[0])
    raise ArithError(f"type error: {S.format_term(t)} is not evaluable")


def compare(op: str, a: int, b: int) -> bool:
    return {"<": a < b, ">": a > b, "=<": a <= b, "<=": a <= b, ">=": a >= b,
            "=:=": a == b, "=\\=": a != b}[op]


def builtin_truth(atom: S.Struct) -> Optional[bool]:
    """Truth of a ground builtin atom; None when evaluation fails."""
    try:
        if atom.functor == "is":
            lhs = atom.args[0]
            val = eval_arith(atom.args[1])
            if isinstance(lhs, S.Struct) and isinstance(lhs.functor, int):
                return lhs.functor == val
            try:
                return eval_arith(lhs) == val and _is_number(lhs)
            except ArithError:
                return False
        return compare(atom.functor, eval_arith(atom.args[0]), eval_arith(atom.args[1]))
    except ArithError:
        return None


def _is_number(t: S.Term) -> bool:
    return isinstance(t, S.Struct) and isinstance(t.functor, int)
