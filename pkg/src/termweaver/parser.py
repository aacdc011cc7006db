"""Reader for the annotated program format.

Clauses follow Prolog conventions (``head :- b1, ..., bn.``, ``\\+`` for
negation, ``%`` comments).  A clause may carry a label, ``r1: head :- ...``.
Directives::

    :- mode p(+,-).
    :- type p(+:list(any), -:nat).
    :- typedef region = region(any, any, list(any)).
    :- module m1: p/2, q/3.
    :- levelmap m1: p(X,Y) = len(X) + 2*size(Y) + 1.
    :- model p(X,Y) when ground(X), len(X) > len(Y).
    :- terminates m1.
    :- signature red/0, blue/0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import syntax as S
from .linarith import Lin
from .measure import LevelExpr, NORMS
from .model import Constraint, ModelPattern
from .wellbehave import BUILTIN_TYPE_NAMES, Ctor, TList, TNamed, TypeExpr, builtin_type


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class ProgramError(Exception):
    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


class _Syntax(Exception):
    def __init__(self, tok: "Token", message: str):
        self.tok = tok
        self.message = message


@dataclass(frozen=True)
class Token:
    kind: str  # var, atom, int, str, punct, op, end, eof
    text: str
    line: int
    col: int


_OPS = sorted([":-", "\\+", "=:=", "=\\=", "\\=", "=<", "<=", ">=", "//", "->",
               "<", ">", "=", "+", "-", "*", "/", ":", "^"], key=len, reverse=True)
_SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")
_WORD_OPS = {"is", "mod", "when"}


def tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def adv(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch.isspace():
            adv(1)
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                adv(1)
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise ProgramError([Diagnostic(line, col, "unterminated block comment")])
            adv(end + 2 - i)
            continue
        l0, c0 = line, col
        if ch.isdigit():
            m = re.match(r"\d+", text[i:])
            toks.append(Token("int", m.group(), l0, c0))
            adv(len(m.group()))
            continue
        if ch.isalpha() or ch == "_":
            m = re.match(r"[A-Za-z_][A-Za-z0-9_]*", text[i:])
            word = m.group()
            kind = "var" if (word[0].isupper() or word[0] == "_") else "atom"
            toks.append(Token(kind, word, l0, c0))
            adv(len(word))
            continue
        if ch == "'":
            j = i + 1
            buf = []
            while j < n and text[j] != "'":
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise ProgramError([Diagnostic(l0, c0, "unterminated quoted atom")])
            toks.append(Token("str", "".join(buf), l0, c0))
            adv(j + 1 - i)
            continue
        if ch in "()[],|":
            toks.append(Token("punct", ch, l0, c0))
            adv(1)
            continue
        if ch == "." and (i + 1 >= n or text[i + 1].isspace() or text[i + 1] == "%"):
            toks.append(Token("end", ".", l0, c0))
            adv(1)
            continue
        if ch in _SYMBOL_CHARS:
            for op in _OPS:
                if text.startswith(op, i):
                    toks.append(Token("op", op, l0, c0))
                    adv(len(op))
                    break
            else:
                raise ProgramError([Diagnostic(l0, c0, f"unexpected character {ch!r}")])
            continue
        raise ProgramError([Diagnostic(l0, c0, f"unexpected character {ch!r}")])
    toks.append(Token("eof", "", line, col))
    return toks


_COMPARISONS = {"is", "<", ">", "=<", "<=", ">=", "=", "=:=", "\\=", "=\\="}


class _Parser:
    def __init__(self, toks: List[Token]):
        self.toks = toks
        self.pos = 0
        self.anon = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def at(self, text: str, kinds=("punct", "op", "atom", "end")) -> bool:
        return self.tok.text == text and self.tok.kind in kinds

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind in ("var", "str", "int"):
            got = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            raise _Syntax(self.tok, f"expected {text!r}, got {got}")
        return self.next()

    def skip_to_end(self) -> None:
        while self.tok.kind not in ("end", "eof"):
            self.pos += 1
        if self.tok.kind == "end":
            self.pos += 1

    # terms
    def expr(self) -> S.Term:
        left = self.arith()
        if self.tok.kind in ("op", "atom") and self.tok.text in _COMPARISONS:
            op = self.next().text
            right = self.arith()
            return S.Struct(op, (left, right))
        return left

    def arith(self) -> S.Term:
        left = self.mul()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.next().text
            left = S.Struct(op, (left, self.mul()))
        return left

    def mul(self) -> S.Term:
        left = self.unary()
        while (self.tok.kind == "op" and self.tok.text in ("*", "/", "//")) or (
            self.tok.kind == "atom" and self.tok.text == "mod"
        ):
            op = self.next().text
            left = S.Struct(op, (left, self.unary()))
        return left

    def unary(self) -> S.Term:
        if self.tok.kind == "op" and self.tok.text == "-" and self.peek().kind == "int":
            self.next()
            return S.Struct(-int(self.next().text))
        return self.primary()

    def primary(self) -> S.Term:
        t = self.tok
        if t.kind == "var":
            self.next()
            if t.text == "_":
                self.anon += 1
                return S.Var(f"_#{self.anon}")
            return S.Var(t.text)
        if t.kind == "int":
            self.next()
            return S.Struct(int(t.text))
        if t.kind == "punct" and t.text == "(":
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "punct" and t.text == "[":
            return self.list_term()
        if t.kind in ("atom", "str") or (
            t.kind == "op" and (self.peek().text in (",", ")", ":", "(") or self.peek().kind == "end")
        ):
            self.next()
            name = t.text
            if self.tok.kind == "punct" and self.tok.text == "(" and self.tok.col == t.col + len(
                t.text if t.kind != "str" else "'" + t.text + "'"
            ):
                self.next()
                args = [self.expr()]
                while self.at(",", ("punct",)):
                    self.next()
                    args.append(self.expr())
                self.expect(")")
                return S.Struct(name, tuple(args))
            if self.tok.kind == "punct" and self.tok.text == "(":
                raise _Syntax(self.tok, "no space allowed between functor and '('")
            return S.Struct(name)
        got = "end of input" if t.kind == "eof" else repr(t.text)
        raise _Syntax(t, f"unexpected {got}")

    def list_term(self) -> S.Term:
        self.expect("[")
        if self.at("]", ("punct",)):
            self.next()
            return S.NIL
        items = [self.expr()]
        while self.at(",", ("punct",)):
            self.next()
            items.append(self.expr())
        tail: S.Term = S.NIL
        if self.at("|", ("punct",)):
            self.next()
            tail = self.expr()
        self.expect("]")
        return S.make_list(items, tail)

    def callable(self, what: str) -> S.Struct:
        tok = self.tok
        t = self.expr()
        if not isinstance(t, S.Struct) or isinstance(t.functor, int):
            raise _Syntax(tok, f"{what} must be an atom or compound term")
        return t

    def literal(self) -> S.Literal:
        if self.tok.kind == "op" and self.tok.text == "\\+":
            self.next()
            return S.Literal(False, self.callable("negated literal"))
        return S.Literal(True, self.callable("literal"))

    def body(self) -> Tuple[S.Literal, ...]:
        lits = [self.literal()]
        while self.at(",", ("punct",)):
            self.next()
            lits.append(self.literal())
        return tuple(lits)


# -- directives ---------------------------------------------------------------


@dataclass
class _Pending:
    clauses: List[S.Clause]
    modes: Dict
    types: Dict
    typedefs: Dict
    modules: List
    levelmaps: Dict
    model: List
    terminating: List
    extra_signature: List
    positions: Dict


def _pred_name(p: _Parser) -> str:
    t = p.next()
    if t.kind not in ("atom", "str", "op"):
        raise _Syntax(t, "expected a predicate name")
    return t.text


def _mode_tag(p: _Parser) -> str:
    t = p.next()
    if t.text not in ("+", "-"):
        raise _Syntax(t, "mode tag must be '+' or '-'")
    return t.text


def _type_expr(term: S.Term, tok: Token) -> TypeExpr:
    if isinstance(term, S.Struct) and isinstance(term.functor, str):
        if term.functor == "list" and len(term.args) == 1:
            return TList(_type_expr(term.args[0], tok))
        if not term.args:
            bt = builtin_type(term.functor)
            return bt if bt is not None else TNamed(term.functor)
    raise _Syntax(tok, f"not a type expression: {S.format_term(term)}")


def _directive(p: _Parser, acc: _Pending, start: Token) -> None:
    kw = p.next()
    if kw.kind != "atom":
        raise _Syntax(kw, "expected a directive keyword")
    name = kw.text
    if name == "mode":
        pred = _pred_name(p)
        tags: List[str] = []
        if p.at("(", ("punct",)):
            p.next()
            tags.append(_mode_tag(p))
            while p.at(",", ("punct",)):
                p.next()
                tags.append(_mode_tag(p))
            p.expect(")")
        key = (pred, len(tags))
        if key in acc.modes:
            raise _Syntax(start, f"duplicate mode declaration for {S.format_pred(key)}")
        acc.modes[key] = tuple(tags)
    elif name == "type":
        pred = _pred_name(p)
        entries = []
        if p.at("(", ("punct",)):
            p.next()
            while True:
                tag = _mode_tag(p)
                p.expect(":")
                tt = p.tok
                entries.append((tag, _type_expr(p.primary(), tt)))
                if not p.at(",", ("punct",)):
                    break
                p.next()
            p.expect(")")
        key = (pred, len(entries))
        if key in acc.types:
            raise _Syntax(start, f"duplicate type declaration for {S.format_pred(key)}")
        acc.types[key] = tuple(entries)
    elif name == "typedef":
        tname = p.next()
        if tname.kind != "atom":
            raise _Syntax(tname, "expected a type name")
        p.expect("=")
        alts_raw = [(p.tok, p.primary())]
        while p.at("|", ("punct",)):
            p.next()
            alts_raw.append((p.tok, p.primary()))
        if tname.text in acc.typedefs or builtin_type(tname.text) is not None:
            raise _Syntax(tname, f"duplicate typedef {tname.text}")
        acc.typedefs[tname.text] = alts_raw
    elif name == "module":
        mname = p.next()
        if mname.kind != "atom":
            raise _Syntax(mname, "expected a module name")
        p.expect(":")
        preds = []
        while True:
            pn = _pred_name(p)
            p.expect("/")
            ar = p.next()
            if ar.kind != "int":
                raise _Syntax(ar, "expected an arity")
            preds.append(((pn, int(ar.text)), ar))
            if not p.at(",", ("punct",)):
                break
            p.next()
        if any(m == mname.text for m, _ in acc.modules):
            raise _Syntax(mname, f"duplicate module {mname.text}")
        acc.modules.append((mname.text, preds))
    elif name == "levelmap":
        mname = p.next()
        p.expect(":")
        htok = p.tok
        head = p.primary()
        if not isinstance(head, S.Struct) or isinstance(head.functor, int):
            raise _Syntax(htok, "level map head must be an atom or compound term")
        p.expect("=")
        etok = p.tok
        expr = p.arith()
        acc.levelmaps.setdefault((mname.text, mname), []).append(
            (htok, _level_expr(head, expr, htok, etok))
        )
    elif name == "model":
        ptok = p.tok
        pattern = p.callable("model pattern")
        constraints: List[Constraint] = []
        if p.tok.kind == "atom" and p.tok.text == "when":
            p.next()
            while True:
                ctok = p.tok
                constraints.append(_constraint(p.expr(), pattern, ctok))
                if not p.at(",", ("punct",)):
                    break
                p.next()
        acc.model.append(ModelPattern(pattern, tuple(constraints)))
    elif name == "terminates":
        mname = p.next()
        acc.terminating.append((mname.text, mname))
    elif name == "signature":
        while True:
            pn = _pred_name(p)
            p.expect("/")
            ar = p.next()
            if ar.kind != "int":
                raise _Syntax(ar, "expected an arity")
            f = int(pn) if pn.isdigit() else pn
            acc.extra_signature.append((f, int(ar.text)))
            if not p.at(",", ("punct",)):
                break
            p.next()
    else:
        raise _Syntax(kw, f"unknown directive {name!r}")
    if p.tok.kind != "end":
        raise _Syntax(p.tok, "expected '.' at end of directive")
    p.next()


def _norm_lin(term: S.Term, head_vars: Dict[S.Var, int], tok: Token, by_position: bool) -> Lin:
    """Linear combination of norm applications and integer constants."""
    if isinstance(term, S.Struct) and isinstance(term.functor, int):
        return Lin({}, term.functor)
    if isinstance(term, S.Struct) and term.functor in NORMS and len(term.args) == 1:
        v = term.args[0]
        if not isinstance(v, S.Var) or v not in head_vars:
            raise _Syntax(tok, f"{term.functor}/1 must be applied to a head variable")
        key = (term.functor, head_vars[v]) if by_position else (term.functor, v)
        return Lin.var(key)
    if isinstance(term, S.Struct) and term.functor in ("+", "-") and len(term.args) == 2:
        a = _norm_lin(term.args[0], head_vars, tok, by_position)
        b = _norm_lin(term.args[1], head_vars, tok, by_position)
        return a + b if term.functor == "+" else a - b
    if isinstance(term, S.Struct) and term.functor == "*" and len(term.args) == 2:
        a = _norm_lin(term.args[0], head_vars, tok, by_position)
        b = _norm_lin(term.args[1], head_vars, tok, by_position)
        if a.is_const():
            return b * a.const
        if b.is_const():
            return a * b.const
        raise _Syntax(tok, "non-linear level expression")
    raise _Syntax(tok, f"unsupported expression {S.format_term(term)}")


def _level_expr(head: S.Struct, expr: S.Term, htok: Token, etok: Token) -> Tuple[S.PredKey, LevelExpr]:
    positions: Dict[S.Var, int] = {}
    for i, a in enumerate(head.args):
        if not isinstance(a, S.Var) or a in positions:
            raise _Syntax(htok, "level map head arguments must be distinct variables")
        positions[a] = i
    lin = _norm_lin(expr, positions, etok, by_position=True)
    if lin.const < 0 or any(v < 0 for v in lin.coeffs.values()):
        raise _Syntax(etok, "level map coefficients must be non-negative")
    if lin.const.denominator != 1 or any(v.denominator != 1 for v in lin.coeffs.values()):
        raise _Syntax(etok, "level map coefficients must be integers")
    terms = tuple(sorted(((int(v), k[0], k[1]) for k, v in lin.coeffs.items()), key=lambda x: (x[2], x[1])))
    return head.key, LevelExpr(int(lin.const), terms)


def _constraint(term: S.Term, pattern: S.Struct, tok: Token) -> Constraint:
    pvars = {v: i for i, v in enumerate(S.term_vars(pattern))}
    if isinstance(term, S.Struct) and term.functor == "ground" and len(term.args) == 1:
        v = term.args[0]
        if not isinstance(v, S.Var) or v not in pvars:
            raise _Syntax(tok, "ground/1 must be applied to a pattern variable")
        return Constraint("ground", v)
    if isinstance(term, S.Struct) and len(term.args) == 2 and term.functor in (">", "<", ">=", "=<", "<=", "="):
        lhs = _norm_lin(term.args[0], pvars, tok, by_position=False)
        rhs = _norm_lin(term.args[1], pvars, tok, by_position=False)
        return Constraint(term.functor, None, lhs, rhs)
    raise _Syntax(tok, f"unsupported model constraint {S.format_term(term)}")


# -- entry points -------------------------------------------------------------


def parse_program(text: str) -> S.Program:
    toks = tokenize(text)
    p = _Parser(toks)
    diags: List[Diagnostic] = []
    acc = _Pending([], {}, {}, {}, [], {}, [], [], [], {})
    labels = set()
    while p.tok.kind != "eof":
        start = p.tok
        p.anon = 0
        try:
            if start.kind == "op" and start.text == ":-":
                p.next()
                _directive(p, acc, start)
                continue
            label = None
            if start.kind == "atom" and p.peek().kind == "op" and p.peek().text == ":":
                label = start.text
                p.next()
                p.next()
            htok = p.tok
            if htok.kind == "op" and htok.text == "\\+":
                raise _Syntax(htok, "negative literal in clause head")
            head = p.callable("clause head")
            body: Tuple[S.Literal, ...] = ()
            if p.at(":-", ("op",)):
                p.next()
                body = p.body()
            if p.tok.kind != "end":
                raise _Syntax(p.tok, "expected '.' at end of clause")
            p.next()
            cid = label or f"c{len(acc.clauses) + 1}"
            if cid in labels:
                raise _Syntax(start, f"duplicate clause label {cid}")
            labels.add(cid)
            acc.clauses.append(S.Clause(head, body, cid))
            acc.positions[cid] = (start.line, start.col)
        except _Syntax as e:
            diags.append(Diagnostic(e.tok.line, e.tok.col, e.message))
            if p.tok.kind != "eof":
                p.skip_to_end()
    program = _resolve(acc, diags)
    if diags:
        raise ProgramError(diags)
    return program


def _resolve(acc: _Pending, diags: List[Diagnostic]) -> Optional[S.Program]:
    defined = []
    for c in acc.clauses:
        if c.pred not in defined:
            defined.append(c.pred)

    typedefs: Dict[str, Tuple[TypeExpr, ...]] = {}
    for tname, alts in acc.typedefs.items():
        out = []
        for tok, term in alts:
            try:
                out.append(_typedef_alt(term, tok, acc.typedefs))
            except _Syntax as e:
                diags.append(Diagnostic(e.tok.line, e.tok.col, e.message))
        typedefs[tname] = tuple(out)

    def check_named(ty: TypeExpr, where: str):
        for n in ty.names():
            if n not in typedefs:
                diags.append(Diagnostic(0, 0, f"unknown type {n!r} in {where}"))

    for tname, alts in typedefs.items():
        for a in alts:
            check_named(a, f"typedef {tname}")
    for key, entries in acc.types.items():
        for _, ty in entries:
            check_named(ty, f"type of {S.format_pred(key)}")
        if key in acc.modes and acc.modes[key] != tuple(m for m, _ in entries):
            diags.append(Diagnostic(0, 0, f"mode and type declarations disagree for {S.format_pred(key)}"))

    modules = []
    owner: Dict[S.PredKey, str] = {}
    for mname, preds in acc.modules:
        keys = []
        for key, tok in preds:
            if key not in defined:
                diags.append(Diagnostic(tok.line, tok.col,
                                        f"module {mname} lists undefined predicate {S.format_pred(key)}"))
            elif key in owner:
                diags.append(Diagnostic(tok.line, tok.col,
                                        f"{S.format_pred(key)} assigned to both {owner[key]} and {mname}"))
            else:
                owner[key] = mname
                keys.append(key)
        modules.append((mname, tuple(keys)))

    levelmaps: Dict[str, Dict[S.PredKey, LevelExpr]] = {m: {} for m, _ in modules}
    for (mname, mtok), entries in acc.levelmaps.items():
        if mname not in levelmaps:
            diags.append(Diagnostic(mtok.line, mtok.col, f"level map references undeclared module {mname}"))
            continue
        for htok, (key, le) in entries:
            if owner.get(key) != mname:
                diags.append(Diagnostic(htok.line, htok.col,
                                        f"level map for {S.format_pred(key)} but it is not defined in module {mname}"))
            elif key in levelmaps[mname]:
                diags.append(Diagnostic(htok.line, htok.col, f"duplicate level map for {S.format_pred(key)}"))
            else:
                levelmaps[mname][key] = le
    terminating = []
    for mname, mtok in acc.terminating:
        if mname not in levelmaps:
            diags.append(Diagnostic(mtok.line, mtok.col, f"terminates references undeclared module {mname}"))
        else:
            terminating.append(mname)
    if diags:
        return None
    return S.Program(
        clauses=tuple(acc.clauses),
        modes=dict(acc.modes),
        types=dict(acc.types),
        typedefs=typedefs,
        modules=tuple(modules),
        levelmaps=levelmaps,
        model=tuple(acc.model),
        terminating=tuple(terminating),
        extra_signature=tuple(acc.extra_signature),
    )


def _typedef_alt(term: S.Term, tok: Token, names) -> TypeExpr:
    if isinstance(term, S.Struct) and isinstance(term.functor, str):
        if term.functor == "list" and len(term.args) == 1:
            return TList(_type_expr(term.args[0], tok))
        if not term.args:
            if term.functor in BUILTIN_TYPE_NAMES:
                return builtin_type(term.functor)
            if term.functor in names:
                return TNamed(term.functor)
            return Ctor(term.functor, ())
        return Ctor(term.functor, tuple(_type_expr(a, tok) for a in term.args))
    if isinstance(term, S.Struct):
        return Ctor(term.functor, ())
    raise _Syntax(tok, f"not a typedef alternative: {S.format_term(term)}")


def parse_query(text: str) -> S.Query:
    toks = tokenize(text)
    p = _Parser(toks)
    try:
        if p.tok.kind == "end" or (p.tok.kind == "eof"):
            lits: Tuple[S.Literal, ...] = ()
        else:
            lits = p.body()
        if p.tok.kind == "end":
            p.next()
        if p.tok.kind != "eof":
            raise _Syntax(p.tok, f"unexpected {p.tok.text!r} after query")
    except _Syntax as e:
        raise ProgramError([Diagnostic(e.tok.line, e.tok.col, e.message)])
    return S.Query(lits)


def parse_term(text: str) -> S.Term:
    p = _Parser(tokenize(text))
    try:
        t = p.expr()
        if p.tok.kind == "end":
            p.next()
        if p.tok.kind != "eof":
            raise _Syntax(p.tok, f"unexpected {p.tok.text!r}")
    except _Syntax as e:
        raise ProgramError([Diagnostic(e.tok.line, e.tok.col, e.message)])
    return t


def parse_literal(text: str) -> S.Literal:
    q = parse_query(text)
    if len(q) != 1:
        raise ProgramError([Diagnostic(1, 1, "expected exactly one literal")])
    return q[0]


def format_program(p: S.Program) -> str:
    """Pretty-print directives and labelled clauses; the result parses back
    to an equal program."""
    out: List[str] = []

    def head(k, args):
        return f"{S.format_term(S.Struct(k[0]))}({', '.join(args)})"

    for k, ms in p.modes.items():
        if k not in p.types:
            out.append(f":- mode {head(k, ms)}.")
    for k, ts in p.types.items():
        out.append(f":- type {head(k, [f'{m}:{t}' for m, t in ts])}.")
    for name, alts in p.typedefs.items():
        out.append(f":- typedef {name} = {' | '.join(str(a) for a in alts)}.")
    for c in p.clauses:
        out.append(f"{c.id}: {S.format_clause(c)}")
    for name, preds in p.modules:
        out.append(f":- module {name}: {', '.join(S.format_pred(k) for k in preds)}.")
    for name, exprs in p.levelmaps.items():
        for k, e in exprs.items():
            names = [f"X{i + 1}" for i in range(k[1])]
            out.append(f":- levelmap {name}: {head(k, names) if names else S.format_term(S.Struct(k[0]))}"
                       f" = {e.format(names)}.")
    for pat in p.model:
        out.append(f":- model {pat.format()}.")
    for name in p.terminating:
        out.append(f":- terminates {name}.")
    if p.extra_signature:
        out.append(f":- signature {', '.join(S.format_pred(k) for k in p.extra_signature)}.")
    return "\n".join(out) + ("\n" if out else "")
