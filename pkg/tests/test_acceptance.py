"""Acceptance criteria 1-10, one reported line each."""
import itertools
import random
import subprocess
import sys
import time

import pytest

from termweaver import syntax as S
from termweaver.depgraph import finest_decomposition, validate_hierarchy
from termweaver.ldnf import ALL_FINITE, BUDGET_EXCEEDED, call_set, explore
from termweaver.measure import LevelExpr, LevelMapping, is_bounded
from termweaver.model import ConservativeOracle, DeclaredOracle
from termweaver.parser import parse_program, parse_term
from termweaver.prover import (CHECKED, PROVED, REFUTED, Limits, analyze, check_acceptable_enum,
                               check_acceptable_symbolic, hierarchy_for)
from termweaver.wellbehave import (TList, TNat, check_well_moded, check_well_typed, effective_modes,
                                   effective_types, term_has_type, type_judgement_holds)
from corpus_util import CORPUS, load, q

CONS = ConservativeOracle()


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}{' - ' + detail if detail else ''}")
        assert ok, detail
    return emit


# -- 1 ------------------------------------------------------------------------

def test_criterion_1_well_moded(report):
    move, diff = load("move.pl"), load("diff.pl")
    r = check_well_moded(q("move([X1,X2],Ys), delete(Ys,Y,Zs)."), move)
    ok = (check_well_moded(move, move).verdict is True and check_well_moded(diff, diff).verdict is True
          and r.verdict is False and r.where == {"literal": 1, "missing": ["X1", "X2"]})
    report(1, ok, f"query witness: {r.witness}")


# -- 2 ------------------------------------------------------------------------

def test_criterion_2_well_typed(report):
    ok = all(check_well_typed(load(n), load(n)).verdict is True for n in ("color_map.pl", "move.pl"))
    triv = parse_program(":- type p(-:list(any)).\n:- type q(+:list(any)).\np([]).\nq([]).\n")
    neg = check_well_typed(q("\\+ p(a), q(a)."), triv)
    ok = ok and neg.verdict is False
    x, l = S.Var("X"), S.Var("L")
    nat, lnat = TNat(), TList(TNat())
    j1 = type_judgement_holds([(x, nat), (l, lnat)], [(parse_term("[X|L]"), lnat)])
    j2 = type_judgement_holds([(parse_term("[X|L]"), lnat)], [(l, lnat)])
    ok = ok and j1 is True and j2 is True
    report(2, ok, f"negated query witness: {neg.witness}; judgements {j1}, {j2}")


# -- 3 ------------------------------------------------------------------------

def test_criterion_3_decomposition(report):
    ms, cm = load("mergesort.pl"), load("color_map.pl")
    f = [list(m.preds) for m in finest_decomposition(ms).modules]
    g = [set(m.preds) for m in finest_decomposition(cm).modules]
    ok = len(f) == 3 and f[-1] == [("mergesort", 2)]
    ok = ok and g == [{("member", 2)}, {("select", 3), ("subset", 2)}, {("color_region", 2)}, {("color_map", 2)}]
    for order in ([("merge", 3)], [("split", 3)]), ([("split", 3)], [("merge", 3)]):
        validate_hierarchy(ms, [("a", order[0]), ("b", order[1]), ("c", [("mergesort", 2)])])
    report(3, ok, f"mergesort {len(f)} modules, color_map {len(g)} modules, both merge/split orders valid")


# -- 4 ------------------------------------------------------------------------

ACCEPTABLE = {"list01.pl": ["r1", "r2"], "move.pl": ["r1", "r2"], "diff.pl": ["r1", "r2", "r3"],
              "color_map.pl": ["r1", "r2", "r3", "r4"]}


def _module(p, name):
    h, lms = hierarchy_for(p)
    for m, lm in zip(h.modules, lms):
        if m.name == name:
            return m, lm
    raise KeyError(name)


def _enum(p, name, oracle, depth=3):
    m, lm = _module(p, name)
    return check_acceptable_enum(m.clauses, lm, oracle, depth, module_preds=m.preds, program=p)


def _sym(p, name, oracle):
    m, lm = _module(p, name)
    return check_acceptable_symbolic(m.clauses, lm, oracle, m.preds, program=p)


def test_criterion_4_acceptability(report):
    bad, proved = [], []
    for f, names in ACCEPTABLE.items():
        p = load(f)
        for n in names:
            if _enum(p, n, CONS).outcome != CHECKED:
                bad.append(f"{f}:{n} enum")
            s = _sym(p, n, CONS).outcome
            if s == REFUTED:
                bad.append(f"{f}:{n} symbolic refuted")
            if s == PROVED:
                proved.append(f"{f}:{n}")
    lc = load("lcount_split.pl")
    r = _enum(lc, "r", CONS)
    if r.outcome != REFUTED or not r.witness.startswith("r4:"):
        bad.append(f"lcount {r.outcome} {r.witness}")
    ms = load("mergesort.pl")
    m = DeclaredOracle(ms.model)
    if _enum(ms, "r3", m).outcome != CHECKED or _sym(ms, "r3", m).outcome != PROVED:
        bad.append("mergesort r3 under M")
    if _enum(ms, "r3", CONS).outcome == CHECKED or _sym(ms, "r3", CONS).outcome == PROVED:
        bad.append("mergesort r3 under the conservative oracle")
    report(4, not bad, "; ".join(bad) if bad else f"symbolically proved: {len(proved)} modules; lcount {r.witness}")


# -- 5 ------------------------------------------------------------------------

def _list01_queries():
    out = []
    for n in range(4):
        items = [f"X{i}" if i % 2 else str(i % 2) for i in range(n)]
        out.append(f"list01([{','.join(items)}],N0,N1).")
        out.append(f"plist01([{','.join(f'Y{i}' for i in range(n))}]).")
    for k in range(4):
        out.append(f"length(Ls,{'s(' * k}0{')' * k}).")
    return out


def _mergesort_queries():
    out = []
    for n in range(5):
        for perm in itertools.islice(itertools.permutations(range(n)), 6):
            out.append(f"mergesort([{','.join(map(str, perm))}],Ys).")
    return out


def _color_queries():
    out = []
    for colors in ("[red,blue]", "[blue,red]"):
        out.append(f"color_map([region(a,C1,[C2]),region(b,C2,[C1])],{colors}).")
        out.append(f"color_map([region(a,C1,[]),region(b,C2,[C1])],{colors}).")
        out.append(f"color_map([region(a,red,[C2]),region(b,C2,[red])],{colors}).")
    return out


CASES = [("list01.pl", _list01_queries()),
         ("mergesort.pl", _mergesort_queries()),
         ("color_map.pl", _color_queries()),
         ("move.pl", ["move([a,b],Ys).", "move([X1,X2],Ys), delete(Ys,Y,Zs).", "delete([a,b,c],X,Zs).", "move([],Ys)."]),
         ("diff.pl", ["diff([a],[a],[],N).", "diff([a,b],[b],[],N).", "diff([a,b,c],[c],[a],N).", "count([a,0],[0],N)."]),
         ("lcount_split.pl", ["split([[0,a]],L1,L2).", "split([[0,s(0),s(s(0))],[a]],L1,L2).",
                              "lcount([0,a,s(0)],N).", "split([],L1,L2)."])]


def test_criterion_5_termination_verdicts(report):
    start = time.time()
    bad, n = [], 0
    for f, queries in CASES:
        p = load(f)
        for text in queries:
            qq = q(text)
            n += 1
            po = analyze(p, qq)
            if po.conclusion != "terminates":
                bad.append(f"{f} {text} analyze {po.conclusion}")
            v = explore(p, qq, max_nodes=100000, keep_tree=False)
            if v.status != ALL_FINITE:
                bad.append(f"{f} {text} explore {v.status}")
    elapsed = time.time() - start
    if elapsed > 60:
        bad.append(f"took {elapsed:.1f}s")
    report(5, not bad, "; ".join(bad) if bad else f"{n} queries in {elapsed:.1f}s")


# -- 6 ------------------------------------------------------------------------

def test_criterion_6_negative_control(report):
    p = load("qrp.pl")
    bad = []
    po = analyze(p, q("p(s(0))."), limits=Limits(max_nodes=20000))
    if po.conclusion == "terminates":
        bad.append("p(s(0)) concluded terminates")
    if explore(p, q("p(s(0))."), max_nodes=20000, keep_tree=False).status != BUDGET_EXCEEDED:
        bad.append("p(s(0)) explored finitely")
    if analyze(p, q("p(0).")).conclusion != "terminates":
        bad.append("p(0) not terminating")
    calls, complete = call_set(p, q("p(0)."))
    got = sorted(S.variant_key(l) for l in calls)
    want = sorted(S.variant_key(x) for x in q("p(0), r(0,Y), q(0).").literals)
    if not complete or got != want:
        bad.append(f"call set {[S.format_literal(l) for l in calls]}")
    report(6, not bad, "; ".join(bad) if bad else f"p(s(0)) {po.conclusion}; call set of p(0) exact")


# -- 7 ------------------------------------------------------------------------

def _gen_queries(p, prop, rng, count):
    modes = effective_modes(p)
    types = effective_types(p)
    sig = S.program_signature(p)
    universe = S.ground_terms(sig, 3)
    preds = [k for k in p.defined() if k in (modes if prop == "wm" else p.types)]
    out, seen, tries = [], set(), 0
    while len(out) < count and tries < 200 * count:
        tries += 1
        lits, produced, fresh = [], [], itertools.count()
        for _ in range(rng.randint(1, 3)):
            k = rng.choice(preds)
            args = []
            for i in range(k[1]):
                mode = modes[k][i]
                ty = types[k][i][1] if k in types else None
                if mode == "-":
                    v = S.Var(f"V{next(fresh)}")
                    produced.append(v)
                    args.append(v)
                elif produced and rng.random() < 0.3:
                    args.append(rng.choice(produced))
                else:
                    pool = [t for t in universe if ty is None or term_has_type(t, ty, p.typedefs) is True]
                    if not pool:
                        break
                    args.append(rng.choice(pool))
            if len(args) != k[1]:
                break
            lits.append(S.Literal(rng.random() > 0.15 or not k[1], S.Struct(k[0], tuple(args))))
        query = S.Query(tuple(lits))
        checker = check_well_moded if prop == "wm" else check_well_typed
        if not lits or checker(query, p).verdict is not True:
            continue
        key = S.variant_key(query)
        if key not in seen:
            seen.add(key)
            out.append(query)
    return out


def test_criterion_7_persistence(report):
    rng = random.Random(7)
    bad, stats, skipped = [], [], []
    for f in CORPUS:
        p = load(f)
        props = []
        if p.modes or p.types:
            props.append("wm")
        if p.types:
            props.append("wt")
        if not props:
            skipped.append(f)
        for prop in props:
            checker = check_well_moded if prop == "wm" else check_well_typed
            queries = _gen_queries(p, prop, rng, 100)
            if len(queries) < 100:
                bad.append(f"{f} {prop}: only {len(queries)} queries")
            checked = 0
            for query in queries:
                seen = set()
                for node in explore(p, query, max_nodes=300, max_depth=60).tree:
                    key = S.variant_key(node.query)
                    if key in seen:
                        continue
                    seen.add(key)
                    checked += 1
                    if checker(node.query, p).verdict is not True:
                        bad.append(f"{f} {prop}: {S.format_query(query)} -> {S.format_query(node.query)}")
            stats.append(f"{f}/{prop}:{len(queries)}q/{checked}d")
    detail = "; ".join(bad[:5]) if bad else ", ".join(stats)
    if skipped:
        detail += f"; no mode or type declarations: {', '.join(skipped)}"
    report(7, not bad, detail)


# -- 8 ------------------------------------------------------------------------

def _norm(norm, t, env=None, table=None):
    """Norm of ``t``; a variable is bound by ``env`` to an index into ``table``."""
    if isinstance(t, S.Var):
        return table[norm][env[t]]
    if norm == "len":
        n = 0
        while isinstance(t, S.Struct) and t.functor == "." and len(t.args) == 2:
            n, t = n + 1, t.args[1]
        return n + (table["len"][env[t]] if isinstance(t, S.Var) else 0)
    return 1 + sum(_norm(norm, a, env, table) for a in t.args)


def _level(lm, atom, env=None, table=None):
    e = lm.expr(atom.key)
    return e.const + sum(c * _norm(n, atom.args[i], env, table) for c, n, i in e.terms)


def _corpus_atoms(p):
    atoms = []
    for c in p.clauses:
        atoms.append(c.head)
        atoms.extend(l.atom for l in c.body)
    for f, queries in CASES:
        if load(f).clauses == p.clauses:
            for text in queries:
                atoms.extend(l.atom for l in q(text).literals)
                calls, _ = call_set(p, q(text), max_nodes=5000)
                atoms.extend(l.atom for l in calls)
    return atoms


def test_criterion_8_boundedness_oracle(report):
    bad, checked, skipped = [], 0, 0
    tables = {}
    for f in CORPUS:
        p = load(f)
        h, lms = hierarchy_for(p)
        seen = set()
        atoms = _corpus_atoms(p)
        sig = S.program_signature(p)
        for atom in atoms:
            m = h.module_of(atom.key)
            if m is None:
                continue
            key = S.variant_key(atom)
            if key in seen:
                continue
            seen.add(key)
            lm = lms[h.modules.index(m)]
            b = is_bounded(atom, lm, sig)
            if b.status != "bounded":
                continue
            # arguments outside the weighted positions cannot change the level
            weighted = S.Struct("$", tuple(atom.args[i] for i in lm.expr(atom.key).positions()))
            vs = S.term_vars(weighted)
            rest = {v: sig.constants()[0] for v in S.term_vars(atom) if v not in vs}
            universe = S.ground_terms(sig, 3)
            if len(universe) ** len(vs) > 100000:
                skipped += 1
                continue
            if sig not in tables:
                terms = universe + (sig.constants()[0],)
                tables[sig] = {n: [_norm(n, t) for t in terms] for n in ("len", "size")}
            table = tables[sig]
            fixed = {v: len(universe) for v in rest}
            levels = {_level(lm, atom, {**fixed, **dict(zip(vs, idx))}, table)
                      for idx in itertools.product(range(len(universe)), repeat=len(vs))}
            checked += 1
            if max(levels) != b.max:
                bad.append(f"{f} {S.format_term(atom)}: declared {b.max}, brute force {max(levels)}")
    ok = not bad and checked > 0
    report(8, ok, "; ".join(bad) if bad else f"{checked} bounded atoms agree, {skipped} too large to enumerate")


# -- 9 ------------------------------------------------------------------------

def _random_mapping(rng, preds):
    exprs = {}
    for k in preds:
        if k[1] == 0 or rng.random() < 0.1:
            exprs[k] = LevelExpr(rng.randint(0, 2))
        else:
            exprs[k] = LevelExpr(rng.randint(0, 2), ((rng.randint(1, 2), rng.choice(("len", "size")),
                                                      rng.randrange(k[1])),))
    return exprs


def test_criterion_9_oracle_equivalence(report):
    rng = random.Random(9)
    bad, proved, total = [], 0, 0
    programs = [(f, load(f)) for f in CORPUS]
    for trial in range(50):
        for f, p in programs:
            h, _ = hierarchy_for(p)
            oracles = [CONS] + ([DeclaredOracle(p.model)] if p.model else [])
            for m in h.modules:
                lm = LevelMapping(m.name, _random_mapping(rng, m.preds))
                for oracle in oracles:
                    total += 1
                    s = check_acceptable_symbolic(m.clauses, lm, oracle, m.preds, program=p)
                    if s.outcome != PROVED:
                        continue
                    proved += 1
                    for d in (1, 2, 3):
                        e = check_acceptable_enum(m.clauses, lm, oracle, d, module_preds=m.preds, program=p)
                        if e.outcome != CHECKED:
                            bad.append(f"{f}:{m.name} depth {d} {e.outcome} {e.witness} under {lm.describe()}")
    report(9, not bad, "; ".join(bad[:3]) if bad else f"{proved} of {total} symbolic proofs confirmed at depths 1-3")


# -- 10 -----------------------------------------------------------------------

COMMANDS = [
    ("analyze", "corpus/mergesort.pl", "--query", "mergesort([2,1],Ys)."),
    ("analyze", "corpus/lcount_split.pl", "--query", "split([[0,a]],L1,L2)."),
    ("analyze", "corpus/qrp.pl", "--query", "p(s(0)).", "--max-nodes", "5000"),
    ("run", "corpus/diff.pl", "diff([a,b],[b],[],N)."),
    ("run", "corpus/qrp.pl", "p(s(0)).", "--max-nodes", "5000"),
    ("callset", "corpus/list01.pl", "plist01([X,Y])."),
    ("decompose", "corpus/color_map.pl"),
    ("check-modes", "corpus/diff.pl", "--query", "diff([a],[a],[],N)."),
    ("check-types", "corpus/move.pl", "--query", "move([X1,X2],Ys), delete(Ys,Y,Zs)."),
    ("check-model", "corpus/mergesort.pl"),
    ("levels", "corpus/list01.pl", "--query", "list01([X1,X2],N0,N1), length(Ls,N)."),
]


def test_criterion_10_determinism(report):
    bad = []
    for cmd in COMMANDS:
        argv = [sys.executable, "-m", "termweaver", *cmd, "--format", "structured"]
        outs = [subprocess.run(argv, capture_output=True, env={"PYTHONHASHSEED": seed, "PATH": ""}).stdout
                for seed in ("0", "12345")]
        if outs[0] != outs[1] or not outs[0]:
            bad.append(" ".join(cmd[:2]))
    report(10, not bad, "differs: " + ", ".join(bad) if bad else f"{len(COMMANDS)} subcommand runs byte-identical")
