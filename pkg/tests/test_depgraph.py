import itertools

import pytest

from termweaver import syntax as S
from termweaver.depgraph import (HierarchyError, build_depgraph, check_extension, depends_on,
                                 finest_decomposition, mutually_recursive, neg_sets, sccs,
                                 strictly_above, validate_hierarchy)
from termweaver.parser import parse_program
from corpus_util import CORPUS, load

MS, MERGE, SPLIT = ("mergesort", 2), ("merge", 3), ("split", 3)


def test_mergesort_edges():
    g = build_depgraph(load("mergesort.pl"))
    for e in [(MS, SPLIT), (MS, MERGE), (MS, MS)]:
        assert e in g.edges


def test_facts_have_no_edges():
    assert build_depgraph(parse_program("p(a).\nq(b).\n")).edges == {}


def test_negative_edge_tag():
    g = build_depgraph(load("list01.pl"))
    assert g.edges[(("plist01", 1), ("length", 2))] == {"negative"}


def test_relations():
    g = build_depgraph(load("mergesort.pl"))
    assert strictly_above(g, MS, MERGE)
    assert depends_on(g, MERGE, MERGE)
    assert not mutually_recursive(g, MS, MERGE)
    gm = build_depgraph(load("move.pl"))
    assert not mutually_recursive(gm, ("append1", 3), ("append2", 3))


def test_unknown_predicate():
    g = build_depgraph(load("mergesort.pl"))
    with pytest.raises(KeyError):
        depends_on(g, ("nope", 0), MS)


def ids(cs):
    return sorted(c.id for c in cs)


def test_neg_sets():
    neg, star, pm = neg_sets(load("list01.pl"))
    assert neg == {("length", 2)} and star == {("length", 2)} and ids(pm) == ["r4", "r5"]
    assert neg_sets(load("mergesort.pl")) == (set(), set(), [])
    neg, star, pm = neg_sets(load("lcount_split.pl"))
    assert neg == {("nat", 1)} and star == {("nat", 1)} and ids(pm) == ["r5", "r6"]


def test_extension():
    p = load("list01.pl")
    r6 = [p.clause("r6")]
    rest = [c for c in p.clauses if c.id != "r6"]
    assert check_extension(r6, rest) == (True, None)
    ok, wit = check_extension(rest, r6)
    assert not ok and wit[1] == "r6" and wit[0] in {("list01", 3), ("length", 2)}


def test_independent_modules():
    p = parse_program("p(a).\nq(b) :- q(a).\n")
    a, b = [p.clauses[0]], [p.clauses[1]]
    assert check_extension(a, b)[0] and check_extension(b, a)[0]


def test_validate_mergesort_both_orders():
    p = load("mergesort.pl")
    h = validate_hierarchy(p)
    assert [m.preds for m in h.modules] == [(MERGE,), (SPLIT,), (MS,)]
    h2 = validate_hierarchy(p, [("a", [SPLIT]), ("b", [MERGE]), ("c", [MS])])
    assert len(h2.modules) == 3


def test_validate_rejects_bad_order():
    p = load("list01.pl")
    with pytest.raises(HierarchyError) as e:
        validate_hierarchy(p, [("low", [("plist01", 1)]), ("high", [("list01", 3), ("length", 2)])])
    assert e.value.witness is not None


def test_validate_rejects_uncovered():
    p = load("list01.pl")
    with pytest.raises(HierarchyError):
        validate_hierarchy(p, [("only", [("plist01", 1)])])


def test_finest_mergesort():
    h = finest_decomposition(load("mergesort.pl"))
    assert len(h.modules) == 3 and h.modules[-1].preds == (MS,)


def test_finest_color_map():
    h = finest_decomposition(load("color_map.pl"))
    assert [set(m.preds) for m in h.modules] == [
        {("member", 2)}, {("select", 3), ("subset", 2)}, {("color_region", 2)}, {("color_map", 2)}]


def test_finest_single_predicate():
    h = finest_decomposition(parse_program("p(s(X)) :- p(X).\np(0).\n"))
    assert len(h.modules) == 1


def _oracle_sccs(g):
    # independent closure computation through reachability matrices
    idx = {k: i for i, k in enumerate(g.nodes)}
    n = len(g.nodes)
    r = [[i == j for j in range(n)] for i in range(n)]
    for a, b in g.edges:
        r[idx[a]][idx[b]] = True
    for k, i, j in itertools.product(range(n), repeat=3):
        if r[i][k] and r[k][j]:
            r[i][j] = True
    return {frozenset(g.nodes[j] for j in range(n) if r[i][j] and r[j][i]) for i in range(n)}, r, idx


@pytest.mark.parametrize("name", CORPUS)
def test_decomposition_properties(name):
    p = load(name)
    g = build_depgraph(p)
    comps, r, idx = _oracle_sccs(g)
    assert {frozenset(c) for c in sccs(g)} == comps
    h = finest_decomposition(p)
    validate_hierarchy(p, [(m.name, m.preds) for m in h.modules])
    for m in h.modules:
        for a, b in itertools.permutations(m.preds, 2):
            assert not strictly_above(g, a, b)
    # no predicate of a lower module depends on a higher one
    for i, lo in enumerate(h.modules):
        for hi in h.modules[i + 1:]:
            for a in lo.preds:
                for b in hi.preds:
                    assert not r[idx[a]][idx[b]]
