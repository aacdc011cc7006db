import pytest

from termweaver import syntax as S
from termweaver.model import (ConservativeOracle, DeclaredOracle, LeastModelOracle, OverrideOracle,
                              check_complete_model, check_is_model, least_model_definite)
from termweaver.parser import parse_program, parse_term
from corpus_util import corpus_text, load

t = parse_term


def pos(text):
    return S.Literal(True, t(text))


def test_declared_mergesort_model():
    m = DeclaredOracle(load("mergesort.pl").model)
    assert m.holds(pos("split([a,b],[a],[b])")) is True
    assert m.holds(pos("split([a,b],[a,b],[])")) is False
    assert m.holds(S.Literal(False, t("split([a,b],[a,b],[])"))) is True


def test_conservative_is_maybe():
    c = ConservativeOracle()
    assert c.holds(pos("p(a)")) is None
    assert c.holds(S.Literal(False, t("p(a)"))) is None


def test_nonground_literal_rejected():
    with pytest.raises(ValueError):
        ConservativeOracle().holds(pos("p(X)"))


def test_pattern_order_irrelevant():
    pats = load("mergesort.pl").model
    a, b = DeclaredOracle(pats), DeclaredOracle(tuple(reversed(pats)))
    for text in ["split([a,b],[a],[b])", "split([a],[a],[])", "split([a],[],[a])", "merge([],[],[])"]:
        assert a.holds(pos(text)) == b.holds(pos(text))


NAT = parse_program("q(0).\nq(s(Y)) :- q(Y).\n")


def test_least_model_nat():
    assert {S.format_term(a) for a in least_model_definite(NAT, 3)} == {"q(0)", "q(s(0))", "q(s(s(0)))"}


def test_least_model_edge_cases():
    assert least_model_definite(parse_program(""), 3) == set()
    facts = parse_program("p(a).\np(b).\n")
    assert {S.format_term(x) for x in least_model_definite(facts, 2)} == {"p(a)", "p(b)"}
    with pytest.raises(ValueError):
        least_model_definite(load("list01.pl"), 2)


def test_least_model_monotone_in_depth():
    p = load("mergesort.pl")
    small = least_model_definite(p.subprogram(p.clauses_for(("split", 3))), 2)
    big = least_model_definite(p.subprogram(p.clauses_for(("split", 3))), 3)
    assert small <= big


def test_mergesort_model_passes():
    p = load("mergesort.pl")
    assert check_is_model(DeclaredOracle(p.model), p, 3).status == "passed"


def test_dropping_a_pattern_violates_c5():
    p = load("mergesort.pl")
    pats = tuple(x for x in p.model if S.format_term(x.pattern) != "split([],[],[])")
    r = check_is_model(DeclaredOracle(pats), p, 3)
    assert r.status == "violated" and r.clause == "c4"
    pats = tuple(x for x in p.model if S.format_term(x.pattern) != "split([X],[X],[])")
    r = check_is_model(DeclaredOracle(pats), p, 3)
    assert r.status == "violated" and r.clause == "c5"


def test_conservative_inconclusive():
    p = load("mergesort.pl")
    assert check_is_model(ConservativeOracle(), p, 2).status == "inconclusive"


def test_list01_least_model_complete():
    p = load("list01.pl")
    assert check_complete_model(LeastModelOracle(p, 3), p, 3).status == "passed"


def test_unsupported_atom():
    p = load("list01.pl")
    sub = p.subprogram(p.clauses_for(("length", 2)))
    lm = LeastModelOracle(sub, 3, S.program_signature(p))
    bad = OverrideOracle(lm, {t("length([],s(0))"): True})
    r = check_complete_model(bad, p.subprogram(list(sub.clauses) + [p.clause("r6")]), 3)
    assert r.status == "violated" and "length([],s(0))" in r.witness


def test_definite_complete_equals_model_check():
    p = load("mergesort.pl")
    o = DeclaredOracle(p.model)
    assert check_complete_model(o, p, 3).status == check_is_model(o, p, 3).status


def test_split_singleton_right_pattern_breaks_mergesort_model():
    p = parse_program(corpus_text("mergesort.pl") + "\n:- model split([X], [], [X]).\n")
    r = check_is_model(DeclaredOracle(p.model), p, 3)
    assert r.status == "violated"
    assert r.witness.startswith("split([[],[]],[[],[]],[])")
