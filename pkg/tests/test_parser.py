import pytest

from termweaver import syntax as S
from termweaver.parser import ProgramError, format_program, parse_program, parse_query
from corpus_util import CORPUS, corpus_text, load


def diag(text):
    with pytest.raises(ProgramError) as e:
        parse_program(text)
    return e.value.diagnostics


def test_list01_program():
    p = load("list01.pl")
    assert len(p.clauses) == 6
    assert set(p.defined()) == {("list01", 3), ("length", 2), ("plist01", 1)}


def test_empty_program():
    assert parse_program("").clauses == ()


def test_unclosed_paren():
    ds = diag("p(X) :- q(X), q(X")
    assert ds and ds[0].line == 1 and ds[0].col >= 14


def test_errors_are_collected():
    ds = diag("p(X :- q.\nq(.\nr.\n")
    assert len(ds) == 2
    assert [d.line for d in ds] == [1, 2]


def test_queries():
    assert len(parse_query("move([X1,X2],Ys), delete(Ys,Y,Zs).").literals) == 2
    assert parse_query(".").literals == ()
    (lit,) = parse_query("\\+ q(X).").literals
    assert not lit.positive and lit.atom == S.Struct("q", (S.Var("X"),))


def test_duplicate_mode():
    ds = diag(":- mode p(+).\n:- mode p(-).\np(a).\n")
    assert "duplicate mode" in ds[0].message and ds[0].line == 2


def test_module_with_undefined_predicate():
    ds = diag("p(a).\n:- module m: p/1, q/2.\n")
    assert "q/2" in ds[0].message


def test_levelmap_for_undeclared_module():
    ds = diag("p(a).\n:- module m: p/1.\n:- levelmap n: p(X) = size(X).\n")
    assert "n" in ds[0].message


def test_directives_resolved():
    p = parse_program(
        ":- mode p(+,-).\n"
        ":- type p(+:list(any), -:nat).\n"
        ":- typedef region = region(any, any, list(any)).\n"
        ":- module m1: p/2.\n"
        ":- levelmap m1: p(X,Y) = len(X) + 2*size(Y) + 1.\n"
        ":- model p(X,Y) when ground(X), len(X) > len(Y).\n"
        "p([], 0).\n")
    assert p.mode_of(("p", 2)) == ("+", "-")
    assert ("p", 2) in p.types and "region" in p.typedefs
    e = p.levelmaps["m1"][("p", 2)]
    assert e.const == 1
    assert e.eval(S.Struct("p", (S.make_list([S.Struct("a")]), S.Struct("s", (S.Struct(0),))))) == 1 + 1 + 2 * 2
    (pat,) = p.model
    assert [c.op for c in pat.constraints] == ["ground", ">"]


def test_clause_labels():
    p = parse_program("r1: p(a).\np(b).\n")
    assert [c.id for c in p.clauses] == ["r1", "c2"]


@pytest.mark.parametrize("name", CORPUS)
def test_round_trip(name):
    p = load(name)
    text = format_program(p)
    p2 = parse_program(text)
    assert p2.clauses == p.clauses
    assert format_program(p2) == text


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_directives_survive_round_trip(name):
    p = load(name)
    p2 = parse_program(format_program(p))
    for attr in ("modes", "types", "typedefs", "modules", "levelmaps", "model", "terminating", "extra_signature"):
        assert getattr(p2, attr) == getattr(p, attr), attr
