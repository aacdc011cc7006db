import itertools

import pytest
from hypothesis import given, settings, strategies as st

from termweaver import syntax as S
from termweaver.parser import parse_program, parse_term
from termweaver.wellbehave import (MissingDeclaration, TAny, TGround, TInt, TList, TNamed, TNat,
                                   check_well_moded, check_well_typed, prefix_closure_check,
                                   subtype, term_has_type, type_judgement_holds)
from corpus_util import load, q

t = parse_term
NAT, LNAT, ANY, LANY, GROUND = TNat(), TList(TNat()), TAny(), TList(TAny()), TGround()


def test_move_well_moded():
    assert check_well_moded(load("move.pl"), load("move.pl"))


def test_diff_well_moded():
    p = load("diff.pl")
    assert check_well_moded(p, p)
    assert check_well_moded(q("diff([a],[a],[],N)."), p)


def test_move_query_not_well_moded():
    p = load("move.pl")
    r = check_well_moded(q("move([X1,X2],Ys), delete(Ys,Y,Zs)."), p)
    assert r.verdict is False
    assert r.where == {"literal": 1, "missing": ["X1", "X2"]}


def test_empty_query_well_moded():
    assert check_well_moded(S.Query(), {})


def test_missing_mode():
    with pytest.raises(MissingDeclaration):
        check_well_moded(q("p(X)."), {})


def test_judgements():
    x, l = S.Var("X"), S.Var("L")
    assert type_judgement_holds([(x, NAT), (l, LNAT)], [(t("[X|L]"), LNAT)]) is True
    assert type_judgement_holds([(t("[X|L]"), LNAT)], [(l, LNAT)]) is True
    assert type_judgement_holds([], [(t("a"), LANY)]) is False


def test_term_has_type():
    p = load("color_map.pl")
    assert term_has_type(t("[X1,X2]"), LANY) is True
    assert term_has_type(t("a"), LANY) is False
    assert term_has_type(t("region(n, c, [r,g])"), TNamed("region"), p.typedefs) is True
    assert term_has_type(S.Var("X"), NAT) is None


def test_subtype_order():
    assert subtype(NAT, TInt(), {}) and subtype(TInt(), GROUND, {}) and subtype(GROUND, ANY, {})
    assert subtype(TList(GROUND), GROUND, {}) and subtype(LNAT, LANY, {})
    assert not subtype(LANY, GROUND, {})


def test_color_map_and_move_well_typed():
    for name in ("color_map.pl", "move.pl"):
        p = load(name)
        assert check_well_typed(p, p).verdict is True


def test_move_query_well_typed():
    p = load("move.pl")
    assert check_well_typed(q("move([X1,X2],Ys), delete(Ys,Y,Zs)."), p).verdict is True


TRIVIAL = ":- type p(-:list(any)).\n:- type q(+:list(any)).\np([]).\nq([]).\n"


def test_negative_literal_gives_no_hypothesis():
    p = parse_program(TRIVIAL)
    r = check_well_typed(q("\\+ p(a), q(a)."), p)
    assert r.verdict is False and r.where["literal"] == 2
    # a positive p produces the hypothesis X:list(any)
    assert check_well_typed(q("p(X), q(X)."), p).verdict is True


def test_prefix_closure():
    p = load("diff.pl")
    assert prefix_closure_check(q("diff([a],[a],[],N)."), "wm", p)
    pm = load("move.pl")
    assert prefix_closure_check(q("move([a,b],Ys)."), "wt", pm, pm.typedefs)


# -- brute-force soundness of judgements ------------------------------------

UNIV = S.ground_terms(S.Signature(((0, 0), ("a", 0), ("[]", 0), ("s", 1), (".", 2))), 2)


def member(g, ty):
    """Ground membership, written independently of the checker."""
    if isinstance(ty, TAny) or isinstance(ty, TGround):
        return True
    if isinstance(ty, (TNat, TInt)):
        while g.functor == "s" and len(g.args) == 1:
            g = g.args[0]
        return isinstance(g.functor, int) and (g.functor >= 0 or isinstance(ty, TInt))
    if isinstance(ty, TList):
        while g.functor == "." and len(g.args) == 2:
            if not member(g.args[0], ty.elem):
                return False
            g = g.args[1]
        return g == S.NIL
    raise AssertionError(ty)


type_st = st.sampled_from([NAT, LNAT, ANY, LANY, GROUND, TList(LNAT)])
var_st = st.sampled_from([S.Var("X"), S.Var("L")])


def term_st():
    leaf = st.one_of(var_st, st.sampled_from([t("0"), t("a"), t("[]")]))
    return st.recursive(leaf, lambda ch: st.one_of(
        ch.map(lambda x: S.Struct("s", (x,))),
        st.tuples(ch, ch).map(lambda ab: S.Struct(".", ab))), max_leaves=4)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(term_st(), type_st), max_size=2), st.lists(st.tuples(term_st(), type_st), min_size=1, max_size=2))
def test_judgement_never_true_when_refuted(hyp, concl):
    res = type_judgement_holds(hyp, concl)
    vs = sorted({v for tt, _ in hyp + concl for v in S.term_vars(tt)}, key=str)
    for values in itertools.product(UNIV, repeat=len(vs)):
        s = dict(zip(vs, values))
        if all(member(S.apply(s, tt), ty) for tt, ty in hyp):
            ok = all(member(S.apply(s, tt), ty) for tt, ty in concl)
            if not ok:
                assert res is not True, (hyp, concl, s)
                return


def test_undecided_judgement_is_not_reported_as_holding():
    p = load("lcount_split.pl")
    r = check_well_typed(q("lcount([a],N), split(N,L1,L2)."), p)
    assert r.verdict is None and r.where["literal"] == 2
