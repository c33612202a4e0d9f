"""Formula levels, stratification, definition translation and well-formedness."""
import pytest

from gprover.defs import lvl, wellformed_formula
from gprover.formulas import view
from gprover.parser import ParseError, parse
from gprover.printer import show_clause
from support import corpus, sig_of, term

LEVELS = {"p": 1, "q": 1}


def f(text, **vs):
    return term(text, sig_of(), **vs)


@pytest.mark.parametrize("text,expected", [
    ("(x:i)\\ f x |> f n0", 0),
    ("true", 0),
    ("p a", 1),
    ("p a => false", 2),
    ("forall x, p x /\\ q x x", 1),
    ("forall x, (p x => false) /\\ q x x", 2),
    ("(p a => q a a) => false", 3),
    ("nabla x, p x \\/ false", 1),
])
def test_lvl(text, expected):
    assert lvl(f(text), LEVELS) == expected


def levels_of(src):
    sf = parse("Kind i type.\nType a i.\n" + src)
    return {n: pd.level for n, pd in sf.defs.preds.items()}, sf


def test_self_loop_is_level_one():
    lv, _ = levels_of("Define inductive p : prop by p := p.")
    assert lv == {"p": 1}


def test_dependency_raises_level():
    lv, _ = levels_of("Define q : prop by q.\nDefine p : prop by p := q.")
    assert lv == {"q": 1, "p": 2}
    lv, _ = levels_of("Define q : prop by q.\nDefine p : prop by p := q => false.")
    assert lv == {"q": 1, "p": 3}


def test_negative_self_reference_rejected():
    with pytest.raises(ParseError, match="not stratified"):
        levels_of("Define p : prop by p := p => false.")


def test_mutual_recursion_rejected():
    with pytest.raises(ParseError):
        levels_of("Define p : prop by p := q.\nDefine q : prop by q := p.")


def test_nominal_in_clause_rejected():
    with pytest.raises(ParseError):
        parse("Kind i type.\nType r i -> prop.\nDefine r : i -> prop by r n0.")


def test_coinductive_nabla_head_rejected():
    with pytest.raises(ParseError):
        parse("Kind i type.\nDefine coinductive r : i -> prop by nabla x, r x.")


# ---------------------------------------------------------------- translation

def translations(name):
    sf = parse(corpus(name))
    return {n: show_clause(pd.translated) for n, pd in sf.defs.preds.items()}


def test_member_translation_shape():
    tr = translations("stlc_uniq.thm")["member"]
    assert tr.startswith("member _y1 _y2 := ")
    assert tr.count("\\/") == 1
    assert "member' p (p :: l) = member' _y1 _y2" in tr


def test_nabla_clause_translates_to_abstraction():
    tr = translations("stlc_uniq.thm")["cntx"]
    assert "((x:tm)\\ cntx' (pair x a :: l)) |> cntx' _y1" in tr
    assert tr.endswith("/\\ cntx l)")


def test_fresh_translation_has_no_body():
    tr = translations("fresh.thm")["fresh"]
    assert tr == "fresh _y1 _y2 := exists (e:il), ((x:i)\\ fresh' x e) |> fresh' _y1 _y2"


def test_translation_is_level_preserving():
    sf = parse(corpus("stlc_uniq.thm"))
    levels = sf.defs.levels()
    for pd in sf.defs.preds.values():
        assert lvl(pd.translated.body, levels) <= pd.level
        assert view(pd.translated.body).kind in ("or", "exists", "nabs", "and")


# ---------------------------------------------------------------- well-formedness

def test_wellformed_accepts_corpus_theorems():
    sf = parse(corpus("stlc_uniq.thm"))
    for th in sf.theorems:
        wellformed_formula(th.formula, sf.sig)


def test_bad_nabs_shape_rejected():
    with pytest.raises((ParseError, TypeError)):
        f("a |> (x:i)\\ x")


def test_quantifying_over_prop_rejected():
    with pytest.raises((ParseError, TypeError)):
        f("forall (P:prop), P")
