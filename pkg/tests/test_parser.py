"""Concrete syntax: lexing, elaboration, error locations and printing."""
import pytest
from hypothesis import given, settings

from gprover.parser import ParseError, lex, parse, parse_tactic, parse_term
from gprover.printer import show, show_source
from gprover.syntax import Var, normalize
from support import CORPUS, I, corpus, sig_of, term
from test_core_syntax import terms

FILES = sorted(p.name for p in CORPUS.glob("*.thm"))


@pytest.mark.parametrize("name", FILES)
def test_round_trip(name):
    a = parse(corpus(name))
    b = parse(show_source(a))
    assert a.decls == b.decls


def test_empty_file():
    sf = parse("")
    assert sf.theorems == [] and sf.defs.preds == {}


def test_comments_ignored():
    assert parse("% nothing here\n").theorems == []


def test_lex_positions():
    toks = lex("Kind i type.\n  Type a i.")
    a = next(t for t in toks if t.text == "a")
    assert (a.line, a.col) == (2, 8)


@pytest.mark.parametrize("text,line", [
    ("Kind i type.\nType a j.", 2),
    ("Kind i type.\nTheorem t : forall x, .", 2),
    ("Kind i type.\n\nType a i\nType b i.", 4),
    ("Kind i type.\nType a i.\nTheorem t : a.\nQed.", 3),
])
def test_error_locations(text, line):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert e.value.line == line


def test_duplicate_declarations_rejected():
    with pytest.raises(ParseError, match="duplicate"):
        parse("Kind i type.\nType a i.\nType a i.")
    with pytest.raises(ParseError):
        parse("Kind i type.\nKind i type.")


def test_duplicate_theorem_rejected():
    with pytest.raises(ParseError):
        parse("Theorem t : true.\nsearch.\nQed.\nTheorem t : true.\nsearch.\nQed.")


def test_tactic_forms():
    for text in ["intros.", "case H1.", "search 3.", "unfold 2.", "exists n0.", "split.",
                 "apply H1 to H2 H3.", "apply H1 with X, Y.", "induction on H1 with x\\ true.",
                 "coinduction with x\\ true.", "assert false."]:
        assert parse_tactic(text).kind == text.split()[0].rstrip(".")


def test_operator_precedence():
    t = term("p a /\\ p b \\/ p c => p a")
    assert show(t) == "p a /\\ p b \\/ p c => p a"
    assert term("(p a => p b) => p c") != term("p a => p b => p c")


@settings(max_examples=200, deadline=None)
@given(terms())
def test_show_then_parse(t):
    n = normalize(t)
    env = {"X": Var("X", I), "Y": Var("Y", I)}
    assert parse_term(show(n), sig_of(), I, env) == n
