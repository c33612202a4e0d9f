"""Rule-level behaviour of the sequent calculus."""
import pytest

from gprover.calculus import RuleError, RuleInstance, Sequent, apply_rule
from gprover.checker import context_of
from gprover.formulas import view
from gprover.nominal import support
from gprover.parser import parse, parse_tactic, parse_term
from gprover.syntax import Base, Nom, Var
from gprover.tactics import start, step
from support import I, corpus

SRC = """
Kind i, il type.
Type a, b i.
Type f i -> i.
Type p i -> prop.
Type q i -> i -> prop.
Type nil il.
Type :: i -> il -> il.

Define inductive member : i -> il -> prop by
  member X (X :: L) ;
  member X (Y :: L) := member X L.

Define fresh : i -> i -> prop by
  nabla x, fresh x E.

Define inductive nat : i -> prop by
  nat a ;
  nat (f X) := nat X.

Define coinductive stream : i -> prop by
  stream (f X) := stream X.
"""

SF = parse(SRC)
CTX = context_of(SF)


def fm(text, **vs):
    env = {k: Var(k, v) for k, v in vs.items()}
    return parse_term(text, SF.sig, None, env)


def seq(hyps, goal, **vs):
    return Sequent(tuple(Var(k, v) for k, v in vs.items()),
                   tuple(fm(h, **vs) for h in hyps), fm(goal, **vs))


def run(s, tag, **params):
    return apply_rule(s, RuleInstance(tag, params), CTX)


# ---------------------------------------------------------------- core

def test_id_up_to_permutation():
    assert run(seq(["p n0"], "p n1"), "id", hyp=0) == []


def test_id_rejects_different_atoms():
    with pytest.raises(RuleError):
        run(seq(["q n0 n1"], "q n0 n0"), "id", hyp=0)


def test_nabla_right_picks_fresh_nominal():
    (out,) = run(seq([], "nabla x, q x n0"), "nablaR")
    assert out.goal == fm("q n1 n0")


def test_nabla_right_rejects_occurring_nominal():
    with pytest.raises(RuleError, match="not fresh"):
        run(seq([], "nabla x, q x n0"), "nablaR", nom=Nom(0, I))


def test_forall_right_raises_over_support():
    (out,) = run(seq([], "forall x, q x n0"), "allR")
    (h,) = out.sig
    assert str(h.ty) in ("i -> i", "(i -> i)")
    assert support(out.goal) == {Nom(0, I)}
    assert view(out.goal).const.name == "q"


def test_forall_right_without_nominals_is_plain():
    (out,) = run(seq([], "forall x, p x"), "allR", name="X")
    assert out.sig == (Var("X", I),) and out.goal == fm("p X", X=I)


def test_exists_right_witness_checked():
    with pytest.raises(RuleError):
        run(seq([], "exists x, p x"), "exR", witness=fm("nil"))
    (out,) = run(seq([], "exists x, p x"), "exR", witness=fm("a"))
    assert out.goal == fm("p a")


def test_impl_and_or():
    s = seq(["p a \\/ p b", "p a => q a a"], "q a a")
    l, r = run(s, "orL", hyp=0)
    assert l.hyps[-1] == fm("p a") and r.hyps[-1] == fm("p b")
    left, right = run(s, "impL", hyp=1)
    assert left.goal == fm("p a") and right.hyps[-1] == fm("q a a")


# ---------------------------------------------------------------- nominal abstraction

def test_nabs_right():
    assert run(seq([], "(x\\ q x n1) |> q n0 n1"), "nabsR") == []
    with pytest.raises(RuleError):
        run(seq([], "(x\\ q x n1) |> q n1 n1"), "nabsR")


def test_nabs_left_unsatisfiable_closes():
    assert run(seq(["(x\\ f x) |> f a"], "false"), "nabsL", hyp=0) == []


def test_nabs_left_instantiates():
    (out,) = run(seq(["(x\\ f x) |> f X"], "p X", X=I), "nabsL", hyp=0)
    assert out.sig == () and out.goal == fm("p n0")


# ---------------------------------------------------------------- definitions

def test_defRp_member():
    (out,) = run(seq([], "member a (b :: a :: nil)"), "defRp", clause=1)
    assert out.goal == fm("member a (a :: nil)")
    (done,) = run(out, "defRp", clause=0)
    assert done.goal == fm("true")
    (deeper,) = run(out, "defRp", clause=1)
    assert deeper.goal == fm("member a nil")
    for k in (0, 1):
        with pytest.raises(RuleError):
            run(deeper, "defRp", clause=k)


def test_defLp_on_nil_closes():
    assert run(seq(["member a nil"], "false"), "defLp", hyp=0) == []


def test_defLp_case_split():
    outs = run(seq(["member X (a :: L)"], "p X", X=I, L=Base("il")), "defLp", hyp=0)
    assert len(outs) == 2
    assert outs[0].goal == fm("p a")


def test_fresh_of_compound_term_fails():
    assert run(seq(["fresh a (f a)"], "false"), "defLp", hyp=0) == []
    with pytest.raises(RuleError):
        run(seq([], "fresh a (f a)"), "defRp", clause=0)


def test_fresh_nominal_is_provable():
    (out,) = run(seq([], "nabla x, fresh x a"), "nablaR")
    (done,) = run(out, "defRp", clause=0)
    assert done.goal == fm("true") and run(done, "topR") == []


def test_defL_unfolds_translation():
    (out,) = run(seq(["nat (f a)"], "false"), "defL", hyp=0)
    assert view(out.hyps[0]).kind == "or"


# ---------------------------------------------------------------- (co)induction

def test_induction_with_false_leaves_clause_premises():
    outs = run(seq(["nat X"], "false", X=I), "ILp", hyp=0, S=fm("(x:i)\\ false"))
    assert len(outs) == 3
    assert outs[-1].hyps[-1] == fm("false")


def test_translated_induction_premise():
    body, main = run(seq(["nat X"], "false", X=I), "IL", hyp=0, S=fm("(x:i)\\ false"))
    assert body.goal == fm("false") and len(body.sig) == 1


def test_coinduction_with_true():
    first, step = run(seq([], "stream a"), "CIR", S=fm("(x:i)\\ true"))
    assert first.goal == fm("true") and step.hyps == (fm("true"),)


def test_flavor_checked():
    with pytest.raises(RuleError, match="not co-inductive"):
        run(seq([], "nat a"), "CIR", S=fm("(x:i)\\ true"))
    with pytest.raises(RuleError, match="not inductive"):
        run(seq(["stream a"], "false"), "ILp", hyp=0, S=fm("(x:i)\\ false"))


def test_invariant_may_not_mention_nominals():
    with pytest.raises(RuleError, match="nominal"):
        run(seq(["nat X"], "false", X=I), "ILp", hyp=0, S=fm("x\\ q x n0"))


# ---------------------------------------------------------------- pattern vs translated

def _closes(pattern_rules, text):
    state = start("t", fm(text), CTX, SF.sig, pattern_rules, 6)
    for tac in ("intros.", "search."):
        step(state, parse_tactic(tac))
    return state.done


@pytest.mark.parametrize("hyp", ["member a nil", "member a (b :: nil)", "fresh a (f a)",
                                 "nabla x, member x (a :: b :: nil)"])
def test_pattern_rules_agree_with_translated_cascade(hyp):
    text = f"({hyp}) => false"
    assert _closes(True, text) and _closes(False, text)


def test_corpus_definitions_load():
    sf = parse(corpus("stlc_uniq.thm"))
    assert set(sf.defs.preds) == {"member", "of", "cntx"}
