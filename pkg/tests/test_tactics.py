"""The tactic layer: each tactic expands into checked rule instances."""
import pytest

from gprover.checker import CheckConfig, check_text, context_of
from gprover.parser import parse, parse_tactic, parse_theorem_header
from gprover.tactics import TacticError, check_certificate, start, step
from support import corpus

SRC = """
Kind i, il, a, alist, tm, tp type.
Type c, d i.
Type b i -> i -> i -> prop.
Type p, q prop.
Type nil il.
Type :: i -> il -> il.
Type pair tm -> tp -> a.
Type anil alist.
Type acons a -> alist -> alist.

Define fresh : i -> il -> prop by
  nabla x, fresh x E.

Define inductive member : a -> alist -> prop by
  member P (acons P L) ;
  member P (acons Q L) := member P L.
"""

SF = parse(SRC)


def state(text, depth=5, pattern_rules=True):
    _, f = parse_theorem_header(f"Theorem t : {text}.", SF.sig)
    return start("t", f, context_of(SF), SF.sig, pattern_rules, depth)


def run(st, *tactics):
    for tac in tactics:
        step(st, parse_tactic(tac))
    return st


def test_intros_opens_nabla_and_implications():
    st = run(state("forall X, nabla z, b z X X => b z X X"), "intros.")
    (g,) = st.goals
    assert g.labels == ("H1",)
    assert [v.name for v in g.seq.sig] == ["X"]
    assert "n0" in st.show_goal()


def test_nabla_to_exists_fresh_script():
    st = run(state("forall X1 X2, (nabla z, b z X1 X2) => exists z, fresh z (X1 :: X2 :: nil) /\\ b z X1 X2"),
             "intros.", "case H1.", "exists n0.", "split.", "search 1.", "search 1.")
    assert st.done
    assert check_certificate(st.certificate(), context_of(SF))


def test_case_on_impossible_membership_closes():
    st = run(state("forall M B, member (pair M B) anil => false"), "intros.", "case H1.")
    assert st.done


def test_search_closes_tautology():
    assert run(state("p => q => p /\\ q"), "search.").done


def test_search_exists_true():
    assert run(state("exists (x:i), true", depth=2), "search 2.").done


def test_search_fails_on_false():
    st = state("p => false")
    with pytest.raises(TacticError):
        run(st, "search.")
    assert len(st.goals) == 1


def test_failed_tactic_leaves_state_unchanged():
    st = run(state("p => q"), "intros.")
    before = st.show_goal()
    with pytest.raises(TacticError):
        run(st, "case H1.")
    assert st.show_goal() == before


def test_extra_tactics_after_qed_reported():
    text = SRC + "\nTheorem t : p => p.\nintros. search. search.\nQed.\n"
    (r,) = check_text(text).results
    assert not r.ok and "extra" in r.error


def test_distinct_nominals_at_depth_eight():
    rep = check_text(corpus("consistency.thm"))
    assert rep.ok


def test_search_monotone_in_depth():
    goal = "forall X1 X2, (nabla z, b z X1 X2) => exists z, fresh z (X1 :: X2 :: nil) /\\ b z X1 X2"
    proved = [d for d in range(0, 6) if _search_ok(goal, d)]
    assert proved and proved == list(range(proved[0], 6))


def _search_ok(goal, depth):
    try:
        return run(state(goal, depth), f"search {depth}.").done
    except TacticError:
        return False


def test_checking_is_deterministic():
    text = corpus("stlc_uniq.thm")
    a = [r.certificate.to_json() for r in check_text(text).results]
    b = [r.certificate.to_json() for r in check_text(text).results]
    assert a == b


@pytest.mark.parametrize("name", ["fresh.thm", "spec.thm", "subst.thm", "stlc_uniq.thm",
                                  "fixpoints.thm", "consistency.thm"])
@pytest.mark.parametrize("pattern_rules", [True, False])
def test_corpus_checks_in_both_modes(name, pattern_rules):
    rep = check_text(corpus(name), CheckConfig(pattern_rules=pattern_rules))
    assert rep.ok, [(r.name, r.error) for r in rep.results if not r.ok]


def test_inconsistent_file_fails():
    rep = check_text(corpus("inconsistent.thm"))
    assert not rep.ok
