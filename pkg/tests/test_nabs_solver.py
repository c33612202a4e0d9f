"""Deciding nominal abstraction, pattern unification and complete solution sets."""
import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from gprover.nabs import NabsProblem, csnas, holds, is_solution
from gprover.nominal import Subst, less_general, support
from gprover.oracle import brute_force_csnas, random_problem
from gprover.selftest import compare_csnas
from gprover.syntax import App, Nom, Var, arrows
from gprover.unify import NonPattern, pattern_unify
from support import II, I, sig_of, term

SIG = sig_of("""
Kind i type.
Type a i.
Type f i -> i.
Type g i -> i -> i.
Type fresh i -> i -> i.
""")


def t(text, **vs):
    return term(text, SIG, **vs)


# ---------------------------------------------------------------- holds

HOLDING = [("x\\ f x", "f n1"), ("x\\ g x n2", "g n1 n2"), ("x\\ y\\ g x y", "g n1 n2")]
FAILING = [("(x:i)\\ x", "g n1 n2"), ("x\\ g x n2", "g n2 n1"), ("x\\ y\\ g x y", "g n1 n1")]


@pytest.mark.parametrize("s,u", HOLDING)
def test_holds_examples(s, u):
    assert holds(t(s), t(u))


@pytest.mark.parametrize("s,u", FAILING)
def test_fails_examples(s, u):
    assert not holds(t(s), t(u))


def test_degree_zero_is_equality():
    assert holds(t("g a n0"), t("g a n0"))
    assert not holds(t("g a n0"), t("g a n1"))


# ---------------------------------------------------------------- is_solution

def test_fresh_solution():
    T, S, R = Var("T", I), Var("S", I), Var("R", I)
    pb = NabsProblem(t("x\\ fresh x T", T=I), S)
    theta = Subst({S: t("fresh n0 R", R=I), T: R})
    assert is_solution(theta, pb)


def test_identity_on_holding_problem():
    pb = NabsProblem(t("x\\ g x n2"), t("g n1 n2"))
    assert is_solution(Subst(), pb)


def test_nominal_binding_solves():
    X = Var("X", I)
    pb = NabsProblem(t("x\\ f x"), t("f X", X=I))
    assert is_solution(Subst({X: Nom(0, I)}), pb)


# ---------------------------------------------------------------- pattern unification

def test_pattern_unify_projection():
    F = Var("F", II)
    sol = pattern_unify(t("F n1", F=II), t("f n1"), [F])
    assert sol is not None and sol.get(F) == t("z\\ f z")


def test_pattern_unify_first_order():
    X = Var("X", I)
    sol = pattern_unify(t("f X", X=I), t("f a"), [X])
    assert sol.get(X) == t("a")


def test_pattern_unify_repeated_argument():
    F = Var("F", arrows([I, I], I))
    with pytest.raises(NonPattern):
        pattern_unify(t("F n1 n1", F=F.ty), t("g n1 n1"), [F])


# ---------------------------------------------------------------- csnas

def test_csnas_fresh_problem():
    S, T = Var("S", I), Var("T", I)
    sols = list(csnas([S, T], t("x\\ fresh x T", T=I), S))
    assert len(sols) == 1
    th = sols[0]
    body = th.get(S)
    assert isinstance(body, App) and body.head.name == "fresh"
    c = body.args[0]
    assert isinstance(c, Nom)
    assert c not in support(body.args[1])


def test_csnas_identity_abstraction():
    X = Var("X", I)
    sols = list(csnas([X], t("(y:i)\\ y"), X))
    assert len(sols) == 1 and isinstance(sols[0].get(X), Nom)


def test_csnas_unsatisfiable_matches_oracle():
    s, u = t("(x:i)\\ x"), t("f n1")
    assert list(csnas([], s, u)) == []
    assert list(brute_force_csnas([], s, u)) == []


def test_degree_zero_agrees_with_unification():
    X = Var("X", I)
    s, u = t("g X a", X=I), t("g (f a) a")
    sols = list(csnas([X], s, u))
    mgu = pattern_unify(s, u, [X])
    assert len(sols) == 1 and sols[0].get(X) == mgu.get(X)
    assert compare_csnas([X], s, u) is None


def test_oracle_agreement_sample():
    rng = random.Random(7)
    for _ in range(60):
        flex, s, u = random_problem(rng)
        assert compare_csnas(flex, s, u) is None


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10 ** 9))
def test_csnas_sound_and_covering(seed):
    flex, s, u = random_problem(random.Random(seed))
    pb = NabsProblem(s, u, tuple(flex))
    sols = list(csnas(flex, s, u))
    for th in sols:
        assert is_solution(th, pb)
    # complete sets may be redundant up to <=, but never list a solution twice
    shown = [str(th) for th in sols]
    assert len(set(shown)) == len(shown)


def test_redundant_but_valid_solutions():
    """Both selection orders survive when a raised variable can absorb the swap."""
    flex, s, u = random_problem(random.Random(233))
    sols = list(csnas(flex, s, u))
    assert len(sols) == 2
    a, b = sols
    assert less_general(a, b, flex) and less_general(b, a, flex)
