"""Terms, normalization, support, permutations and substitutions."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gprover.nominal import (
    Perm, Subst, apply_perm, equiv, less_general, nca_apply, nca_compose, ordinary_apply,
    perm_equiv, support,
)
from gprover.parser import ParseError, parse
from gprover.syntax import (
    App, Arrow, Bound, Const, Lam, Nom, TypeError_, Var, is_canonical, normalize, typecheck,
)
from support import II, I, sig_of, term

a, b, c = Nom(0, I), Nom(1, I), Nom(2, I)
X, Y = Var("X", I), Var("Y", I)


# ---------------------------------------------------------------- typecheck / normalize

def test_typecheck_application_of_nominal():
    assert typecheck(term("f n0")) == I


def test_typecheck_identity():
    assert typecheck(term("(x:i)\\ x")) == II


def test_prop_in_argument_type_rejected():
    with pytest.raises((ParseError, TypeError_, ValueError)):
        parse("Kind i type.\nType bad (prop -> i) -> i.")


def test_beta():
    assert term("(x\\ f x) a") == term("f a")


def test_eta_long_argument():
    sig = sig_of("Kind i type.\nType h (i -> i) -> i.\nType g i -> i.")
    t = term("h g", sig)
    assert t == term("h (x\\ g x)", sig)
    assert isinstance(t.args[0], Lam)


def test_double_beta_swaps_arguments():
    assert term("(x\\ y\\ q y x) a b") == term("q b a")


# ---------------------------------------------------------------- support and permutations

def test_support_examples():
    assert support(term("q n0 X", X=I)) == {a}
    assert support(term("(x:i)\\ x")) == set()
    assert support(term("g n0 (g n0 n1)")) == {a, b}


def test_apply_perm_examples():
    swap = Perm.swap(a, b)
    assert apply_perm(swap, term("p n0")) == term("p n1")
    assert apply_perm(Perm(), term("q n0 n1")) == term("q n0 n1")
    assert apply_perm(swap, term("q n0 n1")) == term("q n1 n0")


def test_perm_equiv_examples():
    assert perm_equiv(term("p n0"), term("p n1")) == Perm.swap(a, b)
    assert perm_equiv(term("q n0 n1"), term("q n2 n2")) is None
    assert perm_equiv(term("q n0 (f n1)"), term("q n1 (f n0)")) == Perm.swap(a, b)


# ---------------------------------------------------------------- substitutions

def test_nca_apply_renames_clashing_nominal():
    theta = Subst({X: term("f n0")})
    out = nca_apply(theta, term("q n0 X", X=I))
    assert out == term("q n1 (f n0)")


def test_nca_apply_with_empty_support_is_ordinary():
    theta = Subst({X: term("f a")})
    t = term("q n0 X", X=I)
    assert nca_apply(theta, t) == ordinary_apply(theta, t)


def test_nca_apply_nominal_binding():
    theta = Subst({X: a})
    assert nca_apply(theta, term("q X n0", X=I)) == term("q n0 n1")


def test_ordinary_apply_examples():
    assert ordinary_apply(Subst({X: a}), term("p X", X=I)) == term("p n0")
    assert ordinary_apply(Subst({X: term("f n0")}), term("q n0 X", X=I)) == term("q n0 (f n0)")
    F = Var("F", II)
    assert ordinary_apply(Subst({F: term("(z:i)\\ z")}), term("F a", F=II)) == term("a")


def test_compose_with_empty_theta():
    rho = Subst({X: term("f a")})
    assert nca_compose(Subst(), rho) == rho


def test_compose_collapses_raised_variable():
    Y1 = Var("Y1", II)
    theta = Subst({X: a, Y: App(Y1, (a,))})
    rho = Subst({Y1: Lam(I, Y, "z")})
    out = nca_compose(theta, rho)
    assert equiv(out.get(X), a)
    assert out.get(Y) == Y


def test_compose_freshens_theta():
    Y1 = Var("Y1", II)
    theta = Subst({X: a})
    rho = Subst({Y: App(Y1, (a,))})
    out = nca_compose(theta, rho)
    assert out.get(X) == b
    assert out.get(Y) == App(Y1, (a,))


def test_less_general_examples():
    Y1 = Var("Y1", II)
    rho = Subst({X: a})
    theta = Subst({X: a, Y: App(Y1, (a,))})
    assert less_general(theta, theta, [X, Y])
    assert less_general(rho, theta, [X, Y])
    assert not less_general(theta, rho, [X, Y])


# ---------------------------------------------------------------- properties

@st.composite
def terms(draw, depth=3):
    leaves = [Const("a", I), X, Y, a, b, c]
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        return draw(st.sampled_from(leaves))
    if draw(st.booleans()):
        return App(Const("f", II), (draw(terms(depth - 1)),))
    return App(Const("g", Arrow(I, II)), (draw(terms(depth - 1)), draw(terms(depth - 1))))


@st.composite
def perms(draw):
    noms = [Nom(k, I) for k in range(4)]
    img = draw(st.permutations(noms))
    return Perm(dict(zip(noms, img)))


@settings(max_examples=200, deadline=None)
@given(terms())
def test_normalize_idempotent_and_canonical(t):
    n = normalize(t)
    assert normalize(n) == n
    assert is_canonical(n)


@settings(max_examples=200, deadline=None)
@given(terms(), perms(), perms())
def test_perm_action(t, p1, p2):
    assert apply_perm(p1.inverse(), apply_perm(p1, t)) == t
    assert apply_perm(p1.compose(p2), t) == apply_perm(p1, apply_perm(p2, t))
    assert support(apply_perm(p1, t)) == {p1(x) for x in support(t)}


@settings(max_examples=200, deadline=None)
@given(terms(), perms())
def test_perm_equiv_witness(t, p):
    u = apply_perm(p, t)
    w = perm_equiv(u, t)
    assert w is not None and apply_perm(w, t) == u


def test_lambda_body_example():
    lam = Lam(I, App(Const("f", II), (Bound(0, I),)), "x")
    assert typecheck(lam) == II
