"""Small helpers shared by the test modules."""
from __future__ import annotations

from pathlib import Path

from gprover.parser import parse, parse_term
from gprover.syntax import Arrow, Base, Var

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

I = Base("i")
II = Arrow(I, I)

BASIC = """
Kind i type.
Type a, b, c i.
Type f i -> i.
Type g i -> i -> i.
Type p i -> prop.
Type q i -> i -> prop.
Type r i -> i -> prop.
"""


def sig_of(text: str = BASIC):
    return parse(text).sig


def term(text: str, sig=None, **vars_):
    """Elaborate text; keyword arguments declare eigenvariables by type."""
    sig = sig or sig_of()
    env = {name: Var(name, ty) for name, ty in vars_.items()}
    return parse_term(text, sig, None, env)


def corpus(name: str) -> str:
    return (CORPUS / name).read_text(encoding="utf-8")


REPLAY_PROOFS = {
    "fresh.thm": ["nabla_all_in", "nabla_ex_out"],
    "spec.thm": ["spec_unique"],
    "stlc_uniq.thm": ["member_fresh", "cntx_ext", "member_uniq", "cntx_abs", "type_uniq"],
    "subst.thm": ["subst_app", "subst_abs"],
}
PERTURBATIONS = ("perm", "subst", "weak")


def certified(name: str):
    """(source file, context with every proved theorem as a lemma, name -> certificate)."""
    from gprover.calculus import Context
    from gprover.checker import check_source

    sf = parse(corpus(name))
    rep = check_source(sf)
    certs = {r.name: r.certificate for r in rep.results if r.ok}
    ctx = Context(sf.defs, {n: c.formula for n, c in certs.items()})
    return sf, ctx, certs


def perturb_and_replay(sf, ctx, cert, kind: str, seed: int):
    """Perturb one sequent of the proof and replay; returns (changed, new subtree)."""
    import random

    from gprover.replay import permute_formulas, pick_node, replay_on, substitute_ground, weaken
    from gprover.tactics import check_node

    rng = random.Random(seed)
    root = cert.root
    if kind == "perm":
        node = pick_node(root, need_noms=True)
        seq, tr = permute_formulas(node.seq, rng)
    elif kind == "subst":
        node = pick_node(root, need_vars=True)
        seq, tr, _ = substitute_ground(node.seq, sf.sig, rng)
    else:
        node = pick_node(root)
        seq, tr = weaken(node.seq, sf.sig, rng)
    out = replay_on(node, seq, tr, ctx)
    check_node(out, ctx)
    return seq != node.seq, out
