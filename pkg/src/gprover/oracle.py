"""Brute-force reference solver for nominal abstraction, plus a problem generator.

The oracle never unifies: it enumerates substitutions over a bounded term
universe, keeps those that pass is_solution, and then keeps the most general
ones under <=_Sigma.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

from .nabs import NabsProblem, SolutionSet, holds
from .nominal import (
    Subst, _freshening, apply_perm, fresh_noms, less_general, ordinary_apply, sorted_noms,
    support, support_all,
)
from .syntax import (
    App, Arrow, Base, Bound, Const, Lam, Nom, Term, Type, Var, arrows, depth, map_atoms, size,
    split_type, subterms, type_of,
)

I = Base("i")
A = Const("a", I)
F = Const("f", Arrow(I, I))
G = Const("g", arrows([I, I], I))
DEFAULT_CONSTRUCTORS = (A, F, G)


@dataclass
class Bounds:
    constructors: tuple[Const, ...] = DEFAULT_CONSTRUCTORS
    depth: int = 3
    pool: list[Nom] = field(default_factory=lambda: [Nom(k, I) for k in range(4)])
    shapes: list[Term] = field(default_factory=list)
    raised: int = 0                  # generic variables applied to up to this many nominals
    generics: list[Var] = field(default_factory=list)


def _universe(ty: Type, b: Bounds) -> list[Term]:
    """Atoms, unary constructors over atoms, and the shapes listed in b.shapes
    together with their instances at ground atoms."""
    pool = [c for c in b.pool if c.ty == ty]
    atoms: list[Term] = [c for c in b.constructors if c.ty == ty]
    atoms += pool
    atoms += [g for g in b.generics if g.ty == ty]
    if b.raised:
        for g in b.generics:
            if g.ty == ty:
                r1 = Var(g.name + "r", Arrow(I, ty))
                r2 = Var(g.name + "rr", arrows([I, I], ty))
                atoms += [App(r1, (c,)) for c in pool]
                if b.raised >= 2:
                    atoms += [App(r2, (c, d)) for c in pool for d in pool if c != d]
    out = list(dict.fromkeys(atoms))
    for fn in b.constructors:
        fargs, res = split_type(fn.ty)
        if len(fargs) == 1 and res == ty:
            out += [App(fn, (x,)) for x in atoms if type_of(x) == fargs[0]]
    shapes = [u for u in b.shapes if type_of(u) == ty and depth(u) <= b.depth]
    ground = [c for c in b.constructors if c.ty == ty] + pool
    for u in list(shapes):
        for g in b.generics:
            if any(x == g for x in subterms(u)):
                shapes += [map_atoms(u, lambda a, g=g, c=c: c if a == g else a) for c in ground]
    out += shapes
    out = list(dict.fromkeys(out))
    out.sort(key=size)
    return out


def _shapes(s: Term, t: Term, flex: list[Var], gens: list[Var], pool: list[Nom]) -> list[Term]:
    """Subterms of s and t with flexible variables made generic and loose bound
    variables replaced by nominal constants from the pool."""
    ren = dict(zip(flex, gens))
    out: list[Term] = []
    for side in (s, t):
        body = side
        while isinstance(body, Lam):
            body = body.body
        for u in subterms(body):
            if not isinstance(u, App):
                continue
            u = map_atoms(u, lambda a: ren.get(a, a))
            loose = sorted({x.idx for x in subterms(u) if isinstance(x, Bound)})
            for pick in product(pool, repeat=len(loose)):
                if len(set(pick)) != len(pick):
                    continue
                m = dict(zip(loose, pick))
                out.append(_fill(u, m))
    return out


def _fill(u: Term, m: dict[int, Nom]) -> Term:
    if isinstance(u, Bound):
        return m[u.idx]
    if isinstance(u, App):
        return App(u.head, tuple(_fill(a, m) for a in u.args))
    return u


def brute_force_csnas(flex: list[Var], s: Term, t: Term, bounds: Bounds | None = None) -> SolutionSet:
    flex = sorted(set(flex), key=lambda v: v.name)
    b = bounds or problem_bounds(s, t, flex)
    pb = NabsProblem(s, t, tuple(flex))
    universes = [[(u, support(u)) for u in _universe(x.ty, b)] for x in flex]
    supp_st = support_all([s, t])
    found: list[Subst] = []
    for picks in product(*universes):
        # is_solution, unrolled so that supports are computed once per candidate
        m = {x: u for x, (u, _) in zip(flex, picks) if u != x}
        supp_theta = frozenset().union(*(c for _, c in picks))
        pi = _freshening(supp_st, supp_theta)
        s1, t1 = (ordinary_apply(m, apply_perm(pi, u)) for u in (s, t))
        if holds(s1, t1, pb.degree):
            found.append(Subst(m))
    return SolutionSet(most_general(found, flex), [])


def most_general(sols: list[Subst], flex: list[Var]) -> list[Subst]:
    """Keep the maximal elements of sols under <=_flex, one per equivalence class."""
    ordered = sorted(sols, key=lambda th: sum(size(th.get(x)) for x in flex))
    kept: list[Subst] = []
    for th in ordered:
        if any(less_general(th, k, flex) for k in kept):
            continue
        kept = [k for k in kept if not less_general(k, th, flex)]
        kept.append(th)
    return kept


def problem_bounds(s: Term, t: Term, flex: list[Var]) -> Bounds:
    cons = tuple(sorted({c for u in (s, t) for c in subterms(u) if isinstance(c, Const)},
                        key=lambda c: c.name))
    n = len(split_type(type_of(s))[0]) - len(split_type(type_of(t))[0])
    gens = [Var(f"W{k}", I) for k in range(max(1, len(flex)))]
    supp = support_all([s, t])
    pool = sorted_noms(supp) + fresh_noms([I] * max(n, 1), supp)
    return Bounds(cons, depth=max(depth(s), depth(t)), pool=pool,
                  shapes=_shapes(s, t, flex, gens, pool), raised=min(n, 2), generics=gens)


# ---------------------------------------------------------------- generator

def random_problem(rng: random.Random, max_degree: int = 2, max_noms: int = 3,
                   max_flex: int = 2, max_depth: int = 3) -> tuple[list[Var], Term, Term]:
    """A random degree <= 2 problem over constructors a, f, g and base type i."""
    n = rng.randint(0, max_degree)
    k = rng.randint(0, max_flex)
    flex = [Var(x, I) for x in ["X", "Y"][:k]]
    noms = [Nom(j, I) for j in range(rng.randint(0, max_noms))]

    def gen(d: int, bound: int) -> Term:
        leaves: list[Term] = [A] + noms + flex + [Bound(j, I) for j in range(bound)]
        if d == 0 or rng.random() < 0.3:
            return rng.choice(leaves)
        if rng.random() < 0.5:
            return App(F, (gen(d - 1, bound),))
        return App(G, (gen(d - 1, bound), gen(d - 1, bound)))

    body = gen(max_depth, n)
    if rng.random() < 0.6:
        # derive t from the body so that many problems are solvable
        cs = [Nom(max_noms + j, I) for j in range(n)]
        t = _close(body, cs)
        t = _sprinkle(rng, t, flex)
        body = _sprinkle(rng, body, flex)
    else:
        t = gen(max_depth, 0)
    s = body
    for _ in range(n):
        s = Lam(I, s, "y")
    return flex, s, t


def _close(body: Term, cs: list[Nom]) -> Term:
    n = len(cs)

    def go(u: Term) -> Term:
        if isinstance(u, Bound):
            return cs[n - 1 - u.idx]
        if isinstance(u, App):
            return App(u.head, tuple(go(a) for a in u.args))
        return u
    return go(body)


def _sprinkle(rng: random.Random, t: Term, flex: list[Var]) -> Term:
    if not flex or rng.random() < 0.4:
        return t
    x = rng.choice(flex)
    if isinstance(t, App) and rng.random() < 0.7:
        args = list(t.args)
        j = rng.randrange(len(args))
        args[j] = _sprinkle(rng, args[j], flex) if rng.random() < 0.5 else x
        return App(t.head, tuple(args))
    return x
