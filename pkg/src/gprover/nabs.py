"""Deciding nominal abstraction and computing complete solution sets."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable

from .nominal import (
    Subst, fresh_name, fresh_noms, nca_apply_many, nca_compose, ordinary_apply,
    perm_equiv_many, sorted_noms, support, support_all,
)
from .syntax import (
    App, Bound, Lam, Nom, Term, Var, abstract, arity, arrows, eta_long, free_vars, split_type,
    subterms, type_of,
)
from .unify import NonPattern, pattern_unify_eqs


@dataclass(frozen=True)
class NabsProblem:
    left: Term
    right: Term
    flex: tuple[Var, ...] = ()

    @property
    def degree(self) -> int:
        return arity(type_of(self.left)) - arity(type_of(self.right))


@dataclass
class SolutionSet:
    solutions: list[Subst] = field(default_factory=list)
    provenance: list[tuple[Nom, ...]] = field(default_factory=list)

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self) -> int:
        return len(self.solutions)


# ---------------------------------------------------------------- holds

def holds(s: Term, t: Term, n: int | None = None) -> bool:
    """s |> t: s is lambda y1..yn.u with u[c/y] = t for distinct c not in supp(u)."""
    if n is None:
        n = arity(type_of(s)) - arity(type_of(t))
    if n < 0:
        raise TypeError("nominal abstraction of negative degree")
    u = s
    for _ in range(n):
        if not isinstance(u, Lam):
            raise TypeError("left operand is not an abstraction of the right degree")
        u = u.body
    if n == 0:
        return u == t
    m: dict[int, Nom] = {}
    if not _match_abs(u, t, 0, n, m):
        return False
    cs = list(m.values())
    if len(set(cs)) != len(cs):
        return False
    supp_u = support(u)
    return not any(c in supp_u for c in cs)


def _match_abs(u: Term, t: Term, d: int, n: int, m: dict[int, Nom]) -> bool:
    if isinstance(u, Bound):
        if u.idx >= d:
            k = u.idx - d
            if not isinstance(t, Nom) or t.ty != u.ty:
                return False
            prev = m.setdefault(k, t)
            return prev == t
        return u == t
    if isinstance(u, Lam):
        return isinstance(t, Lam) and u.ty == t.ty and _match_abs(u.body, t.body, d + 1, n, m)
    if isinstance(u, App):
        if not isinstance(t, App) or len(u.args) != len(t.args):
            return False
        if not _match_abs(u.head, t.head, d, n, m):
            return False
        return all(_match_abs(a, b, d, n, m) for a, b in zip(u.args, t.args))
    return u == t


def is_solution(theta: Subst, pb: NabsProblem) -> bool:
    s, t = nca_apply_many(theta, [pb.left, pb.right])
    return holds(s, t, pb.degree)


# ---------------------------------------------------------------- csnas

def csnas(flex: Iterable[Var], s: Term, t: Term, avoid_names: Iterable[str] = ()) -> SolutionSet:
    """Complete set of solutions of s |> t for the flexible variables flex.

    Raises every flexible variable over n fresh nominal constants, then for
    each ordered choice of constants to abstract from the right-hand side
    solves a pattern unification problem in which all nominal constants are
    bound.
    """
    flex = sorted(set(flex), key=lambda v: v.name)
    s_tys, _ = split_type(type_of(s))
    n = arity(type_of(s)) - arity(type_of(t))
    if n < 0:
        raise TypeError("nominal abstraction of negative degree")
    tau = s_tys[:n]
    used = set(avoid_names) | {v.name for v in flex} | {v.name for v in free_vars(s) | free_vars(t)}
    cs = fresh_noms(tau, support_all([s, t]))

    raised: dict[Var, Var] = {}
    sigma_map: dict[Var, Term] = {}
    orig = {v.name for v in free_vars(s) | free_vars(t)}
    for h in flex:
        if n == 0:
            raised[h] = h
            continue
        h1 = Var(fresh_name(h.name, used), _raise_ty(tau, h.ty))
        raised[h] = h1
        sigma_map[h] = eta_long(App(h1, tuple(eta_long(c) for c in cs)) if cs else h1)
    sigma = Subst(sigma_map)
    s1 = ordinary_apply(sigma, s)
    t1 = ordinary_apply(sigma, t)

    pool = sorted_noms(support(t1) | set(cs))
    all_noms = support_all([s1, t1])
    out = SolutionSet()
    seen: list[list[Term]] = []
    for sel in permutations(pool, n):
        if any(a.ty != ty for a, ty in zip(sel, tau)):
            continue
        outer = sorted_noms((all_noms | set(sel)))
        right_inner = abstract(t1, list(sel))
        lhs = abstract(s1, outer)
        rhs = abstract(right_inner, outer)
        try:
            rho = pattern_unify_eqs([(lhs, rhs)], list(raised.values()), avoid_names=used)
        except NonPattern as e:
            raise NonPattern(f"{e} (selection {' '.join(f'n{a.idx}' for a in sel)})") from e
        if rho is None:
            continue
        theta = _prune_spare(nca_compose(sigma, rho).restrict(flex), set(cs), used)
        key = _canon(theta, flex, orig)
        if any(perm_equiv_many(key, k) is not None for k in seen):
            continue
        seen.append(key)
        if __debug__:
            assert is_solution(theta, NabsProblem(s, t, tuple(flex))), "unsound csnas element"
        out.solutions.append(theta)
        out.provenance.append(tuple(sel))
    return out


def _prune_spare(theta: Subst, spare: set[Nom], used: set[str]) -> Subst:
    """Drop arguments of solver variables that are always a raising constant occurring nowhere else.

    Such a dependency is vacuous, so the pruned substitution is a more general
    solution of the same problem."""
    if not spare:
        return theta
    # a constant that also occurs outside such argument slots ties bindings together
    total: dict[Nom, int] = {}
    as_arg: dict[Nom, int] = {}
    for t in theta.range:
        for u in subterms(t):
            if isinstance(u, Nom) and u in spare:
                total[u] = total.get(u, 0) + 1
            h, args = _spine(u)
            if isinstance(u, App) and isinstance(h, Var):
                for a in args:
                    if isinstance(_strip(a), Nom) and _strip(a) in spare:
                        as_arg[_strip(a)] = as_arg.get(_strip(a), 0) + 1
    spare = {c for c in spare if total.get(c, 0) == as_arg.get(c, 0)}
    if not spare:
        return theta
    keep: dict[Var, list[bool]] = {}

    def scan(t: Term) -> None:
        h, args = _spine(t)
        if isinstance(h, Var):
            mask = keep.setdefault(h, [False] * len(args))
            for j, a in enumerate(args):
                if not (isinstance(_strip(a), Nom) and _strip(a) in spare):
                    mask[j] = True
        for a in args:
            scan(a)

    for t in theta.range:
        scan(t)
    rho: dict[Var, Term] = {}
    for v, mask in keep.items():
        if all(mask) or v in theta.map:
            continue
        tys, res = split_type(v.ty)
        tys = tys[:len(mask)]
        rest = arrows(split_type(v.ty)[0][len(mask):], res)
        v2 = Var(fresh_name(v.name, used), arrows([ty for ty, k in zip(tys, mask) if k], rest))
        used.add(v2.name)
        n = len(tys)
        kept = tuple(eta_long(Bound(n - 1 - j, ty)) for j, (ty, k) in enumerate(zip(tys, mask)) if k)
        lam: Term = eta_long(App(v2, kept) if kept else v2)
        for ty in reversed(tys):
            lam = Lam(ty, lam, "x")
        rho[v] = lam
    if not rho:
        return theta
    return Subst({x: ordinary_apply(rho, t) for x, t in theta.map.items()})


def _spine(t: Term):
    while isinstance(t, Lam):
        t = t.body
    if isinstance(t, App):
        return t.head, t.args
    return t, ()


def _strip(t: Term) -> Term:
    while isinstance(t, Lam):
        t = t.body
    return t


def _raise_ty(tau, ty):
    from .syntax import arrows
    return arrows(tau, ty)


def _canon(theta: Subst, flex: list[Var], orig: set[str]) -> list[Term]:
    """Range of theta over flex with solver-introduced variables renamed canonically."""
    rng = [theta.get(x) for x in flex]
    ren: dict[Var, Term] = {}
    i = 0
    for t in rng:
        for v in sorted(free_vars(t), key=lambda v: v.name):
            if v not in ren and v.name not in orig:
                ren[v] = Var(f"?{i}", v.ty)
                i += 1
    return [ordinary_apply(ren, t) for t in rng]


def signature_after(sigma_vars: Iterable[Var], theta: Subst) -> list[Var]:
    """Sigma theta: drop the domain of theta, add the variables of its range."""
    keep = [v for v in sigma_vars if v not in theta.map]
    for v in theta.range_vars():
        if v not in keep:
            keep.append(v)
    return keep
