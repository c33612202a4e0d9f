"""Higher-order pattern unification over canonical terms.

Flexible variables may only be applied to distinct bound variables; any other
flexible occurrence raises NonPattern.  Solutions are most general unifiers.
"""
from __future__ import annotations

from typing import Iterable

from .nominal import Subst, fresh_name, ordinary_apply, sorted_noms, support_all
from .syntax import (
    App, Bound, Lam, Nom, Term, Type, Var, abstract, arrows, eta_long, eta_var,
    free_vars, head_args, split_type, strip_lams, lams,
)


class NonPattern(Exception):
    """A flexible variable is applied outside the pattern fragment."""


class _Fail(Exception):
    pass


class _Restart(Exception):
    pass


class _Unifier:
    def __init__(self, flex: Iterable[Var], avoid_names: Iterable[str]) -> None:
        self.flex = set(flex)
        self.used = set(avoid_names) | {v.name for v in self.flex}
        self.sol: dict[Var, Term] = {}

    # -- bookkeeping

    def fresh(self, base: Var, ty: Type) -> Var:
        v = Var(fresh_name(base.name.rstrip("0123456789_") or "H", self.used), ty)
        self.flex.add(v)
        return v

    def bind(self, x: Var, t: Term) -> None:
        if x in free_vars(t):
            raise _Fail()
        one = {x: t}
        self.sol = {y: ordinary_apply(one, u) for y, u in self.sol.items()}
        self.sol[x] = t

    def is_flex(self, h: Term) -> bool:
        return isinstance(h, Var) and h in self.flex

    def pattern_args(self, args: tuple, k: int, where: Var) -> list[int]:
        out = []
        for a in args:
            i = eta_var(a)
            if i is None:
                raise NonPattern(f"{where.name} is applied to a non-variable argument")
            if i in out:
                raise NonPattern(f"{where.name} is applied to a repeated argument")
            out.append(i)
        return out

    # -- main loop

    def run(self, eqs: list[tuple[Term, Term]]) -> dict[Var, Term]:
        todo = list(eqs)
        while todo:
            s, t = todo.pop()
            s = ordinary_apply(self.sol, s)
            t = ordinary_apply(self.sol, t)
            try:
                todo.extend(self.step(s, t))
            except _Restart:
                todo.append((s, t))
        return self.sol

    def step(self, s: Term, t: Term) -> list[tuple[Term, Term]]:
        if s == t:
            return []
        tys_s, bs = strip_lams(s)
        tys_t, bt = strip_lams(t)
        if len(tys_s) != len(tys_t):
            raise _Fail()
        tys = tys_s
        k = len(tys)
        hs, as_ = head_args(bs)
        ht, at = head_args(bt)
        fs, ft = self.is_flex(hs), self.is_flex(ht)
        if fs and ft:
            self.flex_flex(hs, self.pattern_args(as_, k, hs), ht, self.pattern_args(at, k, ht), k)
            return []
        if fs:
            self.flex_rigid(hs, self.pattern_args(as_, k, hs), bt, k)
            return []
        if ft:
            self.flex_rigid(ht, self.pattern_args(at, k, ht), bs, k)
            return []
        if hs != ht or len(as_) != len(at):
            raise _Fail()
        return [(lams(tys, a), lams(tys, b)) for a, b in zip(as_, at)]

    def flex_flex(self, f: Var, fa: list[int], g: Var, ga: list[int], k: int) -> None:
        f_tys, res = split_type(f.ty)
        if f == g:
            keep = [j for j, (a, b) in enumerate(zip(fa, ga)) if a == b]
            if len(keep) == len(fa):
                return
            h = self.fresh(f, arrows([f_tys[j] for j in keep], res))
            self.bind(f, _project(f_tys, h, keep))
            return
        g_tys, _ = split_type(g.ty)
        common = [i for i in fa if i in ga]
        h = self.fresh(f, arrows([f_tys[fa.index(i)] for i in common], res))
        self.bind(f, _project(f_tys, h, [fa.index(i) for i in common]))
        self.bind(g, _project(g_tys, h, [ga.index(i) for i in common]))

    def flex_rigid(self, f: Var, fa: list[int], r: Term, k: int) -> None:
        if f in free_vars(r):
            raise _Fail()
        self.prune(r, set(fa), 0)
        m = len(fa)
        pos = {loc: j for j, loc in enumerate(fa)}

        def go(u: Term, d: int) -> Term:
            if isinstance(u, Bound):
                if u.idx < d:
                    return u
                j = pos.get(u.idx - d)
                if j is None:
                    raise _Fail()
                return Bound(m - 1 - j + d, u.ty)
            if isinstance(u, Lam):
                return Lam(u.ty, go(u.body, d + 1), u.name)
            if isinstance(u, App):
                return App(go(u.head, d), tuple(go(a, d) for a in u.args))
            return u

        f_tys, _ = split_type(f.ty)
        self.bind(f, eta_long(lams(f_tys, go(r, 0))))

    def prune(self, r: Term, allowed: set[int], d: int) -> None:
        """Remove, from flexible subterms of r, arguments that are not allowed locals."""
        tys, body = strip_lams(r)
        d += len(tys)
        h, args = head_args(body)
        if self.is_flex(h):
            idx = self.pattern_args(args, d, h)
            keep = [j for j, i in enumerate(idx) if i < d or (i - d) in allowed]
            if len(keep) != len(idx):
                h_tys, res = split_type(h.ty)
                g = self.fresh(h, arrows([h_tys[j] for j in keep], res))
                self.bind(h, _project(h_tys, g, keep))
                raise _Restart()
            return
        if isinstance(h, Bound) and h.idx >= d and (h.idx - d) not in allowed:
            raise _Fail()
        for a in args:
            self.prune(a, allowed, d)


def _project(tys: list[Type], h: Var, keep: list[int]) -> Term:
    """lambda z1..zn. h z_keep."""
    n = len(tys)
    args = tuple(eta_long(Bound(n - 1 - j, tys[j])) for j in keep)
    body = App(h, args) if args else h
    return eta_long(lams(tys, body))


def pattern_unify_eqs(eqs: list[tuple[Term, Term]], flex: Iterable[Var],
                      avoid_names: Iterable[str] = ()) -> Subst | None:
    """Most general unifier of all equations; nominal constants are rigid constants."""
    flex = list(flex)
    names = set(avoid_names)
    for s, t in eqs:
        names |= {v.name for v in free_vars(s) | free_vars(t)}
    u = _Unifier(flex, names)
    try:
        sol = u.run(list(eqs))
    except _Fail:
        return None
    return Subst({x: t for x, t in sol.items() if x in set(flex)})


def pattern_unify(s: Term, t: Term, flex: Iterable[Var] | None = None,
                  avoid_names: Iterable[str] = ()) -> Subst | None:
    """Unify s and t treating every nominal constant as locally bound.

    Solutions may not mention nominal constants except through the arguments
    of a flexible variable, which matches their reading as nabla-bound names.
    """
    if flex is None:
        flex = sorted(free_vars(s) | free_vars(t), key=lambda v: v.name)
    noms = sorted_noms(support_all([s, t]))
    return pattern_unify_eqs([(abstract(s, noms), abstract(t, noms))], flex, avoid_names)
