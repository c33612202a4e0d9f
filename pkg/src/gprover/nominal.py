"""Support, permutations, the permutation-equivalence relation and substitutions."""
from __future__ import annotations

from functools import lru_cache
from itertools import permutations as _perms, product
from typing import Iterable, Mapping

from .syntax import (
    App, Bound, Lam, Nom, Term, Type, Var, abstract, free_vars_ordered, nom_key,
    normalize, reduce_app, subterms, type_of,
)


# ---------------------------------------------------------------- support

def support(t: Term) -> frozenset[Nom]:
    return _support(t)


@lru_cache(maxsize=1 << 16)
def _support(t: Term) -> frozenset[Nom]:
    return frozenset(s for s in subterms(t) if isinstance(s, Nom))


def support_all(ts: Iterable[Term]) -> set[Nom]:
    out: set[Nom] = set()
    for t in ts:
        out |= support(t)
    return out


def sorted_noms(cs: Iterable[Nom]) -> list[Nom]:
    return sorted(cs, key=nom_key)


def support_ordered(t: Term) -> list[Nom]:
    """Support in order of first occurrence (left to right)."""
    seen: dict[Nom, None] = {}
    for s in subterms(t):
        if isinstance(s, Nom):
            seen.setdefault(s)
    return list(seen)


def fresh_noms(tys: list[Type], avoid: Iterable[Nom]) -> list[Nom]:
    """Lowest-index nominal constants of the given types outside avoid, pairwise distinct."""
    used = set(avoid)
    out = []
    for ty in tys:
        i = 0
        while Nom(i, ty) in used:
            i += 1
        c = Nom(i, ty)
        used.add(c)
        out.append(c)
    return out


# ---------------------------------------------------------------- permutations

class Perm:
    """Finite type-preserving bijection on nominal constants."""

    __slots__ = ("map",)

    def __init__(self, mapping: Mapping[Nom, Nom] | None = None) -> None:
        m = {a: b for a, b in (mapping or {}).items() if a != b}
        if len(set(m.values())) != len(m) or set(m.values()) != set(m):
            raise ValueError("not a permutation")
        for a, b in m.items():
            if a.ty != b.ty:
                raise ValueError("permutation must preserve types")
        self.map = m

    @staticmethod
    def swap(a: Nom, b: Nom) -> "Perm":
        return Perm({a: b, b: a})

    @staticmethod
    def complete(partial: Mapping[Nom, Nom]) -> "Perm":
        """Extend an injective partial map to a permutation."""
        m = dict(partial)
        dom, img = set(m), set(m.values())
        loose_img = sorted_noms(img - dom)
        loose_dom = sorted_noms(dom - img)
        for y in loose_img:
            x = next(d for d in loose_dom if d.ty == y.ty)
            loose_dom.remove(x)
            m[y] = x
        return Perm(m)

    def __call__(self, c: Nom) -> Nom:
        return self.map.get(c, c)

    def inverse(self) -> "Perm":
        return Perm({b: a for a, b in self.map.items()})

    def compose(self, other: "Perm") -> "Perm":
        """(self . other)(c) = self(other(c))."""
        keys = set(self.map) | set(other.map)
        return Perm({c: self(other(c)) for c in keys})

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self.map == other.map

    def __hash__(self) -> int:
        return hash(frozenset(self.map.items()))

    def __repr__(self) -> str:
        pairs = ", ".join(f"n{a.idx}->n{b.idx}" for a, b in sorted(self.map.items(), key=lambda p: nom_key(p[0])))
        return f"Perm({pairs})"


def apply_perm(pi: Perm, t: Term) -> Term:
    if not pi.map:
        return t
    if isinstance(t, Nom):
        return pi(t)
    if isinstance(t, Lam):
        return Lam(t.ty, apply_perm(pi, t.body), t.name)
    if isinstance(t, App):
        return App(apply_perm(pi, t.head), tuple(apply_perm(pi, a) for a in t.args))
    return t


def _match_perm(t: Term, u: Term, fwd: dict, bwd: dict) -> bool:
    """Lockstep comparison of t with u, extending the bijection fwd: u-constants -> t-constants."""
    if isinstance(t, Nom):
        if not isinstance(u, Nom) or t.ty != u.ty:
            return False
        a, b = fwd.get(u), bwd.get(t)
        if a is None and b is None:
            fwd[u] = t
            bwd[t] = u
            return True
        return a == t and b == u
    if isinstance(t, Lam):
        return isinstance(u, Lam) and t.ty == u.ty and _match_perm(t.body, u.body, fwd, bwd)
    if isinstance(t, App):
        if not isinstance(u, App) or len(t.args) != len(u.args):
            return False
        if not _match_perm(t.head, u.head, fwd, bwd):
            return False
        return all(_match_perm(a, b, fwd, bwd) for a, b in zip(t.args, u.args))
    return t == u


def perm_equiv(t: Term, u: Term) -> Perm | None:
    """Some pi with t == apply_perm(pi, u), or None."""
    return perm_equiv_many([t], [u])


def perm_equiv_many(ts: list[Term], us: list[Term]) -> Perm | None:
    """A single pi relating the lists pointwise (shared nominal scope)."""
    if len(ts) != len(us):
        return None
    fwd: dict[Nom, Nom] = {}
    bwd: dict[Nom, Nom] = {}
    for t, u in zip(ts, us):
        if not _match_perm(t, u, fwd, bwd):
            return None
    return Perm.complete(fwd)


def equiv(t: Term, u: Term) -> bool:
    return perm_equiv(t, u) is not None


# ---------------------------------------------------------------- substitutions

class Subst:
    """Finite type-preserving map from eigenvariables to canonical terms."""

    __slots__ = ("map",)

    def __init__(self, mapping: Mapping[Var, Term] | Iterable[tuple[Var, Term]] = ()) -> None:
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        m: dict[Var, Term] = {}
        for x, t in items:
            if not isinstance(x, Var):
                raise TypeError("substitution domain must be eigenvariables")
            t = normalize(t)
            if type_of(t) != x.ty:
                raise TypeError(f"ill-typed binding for {x.name}")
            if t != x:
                m[x] = t
        self.map = dict(sorted(m.items(), key=lambda p: p[0].name))

    @property
    def domain(self) -> list[Var]:
        return list(self.map)

    @property
    def range(self) -> list[Term]:
        return list(self.map.values())

    def support(self) -> set[Nom]:
        return support_all(self.map.values())

    def get(self, x: Var) -> Term:
        return self.map.get(x, x)

    def restrict(self, xs: Iterable[Var]) -> "Subst":
        keep = set(xs)
        return Subst({x: t for x, t in self.map.items() if x in keep})

    def range_vars(self) -> list[Var]:
        return free_vars_ordered(self.map.values())

    def __bool__(self) -> bool:
        return bool(self.map)

    def __len__(self) -> int:
        return len(self.map)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subst) and self.map == other.map

    def __hash__(self) -> int:
        return hash(frozenset(self.map.items()))

    def __repr__(self) -> str:
        from .printer import show_subst
        return show_subst(self)


def _replace(t: Term, m: Mapping[Var, Term]) -> Term:
    if isinstance(t, Var):
        return m.get(t, t)
    if isinstance(t, Lam):
        return Lam(t.ty, _replace(t.body, m), t.name)
    if isinstance(t, App):
        h = _replace(t.head, m)
        args = tuple(_replace(a, m) for a in t.args)
        return reduce_app(h, args)
    return t


def ordinary_apply(theta: Subst | Mapping[Var, Term], t: Term) -> Term:
    """t[theta]: capture-avoiding replacement followed by beta reduction."""
    m = theta.map if isinstance(theta, Subst) else theta
    if not m:
        return t
    return _replace(t, m)


def _freshening(supp_t: set[Nom], supp_theta: set[Nom]) -> Perm:
    """Swap each constant of supp_t that clashes with supp_theta for the lowest free one."""
    clash = sorted_noms(supp_t & supp_theta)
    if not clash:
        return Perm()
    targets = fresh_noms([c.ty for c in clash], supp_t | supp_theta)
    return Perm.complete(dict(zip(clash, targets)))


def nca_apply_many(theta: Subst, ts: list[Term]) -> list[Term]:
    """Nominal-capture-avoiding application to terms that share one nominal scope."""
    if not theta:
        return list(ts)
    pi = _freshening(support_all(ts), theta.support())
    return [ordinary_apply(theta, apply_perm(pi, t)) for t in ts]


def nca_apply(theta: Subst, t: Term) -> Term:
    """t{{theta}}."""
    return nca_apply_many(theta, [t])[0]


def perm_subst(pi: Perm, theta: Subst) -> Subst:
    return Subst({x: apply_perm(pi, t) for x, t in theta.map.items()})


def compose(theta: Subst, rho: Subst) -> Subst:
    """theta o rho, so that t[theta o rho] = t[theta][rho]."""
    m = {x: ordinary_apply(rho, t) for x, t in theta.map.items()}
    for y, u in rho.map.items():
        if y not in theta.map:
            m[y] = u
    return Subst(m)


def nca_compose(theta: Subst, rho: Subst) -> Subst:
    """theta . rho: rename theta's support away from rho's, then compose."""
    pi = _freshening(theta.support(), rho.support())
    return compose(perm_subst(pi, theta), rho)


def subst_equiv(theta: Subst, rho: Subst, sigma_vars: Iterable[Var] | None = None) -> bool:
    """theta ~ rho (optionally restricted to sigma_vars): theta = pi.rho for one pi."""
    xs = sorted(set(sigma_vars) if sigma_vars is not None else set(theta.map) | set(rho.map),
                key=lambda v: v.name)
    return perm_equiv_many([theta.get(x) for x in xs], [rho.get(x) for x in xs]) is not None


# ---------------------------------------------------------------- generality

class UndecidableHere(Exception):
    """The matching problem behind <=_Sigma left the pattern fragment."""


def less_general(rho: Subst, theta: Subst, sigma: Iterable[Var]) -> bool:
    """rho <=_Sigma theta: some sigma' gives rho|Sigma ~ (theta|Sigma) . sigma'.

    Decided by matching: theta's range variables (and the Sigma variables it
    leaves alone) are flexible, rho's are rigid.  The nominal constants of
    theta are mapped injectively onto constants of rho or onto fresh ones, and
    the images are abstracted so that sigma' cannot mention them.
    """
    from .unify import NonPattern, pattern_unify_eqs

    xs = sorted(set(sigma), key=lambda v: v.name)
    if not xs:
        return True
    lhs = [theta.get(x) for x in xs]
    rhs = [rho.get(x) for x in xs]
    rigid = free_vars_ordered(rhs)
    flex = free_vars_ordered(lhs)
    used = {v.name for v in rigid} | {v.name for v in flex}
    ren: dict[Var, Term] = {}
    for v in flex:
        ren[v] = Var(_fresh_name(v.name + "_", used), v.ty)
    lhs = [ordinary_apply(ren, t) for t in lhs]
    flex_vars = [r for r in ren.values()]

    src = sorted_noms(support_all(lhs))
    tgt_pool = sorted_noms(support_all(rhs))
    spare = fresh_noms([c.ty for c in src], set(tgt_pool) | set(src))
    options = [[d for d in tgt_pool + [spare[i]] if d.ty == c.ty] for i, c in enumerate(src)]
    for choice in product(*options) if src else [()]:
        if len(set(choice)) != len(choice):
            continue
        # the spare constants are interchangeable; only keep the canonical use
        pi = {c: d for c, d in zip(src, choice)}
        renamed_lhs = [_rename_noms(t, pi) for t in lhs]
        img = list(choice)
        eqs = [(abstract(l, img), abstract(r, img)) for l, r in zip(renamed_lhs, rhs)]
        try:
            if pattern_unify_eqs(eqs, flex_vars, avoid_names=used) is not None:
                return True
        except NonPattern as e:
            raise UndecidableHere(str(e)) from e
    return False


def _rename_noms(t: Term, m: Mapping[Nom, Nom]) -> Term:
    if isinstance(t, Nom):
        return m.get(t, t)
    if isinstance(t, Lam):
        return Lam(t.ty, _rename_noms(t.body, m), t.name)
    if isinstance(t, App):
        return App(_rename_noms(t.head, m), tuple(_rename_noms(a, m) for a in t.args))
    return t


def _fresh_name(base: str, used: set[str]) -> str:
    """Pick base, base1, base2, ... avoiding used, and reserve the choice."""
    name, i = base, 0
    while name in used:
        i += 1
        name = f"{base}{i}"
    used.add(name)
    return name


fresh_name = _fresh_name
