"""Simple types and canonical lambda terms.

Terms use de Bruijn indices for lambda-bound variables.  Every bound index
carries its type, so the type of any subterm can be read off locally.
Canonical terms are beta-normal and eta-long.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator


# ---------------------------------------------------------------- types

@dataclass(frozen=True, slots=True)
class Base:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Arrow:
    arg: "Type"
    res: "Type"

    def __str__(self) -> str:
        left = f"({self.arg})" if isinstance(self.arg, Arrow) else str(self.arg)
        return f"{left} -> {self.res}"


Type = Base | Arrow

PROP = Base("prop")


def arrows(args: Iterable[Type], res: Type) -> Type:
    for a in reversed(list(args)):
        res = Arrow(a, res)
    return res


def split_type(ty: Type) -> tuple[list[Type], Type]:
    args = []
    while isinstance(ty, Arrow):
        args.append(ty.arg)
        ty = ty.res
    return args, ty


def arity(ty: Type) -> int:
    n = 0
    while isinstance(ty, Arrow):
        n += 1
        ty = ty.res
    return n


def mentions_prop(ty: Type) -> bool:
    if isinstance(ty, Arrow):
        return mentions_prop(ty.arg) or mentions_prop(ty.res)
    return ty == PROP


# ---------------------------------------------------------------- terms

@dataclass(frozen=True, slots=True)
class Var:
    """Eigenvariable (or flexible variable in a unification problem)."""
    name: str
    ty: Type


@dataclass(frozen=True, slots=True)
class Const:
    name: str
    ty: Type


@dataclass(frozen=True, slots=True)
class Nom:
    """Nominal constant: member of an infinite per-type family."""
    idx: int
    ty: Type


def nom_key(c: Nom) -> tuple[int, str]:
    return (c.idx, str(c.ty))


@dataclass(frozen=True, slots=True)
class Bound:
    idx: int
    ty: Type


@dataclass(frozen=True, slots=True)
class Lam:
    ty: Type
    body: "Term"
    name: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class App:
    head: "Term"
    args: tuple


Term = Var | Const | Nom | Bound | Lam | App
Atom = (Var, Const, Nom, Bound)


class TypeError_(Exception):
    """Ill-typed term."""


def app(head: Term, *args: Term) -> Term:
    if not args:
        return head
    if isinstance(head, App):
        return App(head.head, head.args + tuple(args))
    return App(head, tuple(args))


def lams(tys: list[Type], body: Term, names: list[str] | None = None) -> Term:
    names = names or ["x"] * len(tys)
    for ty, nm in zip(reversed(tys), reversed(names)):
        body = Lam(ty, body, nm)
    return body


def type_of(t: Term) -> Type:
    if isinstance(t, (Var, Const, Nom, Bound)):
        return t.ty
    if isinstance(t, Lam):
        return Arrow(t.ty, type_of(t.body))
    ty = type_of(t.head)
    for _ in t.args:
        if not isinstance(ty, Arrow):
            raise TypeError_("application of a non-function")
        ty = ty.res
    return ty


def head_args(t: Term) -> tuple[Term, tuple]:
    if isinstance(t, App):
        return t.head, t.args
    return t, ()


# ---------------------------------------------------------------- de Bruijn plumbing

def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if d == 0:
        return t
    if isinstance(t, Bound):
        return Bound(t.idx + d, t.ty) if t.idx >= cutoff else t
    if isinstance(t, Lam):
        return Lam(t.ty, shift(t.body, d, cutoff + 1), t.name)
    if isinstance(t, App):
        return App(shift(t.head, d, cutoff), tuple(shift(a, d, cutoff) for a in t.args))
    return t


def has_loose(t: Term, depth: int = 0) -> bool:
    if isinstance(t, Bound):
        return t.idx >= depth
    if isinstance(t, Lam):
        return has_loose(t.body, depth + 1)
    if isinstance(t, App):
        return has_loose(t.head, depth) or any(has_loose(a, depth) for a in t.args)
    return False


def _inst(t: Term, d: int, u: Term) -> Term:
    """Replace Bound(d) by u (lifted by d), lowering indices above d; reduces redexes."""
    if isinstance(t, Bound):
        if t.idx == d:
            return shift(u, d)
        if t.idx > d:
            return Bound(t.idx - 1, t.ty)
        return t
    if isinstance(t, Lam):
        return Lam(t.ty, _inst(t.body, d + 1, u), t.name)
    if isinstance(t, App):
        h = _inst(t.head, d, u)
        args = tuple(_inst(a, d, u) for a in t.args)
        return reduce_app(h, args)
    return t


def instantiate(lam: Term, u: Term) -> Term:
    """Beta-reduce (lam u) for a canonical abstraction lam."""
    assert isinstance(lam, Lam)
    return _inst(lam.body, 0, u)


def reduce_app(h: Term, args: tuple) -> Term:
    while args:
        if isinstance(h, Lam):
            h = _inst(h.body, 0, args[0])
            args = args[1:]
        elif isinstance(h, App):
            return App(h.head, h.args + args)
        else:
            return App(h, args)
    return h


def beta(t: Term) -> Term:
    if isinstance(t, Lam):
        return Lam(t.ty, beta(t.body), t.name)
    if isinstance(t, App):
        return reduce_app(beta(t.head), tuple(beta(a) for a in t.args))
    return t


def eta_long(t: Term, ty: Type | None = None) -> Term:
    """Eta-expand a beta-normal term of type ty."""
    if ty is None:
        ty = type_of(t)
    if isinstance(ty, Arrow):
        if isinstance(t, Lam):
            return Lam(t.ty, eta_long(t.body, ty.res), t.name)
        var = eta_long(Bound(0, ty.arg), ty.arg)
        return Lam(ty.arg, eta_long(reduce_app(shift(t, 1), (var,)), ty.res), "x")
    h, args = head_args(t)
    if not args:
        return t
    hty = type_of(h)
    out = []
    for a in args:
        out.append(eta_long(a, hty.arg))
        hty = hty.res
    return App(h, tuple(out))


def normalize(t: Term) -> Term:
    return eta_long(beta(t))


def eta_var(t: Term) -> int | None:
    """If t is an eta-expanded bound variable, return its index, else None."""
    k = 0
    while isinstance(t, Lam):
        k += 1
        t = t.body
    h, args = head_args(t)
    if not isinstance(h, Bound) or h.idx < k or len(args) != k:
        return None
    for j, a in enumerate(args):
        if eta_var(a) != k - 1 - j:
            return None
    return h.idx - k


def eta_contract(t: Term) -> Term | None:
    """The eta-short form of an abstraction, or None if it is not an eta-redex."""
    if not isinstance(t, Lam):
        return None
    body = t.body
    if isinstance(body, Lam):
        body = eta_contract(body)
        if body is None:
            return None
    h, args = head_args(body)
    if not args or eta_var(args[-1]) != 0:
        return None
    rest = App(h, args[:-1]) if len(args) > 1 else h
    if _mentions_zero(rest, 0):
        return None
    return shift(rest, -1)


def _mentions_zero(t: Term, depth: int) -> bool:
    if isinstance(t, Bound):
        return t.idx == depth
    if isinstance(t, Lam):
        return _mentions_zero(t.body, depth + 1)
    if isinstance(t, App):
        return _mentions_zero(t.head, depth) or any(_mentions_zero(a, depth) for a in t.args)
    return False


# ---------------------------------------------------------------- traversal

def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Lam):
        yield from subterms(t.body)
    elif isinstance(t, App):
        yield from subterms(t.head)
        for a in t.args:
            yield from subterms(a)


def free_vars(t: Term) -> set[Var]:
    return {s for s in subterms(t) if isinstance(s, Var)}


def free_vars_ordered(ts: Iterable[Term]) -> list[Var]:
    seen: dict[Var, None] = {}
    for t in ts:
        for s in subterms(t):
            if isinstance(s, Var):
                seen.setdefault(s)
    return list(seen)


def consts(t: Term) -> set[Const]:
    return {s for s in subterms(t) if isinstance(s, Const)}


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def depth(t: Term) -> int:
    """Nesting depth of applications, ignoring binders."""
    if isinstance(t, Lam):
        return depth(t.body)
    if isinstance(t, App):
        return 1 + max(depth(a) for a in t.args)
    return 0


def map_atoms(t: Term, f) -> Term:
    """Rebuild t, replacing each Var/Const/Nom leaf by f(leaf)."""
    if isinstance(t, Lam):
        return Lam(t.ty, map_atoms(t.body, f), t.name)
    if isinstance(t, App):
        return App(map_atoms(t.head, f), tuple(map_atoms(a, f) for a in t.args))
    if isinstance(t, Bound):
        return t
    return f(t)


def abstract(t: Term, atoms: list[Term], names: list[str] | None = None) -> Term:
    """Build lambda atoms. t, turning each listed Var/Nom leaf into a bound variable."""
    n = len(atoms)
    if n == 0:
        return t
    pos = {a: i for i, a in enumerate(atoms)}

    def go(u: Term, d: int) -> Term:
        if isinstance(u, Lam):
            return Lam(u.ty, go(u.body, d + 1), u.name)
        if isinstance(u, App):
            return App(go(u.head, d), tuple(go(a, d) for a in u.args))
        if isinstance(u, Bound):
            return Bound(u.idx + n, u.ty) if u.idx >= d else u
        i = pos.get(u)
        if i is None:
            return u
        return Bound(d + n - 1 - i, u.ty)

    body = go(t, 0)
    return lams([type_of(a) for a in atoms], body, names or [_hint(a) for a in atoms])


def _hint(a: Term) -> str:
    if isinstance(a, Var):
        return a.name.lower()
    return "z"


def strip_lams(t: Term) -> tuple[list[Type], Term]:
    tys = []
    while isinstance(t, Lam):
        tys.append(t.ty)
        t = t.body
    return tys, t


# ---------------------------------------------------------------- typing

class Signature:
    """Declared sorts and constants plus the per-type nominal allocator."""

    def __init__(self) -> None:
        self.sorts: set[str] = {"prop"}
        self.consts: dict[str, Const] = {}
        self._next_nom: dict[Type, int] = {}

    def add_sort(self, name: str) -> None:
        if name in self.sorts:
            raise ValueError(f"sort {name} already declared")
        self.sorts.add(name)

    def add_const(self, name: str, ty: Type) -> Const:
        if name in self.consts:
            raise ValueError(f"constant {name} already declared")
        self.check_type(ty)
        args, _ = split_type(ty)
        if any(mentions_prop(a) for a in args):
            raise TypeError_(f"prop may not occur in an argument type of {name}")
        c = Const(name, ty)
        self.consts[name] = c
        return c

    def check_type(self, ty: Type) -> None:
        if isinstance(ty, Arrow):
            self.check_type(ty.arg)
            self.check_type(ty.res)
        elif ty.name not in self.sorts:
            raise TypeError_(f"unknown sort {ty.name}")

    def fresh_nom(self, ty: Type, avoid: Iterable[Nom] = ()) -> Nom:
        """Allocate a never-before-used nominal constant of type ty."""
        avoid_idx = {c.idx for c in avoid if c.ty == ty}
        i = self._next_nom.get(ty, 0)
        while i in avoid_idx:
            i += 1
        self._next_nom[ty] = i + 1
        return Nom(i, ty)


def typecheck(t: Term, ctx: tuple[Type, ...] = (), sig: Signature | None = None) -> Type:
    """Infer the type of t; ctx lists the types of enclosing binders, innermost first."""
    if isinstance(t, Bound):
        if t.idx >= len(ctx):
            raise TypeError_(f"unbound index {t.idx}")
        if ctx[t.idx] != t.ty:
            raise TypeError_("bound variable annotated with the wrong type")
        return t.ty
    if isinstance(t, Const):
        if sig is not None and t.name in sig.consts and sig.consts[t.name] != t:
            raise TypeError_(f"constant {t.name} used at the wrong type")
        return t.ty
    if isinstance(t, (Var, Nom)):
        if sig is not None:
            sig.check_type(t.ty)
        if isinstance(t, Nom) and mentions_prop(t.ty):
            raise TypeError_("nominal constants may not have prop in their type")
        return t.ty
    if isinstance(t, Lam):
        return Arrow(t.ty, typecheck(t.body, (t.ty,) + ctx, sig))
    ty = typecheck(t.head, ctx, sig)
    for a in t.args:
        if not isinstance(ty, Arrow):
            raise TypeError_("application of a non-function")
        aty = typecheck(a, ctx, sig)
        if aty != ty.arg:
            raise TypeError_(f"argument has type {aty}, expected {ty.arg}")
        ty = ty.res
    return ty


def is_canonical(t: Term) -> bool:
    return normalize(t) == t
