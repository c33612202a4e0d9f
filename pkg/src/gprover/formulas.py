"""Formulas are canonical terms of type prop built from logical constants."""
from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    PROP, App, Arrow, Const, Lam, Term, Type, arity, arrows, eta_long, head_args,
    instantiate, mentions_prop, split_type, type_of,
)

TOP = Const("true", PROP)
BOT = Const("false", PROP)
_BIN = Arrow(PROP, Arrow(PROP, PROP))
AND = Const("/\\", _BIN)
OR = Const("\\/", _BIN)
IMP = Const("=>", _BIN)
QUANTIFIERS = ("forall", "exists", "nabla")
LOGICAL = {"true", "false", "/\\", "\\/", "=>", "|>", *QUANTIFIERS}


def quant_const(q: str, ty: Type) -> Const:
    if mentions_prop(ty):
        raise TypeError(f"cannot quantify over a type mentioning prop ({ty})")
    return Const(q, Arrow(Arrow(ty, PROP), PROP))


def nabs_const(s_ty: Type, t_ty: Type) -> Const:
    return Const("|>", Arrow(s_ty, Arrow(t_ty, PROP)))


def mk_and(a: Term, b: Term) -> Term:
    return App(AND, (a, b))


def mk_or(a: Term, b: Term) -> Term:
    return App(OR, (a, b))


def mk_imp(a: Term, b: Term) -> Term:
    return App(IMP, (a, b))


def mk_quant(q: str, lam: Lam) -> Term:
    return App(quant_const(q, lam.ty), (lam,))


def mk_nabs(s: Term, t: Term) -> Term:
    return App(nabs_const(type_of(s), type_of(t)), (s, t))


def mk_eq(s: Term, t: Term) -> Term:
    return mk_nabs(s, t)


def mk_not(a: Term) -> Term:
    return mk_imp(a, BOT)


def conj(fs: list[Term]) -> Term:
    if not fs:
        return TOP
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = mk_and(f, out)
    return out


def disj(fs: list[Term]) -> Term:
    if not fs:
        return BOT
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = mk_or(f, out)
    return out


@dataclass(frozen=True)
class View:
    """Top-level shape of a formula."""
    kind: str                 # top bot and or imp forall exists nabla nabs atom
    parts: tuple = ()
    const: Const | None = None


def view(f: Term) -> View:
    h, args = head_args(f)
    if h == TOP:
        return View("top")
    if h == BOT:
        return View("bot")
    if isinstance(h, Const):
        if h.name == "/\\" and len(args) == 2:
            return View("and", args)
        if h.name == "\\/" and len(args) == 2:
            return View("or", args)
        if h.name == "=>" and len(args) == 2:
            return View("imp", args)
        if h.name in QUANTIFIERS and len(args) == 1:
            return View(h.name, args)
        if h.name == "|>" and len(args) == 2:
            return View("nabs", args)
        return View("atom", args, h)
    return View("atom", args, None)


def degree(s: Term, t: Term) -> int:
    return arity(type_of(s)) - arity(type_of(t))


def body_of(q: Term) -> Lam:
    v = view(q)
    assert v.kind in QUANTIFIERS
    return v.parts[0]


def open_quant(q: Term, witness: Term) -> Term:
    return instantiate(body_of(q), witness)


def pred_of(f: Term) -> Const | None:
    v = view(f)
    return v.const if v.kind == "atom" else None


def check_nabs_shape(s_ty: Type, t_ty: Type) -> int:
    args, _ = split_type(s_ty)
    n = arity(s_ty) - arity(t_ty)
    if n < 0 or arrows(args[n:], split_type(s_ty)[1]) != t_ty:
        raise TypeError(f"nominal abstraction operands of types {s_ty} and {t_ty} do not fit")
    return n
