"""Surface syntax: lexing, parsing, type inference and the source-file model.

    % comment
    Kind tm, tp type.
    Type app tm -> tm -> tm.
    Define inductive member : a -> alist -> prop by
      member X (X :: L) ;
      member X (Y :: L) := member X L.
    Theorem name : forall X, member X (X :: nil).
    intros. search.
    Qed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from .defs import Clause, DefTable, make_clause, stratify
from .formulas import QUANTIFIERS, check_nabs_shape
from .syntax import (
    PROP, App, Arrow, Base, Bound, Const, Lam, Nom, Signature, Term, Type, Var, mentions_prop,
    normalize,
)


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0) -> None:
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.msg, self.line, self.col = msg, line, col


# ---------------------------------------------------------------- lexer

@dataclass(frozen=True)
class Tok:
    kind: str      # id, sym, eof
    text: str
    line: int
    col: int
    pos: int


_SYMS = [":=", "::", "->", "/\\", "\\/", "=>", "|>", "\\", "(", ")", ",", ".", ":", ";", "=", "_"]
_TOKEN = re.compile(r"(?P<ws>\s+)|(?P<comment>%[^\n]*)|(?P<id>[^\W\d_][\w'?]*|\d+)|(?P<sym>"
                    + "|".join(re.escape(s) for s in _SYMS) + ")", re.UNICODE)


def lex(text: str) -> list[Tok]:
    out: list[Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind in ("id", "sym"):
            out.append(Tok(kind, m.group(), line, pos - line_start + 1, pos))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Tok("eof", "", line, pos - line_start + 1, pos))
    return out


# ---------------------------------------------------------------- surface terms

@dataclass(frozen=True)
class SId:
    name: str
    tok: Tok


@dataclass(frozen=True)
class SApp:
    head: Any
    args: tuple


@dataclass(frozen=True)
class SLam:
    name: str
    ty: Type | None
    body: Any


@dataclass(frozen=True)
class SQuant:
    q: str
    name: str
    ty: Type | None
    body: Any


@dataclass(frozen=True)
class SBin:
    op: str
    left: Any
    right: Any
    tok: Tok


@dataclass(frozen=True)
class SHole:
    tok: Tok


KEYWORDS = {"forall", "exists", "nabla", "true", "false"}
BINOPS = {"=>": (1, "right"), "\\/": (2, "right"), "/\\": (3, "right"), "=": (4, None),
          "|>": (4, None), "::": (5, "right")}


class Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.toks = lex(text)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def advance(self) -> Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def ident(self) -> Tok:
        if self.tok.kind != "id":
            self.error(f"expected an identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, msg: str, tok: Tok | None = None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col)

    # types
    def type_(self) -> Type:
        left = self.type_atom()
        if self.at("->"):
            self.advance()
            return Arrow(left, self.type_())
        return left

    def type_atom(self) -> Type:
        if self.at("("):
            self.advance()
            ty = self.type_()
            self.expect(")")
            return ty
        return Base(self.ident().text)

    # terms
    def term(self, level: int = 1):
        if self.starts_binder():
            return self.binder_form()
        left = self.app()
        while self.tok.kind == "sym" and self.tok.text in BINOPS:
            op = self.tok.text
            prec, assoc = BINOPS[op]
            if prec < level:
                break
            optok = self.advance()
            right = self.term(prec + 1 if assoc != "right" else prec)
            left = SBin(op, left, right, optok)
            if assoc is None and self.tok.text in BINOPS and BINOPS[self.tok.text][0] == prec:
                self.error(f"{op} is not associative; add parentheses")
        return left

    def starts_binder(self) -> bool:
        t = self.tok
        if t.kind == "id" and t.text in QUANTIFIERS:
            return True
        if t.kind == "id" and self.peek().text == "\\":
            return True
        if t.text == "(" and self.peek().kind == "id" and self.peek(2).text == ":":
            j = self.i
            depth = 0
            while j < len(self.toks):
                if self.toks[j].text == "(":
                    depth += 1
                elif self.toks[j].text == ")":
                    depth -= 1
                    if depth == 0:
                        return self.toks[j + 1].text == "\\"
                j += 1
        return False

    def binder_form(self):
        t = self.tok
        if t.kind == "id" and t.text in QUANTIFIERS:
            self.advance()
            binders = self.binders()
            self.expect(",")
            body = self.term()
            for name, ty in reversed(binders):
                body = SQuant(t.text, name, ty, body)
            return body
        if self.at("("):
            self.advance()
            name = self.ident().text
            self.expect(":")
            ty = self.type_()
            self.expect(")")
        else:
            name, ty = self.ident().text, None
        self.expect("\\")
        return SLam(name, ty, self.term())

    def binders(self) -> list[tuple[str, Type | None]]:
        out = []
        while True:
            if self.at("("):
                self.advance()
                names = [self.ident().text]
                while self.tok.kind == "id":
                    names.append(self.ident().text)
                self.expect(":")
                ty = self.type_()
                self.expect(")")
                out += [(n, ty) for n in names]
            elif self.tok.kind == "id":
                out.append((self.ident().text, None))
            else:
                break
        if not out:
            self.error("expected a binder")
        return out

    def app(self):
        head = self.atom()
        args = []
        while True:
            if self.starts_binder() and not (self.tok.kind == "id" and self.tok.text in QUANTIFIERS):
                args.append(self.binder_form())
                break
            if self.tok.kind == "id" and self.tok.text not in QUANTIFIERS or self.at("(") or self.at("_"):
                args.append(self.atom())
            else:
                break
        return SApp(head, tuple(args)) if args else head

    def atom(self):
        if self.at("("):
            self.advance()
            t = self.term()
            self.expect(")")
            return t
        if self.at("_"):
            return SHole(self.advance())
        t = self.ident()
        if t.text in QUANTIFIERS:
            self.error(f"unexpected {t.text}", t)
        return SId(t.text, t)


# ---------------------------------------------------------------- type inference

class TMeta:
    _n = 0

    def __init__(self) -> None:
        TMeta._n += 1
        self.id = TMeta._n

    def __repr__(self) -> str:
        return f"?t{self.id}"


class Elab:
    """Infers types for a surface term and builds the canonical core term."""

    def __init__(self, sig: Signature, env_vars: dict[str, Var] | None = None,
                 clause_mode: bool = False, extra_consts: dict[str, Const] | None = None) -> None:
        self.sig = sig
        self.env_vars = env_vars or {}
        self.clause_mode = clause_mode
        self.extra = extra_consts or {}
        self.sub: dict[int, Type] = {}
        self.clause_vars: dict[str, Var] = {}
        self.nabs_checks: list[tuple[Term, Term, Tok]] = []
        self.holes: list[tuple[Var, Tok]] = []

    # types
    def resolve(self, ty):
        while isinstance(ty, TMeta) and ty.id in self.sub:
            ty = self.sub[ty.id]
        return ty

    def zonk_ty(self, ty, tok: Tok | None = None, what: str = "a binder"):
        ty = self.resolve(ty)
        if isinstance(ty, TMeta):
            raise ParseError(f"cannot infer the type of {what}; add an annotation",
                             *(tok.line, tok.col) if tok else (0, 0))
        if isinstance(ty, Arrow):
            return Arrow(self.zonk_ty(ty.arg, tok, what), self.zonk_ty(ty.res, tok, what))
        return ty

    def occurs(self, m: TMeta, ty) -> bool:
        ty = self.resolve(ty)
        if isinstance(ty, TMeta):
            return ty.id == m.id
        if isinstance(ty, Arrow):
            return self.occurs(m, ty.arg) or self.occurs(m, ty.res)
        return False

    def unify(self, a, b, tok: Tok) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if isinstance(a, TMeta) and isinstance(b, TMeta) and a.id == b.id:
            return
        if isinstance(a, TMeta):
            if self.occurs(a, b):
                raise ParseError("cyclic type", tok.line, tok.col)
            self.sub[a.id] = b
            return
        if isinstance(b, TMeta):
            self.unify(b, a, tok)
            return
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.arg, b.arg, tok)
            self.unify(a.res, b.res, tok)
            return
        if a != b:
            raise ParseError(f"type mismatch: {self.show_ty(a)} versus {self.show_ty(b)}",
                             tok.line, tok.col)

    def show_ty(self, ty) -> str:
        ty = self.resolve(ty)
        if isinstance(ty, Arrow):
            left = self.show_ty(ty.arg)
            if isinstance(self.resolve(ty.arg), Arrow):
                left = f"({left})"
            return f"{left} -> {self.show_ty(ty.res)}"
        return str(ty)

    # inference: returns (pre-term with possibly-meta types, type)
    def infer(self, s, env: list[tuple[str, Any]]):
        if isinstance(s, SId):
            return self.ident(s, env)
        if isinstance(s, SHole):
            ty = TMeta()
            v = Var(f"_{len(self.holes)}", ty)
            self.holes.append((v, s.tok))
            return v, ty
        if isinstance(s, SApp):
            h, hty = self.infer(s.head, env)
            args = []
            for a in s.args:
                at, aty = self.infer(a, env)
                res = TMeta()
                self.unify(hty, Arrow(aty, res), _tok_of(a) or _tok_of(s.head))
                hty = res
                args.append(at)
            return App(h, tuple(args)), hty
        if isinstance(s, SLam):
            ty = s.ty if s.ty is not None else TMeta()
            if s.ty is not None:
                self.sig.check_type(s.ty)
            body, bty = self.infer(s.body, [(s.name, ty)] + env)
            return Lam(ty, body, s.name), Arrow(ty, bty)
        if isinstance(s, SQuant):
            ty = s.ty if s.ty is not None else TMeta()
            if s.ty is not None:
                self.sig.check_type(s.ty)
            body, bty = self.infer(s.body, [(s.name, ty)] + env)
            tok = _tok_of(s.body)
            self.unify(bty, PROP, tok)
            c = Const(s.q, Arrow(Arrow(ty, PROP), PROP))
            return App(c, (Lam(ty, body, s.name),)), PROP
        if isinstance(s, SBin):
            l, lty = self.infer(s.left, env)
            r, rty = self.infer(s.right, env)
            if s.op in ("=>", "\\/", "/\\"):
                self.unify(lty, PROP, s.tok)
                self.unify(rty, PROP, s.tok)
                return App(Const(s.op, Arrow(PROP, Arrow(PROP, PROP))), (l, r)), PROP
            if s.op == "=":
                self.unify(lty, rty, s.tok)
                return App(Const("|>", Arrow(lty, Arrow(rty, PROP))), (l, r)), PROP
            if s.op == "|>":
                self.nabs_checks.append((lty, rty, s.tok))
                return App(Const("|>", Arrow(lty, Arrow(rty, PROP))), (l, r)), PROP
            if s.op == "::":
                c = self.lookup("::", s.tok)
                return self.infer_const_app(c, [(l, lty), (r, rty)], s.tok)
        raise ParseError(f"cannot elaborate {s!r}")

    def infer_const_app(self, c: Const, args, tok):
        ty = c.ty
        for _, aty in args:
            res = TMeta()
            self.unify(ty, Arrow(aty, res), tok)
            ty = res
        return App(c, tuple(a for a, _ in args)), ty

    def lookup(self, name: str, tok: Tok) -> Const:
        if name in self.extra:
            return self.extra[name]
        if name in self.sig.consts:
            return self.sig.consts[name]
        raise ParseError(f"unknown constant {name}", tok.line, tok.col)

    def ident(self, s: SId, env):
        name = s.name
        for k, (n, ty) in enumerate(env):
            if n == name:
                return Bound(k, ty), ty
        if name == "true":
            return Const("true", PROP), PROP
        if name == "false":
            return Const("false", PROP), PROP
        if name in self.env_vars:
            v = self.env_vars[name]
            return v, v.ty
        if name in self.extra or name in self.sig.consts:
            c = self.lookup(name, s.tok)
            return c, c.ty
        if re.fullmatch(r"n\d+", name):
            ty = TMeta()
            return Nom(int(name[1:]), ty), ty
        if self.clause_mode and name[0].isupper():
            if name not in self.clause_vars:
                self.clause_vars[name] = Var(name, TMeta())
            v = self.clause_vars[name]
            return v, v.ty
        raise ParseError(f"unknown identifier {name}", s.tok.line, s.tok.col)

    # zonking
    def zonk(self, t: Term, tok: Tok | None = None) -> Term:
        if isinstance(t, Bound):
            return Bound(t.idx, self.zonk_ty(t.ty, tok))
        if isinstance(t, Var):
            return Var(t.name, self.zonk_ty(t.ty, tok, f"variable {t.name}"))
        if isinstance(t, Nom):
            ty = self.zonk_ty(t.ty, tok, f"n{t.idx}")
            if mentions_prop(ty):
                raise ParseError(f"n{t.idx} cannot have type {ty}", *(tok.line, tok.col) if tok else (0, 0))
            return Nom(t.idx, ty)
        if isinstance(t, Const):
            ty = self.zonk_ty(t.ty, tok, t.name)
            if t.name in QUANTIFIERS and mentions_prop(ty.arg.arg):
                raise ParseError(f"cannot quantify over type {ty.arg.arg}",
                                 *(tok.line, tok.col) if tok else (0, 0))
            return Const(t.name, ty)
        if isinstance(t, Lam):
            return Lam(self.zonk_ty(t.ty, tok, f"binder {t.name}"), self.zonk(t.body, tok), t.name)
        return App(self.zonk(t.head, tok), tuple(self.zonk(a, tok) for a in t.args))

    def finish(self, pre: Term, tok: Tok | None) -> Term:
        for a, b, ntok in self.nabs_checks:
            try:
                check_nabs_shape(self.zonk_ty(a, ntok, "an operand of |>"),
                                 self.zonk_ty(b, ntok, "an operand of |>"))
            except TypeError as e:
                raise ParseError(str(e), ntok.line, ntok.col)
        return normalize(self.zonk(pre, tok))


def _tok_of(s) -> Tok | None:
    if isinstance(s, (SId, SHole)):
        return s.tok
    if isinstance(s, SBin):
        return s.tok
    if isinstance(s, SApp):
        return _tok_of(s.head)
    if isinstance(s, (SLam, SQuant)):
        return _tok_of(s.body)
    return None


def elaborate(s, sig: Signature, expected: Type | None = None, env_vars: dict[str, Var] | None = None,
              tok: Tok | None = None, allow_holes: bool = False) -> Term:
    e = Elab(sig, env_vars)
    pre, ty = e.infer(s, [])
    if expected is not None:
        e.unify(ty, expected, tok or _tok_of(s) or Tok("eof", "", 0, 0, 0))
    if e.holes and not allow_holes:
        h = e.holes[0][1]
        raise ParseError("holes are only allowed as apply witnesses", h.line, h.col)
    return e.finish(pre, tok or _tok_of(s))


# ---------------------------------------------------------------- declarations

@dataclass
class KindDecl:
    names: list[str]


@dataclass
class TypeDecl:
    names: list[str]
    ty: Type


@dataclass
class DefineDecl:
    flavor: str
    preds: list[Const]
    clauses: list[Clause]


@dataclass
class Tactic:
    kind: str
    args: dict = field(default_factory=dict)
    text: str = ""
    line: int = 0
    col: int = 0

    def __eq__(self, other) -> bool:
        return isinstance(other, Tactic) and (self.kind, _norm_args(self.args)) == (
            other.kind, _norm_args(other.args))


def _norm_args(args: dict) -> dict:
    out = {}
    for k, v in args.items():
        if isinstance(v, list):
            out[k] = [_strip(x) for x in v]
        else:
            out[k] = _strip(v)
    return out


def _strip(v):
    """Surface terms compared without source positions."""
    if isinstance(v, SId):
        return ("id", v.name)
    if isinstance(v, SHole):
        return ("_",)
    if isinstance(v, SApp):
        return ("app", _strip(v.head), tuple(_strip(a) for a in v.args))
    if isinstance(v, SLam):
        return ("lam", v.name, v.ty, _strip(v.body))
    if isinstance(v, SQuant):
        return ("q", v.q, v.name, v.ty, _strip(v.body))
    if isinstance(v, SBin):
        return ("bin", v.op, _strip(v.left), _strip(v.right))
    return v


@dataclass
class TheoremDecl:
    name: str
    formula: Term
    script: list[Tactic]
    line: int = field(default=0, compare=False)


@dataclass
class SourceFile:
    decls: list = field(default_factory=list)
    sig: Signature = field(default_factory=Signature)
    defs: DefTable = field(default_factory=DefTable)

    @property
    def theorems(self) -> list[TheoremDecl]:
        return [d for d in self.decls if isinstance(d, TheoremDecl)]


TACTICS = {"intros", "case", "induction", "coinduction", "apply", "exists", "split", "left",
           "right", "unfold", "assert", "search"}


class FileParser(Parser):
    def __init__(self, text: str, sig: Signature | None = None, clauses: list[Clause] | None = None) -> None:
        super().__init__(text)
        self.sf = SourceFile(sig=sig or Signature())
        self.clauses: list[Clause] = list(clauses or [])
        self.names: set[str] = set()

    def parse(self) -> SourceFile:
        while self.tok.kind != "eof":
            kw = self.ident()
            if kw.text == "Kind":
                self.kind_decl(kw)
            elif kw.text == "Type":
                self.type_decl(kw)
            elif kw.text == "Define":
                self.define(kw)
            elif kw.text == "Theorem":
                self.theorem(kw)
            else:
                self.error(f"expected a declaration, found {kw.text!r}", kw)
        self.sf.defs = self.build_defs()
        return self.sf

    def build_defs(self) -> DefTable:
        from .defs import DefinitionError
        try:
            return stratify(self.clauses)
        except DefinitionError as e:
            raise ParseError(str(e))

    def name_list(self) -> list[Tok]:
        out = [self.ident_or_sym()]
        while self.at(","):
            self.advance()
            out.append(self.ident_or_sym())
        return out

    def ident_or_sym(self) -> Tok:
        if self.at("::"):
            return self.advance()
        return self.ident()

    def declare(self, tok: Tok) -> None:
        if tok.text in self.names or tok.text in self.sf.sig.consts:
            self.error(f"duplicate declaration of {tok.text}", tok)
        if re.fullmatch(r"n\d+", tok.text) or tok.text in KEYWORDS:
            self.error(f"{tok.text} is reserved", tok)
        self.names.add(tok.text)

    def kind_decl(self, kw: Tok) -> None:
        names = self.name_list()
        t = self.ident()
        if t.text != "type":
            self.error("expected 'type'", t)
        self.expect(".")
        for n in names:
            if n.text in self.sf.sig.sorts:
                self.error(f"duplicate declaration of sort {n.text}", n)
            self.sf.sig.add_sort(n.text)
        self.sf.decls.append(KindDecl([n.text for n in names]))

    def type_decl(self, kw: Tok) -> None:
        names = self.name_list()
        ty = self.type_()
        end = self.expect(".")
        for n in names:
            self.declare(n)
            try:
                self.sf.sig.add_const(n.text, ty)
            except Exception as e:
                self.error(str(e), n)
        self.sf.decls.append(TypeDecl([n.text for n in names], ty))

    def define(self, kw: Tok) -> None:
        flavor = "plain"
        if self.tok.text in ("inductive", "coinductive"):
            flavor = self.advance().text
        preds: list[Const] = []
        while True:
            n = self.ident()
            self.expect(":")
            ty = self.type_()
            self.declare(n)
            try:
                self.sf.sig.check_type(ty)
            except Exception as e:
                self.error(str(e), n)
            from .syntax import split_type
            args, res = split_type(ty)
            if res != PROP:
                self.error(f"{n.text} must have a type ending in prop", n)
            if any(mentions_prop(a) for a in args):
                self.error(f"argument types of {n.text} may not mention prop", n)
            preds.append(Const(n.text, ty))
            if not self.at(","):
                break
            self.advance()
        by = self.ident()
        if by.text != "by":
            self.error("expected 'by'", by)
        local = {p.name: p for p in preds}
        clauses = []
        while True:
            clauses.append(self.clause(local, flavor))
            if self.at(";"):
                self.advance()
                continue
            self.expect(".")
            break
        for p in preds:
            self.sf.sig.consts[p.name] = p
        self.clauses += clauses
        self.sf.decls.append(DefineDecl(flavor, preds, clauses))

    def clause(self, local: dict[str, Const], flavor: str) -> Clause:
        start = self.tok
        znames: list[str] = []
        if self.at("nabla"):
            self.advance()
            while self.tok.kind == "id":
                znames.append(self.ident().text)
            if not znames:
                self.error("expected nabla binders")
            self.expect(",")
        head_s = self.app()
        body_s = None
        if self.at(":="):
            self.advance()
            body_s = self.term()
        e = Elab(self.sf.sig, clause_mode=True, extra_consts=local)
        env = [(z, TMeta()) for z in reversed(znames)]
        head_pre, hty = e.infer(head_s, env)
        self.unify_or_fail(e, hty, PROP, start)
        from .syntax import head_args
        h, args = head_args(head_pre)
        if not isinstance(h, Const) or h.name not in local:
            self.error("a clause head must be an atom of a predicate being defined", start)
        if body_s is not None:
            body_pre, bty = e.infer(body_s, [])
            e.unify(bty, PROP, _tok_of(body_s) or start)
        else:
            body_pre = Const("true", PROP)
        # nabla binders become placeholder variables for make_clause
        ztys = [e.zonk_ty(ty, start, f"nabla binder {n}") for n, ty in env]
        head = e.finish(head_pre, start)
        body = e.finish(body_pre, start)
        zs = [Var(f"z'{k}", ty) for k, ty in enumerate(reversed(ztys))]
        head = _instantiate_loose(head, list(reversed(zs)))
        _, args = head_args(head)
        xs = [e.zonk(v, start) for v in e.clause_vars.values()]
        from .nominal import support
        if support(head) or support(body):
            self.error("clauses may not mention nominal constants", start)
        return make_clause(local[h.name], xs, znames, zs, list(args), body, flavor)

    def unify_or_fail(self, e: Elab, a, b, tok: Tok) -> None:
        e.unify(a, b, tok)

    def theorem(self, kw: Tok) -> None:
        n, formula = self.theorem_header()
        script = []
        while not self.at("Qed"):
            if self.tok.kind == "eof":
                self.error(f"missing Qed for theorem {n.text}")
            script.append(self.tactic())
        self.advance()
        self.expect(".")
        self.sf.decls.append(TheoremDecl(n.text, formula, script, kw.line))

    def theorem_header(self) -> tuple[Tok, Term]:
        """name : formula.  (the Theorem keyword already consumed)"""
        n = self.ident()
        if any(isinstance(d, TheoremDecl) and d.name == n.text for d in self.sf.decls):
            self.error(f"duplicate theorem {n.text}", n)
        self.expect(":")
        ftok = self.tok
        f_s = self.term()
        self.expect(".")
        formula = elaborate(f_s, self.sf.sig, PROP, tok=ftok)
        from .defs import wellformed_formula
        try:
            wellformed_formula(formula)
        except Exception as e:
            self.error(str(e), ftok)
        return n, formula

    # tactics
    def tactic(self) -> Tactic:
        start = self.tok
        kw = self.ident()
        k = kw.text
        args: dict = {}
        if k not in TACTICS:
            self.error(f"unknown tactic {k}", kw)
        if k == "case":
            args["hyp"] = self.ident().text
        elif k == "induction":
            if self.at("on"):
                self.advance()
            args["hyp"] = self.ident().text
            self.keyword("with")
            args["S"] = self.term()
        elif k == "coinduction":
            self.keyword("with")
            args["S"] = self.term()
        elif k == "apply":
            args["lemma"] = self.ident().text
            if self.at("to"):
                self.advance()
                hyps = []
                while self.tok.kind == "id" and self.tok.text != "with":
                    hyps.append(self.ident().text)
                args["to"] = hyps
            if self.at("with"):
                self.advance()
                ws = [self.term()]
                while self.at(","):
                    self.advance()
                    ws.append(self.term())
                args["with"] = ws
        elif k == "exists":
            args["witness"] = self.term()
        elif k == "assert":
            args["formula"] = self.term()
        elif k in ("unfold", "search"):
            if self.tok.kind == "id" and self.tok.text.isdigit():
                args["n"] = int(self.advance().text)
        end = self.expect(".")
        text = self.text[start.pos:end.pos + 1]
        return Tactic(k, args, text, start.line, start.col)

    def keyword(self, w: str) -> None:
        t = self.ident()
        if t.text != w:
            self.error(f"expected {w!r}", t)


def _instantiate_loose(t: Term, zs: list[Var]) -> Term:
    """Replace loose Bound(k) by zs[k]."""
    def go(u: Term, d: int) -> Term:
        if isinstance(u, Bound):
            return zs[u.idx - d] if u.idx >= d else u
        if isinstance(u, Lam):
            return Lam(u.ty, go(u.body, d + 1), u.name)
        if isinstance(u, App):
            return App(go(u.head, d), tuple(go(a, d) for a in u.args))
        return u
    return go(t, 0)


def parse(text: str, sig: Signature | None = None, clauses: list[Clause] | None = None) -> SourceFile:
    return FileParser(text, sig, clauses).parse()


def parse_term(text: str, sig: Signature, expected: Type | None = None,
               env_vars: dict[str, Var] | None = None) -> Term:
    p = Parser(text)
    s = p.term()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return elaborate(s, sig, expected, env_vars)


def parse_surface(text: str):
    p = Parser(text)
    s = p.term()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return s


def parse_tactic(text: str) -> Tactic:
    p = FileParser(text)
    t = p.tactic()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return t


def parse_theorem_header(text: str, sig: Signature) -> tuple[str, Term]:
    """Parse `Theorem name : formula.` against an existing signature."""
    p = FileParser(text, sig)
    kw = p.ident()
    if kw.text != "Theorem":
        p.error("expected Theorem", kw)
    n, f = p.theorem_header()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return n.text, f
