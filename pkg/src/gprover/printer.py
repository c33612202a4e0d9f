"""Concrete syntax output.  parse(show(t)) recovers t up to alpha-conversion."""
from __future__ import annotations

from typing import TYPE_CHECKING

from .syntax import App, Bound, Const, Lam, Nom, Term, Var, eta_contract, head_args, subterms

if TYPE_CHECKING:
    from .nominal import Subst

INFIX = {"=>": (1, "right"), "\\/": (2, "right"), "/\\": (3, "right"), "|>": (4, None),
         "::": (5, "right")}
QUANT = ("forall", "exists", "nabla")
APP_PREC = 6


def _taken(t: Term) -> set[str]:
    out = set()
    for s in subterms(t):
        if isinstance(s, (Var, Const)):
            out.add(s.name)
    return out


def _pick(hint: str, avoid: set[str]) -> str:
    base = hint if hint and hint[0].isalpha() and hint.isidentifier() else "x"
    base = base.rstrip("0123456789") or "x"
    name, i = base, 0
    while name in avoid or (name[0] == "n" and name[1:].isdigit()):
        i += 1
        name = f"{base}{i}"
    return name


class _Show:
    def __init__(self, annotate: bool, taken: set[str]) -> None:
        self.annotate = annotate
        self.taken = taken

    def go(self, t: Term, env: list[str], prec: int) -> str:
        h, args = head_args(t)
        if isinstance(h, Const) and h.name in INFIX and len(args) == 2:
            return self.infix(h, args, env, prec)
        if isinstance(h, Const) and h.name in QUANT and len(args) == 1 and isinstance(args[0], Lam):
            return self.quant(h.name, args[0], env, prec)
        if isinstance(t, Lam):
            short = eta_contract(t)
            if short is not None:
                return self.go(short, env, prec)
            name = _pick(t.name, self.taken | set(env))
            binder = f"({name}:{t.ty})" if self.annotate else name
            s = f"{binder}\\ {self.go(t.body, [name] + env, 0)}"
            return f"({s})" if prec > 0 else s
        if args:
            parts = [self.atom(h, env)] + [self.go(a, env, APP_PREC + 1) for a in args]
            s = " ".join(parts)
            return f"({s})" if prec > APP_PREC else s
        return self.atom(h, env)

    def atom(self, h: Term, env: list[str]) -> str:
        if isinstance(h, Bound):
            return env[h.idx] if h.idx < len(env) else f"#{h.idx}"
        if isinstance(h, Nom):
            return f"n{h.idx}"
        if isinstance(h, (Var, Const)):
            return h.name
        return f"({self.go(h, env, 0)})"

    def infix(self, h: Const, args: tuple, env: list[str], prec: int) -> str:
        op = h.name
        p, assoc = INFIX[op]
        if op == "|>" and _degree_zero(h):
            op = "="
        lp = p + (0 if assoc == "left" else 1)
        rp = p + (0 if assoc == "right" else 1)
        s = f"{self.go(args[0], env, lp)} {op} {self.go(args[1], env, rp)}"
        return f"({s})" if prec > p else s

    def quant(self, q: str, lam: Lam, env: list[str], prec: int) -> str:
        names = []
        body: Term = lam
        while True:
            name = _pick(body.name, self.taken | set(env))
            env = [name] + env
            names.append(f"({name}:{body.ty})" if self.annotate else name)
            body = body.body
            h, args = head_args(body)
            if isinstance(h, Const) and h.name == q and len(args) == 1 and isinstance(args[0], Lam):
                body = args[0]
                continue
            break
        s = f"{q} {' '.join(names)}, {self.go(body, env, 0)}"
        return f"({s})" if prec > 0 else s


def _degree_zero(h: Const) -> bool:
    from .syntax import Arrow
    ty = h.ty
    return isinstance(ty, Arrow) and isinstance(ty.res, Arrow) and ty.arg == ty.res.arg


def show(t: Term, annotate: bool = False, taken: set[str] | None = None) -> str:
    return _Show(annotate, (taken or set()) | _taken(t)).go(t, [], 0)


def show_open(t: Term, env: list[str], annotate: bool = False) -> str:
    """Print t whose loose bound variables are named by env, innermost first."""
    return _Show(annotate, _taken(t) | set(env)).go(t, list(env), 0)


def show_subst(theta: "Subst") -> str:
    parts = [f"{show(t)}/{x.name}" for x, t in theta.map.items()]
    return "{" + ", ".join(parts) + "}"


def show_clause(cl) -> str:
    """One clause in surface form: [nabla z.., ] head [:= body]."""
    tys, head = _strip_lams(cl.head)
    names = list(cl.nabla_names) or [f"z{k}" for k in range(len(tys))]
    out = show_open(head, list(reversed(names)), annotate=True)
    if names:
        out = f"nabla {' '.join(names)}, {out}"
    if not (isinstance(cl.body, Const) and cl.body.name == "true"):
        out += " := " + show(cl.body, annotate=True)
    return out


def _strip_lams(t: Term):
    tys = []
    while isinstance(t, Lam):
        tys.append(t.ty)
        t = t.body
    return tys, t


def show_source(sf) -> str:
    """Print a parsed source file so that parsing the result gives it back."""
    from .parser import DefineDecl, KindDecl, TheoremDecl, TypeDecl
    parts = []
    for d in sf.decls:
        if isinstance(d, KindDecl):
            parts.append(f"Kind {', '.join(d.names)} type.")
        elif isinstance(d, TypeDecl):
            parts.append(f"Type {', '.join(d.names)} {d.ty}.")
        elif isinstance(d, DefineDecl):
            flavor = "" if d.flavor == "plain" else d.flavor + " "
            preds = ", ".join(f"{p.name} : {p.ty}" for p in d.preds)
            clauses = " ;\n  ".join(show_clause(c) for c in d.clauses)
            parts.append(f"Define {flavor}{preds} by\n  {clauses}.")
        elif isinstance(d, TheoremDecl):
            script = "\n".join(t.text for t in d.script)
            parts.append(f"Theorem {d.name} : {show(d.formula, annotate=True)}.\n{script}\nQed.")
    return "\n\n".join(parts) + ("\n" if parts else "")
